//! Imperative sentences in reviews and the carry-able objects they name.

use std::error::Error;

use tripminder::mining::{
    is_imperative, split_sentences, ObjectExtractor, PatternExtractor, SentenceSource, VerbLexicon,
};

const REVIEW: &str = "Gorgeous trail along the cliffs. Bring water and a hat, there is no shade! \
    Don't swim near the rocks, the current is strong. Be sure to pack sunscreen and wear good shoes. \
    We saw seals. Do not forget your camera.";

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let verbs = VerbLexicon::default();
    let extractor = PatternExtractor::default();
    let source = SentenceSource::Review {
        poi: "Cliff Walk".into(),
    };
    for sentence in split_sentences(REVIEW, source) {
        if is_imperative(&sentence, &verbs) {
            println!(
                "imperative  {:?} -> {:?}",
                sentence.text,
                extractor.extract(&sentence)?
            );
        } else {
            println!("declarative {:?}", sentence.text);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
