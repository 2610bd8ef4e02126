//! Precision/recall of the pattern pipeline against the tf-idf and
//! popular-mention baselines on a small annotated corpus.

use std::error::Error;

use tripminder::eval::{
    load_corpus, pattern_method, run_comparison, Averaging, PopularMentionsMethod, TfIdfMethod,
};

const CORPUS: &str = r#"{"text": "wear proper shoes hat water.", "ground_truth": ["shoes", "hat", "water"]}
{"text": "bring water hat umbrella as it was so so hot", "ground_truth": ["water", "hat", "umbrella"]}
{"text": "take off your shoes to walk on the uneven floors for a bit  they shouldnt complain since the artist makes a big deal about this.", "ground_truth": ["shoes"]}
{"text": "pick pocket warnings all over the place", "ground_truth": []}
{"text": "don't try to take a dip in the water, many have died here.", "ground_truth": []}
{"text": "be sure to apply sun screen wear a hat and good shoes not flip flop", "ground_truth": ["sun screen", "hat", "shoes"]}
"#;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let corpus = load_corpus(CORPUS)?;
    let ours = pattern_method();
    let tfidf = TfIdfMethod { k: 3 };
    let mentions = PopularMentionsMethod {
        mentions: vec!["water".into(), "shoes".into()],
    };
    for averaging in [Averaging::Macro, Averaging::Micro] {
        let report = run_comparison(&corpus, &[&ours, &tfidf, &mentions], averaging)?;
        print!("{}", report.render_text());
    }
    let report = run_comparison(&corpus, &[&ours], Averaging::Macro)?;
    for row in report.json_rows() {
        println!("{row}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
