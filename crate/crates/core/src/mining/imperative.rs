use std::collections::HashSet;

use super::Sentence;
use crate::data;
use crate::text::data_lines;

/// Decides whether a lowercased token can open an imperative.
pub trait VerbTagger: Send + Sync {
    fn is_verb(&self, token: &str) -> bool;
}

/// Verb lemmas from a word list, plus the auxiliaries and adverbs that open
/// commands ("do", "don't", "be", "never").
#[derive(Debug, Clone)]
pub struct VerbLexicon {
    lemmas: HashSet<String>,
}

impl VerbLexicon {
    pub fn from_list(contents: &str) -> Self {
        Self {
            lemmas: data_lines(contents).map(|l| l.to_lowercase()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.lemmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lemmas.is_empty()
    }
}

impl Default for VerbLexicon {
    fn default() -> Self {
        Self::from_list(data::VERB_LEXICON)
    }
}

impl VerbTagger for VerbLexicon {
    fn is_verb(&self, token: &str) -> bool {
        self.lemmas.contains(token)
    }
}

fn alphabetic_tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !(c.is_alphabetic() || c == '\'' || c == '’'))
        .map(|t| t.trim_matches(|c| c == '\'' || c == '’'))
        .filter(|t| t.chars().next().is_some_and(char::is_alphabetic))
        .map(|t| t.replace('’', "'").to_lowercase())
}

/// True when the sentence opens with a verb (after skipping any leading
/// "please") or ends with '!'.
pub fn is_imperative(sentence: &Sentence, verbs: &dyn VerbTagger) -> bool {
    let trimmed = sentence
        .text
        .trim_end()
        .trim_end_matches(['"', '\'', ')', '”', '’']);
    if trimmed.ends_with('!') {
        return true;
    }
    alphabetic_tokens(&sentence.text)
        .find(|t| t != "please")
        .is_some_and(|t| verbs.is_verb(&t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn imperative(text: &str) -> bool {
        is_imperative(&Sentence::standalone(text), &VerbLexicon::default())
    }

    #[test]
    fn bundled_lexicon_is_substantial() {
        assert!(VerbLexicon::default().len() >= 500);
    }

    #[test]
    fn verb_initial_and_exclamations() {
        assert!(imperative("wear proper shoes hat water."));
        assert!(imperative("It was great!"));
        assert!(imperative("It was great!\""));
        assert!(!imperative("The beach is crowded."));
        assert!(imperative("Don't forget to bring your student ID Card."));
        assert!(imperative("Please, please respond soon."));
        assert!(imperative("  \"Bring water\" he said"));
        assert!(!imperative(""));
        assert!(!imperative("Please."));
    }
}
