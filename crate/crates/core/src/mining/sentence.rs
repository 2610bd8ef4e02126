use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SentenceSource {
    Review { poi: String },
    Email,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: String,
    pub source: SentenceSource,
    pub index: usize,
}

impl Sentence {
    /// A sentence that did not come out of the splitter (tests, eval).
    pub fn standalone(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            source: SentenceSource::Email,
            index: 0,
        }
    }
}

/// Words that end in '.' without ending a sentence.
const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "st", "jr", "sr", "vs", "etc", "e.g", "i.e", "no", "approx",
    "dept", "a.m", "p.m", "mt", "ft", "ave", "blvd", "inc", "ltd", "co",
];

const TERMINATORS: &[char] = &['.', '!', '?'];
const CLOSERS: &[char] = &['"', '\'', ')', ']', '”', '’'];

fn word_before(text: &str, end: usize) -> &str {
    let start = text[..end]
        .rfind(|c: char| c.is_whitespace() || c == '(' || c == '"')
        .map(|i| i + 1)
        .unwrap_or(0);
    &text[start..end]
}

/// Splits on '.', '!' and '?' followed by whitespace or end of text. The
/// terminator (and any run of terminators/closing quotes) stays on the
/// sentence. A '.' after a known abbreviation does not split.
pub fn split_sentences(text: &str, source: SentenceSource) -> Vec<Sentence> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if !TERMINATORS.contains(&c) {
            continue;
        }
        let mut end = i + c.len_utf8();
        while let Some(&(j, next)) = chars.peek() {
            if TERMINATORS.contains(&next) || CLOSERS.contains(&next) {
                end = j + next.len_utf8();
                chars.next();
            } else {
                break;
            }
        }
        let at_boundary = text[end..].chars().next().is_none_or(char::is_whitespace);
        if !at_boundary {
            continue;
        }
        if c == '.' && end == i + 1 {
            let word = word_before(text, i).to_lowercase();
            if ABBREVIATIONS.contains(&word.as_str()) {
                continue;
            }
        }
        push(&mut out, &text[start..end], &source);
        start = end;
    }
    push(&mut out, &text[start..], &source);
    out
}

fn push(out: &mut Vec<Sentence>, piece: &str, source: &SentenceSource) {
    let piece = piece.trim();
    if piece.is_empty() {
        return;
    }
    out.push(Sentence {
        text: piece.to_owned(),
        source: source.clone(),
        index: out.len(),
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(text: &str) -> Vec<String> {
        split_sentences(text, SentenceSource::Email)
            .into_iter()
            .map(|s| s.text)
            .collect()
    }

    #[test]
    fn splits_and_keeps_terminators() {
        assert_eq!(
            texts("wear a hat. bring water!"),
            vec!["wear a hat.", "bring water!"]
        );
        assert!(texts("").is_empty());
        assert!(texts("   ").is_empty());
    }

    #[test]
    fn abbreviation_guard() {
        assert_eq!(texts("Dr. Smith said go."), vec!["Dr. Smith said go."]);
        assert_eq!(
            texts("Dear Mr. Wingly, welcome. See you"),
            vec!["Dear Mr. Wingly, welcome.", "See you"]
        );
    }

    #[test]
    fn inner_dots_and_runs() {
        assert_eq!(
            texts("Visit tripadvisor.com now!! It costs 3.5 dollars?"),
            vec!["Visit tripadvisor.com now!!", "It costs 3.5 dollars?"]
        );
        assert_eq!(
            texts("He said \"go.\" Then left"),
            vec!["He said \"go.\"", "Then left"]
        );
    }

    #[test]
    fn indices_and_source_are_recorded() {
        let s = split_sentences(
            "a. b.",
            SentenceSource::Review {
                poi: "Nye Beach".into(),
            },
        );
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].index, 1);
        assert_eq!(
            s[0].source,
            SentenceSource::Review {
                poi: "Nye Beach".into()
            }
        );
    }
}
