use std::collections::{BTreeSet, HashMap};

use crate::data;
use crate::text::{data_lines, normalize_name};

/// Detector label to item-name mapping from `label -> item` lines.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelSynonyms {
    map: HashMap<String, Vec<String>>,
}

impl LabelSynonyms {
    pub fn from_list(contents: &str) -> Result<Self, String> {
        let mut map: HashMap<String, Vec<String>> = HashMap::new();
        for line in data_lines(contents) {
            let (label, item) = line
                .split_once("->")
                .ok_or_else(|| format!("expected `label -> item`: {line:?}"))?;
            let (label, item) = (normalize_name(label), normalize_name(item));
            if label.is_empty() || item.is_empty() {
                return Err(format!("empty side in {line:?}"));
            }
            map.entry(label).or_default().push(item);
        }
        Ok(Self { map })
    }

    /// Whether a confirmed detector label accounts for the item.
    pub fn matches(&self, label: &str, item: &str) -> bool {
        let (label, item) = (normalize_name(label), normalize_name(item));
        label == item
            || self
                .map
                .get(&label)
                .is_some_and(|items| items.contains(&item))
    }
}

impl LabelSynonyms {
    pub fn bundled() -> Self {
        Self::from_list(data::LABEL_SYNONYMS).expect("bundled synonyms are valid")
    }
}

/// Pruned items that no confirmed label accounts for, in pruned order.
pub fn missed_items(
    pruned: &[String],
    confirmed: &BTreeSet<String>,
    synonyms: &LabelSynonyms,
) -> Vec<String> {
    pruned
        .iter()
        .filter(|item| !confirmed.iter().any(|label| synonyms.matches(label, item)))
        .cloned()
        .collect()
}
