//! Data files shipped with the crate. Every stage that consumes one of these
//! also accepts a user-supplied replacement.

pub const LOCATIONS: &str = include_str!("../data/locations.txt");
pub const REGIONS: &str = include_str!("../data/regions.txt");
pub const GIVEN_NAMES: &str = include_str!("../data/given_names.txt");
pub const VERB_LEXICON: &str = include_str!("../data/verb_lexicon.txt");
pub const CARRYABLE_GAZETTEER: &str = include_str!("../data/carryable_gazetteer.txt");
pub const WEATHER_RULES: &str = include_str!("../data/weather_rules.toml");
pub const LABEL_SYNONYMS: &str = include_str!("../data/label_synonyms.txt");
