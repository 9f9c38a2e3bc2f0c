//! Bundled example models.

use defcohom::{ComplexModel, Result};

pub const TORUS3: &str = include_str!("../corpus/torus3.json");
pub const IWASAWA: &str = include_str!("../corpus/iwasawa.json");
pub const KODAIRA_THURSTON: &str = include_str!("../corpus/kodaira_thurston.json");

/// Name and document text of each bundled model.
pub const MODELS: [(&str, &str); 3] = [("torus3", TORUS3), ("iwasawa", IWASAWA), ("kodaira_thurston", KODAIRA_THURSTON)];

/// The bundled models, validated.
pub fn corpus_models() -> Vec<ComplexModel> {
    MODELS.iter().map(|(_, text)| ComplexModel::from_json(text).expect("bundled model validates")).collect()
}

pub fn bundled(name: &str) -> Option<&'static str> {
    MODELS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn load_bundled(name: &str) -> Option<Result<ComplexModel>> {
    bundled(name).map(ComplexModel::from_json)
}
