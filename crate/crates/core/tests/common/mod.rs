#![allow(dead_code)]

use defcohom::ComplexModel;

pub const TORUS3: &str = include_str!("../../../cli/corpus/torus3.json");
pub const IWASAWA: &str = include_str!("../../../cli/corpus/iwasawa.json");
pub const KODAIRA_THURSTON: &str = include_str!("../../../cli/corpus/kodaira_thurston.json");

pub fn torus3() -> ComplexModel {
    ComplexModel::from_json(TORUS3).unwrap()
}

pub fn iwasawa() -> ComplexModel {
    ComplexModel::from_json(IWASAWA).unwrap()
}

pub fn kodaira_thurston() -> ComplexModel {
    ComplexModel::from_json(KODAIRA_THURSTON).unwrap()
}

pub fn corpus() -> Vec<ComplexModel> {
    vec![torus3(), iwasawa(), kodaira_thurston()]
}
pub mod oracle;
pub mod random;
