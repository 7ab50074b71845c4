//! Bundled reference graphs.
//!
//! The Limits-to-Growth diagram has four variables and five links arranged in
//! a reinforcing growth loop (population and net increase) and a balancing
//! capacity loop (population and carrying capacity), with resources per
//! capita feeding carrying capacity. Three variants model an increasingly
//! distant set of comparison diagrams.

use crate::graph::{parse_cld_text, parse_json, CausalGraph};

pub const LIMITS_TO_GROWTH_JSON: &str = include_str!("../fixtures/limits_to_growth.json");
pub const LIMITS_TO_GROWTH_CLD: &str = include_str!("../fixtures/limits_to_growth.mmd");
pub const LTG_STRONG_CLD: &str = include_str!("../fixtures/ltg_strong.mmd");
pub const LTG_MODERATE_CLD: &str = include_str!("../fixtures/ltg_moderate.mmd");
pub const LTG_DISSIMILAR_CLD: &str = include_str!("../fixtures/ltg_dissimilar.mmd");
pub const SCHOOL_CLD: &str = include_str!("../fixtures/school_reference.mmd");

pub fn limits_to_growth() -> CausalGraph {
    parse_json(LIMITS_TO_GROWTH_JSON.as_bytes()).expect("bundled fixture is valid")
}

/// Same variables; one link dropped and one reversed.
pub fn ltg_strong() -> CausalGraph {
    parse_cld_text(LTG_STRONG_CLD).expect("bundled fixture is valid")
}

/// Two of the four variables missing.
pub fn ltg_moderate() -> CausalGraph {
    parse_cld_text(LTG_MODERATE_CLD).expect("bundled fixture is valid")
}

/// No shared variable names; a single positive loop.
pub fn ltg_dissimilar() -> CausalGraph {
    parse_cld_text(LTG_DISSIMILAR_CLD).expect("bundled fixture is valid")
}

/// Three-variable school enrollment diagram.
pub fn school() -> CausalGraph {
    parse_cld_text(SCHOOL_CLD).expect("bundled fixture is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse_and_agree() {
        let json = limits_to_growth();
        let text = parse_cld_text(LIMITS_TO_GROWTH_CLD).unwrap();
        assert_eq!((json.node_count(), json.edge_count()), (4, 5));
        // same content, different storage order
        let mut a: Vec<_> = json.edges().iter().map(|e| (e.src.clone(), e.dst.clone(), e.polarity)).collect();
        let mut b: Vec<_> = text.edges().iter().map(|e| (e.src.clone(), e.dst.clone(), e.polarity)).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        for g in [ltg_strong(), ltg_moderate(), ltg_dissimilar(), school()] {
            assert!(!g.is_empty());
        }
    }
}
