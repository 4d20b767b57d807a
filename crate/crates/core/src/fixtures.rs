//! Presentations and targets shipped with the crate.

use crate::format::parse_presentation;
use crate::pcp::PcPresentation;

pub const G1: &str = include_str!("../fixtures/g1.pcp");
pub const C3: &str = include_str!("../fixtures/c3.pcp");
pub const HEISENBERG: &str = include_str!("../fixtures/heisenberg.pcp");
pub const G5A: &str = include_str!("../fixtures/g5a.pcp");
pub const G5B: &str = include_str!("../fixtures/g5b.pcp");
pub const TARGET_9748: &str = include_str!("../fixtures/target.toml");

/// Parses one of the bundled presentations; they are known to be valid.
pub fn load(text: &str) -> PcPresentation {
    parse_presentation(text).expect("bundled presentation is valid")
}
