//! File formats, SVG rendering and the check suites behind the `cliffspec`
//! binary.

pub mod format;
pub mod meta;
pub mod render;
pub mod suites;
