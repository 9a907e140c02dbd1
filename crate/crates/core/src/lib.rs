//! Requirements-oriented AI ethics assurance.
//!
//! An [`AssuranceCase`](model::AssuranceCase) holds an STPA chain from
//! losses down to verifiable requirements, a goal graph that turns accepted
//! evidence into a mitigation verdict, a lifecycle checklist, and the
//! supplier / validator / regulator review state with its audit trail.

mod keyword;

pub mod assessors;
pub mod checklist;
pub mod dsl;
pub mod goal;
pub mod model;
pub mod report;
pub mod stpa;
pub mod workflow;

pub use keyword::UnknownKeyword;

/// The transparency case worked through end to end, in `.elens` form.
pub const TRANSPARENCY_EXAMPLE: &str = include_str!("../examples/transparency.elens");
