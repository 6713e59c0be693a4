//! Requirement formulas and pairwise compatibility between component records.

mod compat;
mod requirement;

pub use compat::{
    check_compatibility, filter_candidates, filter_candidates_verbose, Check, CompatibilityReport,
    Subject, Verdict, ATTRIBUTE_UNKNOWN,
};
pub use requirement::{parse_requirement, RequirementConstraint, RequirementError};
