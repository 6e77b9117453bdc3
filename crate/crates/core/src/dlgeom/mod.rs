//! Finite models of the level-two coverings attached to the tori of `SL_2`:
//! lines and relative positions, `X~`, `X~'`, the surface model of `X~''`,
//! and assembly of the virtual characters `R^theta`.

mod assemble;
mod coverings;
mod flags;
mod gset;
mod surface;

pub use assemble::{
    degree_counts, gram, gram_check, span_check, DecompositionReport, DecompositionTerm, DlContext, GramEntry,
    GramMember, GramReport, ItemizationRow, SpanReport, Variety, VirtualCharacter,
};
pub use coverings::{
    build_xtil, build_xtil_prime, component_of, component_point, in_xtil_prime, ComponentLabel, GammaPrimeElement,
    Xtil, XtilPrime,
};
pub use flags::{all_lines, flag_positions, FlagLine, FlagReport, RelPosition};
pub use gset::{FiniteGSet, GammaDual, Perm};
pub use surface::{
    enumerate_s00, lefschetz_xtilpp, scalar_of, LefschetzEngine, Surface00, Surface00Report, S00_DEGREE,
};
