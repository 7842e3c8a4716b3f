//! Audits of the velocity decomposition, the trapezoid and bracket
//! estimates, growth fits and conservation.

pub mod conservation;
pub mod diffineq;
pub mod fit;
pub mod growth;
pub mod keylemma;
pub mod sector;
pub mod trapezoid;

pub use conservation::{conservation_audit, level_set_area, refinement_table, DriftRow, RefinementRow};
pub use diffineq::{c3_constant, diffineq_audit, rectangle_integral, time_derivative, DiffIneqAudit};
pub use fit::{fit_line, LineFit};
pub use growth::{growth_fit, GrowthFit};
pub use keylemma::{
    apply_bound, extract_b, fit_remainder_constant, key_lemma_table, q_integral, sample_points, KeyLemmaSample,
    RemainderFit,
};
pub use sector::{ball_points, sector_floor, sector_lower_bound_check, sector_signs, SectorCheck, SectorSigns};
pub use trapezoid::{trapezoid_check, TrapezoidVerdict};
