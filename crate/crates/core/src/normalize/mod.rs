//! Normalized coefficients, their closed forms, and commutant-based
//! irreducibility checks.

mod closed;
mod coeffs;
mod commutant;
mod irreducibility;
mod projections;

pub use closed::{
    check_single_entry_pattern, closed_form_coefficient, inverse_relation_residual, inverse_relation_tables,
    pipeline_coefficient, verify_inverse_relation, CoeffName, InverseRelationFailure, InverseTables, PatternViolation,
};
pub use coeffs::{symmetrized_normalized_coeff, NormalizedCoeffs};
pub use commutant::{
    commutant_basis, commutant_basis_numeric, nullspace_exact, Arithmetic, CommutantReport, Verdict,
    DEFAULT_TOLERANCE,
};
pub use irreducibility::{irreducibility_from_coeffs, irreducibility_verdict, irreducibility_verdict_numeric};
pub use projections::{is_reducing, reducing_projections, Projection, RealEntries};
