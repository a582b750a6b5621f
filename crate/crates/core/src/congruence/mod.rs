//! Smith normal form, congruence-solution counts `n(xi; d)`, their closed
//! forms, and the quadratic characters they are expressed in.

mod count;
mod local;
pub mod snf;
mod symbols;

pub use count::{
    count_congruence, count_congruence_with, discriminant_count, residue_count, solutions, CountMethod,
    CountResult, BRUTE_BUDGET,
};
pub use local::closed_form_count;
pub use snf::{smith_normal_form, SnfDecomposition};
pub use symbols::{chi_s, chi_t, is_square_in_qp, kronecker_symbol, psi};
