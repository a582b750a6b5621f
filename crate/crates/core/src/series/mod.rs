//! Exact local factors, truncated Dirichlet series, and the Euler-product
//! identities for `zeta_xi` and the assembled main series.

mod assembly;
mod dirichlet;
mod identities;
mod local_factor;

pub use assembly::{assemble_main_theorem, xi_coefficient_series, OpaqueLFunction};
pub use dirichlet::{euler_to_series, factors_for, CoefficientMismatch, FormalDirichletSeries};
pub use identities::{
    evenrank_zeta_xi_factor, verify_evenrank_identity, verify_evenrank_identity_with, verify_rank1_identity,
    zeta_xi_series, zeta_xi_series_with, IdentityReport, ReportMismatch,
};
pub use local_factor::{expand_local, LocalFactor, LocalFactorView, Poly};
