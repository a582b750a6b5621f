//! Fourier-Jacobi coefficient tables, the coefficient action of the adjoint
//! `V_N^*`, pairing with normalized Poincare series, and the convolution
//! identity behind the main Dirichlet series (class number one).

mod provider;
mod table;
mod transform;

pub use provider::{xi_values, CoefficientProvider, FnProvider, MapProvider, ScalarProvider, SeededProvider};
pub use table::{FJCoefficientTable, TableEntry, TableFile};
pub use transform::{
    convolution_check, direct_pairing, inner_product_series, poincare_pairing, provider_series, random_table,
    table_from_provider, vn_adjoint,
};
