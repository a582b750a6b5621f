//! Exact arithmetic for the Fourier-Jacobi Dirichlet series of orthogonal
//! cusp forms: even lattices and their invariants, congruence counts, formal
//! Euler products, the rank-one class-number criterion, and Fourier-Jacobi
//! coefficient tables.

pub mod arith;
pub mod classnumber;
pub mod congruence;
pub mod error;
pub mod families;
pub mod fj;
pub mod lattice;
pub mod series;

pub use error::{Error, Result};
pub use lattice::{AmbientForms, EvenLattice, LatticeFile, SupportPair, XiVector};
