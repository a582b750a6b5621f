//! Right-hand sides of the main identities for class number one, with the
//! standard L-function of the eigenform supplied as opaque local factors.
//!
//! Rank one, `S = [[2t]]`:
//! `A(xi) L(F; s-k+3/2) zeta(2s-2k+4)^{-1} L(s-k+2, chi_t) / L(s-k+2, psi)`.
//!
//! Even rank `n`:
//! `A(xi) L(F; s-k+(n+2)/2) zeta(2s-2k+n+2)^{-1} L(s-k+(n+4)/2, chi_S)^{-1}
//!  prod_{i=1}^{n-1} zeta(s-k+n+2-i)^{-1}`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::format_rational;
use crate::congruence::{chi_s, chi_t, psi};
use crate::error::{Error, Result};
use crate::families::rank_one_parameter;
use crate::lattice::EvenLattice;
use crate::series::dirichlet::{euler_to_series, integer, FormalDirichletSeries};
use crate::series::local_factor::LocalFactor;

/// Local factors of `L(F; s + center_shift)` in `X = p^{-s}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpaqueLFunction {
    pub factors: BTreeMap<u64, LocalFactor>,
    pub center_shift: BigRational,
}

impl OpaqueLFunction {
    /// `L(F; s) = 1` at every prime up to `n_max`.
    pub fn trivial(n_max: u64) -> Self {
        Self {
            factors: crate::arith::primes_up_to(n_max)
                .into_iter()
                .map(|p| (p, LocalFactor::one(p)))
                .collect(),
            center_shift: BigRational::zero(),
        }
    }

    /// The factor of `L(F; s - a)` at `p`, for the rational `a`.
    fn shifted(&self, p: u64, a: &BigRational) -> Result<LocalFactor> {
        let f = self.factors.get(&p).ok_or(Error::MissingPrime(p))?;
        let total = a + &self.center_shift;
        if f.is_one() {
            return Ok(f.clone());
        }
        if !total.is_integer() {
            return Err(Error::HalfShiftUnpaired { p, shift: format_rational(&total) });
        }
        let e = total.to_integer();
        let e: i64 = e.try_into().map_err(|_| Error::Overflow("shift"))?;
        Ok(f.shift(e))
    }
}

fn half_integer(num: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(2))
}

/// Local factor of everything but `A(xi)` and the L-function in the rank-one identity.
fn rank_one_factor(t: i64, k: i64, p: u64) -> Result<LocalFactor> {
    let zeta_2s_inv = LocalFactor::from_ints(p, &[1, 0, -1], &[1])?.shift(k - 2);
    let l_chi = LocalFactor::geometric(p, integer(chi_t(t, p))).shift(k - 2);
    let l_psi_inv = LocalFactor::linear(p, integer(psi(p))).shift(k - 2);
    zeta_2s_inv.mul(&l_chi)?.mul(&l_psi_inv)
}

/// Same for even rank.
fn even_rank_factor(lat: &EvenLattice, k: i64, p: u64) -> Result<LocalFactor> {
    let n = lat.rank() as i64;
    let mut f = LocalFactor::from_ints(p, &[1, 0, -1], &[1])?.shift(k - (n + 2) / 2);
    f = f.mul(&LocalFactor::linear(p, integer(chi_s(lat, p)?)).shift(k - (n + 4) / 2))?;
    for i in 1..n {
        f = f.mul(&LocalFactor::linear(p, integer(1)).shift(k - n - 2 + i))?;
    }
    Ok(f)
}

fn check_rank(lat: &EvenLattice) -> Result<Option<i64>> {
    let n = lat.rank();
    if n == 1 {
        return rank_one_parameter(lat).map(Some).ok_or(Error::UnsupportedFamily);
    }
    if n % 2 == 1 {
        return Err(Error::OddEvenMismatch { rank: n });
    }
    Ok(None)
}

/// The assembled Dirichlet series, truncated at `n_max`.
pub fn assemble_main_theorem(
    lat: &EvenLattice,
    l_function: &OpaqueLFunction,
    a_xi: &BigRational,
    weight: i64,
    n_max: u64,
    bad_primes: &BTreeSet<u64>,
) -> Result<FormalDirichletSeries> {
    let t = check_rank(lat)?;
    let n = lat.rank() as i64;
    // L(F; s - k + (n+2)/2) = L(F; s - a) with a = k - (n+2)/2
    let a = integer(weight) - half_integer(n + 2);
    let mut factors = BTreeMap::new();
    for p in crate::arith::primes_up_to(n_max) {
        if bad_primes.contains(&p) {
            continue;
        }
        let rest = match t {
            Some(t) => rank_one_factor(t, weight, p)?,
            None => even_rank_factor(lat, weight, p)?,
        };
        factors.insert(p, l_function.shifted(p, &a)?.mul(&rest)?);
    }
    Ok(euler_to_series(&factors, n_max, bad_primes)?.scale(a_xi))
}

/// `sum_m A(m xi) m^{-s}` for a Hecke eigenform in the class-number-one case:
/// `A(xi) L(F; s-k+(n+2)/2) zeta(2s-2k+n+2)^{-1} L_1(s-k+(n+3)/2)^{-1}`, the
/// `zeta` factor present only for even `n`. `L_1(s) = zeta(s, psi) zeta(s)` in
/// rank one; for even `n` its local factor is
/// `prod_{j=0}^{n-1} (1 - p^{j-(n-1)/2} X)^{-1}`.
pub fn xi_coefficient_series(
    lat: &EvenLattice,
    l_function: &OpaqueLFunction,
    a_xi: &BigRational,
    weight: i64,
    n_max: u64,
    bad_primes: &BTreeSet<u64>,
) -> Result<FormalDirichletSeries> {
    let t = check_rank(lat)?;
    let n = lat.rank() as i64;
    let k = weight;
    let a = integer(weight) - half_integer(n + 2);
    let mut factors = BTreeMap::new();
    for p in crate::arith::primes_up_to(n_max) {
        if bad_primes.contains(&p) {
            continue;
        }
        let rest = match t {
            Some(_) => LocalFactor::linear(p, integer(psi(p)))
                .shift(k - 2)
                .mul(&LocalFactor::linear(p, integer(1)).shift(k - 2))?,
            None => {
                let mut f = LocalFactor::from_ints(p, &[1, 0, -1], &[1])?.shift(k - (n + 2) / 2);
                for i in 1..=n {
                    f = f.mul(&LocalFactor::linear(p, integer(1)).shift(k - n - 2 + i))?;
                }
                f
            }
        };
        factors.insert(p, l_function.shifted(p, &a)?.mul(&rest)?);
    }
    Ok(euler_to_series(&factors, n_max, bad_primes)?.scale(a_xi))
}
