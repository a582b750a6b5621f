use std::collections::BTreeSet;

use num_rational::BigRational;
use serde::Serialize;

use crate::arith::{format_rational, is_squarefree, prime_divisors};
use crate::congruence::{chi_s, chi_t, count_congruence_with, CountMethod};
use crate::error::{Error, Result};
use crate::lattice::EvenLattice;
use crate::series::dirichlet::{euler_to_series, factors_for, integer, FormalDirichletSeries};
use crate::series::local_factor::LocalFactor;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportMismatch {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub checked: u64,
    pub mismatches: Vec<ReportMismatch>,
    /// Requested primes outside the identity's hypotheses.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<u64>,
    /// Counts that came from the local path rather than enumeration.
    pub local_counts: u64,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn coefficient_mismatch(n: u64, lhs: &BigRational, rhs: &BigRational) -> ReportMismatch {
    ReportMismatch { n: Some(n), p: None, k: None, lhs: format_rational(lhs), rhs: format_rational(rhs) }
}

fn local_mismatch(p: u64, k: u32, lhs: &BigRational, rhs: &BigRational) -> ReportMismatch {
    ReportMismatch { n: None, p: Some(p), k: Some(k), lhs: format_rational(lhs), rhs: format_rational(rhs) }
}

/// `zeta_xi(s) = sum n(xi; N) N^{-s}` over good `N`, counts from
/// [`count_congruence_with`] in `method`.
pub fn zeta_xi_series_with(
    lat: &EvenLattice,
    d_disc: i64,
    n_max: u64,
    bad_primes: &BTreeSet<u64>,
    method: CountMethod,
) -> Result<FormalDirichletSeries> {
    Ok(zeta_xi_counted(lat, d_disc, n_max, bad_primes, method)?.0)
}

/// The series together with the number of coefficients taken from the local path.
fn zeta_xi_counted(
    lat: &EvenLattice,
    d_disc: i64,
    n_max: u64,
    bad_primes: &BTreeSet<u64>,
    method: CountMethod,
) -> Result<(FormalDirichletSeries, u64)> {
    let mut local = 0;
    let series = FormalDirichletSeries::from_fn(n_max, bad_primes.clone(), |n| {
        let c = count_congruence_with(lat, d_disc, n, method)?;
        local += (c.method == CountMethod::Local) as u64;
        Ok(integer(c.count))
    })?;
    Ok((series, local))
}

pub fn zeta_xi_series(
    lat: &EvenLattice,
    d_disc: i64,
    n_max: u64,
    bad_primes: &BTreeSet<u64>,
) -> Result<FormalDirichletSeries> {
    zeta_xi_series_with(lat, d_disc, n_max, bad_primes, CountMethod::Auto)
}

/// Largest `k` with `p^k <= n`.
fn max_power(p: u64, n: u64) -> u32 {
    let mut k = 0;
    let mut pk = 1u64;
    while pk <= n / p {
        pk *= p;
        k += 1;
    }
    k
}

/// `zeta_xi(s) = zeta(s) zeta(2s)^{-1} L(s, chi_t)` for `S = [[2t]]`, `D = -4t`.
pub fn verify_rank1_identity(t: i64, n_max: u64, bad_primes: &BTreeSet<u64>) -> Result<IdentityReport> {
    if t < 1 || !is_squarefree(t as u64) {
        return Err(Error::NotSquarefree(t));
    }
    let required: BTreeSet<u64> = std::iter::once(2).chain(prime_divisors(t as u64)).collect();
    if !required.is_subset(bad_primes) {
        return Err(Error::InvalidArgument(format!(
            "bad primes must contain 2 and the primes of t = {t}"
        )));
    }
    let lat = EvenLattice::rank_one(t)?;
    let (lhs, mut local_counts) = zeta_xi_counted(&lat, -4 * t, n_max, bad_primes, CountMethod::Auto)?;

    let zeta = factors_for(n_max, bad_primes, |p| Ok(LocalFactor::geometric(p, integer(1))))?;
    let zeta_2s_inv = factors_for(n_max, bad_primes, |p| LocalFactor::from_ints(p, &[1, 0, -1], &[1]))?;
    let l_chi = factors_for(n_max, bad_primes, |p| Ok(LocalFactor::geometric(p, integer(chi_t(t, p)))))?;
    let rhs = euler_to_series(&zeta, n_max, bad_primes)?
        .mul(&euler_to_series(&zeta_2s_inv, n_max, bad_primes)?)
        .mul(&euler_to_series(&l_chi, n_max, bad_primes)?);

    let mut mismatches: Vec<ReportMismatch> = lhs
        .mismatches(&rhs)
        .iter()
        .map(|m| coefficient_mismatch(m.n, &m.lhs, &m.rhs))
        .collect();
    let mut checked = n_max;

    // per prime: the three factors reduce to (1 + X)/(1 - chi_t X), whose
    // expansion is the count generating function
    for (&p, z) in &zeta {
        let product = z.mul(&zeta_2s_inv[&p])?.mul(&l_chi[&p])?;
        let closed = LocalFactor::from_ints(p, &[1, 1], &[1, -(chi_t(t, p) as i64)])?;
        checked += 1;
        if product != closed {
            mismatches.push(local_mismatch(p, 0, &integer(0), &integer(1)));
        }
        let k_max = max_power(p, n_max).max(1);
        let expansion = closed.expand(k_max as usize);
        for k in 1..=k_max {
            let c = count_congruence_with(&lat, -4 * t, p.pow(k), CountMethod::Auto)?;
            local_counts += (c.method == CountMethod::Local) as u64;
            checked += 1;
            let count = integer(c.count);
            if count != expansion[k as usize] {
                mismatches.push(local_mismatch(p, k, &count, &expansion[k as usize]));
            }
        }
    }
    Ok(IdentityReport {
        identity: format!("rank1 t={t}"),
        checked,
        mismatches,
        skipped: Vec::new(),
        local_counts,
    })
}

/// Local factor of `zeta(s - (n-1)) zeta(s - n/2 + 1, chi_S)^{-1}` at `p`.
pub fn evenrank_zeta_xi_factor(lat: &EvenLattice, p: u64) -> Result<LocalFactor> {
    let n = lat.rank() as i64;
    let chi = chi_s(lat, p)?;
    let zeta = LocalFactor::geometric(p, integer(1)).shift(n - 1);
    let l_chi_inv = LocalFactor::geometric(p, integer(chi)).shift(n / 2 - 1).inverse()?;
    zeta.mul(&l_chi_inv)
}

/// `sum_k n(xi; p^k) X^k = (1 - chi_S(p) p^{n/2-1} X) / (1 - p^{n-1} X)` for
/// each listed prime, up to `X^{k_max}`, with `D = -q`.
pub fn verify_evenrank_identity(lat: &EvenLattice, primes: &[u64], k_max: u32) -> Result<IdentityReport> {
    verify_evenrank_identity_with(lat, primes, k_max, CountMethod::Auto)
}

pub fn verify_evenrank_identity_with(
    lat: &EvenLattice,
    primes: &[u64],
    k_max: u32,
    method: CountMethod,
) -> Result<IdentityReport> {
    let n = lat.rank();
    if n % 2 == 1 {
        return Err(Error::OddRank(n));
    }
    let q = lat.level();
    let mut report = IdentityReport {
        identity: format!("evenrank n={n} det={}", lat.det()),
        checked: 0,
        mismatches: Vec::new(),
        skipped: Vec::new(),
        local_counts: 0,
    };
    for &p in primes {
        if p % 2 == 0 || lat.det() as u64 % p == 0 || !crate::arith::is_prime(p) {
            report.skipped.push(p);
            continue;
        }
        let product = evenrank_zeta_xi_factor(lat, p)?;
        let chi = chi_s(lat, p)? as i64;
        let half = (n / 2 - 1) as u32;
        let closed = LocalFactor::from_ints(
            p,
            &[1, -chi * (p as i64).pow(half)],
            &[1, -(p as i64).pow(n as u32 - 1)],
        )?;
        report.checked += 1;
        if product != closed {
            report.mismatches.push(local_mismatch(p, 0, &integer(0), &integer(1)));
        }
        let expansion = closed.expand(k_max as usize);
        for k in 0..=k_max {
            let c = count_congruence_with(lat, -q, p.pow(k), method)?;
            report.local_counts += (c.method == CountMethod::Local) as u64;
            report.checked += 1;
            let count = integer(c.count);
            if count != expansion[k as usize] {
                report.mismatches.push(local_mismatch(p, k, &count, &expansion[k as usize]));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    fn set(v: &[u64]) -> BTreeSet<u64> {
        v.iter().copied().collect()
    }

    #[test]
    fn zeta_xi_examples() {
        let s2 = EvenLattice::rank_one(1).unwrap();
        let z = zeta_xi_series(&s2, -4, 10, &set(&[2])).unwrap();
        assert_eq!(z.coeff(1), integer(1));
        assert_eq!(z.coeff(5), integer(2));
        assert_eq!(z.coeff(7), integer(0));
        assert_eq!(z.coeff(2), integer(0));
        let hex = families::hexagonal();
        let z = zeta_xi_series(&hex, -3, 10, &set(&[2, 3])).unwrap();
        assert_eq!(z.coeff(1), integer(1));
        assert_eq!(z.coeff(7), integer(6));
    }

    #[test]
    fn rank1_identity_small() {
        for (t, bad) in [(1, vec![2]), (15, vec![2, 3, 5]), (5, vec![2, 5]), (2, vec![2])] {
            let r = verify_rank1_identity(t, 60, &set(&bad)).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn rank1_identity_preconditions() {
        assert_eq!(verify_rank1_identity(4, 10, &set(&[2])), Err(Error::NotSquarefree(4)));
        assert!(matches!(verify_rank1_identity(3, 10, &set(&[2])), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn rank1_identity_detects_a_wrong_character() {
        // zeta_xi for t = 1 against the product for t = 2 must disagree
        let bad = set(&[2]);
        let lhs = zeta_xi_series(&EvenLattice::rank_one(1).unwrap(), -4, 30, &bad).unwrap();
        let l_chi = factors_for(30, &bad, |p| Ok(LocalFactor::geometric(p, integer(chi_t(2, p))))).unwrap();
        let wrong = euler_to_series(&l_chi, 30, &bad).unwrap();
        assert!(!lhs.mismatches(&wrong).is_empty());
    }

    #[test]
    fn evenrank_examples() {
        let hex = families::hexagonal();
        let r = verify_evenrank_identity(&hex, &[7], 2).unwrap();
        assert!(r.passed());
        assert_eq!(r.checked, 4);
        let f = evenrank_zeta_xi_factor(&hex, 7).unwrap();
        assert_eq!(f.expand(2), vec![integer(1), integer(6), integer(42)]);
        let r = verify_evenrank_identity(&families::e8(), &[3], 1).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = verify_evenrank_identity(&hex, &[2, 3, 5], 1).unwrap();
        assert_eq!(r.skipped, vec![2, 3]);
        assert!(r.passed());
        assert_eq!(
            verify_evenrank_identity(&EvenLattice::rank_one(1).unwrap(), &[5], 1),
            Err(Error::OddRank(1))
        );
    }
}
