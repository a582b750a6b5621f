use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{factorize, format_rational, is_coprime_to_all, primes_up_to, rational_pow};
use crate::error::{Error, Result};
use crate::series::local_factor::LocalFactor;

/// Truncated Dirichlet series `sum_{n <= n_max} a_n n^{-s}` with every `a_n`
/// for `n` divisible by a bad prime forced to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalDirichletSeries {
    n_max: u64,
    /// `coeffs[n - 1] = a_n`
    coeffs: Vec<BigRational>,
    bad_primes: BTreeSet<u64>,
}

/// A coefficient where two series disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientMismatch {
    pub n: u64,
    pub lhs: BigRational,
    pub rhs: BigRational,
}

impl FormalDirichletSeries {
    pub fn zero(n_max: u64, bad_primes: BTreeSet<u64>) -> Self {
        Self { n_max, coeffs: vec![BigRational::zero(); n_max as usize], bad_primes }
    }

    /// `a_n = f(n)` on good `n`.
    pub fn from_fn<F>(n_max: u64, bad_primes: BTreeSet<u64>, mut f: F) -> Result<Self>
    where
        F: FnMut(u64) -> Result<BigRational>,
    {
        let mut s = Self::zero(n_max, bad_primes);
        for n in 1..=n_max {
            if s.is_good(n) {
                s.coeffs[n as usize - 1] = f(n)?;
            }
        }
        Ok(s)
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn bad_primes(&self) -> &BTreeSet<u64> {
        &self.bad_primes
    }

    pub fn is_good(&self, n: u64) -> bool {
        is_coprime_to_all(n, &self.bad_primes)
    }

    /// `a_n`, zero beyond the truncation.
    pub fn coeff(&self, n: u64) -> BigRational {
        if n == 0 || n > self.n_max {
            BigRational::zero()
        } else {
            self.coeffs[n as usize - 1].clone()
        }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Dirichlet product, truncated to the smaller bound, bad primes united.
    pub fn mul(&self, other: &Self) -> Self {
        let n_max = self.n_max.min(other.n_max);
        let bad: BTreeSet<u64> = self.bad_primes.union(&other.bad_primes).copied().collect();
        let mut out = Self::zero(n_max, bad);
        for d in 1..=n_max {
            let a = &self.coeffs[d as usize - 1];
            if a.is_zero() {
                continue;
            }
            let mut m = 1;
            while d * m <= n_max {
                let b = &other.coeffs[m as usize - 1];
                if !b.is_zero() {
                    out.coeffs[(d * m) as usize - 1] += a * b;
                }
                m += 1;
            }
        }
        out.clear_bad();
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = self.clone();
        for x in out.coeffs.iter_mut() {
            *x *= c;
        }
        out
    }

    /// The series of `L(s - a)` from that of `L(s)`: `a_n -> n^a a_n`.
    pub fn shift(&self, a: i64) -> Self {
        let mut out = self.clone();
        for (i, x) in out.coeffs.iter_mut().enumerate() {
            if !x.is_zero() {
                *x *= rational_pow(i as u64 + 1, a);
            }
        }
        out
    }

    fn clear_bad(&mut self) {
        for n in 1..=self.n_max {
            if !self.is_good(n) {
                self.coeffs[n as usize - 1] = BigRational::zero();
            }
        }
    }

    /// Coefficients `n <= min(n_max)` where the two series differ.
    pub fn mismatches(&self, other: &Self) -> Vec<CoefficientMismatch> {
        let n_max = self.n_max.min(other.n_max);
        (1..=n_max)
            .filter_map(|n| {
                let (a, b) = (self.coeff(n), other.coeff(n));
                (a != b).then_some(CoefficientMismatch { n, lhs: a, rhs: b })
            })
            .collect()
    }

    pub fn formatted_coeffs(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rational).collect()
    }
}

/// Builds `prod_p factor_p(p^{-s})` truncated at `n_max`.
///
/// `a_n` is the product over `p^k || n` of the `k`-th Taylor coefficient at
/// `p`; factors are expected to start with `1 + O(X)`.
pub fn euler_to_series(
    factors: &BTreeMap<u64, LocalFactor>,
    n_max: u64,
    bad_primes: &BTreeSet<u64>,
) -> Result<FormalDirichletSeries> {
    let mut expansions: BTreeMap<u64, Vec<BigRational>> = BTreeMap::new();
    for p in primes_up_to(n_max) {
        if bad_primes.contains(&p) {
            continue;
        }
        let f = factors.get(&p).ok_or(Error::MissingPrime(p))?;
        let mut k_max = 0;
        let mut pk = 1u64;
        while pk <= n_max / p {
            pk *= p;
            k_max += 1;
        }
        expansions.insert(p, f.expand(k_max));
    }
    FormalDirichletSeries::from_fn(n_max, bad_primes.clone(), |n| {
        let mut acc = BigRational::one();
        for (p, k) in factorize(n) {
            acc *= &expansions[&p][k as usize];
        }
        Ok(acc)
    })
}

/// Local factors `p -> f(p)` for every good prime up to `n_max`.
pub fn factors_for<F>(n_max: u64, bad_primes: &BTreeSet<u64>, mut f: F) -> Result<BTreeMap<u64, LocalFactor>>
where
    F: FnMut(u64) -> Result<LocalFactor>,
{
    primes_up_to(n_max)
        .into_iter()
        .filter(|p| !bad_primes.contains(p))
        .map(|p| Ok((p, f(p)?)))
        .collect()
}

pub(crate) fn integer(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(v: &[u64]) -> BTreeSet<u64> {
        v.iter().copied().collect()
    }

    fn zeta(n_max: u64, bad: &BTreeSet<u64>) -> FormalDirichletSeries {
        let f = factors_for(n_max, bad, |p| Ok(LocalFactor::geometric(p, integer(1)))).unwrap();
        euler_to_series(&f, n_max, bad).unwrap()
    }

    fn mobius_squared(n: u64) -> bool {
        factorize(n).iter().all(|&(_, e)| e == 1)
    }

    #[test]
    fn zeta_truncation() {
        let z = zeta(6, &BTreeSet::new());
        assert_eq!(z.coeffs(), &vec![integer(1); 6][..]);
    }

    #[test]
    fn rank_one_factors_t1() {
        let bad = set(&[2]);
        let f = factors_for(10, &bad, |p| {
            let chi = crate::congruence::chi_t(1, p) as i64;
            LocalFactor::from_ints(p, &[1, 1], &[1, -chi])
        })
        .unwrap();
        let s = euler_to_series(&f, 10, &bad).unwrap();
        assert_eq!(s.coeff(5), integer(2));
        assert_eq!(s.coeff(7), integer(0));
        // chi_1(3) = -1, so the factor at 3 is 1; s^2 ≡ -4 (mod 36) has no root
        assert_eq!(s.coeff(9), integer(0));
        let lat = crate::lattice::EvenLattice::rank_one(1).unwrap();
        assert_eq!(crate::congruence::count_congruence(&lat, -4, 9).unwrap().count, 0);
        assert_eq!(s.coeff(2), integer(0));
        assert_eq!(s.coeff(1), integer(1));
    }

    #[test]
    fn rank_one_factors_t3() {
        let bad = set(&[2, 3]);
        let f = factors_for(10, &bad, |p| {
            let chi = crate::congruence::chi_t(3, p) as i64;
            LocalFactor::from_ints(p, &[1, 1], &[1, -chi])
        })
        .unwrap();
        assert_eq!(euler_to_series(&f, 10, &bad).unwrap().coeff(7), integer(2));
    }

    #[test]
    fn missing_prime() {
        let mut f = BTreeMap::new();
        f.insert(2, LocalFactor::one(2));
        assert_eq!(euler_to_series(&f, 10, &BTreeSet::new()), Err(Error::MissingPrime(3)));
    }

    #[test]
    fn zeta_over_zeta_2s_is_squarefree_indicator() {
        let n_max = 500;
        let bad = BTreeSet::new();
        let inv2 = factors_for(n_max, &bad, |p| LocalFactor::from_ints(p, &[1, 0, -1], &[1])).unwrap();
        let s = zeta(n_max, &bad).mul(&euler_to_series(&inv2, n_max, &bad).unwrap());
        for n in 1..=n_max {
            assert_eq!(s.coeff(n), integer(mobius_squared(n) as i64), "n = {n}");
        }
    }

    #[test]
    fn local_shift_matches_series_shift() {
        let n_max = 200;
        let bad = set(&[2]);
        let f = factors_for(n_max, &bad, |p| Ok(LocalFactor::geometric(p, integer(3)))).unwrap();
        let base = euler_to_series(&f, n_max, &bad).unwrap();
        for a in [-2i64, -1, 1, 4] {
            let shifted_factors: BTreeMap<u64, LocalFactor> = f.iter().map(|(&p, l)| (p, l.shift(a))).collect();
            let lhs = euler_to_series(&shifted_factors, n_max, &bad).unwrap();
            assert_eq!(lhs, base.shift(a));
        }
    }

    #[test]
    fn product_truncates_and_unites_bad_primes() {
        let a = zeta(20, &set(&[2]));
        let b = zeta(10, &set(&[3]));
        let c = a.mul(&b);
        assert_eq!(c.n_max(), 10);
        assert_eq!(c.bad_primes(), &set(&[2, 3]));
        assert_eq!(c.coeff(5), integer(2));
        assert_eq!(c.coeff(6), integer(0));
    }

    fn arb_series(n_max: u64) -> impl Strategy<Value = FormalDirichletSeries> {
        proptest::collection::vec(-20i64..20, n_max as usize).prop_map(move |v| {
            FormalDirichletSeries::from_fn(n_max, BTreeSet::new(), |n| Ok(integer(v[n as usize - 1]))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn dirichlet_product_laws(f in arb_series(60), g in arb_series(60), h in arb_series(60)) {
            prop_assert_eq!(f.mul(&g), g.mul(&f));
            prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
            let fg = f.mul(&g);
            for n in 1..=60u64 {
                let direct: BigRational = crate::arith::divisors(n)
                    .into_iter()
                    .map(|d| f.coeff(d) * g.coeff(n / d))
                    .sum();
                prop_assert_eq!(fg.coeff(n), direct);
            }
        }
    }
}
