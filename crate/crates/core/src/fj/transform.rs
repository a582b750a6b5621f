use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{divisors, rational_pow};
use crate::congruence::{count_congruence, solutions};
use crate::error::{Error, Result};
use crate::fj::provider::{xi_values, CoefficientProvider};
use crate::fj::table::FJCoefficientTable;
use crate::lattice::{EvenLattice, SupportPair};
use crate::series::{zeta_xi_series, FormalDirichletSeries, IdentityReport, ReportMismatch};

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `d^{k-n-1}`
fn divisor_weight(d: u64, weight: i64, rank: usize) -> BigRational {
    rational_pow(d, weight - rank as i64 - 1)
}

fn undefined_at(v: &[BigRational]) -> Error {
    let coords: Vec<String> = v.iter().map(crate::arith::format_rational).collect();
    Error::ProviderUndefined(format!("A({})", coords.join(", ")))
}

fn all_solutions(lat: &EvenLattice, d_disc: i64, d: u64) -> Vec<Vec<i64>> {
    solutions(lat, d_disc, d).expect("d >= 1")
}

/// `m * xi'` for `xi' = ((Q(s) - D)/(qd), S^{-1}s, d)`.
fn scaled_xi(lat: &EvenLattice, d_disc: i64, d: u64, m: u64, s: &[i64]) -> Result<Vec<BigRational>> {
    let m = int(m as i64);
    Ok(lat.xi_coords(d_disc, d, s)?.1.into_iter().map(|x| x * &m).collect())
}

/// `V_N^*`: the index-one table with
/// `c(D, r) = sum_{d | N} d^{k-n-1} sum_{s mod dS, Q(s) ≡ D (qd)} c_N((N/d)^2 D, (N/d) s)`
/// on every class `r` with `Q(r) ≡ D (mod q)`.
pub fn vn_adjoint(table: &FJCoefficientTable) -> FJCoefficientTable {
    let lat = table.lattice();
    let big_n = table.index();
    let k = table.weight();
    let q = lat.level() as i128;
    let divs = divisors(big_n);

    let mut candidates = BTreeSet::new();
    for d_big in table.discriminants() {
        for &d in &divs {
            let e = ((big_n / d) * (big_n / d)) as i64;
            if d_big % e == 0 {
                candidates.insert(d_big / e);
            }
        }
    }

    let present: BTreeSet<i64> = table.discriminants().into_iter().collect();
    let classes = lat.discriminant_representatives();
    let mut out = FJCoefficientTable::new(lat, 1, k).expect("index 1");
    for d_disc in candidates {
        let mut total = BigRational::zero();
        for &d in &divs {
            let m = big_n / d;
            let target = (m * m) as i64 * d_disc;
            if !present.contains(&target) {
                continue;
            }
            let mut inner = BigRational::zero();
            for s in all_solutions(lat, d_disc, d) {
                let r: Vec<i64> = s.iter().map(|&x| x * m as i64).collect();
                if let Some(c) = table.get_canonical(target, lat.canonical_residue(&r, big_n)) {
                    inner += c;
                }
            }
            if !inner.is_zero() {
                total += inner * divisor_weight(d, k, lat.rank());
            }
        }
        if total.is_zero() {
            continue;
        }
        for r in classes.iter().filter(|r| (lat.norm(r) - d_disc as i128).rem_euclid(q) == 0) {
            out.insert_canonical(d_disc, lat.canonical_residue(r, 1), total.clone());
        }
    }
    out
}

/// Pairing with the normalized Poincare series `P_{k,D,r}`: the `(D, r)`
/// coefficient of an index-one table.
pub fn poincare_pairing(table: &FJCoefficientTable, pair: &SupportPair) -> Result<BigRational> {
    if table.index() != 1 {
        return Err(Error::IndexMismatch { expected: 1, got: table.index() });
    }
    table.get(pair.d_disc, &pair.r)
}

/// The index-`N` table with `c((N/d)^2 D, (N/d) s) = A((N/d) xi')` for every
/// `d | N` and solution `s` modulo `dS`.
pub fn table_from_provider(
    provider: &dyn CoefficientProvider,
    lat: &EvenLattice,
    index: u64,
    weight: i64,
    d_disc: i64,
) -> Result<FJCoefficientTable> {
    let mut table = FJCoefficientTable::new(lat, index, weight)?;
    for d in divisors(index) {
        let m = index / d;
        for s in solutions(lat, d_disc, d)? {
            let v = scaled_xi(lat, d_disc, d, m, &s)?;
            let value = provider
                .coefficient(&v)
                .ok_or_else(|| undefined_at(&v))?;
            let r: Vec<i64> = s.iter().map(|&x| x * m as i64).collect();
            table.insert((m * m) as i64 * d_disc, &r, value)?;
        }
    }
    Ok(table)
}

/// `sum_{d | N} d^{k-n-1} sum_s A((N/d) xi')`, evaluated from the provider
/// without building a table.
pub fn direct_pairing(
    provider: &dyn CoefficientProvider,
    lat: &EvenLattice,
    d_disc: i64,
    index: u64,
    weight: i64,
) -> Result<BigRational> {
    let mut total = BigRational::zero();
    for d in divisors(index) {
        let mut inner = BigRational::zero();
        for s in solutions(lat, d_disc, d)? {
            let v = scaled_xi(lat, d_disc, d, index / d, &s)?;
            inner += provider
                .coefficient(&v)
                .ok_or_else(|| undefined_at(&v))?;
        }
        total += inner * divisor_weight(d, weight, lat.rank());
    }
    Ok(total)
}

fn require_distinguished(lat: &EvenLattice, d_disc: i64) -> Result<()> {
    if d_disc != -lat.level() {
        return Err(Error::UnsupportedXi(d_disc));
    }
    Ok(())
}

/// `a_N = sum_{d | N} d^{k-n-1} n(xi; d) A((N/d) xi)` over good `N`, for the
/// distinguished `xi = (1, 0, ..., 0, 1)` and `D = -q`.
pub fn inner_product_series(
    provider: &dyn CoefficientProvider,
    lat: &EvenLattice,
    d_disc: i64,
    weight: i64,
    n_max: u64,
    bad_primes: &BTreeSet<u64>,
) -> Result<FormalDirichletSeries> {
    require_distinguished(lat, d_disc)?;
    let a = xi_values(provider, lat.rank(), n_max)?;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    FormalDirichletSeries::from_fn(n_max, bad_primes.clone(), |big_n| {
        let mut acc = BigRational::zero();
        for d in divisors(big_n) {
            let count = match counts.get(&d) {
                Some(&c) => c,
                None => {
                    let c = count_congruence(lat, d_disc, d)?.count;
                    counts.insert(d, c);
                    c
                }
            };
            if count != 0 {
                acc += divisor_weight(d, weight, lat.rank()) * int(count as i64) * &a[(big_n / d) as usize - 1];
            }
        }
        Ok(acc)
    })
}

/// `sum_m A(m xi) m^{-s}` over good `m`.
pub fn provider_series(
    provider: &dyn CoefficientProvider,
    rank: usize,
    n_max: u64,
    bad_primes: &BTreeSet<u64>,
) -> Result<FormalDirichletSeries> {
    let a = xi_values(provider, rank, n_max)?;
    FormalDirichletSeries::from_fn(n_max, bad_primes.clone(), |m| Ok(a[m as usize - 1].clone()))
}

/// Compares [`inner_product_series`] with `zeta_xi(s - k + n + 1)` times
/// `sum_m A(m xi) m^{-s}`, coefficient by coefficient.
pub fn convolution_check(
    provider: &dyn CoefficientProvider,
    lat: &EvenLattice,
    d_disc: i64,
    weight: i64,
    n_max: u64,
    bad_primes: &BTreeSet<u64>,
) -> Result<IdentityReport> {
    let lhs = inner_product_series(provider, lat, d_disc, weight, n_max, bad_primes)?;
    let zeta = zeta_xi_series(lat, d_disc, n_max, bad_primes)?.shift(weight - lat.rank() as i64 - 1);
    let rhs = zeta.mul(&provider_series(provider, lat.rank(), n_max, bad_primes)?);
    let checked = (1..=n_max).filter(|&n| lhs.is_good(n)).count() as u64;
    Ok(IdentityReport {
        identity: format!("convolution n={} D={d_disc} k={weight}", lat.rank()),
        checked,
        mismatches: lhs
            .mismatches(&rhs)
            .into_iter()
            .map(|m| ReportMismatch {
                n: Some(m.n),
                p: None,
                k: None,
                lhs: crate::arith::format_rational(&m.lhs),
                rhs: crate::arith::format_rational(&m.rhs),
            })
            .collect(),
        skipped: Vec::new(),
        local_counts: 0,
    })
}

/// An index-`N` table with values uniform in `[-9, 9]` on every key
/// `((N/d)^2 D, r)`, `d | N`, `D` in `bases`, `r` running over all classes
/// modulo `NS` in the support.
pub fn random_table(lat: &EvenLattice, index: u64, weight: i64, bases: &[i64], seed: u64) -> Result<FJCoefficientTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = FJCoefficientTable::new(lat, index, weight)?;
    let residues = lat.residue_representatives(index);
    let mut keys = BTreeSet::new();
    for &base in bases {
        for d in divisors(index) {
            keys.insert(((index / d) * (index / d)) as i64 * base);
        }
    }
    for d_disc in keys {
        for r in &residues {
            if table.in_support(d_disc, r)? {
                table.insert(d_disc, r, int(rng.gen_range(-9i64..=9)))?;
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::fj::provider::{FnProvider, MapProvider, ScalarProvider, SeededProvider};

    fn ones() -> FnProvider<impl Fn(&[BigRational]) -> Option<BigRational>> {
        FnProvider(|_: &[BigRational]| Some(int(1)))
    }

    #[test]
    fn adjoint_of_constant_table_t1_n5() {
        let s2 = EvenLattice::rank_one(1).unwrap();
        let table = table_from_provider(&ones(), &s2, 5, 10, -4).unwrap();
        // d = 1: one class at D = -100; d = 5: two classes at D = -4
        assert_eq!(table.len(), 3);
        let out = vn_adjoint(&table);
        let pair = SupportPair::new(&s2, -4, vec![0]).unwrap();
        assert_eq!(poincare_pairing(&out, &pair).unwrap(), int(781_251));
        assert_eq!(int(1) + int(2) * int(5).pow(8), int(781_251));
        assert_eq!(direct_pairing(&ones(), &s2, -4, 5, 10).unwrap(), int(781_251));
        let series = inner_product_series(&ones(), &s2, -4, 10, 5, &BTreeSet::from([2])).unwrap();
        assert_eq!(series.coeff(5), int(781_251));
    }

    #[test]
    fn adjoint_of_single_entry_keeps_the_d_equal_one_term() {
        let s2 = EvenLattice::rank_one(1).unwrap();
        let mut table = FJCoefficientTable::new(&s2, 5, 10).unwrap();
        table.insert(-100, &[0], int(1)).unwrap();
        let out = vn_adjoint(&table);
        assert_eq!(out.get(-4, &[0]).unwrap(), int(1));
    }

    #[test]
    fn index_one_is_identity_when_classes_are_unique() {
        // every D has a single admissible class mod 2 for S = [[2]]
        let s2 = EvenLattice::rank_one(1).unwrap();
        let table = random_table(&s2, 1, 10, &[-4, -3, -7, -8, -11], 5).unwrap();
        assert_eq!(vn_adjoint(&table).entries().filter(|(_, _, v)| !v.is_zero()).count(),
                   table.entries().filter(|(_, _, v)| !v.is_zero()).count());
        for (d, r, v) in table.entries() {
            assert_eq!(&vn_adjoint(&table).get(d, r).unwrap(), v);
        }
        let e8 = families::e8();
        let table = random_table(&e8, 1, 12, &[-2, -4, -6], 9).unwrap();
        let out = vn_adjoint(&table);
        for (d, r, v) in table.entries() {
            assert_eq!(&out.get(d, r).unwrap(), v);
        }
    }

    #[test]
    fn pairing_contract() {
        let hex = families::hexagonal();
        let mut t = FJCoefficientTable::new(&hex, 1, 10).unwrap();
        let pair = SupportPair::new(&hex, -3, vec![0, 0]).unwrap();
        assert_eq!(poincare_pairing(&t, &pair).unwrap(), int(0));
        t.insert(-3, &[0, 0], int(7)).unwrap();
        assert_eq!(poincare_pairing(&t, &pair).unwrap(), int(7));
        let t2 = FJCoefficientTable::new(&hex, 2, 10).unwrap();
        assert_eq!(poincare_pairing(&t2, &pair), Err(Error::IndexMismatch { expected: 1, got: 2 }));
        let zero = SupportPair::new(&hex, 0, vec![0, 0]).unwrap();
        assert!(matches!(poincare_pairing(&t, &zero), Err(Error::KeyOutsideSupport { .. })));
    }

    #[test]
    fn provider_examples() {
        let s2 = EvenLattice::rank_one(1).unwrap();
        // A(m xi) = m, N = 2: value N/d at the d-th block
        let p = ScalarProvider::new(&s2, -4, (1..=4).map(int).collect());
        let t = table_from_provider(&p, &s2, 2, 10, -4).unwrap();
        assert_eq!(t.get(-16, &[0]).unwrap(), int(2));
        assert_eq!(t.get(-4, &[2]).unwrap(), int(1));
        assert_eq!(t.len(), 2);
        assert!(matches!(
            table_from_provider(&MapProvider::default(), &s2, 2, 10, -4),
            Err(Error::ProviderUndefined(_))
        ));
        let hex = families::hexagonal();
        let t = table_from_provider(&ones(), &hex, 6, 10, -3).unwrap();
        assert!(t.entries().all(|(_, _, v)| *v == int(1)));
    }

    #[test]
    fn inner_product_special_cases() {
        let hex = families::hexagonal();
        let bad = hex.default_bad_primes(-3);
        let zero = FnProvider(|_: &[BigRational]| Some(int(0)));
        let s = inner_product_series(&zero, &hex, -3, 10, 40, &bad).unwrap();
        assert!(s.coeffs().iter().all(|x| x.is_zero()));
        // A supported at m = 1 only
        let mut values = vec![int(0); 40];
        values[0] = int(3);
        let delta = ScalarProvider::new(&hex, -3, values);
        let s = inner_product_series(&delta, &hex, -3, 10, 40, &bad).unwrap();
        for n in 1..=40u64 {
            let expect = if s.is_good(n) {
                rational_pow(n, 10 - 3) * int(count_congruence(&hex, -3, n).unwrap().count as i64) * int(3)
            } else {
                int(0)
            };
            assert_eq!(s.coeff(n), expect, "n = {n}");
        }
        assert_eq!(s.coeff(1), int(3));
        assert_eq!(
            inner_product_series(&delta, &hex, -7, 10, 10, &bad),
            Err(Error::UnsupportedXi(-7))
        );
    }

    #[test]
    fn reduced_formula_matches_direct_sum_over_solutions() {
        // with D = -q every xi' is primitive of norm 1, so the scalar model
        // turns the sum over s into n(xi; d) A((N/d) xi)
        for lat in [EvenLattice::rank_one(1).unwrap(), families::hexagonal(), families::binary_det15()] {
            let d_disc = -lat.level();
            let bad = lat.default_bad_primes(d_disc);
            let p = ScalarProvider::seeded(&lat, d_disc, 30, 11);
            let s = inner_product_series(&p, &lat, d_disc, 10, 30, &bad).unwrap();
            for n in (1..=30u64).filter(|&n| s.is_good(n)) {
                assert_eq!(direct_pairing(&p, &lat, d_disc, n, 10).unwrap(), s.coeff(n), "n = {n}");
            }
        }
    }

    #[test]
    fn convolution_with_random_provider() {
        let s2 = EvenLattice::rank_one(1).unwrap();
        let p = ScalarProvider::seeded(&s2, -4, 60, 42);
        let r = convolution_check(&p, &s2, -4, 10, 60, &BTreeSet::from([2])).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.checked, 30);
    }

    #[test]
    fn two_paths_agree_with_seeded_provider() {
        let hex = families::hexagonal();
        let p = SeededProvider { seed: 3 };
        for n in 1..=12 {
            let table = table_from_provider(&p, &hex, n, 10, -3).unwrap();
            let pair = SupportPair::new(&hex, -3, vec![0, 0]).unwrap();
            let via_table = poincare_pairing(&vn_adjoint(&table), &pair).unwrap();
            assert_eq!(via_table, direct_pairing(&p, &hex, -3, n, 10).unwrap(), "N = {n}");
        }
    }

    #[test]
    fn adjoint_output_is_constant_in_r() {
        let hex = families::hexagonal();
        for seed in 0..5 {
            let table = random_table(&hex, 3, 10, &[-3, -2, -11], seed).unwrap();
            let out = vn_adjoint(&table);
            for d_disc in out.discriminants() {
                let values: BTreeSet<BigRational> = hex
                    .residue_representatives(1)
                    .iter()
                    .filter(|r| out.in_support(d_disc, r).unwrap())
                    .map(|r| out.get(d_disc, r).unwrap())
                    .collect();
                assert_eq!(values.len(), 1);
            }
        }
    }
}
