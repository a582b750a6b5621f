//! Sources of Fourier coefficients `A(v)` of the orthogonal form, evaluated
//! at rational vectors `v` of length `n + 2`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::format_rational;
use crate::error::{Error, Result};
use crate::lattice::{AmbientForms, EvenLattice};

pub trait CoefficientProvider: Sync {
    /// `A(v)`, or `None` where the provider is undefined.
    fn coefficient(&self, v: &[BigRational]) -> Option<BigRational>;
}

/// `A(v) = f(v)`.
pub struct FnProvider<F>(pub F);

impl<F> CoefficientProvider for FnProvider<F>
where
    F: Fn(&[BigRational]) -> Option<BigRational> + Sync,
{
    fn coefficient(&self, v: &[BigRational]) -> Option<BigRational> {
        (self.0)(v)
    }
}

/// Finitely many explicit values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MapProvider {
    pub values: HashMap<Vec<BigRational>, BigRational>,
}

impl CoefficientProvider for MapProvider {
    fn coefficient(&self, v: &[BigRational]) -> Option<BigRational> {
        self.values.get(v).cloned()
    }
}

/// Class-number-one model: every primitive `w` with `phi0[w] = -D/q` is
/// equivalent to `xi`, so `A(m w) = A(m xi)` is a function of `m` alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarProvider {
    s0: Vec<Vec<i64>>,
    norm: BigRational,
    /// `values[m - 1] = A(m xi)`
    values: Vec<BigRational>,
}

impl ScalarProvider {
    pub fn new(lat: &EvenLattice, d_disc: i64, values: Vec<BigRational>) -> Self {
        Self {
            s0: AmbientForms::new(lat).s0,
            norm: BigRational::new((-d_disc).into(), lat.level().into()),
            values,
        }
    }

    /// `A(m xi)` drawn uniformly from `[-9, 9]` for `m <= len`.
    pub fn seeded(lat: &EvenLattice, d_disc: i64, len: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..len).map(|_| BigRational::from_integer(rng.gen_range(-9i64..=9).into())).collect();
        Self::new(lat, d_disc, values)
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// `gcd` of the integers `v^t S0 e_i`, if they are integers.
    fn content(&self, v: &[BigRational]) -> Option<BigInt> {
        let mut g = BigInt::zero();
        for row in &self.s0 {
            let mut acc = BigRational::zero();
            for (&c, x) in row.iter().zip(v) {
                if c != 0 {
                    acc += x * BigRational::from_integer(c.into());
                }
            }
            if !acc.is_integer() {
                return None;
            }
            g = g.gcd(&acc.to_integer());
        }
        Some(g)
    }
}

impl CoefficientProvider for ScalarProvider {
    fn coefficient(&self, v: &[BigRational]) -> Option<BigRational> {
        if v.len() != self.s0.len() {
            return None;
        }
        // outside the positive cone
        if v[v.len() - 1].is_negative() {
            return Some(BigRational::zero());
        }
        let m = self.content(v)?;
        if m.is_zero() {
            return None;
        }
        let mut norm = BigRational::zero();
        for (i, row) in self.s0.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c != 0 {
                    norm += &v[i] * &v[j] * BigRational::from_integer(c.into());
                }
            }
        }
        norm /= BigRational::from_integer(2.into());
        let m_sq = BigRational::from_integer(&m * &m);
        if norm != m_sq * &self.norm {
            return None;
        }
        let m = m.to_usize()?;
        self.values.get(m - 1).cloned()
    }
}

/// Pseudo-random integer values in `[-9, 9]`, a fixed function of the seed
/// and the vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededProvider {
    pub seed: u64,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

impl CoefficientProvider for SeededProvider {
    fn coefficient(&self, v: &[BigRational]) -> Option<BigRational> {
        let text: Vec<String> = v.iter().map(format_rational).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ fnv1a(text.join(",").as_bytes()));
        Some(BigRational::from_integer(rng.gen_range(-9i64..=9).into()))
    }
}

/// `A(m xi)` for `m = 1..=len`.
pub fn xi_values(provider: &dyn CoefficientProvider, rank: usize, len: u64) -> Result<Vec<BigRational>> {
    (1..=len)
        .map(|m| {
            let v = crate::lattice::multiple_of_xi(rank, m);
            provider
                .coefficient(&v)
                .ok_or_else(|| Error::ProviderUndefined(format!("A({m} xi)")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::multiple_of_xi;

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn scalar_provider_reads_multiples_of_xi() {
        let s2 = EvenLattice::rank_one(1).unwrap();
        let p = ScalarProvider::new(&s2, -4, (1..=5).map(int).collect());
        for m in 1..=5 {
            assert_eq!(p.coefficient(&multiple_of_xi(1, m)), Some(int(m as i64)));
        }
        assert_eq!(p.coefficient(&multiple_of_xi(1, 6)), None);
        // xi' = (1, 1, 2) from d = 2, s = 2 has content 1 and norm 1
        let v = s2.xi_vector(-4, 2, &[2]).unwrap();
        assert_eq!((v.content, v.norm.clone()), (1, int(1)));
        assert_eq!(p.coefficient(&v.coords), Some(int(1)));
        // wrong norm
        assert_eq!(p.coefficient(&[int(1), int(0), int(2)]), None);
        // non-integral pairing
        assert_eq!(p.coefficient(&[BigRational::new(1.into(), 2.into()), int(0), int(1)]), None);
        assert_eq!(p.coefficient(&[int(-1), int(0), int(-1)]), Some(int(0)));
    }

    #[test]
    fn seeded_providers_are_deterministic() {
        let v = multiple_of_xi(2, 3);
        let a = SeededProvider { seed: 42 };
        assert_eq!(a.coefficient(&v), a.coefficient(&v));
        let spread: std::collections::BTreeSet<String> = (0..200u64)
            .map(|s| format_rational(&SeededProvider { seed: s }.coefficient(&v).unwrap()))
            .collect();
        assert!(spread.len() > 10);
        let hex = crate::families::hexagonal();
        assert_eq!(ScalarProvider::seeded(&hex, -3, 30, 7), ScalarProvider::seeded(&hex, -3, 30, 7));
        assert!(ScalarProvider::seeded(&hex, -3, 30, 7)
            .values()
            .iter()
            .all(|x| x.abs() <= int(9)));
    }

    #[test]
    fn empty_map_is_undefined() {
        let p = MapProvider::default();
        assert!(matches!(xi_values(&p, 1, 3), Err(Error::ProviderUndefined(_))));
        let ones = FnProvider(|_: &[BigRational]| Some(int(1)));
        assert_eq!(xi_values(&ones, 1, 3).unwrap(), vec![int(1); 3]);
    }
}
