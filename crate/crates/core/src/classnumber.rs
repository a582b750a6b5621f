//! Imaginary quadratic fields `K = Q(sqrt(-t))` and the index
//! `[H(xi)_A : H(xi)_Q (H(xi)_A ∩ C)]` of the rank-one case, whose value 1 is
//! the class-number-one condition for `S = [[2t]]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::arith::{is_squarefree, omega, prime_divisors, rational_pow};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TwoBehavior {
    Ramified,
    Inert,
    Split,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImagQuadField {
    pub t: i64,
    pub disc: i64,
    pub class_number: u64,
    /// Number of prime factors of `t`.
    pub omega_t: u32,
    pub two_behavior: TwoBehavior,
    /// `[U : U']`
    pub unit_index: u64,
    pub mu: u32,
    pub ramified_primes: Vec<u64>,
}

fn require_squarefree(t: i64) -> Result<()> {
    if t < 1 || !is_squarefree(t as u64) {
        return Err(Error::NotSquarefree(t));
    }
    Ok(())
}

/// Discriminant of `Q(sqrt(-t))`.
pub fn field_discriminant(t: i64) -> Result<i64> {
    require_squarefree(t)?;
    Ok(if t % 4 == 3 { -t } else { -4 * t })
}

fn is_fundamental(disc: i64) -> bool {
    if disc >= 0 {
        return false;
    }
    match disc.rem_euclid(4) {
        1 => is_squarefree(disc.unsigned_abs()),
        0 => {
            let m = disc / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// Number of reduced primitive forms `(a, b, c)` of discriminant `disc`.
pub fn class_number_by_forms(disc: i64) -> Result<u64> {
    if !is_fundamental(disc) {
        return Err(Error::NotDiscriminant(disc));
    }
    let n = -disc;
    let mut count = 0;
    let mut a = 1i64;
    while 3 * a * a <= n {
        for b in -a + 1..=a {
            if (b - disc).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) == 1 {
                count += 1;
            }
        }
        a += 1;
    }
    Ok(count)
}

impl ImagQuadField {
    pub fn new(t: i64) -> Result<Self> {
        let disc = field_discriminant(t)?;
        let two_behavior = if disc % 2 == 0 {
            TwoBehavior::Ramified
        } else if (-t).rem_euclid(8) == 5 {
            TwoBehavior::Inert
        } else {
            TwoBehavior::Split
        };
        let omega_t = omega(t as u64);
        Ok(Self {
            t,
            disc,
            class_number: class_number_by_forms(disc)?,
            omega_t,
            two_behavior,
            unit_index: match t {
                1 => 2,
                3 => 3,
                _ => 1,
            },
            mu: if t == 1 { 0 } else { omega_t },
            ramified_primes: prime_divisors(disc.unsigned_abs()),
        })
    }
}

/// `c_K 2^{1-mu-1} 2 [U:U']^{-1} f_2`, with `f_2 = 1` when `t ≢ 3 (mod 4)`,
/// `2 (1 + 1/2) = 3` when 2 is inert and `2 (1 - 1/2) = 1` when 2 splits.
pub fn rank1_index(t: i64) -> Result<BigRational> {
    let k = ImagQuadField::new(t)?;
    let f2: i64 = match k.two_behavior {
        TwoBehavior::Ramified => 1,
        TwoBehavior::Inert => 3,
        TwoBehavior::Split => 1,
    };
    let value = BigRational::from_integer(BigInt::from(k.class_number))
        * rational_pow(2, -(k.mu as i64))
        * BigRational::from_integer(2.into())
        * BigRational::new(BigInt::one(), BigInt::from(k.unit_index))
        * BigRational::from_integer(f2.into());
    Ok(value)
}

/// `t in {1, 2, 3}`, or `c_K = 2^{k-1}` with `t ≢ 3 (mod 4)` or `t ≡ 7 (mod 8)`.
pub fn is_admissible_rank1(t: i64) -> Result<bool> {
    require_squarefree(t)?;
    if t <= 3 {
        return Ok(true);
    }
    let c_k = class_number_by_forms(field_discriminant(t)?)?;
    let genus_bound = 1u64 << (omega(t as u64) - 1);
    Ok(c_k == genus_bound && (t % 4 != 3 || t % 8 == 7))
}

pub fn enumerate_admissible(limit: i64) -> Vec<i64> {
    (1..=limit)
        .filter(|&t| is_squarefree(t as u64))
        .filter(|&t| is_admissible_rank1(t).unwrap_or(false))
        .collect()
}

/// One row of the rank-one table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rank1Row {
    pub t: i64,
    #[serde(rename = "cK")]
    pub c_k: u64,
    pub k: u32,
    pub index_num: String,
    pub index_den: String,
    pub admissible: bool,
}

pub fn rank1_row(t: i64) -> Result<Rank1Row> {
    let field = ImagQuadField::new(t)?;
    let index = rank1_index(t)?;
    Ok(Rank1Row {
        t,
        c_k: field.class_number,
        k: field.omega_t,
        index_num: index.numer().to_string(),
        index_den: index.denom().to_string(),
        admissible: is_admissible_rank1(t)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Class numbers of the fields `Q(sqrt(-t))`, from standard tables.
    const TABLE: [(i64, u64); 16] = [
        (1, 1), (2, 1), (3, 1), (5, 2), (6, 2), (7, 1), (10, 2), (11, 1),
        (13, 2), (14, 4), (15, 2), (17, 4), (19, 1), (21, 4), (23, 3), (43, 1),
    ];

    #[test]
    fn class_numbers() {
        assert_eq!(class_number_by_forms(-4), Ok(1));
        assert_eq!(class_number_by_forms(-24), Ok(2));
        assert_eq!(class_number_by_forms(-15), Ok(2));
        assert_eq!(class_number_by_forms(-20), Ok(2));
        for (t, h) in TABLE {
            assert_eq!(class_number_by_forms(field_discriminant(t).unwrap()), Ok(h), "t = {t}");
        }
        for d in [-3, -4, -7, -8, -11, -19, -43, -67, -163] {
            assert_eq!(class_number_by_forms(d), Ok(1));
        }
    }

    #[test]
    fn rejects_non_fundamental() {
        for d in [-12, -16, -2, 5, 0, -27, -36] {
            assert_eq!(class_number_by_forms(d), Err(Error::NotDiscriminant(d)));
        }
        assert_eq!(rank1_index(4), Err(Error::NotSquarefree(4)));
        assert_eq!(is_admissible_rank1(12), Err(Error::NotSquarefree(12)));
    }

    #[test]
    fn field_data() {
        let k = ImagQuadField::new(15).unwrap();
        assert_eq!((k.disc, k.class_number, k.omega_t, k.mu), (-15, 2, 2, 2));
        assert_eq!(k.two_behavior, TwoBehavior::Split);
        assert_eq!(ImagQuadField::new(3).unwrap().two_behavior, TwoBehavior::Inert);
        assert_eq!(ImagQuadField::new(3).unwrap().unit_index, 3);
        assert_eq!(ImagQuadField::new(1).unwrap().unit_index, 2);
        assert_eq!(ImagQuadField::new(1).unwrap().mu, 0);
        assert_eq!(ImagQuadField::new(6).unwrap().two_behavior, TwoBehavior::Ramified);
        assert_eq!(ImagQuadField::new(5).unwrap().ramified_primes, vec![2, 5]);
    }

    #[test]
    fn worked_indices() {
        let one = BigRational::one();
        for t in [1, 2, 3, 6, 10, 15] {
            assert_eq!(rank1_index(t).unwrap(), one, "t = {t}");
        }
        assert_eq!(rank1_index(5).unwrap(), BigRational::from_integer(2.into()));
        assert_eq!(rank1_index(11).unwrap(), BigRational::from_integer(3.into()));
    }

    #[test]
    fn admissibility() {
        assert_eq!(enumerate_admissible(3), vec![1, 2, 3]);
        let up_to_15 = enumerate_admissible(15);
        for t in [1, 2, 3, 6, 10, 15] {
            assert!(up_to_15.contains(&t));
        }
        assert!(!up_to_15.contains(&5));
        assert!(!enumerate_admissible(5).contains(&5));
    }

    #[test]
    fn criterion_matches_index() {
        for t in 1..=200i64 {
            if !is_squarefree(t as u64) {
                continue;
            }
            let by_index = rank1_index(t).unwrap().is_one();
            assert_eq!(is_admissible_rank1(t).unwrap(), by_index, "t = {t}");
        }
    }

    #[test]
    fn two_behavior_is_a_trichotomy() {
        for t in 1..=300i64 {
            if !is_squarefree(t as u64) {
                continue;
            }
            let k = ImagQuadField::new(t).unwrap();
            let ramified = k.disc % 2 == 0;
            let inert = (-t).rem_euclid(8) == 5;
            let split = (-t).rem_euclid(8) == 1;
            assert_eq!([ramified, inert, split].iter().filter(|&&x| x).count(), 1);
        }
    }

    #[test]
    fn inert_branch_index_divisible_by_three() {
        for t in (4..=200i64).filter(|t| t % 8 == 3 && is_squarefree(*t as u64)) {
            let k = ImagQuadField::new(t).unwrap();
            let expect = BigRational::from_integer((3 * k.class_number).into()) * rational_pow(2, 1 - k.omega_t as i64);
            assert_eq!(rank1_index(t).unwrap(), expect);
            assert!(!rank1_index(t).unwrap().is_one());
        }
    }
}
