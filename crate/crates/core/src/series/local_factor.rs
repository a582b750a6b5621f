use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, parse_rational, rational_pow};
use crate::error::{Error, Result};

/// Polynomial in `X`, lowest degree first, no trailing zeros.
pub type Poly = Vec<BigRational>;

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Poly {
    let mut r = trim(a.to_vec());
    let lead = b.last().expect("nonzero divisor");
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / lead;
        for (i, y) in b.iter().enumerate() {
            r[shift + i] -= &c * y;
        }
        r = trim(r);
    }
    r
}

fn poly_div_exact(a: &[BigRational], b: &[BigRational]) -> Poly {
    let mut r = trim(a.to_vec());
    let lead = b.last().expect("nonzero divisor");
    let mut q = vec![BigRational::zero(); r.len().saturating_sub(b.len()) + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / lead;
        for (i, y) in b.iter().enumerate() {
            r[shift + i] -= &c * y;
        }
        q[shift] = c;
        r = trim(r);
    }
    debug_assert!(r.is_empty());
    trim(q)
}

/// Monic gcd over `Q`.
fn poly_gcd(a: &[BigRational], b: &[BigRational]) -> Poly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        for c in x.iter_mut() {
            *c /= &lead;
        }
    }
    x
}

fn ints(c: &[i64]) -> Poly {
    trim(c.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
}

/// Rational function `num / den` in `X = p^{-s}`, kept in lowest terms with
/// `den(0) = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalFactor {
    p: u64,
    num: Poly,
    den: Poly,
}

impl LocalFactor {
    pub fn new(p: u64, num: Poly, den: Poly) -> Result<Self> {
        let mut num = trim(num);
        let mut den = trim(den);
        if den.is_empty() {
            return Err(Error::DenominatorVanishesAtZero);
        }
        if num.is_empty() {
            return Ok(Self { p, num, den: vec![BigRational::one()] });
        }
        let g = poly_gcd(&num, &den);
        if g.len() > 1 {
            num = poly_div_exact(&num, &g);
            den = poly_div_exact(&den, &g);
        }
        let c0 = den[0].clone();
        if c0.is_zero() {
            return Err(Error::DenominatorVanishesAtZero);
        }
        for c in num.iter_mut().chain(den.iter_mut()) {
            *c /= &c0;
        }
        Ok(Self { p, num, den })
    }

    pub fn from_ints(p: u64, num: &[i64], den: &[i64]) -> Result<Self> {
        Self::new(p, ints(num), ints(den))
    }

    pub fn one(p: u64) -> Self {
        Self { p, num: vec![BigRational::one()], den: vec![BigRational::one()] }
    }

    /// `1 - c X`.
    pub fn linear(p: u64, c: BigRational) -> Self {
        Self::new(p, vec![BigRational::one(), -c], vec![BigRational::one()]).expect("denominator is 1")
    }

    /// `1 / (1 - c X)`.
    pub fn geometric(p: u64, c: BigRational) -> Self {
        Self::new(p, vec![BigRational::one()], vec![BigRational::one(), -c]).expect("den(0) = 1")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn num(&self) -> &[BigRational] {
        &self.num
    }

    pub fn den(&self) -> &[BigRational] {
        &self.den
    }

    pub fn is_one(&self) -> bool {
        self.num.len() == 1 && self.den.len() == 1 && self.num[0].is_one()
    }

    /// Value at `X = 0`.
    pub fn constant_term(&self) -> BigRational {
        self.num.first().cloned().unwrap_or_else(BigRational::zero)
    }

    /// Taylor coefficients `c_0 .. c_{k_max}`.
    pub fn expand(&self, k_max: usize) -> Vec<BigRational> {
        let mut c: Vec<BigRational> = Vec::with_capacity(k_max + 1);
        for j in 0..=k_max {
            let mut v = self.num.get(j).cloned().unwrap_or_else(BigRational::zero);
            for i in 1..self.den.len().min(j + 1) {
                v -= &self.den[i] * &c[j - i];
            }
            c.push(v);
        }
        c
    }

    /// The factor of `L(s - a)` given that of `L(s)`: `X -> p^a X`.
    pub fn shift(&self, a: i64) -> Self {
        let scale = |poly: &Poly| -> Poly {
            poly.iter()
                .enumerate()
                .map(|(i, c)| c * rational_pow(self.p, a * i as i64))
                .collect()
        };
        Self { p: self.p, num: scale(&self.num), den: scale(&self.den) }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::InvalidArgument(format!(
                "local factors at different primes {} and {}",
                self.p, other.p
            )));
        }
        Self::new(self.p, poly_mul(&self.num, &other.num), poly_mul(&self.den, &other.den))
    }

    pub fn inverse(&self) -> Result<Self> {
        Self::new(self.p, self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Self::one(self.p);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    pub fn to_view(&self) -> LocalFactorView {
        LocalFactorView {
            p: self.p,
            num: self.num.iter().map(format_rational).collect(),
            den: self.den.iter().map(format_rational).collect(),
        }
    }

    pub fn from_view(view: &LocalFactorView) -> Result<Self> {
        let parse = |v: &[String]| -> Result<Poly> {
            v.iter()
                .map(|s| parse_rational(s).ok_or_else(|| Error::InvalidArgument(format!("bad rational {s:?}"))))
                .collect()
        };
        Self::new(view.p, parse(&view.num)?, parse(&view.den)?)
    }
}

/// Serialized local factor, coefficients as `"p/q"` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalFactorView {
    pub p: u64,
    pub num: Vec<String>,
    pub den: Vec<String>,
}

/// Taylor coefficients of `factor` up to `X^{k_max}`.
pub fn expand_local(factor: &LocalFactor, k_max: usize) -> Vec<BigRational> {
    factor.expand(k_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn expansions() {
        let f = LocalFactor::from_ints(5, &[1, 1], &[1, -1]).unwrap();
        assert_eq!(f.expand(3), vec![r(1), r(2), r(2), r(2)]);
        let g = LocalFactor::from_ints(5, &[1, 1], &[1, 1]).unwrap();
        assert!(g.is_one());
        assert_eq!(g.expand(3), vec![r(1), r(0), r(0), r(0)]);
        let h = LocalFactor::geometric(7, r(7));
        assert_eq!(h.expand(3), vec![r(1), r(7), r(49), r(343)]);
    }

    #[test]
    fn lowest_terms_and_errors() {
        // (1 - X^2) / ((1 - X)(1 + 3X)) = (1 + X) / (1 + 3X)
        let f = LocalFactor::from_ints(11, &[1, 0, -1], &[1, 2, -3]).unwrap();
        assert_eq!(f, LocalFactor::from_ints(11, &[1, 1], &[1, 3]).unwrap());
        assert_eq!(LocalFactor::from_ints(3, &[1], &[0, 1]), Err(Error::DenominatorVanishesAtZero));
        assert_eq!(LocalFactor::from_ints(3, &[1], &[]), Err(Error::DenominatorVanishesAtZero));
        // X / X cancels before the check
        assert!(LocalFactor::from_ints(3, &[0, 1], &[0, 1]).unwrap().is_one());
        // denominator normalized to den(0) = 1
        let g = LocalFactor::from_ints(3, &[2], &[2, -6]).unwrap();
        assert_eq!(g, LocalFactor::geometric(3, r(3)));
    }

    #[test]
    fn shift_multiplies_kth_coefficient_by_p_to_ak() {
        for p in [3u64, 5, 7] {
            let f = LocalFactor::from_ints(p, &[1, 1], &[1, -1]).unwrap();
            let base = f.expand(5);
            for a in -3i64..=3 {
                let shifted = f.shift(a).expand(5);
                for k in 0..=5 {
                    assert_eq!(shifted[k], &base[k] * rational_pow(p, a * k as i64));
                }
            }
        }
    }

    #[test]
    fn products_and_inverses() {
        let f = LocalFactor::from_ints(7, &[1, -2], &[1, 3, 1]).unwrap();
        let id = f.mul(&f.inverse().unwrap()).unwrap();
        assert!(id.is_one());
        assert_eq!(f.pow(-2).unwrap(), f.inverse().unwrap().pow(2).unwrap());
        assert!(f.mul(&LocalFactor::one(5)).is_err());
        let view = f.to_view();
        assert_eq!(LocalFactor::from_view(&view).unwrap(), f);
    }
}
