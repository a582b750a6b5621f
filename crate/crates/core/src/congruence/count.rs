//! `n(xi; d) = #{ s in Z^n / dS Z^n : Q(s) ≡ D (mod qd) }`.
//!
//! The normative count enumerates `s = P^{-1} t` with `t_i` running over
//! `[0, d a_i)`, where `P S Q = diag(a_1, ..., a_n)`. For `d` prime to `2 det S`
//! an exact local path is also available: `Z^n / dS Z^n` splits as
//! `Z^n / S Z^n` times `Z^n / d Z^n`, and the count modulo each prime power is
//! read off a diagonalization of the norm form.

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::factorize;
use crate::congruence::snf::mat_mul;
use crate::error::{Error, Result};
use crate::lattice::EvenLattice;

/// Residue budget under which [`CountMethod::Auto`] enumerates.
pub const BRUTE_BUDGET: u128 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    #[default]
    Auto,
    Brute,
    Local,
}

impl std::str::FromStr for CountMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "brute" => Ok(Self::Brute),
            "local" => Ok(Self::Local),
            other => Err(Error::InvalidArgument(format!("unknown count method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountResult {
    pub d: u64,
    #[serde(rename = "D")]
    pub d_disc: i64,
    pub count: u64,
    /// Size of `Z^n / dS Z^n`, i.e. `d^n det S`.
    pub enumerated: u128,
    /// The method that produced `count` (never `Auto`).
    pub method: CountMethod,
}

/// `d^n det S`, the number of residues scanned by the enumeration.
pub fn residue_count(lat: &EvenLattice, d: u64) -> Option<u128> {
    let mut acc = lat.det() as u128;
    for _ in 0..lat.rank() {
        acc = acc.checked_mul(d as u128)?;
    }
    Some(acc)
}

/// Counts with the enumeration path.
pub fn count_congruence(lat: &EvenLattice, d_disc: i64, d: u64) -> Result<CountResult> {
    count_congruence_with(lat, d_disc, d, CountMethod::Brute)
}

pub fn count_congruence_with(lat: &EvenLattice, d_disc: i64, d: u64, method: CountMethod) -> Result<CountResult> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be positive".into()));
    }
    let enumerated = residue_count(lat, d).ok_or(Error::Overflow("residue count"))?;
    let method = match method {
        CountMethod::Auto => {
            if enumerated <= BRUTE_BUDGET || !local_applies(lat, d) {
                CountMethod::Brute
            } else {
                CountMethod::Local
            }
        }
        m => m,
    };
    let count = match method {
        CountMethod::Brute => brute_count(lat, d_disc, d)?,
        _ => local_count(lat, d_disc, d)?,
    };
    Ok(CountResult { d, d_disc, count, enumerated, method })
}

fn local_applies(lat: &EvenLattice, d: u64) -> bool {
    d.gcd(&(2 * lat.det() as u64)) == 1
}

/// Quadratic form `t -> Q(P^{-1} t) mod m`, split as half-diagonal and
/// strict upper triangle.
struct ReducedForm {
    half_diag: Vec<u64>,
    upper: Vec<Vec<u64>>,
    modulus: u64,
}

impl ReducedForm {
    fn new(lat: &EvenLattice, p_inv: &[Vec<i64>], modulus: u64) -> Self {
        let n = lat.rank();
        let p_inv_t: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| p_inv[j][i]).collect()).collect();
        let bp = mat_mul(lat.norm_form(), p_inv);
        let bp: Vec<Vec<i64>> = bp.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
        let c = mat_mul(&p_inv_t, &bp);
        let m = modulus as i128;
        let half_diag = (0..n)
            .map(|i| {
                debug_assert_eq!(c[i][i] % 2, 0);
                (c[i][i] / 2).rem_euclid(m) as u64
            })
            .collect();
        let upper = (0..n)
            .map(|i| (0..n).map(|j| if j > i { c[i][j].rem_euclid(m) as u64 } else { 0 }).collect())
            .collect();
        Self { half_diag, upper, modulus }
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn brute_count(lat: &EvenLattice, d_disc: i64, d: u64) -> Result<u64> {
    brute_count_in(lat, &lat.snf().p_inv, &lat.snf().diag, d_disc, d)
}

/// Enumeration in the coordinates `s = p_inv t`, `0 <= t_i < d diag_i`, for
/// any decomposition `P S Q = diag`.
fn brute_count_in(lat: &EvenLattice, p_inv: &[Vec<i64>], diag: &[i64], d_disc: i64, d: u64) -> Result<u64> {
    let q = lat.level() as u64;
    let modulus = q.checked_mul(d).ok_or(Error::Overflow("q d"))?;
    if modulus >= 1 << 62 {
        return Err(Error::Overflow("q d"));
    }
    let form = ReducedForm::new(lat, p_inv, modulus);
    let target = (d_disc as i128).rem_euclid(modulus as i128) as u64;
    let n = lat.rank();
    let ranges: Vec<u64> = diag.iter().map(|&a| a as u64 * d).collect();
    let inner = n - 1;
    let outer_ranges = &ranges[..inner];
    let outer_total: u128 = outer_ranges.iter().map(|&r| r as u128).product();
    let outer_total = u64::try_from(outer_total).map_err(|_| Error::Overflow("outer residue range"))?;

    let count_block = |start: u64, end: u64| -> u64 {
        let mut t = decode(start, outer_ranges);
        let mut found = 0u64;
        for _ in start..end {
            found += scan_inner(&form, &t, ranges[inner], target);
            advance(&mut t, outer_ranges);
        }
        found
    };

    let work = outer_total as u128 * ranges[inner] as u128;
    if work < 1 << 16 || outer_total < 2 {
        return Ok(count_block(0, outer_total));
    }
    let blocks = outer_total.min(256);
    let size = outer_total.div_ceil(blocks);
    Ok((0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * size;
            let end = ((b + 1) * size).min(outer_total);
            if start >= end {
                0
            } else {
                count_block(start, end)
            }
        })
        .sum())
}

/// Mixed-radix digits of `index`, least significant first.
fn decode(mut index: u64, ranges: &[u64]) -> Vec<u64> {
    ranges
        .iter()
        .map(|&r| {
            let digit = index % r;
            index /= r;
            digit
        })
        .collect()
}

fn advance(t: &mut [u64], ranges: &[u64]) {
    for (x, &r) in t.iter_mut().zip(ranges) {
        *x += 1;
        if *x < r {
            return;
        }
        *x = 0;
    }
}

/// Matches along the last coordinate with the outer coordinates fixed to `t`.
fn scan_inner(form: &ReducedForm, t: &[u64], range: u64, target: u64) -> u64 {
    let m = form.modulus;
    let k = t.len();
    let mut base = 0u64;
    let mut lin = 0u64;
    for i in 0..k {
        let ti = t[i] % m;
        if ti == 0 {
            continue;
        }
        base = (base + mulmod(form.half_diag[i], mulmod(ti, ti, m), m)) % m;
        let mut row = 0u64;
        for j in i + 1..k {
            row = (row + mulmod(form.upper[i][j], t[j] % m, m)) % m;
        }
        base = (base + mulmod(row, ti, m)) % m;
        lin = (lin + mulmod(form.upper[i][k], ti, m)) % m;
    }
    // Q(x + 1) - Q(x) = lin + h (2x + 1) along the last coordinate
    let h = form.half_diag[k];
    let mut val = base;
    let mut delta = (lin + h) % m;
    let step = (2 * h) % m;
    let mut found = 0u64;
    for _ in 0..range {
        found += (val == target) as u64;
        val += delta;
        if val >= m {
            val -= m;
        }
        delta += step;
        if delta >= m {
            delta -= m;
        }
    }
    found
}

/// Every class of `Z^n / dS Z^n` solving the congruence, as `s = P^{-1} t`
/// with `0 <= t_i < d a_i`. Intended for small `d`.
pub fn solutions(lat: &EvenLattice, d_disc: i64, d: u64) -> Result<Vec<Vec<i64>>> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be positive".into()));
    }
    let modulus = lat.level() as i128 * d as i128;
    let ranges: Vec<u64> = lat.snf().diag.iter().map(|&a| a as u64 * d).collect();
    let p_inv = &lat.snf().p_inv;
    let n = ranges.len();
    let mut t = vec![0u64; n];
    // s = P^{-1} t, updated column by column as the odometer turns
    let mut s = vec![0i64; n];
    let mut out = Vec::new();
    loop {
        if (lat.norm(&s) - d_disc as i128).rem_euclid(modulus) == 0 {
            out.push(s.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(out);
            }
            t[i] += 1;
            if t[i] < ranges[i] {
                for (x, row) in s.iter_mut().zip(p_inv) {
                    *x += row[i];
                }
                break;
            }
            let back = ranges[i] as i64 - 1;
            for (x, row) in s.iter_mut().zip(p_inv) {
                *x -= back * row[i];
            }
            t[i] = 0;
            i += 1;
        }
    }
}

/// `#{ w in Z^n / S Z^n : Q(w) ≡ c (mod q) }`.
pub fn discriminant_count(lat: &EvenLattice, c: i64) -> u64 {
    let q = lat.level() as i128;
    lat.discriminant_representatives()
        .iter()
        .filter(|w| (lat.norm(w) - c as i128).rem_euclid(q) == 0)
        .count() as u64
}

fn local_count(lat: &EvenLattice, d_disc: i64, d: u64) -> Result<u64> {
    for (p, _) in factorize(d) {
        if p == 2 || (lat.det() as u64) % p == 0 {
            return Err(Error::BadPrime { p, reason: "local count needs p prime to 2 det(S)" });
        }
    }
    let mut total = discriminant_count(lat, d_disc) as u128;
    for (p, e) in factorize(d) {
        let m = p.pow(e);
        total *= prime_power_count(lat.norm_form(), p, m, d_disc)?;
    }
    u64::try_from(total).map_err(|_| Error::Overflow("count"))
}

fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    (e.gcd == 1).then(|| e.x.rem_euclid(m as i128) as u64)
}

/// Diagonal of a form congruent to `b` modulo `m = p^e`, `p` odd, `b`
/// invertible modulo `p`.
fn diagonalize_mod(b: &[Vec<i64>], p: u64, m: u64) -> Result<Vec<u64>> {
    let n = b.len();
    let mut a: Vec<Vec<u64>> =
        b.iter().map(|r| r.iter().map(|&x| (x as i128).rem_euclid(m as i128) as u64).collect()).collect();
    let unit = |x: u64| x % p != 0;
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        let pivot = match (k..n).find(|&i| unit(a[i][i])) {
            Some(i) => i,
            None => {
                let (i, j) = (k..n)
                    .flat_map(|i| (k..n).map(move |j| (i, j)))
                    .find(|&(i, j)| i != j && unit(a[i][j]))
                    .ok_or_else(|| Error::InvalidArgument(format!("norm form is singular modulo {p}")))?;
                // e_i -> e_i + e_j makes the diagonal entry 2 a_ij + (multiples of p)
                for c in 0..n {
                    a[i][c] = (a[i][c] + a[j][c]) % m;
                }
                for r in 0..n {
                    a[r][i] = (a[r][i] + a[r][j]) % m;
                }
                i
            }
        };
        a.swap(k, pivot);
        for row in a.iter_mut() {
            row.swap(k, pivot);
        }
        let inv = inverse_mod(a[k][k], m).expect("pivot is a unit");
        for j in k + 1..n {
            let f = mulmod(a[j][k], inv, m);
            if f == 0 {
                continue;
            }
            for c in 0..n {
                a[j][c] = (a[j][c] + m - mulmod(f, a[k][c], m)) % m;
            }
            for r in 0..n {
                a[r][j] = (a[r][j] + m - mulmod(f, a[r][k], m)) % m;
            }
        }
        diag.push(a[k][k]);
    }
    Ok(diag)
}

/// `#{ u mod m : 1/2 u^t B u ≡ D (mod m) }` for `m = p^e`, `p` odd.
fn prime_power_count(b: &[Vec<i64>], p: u64, m: u64, d_disc: i64) -> Result<u128> {
    let diag = diagonalize_mod(b, p, m)?;
    let half = inverse_mod(2, m).expect("p is odd");
    let mut squares = vec![0u128; m as usize];
    for x in 0..m {
        squares[mulmod(x, x, m) as usize] += 1;
    }
    let histogram = |coef: u64| -> Vec<u128> {
        let c = mulmod(coef, half, m);
        let mut h = vec![0u128; m as usize];
        for (v, &cnt) in squares.iter().enumerate() {
            if cnt > 0 {
                h[mulmod(c, v as u64, m) as usize] += cnt;
            }
        }
        h
    };
    let convolve = |x: &[u128], y: &[u128]| -> Vec<u128> {
        let mut out = vec![0u128; m as usize];
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                if b != 0 {
                    out[(i + j) % m as usize] += a * b;
                }
            }
        }
        out
    };
    let mut delta = vec![0u128; m as usize];
    delta[0] = 1;
    let split = diag.len().div_ceil(2);
    let first = diag[..split].iter().fold(delta.clone(), |acc, &c| convolve(&acc, &histogram(c)));
    let second = diag[split..].iter().fold(delta, |acc, &c| convolve(&acc, &histogram(c)));
    let target = (d_disc as i128).rem_euclid(m as i128) as usize;
    let mu = m as usize;
    Ok((0..mu).map(|v| first[v] * second[(target + mu - v) % mu]).sum())
}
