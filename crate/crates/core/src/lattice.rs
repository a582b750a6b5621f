//! Even positive-definite lattices `L = Z^n` with Gram matrix `S`, their dual,
//! level and maximality, the ambient forms `S0`/`S1`, and the vectors
//! `xi' = ((Q(s) - D)/(qd), S^{-1}s, d)` used to index Fourier coefficients.
//!
//! Sign convention: the restriction of `phi0` to `V` is `-1/2 x^t S y`; every
//! integrality check here is sign-agnostic, so the code works with `+1/2 S`.
//!
//! Throughout, `Q(s) = 1/2 q S^{-1}[s]` denotes the integral "norm" of an
//! integer vector `s`; it is exact integer arithmetic on `q S^{-1}`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::prime_divisors;
use crate::congruence::snf::{determinant, smith_normal_form, SnfDecomposition};
use crate::error::{Error, Result};

/// Serialized form: `{"n": 2, "gram": [[2,-1],[-1,2]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeFile {
    pub n: usize,
    pub gram: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenLattice {
    gram: Vec<Vec<i64>>,
    det: i64,
    /// `det * S^{-1}`
    adj: Vec<Vec<i64>>,
    level: i64,
    /// `q * S^{-1}`: integral with even diagonal.
    norm_form: Vec<Vec<i64>>,
    snf: SnfDecomposition,
}

fn minor(m: &[Vec<i64>], skip_row: usize, skip_col: usize) -> Vec<Vec<i64>> {
    m.iter()
        .enumerate()
        .filter(|&(i, _)| i != skip_row)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|&(j, _)| j != skip_col)
                .map(|(_, &x)| x)
                .collect()
        })
        .collect()
}

fn adjugate(m: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = m.len();
    if n == 1 {
        return Ok(vec![vec![1]]);
    }
    let mut adj = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let c = determinant(&minor(m, j, i));
            let c = if (i + j) % 2 == 0 { c } else { -c };
            adj[i][j] = c.to_i64().ok_or(Error::Overflow("adjugate"))?;
        }
    }
    Ok(adj)
}

impl EvenLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        let n = gram.len();
        if n == 0 || gram.iter().any(|row| row.len() != n) {
            return Err(Error::NotSquare);
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        for (i, row) in gram.iter().enumerate() {
            if row[i] % 2 != 0 {
                return Err(Error::NotEven { index: i, value: row[i] });
            }
        }
        for order in 1..=n {
            let lead: Vec<Vec<i64>> = gram[..order].iter().map(|r| r[..order].to_vec()).collect();
            let m = determinant(&lead);
            if !m.is_positive() {
                return Err(Error::NotPositiveDefinite { order, minor: m.to_string() });
            }
        }
        let det = determinant(&gram).to_i64().ok_or(Error::Overflow("determinant"))?;
        let adj = adjugate(&gram)?;
        let level = compute_level(&adj, det);
        let norm_form = adj
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&a| {
                        let v = level as i128 * a as i128;
                        debug_assert_eq!(v % det as i128, 0);
                        i64::try_from(v / det as i128).map_err(|_| Error::Overflow("norm form"))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let snf = smith_normal_form(&gram)?;
        Ok(Self { gram, det, adj, level, norm_form, snf })
    }

    /// Even lattice `[[2t]]`.
    pub fn rank_one(t: i64) -> Result<Self> {
        Self::new(vec![vec![2 * t]])
    }

    pub fn from_file(file: &LatticeFile) -> Result<Self> {
        if file.gram.len() != file.n {
            return Err(Error::DimensionMismatch { expected: file.n, got: file.gram.len() });
        }
        Self::new(file.gram.clone())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: LatticeFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("lattice file: {e}")))?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> LatticeFile {
        LatticeFile { n: self.rank(), gram: self.gram.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("lattice serializes")
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn det(&self) -> i64 {
        self.det
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    /// `q S^{-1}`, integral with even diagonal.
    pub fn norm_form(&self) -> &[Vec<i64>] {
        &self.norm_form
    }

    /// `det(S) S^{-1}`.
    pub fn adjugate(&self) -> &[Vec<i64>] {
        &self.adj
    }

    pub fn snf(&self) -> &SnfDecomposition {
        &self.snf
    }

    /// Elementary divisors of `Z^n / S Z^n`.
    pub fn discriminant_group(&self) -> Vec<i64> {
        self.snf.diag.clone()
    }

    /// `S^{-1}` entry as an exact rational.
    pub fn inverse_entry(&self, i: usize, j: usize) -> BigRational {
        BigRational::new(self.adj[i][j].into(), self.det.into())
    }

    /// `Q(s) = 1/2 q S^{-1}[s]`, always an integer.
    pub fn norm(&self, s: &[i64]) -> i128 {
        let b = &self.norm_form;
        let n = self.rank();
        let mut acc = 0i128;
        for i in 0..n {
            let si = s[i] as i128;
            acc += (b[i][i] / 2) as i128 * si * si;
            for j in i + 1..n {
                acc += b[i][j] as i128 * si * s[j] as i128;
            }
        }
        acc
    }

    /// `1/2 S^{-1}[s]` exactly.
    pub fn dual_half_norm(&self, s: &[i64]) -> BigRational {
        let n = self.rank();
        let mut acc = BigInt::zero();
        for i in 0..n {
            for j in 0..n {
                acc += BigInt::from(self.adj[i][j]) * s[i] * s[j];
            }
        }
        BigRational::new(acc, BigInt::from(2 * self.det))
    }

    /// `S^{-1} s` exactly.
    pub fn dual_vector(&self, s: &[i64]) -> Vec<BigRational> {
        self.adj
            .iter()
            .map(|row| {
                let num: i128 = row.iter().zip(s).map(|(&a, &x)| a as i128 * x as i128).sum();
                BigRational::new(BigInt::from(num), BigInt::from(self.det))
            })
            .collect()
    }

    /// Representatives `s` of `Z^n / S Z^n`, one per class, via the SNF
    /// coordinates `t = P s`, `0 <= t_i < a_i`.
    pub fn discriminant_representatives(&self) -> Vec<Vec<i64>> {
        self.residue_representatives(1)
    }

    /// Canonical representatives of `Z^n / scale S Z^n`, as returned by
    /// [`Self::canonical_residue`].
    pub fn residue_representatives(&self, scale: u64) -> Vec<Vec<i64>> {
        let ranges: Vec<i64> = self.snf.diag.iter().map(|&a| a * scale as i64).collect();
        let mut out = Vec::new();
        let mut t = vec![0i64; ranges.len()];
        loop {
            out.push(apply(&self.snf.p_inv, &t));
            let mut i = 0;
            loop {
                if i == t.len() {
                    return out;
                }
                t[i] += 1;
                if t[i] < ranges[i] {
                    break;
                }
                t[i] = 0;
                i += 1;
            }
        }
    }

    /// A dual vector `x = S^{-1} s` outside `Z^n` with `1/2 S[x]` integral, if any.
    pub fn maximality_witness(&self) -> Option<Vec<BigRational>> {
        self.discriminant_representatives()
            .into_iter()
            .filter(|s| s.iter().any(|&x| x != 0))
            .find(|s| self.dual_half_norm(s).is_integer())
            .map(|s| self.dual_vector(&s))
    }

    /// No integral-valued proper overlattice exists: any such overlattice sits
    /// inside the dual, and one glue vector already witnesses it.
    pub fn is_maximal(&self) -> bool {
        self.maximality_witness().is_none()
    }

    /// Canonical representative of `r` modulo `scale * S Z^n`: the vector
    /// `P^{-1} t` with `t = P r` reduced into `[0, scale a_i)`.
    pub fn canonical_residue(&self, r: &[i64], scale: u64) -> Vec<i64> {
        let t = apply(&self.snf.p_mat, r);
        let t: Vec<i64> = t
            .iter()
            .zip(&self.snf.diag)
            .map(|(&x, &a)| x.rem_euclid(a * scale as i64))
            .collect();
        apply(&self.snf.p_inv, &t)
    }

    /// `(D, r)` lies in the support: `D <= 0` and `D ≡ Q(r) (mod q)`.
    pub fn support_contains(&self, d_disc: i64, r: &[i64]) -> Result<bool> {
        if r.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: r.len() });
        }
        let q = self.level as i128;
        Ok(d_disc <= 0 && (self.norm(r) - d_disc as i128).rem_euclid(q) == 0)
    }

    /// Primes dividing `2 q det(S) |D|`.
    pub fn default_bad_primes(&self, d_disc: i64) -> std::collections::BTreeSet<u64> {
        let m = 2u64 * self.level as u64 * self.det as u64;
        let mut set: std::collections::BTreeSet<u64> = prime_divisors(m).into_iter().collect();
        set.extend(prime_divisors(d_disc.unsigned_abs()));
        set
    }

    /// Coordinates of `xi' = ((Q(s) - D)/(qd), S^{-1}s, d)`, with the
    /// integer first coordinate returned separately.
    pub fn xi_coords(&self, d_disc: i64, d: u64, s: &[i64]) -> Result<(i128, Vec<BigRational>)> {
        if s.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: s.len() });
        }
        if d == 0 || d_disc >= 0 {
            return Err(Error::InvalidArgument("xi_vector needs D < 0 and d >= 1".into()));
        }
        let qd = self.level as i128 * d as i128;
        let top = self.norm(s) - d_disc as i128;
        if top.rem_euclid(qd) != 0 {
            return Err(Error::CongruenceViolated { d_disc, modulus: qd as i64 });
        }
        let first = top / qd;
        let mut coords = Vec::with_capacity(self.rank() + 2);
        coords.push(BigRational::from_integer(BigInt::from(first)));
        coords.extend(self.dual_vector(s));
        coords.push(BigRational::from_integer(BigInt::from(d)));
        Ok((first, coords))
    }

    /// The vector `xi' = ((Q(s) - D)/(qd), S^{-1}s, d)` of length `n + 2`.
    pub fn xi_vector(&self, d_disc: i64, d: u64, s: &[i64]) -> Result<XiVector> {
        let (first, coords) = self.xi_coords(d_disc, d, s)?;
        // pairings xi'^t S0 e_i = (d, -s, first)
        let mut pairings = Vec::with_capacity(self.rank() + 2);
        pairings.push(d as i128);
        pairings.extend(s.iter().map(|&x| -(x as i128)));
        pairings.push(first);
        let content = pairings.iter().fold(0i128, |g, &x| g.gcd(&x));

        let ambient = AmbientForms::new(self);
        let norm = ambient.phi0_norm(&coords);
        let expected = BigRational::new(BigInt::from(-d_disc), BigInt::from(self.level));
        let coprime = (d as i64).gcd(&d_disc) == 1;
        Ok(XiVector {
            primitive: coprime && content == 1 && norm == expected,
            coords,
            pairings,
            content,
            norm,
        })
    }
}

fn compute_level(adj: &[Vec<i64>], det: i64) -> i64 {
    let n = adj.len();
    let admissible = |q: i64| {
        (0..n).all(|i| {
            (0..n).all(|j| {
                let v = q as i128 * adj[i][j] as i128;
                let m = if i == j { 2 * det as i128 } else { det as i128 };
                v % m == 0
            })
        })
    };
    // admissible levels form the multiples of the least one
    let mut q = 2 * det;
    debug_assert!(admissible(q));
    for p in prime_divisors(q as u64) {
        let p = p as i64;
        while q % p == 0 && admissible(q / p) {
            q /= p;
        }
    }
    q
}

pub(crate) fn apply(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(&a, &x)| a * x).sum())
        .collect()
}

/// Output of [`EvenLattice::xi_vector`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XiVector {
    pub coords: Vec<BigRational>,
    /// `xi'^t S0 e_i`.
    pub pairings: Vec<i128>,
    /// gcd of the pairings.
    pub content: i128,
    /// `phi0[xi']`.
    pub norm: BigRational,
    /// `gcd(d, D) = 1`, `phi0[xi'] = -D/q` and `content = 1`.
    pub primitive: bool,
}

/// `S0 = [[0,0,1],[0,-S,0],[1,0,0]]` on `Z^{n+2}`, `S1` on `Z^{n+4}` and the
/// distinguished `xi = (1, 0, ..., 0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbientForms {
    pub s0: Vec<Vec<i64>>,
    pub s1: Vec<Vec<i64>>,
    pub xi: Vec<i64>,
}

impl AmbientForms {
    pub fn new(lat: &EvenLattice) -> Self {
        let n = lat.rank();
        let mut s0 = vec![vec![0i64; n + 2]; n + 2];
        s0[0][n + 1] = 1;
        s0[n + 1][0] = 1;
        for i in 0..n {
            for j in 0..n {
                s0[i + 1][j + 1] = -lat.gram()[i][j];
            }
        }
        let mut s1 = vec![vec![0i64; n + 4]; n + 4];
        s1[0][n + 3] = 1;
        s1[n + 3][0] = 1;
        for i in 0..n + 2 {
            for j in 0..n + 2 {
                s1[i + 1][j + 1] = s0[i][j];
            }
        }
        let mut xi = vec![0i64; n + 2];
        xi[0] = 1;
        xi[n + 1] = 1;
        Self { s0, s1, xi }
    }

    /// `phi0(x, y) = 1/2 x^t S0 y`.
    pub fn phi0(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, row) in self.s0.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c != 0 {
                    acc += &x[i] * &y[j] * BigRational::from_integer(c.into());
                }
            }
        }
        acc / BigRational::from_integer(2.into())
    }

    pub fn phi0_norm(&self, x: &[BigRational]) -> BigRational {
        self.phi0(x, x)
    }

    pub fn xi_rational(&self) -> Vec<BigRational> {
        self.xi.iter().map(|&x| BigRational::from_integer(x.into())).collect()
    }
}

/// A validated pair `(D, r)` in the support of the lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SupportPair {
    pub d_disc: i64,
    pub r: Vec<i64>,
}

impl SupportPair {
    pub fn new(lat: &EvenLattice, d_disc: i64, r: Vec<i64>) -> Result<Self> {
        if lat.support_contains(d_disc, &r)? {
            Ok(Self { d_disc, r })
        } else {
            Err(Error::KeyOutsideSupport { d_disc, r })
        }
    }
}

/// `m * xi` for the distinguished `xi = (1, 0, ..., 0, 1)`.
pub fn multiple_of_xi(rank: usize, m: u64) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); rank + 2];
    v[0] = BigRational::from_integer(m.into());
    v[rank + 1] = BigRational::from_integer(m.into());
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(g: Vec<Vec<i64>>) -> EvenLattice {
        EvenLattice::new(g).unwrap()
    }

    /// Least q with Q integral on every class of the dual quotient, found by
    /// scanning q = 1, 2, ... against the definition.
    fn level_by_definition(l: &EvenLattice) -> i64 {
        let reps = l.discriminant_representatives();
        (1..).find(|&q| {
            reps.iter().all(|s| (l.dual_half_norm(s) * BigRational::from_integer(q.into())).is_integer())
        })
        .unwrap()
    }

    #[test]
    fn construction_and_errors() {
        let hex = lat(vec![vec![2, -1], vec![-1, 2]]);
        assert_eq!(hex.det(), 3);
        let s2 = lat(vec![vec![2]]);
        assert_eq!((s2.det(), s2.rank()), (2, 1));
        assert!(EvenLattice::new(vec![vec![2, 1], vec![1, 2]]).is_ok());
        assert_eq!(
            EvenLattice::new(vec![vec![1, 0], vec![0, 2]]),
            Err(Error::NotEven { index: 0, value: 1 })
        );
        assert_eq!(
            EvenLattice::new(vec![vec![2, 1], vec![0, 2]]),
            Err(Error::NotSymmetric { row: 1, col: 0 })
        );
        assert!(matches!(
            EvenLattice::new(vec![vec![2, 3], vec![3, 2]]),
            Err(Error::NotPositiveDefinite { order: 2, .. })
        ));
        assert_eq!(EvenLattice::new(vec![vec![2, 0]]), Err(Error::NotSquare));
    }

    #[test]
    fn levels() {
        assert_eq!(lat(vec![vec![2, -1], vec![-1, 2]]).level(), 3);
        assert_eq!(lat(vec![vec![2]]).level(), 4);
        assert_eq!(lat(vec![vec![2, 0], vec![0, 2]]).level(), 4);
        assert_eq!(lat(vec![vec![2, -1], vec![-1, 8]]).level(), 15);
        for t in [1, 2, 3, 5, 6, 7, 10, 15, 30] {
            let l = EvenLattice::rank_one(t).unwrap();
            assert_eq!(l.level(), 4 * t);
            assert_eq!(level_by_definition(&l), 4 * t);
        }
    }

    #[test]
    fn level_matches_definition_on_small_binary_forms() {
        for a in 1..=6i64 {
            for c in a..=6 {
                for b in -(2 * a)..=(2 * a) {
                    if let Ok(l) = EvenLattice::new(vec![vec![2 * a, b], vec![b, 2 * c]]) {
                        assert_eq!(l.level(), level_by_definition(&l), "{:?}", l.gram());
                        // every proper divisor fails the definition
                        for q in 1..l.level() {
                            if l.level() % q == 0 {
                                assert!(l.discriminant_representatives().iter().any(|s| {
                                    !(l.dual_half_norm(s) * BigRational::from_integer(q.into())).is_integer()
                                }));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn discriminant_groups() {
        assert_eq!(lat(vec![vec![2, -1], vec![-1, 2]]).discriminant_group(), vec![1, 3]);
        assert_eq!(lat(vec![vec![2]]).discriminant_group(), vec![2]);
    }

    #[test]
    fn maximality() {
        for t in [1, 2, 3, 5, 6, 7, 10, 15] {
            assert!(EvenLattice::rank_one(t).unwrap().is_maximal(), "t = {t}");
        }
        let eight = lat(vec![vec![8]]);
        assert!(!eight.is_maximal());
        assert_eq!(eight.maximality_witness().unwrap(), vec![BigRational::new(1.into(), 2.into())]);
        let diag26 = lat(vec![vec![2, 0], vec![0, 6]]);
        assert!(!diag26.is_maximal());
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(diag26.maximality_witness().unwrap(), vec![half.clone(), half]);
    }

    #[test]
    fn support_membership() {
        let s2 = lat(vec![vec![2]]);
        let hex = lat(vec![vec![2, -1], vec![-1, 2]]);
        assert!(s2.support_contains(-4, &[0]).unwrap());
        assert!(hex.support_contains(-3, &[0, 0]).unwrap());
        assert!(!s2.support_contains(-1, &[1]).unwrap());
        assert!(s2.support_contains(-3, &[1]).unwrap());
        assert!(!s2.support_contains(1, &[0]).unwrap());
        assert_eq!(
            s2.support_contains(-4, &[0, 0]),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        );
        assert!(SupportPair::new(&s2, -1, vec![1]).is_err());
    }

    #[test]
    fn xi_vectors() {
        let s2 = lat(vec![vec![2]]);
        let one = |n: i64| BigRational::from_integer(n.into());
        let x = s2.xi_vector(-4, 1, &[0]).unwrap();
        assert_eq!(x.coords, vec![one(1), one(0), one(1)]);
        assert!(x.primitive);

        let hex = lat(vec![vec![2, -1], vec![-1, 2]]);
        let x = hex.xi_vector(-3, 1, &[0, 0]).unwrap();
        assert_eq!(x.coords, vec![one(1), one(0), one(0), one(1)]);

        assert_eq!(
            s2.xi_vector(-4, 5, &[2]),
            Err(Error::CongruenceViolated { d_disc: -4, modulus: 20 })
        );
        let x = s2.xi_vector(-4, 5, &[4]).unwrap();
        assert_eq!(x.coords, vec![one(1), one(2), one(5)]);
        assert_eq!(x.norm, one(1));
        assert!(x.primitive);
    }

    #[test]
    fn ambient_forms() {
        for g in [vec![vec![2]], vec![vec![2, -1], vec![-1, 2]]] {
            let l = lat(g);
            let a = AmbientForms::new(&l);
            assert_eq!(a.phi0_norm(&a.xi_rational()), BigRational::from_integer(1.into()));
            let n = l.rank();
            assert_eq!(a.s1[0][n + 3], 1);
            assert_eq!(a.s1[1][n + 2], 1);
            assert_eq!(a.s0[1][1], -l.gram()[0][0]);
        }
    }

    #[test]
    fn canonical_residues() {
        let l = lat(vec![vec![2, -1], vec![-1, 8]]);
        for scale in [1u64, 2, 5] {
            for x in -6i64..6 {
                for y in -6i64..6 {
                    let r = vec![x, y];
                    let c = l.canonical_residue(&r, scale);
                    // same class: r - c lies in scale * S Z^n
                    let diff: Vec<i64> = r.iter().zip(&c).map(|(a, b)| a - b).collect();
                    let v = l.dual_vector(&diff);
                    assert!(v.iter().all(|z| (z / BigRational::from_integer((scale as i64).into())).is_integer()));
                    // translating by scale * S v does not change the representative
                    let moved: Vec<i64> = (0..2)
                        .map(|i| r[i] + scale as i64 * (l.gram()[i][0] * 3 - l.gram()[i][1] * 2))
                        .collect();
                    assert_eq!(l.canonical_residue(&moved, scale), c);
                }
            }
        }
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let l = lat(vec![vec![2, -1], vec![-1, 2]]);
        assert_eq!(l.to_json(), r#"{"n":2,"gram":[[2,-1],[-1,2]]}"#);
        assert_eq!(EvenLattice::from_json(&l.to_json()).unwrap(), l);
        assert!(EvenLattice::from_json(r#"{"n":2,"gram":[[2,-1],[-1]]}"#).is_err());
        assert!(EvenLattice::from_json(r#"{"n":1,"gram":[[2.5]]}"#).is_err());
        assert!(EvenLattice::from_json(r#"{"n":3,"gram":[[2]]}"#).is_err());
    }
}
