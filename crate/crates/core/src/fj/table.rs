use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, parse_rational};
use crate::error::{Error, Result};
use crate::lattice::{EvenLattice, LatticeFile};

/// Coefficients `c(D, r)` of an index-`N` Fourier-Jacobi coefficient, keyed
/// by `D < 0` and the canonical residue of `r` modulo `N S Z^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FJCoefficientTable {
    lat: EvenLattice,
    index: u64,
    weight: i64,
    entries: BTreeMap<(i64, Vec<i64>), BigRational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    #[serde(rename = "D")]
    pub d_disc: i64,
    pub r: Vec<i64>,
    pub value: String,
}

/// `{"lattice": {...}, "index": N, "weight": k, "entries": [...]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableFile {
    pub lattice: LatticeFile,
    pub index: u64,
    pub weight: i64,
    pub entries: Vec<TableEntry>,
}

impl FJCoefficientTable {
    pub fn new(lat: &EvenLattice, index: u64, weight: i64) -> Result<Self> {
        if index == 0 {
            return Err(Error::InvalidArgument("table index must be positive".into()));
        }
        Ok(Self { lat: lat.clone(), index, weight, entries: BTreeMap::new() })
    }

    pub fn lattice(&self) -> &EvenLattice {
        &self.lat
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `D < 0` and `D ≡ Q(r) (mod qN)`.
    pub fn in_support(&self, d_disc: i64, r: &[i64]) -> Result<bool> {
        if r.len() != self.lat.rank() {
            return Err(Error::DimensionMismatch { expected: self.lat.rank(), got: r.len() });
        }
        let modulus = self.lat.level() as i128 * self.index as i128;
        Ok(d_disc < 0 && (self.lat.norm(r) - d_disc as i128).rem_euclid(modulus) == 0)
    }

    /// The stored key for `(D, r)`.
    pub fn key(&self, d_disc: i64, r: &[i64]) -> Result<(i64, Vec<i64>)> {
        if !self.in_support(d_disc, r)? {
            return Err(Error::KeyOutsideSupport { d_disc, r: r.to_vec() });
        }
        Ok((d_disc, self.lat.canonical_residue(r, self.index)))
    }

    /// Sets `c(D, r)`, replacing any value stored under the same key.
    pub fn insert(&mut self, d_disc: i64, r: &[i64], value: BigRational) -> Result<()> {
        let key = self.key(d_disc, r)?;
        self.entries.insert(key, value);
        Ok(())
    }

    /// `c(D, r)`, zero off the stored entries.
    pub fn get(&self, d_disc: i64, r: &[i64]) -> Result<BigRational> {
        let key = self.key(d_disc, r)?;
        Ok(self.entries.get(&key).cloned().unwrap_or_else(BigRational::zero))
    }

    /// Entries with canonical keys, ordered by `(D, r)`.
    pub fn entries(&self) -> impl Iterator<Item = (i64, &[i64], &BigRational)> {
        self.entries.iter().map(|((d, r), v)| (*d, r.as_slice(), v))
    }

    /// Distinct `D` values present.
    pub fn discriminants(&self) -> Vec<i64> {
        let mut ds: Vec<i64> = self.entries.keys().map(|(d, _)| *d).collect();
        ds.dedup();
        ds
    }

    pub(crate) fn get_canonical(&self, d_disc: i64, r: Vec<i64>) -> Option<&BigRational> {
        self.entries.get(&(d_disc, r))
    }

    pub(crate) fn insert_canonical(&mut self, d_disc: i64, r: Vec<i64>, value: BigRational) {
        self.entries.insert((d_disc, r), value);
    }

    pub fn to_file(&self) -> TableFile {
        TableFile {
            lattice: self.lat.to_file(),
            index: self.index,
            weight: self.weight,
            entries: self
                .entries()
                .map(|(d_disc, r, v)| TableEntry { d_disc, r: r.to_vec(), value: format_rational(v) })
                .collect(),
        }
    }

    pub fn from_file(file: &TableFile) -> Result<Self> {
        let lat = EvenLattice::from_file(&file.lattice)?;
        let mut table = Self::new(&lat, file.index, file.weight)?;
        for e in &file.entries {
            let value = parse_rational(&e.value)
                .ok_or_else(|| Error::InvalidArgument(format!("not a rational: {:?}", e.value)))?;
            table.insert(e.d_disc, &e.r, value)?;
        }
        Ok(table)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TableFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("table file: {e}")))?;
        Self::from_file(&file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn keys_are_canonical() {
        let hex = families::hexagonal();
        let mut t = FJCoefficientTable::new(&hex, 2, 10).unwrap();
        // Q(r) for r = (1, 0) is 1; D = -5 ≡ 1 (mod 6)
        t.insert(-5, &[1, 0], int(3)).unwrap();
        for v in [[1i64, 0], [0, 1], [-2, 5], [7, -3]] {
            let shift: Vec<i64> = (0..2).map(|i| 2 * (hex.gram()[i][0] * v[0] + hex.gram()[i][1] * v[1])).collect();
            let r = [1 + shift[0], shift[1]];
            assert_eq!(t.get(-5, &r).unwrap(), int(3));
            t.insert(-5, &r, int(3)).unwrap();
            assert_eq!(t.len(), 1);
        }
        t.insert(-5, &[-1, 4], int(4)).unwrap();
        assert_eq!(t.get(-5, &[1, 0]).unwrap(), int(4));
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn support_is_enforced() {
        let s2 = EvenLattice::rank_one(1).unwrap();
        let mut t = FJCoefficientTable::new(&s2, 1, 10).unwrap();
        assert!(t.insert(-4, &[0], int(1)).is_ok());
        assert_eq!(t.insert(-3, &[0], int(1)), Err(Error::KeyOutsideSupport { d_disc: -3, r: vec![0] }));
        assert_eq!(t.insert(0, &[0], int(1)), Err(Error::KeyOutsideSupport { d_disc: 0, r: vec![0] }));
        assert_eq!(t.insert(-3, &[1], int(1)), Ok(()));
        assert_eq!(
            t.insert(-4, &[0, 0], int(1)),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        );
        // index 5: D ≡ Q(r) (mod 20)
        let mut t5 = FJCoefficientTable::new(&s2, 5, 10).unwrap();
        assert!(t5.insert(-100, &[0], int(1)).is_ok());
        assert!(t5.insert(-4, &[4], int(1)).is_ok());
        assert!(t5.insert(-4, &[0], int(1)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s2 = EvenLattice::rank_one(1).unwrap();
        let mut t = FJCoefficientTable::new(&s2, 5, 10).unwrap();
        t.insert(-4, &[4], BigRational::new(3.into(), (-7).into())).unwrap();
        t.insert(-100, &[10], int(2)).unwrap();
        let json = t.to_json();
        assert!(json.contains("\"value\":\"-3/7\""));
        assert!(json.contains("\"D\":-100"));
        assert_eq!(FJCoefficientTable::from_json(&json).unwrap(), t);
        assert!(FJCoefficientTable::from_json("{\"index\": 1}").is_err());
        let bad = json.replace("-3/7", "0.5");
        assert!(matches!(FJCoefficientTable::from_json(&bad), Err(Error::InvalidArgument(_))));
    }
}
