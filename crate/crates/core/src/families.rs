//! The even-rank lattices with a proven closed form for `n(xi; p^k)`, and the
//! rank-one lattices `[[2t]]`.
//!
//! The genus of each listed even-rank lattice has class number one; that is an
//! input fact taken from lattice tables and is not recomputed here.

use crate::arith::is_squarefree;
use crate::lattice::EvenLattice;

fn build(gram: Vec<Vec<i64>>) -> EvenLattice {
    EvenLattice::new(gram).expect("family matrix is a valid even lattice")
}

/// `A2`, determinant 3.
pub fn hexagonal() -> EvenLattice {
    build(vec![vec![2, -1], vec![-1, 2]])
}

/// Binary form of determinant 15.
pub fn binary_det15() -> EvenLattice {
    build(vec![vec![2, -1], vec![-1, 8]])
}

/// Rank 4, determinant 5.
pub fn quaternary_det5() -> EvenLattice {
    build(vec![
        vec![2, -1, -1, -1],
        vec![-1, 2, 1, 0],
        vec![-1, 1, 2, 0],
        vec![-1, 0, 0, 2],
    ])
}

/// `A2 + A2`, determinant 9.
pub fn quaternary_det9() -> EvenLattice {
    build(vec![
        vec![2, -1, 0, 0],
        vec![-1, 2, 0, 0],
        vec![0, 0, 2, -1],
        vec![0, 0, -1, 2],
    ])
}

/// Rank 6, determinant 3.
pub fn senary_det3() -> EvenLattice {
    build(vec![
        vec![2, 1, -1, 1, -1, 1],
        vec![1, 2, 0, 1, -1, 1],
        vec![-1, 0, 2, -1, 1, 0],
        vec![1, 1, -1, 2, -1, 0],
        vec![-1, -1, 1, -1, 2, 0],
        vec![1, 1, 0, 0, 0, 2],
    ])
}

/// Cartan matrix of `E8`, the even unimodular lattice of rank 8.
pub fn e8() -> EvenLattice {
    build(vec![
        vec![2, -1, 0, 0, 0, 0, 0, 0],
        vec![-1, 2, -1, 0, 0, 0, 0, 0],
        vec![0, -1, 2, -1, 0, 0, 0, -1],
        vec![0, 0, -1, 2, -1, 0, 0, 0],
        vec![0, 0, 0, -1, 2, -1, 0, 0],
        vec![0, 0, 0, 0, -1, 2, -1, 0],
        vec![0, 0, 0, 0, 0, -1, 2, 0],
        vec![0, 0, -1, 0, 0, 0, 0, 2],
    ])
}

/// The six even-rank family members, with short names.
pub fn even_rank_family() -> Vec<(&'static str, EvenLattice)> {
    vec![
        ("hexagonal", hexagonal()),
        ("binary-det15", binary_det15()),
        ("quaternary-det5", quaternary_det5()),
        ("quaternary-det9", quaternary_det9()),
        ("senary-det3", senary_det3()),
        ("e8", e8()),
    ]
}

pub fn is_even_rank_family(lat: &EvenLattice) -> bool {
    even_rank_family().iter().any(|(_, l)| l.gram() == lat.gram())
}

/// `Some(t)` when the lattice is `[[2t]]` with `t` squarefree.
pub fn rank_one_parameter(lat: &EvenLattice) -> Option<i64> {
    if lat.rank() != 1 {
        return None;
    }
    let t = lat.gram()[0][0] / 2;
    is_squarefree(t as u64).then_some(t)
}
