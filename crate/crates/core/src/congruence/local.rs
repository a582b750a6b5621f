use crate::congruence::symbols::{chi_s, chi_t};
use crate::error::{Error, Result};
use crate::families::{is_even_rank_family, rank_one_parameter};
use crate::lattice::EvenLattice;

/// Closed form of `n(xi; p^k)` for `D = -q`:
/// `1 + chi_t(p)` in rank one, `p^{k(n-1)} - chi_S(p) p^{k(n-1) - n/2}` for the
/// even-rank family.
pub fn closed_form_count(lat: &EvenLattice, p: u64, k: u32) -> Result<u128> {
    if p % 2 == 0 {
        return Err(Error::BadPrime { p, reason: "p must be odd" });
    }
    if lat.det() as u64 % p == 0 || lat.level() as u64 % p == 0 {
        return Err(Error::BadPrime { p, reason: "p divides det(S) or the level" });
    }
    if k == 0 {
        return Ok(1);
    }
    if let Some(t) = rank_one_parameter(lat) {
        return Ok((1 + chi_t(t, p) as i32) as u128);
    }
    if !is_even_rank_family(lat) {
        return Err(Error::UnsupportedFamily);
    }
    let n = lat.rank() as u32;
    let top = (p as u128)
        .checked_pow(k * (n - 1))
        .ok_or(Error::Overflow("closed form count"))?;
    let low = (p as u128).pow(k * (n - 1) - n / 2);
    Ok(match chi_s(lat, p)? {
        1 => top - low,
        _ => top + low,
    })
}
