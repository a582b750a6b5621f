use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::EvenLattice;

/// Jacobi symbol `(a/m)` for odd positive `m`.
fn jacobi(a: i64, m: i64) -> i8 {
    debug_assert!(m > 0 && m % 2 == 1);
    let mut a = a.rem_euclid(m);
    let mut m = m;
    let mut sign = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(m % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            sign = -sign;
        }
        a %= m;
    }
    if m == 1 {
        sign
    } else {
        0
    }
}

/// Kronecker symbol `(a/m)`.
pub fn kronecker_symbol(a: i64, m: i64) -> Result<i8> {
    if m == 0 {
        return Err(Error::ZeroModulus);
    }
    let mut out = 1i8;
    let mut m = m;
    if m < 0 {
        m = -m;
        if a < 0 {
            out = -out;
        }
    }
    let twos = m.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return Ok(0);
        }
        // (a/2) = +1 for a ≡ ±1 (mod 8), -1 for a ≡ ±3
        if matches!(a.rem_euclid(8), 3 | 5) && twos % 2 == 1 {
            out = -out;
        }
        m >>= twos;
    }
    Ok(out * jacobi(a, m))
}

fn require_odd_good_prime(lat: &EvenLattice, p: u64) -> Result<()> {
    if p % 2 == 0 {
        return Err(Error::BadPrime { p, reason: "p must be odd" });
    }
    if lat.det() % p as i64 == 0 {
        return Err(Error::BadPrime { p, reason: "p divides det(S)" });
    }
    Ok(())
}

/// `chi_S(p) = ((-1)^{n/2} det S / p)` for even rank.
pub fn chi_s(lat: &EvenLattice, p: u64) -> Result<i8> {
    let n = lat.rank();
    if n % 2 == 1 {
        return Err(Error::OddRank(n));
    }
    require_odd_good_prime(lat, p)?;
    let delta = if (n / 2) % 2 == 0 { lat.det() } else { -lat.det() };
    kronecker_symbol(delta, p as i64)
}

/// `chi_t(p) = (-t/p)`.
pub fn chi_t(t: i64, p: u64) -> i8 {
    kronecker_symbol(-t, p as i64).expect("p is nonzero")
}

/// `psi(p) = (-1/p)`.
pub fn psi(p: u64) -> i8 {
    kronecker_symbol(-1, p as i64).expect("p is nonzero")
}

fn split_valuation(mut x: BigInt, p: &BigInt) -> (u32, BigInt) {
    let mut v = 0;
    while (&x % p).is_zero() {
        x /= p;
        v += 1;
    }
    (v, x)
}

/// Whether the nonzero rational `a` is a square in `Q_p`.
pub fn is_square_in_qp(a: &BigRational, p: u64) -> bool {
    if a.is_zero() {
        return false;
    }
    let pb = BigInt::from(p);
    let (vn, un) = split_valuation(a.numer().clone(), &pb);
    let (vd, ud) = split_valuation(a.denom().clone(), &pb);
    if (vn + vd) % 2 == 1 {
        return false;
    }
    // u_n / u_d has the square class of u_n * u_d
    let unit = un * ud;
    if p == 2 {
        return unit.mod_floor(&BigInt::from(8)) == BigInt::from(1);
    }
    let r = unit.mod_floor(&pb).to_i64().expect("residue fits");
    jacobi(r, p as i64) == 1
}
