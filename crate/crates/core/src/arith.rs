//! Exact integers and rationals, binomials and residue-ring helpers.
//!
//! Rationals are [`RBig`] values, which dashu keeps in lowest terms with a
//! positive denominator after every operation.

use dashu_base::{ExtendedGcd, Gcd, UnsignedAbs};
pub use dashu_int::{IBig, UBig};
pub use dashu_ratio::RBig;

use crate::error::{Error, Result};

pub type BigRational = RBig;

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
///
/// Multiplicative formula; every intermediate `C(n, i)` is exact so the
/// division never leaves a remainder.
pub fn binom(n: u64, k: u64) -> UBig {
    if k > n {
        return UBig::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = UBig::ONE;
    for i in 0..k {
        acc *= UBig::from(n - i);
        acc /= UBig::from(i + 1);
    }
    acc
}

/// Row `n` of Pascal's triangle.
pub fn binomial_row(n: u64) -> Vec<UBig> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = UBig::ONE;
    row.push(c.clone());
    for k in 0..n {
        c = c * UBig::from(n - k) / UBig::from(k + 1);
        row.push(c.clone());
    }
    row
}

/// Canonical rational `num / den`.
pub fn rat_normalize(num: IBig, den: IBig) -> Result<RBig> {
    if den == IBig::ZERO {
        return Err(Error::ZeroDenominator);
    }
    Ok(RBig::from_parts_signed(num, den))
}

pub fn rat_int(x: i64) -> RBig {
    RBig::from(IBig::from(x))
}

/// Parses `"a/b"` or `"a"` with an optional leading sign. Decimal points and
/// exponents are rejected so that no rounding can sneak in.
pub fn parse_rational(text: &str) -> Result<RBig> {
    let s = text.trim();
    let bad = || Error::Parse(text.to_string());
    let parse_int = |part: &str| -> Result<IBig> {
        let part = part.trim();
        let digits = part.strip_prefix(['-', '+']).unwrap_or(part);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let value: IBig = digits.parse().map_err(|_| bad())?;
        Ok(if part.starts_with('-') { -value } else { value })
    };
    match s.split_once('/') {
        Some((num, den)) => rat_normalize(parse_int(num)?, parse_int(den)?),
        None => Ok(RBig::from(parse_int(s)?)),
    }
}

/// `q^e` for any integer exponent; negative exponents need `q != 0`.
pub fn rat_pow(q: &RBig, e: i64) -> Result<RBig> {
    if e >= 0 {
        return Ok(pow_nonneg(q, e as usize));
    }
    if q.is_zero() {
        return Err(Error::domain("zero raised to a negative power"));
    }
    let (num, den) = q.clone().into_parts();
    let inv = RBig::from_parts_signed(IBig::from(den), num);
    Ok(pow_nonneg(&inv, e.unsigned_abs() as usize))
}

fn pow_nonneg(q: &RBig, e: usize) -> RBig {
    // numerator and denominator are coprime, so their powers are too
    let num = q.numerator().pow(e);
    let den = q.denominator().pow(e);
    RBig::from_parts(num, den)
}

/// Exponent of `p` in a nonzero integer, `None` for zero.
pub fn valuation_int(x: &IBig, p: u64) -> Option<u64> {
    if *x == IBig::ZERO {
        return None;
    }
    let mut m = x.unsigned_abs();
    Some(m.remove(&UBig::from(p)).unwrap_or(0) as u64)
}

/// `v_p` of a rational, `None` for zero.
pub fn valuation_rat(r: &RBig, p: u64) -> Option<i64> {
    let vn = valuation_int(r.numerator(), p)?;
    let vd = valuation_int(&IBig::from(r.denominator().clone()), p).unwrap_or(0);
    Some(vn as i64 - vd as i64)
}

/// Splits `x = p^v * u` with `p` not dividing `u`; `x` must be nonzero.
pub fn split_p_power(x: &UBig, p: u64) -> (u64, UBig) {
    let mut u = x.clone();
    let v = u.remove(&UBig::from(p)).unwrap_or(0) as u64;
    (v, u)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorisation by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd_u64(a, b) * b
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn pow_u64(base: u64, e: u32) -> u64 {
    base.checked_pow(e).expect("u64 overflow in small power")
}

/// The ring `Z / mZ` on big residues. Elements are kept in `[0, m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueRing {
    modulus: UBig,
}

impl ResidueRing {
    pub fn new(modulus: UBig) -> Self {
        assert!(modulus > UBig::ONE, "modulus must exceed 1");
        Self { modulus }
    }

    pub fn modulus(&self) -> &UBig {
        &self.modulus
    }

    pub fn reduce(&self, x: &UBig) -> UBig {
        x % &self.modulus
    }

    pub fn reduce_signed(&self, x: &IBig) -> UBig {
        let m = IBig::from(self.modulus.clone());
        let r = ((x % &m) + &m) % &m;
        r.try_into().expect("non-negative after euclidean reduction")
    }

    pub fn add(&self, a: &UBig, b: &UBig) -> UBig {
        let s = a + b;
        if s >= self.modulus {
            s - &self.modulus
        } else {
            s
        }
    }

    pub fn sub(&self, a: &UBig, b: &UBig) -> UBig {
        if a >= b {
            a - b
        } else {
            &self.modulus - (b - a)
        }
    }

    pub fn neg(&self, a: &UBig) -> UBig {
        if *a == UBig::ZERO {
            UBig::ZERO
        } else {
            &self.modulus - a
        }
    }

    pub fn mul(&self, a: &UBig, b: &UBig) -> UBig {
        (a * b) % &self.modulus
    }

    pub fn pow(&self, base: &UBig, mut exp: u64) -> UBig {
        let mut result = UBig::ONE % &self.modulus;
        let mut b = base % &self.modulus;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(&result, &b);
            }
            exp >>= 1;
            if exp > 0 {
                b = self.mul(&b, &b);
            }
        }
        result
    }

    pub fn inv(&self, a: &UBig) -> Option<UBig> {
        let a = a % &self.modulus;
        if a == UBig::ZERO {
            return None;
        }
        let (g, s, _) = a.gcd_ext(&self.modulus);
        if g != UBig::ONE {
            return None;
        }
        Some(self.reduce_signed(&s))
    }

    /// Image of a rational whose denominator is invertible mod `m`.
    pub fn from_rational(&self, r: &RBig) -> Option<UBig> {
        let num = self.reduce_signed(r.numerator());
        let den_inv = self.inv(r.denominator())?;
        Some(self.mul(&num, &den_inv))
    }
}

/// Greatest common divisor of two big naturals (zero if both are zero).
pub fn gcd_ubig(a: &UBig, b: &UBig) -> UBig {
    if *a == UBig::ZERO {
        return b.clone();
    }
    if *b == UBig::ZERO {
        return a.clone();
    }
    a.gcd(b)
}
