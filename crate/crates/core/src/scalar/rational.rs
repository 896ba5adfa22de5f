//! Arbitrary-precision rationals and the p-adic helpers built on them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat2(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `p^e` for any integer `e`.
pub fn ppow(p: u32, e: i32) -> Rational {
    let base = BigInt::from(p).pow(e.unsigned_abs());
    if e >= 0 {
        Rational::from_integer(base)
    } else {
        Rational::new(BigInt::one(), base)
    }
}

/// Parse `"n"` or `"n/d"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn int_val(n: &BigInt, p: u32) -> i32 {
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation; `None` for zero.
pub fn valuation(q: &Rational, p: u32) -> Option<i32> {
    if q.is_zero() {
        None
    } else {
        Some(int_val(q.numer(), p) - int_val(q.denom(), p))
    }
}

/// True when the denominator is prime to `p`.
pub fn is_p_integral(q: &Rational, p: u32) -> bool {
    q.is_zero() || int_val(q.denom(), p) == 0
}

/// True when `q` is a p-adic unit.
pub fn is_p_unit(q: &Rational, p: u32) -> bool {
    valuation(q, p) == Some(0)
}

/// Split `q = p^v * u` with `u` a p-adic unit.
pub fn split_unit(q: &Rational, p: u32) -> (i32, Rational) {
    let v = valuation(q, p).expect("split_unit of zero");
    (v, q * ppow(p, -v))
}

/// Residue of a p-integral rational modulo `p^e` as an integer in `[0, p^e)`.
pub fn residue(q: &Rational, p: u32, e: u32) -> BigInt {
    assert!(is_p_integral(q, p), "residue of non-integral {q}");
    let m = BigInt::from(p).pow(e);
    let d = q.denom().mod_floor(&m);
    let inv = mod_inverse(&d, &m).expect("denominator prime to p");
    (q.numer() * inv).mod_floor(&m)
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// The p-adic fractional part `{q}_p`: the unique element of `Z[1/p] ∩ [0, 1)`
/// congruent to `q` modulo `Z_p`.
pub fn frac_p(q: &Rational, p: u32) -> Rational {
    let v = valuation(q, p).unwrap_or(0);
    if v >= 0 {
        return Rational::zero();
    }
    let k = (-v) as u32;
    let scaled = q * ppow(p, k as i32);
    let r = residue(&scaled, p, k);
    Rational::new(r, BigInt::from(p).pow(k))
}

/// Representative of `x mod p^e Z_p` in `Z[1/p] ∩ [0, p^e)`.
pub fn reduce_mod_ppow(x: &Rational, p: u32, e: i32) -> Rational {
    let pe = ppow(p, e);
    frac_p(&(x / &pe), p) * pe
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn is_unit_or_zero_mod(q: &Rational, p: u32) -> bool {
    q.is_zero() || is_p_integral(q, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(valuation(&rat2(12, 5), 2), Some(2));
        assert_eq!(valuation(&rat2(5, 12), 2), Some(-2));
        assert_eq!(valuation(&rat(0), 3), None);
    }

    #[test]
    fn fractional_part() {
        assert_eq!(frac_p(&rat2(1, 4), 2), rat2(1, 4));
        assert_eq!(frac_p(&rat2(5, 4), 2), rat2(1, 4));
        assert_eq!(frac_p(&rat2(-1, 3), 3), rat2(2, 3));
        assert_eq!(frac_p(&rat2(1, 5), 3), rat(0));
        // 1/10 = (1/5)(1/2); 1/5 ≡ 1 mod 2, so {1/10}_2 = 1/2
        assert_eq!(frac_p(&rat2(1, 10), 2), rat2(1, 2));
    }

    #[test]
    fn parse_roundtrip() {
        let q = parse_rational("-6/4").unwrap();
        assert_eq!(format_rational(&q), "-3/2");
        assert!(parse_rational("1/0").is_err());
    }
}
