//! Finite-order characters of `Q_p^×`, stored as a value table on
//! `(Z/p^m)^×` at minimal conductor plus the value at `p`.
//!
//! Values live in `Q(ζ_{p^K})`, so only characters whose restriction to
//! `Z_p^×` has order dividing `2·p^K` are representable; for `p ∈ {2, 3}` this
//! is every character.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::scalar::{CyclotomicNumber, Rational, Scalar};

#[derive(Clone, Debug)]
pub struct FiniteOrderCharacter {
    p: u32,
    conductor: u32,
    /// Indexed by residues mod `p^conductor`; entries at non-units are zero.
    table: Vec<CyclotomicNumber>,
    at_p: Scalar,
}

fn modulus(p: u32, m: u32) -> u64 {
    (p as u64).pow(m)
}

fn is_unit(a: u64, p: u32) -> bool {
    a % p as u64 != 0
}

impl FiniteOrderCharacter {
    pub fn trivial(p: u32) -> FiniteOrderCharacter {
        FiniteOrderCharacter { p, conductor: 0, table: vec![CyclotomicNumber::one(p)], at_p: Scalar::one() }
    }

    /// Character from an explicit table mod `p^m`; verifies multiplicativity
    /// and reduces to the minimal conductor.
    pub fn from_table(p: u32, m: u32, table: Vec<CyclotomicNumber>, at_p: Scalar) -> Result<FiniteOrderCharacter> {
        let n = modulus(p, m);
        if table.len() as u64 != n {
            return Err(Error::Range(format!("table for conductor p^{m} needs {n} entries")));
        }
        for a in (0..n).filter(|&a| is_unit(a, p)) {
            for b in (0..n).filter(|&b| is_unit(b, p)) {
                if table[((a * b) % n) as usize] != &table[a as usize] * &table[b as usize] {
                    return Err(Error::Range(format!("table is not multiplicative at {a}·{b}")));
                }
            }
        }
        if table[1 % n as usize] != CyclotomicNumber::one(p) {
            return Err(Error::Range("χ(1) ≠ 1".into()));
        }
        Ok(FiniteOrderCharacter { p, conductor: m, table, at_p }.minimized())
    }

    /// The character `u ↦ ε(u)^tame · ζ^{wild · log⟨u⟩}` on `(Z/p^m)^×`, where
    /// `ε` is the quadratic character of the torsion part and `⟨u⟩` the
    /// principal-unit part, with logarithm taken to base `1 + p` (base `5` at `p = 2`).
    pub fn from_parts(p: u32, m: u32, tame: bool, wild: i64, at_p: Scalar) -> Result<FiniteOrderCharacter> {
        let n = modulus(p, m);
        let (base, wild_order) = match (p, m) {
            (_, 0) => (1u64, 1u64),
            (2, 1) | (2, 2) => (1, 1),
            (2, _) => (5, modulus(2, m - 2)),
            (_, _) => ((1 + p as u64) % n, modulus(p, m - 1)),
        };
        if tame && (m == 0 || (p == 2 && m < 2)) {
            return Err(Error::Range("quadratic tame part needs a larger conductor".into()));
        }
        let mut log: HashMap<u64, u64> = HashMap::new();
        let mut x = 1 % n.max(1);
        for j in 0..wild_order {
            log.insert(x, j);
            x = (x * base) % n.max(1);
        }
        let k = log_p(wild_order, p);
        let mut table = vec![CyclotomicNumber::zero(p); n as usize];
        for a in (0..n).filter(|&a| is_unit(a, p) || n == 1) {
            let (sign, principal) = torsion_split(a, p, m);
            let j = *log.get(&principal).ok_or_else(|| Error::Range("principal unit outside the cyclic group".into()))?;
            let mut v = CyclotomicNumber::root_of_unity(p, k, wild * j as i64);
            if tame && sign {
                v = v.neg();
            }
            table[a as usize] = v;
        }
        FiniteOrderCharacter::from_table(p, m, table, at_p)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn at_p(&self) -> &Scalar {
        &self.at_p
    }

    /// `χ(u)` for a `p`-adic unit `u` given by an integer representative.
    pub fn eval_unit(&self, u: &BigInt) -> Result<CyclotomicNumber> {
        let n = BigInt::from(modulus(self.p, self.conductor));
        let a = u.mod_floor(&n).to_u64().expect("residue fits");
        if self.conductor > 0 && !is_unit(a, self.p) {
            return Err(Error::Range(format!("{u} is not a p-adic unit")));
        }
        Ok(self.table[a as usize].clone())
    }

    pub fn is_trivial_on_units(&self) -> bool {
        self.conductor == 0
    }

    /// Pointwise product; the result is re-minimized.
    pub fn mul(&self, o: &FiniteOrderCharacter) -> Result<FiniteOrderCharacter> {
        if self.p != o.p {
            return Err(Error::IncompatibleCharacters(format!("characters at {} and {}", self.p, o.p)));
        }
        let m = self.conductor.max(o.conductor);
        let n = modulus(self.p, m);
        let table = (0..n)
            .map(|a| {
                if is_unit(a, self.p) || n == 1 {
                    let b = BigInt::from(a.max(1));
                    Ok(&self.eval_unit(&b)? * &o.eval_unit(&b)?)
                } else {
                    Ok(CyclotomicNumber::zero(self.p))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteOrderCharacter::from_table(self.p, m, table, &self.at_p * &o.at_p)
    }

    pub fn inverse(&self) -> Result<FiniteOrderCharacter> {
        Ok(FiniteOrderCharacter {
            p: self.p,
            conductor: self.conductor,
            table: self.table.iter().map(|v| v.conj()).collect(),
            at_p: self.at_p.inv()?,
        })
    }

    /// Same restriction to `Z_p^×`.
    pub fn agrees_on_units(&self, o: &FiniteOrderCharacter) -> bool {
        self.p == o.p && self.conductor == o.conductor && self.table == o.table
    }

    fn minimized(self) -> FiniteOrderCharacter {
        let n = modulus(self.p, self.conductor);
        for c in 0..self.conductor {
            let nc = modulus(self.p, c);
            let trivial_on_kernel = (0..n)
                .filter(|&a| is_unit(a, self.p) && a % nc == 1 % nc)
                .all(|a| self.table[a as usize] == CyclotomicNumber::one(self.p));
            if trivial_on_kernel {
                let table = (0..nc)
                    .map(|b| {
                        (0..n)
                            .find(|&a| a % nc == b && is_unit(a, self.p))
                            .filter(|_| is_unit(b, self.p) || nc == 1)
                            .map_or_else(|| CyclotomicNumber::zero(self.p), |a| self.table[a as usize].clone())
                    })
                    .collect();
                return FiniteOrderCharacter { p: self.p, conductor: c, table, at_p: self.at_p };
            }
        }
        self
    }
}

/// `log_p` of a power of `p`.
fn log_p(mut n: u64, p: u32) -> u32 {
    let mut k = 0;
    while n > 1 {
        n /= p as u64;
        k += 1;
    }
    k
}

/// Split `a ∈ (Z/p^m)^×` into its torsion sign (the quadratic character of
/// the torsion part, as a flag) and its principal-unit part.
fn torsion_split(a: u64, p: u32, m: u32) -> (bool, u64) {
    let n = modulus(p, m);
    if n == 1 {
        return (false, 0);
    }
    if p == 2 {
        let neg = a % 4 == 3;
        let principal = if neg { (n - a) % n } else { a };
        return (neg, principal);
    }
    let omega = pow_mod(a, modulus(p, m - 1), n);
    let principal = (a * inv_mod(omega, n)) % n;
    let legendre = pow_mod(a % p as u64, (p as u64 - 1) / 2, p as u64);
    (legendre == p as u64 - 1, principal)
}

fn pow_mod(mut b: u64, mut e: u64, n: u64) -> u64 {
    let mut r = 1 % n;
    b %= n;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % n;
        }
        b = b * b % n;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, n: u64) -> u64 {
    let e = BigInt::from(a).extended_gcd(&BigInt::from(n));
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(&BigInt::from(n)).to_u64().unwrap()
}

/// `(1/|G|) Σ_{u ∈ G} f(u)` over `G = (Z/p^m)^×`.
pub fn unit_average(p: u32, m: u32, f: impl Fn(&BigInt) -> Result<CyclotomicNumber>) -> Result<CyclotomicNumber> {
    let n = modulus(p, m);
    let units: Vec<u64> = if n == 1 { vec![1] } else { (1..n).filter(|&a| is_unit(a, p)).collect() };
    let mut acc = CyclotomicNumber::zero(p);
    for &a in &units {
        acc = &acc + &f(&BigInt::from(a))?;
    }
    Ok(acc.scale(&Rational::new(BigInt::one(), BigInt::from(units.len()))))
}

impl PartialEq for FiniteOrderCharacter {
    fn eq(&self, o: &FiniteOrderCharacter) -> bool {
        self.agrees_on_units(o) && self.at_p == o.at_p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conductor_is_minimal() {
        let chi = FiniteOrderCharacter::from_parts(3, 3, true, 0, Scalar::one()).unwrap();
        assert_eq!(chi.conductor(), 1);
        let chi = FiniteOrderCharacter::from_parts(3, 3, false, 3, Scalar::one()).unwrap();
        assert_eq!(chi.conductor(), 2);
        let chi = FiniteOrderCharacter::from_parts(2, 4, false, 1, Scalar::one()).unwrap();
        assert_eq!(chi.conductor(), 4);
        let chi = FiniteOrderCharacter::from_parts(2, 3, true, 0, Scalar::one()).unwrap();
        assert_eq!(chi.conductor(), 2);
    }

    #[test]
    fn product_with_inverse_is_trivial() {
        for p in [2, 3] {
            let chi = FiniteOrderCharacter::from_parts(p, 3, true, 1, Scalar::int(2)).unwrap();
            let one = chi.mul(&chi.inverse().unwrap()).unwrap();
            assert_eq!(one, FiniteOrderCharacter::trivial(p));
        }
    }

    #[test]
    fn orthogonality() {
        let chi = FiniteOrderCharacter::from_parts(3, 2, false, 1, Scalar::one()).unwrap();
        let avg = unit_average(3, 2, |u| chi.eval_unit(u)).unwrap();
        assert!(avg.is_zero());
        let avg = unit_average(3, 2, |u| FiniteOrderCharacter::trivial(3).eval_unit(u)).unwrap();
        assert_eq!(avg, CyclotomicNumber::one(3));
    }
}
