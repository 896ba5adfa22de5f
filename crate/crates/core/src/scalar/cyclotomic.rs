//! Arithmetic in `K(ζ_{p^k})` for a coefficient field `K`, in the power basis
//! `1, ζ, …, ζ^{φ(p^k)-1}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::field::Scalar;
use super::rational::{frac_p, Rational};

/// Coefficient fields admitted by [`Cyclotomic`].
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rational(q: &Rational) -> Self;
}

impl Coeff for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
}

impl Coeff for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(q: &Rational) -> Self {
        Scalar::rational(q.clone())
    }
}

#[derive(Clone, Debug)]
pub struct Cyclotomic<T: Coeff> {
    p: u32,
    k: u32,
    coeffs: Vec<T>,
}

pub type CyclotomicNumber = Cyclotomic<Rational>;

fn phi(p: u32, k: u32) -> usize {
    if k == 0 {
        1
    } else {
        ((p - 1) * p.pow(k - 1)) as usize
    }
}

impl<T: Coeff> Cyclotomic<T> {
    pub fn from_coeff(p: u32, c: T) -> Self {
        Cyclotomic { p, k: 0, coeffs: vec![c] }
    }

    pub fn zero(p: u32) -> Self {
        Self::from_coeff(p, T::zero())
    }

    pub fn one(p: u32) -> Self {
        Self::from_coeff(p, T::one())
    }

    /// `ζ_{p^k}^e`.
    pub fn root_of_unity(p: u32, k: u32, e: i64) -> Self {
        let n = p.pow(k) as i64;
        let e = e.rem_euclid(n) as usize;
        let mut full = vec![T::zero(); n as usize];
        full[e] = T::one();
        Self::reduce_full(p, k, full).shrink()
    }

    /// `ψ(x) = exp(2πi {x}_p)`.
    pub fn psi(p: u32, x: &Rational) -> Self {
        let f = frac_p(x, p);
        if Zero::is_zero(&f) {
            return Self::one(p);
        }
        let den = f.denom().clone();
        let mut k = 0;
        let mut d = den.clone();
        let pb = BigInt::from(p);
        while d > BigInt::one() {
            d /= &pb;
            k += 1;
        }
        let e = f.numer().to_i64().expect("psi exponent fits");
        Self::root_of_unity(p, k, e)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.k)
    }

    pub fn depth(&self) -> u32 {
        self.k
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    fn reduce_full(p: u32, k: u32, mut full: Vec<T>) -> Self {
        if k == 0 {
            return Cyclotomic { p, k, coeffs: vec![full.swap_remove(0)] };
        }
        let ph = phi(p, k);
        let step = p.pow(k - 1) as usize;
        for e in (ph..full.len()).rev() {
            if full[e].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut full[e], T::zero());
            let s = e - ph;
            for j in 0..(p as usize - 1) {
                let i = j * step + s;
                full[i] = full[i].sub(&c);
            }
        }
        full.truncate(ph);
        Cyclotomic { p, k, coeffs: full }
    }

    /// Re-express at depth `k2 ≥ k`.
    pub fn embed(&self, k2: u32) -> Self {
        assert!(k2 >= self.k);
        if k2 == self.k {
            return self.clone();
        }
        let n = self.p.pow(k2) as usize;
        let scale = self.p.pow(k2 - self.k) as usize;
        let mut full = vec![T::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            full[i * scale] = c.clone();
        }
        Self::reduce_full(self.p, k2, full)
    }

    /// Smallest depth representing the same element.
    pub fn shrink(mut self) -> Self {
        while self.k > 0 {
            let p = self.p as usize;
            if self.coeffs.iter().enumerate().any(|(i, c)| i % p != 0 && !c.is_zero()) {
                break;
            }
            let coeffs: Vec<T> = self.coeffs.iter().step_by(p).cloned().collect();
            self.k -= 1;
            let mut coeffs = coeffs;
            coeffs.truncate(phi(self.p, self.k));
            self.coeffs = coeffs;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The coefficient value when the element lies in `K`.
    pub fn as_base(&self) -> Option<T> {
        let s = self.clone().shrink();
        (s.k == 0).then(|| s.coeffs[0].clone())
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}` (coefficients untouched).
    pub fn conj(&self) -> Self {
        let n = self.order() as usize;
        let mut full = vec![T::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            full[(n - i) % n] = c.clone();
        }
        Self::reduce_full(self.p, self.k, full)
    }

    pub fn scale(&self, c: &T) -> Self {
        Cyclotomic { p: self.p, k: self.k, coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect() }
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Cyclotomic<U> {
        Cyclotomic { p: self.p, k: self.k, coeffs: self.coeffs.iter().map(f).collect() }
    }

    fn align(&self, o: &Self) -> (Self, Self) {
        assert_eq!(self.p, o.p, "cyclotomic prime mismatch");
        let k = self.k.max(o.k);
        (self.embed(k), o.embed(k))
    }

    pub fn add(&self, o: &Self) -> Self {
        let (x, y) = self.align(o);
        Cyclotomic { p: x.p, k: x.k, coeffs: x.coeffs.iter().zip(&y.coeffs).map(|(a, b)| a.add(b)).collect() }.shrink()
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Cyclotomic { p: self.p, k: self.k, coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.k == 0 {
            return o.scale(&self.coeffs[0]);
        }
        if o.k == 0 {
            return self.scale(&o.coeffs[0]);
        }
        let (x, y) = self.align(o);
        let n = x.order() as usize;
        let mut full = vec![T::zero(); n];
        for (i, a) in x.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let e = (i + j) % n;
                full[e] = full[e].add(&a.mul(b));
            }
        }
        Self::reduce_full(x.p, x.k, full).shrink()
    }
}

impl<T: Coeff> PartialEq for Cyclotomic<T> {
    fn eq(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }
}

impl<T: Coeff> Add for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn add(self, o: &Cyclotomic<T>) -> Cyclotomic<T> {
        Cyclotomic::add(self, o)
    }
}

impl<T: Coeff> Sub for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn sub(self, o: &Cyclotomic<T>) -> Cyclotomic<T> {
        Cyclotomic::sub(self, o)
    }
}

impl<T: Coeff> Mul for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn mul(self, o: &Cyclotomic<T>) -> Cyclotomic<T> {
        Cyclotomic::mul(self, o)
    }
}

impl<T: Coeff> Neg for &Cyclotomic<T> {
    type Output = Cyclotomic<T>;
    fn neg(self) -> Cyclotomic<T> {
        Cyclotomic::neg(self)
    }
}

impl<T: Coeff> fmt::Display for Cyclotomic<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 0 {
            return write!(f, "{}", self.coeffs[0]);
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*z{}^{i}", self.order())?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl CyclotomicNumber {
    pub fn rational(p: u32, q: Rational) -> Self {
        Self::from_coeff(p, q)
    }

    /// Hermitian norm square `x · conj(x)`, summed by the caller.
    pub fn norm_sq(&self) -> Self {
        self.mul(&self.conj())
    }

    pub fn to_scalar(&self) -> Cyclotomic<Scalar> {
        self.map(|q| Scalar::rational(q.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational::{rat, rat2};

    type C = CyclotomicNumber;

    #[test]
    fn root_has_order_pk() {
        for (p, k) in [(2, 3), (3, 2), (5, 1)] {
            let z = C::root_of_unity(p, k, 1);
            let mut acc = C::one(p);
            for _ in 0..p.pow(k) {
                acc = acc.mul(&z);
            }
            assert_eq!(acc, C::one(p));
        }
    }

    #[test]
    fn primitive_p_sum_vanishes() {
        for (p, k) in [(2u32, 2u32), (3, 2), (5, 1)] {
            let step = p.pow(k - 1) as i64;
            let mut acc = C::zero(p);
            for j in 0..p as i64 {
                acc = acc.add(&C::root_of_unity(p, k, j * step));
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn psi_values() {
        assert_eq!(C::psi(3, &rat2(1, 3)), C::root_of_unity(3, 1, 1));
        assert_eq!(C::psi(2, &rat(5)), C::one(2));
        assert_eq!(C::psi(2, &rat2(1, 2)), C::rational(2, rat(-1)));
    }

    #[test]
    fn embedding_is_exact() {
        let z = C::root_of_unity(3, 1, 1);
        let w = z.embed(3);
        assert_eq!(w.clone().shrink().depth(), 1);
        assert_eq!(w, z);
    }

    #[test]
    fn conj_inverts() {
        let z = C::root_of_unity(5, 1, 2);
        assert_eq!(z.mul(&z.conj()), C::one(5));
    }
}
