//! Schwartz functions on `Q_p²` in a finite model: functions on
//! `(p^{-A}Z_p / p^B Z_p)²`, i.e. supported in `(p^{-A}Z_p)²` and invariant
//! under `(p^B Z_p)²`.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::scalar::rational::{ppow, rat, residue, valuation};
use crate::scalar::{CyclotomicNumber, Rational};

/// The lattices and annuli used to build test data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// `p^k Z_p`.
    Ball(i32),
    /// `Z_p^×`.
    Units,
}

impl Region {
    pub fn contains(self, x: &Rational, p: u32) -> bool {
        let v = valuation(x, p);
        match self {
            Region::Ball(k) => v.is_none_or(|v| v >= k),
            Region::Units => v == Some(0),
        }
    }

    /// Smallest `(A, B)` for which the indicator is representable.
    fn depths(self) -> (u32, u32) {
        match self {
            Region::Ball(k) => ((-k).max(0) as u32, k.max(1) as u32),
            Region::Units => (0, 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchwartzFunction {
    p: u32,
    outer: u32,
    inner: u32,
    /// Row-major over `(i, j)`, with `x = i·p^{-outer}` and `y = j·p^{-outer}`.
    values: Vec<CyclotomicNumber>,
}

impl SchwartzFunction {
    /// Tabulate `f` at the coset representatives `i·p^{-A}`, `0 ≤ i < p^{A+B}`.
    pub fn new(
        p: u32,
        outer: u32,
        inner: u32,
        f: impl Fn(&Rational, &Rational) -> CyclotomicNumber,
    ) -> Result<SchwartzFunction> {
        if inner == 0 {
            return Err(Error::Range("inner depth must be at least 1".into()));
        }
        let n = Self::side(p, outer, inner);
        let step = ppow(p, -(outer as i32));
        let reps: Vec<Rational> = (0..n).map(|i| rat(i as i64) * &step).collect();
        let mut values = Vec::with_capacity(n * n);
        for x in &reps {
            for y in &reps {
                values.push(f(x, y));
            }
        }
        Ok(SchwartzFunction { p, outer, inner, values })
    }

    /// `ch(X × Y)`, on the smallest grid that represents it.
    pub fn indicator(p: u32, x: Region, y: Region) -> SchwartzFunction {
        let (a1, b1) = x.depths();
        let (a2, b2) = y.depths();
        let one = CyclotomicNumber::one(p);
        let zero = CyclotomicNumber::zero(p);
        SchwartzFunction::new(p, a1.max(a2), b1.max(b2), |u, v| {
            if x.contains(u, p) && y.contains(v, p) { one.clone() } else { zero.clone() }
        })
        .expect("inner depth is at least 1")
    }

    fn side(p: u32, outer: u32, inner: u32) -> usize {
        (p as usize).pow(outer + inner)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn depths(&self) -> (u32, u32) {
        (self.outer, self.inner)
    }

    fn index(&self, x: &Rational) -> Option<usize> {
        if valuation(x, self.p).is_some_and(|v| v < -(self.outer as i32)) {
            return None;
        }
        let scaled = x * ppow(self.p, self.outer as i32);
        let r = residue(&scaled, self.p, self.outer + self.inner);
        Some(r.to_usize().expect("residue fits"))
    }

    /// `Φ(x, y)` for arbitrary rationals.
    pub fn value(&self, x: &Rational, y: &Rational) -> CyclotomicNumber {
        let n = Self::side(self.p, self.outer, self.inner);
        match (self.index(x), self.index(y)) {
            (Some(i), Some(j)) => self.values[i * n + j].clone(),
            _ => CyclotomicNumber::zero(self.p),
        }
    }

    pub fn at_origin(&self) -> CyclotomicNumber {
        self.values[0].clone()
    }

    /// The same function on a finer grid.
    pub fn resize(&self, outer: u32, inner: u32) -> Result<SchwartzFunction> {
        if outer < self.outer || inner < self.inner {
            return Err(Error::Range("resize can only refine the grid".into()));
        }
        SchwartzFunction::new(self.p, outer, inner, |x, y| self.value(x, y))
    }

    /// `(x, y) ↦ Φ(ux, uy)`: the action of `diag(u, u)`, a permutation of value slots for a unit `u`.
    pub fn act_by_scalar(&self, u: &Rational) -> Result<SchwartzFunction> {
        let k = valuation(u, self.p).ok_or(Error::DivisionByZero)?;
        let outer = self.outer as i32 + k.max(0);
        let inner = self.inner as i32 + (-k).max(0);
        SchwartzFunction::new(self.p, outer as u32, inner as u32, |x, y| self.value(&(x * u), &(y * u)))
    }

    /// Partial Fourier transform in the second variable,
    /// `Φ'(x, y) = ∫ Φ(x, t) ψ(±ty) dt` with the self-dual measure, computed on
    /// the square grid `A = B = max(A, B)`.
    pub fn partial_fourier(&self, inverse: bool) -> SchwartzFunction {
        let d = self.outer.max(self.inner);
        let sq = if (self.outer, self.inner) == (d, d) { self.clone() } else { self.resize(d, d).expect("refinement") };
        let n = Self::side(self.p, d, d);
        let step = ppow(self.p, -(d as i32));
        let sign = if inverse { -1 } else { 1 };
        // ψ(t·y) depends only on t·y mod Z_p, i.e. on i·j mod p^{2d}.
        let modulus = n as u64;
        let chars: Vec<CyclotomicNumber> = (0..modulus)
            .map(|k| CyclotomicNumber::psi(self.p, &(rat(sign * k as i64) * &step * &step)))
            .collect();
        let vol = ppow(self.p, -(d as i32));
        let mut values = vec![CyclotomicNumber::zero(self.p); n * n];
        for i in 0..n {
            let row = &sq.values[i * n..(i + 1) * n];
            if row.iter().all(|v| v.is_zero()) {
                continue;
            }
            for j in 0..n {
                let mut acc = CyclotomicNumber::zero(self.p);
                for (t, v) in row.iter().enumerate() {
                    if !v.is_zero() {
                        acc = &acc + &(v * &chars[(t as u64 * j as u64 % modulus) as usize]);
                    }
                }
                values[i * n + j] = acc.scale(&vol);
            }
        }
        SchwartzFunction { p: self.p, outer: d, inner: d, values }
    }

    /// `∫∫ Φ · conj(Ψ)`, on a common grid.
    pub fn inner_product(&self, o: &SchwartzFunction) -> Result<CyclotomicNumber> {
        let (a, b) = (self.outer.max(o.outer), self.inner.max(o.inner));
        let f = self.resize(a, b)?;
        let g = o.resize(a, b)?;
        let acc = f.values.iter().zip(&g.values).fold(CyclotomicNumber::zero(self.p), |acc, (x, y)| &acc + &(x * &y.conj()));
        Ok(acc.scale(&ppow(self.p, -2 * b as i32)))
    }

    pub fn sub(&self, o: &SchwartzFunction) -> Result<SchwartzFunction> {
        let (a, b) = (self.outer.max(o.outer), self.inner.max(o.inner));
        let f = self.resize(a, b)?;
        let g = o.resize(a, b)?;
        Ok(SchwartzFunction { values: f.values.iter().zip(&g.values).map(|(x, y)| x - y).collect(), ..f })
    }

    /// Equality as functions, regardless of grid.
    pub fn same_function(&self, o: &SchwartzFunction) -> bool {
        self.sub(o).is_ok_and(|d| d.values.iter().all(|v| v.is_zero()))
    }

    /// `Φ'(0, 0) = 0`, where `Φ'` is the partial Fourier transform.
    pub fn is_depleted(&self) -> bool {
        self.partial_fourier(false).at_origin().is_zero()
    }
}

/// The named test functions, given through their partial Fourier transforms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedSchwartz {
    /// `Φ' = ch(Z_p^× × Z_p^×)`.
    Dep,
    /// `Φ' = ch(Z_p × Z_p^×)`.
    Crit,
    /// `Φ' = ch(pZ_p × Z_p^×)`.
    ShiftedCrit,
    /// `Φ = ch(Z_p × Z_p)`.
    Spherical,
    /// `Φ = ch(pZ_p × Z_p^×)`, one factor of the Siegel data.
    Siegel,
}

impl NamedSchwartz {
    /// The function `Φ` itself.
    pub fn function(self, p: u32) -> SchwartzFunction {
        match self {
            NamedSchwartz::Spherical => SchwartzFunction::indicator(p, Region::Ball(0), Region::Ball(0)),
            NamedSchwartz::Siegel => SchwartzFunction::indicator(p, Region::Ball(1), Region::Units),
            _ => self.transform(p).expect("transform-defined").partial_fourier(true),
        }
    }

    /// `Φ'`, for the data defined through it.
    pub fn transform(self, p: u32) -> Option<SchwartzFunction> {
        let x = match self {
            NamedSchwartz::Dep => Region::Units,
            NamedSchwartz::Crit => Region::Ball(0),
            NamedSchwartz::ShiftedCrit => Region::Ball(1),
            _ => return None,
        };
        Some(SchwartzFunction::indicator(p, x, Region::Units))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_is_self_dual() {
        for p in [2, 3] {
            let f = SchwartzFunction::indicator(p, Region::Ball(0), Region::Ball(0));
            assert!(f.partial_fourier(false).same_function(&f));
        }
    }

    #[test]
    fn transform_of_units() {
        for p in [2, 3] {
            let f = SchwartzFunction::indicator(p, Region::Ball(0), Region::Units);
            let pinv = rat(1) / rat(p as i64);
            let expected = SchwartzFunction::new(p, 1, 1, |x, y| {
                if !Region::Ball(0).contains(x, p) {
                    return CyclotomicNumber::zero(p);
                }
                let a = if Region::Ball(0).contains(y, p) { rat(1) } else { rat(0) };
                let b = if Region::Ball(-1).contains(y, p) { pinv.clone() } else { rat(0) };
                CyclotomicNumber::rational(p, a - b)
            })
            .unwrap();
            assert!(f.partial_fourier(false).same_function(&expected));
        }
    }

    #[test]
    fn double_transform_reflects() {
        let p = 3;
        let f = SchwartzFunction::new(p, 1, 1, |x, y| CyclotomicNumber::psi(p, &(x * rat(2) + y)).scale(&rat(1))).unwrap();
        let ff = f.partial_fourier(false).partial_fourier(false);
        let reflected = SchwartzFunction::new(p, 1, 1, |x, y| f.value(x, &(-y.clone()))).unwrap();
        assert!(ff.same_function(&reflected));
        assert!(f.partial_fourier(false).partial_fourier(true).same_function(&f));
    }

    #[test]
    fn named_data_are_depleted() {
        for p in [2, 3] {
            for d in [NamedSchwartz::Dep, NamedSchwartz::Crit, NamedSchwartz::ShiftedCrit] {
                assert!(d.function(p).is_depleted());
            }
            assert!(!NamedSchwartz::Spherical.function(p).is_depleted());
        }
    }

    #[test]
    fn unit_scaling_permutes() {
        let p = 3;
        let f = NamedSchwartz::Dep.function(p);
        let g = f.act_by_scalar(&rat(2)).unwrap();
        assert_eq!(g.depths(), f.depths());
        assert!(g.same_function(&f));
        let h = NamedSchwartz::Siegel.function(p).act_by_scalar(&rat(3)).unwrap();
        assert!(h.same_function(&SchwartzFunction::indicator(p, Region::Ball(0), Region::Ball(-1)).sub(
            &SchwartzFunction::indicator(p, Region::Ball(0), Region::Ball(0))).unwrap()));
    }
}
