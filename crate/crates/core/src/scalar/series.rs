//! Rational functions in the series variable `X`, expandable at `X = 0`.

use std::fmt;

use super::field::Scalar;
use super::poly::{Poly, Var};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratingSeries {
    f: Scalar,
}

fn x_coeffs(p: &Poly, mode: super::field::PMode) -> Result<Vec<Scalar>> {
    let cs = p.coeffs_in(Var::X);
    if cs.first().is_some_and(|c| c.0 < 0) {
        return Err(Error::NotExpandable);
    }
    let deg = cs.last().map(|c| c.0).unwrap_or(0) as usize;
    let mut out = vec![Scalar::zero(); deg + 1];
    for (e, c) in cs {
        out[e as usize] = Scalar::from_poly_in(c, mode);
    }
    Ok(out)
}

impl GeneratingSeries {
    pub fn new(f: Scalar) -> Result<GeneratingSeries> {
        let g = GeneratingSeries { f };
        let den = x_coeffs(g.f.denom(), g.f.mode())?;
        if den[0].is_zero() {
            return Err(Error::NotExpandable);
        }
        x_coeffs(g.f.numer(), g.f.mode())?;
        Ok(g)
    }

    pub fn x() -> Scalar {
        Scalar::var(Var::X)
    }

    pub fn scalar(&self) -> &Scalar {
        &self.f
    }

    /// Taylor coefficients of orders `0..=order`.
    pub fn series_expand(&self, order: usize) -> Result<Vec<Scalar>> {
        let mode = self.f.mode();
        let n = x_coeffs(self.f.numer(), mode)?;
        let d = x_coeffs(self.f.denom(), mode)?;
        let d0inv = d[0].inv().map_err(|_| Error::NotExpandable)?;
        let mut out: Vec<Scalar> = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut acc = n.get(k).cloned().unwrap_or_else(Scalar::zero);
            for j in 1..=k.min(d.len() - 1) {
                acc = &acc - &(&d[j] * &out[k - j]);
            }
            out.push(&acc * &d0inv);
        }
        Ok(out)
    }

    pub fn constant_term(&self) -> Result<Scalar> {
        self.f.at_zero(Var::X)
    }

    /// Value at `X = x`.
    pub fn eval(&self, x: &Scalar) -> Result<Scalar> {
        self.f.specialize(&[(Var::X, x.clone())])
    }

    pub fn mul(&self, o: &GeneratingSeries) -> GeneratingSeries {
        GeneratingSeries { f: &self.f * &o.f }
    }

    pub fn add(&self, o: &GeneratingSeries) -> GeneratingSeries {
        GeneratingSeries { f: &self.f + &o.f }
    }

    pub fn sub(&self, o: &GeneratingSeries) -> GeneratingSeries {
        GeneratingSeries { f: &self.f - &o.f }
    }

    pub fn scale(&self, c: &Scalar) -> GeneratingSeries {
        GeneratingSeries { f: &self.f * c }
    }

    /// `(F(X) - F(0)) / X`: the series of coefficients shifted down by one.
    pub fn shift_down(&self) -> Result<GeneratingSeries> {
        let c0 = self.constant_term()?;
        GeneratingSeries::new(&(&self.f - &c0) / &Self::x())
    }

    /// `X·F(X) - lim_{X→∞} X·F(X)`: shifts coefficients up by one, with the
    /// constant chosen so the result stays proper at infinity.
    pub fn shift_up_proper(&self) -> Result<GeneratingSeries> {
        let xf = &self.f * &Self::x();
        let lim = limit_at_infinity(&xf)?;
        GeneratingSeries::new(&xf - &lim)
    }
}

/// `lim_{X→∞}` of a rational function of degree at most zero in `X`.
pub fn limit_at_infinity(f: &Scalar) -> Result<Scalar> {
    let mode = f.mode();
    let n = x_coeffs(f.numer(), mode)?;
    let d = x_coeffs(f.denom(), mode)?;
    let (dn, dd) = (n.len() - 1, d.len() - 1);
    if f.is_zero() || dn < dd {
        return Ok(Scalar::zero());
    }
    if dn > dd {
        return Err(Error::Pole("rational function is not proper at infinity".into()));
    }
    n[dn].checked_div(&d[dd])
}

impl fmt::Display for GeneratingSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: Var) -> Scalar {
        Scalar::var(x)
    }

    #[test]
    fn geometric_expansion() {
        let x = GeneratingSeries::x();
        let g = GeneratingSeries::new(&Scalar::one() / &(&Scalar::one() - &(&v(Var::A) * &x))).unwrap();
        let cs = g.series_expand(3).unwrap();
        for (k, c) in cs.iter().enumerate() {
            assert_eq!(*c, v(Var::A).pow(k as i32));
        }
    }

    #[test]
    fn non_expandable() {
        let x = GeneratingSeries::x();
        assert!(GeneratingSeries::new(&Scalar::one() / &x).is_err());
    }

    #[test]
    fn shifts_are_inverse_on_proper_series() {
        let x = GeneratingSeries::x();
        let a = v(Var::A);
        let b = v(Var::B);
        let den = &(&Scalar::one() - &(&a * &x)) * &(&Scalar::one() - &(&b * &x));
        let f = GeneratingSeries::new(&(&Scalar::one() + &x) / &den).unwrap();
        let up = f.shift_up_proper().unwrap();
        let back = up.shift_down().unwrap();
        assert_eq!(back, f);
    }
}
