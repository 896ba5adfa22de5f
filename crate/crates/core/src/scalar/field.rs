//! Rational functions in the Hecke-parameter symbols, with `S = √p` adjoined.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{gcd, Mono, Poly, Var, ZERO_MONO};
use super::rational::{ppow, Rational};
use crate::error::{Error, Result};

/// How `p` is represented: the symbol `P` (with `S² = P`) or a bound prime
/// (with `S² = p`, and `P` never occurring).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PMode {
    Symbolic,
    Numeric(u32),
}

impl PMode {
    fn root(self) -> Option<u32> {
        match self {
            PMode::Symbolic => None,
            PMode::Numeric(p) => Some(p),
        }
    }

    pub fn prime(self) -> Option<u32> {
        self.root()
    }
}

/// An element of `Q(a, b, c1, c2, P, X)(S)`, `S² = P`, kept in canonical form.
#[derive(Clone, Debug)]
pub struct Scalar {
    num: Poly,
    den: Poly,
    root: Option<u32>,
}

fn merge_root(x: Option<u32>, y: Option<u32>) -> Option<u32> {
    match (x, y) {
        (Some(p), Some(q)) => {
            assert_eq!(p, q, "mixing scalars for different primes");
            Some(p)
        }
        (Some(p), None) | (None, Some(p)) => Some(p),
        (None, None) => None,
    }
}

/// Replace `P^e` by `p^e` and reduce `S^e` to `S^{e mod 2}`.
fn reduce_roots(f: &Poly, root: Option<u32>) -> Poly {
    let si = Var::S.idx();
    let pi = Var::P.idx();
    let needs = f.terms().iter().any(|(m, _)| m[si] < 0 || m[si] > 1 || (root.is_some() && m[pi] != 0));
    if !needs {
        return f.clone();
    }
    f.map_terms(|m, c| {
        let mut m2: Mono = *m;
        let e = m[si];
        let r = e.rem_euclid(2);
        let half = (e - r) / 2;
        m2[si] = r;
        match root {
            None => {
                m2[pi] += half;
                Poly::monomial(m2, c.clone())
            }
            Some(p) => {
                let pe = m2[pi] + half;
                m2[pi] = 0;
                Poly::monomial(m2, c * ppow(p, pe))
            }
        }
    })
}

/// Conjugate `S ↦ -S`, assuming `S`-degree at most one.
fn conj_s(f: &Poly) -> Poly {
    let si = Var::S.idx();
    f.map_terms(|m, c| Poly::monomial(*m, if m[si] % 2 != 0 { -c.clone() } else { c.clone() }))
}

impl Scalar {
    fn raw(num: Poly, den: Poly, root: Option<u32>) -> Scalar {
        Scalar { num, den, root }
    }

    fn make(num: Poly, den: Poly, root: Option<u32>) -> Result<Scalar> {
        let mut num = reduce_roots(&num, root);
        let mut den = reduce_roots(&den, root);
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Scalar::raw(Poly::zero(), Poly::one(), root));
        }
        if den.occurs(Var::S) {
            let c = conj_s(&den);
            num = reduce_roots(&(&num * &c), root);
            den = reduce_roots(&(&den * &c), root);
            if den.is_zero() {
                return Err(Error::DivisionByZero);
            }
        }
        if let Some(c) = den.as_constant() {
            let inv = c.recip();
            return Ok(Scalar::raw(num.scale(&inv), Poly::one(), root));
        }
        let (m, d0) = den.split_monomial();
        let neg = m.map(|e| -e);
        num = num.shift(&neg);
        den = d0;
        if !den.is_monomial() {
            let g = gcd(&num, &den);
            if !g.is_one() {
                num = num.div_known(&g);
                den = den.div_known(&g);
            }
        }
        let (m, d0) = den.split_monomial();
        if m != ZERO_MONO {
            num = num.shift(&m.map(|e| -e));
            den = d0;
        }
        let inv = den.lead_coeff().recip();
        Ok(Scalar::raw(num.scale(&inv), den.scale(&inv), root))
    }

    pub fn from_poly(p: Poly) -> Scalar {
        Scalar::make(p, Poly::one(), None).unwrap()
    }

    pub fn from_poly_in(p: Poly, mode: PMode) -> Scalar {
        Scalar::make(p, Poly::one(), mode.root()).unwrap()
    }

    pub fn ratio(num: Poly, den: Poly) -> Result<Scalar> {
        Scalar::make(num, den, None)
    }

    pub fn zero() -> Scalar {
        Scalar::raw(Poly::zero(), Poly::one(), None)
    }

    pub fn one() -> Scalar {
        Scalar::raw(Poly::one(), Poly::one(), None)
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn rational(q: Rational) -> Scalar {
        Scalar::raw(Poly::constant(q), Poly::one(), None)
    }

    pub fn var(v: Var) -> Scalar {
        Scalar::raw(Poly::var(v), Poly::one(), None)
    }

    /// `v^e` for any integer `e`.
    pub fn var_pow(v: Var, e: i32) -> Scalar {
        Scalar::from_poly(Poly::var_pow(v, e))
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn mode(&self) -> PMode {
        match self.root {
            None => PMode::Symbolic,
            Some(p) => PMode::Numeric(p),
        }
    }

    /// Reinterpret in `mode`, binding `P` if numeric.
    pub fn in_mode(&self, mode: PMode) -> Scalar {
        match mode {
            PMode::Symbolic => self.clone(),
            PMode::Numeric(p) => {
                let root = merge_root(self.root, Some(p));
                Scalar::make(self.num.clone(), self.den.clone(), root).expect("binding P makes a denominator vanish")
            }
        }
    }

    /// Idempotent re-canonicalization.
    pub fn normalize(&self) -> Result<Scalar> {
        Scalar::make(self.num.clone(), self.den.clone(), self.root)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn occurs(&self, v: Var) -> bool {
        self.num.occurs(v) || self.den.occurs(v)
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Scalar::make(self.den.clone(), self.num.clone(), self.root)
    }

    pub fn checked_div(&self, o: &Scalar) -> Result<Scalar> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let root = merge_root(self.root, o.root);
        let (x, y) = (self.in_root(root), o.in_root(root));
        Scalar::make(&x.num * &y.den, &x.den * &y.num, root)
    }

    fn in_root(&self, root: Option<u32>) -> std::borrow::Cow<'_, Scalar> {
        if self.root == root || root.is_none() {
            std::borrow::Cow::Borrowed(self)
        } else {
            std::borrow::Cow::Owned(Scalar::make(self.num.clone(), self.den.clone(), root).expect("binding P makes a denominator vanish"))
        }
    }

    pub fn pow(&self, e: i32) -> Scalar {
        if e < 0 {
            return self.inv().expect("negative power of zero").pow(-e);
        }
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut k = e as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar::raw(self.num.scale(c), self.den.clone(), self.root)
    }

    /// Substitute symbols, then normalize. Binding `P` to a prime switches to
    /// numeric mode, where `S² = p`.
    pub fn specialize(&self, bindings: &[(Var, Scalar)]) -> Result<Scalar> {
        let map: HashMap<Var, &Scalar> = bindings.iter().map(|(v, s)| (*v, s)).collect();
        let mut root = self.root;
        for s in map.values() {
            root = merge_root(root, s.root);
        }
        if let Some(pv) = map.get(&Var::P) {
            if let Some(q) = pv.as_rational() {
                if q.is_integer() && q > Rational::one() {
                    if let Ok(p) = u32::try_from(q.numer().clone()) {
                        if !map.contains_key(&Var::S) {
                            root = merge_root(root, Some(p));
                        }
                    }
                }
            }
        }
        let num = subst_poly(&self.num, &map, root)?;
        let den = subst_poly(&self.den, &map, root)?;
        num.with_root(root).checked_div(&den.with_root(root))
    }

    fn with_root(&self, root: Option<u32>) -> Scalar {
        self.in_root(root).into_owned()
    }

    /// Value at `v = 0` when `v` does not occur in the reduced denominator's
    /// zero set; used for series constant terms.
    pub fn at_zero(&self, v: Var) -> Result<Scalar> {
        self.specialize(&[(v, Scalar::zero())])
    }

    /// `c / (1 - mu)`, the formal sum of `c mu^n` over `n ≥ 0`.
    pub fn geom_sum(c: &Scalar, mu: &Scalar) -> Result<Scalar> {
        let d = &Scalar::one() - mu;
        if d.is_zero() {
            return Err(Error::Pole(format!("geometric ratio {mu} equals 1")));
        }
        c.checked_div(&d)
    }

    /// Exact quotient when the result is a polynomial; `None` otherwise.
    pub fn div_exact_poly(&self, o: &Scalar) -> Option<Scalar> {
        let q = self.checked_div(o).ok()?;
        q.is_polynomial().then_some(q)
    }
}

fn subst_poly(f: &Poly, map: &HashMap<Var, &Scalar>, root: Option<u32>) -> Result<Scalar> {
    // Fast path: every bound value is a polynomial, and monomial whenever
    // needed with a negative exponent.
    let fast = map.iter().all(|(v, s)| {
        s.den.is_one() && (s.num.is_monomial() || f.min_deg(*v) >= 0)
    });
    if fast {
        let mut pows: HashMap<(Var, i32), Poly> = HashMap::new();
        let mut acc = Vec::new();
        for (m, c) in f.terms() {
            let mut base = *m;
            let mut term = Poly::one();
            for (&v, s) in map {
                let e = m[v.idx()];
                base[v.idx()] = 0;
                if e == 0 {
                    continue;
                }
                let pw = pows.entry((v, e)).or_insert_with(|| {
                    if e > 0 {
                        s.num.pow(e as u32)
                    } else {
                        let (mm, cc) = &s.num.terms()[0];
                        Poly::monomial(mm.map(|x| x * e), cc.pow(e))
                    }
                });
                term = &term * &*pw;
            }
            acc.extend((&term * &Poly::monomial(base, c.clone())).terms().iter().cloned());
        }
        return Scalar::make(Poly::from_terms(acc), Poly::one(), root);
    }
    let mut total = Scalar::zero().with_root(root);
    let mut pows: HashMap<(Var, i32), Scalar> = HashMap::new();
    for (m, c) in f.terms() {
        let mut base = *m;
        let mut term = Scalar::one();
        for (&v, s) in map {
            let e = m[v.idx()];
            base[v.idx()] = 0;
            if e == 0 {
                continue;
            }
            if e < 0 && s.is_zero() {
                return Err(Error::DivisionByZero);
            }
            let pw = pows.entry((v, e)).or_insert_with(|| s.pow(e));
            term = &term * &*pw;
        }
        let rest = Scalar::from_poly(Poly::monomial(base, c.clone()));
        total = &total + &(&term * &rest);
    }
    Ok(total)
}

impl PartialEq for Scalar {
    fn eq(&self, o: &Scalar) -> bool {
        if self.root == o.root {
            return self.num == o.num && self.den == o.den;
        }
        (self - o).is_zero()
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        let root = merge_root(self.root, o.root);
        let (x, y) = (self.in_root(root), o.in_root(root));
        if x.den == y.den {
            return Scalar::make(&x.num + &y.num, x.den.clone(), root).unwrap();
        }
        if y.den.is_one() {
            return Scalar::make(&x.num + &(&y.num * &x.den), x.den.clone(), root).unwrap();
        }
        if x.den.is_one() {
            return Scalar::make(&(&x.num * &y.den) + &y.num, y.den.clone(), root).unwrap();
        }
        let g = gcd(&x.den, &y.den);
        let (ex, ey) = (x.den.div_known(&g), y.den.div_known(&g));
        let num = &(&x.num * &ey) + &(&y.num * &ex);
        let den = &(&g * &ex) * &ey;
        Scalar::make(num, den, root).unwrap()
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self + &(-o)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero().with_root(merge_root(self.root, o.root));
        }
        let root = merge_root(self.root, o.root);
        let (x, y) = (self.in_root(root), o.in_root(root));
        if x.den.is_one() && y.den.is_one() {
            return Scalar::make(&x.num * &y.num, Poly::one(), root).unwrap();
        }
        // Cancel cross factors first to keep the final gcd small.
        let g1 = if y.den.is_one() { Poly::one() } else { gcd(&x.num, &y.den) };
        let g2 = if x.den.is_one() { Poly::one() } else { gcd(&y.num, &x.den) };
        let n1 = x.num.div_known(&g1);
        let d2 = y.den.div_known(&g1);
        let n2 = y.num.div_known(&g2);
        let d1 = x.den.div_known(&g2);
        Scalar::make(&n1 * &n2, &d1 * &d2, root).unwrap()
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, o: &Scalar) -> Scalar {
        self.checked_div(o).expect("division by zero scalar")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::raw(-&self.num, self.den.clone(), self.root)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<Scalar> for Scalar { type Output = Scalar; fn $f(self, o: Scalar) -> Scalar { (&self).$f(&o) } }
        impl $tr<&Scalar> for Scalar { type Output = Scalar; fn $f(self, o: &Scalar) -> Scalar { (&self).$f(o) } }
        impl $tr<Scalar> for &Scalar { type Output = Scalar; fn $f(self, o: Scalar) -> Scalar { self.$f(&o) } }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl std::ops::AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        *self = &*self + o;
    }
}

impl std::ops::AddAssign<Scalar> for Scalar {
    fn add_assign(&mut self, o: Scalar) {
        *self = &*self + &o;
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(it: I) -> Scalar {
        it.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(it: I) -> Scalar {
        it.fold(Scalar::one(), |a, b| a * b)
    }
}

impl Zero for Scalar {
    fn zero() -> Scalar {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl One for Scalar {
    fn one() -> Scalar {
        Scalar::one()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Scalar {
        Scalar::int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Scalar {
        Scalar::rational(q)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            let n = if self.num.len() > 1 { format!("({})", self.num) } else { self.num.to_string() };
            write!(f, "{n}/({})", self.den)
        }
    }
}

/// The symbols of the working field and the derived parameters.
///
/// `γ = p^w c1 c2 / b` and `δ = p^w c1 c2 / a` are never stored as symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolSet {
    pub mode: PMode,
    pub r1: i32,
    pub r2: i32,
}

impl SymbolSet {
    pub fn new(mode: PMode, r1: i32, r2: i32) -> SymbolSet {
        SymbolSet { mode, r1, r2 }
    }

    pub fn w(&self) -> i32 {
        self.r1 + self.r2 + 3
    }

    /// Lift a polynomial into this mode.
    pub fn lift(&self, s: Scalar) -> Scalar {
        s.in_mode(self.mode)
    }

    pub fn p(&self) -> Scalar {
        self.p_pow(1)
    }

    pub fn p_pow(&self, e: i32) -> Scalar {
        match self.mode {
            PMode::Symbolic => Scalar::var_pow(Var::P, e),
            PMode::Numeric(p) => Scalar::rational(ppow(p, e)).in_mode(self.mode),
        }
    }

    /// `p^{k/2}`.
    pub fn p_half(&self, k: i32) -> Scalar {
        let r = k.rem_euclid(2);
        let base = self.p_pow((k - r) / 2);
        if r == 1 {
            &base * &self.sqrt_p()
        } else {
            base
        }
    }

    pub fn sqrt_p(&self) -> Scalar {
        Scalar::var(Var::S).in_mode(self.mode)
    }

    pub fn alpha(&self) -> Scalar {
        Scalar::var(Var::A).in_mode(self.mode)
    }

    pub fn beta(&self) -> Scalar {
        Scalar::var(Var::B).in_mode(self.mode)
    }

    pub fn chi1(&self) -> Scalar {
        Scalar::var(Var::C1).in_mode(self.mode)
    }

    pub fn chi2(&self) -> Scalar {
        Scalar::var(Var::C2).in_mode(self.mode)
    }

    /// Central character value `χ(p) = χ1(p) χ2(p)`.
    pub fn chi(&self) -> Scalar {
        &self.chi1() * &self.chi2()
    }

    pub fn gamma(&self) -> Scalar {
        &(&self.p_pow(self.w()) * &self.chi()) / &self.beta()
    }

    pub fn delta(&self) -> Scalar {
        &(&self.p_pow(self.w()) * &self.chi()) / &self.alpha()
    }

    /// `[α, β, γ, δ]`.
    pub fn params(&self) -> [Scalar; 4] {
        [self.alpha(), self.beta(), self.gamma(), self.delta()]
    }

    pub fn int(&self, n: i64) -> Scalar {
        Scalar::int(n).in_mode(self.mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: Var) -> Scalar {
        Scalar::var(x)
    }

    #[test]
    fn commutativity_cancels() {
        let x = &(&v(Var::A) * &v(Var::B)) - &(&v(Var::B) * &v(Var::A));
        assert!(x.is_zero());
    }

    #[test]
    fn sqrt_relation() {
        let s = v(Var::S);
        let x = &(&s * &s) / &v(Var::P);
        assert!(x.is_one());
        let y = &Scalar::one() / &(&Scalar::one() + &s);
        // (1 - S)/(1 - P)
        let expect = &(&Scalar::one() - &s) / &(&Scalar::one() - &v(Var::P));
        assert_eq!(y, expect);
    }

    #[test]
    fn conventions_relation() {
        for mode in [PMode::Symbolic, PMode::Numeric(3)] {
            let ss = SymbolSet::new(mode, 2, 1);
            let lhs = &ss.alpha() * &ss.delta();
            let rhs = &ss.beta() * &ss.gamma();
            assert!((&lhs - &rhs).is_zero());
        }
    }

    #[test]
    fn normal_form_cancels_common_factor() {
        let a = v(Var::A);
        let b = v(Var::B);
        let x = &(&(&a * &a) - &(&b * &b)) / &(&a - &b);
        assert_eq!(x, &a + &b);
        assert!(x.is_polynomial());
        assert_eq!(x.normalize().unwrap().to_string(), x.to_string());
    }

    #[test]
    fn specialize_p_binds_root() {
        let x = &v(Var::P) + &Scalar::one();
        let y = x.specialize(&[(Var::P, Scalar::int(2))]).unwrap();
        assert_eq!(y.as_rational(), Some(Rational::from_integer(3.into())));
        let s = v(Var::S).specialize(&[(Var::P, Scalar::int(2))]).unwrap();
        assert_eq!((&s * &s).as_rational(), Some(Rational::from_integer(2.into())));
    }

    #[test]
    fn specialize_gamma() {
        let ss = SymbolSet::new(PMode::Symbolic, 0, 0);
        let g = ss.gamma().specialize(&[(Var::P, Scalar::int(2))]).unwrap();
        let expect = &(&Scalar::int(8) * &ss.chi()) / &v(Var::B);
        assert_eq!(g, expect);
    }

    #[test]
    fn geom_sum_pole() {
        assert!(Scalar::geom_sum(&Scalar::one(), &Scalar::one()).is_err());
        assert!(Scalar::geom_sum(&Scalar::one(), &Scalar::zero()).unwrap().is_one());
    }
}
