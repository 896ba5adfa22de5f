//! Sparse multivariate Laurent polynomials over `Q`.
//!
//! Terms are kept sorted by exponent vector (lexicographic, `a` most
//! significant), with no zero coefficients, so structural equality is
//! mathematical equality.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::rational::{format_rational, Rational};

pub const NVARS: usize = 7;
pub type Mono = [i32; NVARS];

/// The symbols of the working field, in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    A = 0,
    B = 1,
    C1 = 2,
    C2 = 3,
    P = 4,
    S = 5,
    X = 6,
}

impl Var {
    pub const ALL: [Var; NVARS] = [Var::A, Var::B, Var::C1, Var::C2, Var::P, Var::S, Var::X];

    pub fn name(self) -> &'static str {
        match self {
            Var::A => "a",
            Var::B => "b",
            Var::C1 => "c1",
            Var::C2 => "c2",
            Var::P => "P",
            Var::S => "S",
            Var::X => "X",
        }
    }

    pub fn from_name(s: &str) -> Option<Var> {
        Var::ALL.into_iter().find(|v| v.name() == s)
    }

    pub fn idx(self) -> usize {
        self as usize
    }
}

pub const ZERO_MONO: Mono = [0; NVARS];

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(Mono, Rational)>,
}

fn mono_add(a: &Mono, b: &Mono) -> Mono {
    let mut r = *a;
    for i in 0..NVARS {
        r[i] += b[i];
    }
    r
}

fn mono_sub(a: &Mono, b: &Mono) -> Mono {
    let mut r = *a;
    for i in 0..NVARS {
        r[i] -= b[i];
    }
    r
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Poly {
        Poly::monomial(ZERO_MONO, c)
    }

    pub fn int(n: i64) -> Poly {
        Poly::constant(Rational::from_integer(n.into()))
    }

    pub fn monomial(m: Mono, c: Rational) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    pub fn var(v: Var) -> Poly {
        Poly::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: i32) -> Poly {
        let mut m = ZERO_MONO;
        m[v.idx()] = e;
        Poly::monomial(m, Rational::one())
    }

    /// Build from arbitrary terms, combining duplicates.
    pub fn from_terms(mut terms: Vec<(Mono, Rational)>) -> Poly {
        terms.sort_unstable_by(|x, y| x.0.cmp(&y.0));
        let mut out: Vec<(Mono, Rational)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 += c,
                _ => {
                    if let Some(last) = out.last() {
                        if last.1.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if out.last().is_some_and(|t| t.1.is_zero()) {
            out.pop();
        }
        Poly { terms: out }
    }

    pub fn terms(&self) -> &[(Mono, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == ZERO_MONO && self.terms[0].1.is_one()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(m, c)] if *m == ZERO_MONO => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Leading term in lex order.
    pub fn lead(&self) -> &(Mono, Rational) {
        self.terms.last().expect("lead of zero polynomial")
    }

    pub fn lead_coeff(&self) -> &Rational {
        &self.lead().1
    }

    pub fn occurs(&self, v: Var) -> bool {
        self.terms.iter().any(|(m, _)| m[v.idx()] != 0)
    }

    pub fn max_deg(&self, v: Var) -> i32 {
        self.terms.iter().map(|(m, _)| m[v.idx()]).max().unwrap_or(0)
    }

    pub fn min_deg(&self, v: Var) -> i32 {
        self.terms.iter().map(|(m, _)| m[v.idx()]).min().unwrap_or(0)
    }

    /// Per-variable minimum exponent.
    pub fn min_mono(&self) -> Mono {
        let mut r = ZERO_MONO;
        for (i, slot) in r.iter_mut().enumerate() {
            *slot = self.terms.iter().map(|(m, _)| m[i]).min().unwrap_or(0);
        }
        r
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.iter().all(|&e| e >= 0))
    }

    /// Multiply by the monomial `x^m`.
    pub fn shift(&self, m: &Mono) -> Poly {
        // Shifting preserves lex order.
        Poly { terms: self.terms.iter().map(|(e, c)| (mono_add(e, m), c.clone())).collect() }
    }

    /// Split into `(x^m, q)` with `q` a polynomial free of monomial factors.
    pub fn split_monomial(&self) -> (Mono, Poly) {
        let m = self.min_mono();
        let neg: Mono = m.map(|e| -e);
        (m, self.shift(&neg))
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect() }
    }

    /// Divide through by the leading coefficient.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = self.lead_coeff().recip();
        self.scale(&inv)
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Collect by powers of `v`: returns `(exponent, coefficient)` pairs in
    /// increasing exponent, coefficients free of `v`.
    pub fn coeffs_in(&self, v: Var) -> Vec<(i32, Poly)> {
        let i = v.idx();
        let mut buckets: std::collections::BTreeMap<i32, Vec<(Mono, Rational)>> = Default::default();
        for (m, c) in &self.terms {
            let mut m2 = *m;
            m2[i] = 0;
            buckets.entry(m[i]).or_default().push((m2, c.clone()));
        }
        buckets.into_iter().map(|(e, ts)| (e, Poly::from_terms(ts))).collect()
    }

    /// Coefficient of `v^e`.
    pub fn coeff_of(&self, v: Var, e: i32) -> Poly {
        let i = v.idx();
        let ts = self
            .terms
            .iter()
            .filter(|(m, _)| m[i] == e)
            .map(|(m, c)| {
                let mut m2 = *m;
                m2[i] = 0;
                (m2, c.clone())
            })
            .collect();
        Poly::from_terms(ts)
    }

    /// Substitute each variable by a polynomial-valued closure result.
    pub fn map_terms(&self, f: impl Fn(&Mono, &Rational) -> Poly) -> Poly {
        let mut acc = Vec::new();
        for (m, c) in &self.terms {
            acc.extend(f(m, c).terms);
        }
        Poly::from_terms(acc)
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if d.is_monomial() {
            let (m, c) = &d.terms[0];
            let neg = m.map(|e| -e);
            return Some(self.shift(&neg).scale(&c.recip()));
        }
        let (ma, a0) = self.split_monomial();
        let (md, d0) = d.split_monomial();
        let q0 = div_poly(&a0, &d0)?;
        Some(q0.shift(&mono_sub(&ma, &md)))
    }

    /// Divides exactly or panics; for quotients known to be exact.
    pub fn div_known(&self, d: &Poly) -> Poly {
        self.div_exact(d).expect("inexact polynomial division")
    }

    pub fn content_sign_positive(&self) -> bool {
        self.is_zero() || self.lead_coeff().is_positive()
    }

    /// Total number of variables occurring.
    pub fn vars(&self) -> Vec<Var> {
        Var::ALL.into_iter().filter(|&v| self.occurs(v)).collect()
    }
}

/// Long division of polynomials (non-negative exponents) under lex order.
fn div_poly(a: &Poly, d: &Poly) -> Option<Poly> {
    let (dm, dc) = d.lead().clone();
    let dc_inv = dc.recip();
    let mut r = a.clone();
    let mut q = Vec::new();
    let max_steps = 1_000_000usize;
    let mut steps = 0;
    while !r.is_zero() {
        steps += 1;
        if steps > max_steps {
            return None;
        }
        let (rm, rc) = r.lead().clone();
        let qm = mono_sub(&rm, &dm);
        if qm.iter().any(|&e| e < 0) {
            return None;
        }
        let qc = rc * &dc_inv;
        let t = Poly::monomial(qm, qc.clone());
        r = &r - &(&t * d);
        q.push((qm, qc));
    }
    Some(Poly::from_terms(q))
}

fn merge(a: &Poly, b: &Poly, sign: bool) -> Poly {
    let (x, y) = (&a.terms, &b.terms);
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        match x[i].0.cmp(&y[j].0) {
            std::cmp::Ordering::Less => {
                out.push(x[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push((y[j].0, if sign { y[j].1.clone() } else { -y[j].1.clone() }));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let c = if sign { &x[i].1 + &y[j].1 } else { &x[i].1 - &y[j].1 };
                if !c.is_zero() {
                    out.push((x[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend(x[i..].iter().cloned());
    out.extend(y[j..].iter().map(|(m, c)| (*m, if sign { c.clone() } else { -c.clone() })));
    Poly { terms: out }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        merge(self, o, true)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        merge(self, o, false)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        if o.is_monomial() {
            let (m, c) = &o.terms[0];
            return Poly { terms: self.terms.iter().map(|(e, x)| (mono_add(e, m), x * c)).collect() };
        }
        if self.is_monomial() {
            return o * self;
        }
        let mut acc = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                acc.push((mono_add(m1, m2), c1 * c2));
            }
        }
        Poly::from_terms(acc)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

macro_rules! owned_ops {
    ($t:ty, $($tr:ident $f:ident),*) => {$(
        impl $tr<$t> for $t { type Output = $t; fn $f(self, o: $t) -> $t { (&self).$f(&o) } }
        impl $tr<&$t> for $t { type Output = $t; fn $f(self, o: &$t) -> $t { (&self).$f(o) } }
        impl $tr<$t> for &$t { type Output = $t; fn $f(self, o: $t) -> $t { self.$f(&o) } }
    )*};
}
owned_ops!(Poly, Add add, Sub sub, Mul mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

// ---------------------------------------------------------------------------
// gcd

/// Greatest common divisor in the Laurent ring, normalized to be a monic
/// polynomial free of monomial factors (monomials are units).
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return normalize_gcd(b);
    }
    if b.is_zero() {
        return normalize_gcd(a);
    }
    let (_, a0) = a.split_monomial();
    let (_, b0) = b.split_monomial();
    normalize_gcd(&gcd_poly(&a0, &b0))
}

fn normalize_gcd(a: &Poly) -> Poly {
    if a.is_zero() {
        return Poly::zero();
    }
    a.split_monomial().1.monic()
}

fn gcd_poly(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let (_, a) = a.split_monomial();
    let (_, b) = b.split_monomial();
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let am = a.monic();
    let bm = b.monic();
    if am == bm {
        return am;
    }
    if a.len() <= b.len() {
        if b.div_exact(&a).is_some() {
            return am;
        }
    } else if a.div_exact(&b).is_some() {
        return bm;
    }
    // A variable in which the gcd has degree 0 reduces the problem to contents.
    if let Some(w) = Var::ALL.into_iter().find(|&w| a.occurs(w) && b.occurs(w) && image_gcd_degree(&a, &b, w) == Some(0)) {
        return gcd_poly(&content(&a, w), &content(&b, w));
    }
    let v = Var::ALL.into_iter().find(|&v| a.occurs(v) || b.occurs(v)).expect("non-constant");
    if !a.occurs(v) {
        return gcd_poly(&a, &content(&b, v));
    }
    if !b.occurs(v) {
        return gcd_poly(&content(&a, v), &b);
    }
    let ca = content(&a, v);
    let cb = content(&b, v);
    let gc = gcd_poly(&ca, &cb);
    let pa = a.div_known(&ca);
    let pb = b.div_known(&cb);
    let g = prs(&pa, &pb, v);
    (&gc * &g).monic()
}

/// Values for the variables other than the main one when taking images.
const POINTS: [[i64; NVARS]; 3] = [
    [3, 5, 7, 11, 13, 17, 19],
    [23, 29, 31, 37, 41, 43, 47],
    [-53, 59, -61, 67, -71, 73, -79],
];

/// `a` as a dense univariate polynomial in `v` over `Q`, every other variable bound by `pt`.
fn image(a: &Poly, v: Var, pt: &[i64; NVARS]) -> Vec<Rational> {
    let lo = a.min_deg(v);
    let mut out = vec![Rational::zero(); (a.max_deg(v) - lo + 1) as usize];
    for (m, c) in &a.terms {
        let mut x = c.clone();
        for w in Var::ALL.into_iter().filter(|&w| w != v) {
            let e = m[w.idx()];
            if e != 0 {
                x *= num_traits::pow::Pow::pow(Rational::from_integer(pt[w.idx()].into()), e);
            }
        }
        out[(m[v.idx()] - lo) as usize] += x;
    }
    out
}

fn udegree(u: &[Rational]) -> Option<usize> {
    u.iter().rposition(|c| !c.is_zero())
}

/// Euclid over `Q`; returns the degree of the gcd.
fn qgcd_degree(mut a: Vec<Rational>, mut b: Vec<Rational>) -> usize {
    loop {
        let Some(db) = udegree(&b) else { return udegree(&a).unwrap_or(0) };
        if db == 0 {
            return 0;
        }
        b.truncate(db + 1);
        let lb = b[db].clone();
        while let Some(da) = udegree(&a).filter(|&da| da >= db) {
            let q = &a[da] / &lb;
            for i in 0..=db {
                let t = &q * &b[i];
                a[da - db + i] -= t;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
}

/// An upper bound for `deg_v gcd(a, b)` from an image where neither leading
/// coefficient in `v` vanishes; `None` if every tried point is unlucky.
fn image_gcd_degree(a: &Poly, b: &Poly, v: Var) -> Option<usize> {
    let (da, db) = ((a.max_deg(v) - a.min_deg(v)) as usize, (b.max_deg(v) - b.min_deg(v)) as usize);
    POINTS.iter().find_map(|pt| {
        let (ia, ib) = (image(a, v, pt), image(b, v, pt));
        (udegree(&ia) == Some(da) && udegree(&ib) == Some(db)).then(|| qgcd_degree(ia, ib))
    })
}

/// gcd of the coefficients of `a` viewed as a polynomial in `v`.
fn content(a: &Poly, v: Var) -> Poly {
    let cs = a.coeffs_in(v);
    let mut g = Poly::zero();
    for (_, c) in cs {
        g = if g.is_zero() { normalize_gcd(&c) } else { gcd_poly(&g, &c) };
        if g.is_one() {
            break;
        }
    }
    g
}

type UPoly = Vec<Poly>;

fn to_upoly(a: &Poly, v: Var) -> UPoly {
    let cs = a.coeffs_in(v);
    let deg = cs.last().map(|c| c.0).unwrap_or(0);
    assert!(cs.first().map(|c| c.0 >= 0).unwrap_or(true));
    let mut out = vec![Poly::zero(); (deg + 1) as usize];
    for (e, c) in cs {
        out[e as usize] = c;
    }
    out
}

fn from_upoly(u: &UPoly, v: Var) -> Poly {
    let mut acc = Vec::new();
    for (e, c) in u.iter().enumerate() {
        let s = Poly::var_pow(v, e as i32);
        acc.extend((c * &s).terms);
    }
    Poly::from_terms(acc)
}

fn trim(u: &mut UPoly) {
    while u.len() > 1 && u.last().is_some_and(|c| c.is_zero()) {
        u.pop();
    }
}

fn udeg(u: &UPoly) -> usize {
    u.len() - 1
}

fn uis_zero(u: &UPoly) -> bool {
    u.iter().all(|c| c.is_zero())
}

/// Pseudo-remainder `lc(b)^{deg a - deg b + 1} a mod b`.
fn prem(a: &UPoly, b: &UPoly) -> UPoly {
    let mut r = a.clone();
    let db = udeg(b);
    let lb = b[db].clone();
    while !uis_zero(&r) && udeg(&r) >= db {
        let dr = udeg(&r);
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = &*c * &lb;
        }
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] = &r[i + shift] - &(&lr * bc);
        }
        r.pop();
        if r.is_empty() {
            r.push(Poly::zero());
        }
        trim(&mut r);
    }
    r
}

fn uprimitive(u: &UPoly) -> UPoly {
    let mut g = Poly::zero();
    for c in u {
        if c.is_zero() {
            continue;
        }
        g = if g.is_zero() { normalize_gcd(c) } else { gcd_poly(&g, c) };
        if g.is_one() {
            break;
        }
    }
    let mut out: UPoly = if g.is_one() || g.is_zero() { u.clone() } else { u.iter().map(|c| c.div_known(&g)).collect() };
    // Normalize the rational scale: leading coefficient monic in lex.
    if let Some(l) = out.iter().rev().find(|c| !c.is_zero()) {
        let inv = l.lead_coeff().recip();
        for c in out.iter_mut() {
            *c = c.scale(&inv);
        }
    }
    out
}

fn prs(a: &Poly, b: &Poly, v: Var) -> Poly {
    let mut x = to_upoly(a, v);
    let mut y = to_upoly(b, v);
    if udeg(&x) < udeg(&y) {
        std::mem::swap(&mut x, &mut y);
    }
    x = uprimitive(&x);
    y = uprimitive(&y);
    loop {
        let r = prem(&x, &y);
        if uis_zero(&r) {
            break;
        }
        if udeg(&r) == 0 {
            return Poly::one();
        }
        x = y;
        y = uprimitive(&r);
    }
    from_upoly(&uprimitive(&y), v).monic()
}

// ---------------------------------------------------------------------------
// text form

fn fmt_mono(m: &Mono) -> String {
    let mut parts = Vec::new();
    for v in Var::ALL {
        let e = m[v.idx()];
        match e {
            0 => {}
            1 => parts.push(v.name().to_string()),
            _ => parts.push(format!("{}^{}", v.name(), e)),
        }
    }
    parts.join("*")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Highest term first.
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let ms = fmt_mono(m);
            if ms.is_empty() {
                write!(f, "{}", format_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{ms}")?;
            } else {
                write!(f, "{}*{ms}", format_rational(&abs))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Poly {
        Poly::var(Var::A)
    }
    fn b() -> Poly {
        Poly::var(Var::B)
    }
    fn p() -> Poly {
        Poly::var(Var::P)
    }

    #[test]
    fn ring_basics() {
        let x = &a() * &b() - &b() * &a();
        assert!(x.is_zero());
        let s = (a() + b()).pow(2);
        assert_eq!(s, &(&a() * &a() + &(&a() * &b()).scale(&Rational::from_integer(2.into()))) + &(&b() * &b()));
    }

    #[test]
    fn exact_division() {
        let f = (a() - b()) * (a() + p()) * Poly::var_pow(Var::C1, -2);
        let q = f.div_exact(&(a() - b())).unwrap();
        assert_eq!(q, (a() + p()) * Poly::var_pow(Var::C1, -2));
        assert!((a() + Poly::one()).div_exact(&(a() - Poly::one())).is_none());
    }

    #[test]
    fn gcd_finds_common_factor() {
        let g0 = a() * b() - p();
        let f = &g0 * &(a() + Poly::int(3));
        let h = &g0 * &(b() * b() - a());
        let g = gcd(&f, &h);
        assert_eq!(g, g0.monic());
        assert!(gcd(&(a() + Poly::one()), &(a() - Poly::one())).is_one());
    }

    #[test]
    fn gcd_ignores_monomials() {
        let f = a() * b() * (a() - p());
        let h = a() * a() * (a() - p()) * (b() + Poly::one());
        assert_eq!(gcd(&f, &h), (a() - p()).monic());
    }

    #[test]
    fn display_is_stable() {
        let f = a() * a() - b().scale(&Rational::new(3.into(), 2.into())) + Poly::one();
        assert_eq!(f.to_string(), "a^2 - 3/2*b + 1");
    }
}
