//! Arithmetic of the Hecke parameters at `p`: the Hecke polynomial, valuation
//! estimates and ordinarity, the trivial-zero and crystalline-Frobenius
//! conditions, Euler factors and the constants of the regulator formula.
//!
//! Floating point appears only in [`weil_check`].

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::rational::{parse_rational, ppow, rat, to_f64, valuation};
use crate::scalar::{Rational, Scalar, SymbolSet};

/// `(1 - p^m/α)(1 - p^m/β)(1 - γ/p^{m+1})(1 - δ/p^{m+1})` for parameters `[α, β, γ, δ]`.
pub fn euler_factor(params: &[Scalar; 4], m: i32, ss: &SymbolSet) -> Scalar {
    let one = ss.int(1);
    let pm = ss.p_pow(m);
    let pm1 = ss.p_pow(m + 1);
    let [a, b, g, d] = params;
    [&one - &(&pm / a), &one - &(&pm / b), &one - &(g / &pm1), &one - &(d / &pm1)].into_iter().product()
}

/// Parameters of `Π × χ2⁻¹`: each of `α, β, γ, δ` divided by `χ2(p)`.
pub fn twisted_params(ss: &SymbolSet) -> [Scalar; 4] {
    let c2 = ss.chi2();
    ss.params().map(|x| &x / &c2)
}

/// The same product written through the Hecke polynomial
/// `P(X) = Π (1 - μX)` and `Q(t) = (1 - t/α)(1 - t/β)`:
/// `Q(p^n) · P(p^{-n-1}) / ((1 - α/p^{n+1})(1 - β/p^{n+1}))`.
pub fn euler_factor_via_hecke_polynomial(params: &[Scalar; 4], n: i32, ss: &SymbolSet) -> Scalar {
    let one = ss.int(1);
    let x = ss.p_pow(-n - 1);
    let pn = ss.p_pow(n);
    let hecke: Scalar = params.iter().map(|mu| &one - &(mu * &x)).product();
    let q = &(&one - &(&pn / &params[0])) * &(&one - &(&pn / &params[1]));
    let ab = &(&one - &(&params[0] * &x)) * &(&one - &(&params[1] * &x));
    &(&q * &hecke) / &ab
}

/// The four Euler factors entering the Klingen zeta value and the regulator formula.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerFactors {
    /// `ℰ(π, q)`.
    pub local: Scalar,
    /// `ℰ(π × χ2⁻¹, r2 + 1 + r)`.
    pub local_twisted: Scalar,
    /// `ℰ_p(Π, q)`.
    pub global: Scalar,
    /// `ℰ_p(Π × χ2⁻¹, r2 + 1 + r)`.
    pub global_twisted: Scalar,
}

pub fn euler_factors(q: i32, r: i32, ss: &SymbolSet) -> Result<EulerFactors> {
    check_qr(q, r, ss.r1, ss.r2)?;
    let m = ss.r2 + 1 + r;
    let params = ss.params();
    let tw = twisted_params(ss);
    Ok(EulerFactors {
        local: euler_factor(&params, q, ss),
        local_twisted: euler_factor(&tw, m, ss),
        global: euler_factor_via_hecke_polynomial(&params, q, ss),
        global_twisted: euler_factor_via_hecke_polynomial(&tw, m, ss),
    })
}

/// `0 ≤ q ≤ r2 ≤ r1` and `0 ≤ r ≤ r1 - r2`.
pub fn check_qr(q: i32, r: i32, r1: i32, r2: i32) -> Result<()> {
    if !(0 <= q && q <= r2 && r2 <= r1 && 0 <= r && r <= r1 - r2) {
        return Err(Error::Range(format!("need 0 ≤ q ≤ r2 ≤ r1 and 0 ≤ r ≤ r1 - r2, got q={q} r={r} r1={r1} r2={r2}")));
    }
    Ok(())
}

/// `(-2)^q (-1)^{r2-q+1} (r2-q)!`.
pub fn regulator_constant(q: i32, r2: i32) -> Result<Rational> {
    if q < 0 || q > r2 {
        return Err(Error::Range(format!("need 0 ≤ q ≤ r2, got q={q} r2={r2}")));
    }
    let fact: BigInt = (1..=(r2 - q) as i64).map(BigInt::from).product();
    let sign = if (r2 - q + 1) % 2 == 0 { 1 } else { -1 };
    Ok(Rational::from_integer(BigInt::from(-2).pow(q as u32) * fact * sign))
}

/// Residual of the regulator bookkeeping for Klingen test data:
/// `C/(ℰ_p(Π, q) ℰ_p(Π × χ2⁻¹, r2+1+r)) · Z̃ - C · p³/((p+1)²(p-1)) / ((1 - γ/p^{1+q})(1 - δ/p^{1+q}))`
/// with `C` the regulator constant. `drop_power_of_two` removes `(-2)^q`
/// from the first `C` only, as a negative control.
pub fn regulator_consistency_residual(q: i32, r: i32, ss: &SymbolSet, drop_power_of_two: bool) -> Result<Scalar> {
    let c = regulator_constant(q, ss.r2)?;
    let c_used = if drop_power_of_two { &c / Rational::from_integer(BigInt::from(-2).pow(q as u32)) } else { c.clone() };
    let e = euler_factors(q, r, ss)?;
    let datum = crate::zeta::NamedTestDatum::new(crate::zeta::TestDatumTag::KlingenCritCrit, q, r);
    let z = crate::zeta::assemble_ztilde(&datum, ss)?;
    let lhs = (&z / &(&e.global * &e.global_twisted)).scale(&c_used);
    let rhs = (&crate::zeta::measure_constant(ss) * &crate::zeta::displayed::crit_crit(q, ss)).scale(&c);
    Ok(&lhs - &rhs)
}

/// Numeric Hecke polynomial `P(X) = 1 + c1 X + ... + c4 X^4` with its weight data.
#[derive(Clone, Debug, PartialEq)]
pub struct HeckePolynomial {
    pub p: u32,
    pub r1: i32,
    pub r2: i32,
    /// `χ_Π(p)`.
    pub chi_p: Rational,
    /// Coefficients `[1, c1, c2, c3, c4]`, lowest degree first.
    pub coeffs: Vec<Rational>,
}

/// The ingestion format: rationals as strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeckePolynomialJson {
    pub p: u32,
    pub r1: i32,
    pub r2: i32,
    pub chi_p: String,
    pub hecke_poly: Vec<String>,
}

impl HeckePolynomial {
    pub fn w(&self) -> i32 {
        self.r1 + self.r2 + 3
    }

    /// `Π (1 - μX)` over the given parameters.
    pub fn from_params(p: u32, r1: i32, r2: i32, chi_p: Rational, params: &[Rational; 4]) -> HeckePolynomial {
        let mut coeffs = vec![rat(1)];
        for mu in params {
            let mut next = vec![Rational::zero(); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i] += c;
                next[i + 1] -= c * mu;
            }
            coeffs = next;
        }
        HeckePolynomial { p, r1, r2, chi_p, coeffs }
    }

    pub fn from_json(text: &str) -> Result<HeckePolynomial> {
        let j: HeckePolynomialJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if j.hecke_poly.len() != 5 {
            return Err(Error::Parse(format!("expected 5 coefficients, got {}", j.hecke_poly.len())));
        }
        let coeffs = j.hecke_poly.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        if !coeffs[0].is_one() {
            return Err(Error::Parse("constant coefficient must be 1".into()));
        }
        Ok(HeckePolynomial { p: j.p, r1: j.r1, r2: j.r2, chi_p: parse_rational(&j.chi_p)?, coeffs })
    }

    /// `c_{4-i} = c_i (p^w χ)^{2-i}`, the shape forced by `αδ = βγ = p^w χ`.
    pub fn satisfies_functional_equation(&self) -> bool {
        let k = ppow(self.p, self.w()) * &self.chi_p;
        let c = &self.coeffs;
        c.len() == 5 && c[4] == &c[0] * &k * &k && c[3] == &c[1] * &k
    }

    /// Roots of `X^4 P(1/X)`, i.e. the Hecke parameters, when all are rational.
    fn rational_parameters(&self) -> Result<Vec<Rational>> {
        let rev: Vec<Rational> = self.coeffs.iter().rev().cloned().collect();
        let roots = rational_roots(&rev)?;
        if roots.len() != 4 {
            return Err(Error::Unsupported(
                "Hecke polynomial does not split over Q; supply parameters in an extension field".into(),
            ));
        }
        Ok(roots)
    }
}

/// Symbolic coefficients `[1, -e1, e2, -e3, e4]` of `Π (1 - μX)`.
pub fn symbolic_hecke_coefficients(ss: &SymbolSet) -> Vec<Scalar> {
    let mut coeffs = vec![ss.int(1)];
    for mu in ss.params() {
        let mut next = vec![Scalar::zero(); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i] += c;
            next[i + 1] += &(-(c * &mu));
        }
        coeffs = next;
    }
    coeffs
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let n = n.abs();
    let Some(mut m) = n.to_u128() else {
        return Err(Error::Unsupported("coefficient too large for rational root search".into()));
    };
    let mut primes: Vec<(u128, u32)> = Vec::new();
    let mut d = 2u128;
    while d * d <= m {
        if m % d == 0 {
            let mut e = 0;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            primes.push((d, e));
        }
        d += 1;
        if d > 10_000_000 {
            return Err(Error::Unsupported("coefficient too hard to factor".into()));
        }
    }
    if m > 1 {
        primes.push((m, 1));
    }
    let mut out = vec![BigInt::one()];
    for (q, e) in primes {
        let mut next = Vec::new();
        for x in &out {
            let mut pw = BigInt::one();
            for _ in 0..=e {
                next.push(x * &pw);
                pw *= BigInt::from(q);
            }
        }
        out = next;
    }
    Ok(out)
}

fn eval_poly(c: &[Rational], x: &Rational) -> Rational {
    c.iter().rev().fold(Rational::zero(), |acc, k| acc * x + k)
}

fn deflate(c: &[Rational], x: &Rational) -> Vec<Rational> {
    let n = c.len() - 1;
    let mut out = vec![Rational::zero(); n];
    let mut carry = Rational::zero();
    for i in (0..n).rev() {
        carry = &c[i + 1] + &carry * x;
        out[i] = carry.clone();
    }
    out
}

/// Rational roots with multiplicity of a polynomial given lowest degree first.
pub fn rational_roots(c: &[Rational]) -> Result<Vec<Rational>> {
    let lcm = c.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let mut ints: Vec<Rational> = c.iter().map(|q| q * Rational::from_integer(lcm.clone())).collect();
    while ints.last().is_some_and(|x| x.is_zero()) {
        ints.pop();
    }
    let mut roots = Vec::new();
    while ints.len() > 1 && ints[0].is_zero() {
        roots.push(Rational::zero());
        ints.remove(0);
    }
    if ints.len() <= 1 {
        return Ok(roots);
    }
    let nums = divisors(ints[0].numer())?;
    let dens = divisors(ints.last().unwrap().numer())?;
    let mut cands: Vec<Rational> = Vec::new();
    for n in &nums {
        for d in &dens {
            for s in [1, -1] {
                cands.push(Rational::new(n * s, d.clone()));
            }
        }
    }
    cands.sort();
    cands.dedup();
    for x in cands {
        while ints.len() > 1 && eval_poly(&ints, &x).is_zero() {
            ints = deflate(&ints, &x);
            roots.push(x.clone());
        }
    }
    Ok(roots)
}

/// Hecke parameters ordered by p-adic valuation, `v_p(α) ≤ ... ≤ v_p(δ)`,
/// with `αδ = βγ = p^w χ(p)` verified.
pub fn hecke_parameters(hp: &HeckePolynomial) -> Result<[Rational; 4]> {
    let mut roots = hp.rational_parameters()?;
    if roots.iter().any(|r| r.is_zero()) {
        return Err(Error::Hypothesis("zero Hecke parameter".into()));
    }
    roots.sort_by_key(|r| (valuation(r, hp.p).unwrap(), r.clone()));
    let k = ppow(hp.p, hp.w()) * &hp.chi_p;
    let [a, b, g, d]: [Rational; 4] = roots.try_into().map_err(|_| Error::Unsupported("degree".into()))?;
    if &a * &d != k || &b * &g != k {
        return Err(Error::Hypothesis(format!("parameters {a}, {b}, {g}, {d} violate αδ = βγ = p^w χ(p)")));
    }
    Ok([a, b, g, d])
}

/// Valuations, sorted, with ordinarity flags.
#[derive(Clone, Debug, PartialEq)]
pub struct OrdinarityReport {
    pub valuations: [Rational; 4],
    pub siegel: bool,
    pub klingen: bool,
    pub borel: bool,
    /// Failures of `v_p(α) ≥ 0` and `v_p(αβ) ≥ r2 + 1`.
    pub violations: Vec<String>,
}

/// Ordinarity from the valuations of the four parameters (in any order).
pub fn ordinarity(valuations: &[Rational; 4], r2: i32) -> OrdinarityReport {
    let mut v = valuations.clone();
    v.sort();
    let ab = &v[0] + &v[1];
    let bound = rat(r2 as i64 + 1);
    let mut violations = Vec::new();
    if v[0] < Rational::zero() {
        violations.push(format!("v_p(α) = {} < 0", v[0]));
    }
    if ab < bound {
        violations.push(format!("v_p(αβ) = {ab} < r2 + 1 = {bound}"));
    }
    let siegel = v[0].is_zero();
    let klingen = ab == bound;
    OrdinarityReport { valuations: v, siegel, klingen, borel: siegel && klingen, violations }
}

pub fn valuations_of(params: &[Rational; 4], p: u32) -> Result<[Rational; 4]> {
    let mut out: [Rational; 4] = Default::default();
    for (o, x) in out.iter_mut().zip(params) {
        *o = rat(valuation(x, p).ok_or_else(|| Error::Hypothesis("zero Hecke parameter".into()))? as i64);
    }
    Ok(out)
}

/// No parameter has the form `p^n ζ`. Decided by the valuation gap: under
/// Klingen ordinarity `α, β` have valuation at most `r2 + 1 ≤ (w-1)/2` and
/// `γ, δ` at least `r1 + 2 ≥ (w+1)/2`, while such a Weil number would have
/// valuation exactly `w/2`.
pub fn check_trivzero(valuations: &[Rational; 4], r1: i32, r2: i32) -> Result<bool> {
    let rep = ordinarity(valuations, r2);
    if !rep.klingen || !rep.violations.is_empty() {
        return Err(Error::Hypothesis("trivial-zero check needs a Klingen-ordinary input".into()));
    }
    let w = r1 + r2 + 3;
    if w % 2 != 0 {
        return Ok(true);
    }
    let half = rat((w / 2) as i64);
    Ok(rep.valuations.iter().all(|v| *v != half))
}

/// Direct test on a rational parameter: is it `±p^n`?
pub fn is_p_power_times_root_of_unity(mu: &Rational, p: u32) -> bool {
    match valuation(mu, p) {
        None => false,
        Some(v) => {
            let u = mu.abs() * ppow(p, -v);
            u.is_one()
        }
    }
}

/// Result of [`weil_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeilCertificate {
    pub holds: bool,
    /// Largest `||μ| - p^{w/2}| / p^{w/2}` over the roots.
    pub max_relative_deviation: f64,
    pub tolerance: f64,
}

pub const WEIL_TOLERANCE: f64 = 1e-9;

/// How the condition `{α, β, γ, δ} ∩ {1, p, ..., p^{r2+1}} = ∅` was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FontaineVerdict {
    /// By absolute values: `(r1 + r2 + 3)/2 > r2 + 1`.
    ByWeilArgument(bool),
    /// By testing membership of rational parameters.
    Direct(bool),
}

impl FontaineVerdict {
    pub fn holds(self) -> bool {
        match self {
            FontaineVerdict::ByWeilArgument(b) | FontaineVerdict::Direct(b) => b,
        }
    }
}

/// Bijectivity of `1 - φ` and `1 - pφ` on the twisted crystalline module.
/// Pass `params = None` in symbolic mode.
pub fn check_fontaine_condition(
    params: Option<&[Rational; 4]>,
    certificate: Option<&WeilCertificate>,
    p: u32,
    r1: i32,
    r2: i32,
) -> Result<FontaineVerdict> {
    if certificate.is_some_and(|c| c.holds) {
        return Ok(FontaineVerdict::ByWeilArgument(r1 + r2 + 3 > 2 * (r2 + 1)));
    }
    match params {
        Some(ps) => {
            let bad = (0..=r2 + 1).map(|k| ppow(p, k)).any(|x| ps.contains(&x));
            Ok(FontaineVerdict::Direct(!bad))
        }
        None if certificate.is_none() => Ok(FontaineVerdict::ByWeilArgument(r1 + r2 + 3 > 2 * (r2 + 1))),
        None => Err(Error::Inconclusive("no parameters and no Weil certificate".into())),
    }
}

fn poly_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let trim = |mut v: Vec<Rational>| {
        while v.last().is_some_and(|x| x.is_zero()) {
            v.pop();
        }
        v
    };
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let mut r = a.clone();
        while r.len() >= b.len() {
            let k = r.last().unwrap() / b.last().unwrap();
            let shift = r.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                r[i + shift] -= &k * c;
            }
            r = trim(r);
            if r.is_empty() {
                break;
            }
        }
        a = b;
        b = r;
    }
    a
}

fn poly_div(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    let mut q = vec![Rational::zero(); a.len() + 1 - b.len()];
    for shift in (0..q.len()).rev() {
        let k = &r[shift + b.len() - 1] / b.last().unwrap();
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= &k * c;
        }
        q[shift] = k;
    }
    q
}

/// Complex roots of a squarefree polynomial (lowest degree first) by
/// simultaneous (Weierstrass–Durand–Kerner) iteration.
pub fn complex_roots(c: &[f64]) -> Result<Vec<Complex64>> {
    let n = c.len() - 1;
    if n == 0 {
        return Ok(vec![]);
    }
    let lead = c[n];
    let monic: Vec<f64> = c.iter().map(|x| x / lead).collect();
    let radius = 1.0 + monic[..n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    let eval = |x: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, k| acc * x + k);
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm() / z[i].norm().max(1.0));
        }
        if delta < 1e-15 {
            return Ok(z);
        }
    }
    Err(Error::NoConvergence)
}

/// Every Hecke parameter has complex absolute value `p^{w/2}`, to relative tolerance `1e-9`.
pub fn weil_check(hp: &HeckePolynomial) -> Result<WeilCertificate> {
    let rev: Vec<Rational> = hp.coeffs.iter().rev().cloned().collect();
    let deriv: Vec<Rational> = rev.iter().enumerate().skip(1).map(|(i, c)| c * rat(i as i64)).collect();
    let g = poly_gcd(&rev, &deriv);
    let sqfree = if g.len() > 1 { poly_div(&rev, &g) } else { rev };
    let roots = complex_roots(&sqfree.iter().map(to_f64).collect::<Vec<_>>())?;
    let target = (hp.p as f64).powf(hp.w() as f64 / 2.0);
    let dev = roots.iter().map(|z| (z.norm() - target).abs() / target).fold(0.0, f64::max);
    Ok(WeilCertificate { holds: dev < WEIL_TOLERANCE, max_relative_deviation: dev, tolerance: WEIL_TOLERANCE })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::PMode;

    #[test]
    fn regulator_values() {
        assert_eq!(regulator_constant(0, 0).unwrap(), rat(-1));
        assert_eq!(regulator_constant(1, 1).unwrap(), rat(2));
        assert_eq!(regulator_constant(0, 2).unwrap(), rat(-2));
        assert!(regulator_constant(2, 1).is_err());
    }

    #[test]
    fn euler_routes_agree() {
        let ss = SymbolSet::new(PMode::Symbolic, 2, 1);
        let e = euler_factors(1, 1, &ss).unwrap();
        assert_eq!(e.local, e.global);
        assert_eq!(e.local_twisted, e.global_twisted);
    }

    #[test]
    fn rational_roots_with_multiplicity() {
        let c = [rat(-8), rat(12), rat(-6), rat(1)];
        assert_eq!(rational_roots(&c).unwrap(), vec![rat(2), rat(2), rat(2)]);
    }
}
