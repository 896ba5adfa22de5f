//! Whittaker-model values.
//!
//! The spherical Whittaker function is given on the torus by the
//! Casselman–Shalika formula. Values of Hecke translates are obtained by
//! expanding `W(g g_i)` through `g g_i = n t k` as `ψ(n) W(t k)`.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use crate::coset::{decompose_double_coset, flag_key, Level};
use crate::error::{Error, Result};
use crate::group::{
    delta_half_exp2, iwasawa_ntk, lambda_delta_half, x12, x23, GroupElement, Root, RootDatum, TorusElement, UnramifiedTorusCharacter,
    WeylElement,
};
use crate::induced::{HeckeElement, InducedVector, PrincipalSeries};
use crate::linalg::Matrix;
use crate::scalar::rational::frac_p;
use crate::scalar::{Cyclotomic, Rational, Scalar, SymbolSet};

/// `z^μ = Λ(μ(p))` for the Satake parameter of the induced model.
fn satake_monomial(mu: [i32; 3], ss: &SymbolSet) -> Scalar {
    UnramifiedTorusCharacter::from_params(ss).eval(&TorusElement::from_exps(mu))
}

/// `t` is in the support of a `ψ`-Whittaker function: `|α(t)| ≤ 1` on simple roots.
pub fn is_whittaker_dominant(t: &TorusElement) -> bool {
    RootDatum::is_dominant(t)
}

/// Spherical Whittaker value `W(t)`, normalized by `W(1) = 1`:
/// `δ^{1/2}(t) Σ_w ε(w) z^{w(λ+ρ)-ρ} / Σ_w ε(w) z^{wρ-ρ}`.
pub fn cs_gsp4(t: &TorusElement, ss: &SymbolSet) -> Scalar {
    if !is_whittaker_dominant(t) {
        return ss.int(0);
    }
    let lam = t.exps();
    let rho2 = RootDatum::two_rho_check();
    let alt = |shift: [i32; 3]| -> Scalar {
        WeylElement::group()
            .iter()
            .map(|w| {
                let v = w.apply(std::array::from_fn(|i| 2 * shift[i] + rho2[i]));
                let mu: [i32; 3] = std::array::from_fn(|i| (v[i] - rho2[i]) / 2);
                satake_monomial(mu, ss).scale(&Rational::from_integer(w.sign.into()))
            })
            .sum()
    };
    let num = alt(lam);
    let den = alt([0, 0, 0]);
    &(&num / &den) * &ss.p_half(delta_half_exp2(t))
}

/// `W_{φ}(1)` for the spherical section `φ` of the induced model with
/// `φ(1) = 1`: `Π_{α > 0} (1 - p⁻¹ Λ(α∨(p)))`.
pub fn cs_constant(ss: &SymbolSet) -> Scalar {
    let ch = UnramifiedTorusCharacter::from_params(ss);
    let pinv = ss.p_pow(-1);
    Root::ALL
        .iter()
        .map(|r| {
            let z = ch.eval(&TorusElement::from_exps(r.coroot()));
            &ss.int(1) - &(&pinv * &z)
        })
        .product()
}

/// `W(diag(p^n, 1))` for the spherical `GL2` vector with Satake data `{α, β}`:
/// `p^{-n(r1+r2+4)/2} Σ_{i+j=n} α^i β^j`.
pub fn cs_gl2(n: i32, ss: &SymbolSet) -> Scalar {
    if n < 0 {
        return ss.int(0);
    }
    let (a, b) = (ss.alpha(), ss.beta());
    let h: Scalar = (0..=n).map(|i| &a.pow(i) * &b.pow(n - i)).sum();
    &h * &ss.p_half(-n * (ss.r1 + ss.r2 + 4))
}

/// A sum `Σ_r c_r ψ(r)` kept by `ψ`-argument `r ∈ Q_p/Z_p`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PsiSum {
    terms: BTreeMap<Rational, Scalar>,
}

impl PsiSum {
    pub fn constant(c: Scalar) -> PsiSum {
        let mut s = PsiSum::default();
        s.push(Rational::from_integer(0.into()), c);
        s
    }

    fn push(&mut self, r: Rational, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(r).or_insert_with(Scalar::zero);
        *e += &c;
        if e.is_zero() {
            let k = self.terms.iter().find(|(_, v)| v.is_zero()).map(|(k, _)| k.clone());
            if let Some(k) = k {
                self.terms.remove(&k);
            }
        }
    }

    fn add_shifted(&mut self, o: &PsiSum, shift: &Rational, c: &Scalar, p: u32) {
        for (r, v) in &o.terms {
            self.push(frac_p(&(r + shift), p), v * c);
        }
    }

    pub fn to_cyclotomic(&self, p: u32) -> Cyclotomic<Scalar> {
        let mut out = Cyclotomic::zero(p);
        for (r, v) in &self.terms {
            let z = Cyclotomic::<Rational>::psi(p, r).map(|q| Scalar::rational(q.clone()));
            out = out.add(&z.scale(v));
        }
        out.shrink()
    }
}

/// Values of `T_1 ⋯ T_j w^sph` for words of Hecke operators.
pub struct WhittakerEvaluator {
    pub prime: u32,
    pub ss: SymbolSet,
    memo: HashMap<(Vec<String>, TorusElement, Vec<u64>), PsiSum>,
}

impl WhittakerEvaluator {
    pub fn new(prime: u32, ss: SymbolSet) -> WhittakerEvaluator {
        WhittakerEvaluator { prime, ss, memo: HashMap::new() }
    }

    pub fn for_series(ps: &PrincipalSeries) -> WhittakerEvaluator {
        WhittakerEvaluator::new(ps.prime, ps.ss)
    }

    fn level_of(word: &[HeckeElement]) -> Level {
        word.first().map_or(Level::SPHERICAL, |h| h.level)
    }

    /// `(T_1 ⋯ T_j w^sph)(g)`.
    pub fn value(&mut self, word: &[HeckeElement], g: &GroupElement) -> Result<Cyclotomic<Scalar>> {
        for pair in word.windows(2) {
            if !pair[0].level.is_contained_in(&pair[1].level) {
                return Err(Error::LevelMismatch(format!("{} applied after {}", pair[0].level, pair[1].level)));
            }
        }
        Ok(self.eval(word, g)?.to_cyclotomic(self.prime))
    }

    fn eval(&mut self, word: &[HeckeElement], g: &GroupElement) -> Result<PsiSum> {
        let p = self.prime;
        let (n, t, k) = iwasawa_ntk(g, p);
        let shift = &n.entry(0, 1).clone() + n.entry(1, 2);
        let inner = self.eval_tk(word, &t, &k)?;
        let mut out = PsiSum::default();
        out.add_shifted(&inner, &shift, &Scalar::one(), p);
        Ok(out)
    }

    fn eval_tk(&mut self, word: &[HeckeElement], t: &TorusElement, k: &GroupElement) -> Result<PsiSum> {
        let p = self.prime;
        if word.is_empty() {
            return Ok(PsiSum::constant(cs_gsp4(t, &self.ss)));
        }
        let level = WhittakerEvaluator::level_of(word);
        let key = (word.iter().map(|h| h.name.clone()).collect::<Vec<_>>(), *t, flag_key(k, &level, p));
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let x = t.to_element(p).mul(k);
        let mut out = PsiSum::default();
        for (coeff, s) in &word[0].terms {
            let dec = decompose_double_coset(s, level, p)?;
            for gi in &dec.reps {
                let v = self.eval(&word[1..], &x.mul(gi))?;
                out.add_shifted(&v, &Rational::from_integer(0.into()), coeff, p);
            }
        }
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

/// The functional `f ↦ W_f(1)` on the `K`-invariants of the induced model,
/// normalized so the spherical vector maps to `1`. It is determined by its
/// values on the vectors `w_i · sph` for words `w_i` spanning the space.
pub struct WhittakerFunctional {
    pub level: Level,
    basis: Matrix,
    values: Vec<Cyclotomic<Scalar>>,
}

impl WhittakerFunctional {
    pub fn new(ps: &PrincipalSeries, words: &[Vec<HeckeElement>]) -> Result<WhittakerFunctional> {
        let level = words.iter().find_map(|w| w.first().map(|h| h.level)).ok_or(Error::Underdetermined(0))?;
        let n = ps.dim(level)?;
        let sph = ps.spherical_vector(level)?;
        let mut ev = WhittakerEvaluator::for_series(ps);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        for w in words {
            let mut v = sph.clone();
            for h in w.iter().rev() {
                v = ps.hecke_apply(h, &v)?;
            }
            cols.push(v.values);
            values.push(ev.value(w, &GroupElement::identity())?);
        }
        let mut basis = Matrix::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                basis.rows[i][j] = x.clone();
            }
        }
        if basis.rank() < n {
            return Err(Error::Underdetermined(n - basis.rank()));
        }
        Ok(WhittakerFunctional { level, basis, values })
    }

    /// Words `U^i` for `i < dim` in a single operator.
    pub fn from_powers(ps: &PrincipalSeries, op: &HeckeElement) -> Result<WhittakerFunctional> {
        let n = ps.dim(op.level)?;
        let words: Vec<Vec<HeckeElement>> = (0..n).map(|i| vec![op.clone(); i]).collect();
        let mut words = words;
        if let Some(w) = words.first_mut() {
            *w = vec![HeckeElement::identity(op.level, &ps.ss)];
        }
        WhittakerFunctional::new(ps, &words)
    }

    /// Iwahori level: words `U1^i U2^j` with `i < 4`, `j < 2`.
    pub fn iwahori(ps: &PrincipalSeries) -> Result<WhittakerFunctional> {
        let u1 = HeckeElement::u1_iw(&ps.ss);
        let u2 = HeckeElement::u2_iw(&ps.ss);
        let mut words = Vec::new();
        for j in 0..2 {
            for i in 0..4 {
                let mut w = vec![u2.clone(); j];
                w.extend(vec![u1.clone(); i]);
                if w.is_empty() {
                    w.push(HeckeElement::identity(Level::iwahori(1), &ps.ss));
                }
                words.push(w);
            }
        }
        WhittakerFunctional::new(ps, &words)
    }

    pub fn eval(&self, v: &InducedVector) -> Result<Cyclotomic<Scalar>> {
        if v.level != self.level {
            return Err(Error::LevelMismatch(format!("{} vs {}", v.level, self.level)));
        }
        let mut aug = self.basis.clone();
        for (row, x) in aug.rows.iter_mut().zip(&v.values) {
            row.push(-x);
        }
        let ker = aug.kernel();
        let m = self.values.len();
        let sol = ker.iter().find(|k| !k[m].is_zero()).ok_or_else(|| Error::Degenerate("vector outside span".into()))?;
        let scale = sol[m].inv()?;
        let mut out = Cyclotomic::zero(self.values.first().map_or(2, |v| v.prime()));
        for (c, val) in sol.iter().zip(&self.values) {
            out = out.add(&val.scale(&(c * &scale)));
        }
        Ok(out.shrink())
    }
}

/// Unknowns of the spherical recursion: `(a, b) = (n1 - n2, 2 n2 - n0)`.
pub type RecursionTable = BTreeMap<(i32, i32), Scalar>;

fn recursion_coords(t: &TorusElement) -> (i32, i32, i32) {
    (t.n1 - t.n2, 2 * t.n2 - t.n0, t.n2)
}

/// Solve `(T W)(t) = λ_T W(t)` for the generators `T ∈ {[K diag(p,p,1,1) K],
/// [K diag(p²,p,p,1) K]}` with `W(1) = 1`, on `a + b ≤ height`, where
/// `W(t) = ω(p)^{n2} V(a, b)`. Eigenvalues come from the induced model;
/// vanishing off the support is derived from `ψ`-equivariance.
pub fn solve_spherical_recursion(height: i32, ps: &PrincipalSeries) -> Result<RecursionTable> {
    let p = ps.prime;
    let ss = ps.ss;
    let central = lambda_delta_half(&TorusElement::new(1, 1, 2), &ss);
    let unknowns: Vec<(i32, i32)> = (0..=height).flat_map(|s| (0..=s).map(move |a| (a, s - a))).collect();
    let index: HashMap<(i32, i32), usize> = unknowns.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let n = unknowns.len();
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let mut norm = vec![Scalar::zero(); n + 1];
    norm[index[&(0, 0)]] = Scalar::one();
    norm[n] = -ss.int(1);
    rows.push(norm);
    let sph = ps.spherical_vector(Level::SPHERICAL)?;
    for gen in [TorusElement::new(1, 1, 1), TorusElement::new(2, 1, 2)] {
        let op = HeckeElement::spherical(&ss, gen);
        let lambda = ps.hecke_apply(&op, &sph)?.values[0].clone();
        let dec = decompose_double_coset(&gen, Level::SPHERICAL, p)?;
        for &(a, b) in &unknowns {
            if a + b >= height {
                continue;
            }
            let base = TorusElement::new(a, 0, -b);
            let x = base.to_element(p);
            let mut psi_sums: BTreeMap<(usize, i32), Cyclotomic<Rational>> = BTreeMap::new();
            let mut closed = true;
            for gi in &dec.reps {
                let (nn, t, _) = iwasawa_ntk(&x.mul(gi), p);
                let te = t.to_element(p);
                let ti = t.inverse().to_element(p);
                let one = Rational::from_integer(1.into());
                let twist1 = te.mul(&x12(&one)).mul(&ti);
                let twist2 = te.mul(&x23(&one)).mul(&ti);
                let vanishes = !frac_p(twist1.entry(0, 1), p).is_zero() || !frac_p(twist2.entry(1, 2), p).is_zero();
                if vanishes {
                    continue;
                }
                let (ta, tb, tn2) = recursion_coords(&t);
                let Some(&j) = index.get(&(ta, tb)) else {
                    closed = false;
                    break;
                };
                let psi = Cyclotomic::<Rational>::psi(p, &(nn.entry(0, 1) + nn.entry(1, 2)));
                let e = psi_sums.entry((j, tn2)).or_insert_with(|| Cyclotomic::zero(p));
                *e = e.add(&psi);
            }
            if !closed {
                continue;
            }
            let mut row = vec![Scalar::zero(); n + 1];
            for ((j, tn2), c) in psi_sums {
                let Some(c) = c.shrink().as_base() else {
                    return Err(Error::Unsupported("non-rational ψ-sum in spherical recursion".into()));
                };
                row[j] += &central.pow(tn2).scale(&c);
            }
            row[index[&(a, b)]] += &(-&lambda);
            rows.push(row);
        }
    }
    let m = Matrix { rows };
    let ker = m.kernel();
    if ker.len() != 1 {
        return Err(Error::Underdetermined(ker.len()));
    }
    let sol = &ker[0];
    let scale = sol[n].inv()?;
    Ok(unknowns.iter().enumerate().map(|(i, &k)| (k, &sol[i] * &scale)).collect())
}

/// Read `W(t)` off a recursion table.
pub fn recursion_value(table: &RecursionTable, t: &TorusElement, ss: &SymbolSet) -> Option<Scalar> {
    let (a, b, n2) = recursion_coords(t);
    if a < 0 || b < 0 {
        return Some(ss.int(0));
    }
    let central = lambda_delta_half(&TorusElement::new(1, 1, 2), ss);
    table.get(&(a, b)).map(|v| v * &central.pow(n2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::PMode;

    #[test]
    fn cs_normalization() {
        let ss = SymbolSet::new(PMode::Numeric(2), 1, 0);
        assert!(cs_gsp4(&TorusElement::identity(), &ss).is_one());
        assert!(cs_gsp4(&TorusElement::new(0, 1, 0), &ss).is_zero());
        assert!(cs_gl2(0, &ss).is_one());
        assert!(cs_gl2(-1, &ss).is_zero());
    }

    #[test]
    fn cs_constant_factors() {
        let ss = SymbolSet::new(PMode::Symbolic, 2, 1);
        let [a, b, g, d] = ss.params();
        let p = ss.p();
        let f = |x: Scalar| &ss.int(1) - &x;
        let expected = &(&f(&g / &(&p * &b)) * &f(&b / &(&p * &a))) * &(&f(&d / &(&p * &a)) * &f(&d / &(&p * &b)));
        assert_eq!(cs_constant(&ss), expected);
    }

    #[test]
    fn translate_identity() {
        let ps = PrincipalSeries::new(2, 1, 0);
        let mut ev = WhittakerEvaluator::for_series(&ps);
        let v = ev.value(&[], &GroupElement::identity()).unwrap();
        assert!(v.as_base().unwrap().is_one());
    }
}
