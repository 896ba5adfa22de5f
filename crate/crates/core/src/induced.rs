//! The unramified principal series `Ind_B^G(Λ)` at parahoric levels.
//!
//! A level-invariant vector is determined by its values on the Bruhat cells
//! `B(Z_p)\G(Z_p)/K`, since `Λδ^{1/2}` is trivial on `B(Z_p)`. Hecke operators
//! act by `(Tf)(x) = c Σ_i f(x g_i)` with each `x g_i = b k` evaluated as
//! `Λδ^{1/2}(b) f(k)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::coset::{decompose_at_depth, default_depth, flag_variety, quotient_cosets, FlagVariety, Level};
use crate::error::{Error, Result};
use crate::group::{iwasawa_bk, lambda_delta_half, TorusElement};
use crate::linalg::{Matrix, UniPoly};
use crate::scalar::rational::valuation;
use crate::scalar::{PMode, Scalar, SymbolSet};

/// A formal combination `Σ c_j [K t_j K]` at a fixed level.
#[derive(Clone, Debug, PartialEq)]
pub struct HeckeElement {
    pub name: String,
    pub level: Level,
    pub terms: Vec<(Scalar, TorusElement)>,
}

/// Normalizing factor used for the transpose Klingen operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TransposeNormalization {
    /// `p^{r1}`, matching the untransposed operator.
    PowR1,
    /// `p^{-r2}`.
    PowMinusR2,
}

pub const T_SIEG: TorusElement = TorusElement::new(1, 1, 1);
pub const T_KL: TorusElement = TorusElement::new(2, 1, 2);
pub const T_KL_TRANSPOSE: TorusElement = TorusElement::new(0, 1, 2);

impl HeckeElement {
    pub fn single(name: &str, level: Level, coeff: Scalar, t: TorusElement) -> HeckeElement {
        HeckeElement { name: name.into(), level, terms: vec![(coeff, t)] }
    }

    pub fn identity(level: Level, ss: &SymbolSet) -> HeckeElement {
        HeckeElement::single("1", level, ss.int(1), TorusElement::identity())
    }

    /// `p^{(r1+r2)/2} [Sieg(p) diag(p,p,1,1) Sieg(p)]`.
    pub fn u1_sieg(ss: &SymbolSet) -> HeckeElement {
        HeckeElement::single("U1,Sieg", Level::siegel(1), ss.p_half(ss.r1 + ss.r2), T_SIEG)
    }

    /// `p^{r1} [Kl(p) diag(p²,p,p,1) Kl(p)]`.
    pub fn u2_kl(ss: &SymbolSet) -> HeckeElement {
        HeckeElement::single("U2,Kl", Level::klingen(1), ss.p_pow(ss.r1), T_KL)
    }

    pub fn u1_iw(ss: &SymbolSet) -> HeckeElement {
        HeckeElement::single("U1,Iw", Level::iwahori(1), ss.p_half(ss.r1 + ss.r2), T_SIEG)
    }

    pub fn u2_iw(ss: &SymbolSet) -> HeckeElement {
        HeckeElement::single("U2,Iw", Level::iwahori(1), ss.p_pow(ss.r1), T_KL)
    }

    /// `c [Kl(p) diag(1,p,p,p²) Kl(p)]`.
    pub fn u2_kl_transpose(ss: &SymbolSet, norm: TransposeNormalization) -> HeckeElement {
        let c = match norm {
            TransposeNormalization::PowR1 => ss.p_pow(ss.r1),
            TransposeNormalization::PowMinusR2 => ss.p_pow(-ss.r2),
        };
        HeckeElement::single("U'2,Kl", Level::klingen(1), c, T_KL_TRANSPOSE)
    }

    /// The spherical operator `[G(Z_p) t G(Z_p)]`.
    pub fn spherical(ss: &SymbolSet, t: TorusElement) -> HeckeElement {
        HeckeElement::single(&format!("T{t}"), Level::SPHERICAL, ss.int(1), t)
    }
}

/// A level-invariant vector, one value per Bruhat cell.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedVector {
    pub level: Level,
    pub values: Vec<Scalar>,
}

impl InducedVector {
    pub fn value_at_identity(&self) -> &Scalar {
        &self.values[0]
    }

    pub fn scale(&self, c: &Scalar) -> InducedVector {
        InducedVector { level: self.level, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn add(&self, o: &InducedVector) -> Result<InducedVector> {
        if self.level != o.level {
            return Err(Error::LevelMismatch(format!("{} vs {}", self.level, o.level)));
        }
        Ok(InducedVector { level: self.level, values: self.values.iter().zip(&o.values).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, o: &InducedVector) -> Result<InducedVector> {
        self.add(&o.scale(&Scalar::int(-1)))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// `Some(c)` when `self = c·o`.
    pub fn ratio_to(&self, o: &InducedVector) -> Option<Scalar> {
        let i = o.values.iter().position(|v| !v.is_zero())?;
        let c = self.values[i].checked_div(&o.values[i]).ok()?;
        (self.level == o.level && self.values.iter().zip(&o.values).all(|(a, b)| *a == b * &c)).then_some(c)
    }
}

impl fmt::Display for InducedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "))
    }
}

/// For each target cell, the multiset of `(torus part, source cell)` pairs.
type Structure = Vec<BTreeMap<(usize, TorusElement), usize>>;

fn structure_memo() -> &'static Mutex<HashMap<(u32, Level, TorusElement, u32), Arc<Structure>>> {
    static M: OnceLock<Mutex<HashMap<(u32, Level, TorusElement, u32), Arc<Structure>>>> = OnceLock::new();
    M.get_or_init(Default::default)
}

fn hecke_structure(p: u32, level: Level, t: &TorusElement, depth: u32) -> Result<Arc<Structure>> {
    let key = (p, level, *t, depth);
    if let Some(s) = structure_memo().lock().unwrap().get(&key) {
        return Ok(s.clone());
    }
    let flags = flag_variety(p, level)?;
    let dec = decompose_at_depth(t, level, p, depth)?;
    let mut out = Vec::with_capacity(flags.num_cells());
    for c in 0..flags.num_cells() {
        let x = flags.cell_rep(c);
        let mut row = BTreeMap::new();
        for g in &dec.reps {
            let (b, k) = iwasawa_bk(&x.mul(g), p);
            let e: [i32; 4] = std::array::from_fn(|i| valuation(b.entry(i, i), p).expect("invertible"));
            let tb = TorusElement::from_diag_exps(e).expect("Borel diagonal");
            *row.entry((flags.cell_of_element(&k), tb)).or_insert(0) += 1;
        }
        out.push(row);
    }
    let s = Arc::new(out);
    structure_memo().lock().unwrap().insert(key, s.clone());
    Ok(s)
}

/// The induced model at a fixed prime, in numeric-`p` mode.
#[derive(Clone, Debug)]
pub struct PrincipalSeries {
    pub prime: u32,
    pub ss: SymbolSet,
}

impl PrincipalSeries {
    pub fn new(prime: u32, r1: i32, r2: i32) -> PrincipalSeries {
        PrincipalSeries { prime, ss: SymbolSet::new(PMode::Numeric(prime), r1, r2) }
    }

    pub fn flags(&self, level: Level) -> Result<Arc<FlagVariety>> {
        flag_variety(self.prime, level)
    }

    pub fn dim(&self, level: Level) -> Result<usize> {
        Ok(self.flags(level)?.num_cells())
    }

    /// The vector identically `1` on `G(Z_p)`, viewed at `level`.
    pub fn spherical_vector(&self, level: Level) -> Result<InducedVector> {
        Ok(InducedVector { level, values: vec![self.ss.int(1); self.dim(level)?] })
    }

    /// Supported on the identity cell at Klingen level, with value `p³` there.
    pub fn phi1_vector(&self) -> Result<InducedVector> {
        let level = Level::klingen(1);
        let mut values = vec![self.ss.int(0); self.dim(level)?];
        values[0] = self.ss.p_pow(3);
        Ok(InducedVector { level, values })
    }

    pub fn hecke_matrix(&self, op: &HeckeElement) -> Result<Matrix> {
        self.hecke_matrix_at_depth(op, None)
    }

    /// As [`hecke_matrix`](Self::hecke_matrix), with an explicit coset
    /// reduction depth.
    pub fn hecke_matrix_at_depth(&self, op: &HeckeElement, depth: Option<u32>) -> Result<Matrix> {
        let n = self.dim(op.level)?;
        let mut m = Matrix::zeros(n, n);
        for (coeff, t) in &op.terms {
            let d = depth.unwrap_or_else(|| default_depth(&op.level, t));
            let s = hecke_structure(self.prime, op.level, t, d)?;
            for (i, row) in s.iter().enumerate() {
                for (&(j, tb), &count) in row {
                    let v = &lambda_delta_half(&tb, &self.ss) * coeff;
                    m.rows[i][j] += v.scale(&crate::scalar::rational::rat(count as i64));
                }
            }
        }
        Ok(m)
    }

    pub fn hecke_apply(&self, op: &HeckeElement, v: &InducedVector) -> Result<InducedVector> {
        if op.level != v.level {
            return Err(Error::LevelMismatch(format!("operator at {} applied to a vector at {}", op.level, v.level)));
        }
        let m = self.hecke_matrix(op)?;
        Ok(InducedVector { level: v.level, values: m.apply(&v.values) })
    }

    pub fn charpoly(&self, op: &HeckeElement) -> Result<UniPoly> {
        Ok(self.hecke_matrix(op)?.charpoly())
    }

    /// Eigenvector for a simple eigenvalue, scaled to value `1` at the identity
    /// cell when that value is nonzero.
    pub fn eigenvector(&self, op: &HeckeElement, lambda: &Scalar) -> Result<InducedVector> {
        let m = self.hecke_matrix(op)?;
        let v = m.eigenvector(lambda)?;
        let v = match v[0].is_zero() {
            true => v,
            false => {
                let c = v[0].inv()?;
                v.iter().map(|x| x * &c).collect()
            }
        };
        Ok(InducedVector { level: op.level, values: v })
    }

    /// `Π_j (1 - μ_j T⁻¹) v`.
    pub fn apply_inverse_factors(&self, op: &HeckeElement, mus: &[Scalar], v: &InducedVector) -> Result<InducedVector> {
        let inv = self.hecke_matrix(op)?.inverse()?;
        let mut cur = v.values.clone();
        for mu in mus {
            let w = inv.apply(&cur);
            cur = cur.iter().zip(&w).map(|(a, b)| a - &(mu * b)).collect();
        }
        Ok(InducedVector { level: v.level, values: cur })
    }

    /// `Σ_{γ ∈ to/from} γ·v`, a vector at the coarser level `to`.
    pub fn trace_to_level(&self, v: &InducedVector, to: Level) -> Result<InducedVector> {
        let from = v.level;
        if !from.is_contained_in(&to) {
            return Err(Error::NotNested(from.name(), to.name()));
        }
        let fine = self.flags(from)?;
        let coarse = self.flags(to)?;
        let reps = quotient_cosets(self.prime, to, from)?;
        let values = (0..coarse.num_cells())
            .map(|c| {
                let x = coarse.cell_rep(c);
                reps.iter().map(|g| v.values[fine.cell_of_element(&x.mul(g))].clone()).sum()
            })
            .collect();
        Ok(InducedVector { level: to, values })
    }

    /// The `αβ/p^{r2+1}`-eigenvector
    /// `(1+γ/α)⁻¹ (1 - γδ/(p^{r2+1} T))(1 - αγ/(p^{r2+1} T))(1 - βδ/(p^{r2+1} T)) sph` for `T = op`.
    pub fn klingen_combination(&self, op: &HeckeElement) -> Result<InducedVector> {
        let [_, _, g, d] = self.ss.params();
        self.klingen_combination_with(op, &(&g * &d))
    }

    /// As [`klingen_combination`](Self::klingen_combination) with first factor
    /// `1 - μ/(p^{r2+1} T)`; `μ = βγ` gives the printed variant, which is not
    /// an eigenvector since `βγ = αδ` is not an eigenvalue.
    pub fn klingen_combination_with(&self, op: &HeckeElement, mu: &Scalar) -> Result<InducedVector> {
        let [a, b, g, d] = self.ss.params();
        let q = self.ss.p_pow(self.ss.r2 + 1);
        let mus = [mu / &q, &(&a * &g) / &q, &(&b * &d) / &q];
        let sph = self.spherical_vector(op.level)?;
        let v = self.apply_inverse_factors(op, &mus, &sph)?;
        let pre = (&self.ss.int(1) + &(&g / &a)).inv()?;
        Ok(v.scale(&pre))
    }

    /// `(1 - β/U)(1 - γ/U)(1 - δ/U) sph` at Siegel level.
    pub fn siegel_combination(&self) -> Result<InducedVector> {
        let [_, b, g, d] = self.ss.params();
        let op = HeckeElement::u1_sieg(&self.ss);
        self.apply_inverse_factors(&op, &[b, g, d], &self.spherical_vector(op.level)?)
    }

    /// Pull a Siegel or Klingen vector back to Iwahori level.
    pub fn restrict_to(&self, v: &InducedVector, level: Level) -> Result<InducedVector> {
        if !level.is_contained_in(&v.level) {
            return Err(Error::NotNested(level.name(), v.level.name()));
        }
        let fine = self.flags(level)?;
        let coarse = self.flags(v.level)?;
        let values = (0..fine.num_cells()).map(|c| v.values[coarse.cell_of_element(fine.cell_rep(c))].clone()).collect();
        Ok(InducedVector { level, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let ps = PrincipalSeries::new(2, 1, 0);
        assert_eq!(ps.dim(Level::iwahori(1)).unwrap(), 8);
        assert_eq!(ps.dim(Level::siegel(1)).unwrap(), 4);
        assert_eq!(ps.dim(Level::klingen(1)).unwrap(), 4);
        assert_eq!(ps.dim(Level::SPHERICAL).unwrap(), 1);
    }

    #[test]
    fn identity_operator() {
        let ps = PrincipalSeries::new(3, 1, 1);
        let id = HeckeElement::identity(Level::klingen(1), &ps.ss);
        assert_eq!(ps.hecke_matrix(&id).unwrap(), Matrix::identity(4));
    }

    #[test]
    fn siegel_charpoly() {
        let ps = PrincipalSeries::new(2, 1, 0);
        let cp = ps.charpoly(&HeckeElement::u1_sieg(&ps.ss)).unwrap();
        assert_eq!(cp, UniPoly::from_roots(&ps.ss.params()));
    }
}
