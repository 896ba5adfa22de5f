//! `GSp4` over `Q`: matrices, the `C2` root datum, torus characters and the
//! Weyl group.

mod iwasawa;
mod parse;

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::rational::{is_p_integral, is_p_unit, ppow, rat, residue, valuation};
use crate::scalar::{CyclotomicNumber, Rational, Scalar, SymbolSet};

pub use iwasawa::{iwasawa_bk, iwasawa_ntk};
pub use parse::parse_element;

pub type Mat = [[Rational; 4]; 4];

pub fn mat_zero() -> Mat {
    std::array::from_fn(|_| std::array::from_fn(|_| Rational::zero()))
}

pub fn mat_identity() -> Mat {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { Rational::one() } else { Rational::zero() }))
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut s = Rational::zero();
            for k in 0..4 {
                if !a[i][k].is_zero() && !b[k][j].is_zero() {
                    s += &a[i][k] * &b[k][j];
                }
            }
            s
        })
    })
}

pub fn mat_transpose(a: &Mat) -> Mat {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

pub fn mat_from_ints(rows: [[i64; 4]; 4]) -> Mat {
    std::array::from_fn(|i| std::array::from_fn(|j| rat(rows[i][j])))
}

/// The symplectic form `J` with `J14 = J23 = 1`, `J32 = J41 = -1`.
pub fn form_j() -> Mat {
    mat_from_ints([[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]])
}

/// `gᵀ J g`.
fn gram(g: &Mat) -> Mat {
    mat_mul(&mat_mul(&mat_transpose(g), &form_j()), g)
}

/// An invertible symplectic-similitude matrix with its similitude factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    m: Mat,
    nu: Rational,
}

impl GroupElement {
    /// Checks `gᵀ J g = ν J` with `ν ≠ 0`.
    pub fn new(m: Mat) -> Result<GroupElement> {
        let gr = gram(&m);
        let nu = gr[0][3].clone();
        if nu.is_zero() {
            return Err(Error::Parse("matrix is not a symplectic similitude".into()));
        }
        let j = form_j();
        for i in 0..4 {
            for k in 0..4 {
                if gr[i][k] != &nu * &j[i][k] {
                    return Err(Error::Parse("matrix is not a symplectic similitude".into()));
                }
            }
        }
        Ok(GroupElement { m, nu })
    }

    pub(crate) fn from_parts(m: Mat, nu: Rational) -> GroupElement {
        debug_assert!(GroupElement::new(m.clone()).map(|g| g.nu == nu).unwrap_or(false));
        GroupElement { m, nu }
    }

    pub fn identity() -> GroupElement {
        GroupElement { m: mat_identity(), nu: Rational::one() }
    }

    pub fn matrix(&self) -> &Mat {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.m[i][j]
    }

    pub fn similitude(&self) -> &Rational {
        &self.nu
    }

    pub fn mul(&self, o: &GroupElement) -> GroupElement {
        GroupElement { m: mat_mul(&self.m, &o.m), nu: &self.nu * &o.nu }
    }

    /// `g⁻¹ = ν⁻¹ J⁻¹ gᵀ J`, with `J⁻¹ = -J`.
    pub fn inverse(&self) -> GroupElement {
        let j = form_j();
        let t = mat_mul(&mat_mul(&j, &mat_transpose(&self.m)), &j);
        let c = -self.nu.recip();
        let m = std::array::from_fn(|i| std::array::from_fn(|k| &t[i][k] * &c));
        GroupElement { m, nu: self.nu.recip() }
    }

    pub fn diag(d: [Rational; 4]) -> Result<GroupElement> {
        let mut m = mat_zero();
        for (i, x) in d.into_iter().enumerate() {
            m[i][i] = x;
        }
        GroupElement::new(m)
    }

    pub fn is_p_integral(&self, p: u32) -> bool {
        self.m.iter().flatten().all(|x| is_p_integral(x, p))
    }

    /// Member of `G(Z_p)`.
    pub fn in_hyperspecial(&self, p: u32) -> bool {
        self.is_p_integral(p) && is_p_unit(&self.nu, p)
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..4).all(|i| (0..i).all(|j| self.m[i][j].is_zero()))
    }

    pub fn is_unipotent_upper(&self) -> bool {
        self.is_upper_triangular() && (0..4).all(|i| self.m[i][i].is_one())
    }

    /// Residues of all entries modulo `p^e`, row-major.
    pub fn residues(&self, p: u32, e: u32) -> Vec<u64> {
        self.m
            .iter()
            .flatten()
            .map(|x| u64::try_from(residue(x, p, e)).expect("residue fits"))
            .collect()
    }

    /// Smallest `e ≥ 0` with `p^e g` integral.
    pub fn denominator_exponent(&self, p: u32) -> i32 {
        self.m.iter().flatten().filter_map(|x| valuation(x, p)).map(|v| -v).max().unwrap_or(0).max(0)
    }

    pub fn to_int_rows(&self) -> Option<Vec<Vec<String>>> {
        Some(self.m.iter().map(|r| r.iter().map(crate::scalar::rational::format_rational).collect()).collect())
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .m
            .iter()
            .map(|r| r.iter().map(crate::scalar::rational::format_rational).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

// ---------------------------------------------------------------------------
// root subgroups

/// Positive roots of `C2`, named by the matrix position of their root vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Root {
    R12,
    R23,
    R13,
    R14,
}

impl Root {
    pub const ALL: [Root; 4] = [Root::R12, Root::R23, Root::R13, Root::R14];

    /// The root as a functional on torus exponents `(n1, n2, n0)`.
    pub fn functional(self) -> [i32; 3] {
        match self {
            Root::R12 => [1, -1, 0],
            Root::R23 => [0, 2, -1],
            Root::R13 => [1, 1, -1],
            Root::R14 => [2, 0, -1],
        }
    }

    /// The coroot as a cocharacter `(n1, n2, n0)`.
    pub fn coroot(self) -> [i32; 3] {
        match self {
            Root::R12 => [1, -1, 0],
            Root::R23 => [0, 1, 0],
            Root::R13 => [1, 1, 0],
            Root::R14 => [1, 0, 0],
        }
    }

    fn positions(self) -> &'static [(usize, usize, i64)] {
        match self {
            Root::R12 => &[(0, 1, 1), (2, 3, -1)],
            Root::R23 => &[(1, 2, 1)],
            Root::R13 => &[(0, 2, 1), (1, 3, 1)],
            Root::R14 => &[(0, 3, 1)],
        }
    }
}

/// The root element `x_α(t)` (or `x_{-α}(t)` when `negative`).
pub fn root_element(r: Root, negative: bool, t: &Rational) -> GroupElement {
    let mut m = mat_identity();
    for &(i, j, s) in r.positions() {
        let v = t * rat(s);
        if negative {
            m[j][i] = v;
        } else {
            m[i][j] = v;
        }
    }
    GroupElement { m, nu: Rational::one() }
}

pub fn x12(t: &Rational) -> GroupElement {
    root_element(Root::R12, false, t)
}
pub fn x23(t: &Rational) -> GroupElement {
    root_element(Root::R23, false, t)
}
pub fn x13(t: &Rational) -> GroupElement {
    root_element(Root::R13, false, t)
}
pub fn x14(t: &Rational) -> GroupElement {
    root_element(Root::R14, false, t)
}

/// `x12(a) x23(b) x13(c) x14(d)`.
pub fn unipotent(c: [&Rational; 4]) -> GroupElement {
    x12(c[0]).mul(&x23(c[1])).mul(&x13(c[2])).mul(&x14(c[3]))
}

/// Coordinates `(a, b, c, d)` with `n = x12(a) x23(b) x13(c) x14(d)`.
pub fn unipotent_coords(n: &GroupElement) -> Result<[Rational; 4]> {
    if !n.is_unipotent_upper() {
        return Err(Error::NotUnipotent);
    }
    let a = n.m[0][1].clone();
    let rest = x12(&-a.clone()).mul(n);
    let b = rest.m[1][2].clone();
    let rest = x23(&-b.clone()).mul(&rest);
    let c = rest.m[0][2].clone();
    let rest = x13(&-c.clone()).mul(&rest);
    let d = rest.m[0][3].clone();
    Ok([a, b, c, d])
}

/// The simple reflection swapping coordinates `1↔2` and `3↔4`.
pub fn weyl_w1() -> GroupElement {
    GroupElement { m: mat_from_ints([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]), nu: Rational::one() }
}

/// The simple reflection with columns `(e1, e3, -e2, e4)`.
pub fn weyl_w2() -> GroupElement {
    GroupElement { m: mat_from_ints([[1, 0, 0, 0], [0, 0, -1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]), nu: Rational::one() }
}

/// `1 + (E21 - E43)`, an element of `G(Z)` with first column `(1,1,0,0)ᵀ`.
pub fn make_u_kl() -> GroupElement {
    root_element(Root::R12, true, &Rational::one())
}

/// An alternative with the same first column: `u_Kl · x23(1)`.
pub fn make_u_kl_alt() -> GroupElement {
    make_u_kl().mul(&x23(&Rational::one()))
}

// ---------------------------------------------------------------------------
// torus

/// `diag(p^n1, p^n2, p^{n0-n2}, p^{n0-n1})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusElement {
    pub n1: i32,
    pub n2: i32,
    pub n0: i32,
}

impl TorusElement {
    pub const fn new(n1: i32, n2: i32, n0: i32) -> TorusElement {
        TorusElement { n1, n2, n0 }
    }

    pub fn identity() -> TorusElement {
        TorusElement::new(0, 0, 0)
    }

    pub fn exps(&self) -> [i32; 3] {
        [self.n1, self.n2, self.n0]
    }

    pub fn from_exps(e: [i32; 3]) -> TorusElement {
        TorusElement::new(e[0], e[1], e[2])
    }

    /// Diagonal exponents `(e1, e2, e3, e4)`.
    pub fn diag_exps(&self) -> [i32; 4] {
        [self.n1, self.n2, self.n0 - self.n2, self.n0 - self.n1]
    }

    pub fn from_diag_exps(e: [i32; 4]) -> Option<TorusElement> {
        (e[0] + e[3] == e[1] + e[2]).then(|| TorusElement::new(e[0], e[1], e[0] + e[3]))
    }

    pub fn to_element(&self, p: u32) -> GroupElement {
        let d = self.diag_exps();
        let mut m = mat_zero();
        for i in 0..4 {
            m[i][i] = ppow(p, d[i]);
        }
        GroupElement { m, nu: ppow(p, self.n0) }
    }

    pub fn mul(&self, o: &TorusElement) -> TorusElement {
        TorusElement::new(self.n1 + o.n1, self.n2 + o.n2, self.n0 + o.n0)
    }

    pub fn inverse(&self) -> TorusElement {
        TorusElement::new(-self.n1, -self.n2, -self.n0)
    }

    /// Exponent spread `max e_i - min e_i`.
    pub fn spread(&self) -> i32 {
        let d = self.diag_exps();
        d.iter().max().unwrap() - d.iter().min().unwrap()
    }

    pub fn pair(&self, f: [i32; 3]) -> i32 {
        f[0] * self.n1 + f[1] * self.n2 + f[2] * self.n0
    }
}

impl fmt::Display for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n1, self.n2, self.n0)
    }
}

/// The `C2` root datum on torus exponents.
pub struct RootDatum;

impl RootDatum {
    pub fn positive_roots() -> [[i32; 3]; 4] {
        Root::ALL.map(|r| r.functional())
    }

    /// Sum of the positive roots; `δ_B(t) = p^{-⟨sum, t⟩}`.
    pub fn two_rho() -> [i32; 3] {
        let mut s = [0; 3];
        for r in Self::positive_roots() {
            for i in 0..3 {
                s[i] += r[i];
            }
        }
        s
    }

    /// Twice the half-sum of positive coroots.
    pub fn two_rho_check() -> [i32; 3] {
        let mut s = [0; 3];
        for r in Root::ALL {
            let c = r.coroot();
            for i in 0..3 {
                s[i] += c[i];
            }
        }
        s
    }

    /// Dominant for the Borel: every positive root pairs non-negatively.
    pub fn is_dominant(t: &TorusElement) -> bool {
        Self::positive_roots().iter().all(|r| t.pair(*r) >= 0)
    }
}

/// `δ_B(t) = Π_{α>0} |α(t)|_p`, an integral power of `p`.
pub fn delta_b(t: &TorusElement, ss: &SymbolSet) -> Scalar {
    ss.p_pow(-t.pair(RootDatum::two_rho()))
}

/// Exponent `k` with `δ_B^{1/2}(t) = p^{k/2}`.
pub fn delta_half_exp2(t: &TorusElement) -> i32 {
    -t.pair(RootDatum::two_rho())
}

/// An element of the Weyl group acting on cocharacters `(n1, n2, n0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WeylElement {
    pub mat: [[i32; 3]; 3],
    pub sign: i32,
}

impl WeylElement {
    pub fn apply(&self, v: [i32; 3]) -> [i32; 3] {
        std::array::from_fn(|i| (0..3).map(|j| self.mat[i][j] * v[j]).sum())
    }

    fn compose(&self, o: &WeylElement) -> WeylElement {
        let mut m = [[0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = (0..3).map(|k| self.mat[i][k] * o.mat[k][j]).sum();
            }
        }
        WeylElement { mat: m, sign: self.sign * o.sign }
    }

    pub fn s1() -> WeylElement {
        WeylElement { mat: [[0, 1, 0], [1, 0, 0], [0, 0, 1]], sign: -1 }
    }

    pub fn s2() -> WeylElement {
        WeylElement { mat: [[1, 0, 0], [0, -1, 1], [0, 0, 1]], sign: -1 }
    }

    /// All elements, generated from the simple reflections.
    pub fn group() -> Vec<WeylElement> {
        let id = WeylElement { mat: [[1, 0, 0], [0, 1, 0], [0, 0, 1]], sign: 1 };
        let mut out = vec![id];
        let mut i = 0;
        while i < out.len() {
            for s in [Self::s1(), Self::s2()] {
                let n = out[i].compose(&s);
                if !out.iter().any(|x| x.mat == n.mat) {
                    out.push(n);
                }
            }
            i += 1;
        }
        out
    }
}

/// An unramified character of `T(Q_p)`: `diag(u1, u2, ν/u2, ν/u1) ↦ χ1(u1) χ2(u2) ρ(ν)`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnramifiedTorusCharacter {
    pub v1: Scalar,
    pub v2: Scalar,
    pub v0: Scalar,
}

impl UnramifiedTorusCharacter {
    /// `χ1 = γ/α`, `χ2 = β/α`, `ρ(p) = p^{-w/2} α`.
    pub fn from_params(ss: &SymbolSet) -> UnramifiedTorusCharacter {
        let a = ss.alpha();
        UnramifiedTorusCharacter { v1: &ss.gamma() / &a, v2: &ss.beta() / &a, v0: &ss.p_half(-ss.w()) * &a }
    }

    /// Swap the roles of `χ1` and `χ2`.
    pub fn transposed(&self) -> UnramifiedTorusCharacter {
        UnramifiedTorusCharacter { v1: self.v2.clone(), v2: self.v1.clone(), v0: self.v0.clone() }
    }

    pub fn eval(&self, t: &TorusElement) -> Scalar {
        &(&self.v1.pow(t.n1) * &self.v2.pow(t.n2)) * &self.v0.pow(t.n0)
    }
}

/// `Λ δ_B^{1/2}(t)` for the character attached to the Hecke parameters.
pub fn lambda_delta_half(t: &TorusElement, ss: &SymbolSet) -> Scalar {
    let w = ss.w();
    let (n1, n2, n0) = (t.n1, t.n2, t.n0);
    let mono = crate::scalar::Poly::monomial([n0 - n1 - n2, n2 - n1, n1, n1, 0, 0, 0], Rational::one());
    let pe = 2 * w * n1 - w * n0 + delta_half_exp2(t);
    &ss.lift(Scalar::from_poly(mono)) * &ss.p_half(pe)
}

/// `ψ(x + y)` for `n` unipotent with `x = n12`, `y = n23`.
pub fn psi_n(n: &GroupElement, p: u32) -> Result<CyclotomicNumber> {
    if !n.is_unipotent_upper() {
        return Err(Error::NotUnipotent);
    }
    Ok(CyclotomicNumber::psi(p, &(&n.m[0][1] + &n.m[1][2])))
}

/// Which parabolic pattern a congruence subgroup is modelled on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parabolic {
    Siegel,
    Klingen,
    Borel,
}

impl Parabolic {
    /// Matrix positions that must vanish.
    pub fn zero_positions(self) -> &'static [(usize, usize)] {
        match self {
            Parabolic::Siegel => &[(2, 0), (2, 1), (3, 0), (3, 1)],
            Parabolic::Klingen => &[(1, 0), (2, 0), (3, 0), (3, 1), (3, 2)],
            Parabolic::Borel => &[(1, 0), (2, 0), (3, 0), (2, 1), (3, 1), (3, 2)],
        }
    }
}

/// Whether `g mod p^depth` has the block shape of the parabolic.
pub fn parabolic_membership(g: &GroupElement, which: Parabolic, depth: u32, p: u32) -> Result<bool> {
    if !g.in_hyperspecial(p) {
        return Err(Error::NotIntegral(g.to_string()));
    }
    Ok(which.zero_positions().iter().all(|&(i, j)| residue(&g.m[i][j], p, depth).is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational::rat2;
    use crate::scalar::PMode;

    #[test]
    fn generators_are_symplectic() {
        let t = rat2(3, 7);
        for r in Root::ALL {
            for neg in [false, true] {
                let g = root_element(r, neg, &t);
                assert!(GroupElement::new(g.matrix().clone()).is_ok(), "{r:?} {neg}");
            }
        }
        for w in [weyl_w1(), weyl_w2(), make_u_kl(), make_u_kl_alt()] {
            assert_eq!(GroupElement::new(w.matrix().clone()).unwrap().similitude(), &rat(1));
        }
        let t = TorusElement::new(2, -1, 3).to_element(5);
        assert_eq!(GroupElement::new(t.matrix().clone()).unwrap().similitude(), &rat(125));
    }

    #[test]
    fn inverse_is_inverse() {
        let g = make_u_kl().mul(&TorusElement::new(1, 0, 1).to_element(3)).mul(&x13(&rat2(1, 3)));
        assert_eq!(g.mul(&g.inverse()), GroupElement::identity());
    }

    #[test]
    fn weyl_group_has_order_eight() {
        let w = WeylElement::group();
        assert_eq!(w.len(), 8);
        assert_eq!(w.iter().filter(|x| x.sign == 1).count(), 4);
    }

    #[test]
    fn u_kl_shape() {
        let u = make_u_kl();
        let col: Vec<Rational> = (0..4).map(|i| u.entry(i, 0).clone()).collect();
        assert_eq!(col, vec![rat(1), rat(1), rat(0), rat(0)]);
        assert!(!parabolic_membership(&u, Parabolic::Klingen, 1, 2).unwrap());
        let d = make_u_kl().inverse().mul(&make_u_kl_alt());
        assert!(parabolic_membership(&d, Parabolic::Klingen, 1, 2).unwrap());
        assert!(parabolic_membership(&d, Parabolic::Klingen, 1, 3).unwrap());
    }

    #[test]
    fn delta_adjoint_oracle() {
        // |det Ad(t)| on Lie(N): each root vector scales by t_i / t_j.
        let p = 2;
        let ss = SymbolSet::new(PMode::Numeric(p), 1, 0);
        for t in [TorusElement::new(1, 1, 0), TorusElement::new(2, 1, 1), TorusElement::new(-1, 3, 2)] {
            let g = t.to_element(p);
            let gi = g.inverse();
            let mut e = 0;
            for r in Root::ALL {
                let x = root_element(r, false, &rat(1));
                let mut lie = x.matrix().clone();
                for i in 0..4 {
                    lie[i][i] -= rat(1);
                }
                let c = mat_mul(&mat_mul(g.matrix(), &lie), gi.matrix());
                let &(i, j, _) = &r.positions()[0];
                e += valuation(&(&c[i][j] / &lie[i][j]), p).unwrap();
            }
            assert_eq!(delta_b(&t, &ss), ss.p_pow(-e));
        }
    }

    #[test]
    fn psi_n_values() {
        let p = 3;
        assert_eq!(psi_n(&GroupElement::identity(), p).unwrap(), CyclotomicNumber::one(p));
        assert_eq!(psi_n(&x12(&rat2(1, 3)), p).unwrap(), CyclotomicNumber::root_of_unity(3, 1, 1));
        assert_eq!(psi_n(&x23(&rat(7)), p).unwrap(), CyclotomicNumber::one(p));
        assert!(psi_n(&weyl_w1(), p).is_err());
    }

    #[test]
    fn lambda_matches_character() {
        let ss = SymbolSet::new(PMode::Symbolic, 2, 1);
        let ch = UnramifiedTorusCharacter::from_params(&ss);
        for t in [TorusElement::new(1, 0, 0), TorusElement::new(0, 1, 0), TorusElement::new(2, -1, 3)] {
            let lhs = lambda_delta_half(&t, &ss);
            let rhs = &ch.eval(&t) * &ss.p_half(delta_half_exp2(&t));
            assert_eq!(lhs, rhs);
        }
        let central = TorusElement::new(1, 1, 2);
        assert_eq!(ch.eval(&central), ss.chi());
    }
}
