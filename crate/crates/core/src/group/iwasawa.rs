//! Exact p-adic Iwasawa decompositions by symplectic column elimination.

use num_traits::{One, Zero};

use super::{root_element, weyl_w1, weyl_w2, GroupElement, Root, TorusElement};
use crate::scalar::rational::{ppow, valuation, Rational};

fn right(g: &mut GroupElement, kinv: &mut GroupElement, x: &GroupElement, xinv: &GroupElement) {
    *g = g.mul(x);
    *kinv = xinv.mul(kinv);
}

fn val(x: &Rational, p: u32) -> i64 {
    valuation(x, p).map(i64::from).unwrap_or(i64::MAX)
}

fn apply_root(g: &mut GroupElement, kinv: &mut GroupElement, r: Root, s: Rational) {
    if s.is_zero() {
        return;
    }
    let x = root_element(r, true, &s);
    let xi = root_element(r, true, &-s);
    right(g, kinv, &x, &xi);
}

fn apply_w1(g: &mut GroupElement, kinv: &mut GroupElement) {
    let w = weyl_w1();
    let wi = w.inverse();
    right(g, kinv, &w, &wi);
}

fn apply_w2(g: &mut GroupElement, kinv: &mut GroupElement) {
    let w = weyl_w2();
    let wi = w.inverse();
    right(g, kinv, &w, &wi);
}

/// `g = b·k` with `b` upper triangular and `k ∈ G(Z_p)`.
pub fn iwasawa_bk(g: &GroupElement, p: u32) -> (GroupElement, GroupElement) {
    let mut b = g.clone();
    let mut k = GroupElement::identity();

    // Bring a minimal-valuation entry of the last row to the corner.
    let row = 3;
    let j = (0..4).rev().min_by_key(|&j| val(b.entry(row, j), p)).expect("row");
    match j {
        3 => {}
        2 => apply_w1(&mut b, &mut k),
        1 => {
            apply_w2(&mut b, &mut k);
            apply_w1(&mut b, &mut k);
        }
        _ => {
            apply_w1(&mut b, &mut k);
            apply_w2(&mut b, &mut k);
            apply_w1(&mut b, &mut k);
        }
    }
    let piv = b.entry(3, 3).clone();
    let s = b.entry(3, 2) / &piv;
    apply_root(&mut b, &mut k, Root::R12, s);
    let s = -(b.entry(3, 1) / &piv);
    apply_root(&mut b, &mut k, Root::R13, s);
    let s = -(b.entry(3, 0) / &piv);
    apply_root(&mut b, &mut k, Root::R14, s);

    // The first column is now zero below the diagonal; clear entry (3,2).
    if !b.entry(2, 1).is_zero() {
        if val(b.entry(2, 1), p) < val(b.entry(2, 2), p) {
            apply_w2(&mut b, &mut k);
        }
        let s = -(b.entry(2, 1) / b.entry(2, 2));
        apply_root(&mut b, &mut k, Root::R23, s);
    }
    debug_assert!(b.is_upper_triangular(), "elimination left a lower entry: {b}");
    (b, k)
}

/// `g = n·t·k` with `n` unipotent upper triangular, `t` a p-power torus
/// element and `k ∈ G(Z_p)` (absorbing the unit part of the diagonal).
pub fn iwasawa_ntk(g: &GroupElement, p: u32) -> (GroupElement, TorusElement, GroupElement) {
    let (b, k) = iwasawa_bk(g, p);
    let d: [Rational; 4] = std::array::from_fn(|i| b.entry(i, i).clone());
    let e: [i32; 4] = std::array::from_fn(|i| valuation(&d[i], p).expect("invertible"));
    let t = TorusElement::from_diag_exps(e).expect("diagonal of a Borel element");
    let unit: [Rational; 4] = std::array::from_fn(|i| &d[i] * ppow(p, -e[i]));
    let dinv: [Rational; 4] = std::array::from_fn(|i| d[i].recip());
    let mut n = b.matrix().clone();
    for row in n.iter_mut() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = &*x * &dinv[j];
        }
    }
    let n = GroupElement::from_parts(n, Rational::one());
    let mut u = super::mat_zero();
    for i in 0..4 {
        u[i][i] = unit[i].clone();
    }
    let unu = &unit[0] * &unit[3];
    let u = GroupElement::from_parts(u, unu);
    (n, t, u.mul(&k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_u_kl, mat_identity, x13, x23};
    use crate::scalar::rational::{rat, rat2};

    #[test]
    fn identity_and_triangular() {
        let (b, k) = iwasawa_bk(&GroupElement::identity(), 2);
        assert_eq!(b, GroupElement::identity());
        assert_eq!(k, GroupElement::identity());
        let g = TorusElement::new(1, 2, 1).to_element(3).mul(&x13(&rat2(5, 9)));
        let (b, k) = iwasawa_bk(&g, 3);
        assert_eq!(b, g);
        assert_eq!(k.matrix(), &mat_identity());
    }

    #[test]
    fn lower_entry_with_denominator() {
        let p = 3;
        let g = root_element(Root::R12, true, &rat2(1, 3)).mul(&x23(&rat(2)));
        let (b, k) = iwasawa_bk(&g, p);
        assert!(b.is_upper_triangular());
        assert!(k.in_hyperspecial(p));
        assert_eq!(b.mul(&k), g);
    }

    #[test]
    fn ntk_torus() {
        let p = 2;
        let t = TorusElement::new(1, 1, 1).to_element(p);
        let (n, tt, k) = iwasawa_ntk(&t, p);
        assert_eq!(n, GroupElement::identity());
        assert_eq!(tt, TorusElement::new(1, 1, 1));
        assert_eq!(k, GroupElement::identity());
        let g = make_u_kl().mul(&t);
        let (n, tt, k) = iwasawa_ntk(&g, p);
        assert_eq!(n.mul(&tt.to_element(p)).mul(&k), g);
        assert!(k.in_hyperspecial(p));
    }
}
