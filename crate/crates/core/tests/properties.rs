use proptest::prelude::*;

use gsp4::coset::{coset_key, decompose_at_depth, default_depth, Level};
use gsp4::group::{iwasawa_ntk, root_element, weyl_w1, weyl_w2, GroupElement, Root, TorusElement};
use gsp4::induced::{T_KL, T_SIEG};
use gsp4::scalar::rational::rat2;
use gsp4::scalar::{PMode, Scalar, SymbolSet};
use gsp4::zeta::{assemble_ztilde, critical_shifts, NamedTestDatum, TestDatumTag, TwistCharacters};

#[derive(Clone, Debug)]
enum Gen {
    Root(usize, bool, i64, bool),
    Torus(i32, i32, i32),
    W1,
    W2,
}

fn gen() -> impl Strategy<Value = Gen> {
    prop_oneof![
        (0..4usize, any::<bool>(), -6i64..=6, any::<bool>()).prop_map(|(r, n, t, frac)| Gen::Root(r, n, t, frac)),
        (-1i32..=1, -1i32..=1, -1i32..=2).prop_map(|(a, b, c)| Gen::Torus(a, b, c)),
        Just(Gen::W1),
        Just(Gen::W2),
    ]
}

fn build(word: &[Gen], p: u32) -> GroupElement {
    word.iter().fold(GroupElement::identity(), |g, x| {
        let f = match *x {
            Gen::Root(r, neg, t, frac) => root_element(Root::ALL[r], neg, &rat2(t, if frac { p as i64 } else { 1 })),
            Gen::Torus(a, b, c) => TorusElement::new(a, b, c).to_element(p),
            Gen::W1 => weyl_w1(),
            Gen::W2 => weyl_w2(),
        };
        g.mul(&f)
    })
}

/// Words in integral generators only, so the product lies in `G(Z_p)`.
fn integral(word: &[Gen], p: u32) -> GroupElement {
    let clean: Vec<Gen> = word
        .iter()
        .filter(|g| !matches!(g, Gen::Torus(..)))
        .map(|g| match *g {
            Gen::Root(r, n, t, _) => Gen::Root(r, n, t, false),
            ref other => other.clone(),
        })
        .collect();
    build(&clean, p)
}

fn small_scalar(ss: &SymbolSet) -> impl Strategy<Value = Scalar> + '_ {
    (proptest::collection::vec((-3i64..=3, -1i32..=2, -1i32..=1, 0i32..=1), 1..4), -2i64..=2, 0i32..=1).prop_map(
        move |(terms, d, de)| {
            let [a, b, ..] = ss.params();
            let num: Scalar = terms
                .iter()
                .map(|&(c, ea, eb, es)| &(&(&ss.int(c) * &a.pow(ea)) * &b.pow(eb)) * &ss.sqrt_p().pow(es))
                .sum();
            let den = &ss.int(1) + &(&ss.int(d) * &a.pow(de));
            if den.is_zero() { num } else { &num / &den }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms_symbolic(
        (x, y, z) in {
            let ss = Box::leak(Box::new(SymbolSet::new(PMode::Symbolic, 2, 1)));
            (small_scalar(ss), small_scalar(ss), small_scalar(ss))
        }
    ) {
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert!((&x + &(-&x)).is_zero());
        if !x.is_zero() {
            prop_assert!((&x * &x.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn field_axioms_numeric(
        (x, y) in {
            let ss = Box::leak(Box::new(SymbolSet::new(PMode::Numeric(3), 1, 0)));
            (small_scalar(ss), small_scalar(ss))
        }
    ) {
        prop_assert_eq!(&(&x + &y) * &(&x - &y), &(&x * &x) - &(&y * &y));
        if !y.is_zero() {
            prop_assert_eq!(&(&x / &y) * &y, x);
        }
    }

    #[test]
    fn iwasawa_reconstructs(word in proptest::collection::vec(gen(), 1..8), p in prop_oneof![Just(2u32), Just(3u32)]) {
        let g = build(&word, p);
        let (n, t, k) = iwasawa_ntk(&g, p);
        prop_assert!(n.is_unipotent_upper());
        prop_assert!(k.in_hyperspecial(p));
        prop_assert_eq!(n.mul(&t.to_element(p)).mul(&k), g);
    }

    #[test]
    fn iwasawa_torus_is_right_k_invariant(
        word in proptest::collection::vec(gen(), 1..8),
        kword in proptest::collection::vec(gen(), 1..6),
        p in prop_oneof![Just(2u32), Just(3u32)],
    ) {
        let g = build(&word, p);
        let k0 = integral(&kword, p);
        prop_assert!(k0.in_hyperspecial(p));
        prop_assert_eq!(iwasawa_ntk(&g, p).1, iwasawa_ntk(&g.mul(&k0), p).1);
    }
}

#[test]
fn coset_keys_stable_in_depth() {
    for p in [2, 3] {
        for (level, t) in [(Level::siegel(1), T_SIEG), (Level::klingen(1), T_KL), (Level::iwahori(1), T_KL)] {
            let d = default_depth(&level, &t);
            let keys = |depth| {
                let mut k: Vec<String> = decompose_at_depth(&t, level, p, depth)
                    .unwrap()
                    .reps
                    .iter()
                    .map(|g| format!("{:?}", coset_key(g, &level, p)))
                    .collect();
                k.sort();
                k
            };
            assert_eq!(keys(d), keys(d + 2), "{level} {t} p={p}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn center_equivariance(
        tag in proptest::sample::select(TestDatumTag::ALL.to_vec()),
        k1 in -2i32..=2,
        k2 in -2i32..=2,
        (r1, r2) in prop_oneof![Just((1, 0)), Just((2, 1)), Just((2, 2))],
        qr in (0i32..=2, 0i32..=1),
    ) {
        let (q, r) = (qr.0.min(r2), qr.1.min(r1 - r2));
        let ss = SymbolSet::new(PMode::Numeric(3), r1, r2);
        let mut d = NamedTestDatum::new(tag, q, r);
        if tag.is_twisted() {
            d = d.with_twist(TwistCharacters::sample(tag, 3).unwrap());
        }
        let z0 = assemble_ztilde(&d, &ss).unwrap();
        let z = assemble_ztilde(&d.clone().with_center([k1, k2]), &ss).unwrap();
        let t = critical_shifts(q, r, &ss);
        let factor = &(&ss.p_pow(k1 * t[0]) * &ss.chi1().pow(k1)) * &(&ss.p_pow(k2 * t[1]) * &ss.chi2().pow(k2));
        prop_assert_eq!(&z * &factor, z0);
    }
}
