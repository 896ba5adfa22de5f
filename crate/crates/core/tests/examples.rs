use gsp4::arith::regulator_constant;
use gsp4::coset::{decompose_double_coset, torus_of, Level};
use gsp4::group::{parse_element, TorusElement};
use gsp4::scalar::rational::rat;
use gsp4::scalar::{PMode, SymbolSet};
use gsp4::whittaker::{cs_gl2, cs_gsp4};
use gsp4::zeta::{assemble_ztilde, NamedTestDatum, TestDatumTag};

#[test]
fn spherical_values_at_identity() {
    let ss = SymbolSet::new(PMode::Symbolic, 2, 1);
    assert!(cs_gsp4(&TorusElement::identity(), &ss).is_one());
    assert!(assemble_ztilde(&NamedTestDatum::new(TestDatumTag::Spherical, 0, 0), &ss).unwrap().is_one());
}

#[test]
fn gl2_values_match_weyl_character() {
    // W(n) = p^{-n/2} (a'^{n+1} - b'^{n+1}) / (a' - b').
    for mode in [PMode::Symbolic, PMode::Numeric(2)] {
        let ss = SymbolSet::new(mode, 1, 1);
        let a = &ss.p_half(-ss.w()) * &ss.alpha();
        let b = &ss.p_half(-ss.w()) * &ss.beta();
        for n in 0..=4 {
            let weyl = &(&a.pow(n + 1) - &b.pow(n + 1)) / &(&a - &b);
            assert_eq!(cs_gl2(n, &ss), &ss.p_half(-n) * &weyl, "n = {n}");
        }
    }
}

#[test]
fn siegel_double_coset_from_text() {
    let g = parse_element("diag(p,p,1,1)", 2).unwrap();
    let t = torus_of(&g, 2).unwrap();
    assert_eq!(decompose_double_coset(&t, Level::siegel(1), 2).unwrap().len(), 8);
}

#[test]
fn regulator_small_cases() {
    assert_eq!(regulator_constant(0, 0).unwrap(), rat(-1));
    assert_eq!(regulator_constant(1, 1).unwrap(), rat(2));
    assert!(regulator_constant(2, 1).is_err());
}
