//! Reference numbers, each checked against a hand reduction to ψ
//! correlators.

use tautcalc_core::hyperelliptic_db::{HypClassId, Registry};
use tautcalc_core::rational::{frac, int};
use tautcalc_core::taut_expr::scalar_of;
use tautcalc_core::{b_curve_pairing, conj_pair_family, pair, parse, wk, MarkedSpace, PsiMoment, Rational};

fn w(g: u32, e: &[u32]) -> Rational {
    wk(&PsiMoment::new(g, e.to_vec())).unwrap()
}

#[test]
fn published_correlators() {
    assert_eq!(w(1, &[1]), frac(1, 24));
    assert_eq!(w(2, &[4]), frac(1, 1152));
    assert_eq!(w(2, &[3, 2]), frac(29, 5760));
    assert_eq!(w(2, &[2, 2, 2]), frac(7, 240));
}

#[test]
fn chen_tarasca_against_psi_cubed() {
    // Separating terms vanish for dimension reasons on the genus-1 sides.
    // δ_irr ψ_1^4 = <τ_4 τ_0^3>_1 / 2 and δ_irr ψ_1^3 ψ_2 = <τ_3 τ_1 τ_0^2>_1 / 2.
    let irr_terms = (w(1, &[4, 0, 0, 0]) + w(1, &[3, 1, 0, 0])) / int(2);
    let oracle = int(6) * w(2, &[4, 1]) - frac(3, 2) * w(2, &[5, 0]) - frac(3, 2) * w(2, &[3, 2])
        - frac(1, 20) * irr_terms;
    assert_eq!(oracle, frac(1, 384));
    let s = MarkedSpace::new(2, ["w1", "w2"]).unwrap();
    assert_eq!(parse(&s, "H(2,0,0)*psi[w1]^3").unwrap().integrate().unwrap(), oracle);
}

#[test]
fn notprop_is_independent_of_free_points() {
    for n in 0..=2usize {
        let id = HypClassId::new(2, 0, n).unwrap();
        let h = Registry::shared().class_of(&id).unwrap();
        let psi = tautcalc_core::TautExpr::psi(h.space(), "w1", n as u32 + 3).unwrap();
        assert_eq!(h.multiply(&psi).unwrap().integrate().unwrap(), frac(1, 384));
    }
}

#[test]
fn logan_termwise() {
    let f = conj_pair_family(0);
    let s = f.space().clone();
    let terms: Vec<Rational> = ["-1*lambda", "psi[+]", "psi[-]", "-3*d[2;]", "-1*d[1;]"]
        .iter()
        .map(|t| pair(&f, &parse(&s, t).unwrap()).unwrap())
        .collect();
    // (2g-2)+(2g+2) at g = 2 and 2g+2 Weierstrass points
    assert_eq!(terms, vec![int(0), int(8), int(8), int(-3 * 6), int(0)]);
    assert_eq!(terms.iter().sum::<Rational>(), int(-2));
    for n in 0..=3 {
        let id = HypClassId::new(0, 1, n).unwrap();
        let h = Registry::shared().class_of(&id).unwrap();
        assert_eq!(pair(&conj_pair_family(n), &h).unwrap(), int(-2));
    }
}

#[test]
fn b_curve_against_string_equation() {
    // -3 <τ_2 τ_0>_1 = -3 <τ_1>_1
    let oracle = int(-3) * w(1, &[1]);
    for n in 0..=2 {
        let b = b_curve_pairing(n).unwrap();
        assert_eq!(b.value, oracle);
        assert!(b.is_negative());
    }
}

#[test]
fn ladder_total() {
    let s = MarkedSpace::new(2, ["w1", "w2"]).unwrap();
    let e = parse(&s, "H(2,0,0)").unwrap().pushforward_forget("w2").unwrap().pushforward_forget("w1").unwrap();
    // (6 - (l - 1)) at l = 2, then at l = 1
    assert_eq!(scalar_of(&e).unwrap(), Some(int(5 * 6)));
}

#[test]
fn dilaton_pushforward() {
    let s = MarkedSpace::new(2, ["w", "p"]).unwrap();
    let e = parse(&s, "psi[p]").unwrap().pushforward_forget("p").unwrap();
    assert_eq!(scalar_of(&e).unwrap(), Some(int(2 * 2 - 2 + 1)));
}

#[test]
fn boundary_catalogue() {
    let s = MarkedSpace::new(2, ["+", "-"]).unwrap();
    let names: Vec<String> = tautcalc_core::enumerate_boundary_divisors(&s).iter().map(|d| d.to_string()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    let mut expected = vec!["d_irr", "d[1;]", "d[1;+]", "d[2;]"];
    expected.sort();
    assert_eq!(sorted, expected);
    let t = MarkedSpace::new(2, ["w", "p"]).unwrap();
    assert!(tautcalc_core::DivisorClassId::separating(&t, 2, ["w"]).is_err());
}
