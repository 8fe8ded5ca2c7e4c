use num_bigint::BigInt;
use proptest::prelude::*;
use tautcalc_core::rational::{factorial, frac, int};
use tautcalc_core::test_curves::{conj_pair_family, free_labels, generator_class, generators, pair};
use tautcalc_core::verify::random_corpus;
use tautcalc_core::wk_engine::{clear_memo, dilaton_check, string_check};
use tautcalc_core::{
    enumerate_boundary_divisors, parse, wk, DivisorClassId, MarkedSpace, PsiMoment, Rational, TautExpr,
};

fn moment() -> impl Strategy<Value = PsiMoment> {
    (0u32..=2, 1usize..=6).prop_flat_map(|(g, n)| {
        let dim = (3 * g as i64 - 3 + n as i64).max(0) as u32;
        prop::collection::vec(0..=dim, n).prop_map(move |e| PsiMoment::new(g, e))
    })
    .prop_filter("stable", |m| m.is_stable())
}

fn space() -> impl Strategy<Value = MarkedSpace> {
    (0u32..=2, 0usize..=5)
        .prop_filter_map("stable", |(g, n)| MarkedSpace::new(g, free_labels(n)).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wk_is_symmetric(m in moment(), rot in 0usize..6) {
        let mut e = m.exponents.clone();
        let k = rot % e.len();
        e.rotate_left(k);
        e.reverse();
        prop_assert_eq!(wk(&m).unwrap(), wk(&PsiMoment::new(m.genus, e)).unwrap());
    }

    #[test]
    fn wk_dimension_gate(m in moment()) {
        let v = wk(&m).unwrap();
        if !m.dimension_matches() {
            prop_assert_eq!(v, int(0));
        } else {
            prop_assert!(v > int(0));
        }
    }

    #[test]
    fn wk_is_deterministic(m in moment()) {
        let first = wk(&m).unwrap();
        clear_memo();
        prop_assert_eq!(wk(&m).unwrap(), first);
    }

    #[test]
    fn wk_genus_zero_closed_form(n in 3usize..=8, seed in any::<u64>()) {
        // spread n-3 units of degree over n slots
        let mut e = vec![0u32; n];
        let mut s = seed;
        for _ in 0..n - 3 {
            e[(s % n as u64) as usize] += 1;
            s /= 3;
            s = s.wrapping_add(7);
        }
        let denom: BigInt = e.iter().map(|&a| factorial(a)).product();
        let expected = Rational::new(factorial(n as u32 - 3), denom);
        prop_assert_eq!(wk(&PsiMoment::new(0, e)).unwrap(), expected);
    }

    #[test]
    fn string_and_dilaton(m in moment()) {
        prop_assert!(string_check(&m));
        prop_assert!(dilaton_check(&m));
    }

    #[test]
    fn divisor_sides_name_one_class(s in space(), h_seed in any::<u32>(), mask in any::<u32>()) {
        let g = s.genus();
        let h = h_seed % (g + 1);
        let p: Vec<String> = s.markings().iter().enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0).map(|(_, l)| l.clone()).collect();
        let q: Vec<String> = s.markings().iter().filter(|l| !p.contains(l)).cloned().collect();
        match (DivisorClassId::separating(&s, h, p.clone()), DivisorClassId::separating(&s, g - h, q)) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(&a, &b);
                prop_assert!(enumerate_boundary_divisors(&s).contains(&a));
                let again = DivisorClassId::parse(&s, &a.to_string()).unwrap();
                prop_assert_eq!(again, a);
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "sides disagree on stability: {:?} {:?}", a, b),
        }
    }

    #[test]
    fn pair_is_linear(n in 0usize..=3, c1 in -6i64..6, c2 in 1i64..6, i in any::<usize>(), j in any::<usize>()) {
        let f = conj_pair_family(n);
        let gens = generators(f.space());
        let x = generator_class(f.space(), &gens[i % gens.len()]).unwrap();
        let y = generator_class(f.space(), &gens[j % gens.len()]).unwrap();
        let combo = x.scaled(&int(c1)).add(&y.scaled(&frac(1, c2))).unwrap();
        let lhs = pair(&f, &combo).unwrap();
        let rhs = int(c1) * pair(&f, &x).unwrap() + frac(1, c2) * pair(&f, &y).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pairing_commutes_with_free_points(n in 1usize..=3, i in any::<usize>()) {
        // π_*[C_n] = [C_0], so pulled-back classes pair as on the base
        let base = conj_pair_family(0);
        let gens = generators(base.space());
        let a = generator_class(base.space(), &gens[i % gens.len()]).unwrap();
        let mut e = a.clone();
        for p in free_labels(n) {
            e = e.pullback_forget(&p).unwrap();
        }
        prop_assert_eq!(pair(&conj_pair_family(n), &e).unwrap(), pair(&base, &a).unwrap());
    }

    #[test]
    fn parse_print_round_trip(seed in any::<u64>()) {
        for (s, text) in random_corpus(seed, 4) {
            let Ok(e) = parse(&s, &text) else { continue };
            let printed = e.to_string();
            prop_assert_eq!(parse(&s, &printed).unwrap(), e.clone(), "{} printed as {}", text, printed);
            prop_assert_eq!(TautExpr::from_json(&e.to_json().unwrap()).unwrap(), e);
        }
    }
}
