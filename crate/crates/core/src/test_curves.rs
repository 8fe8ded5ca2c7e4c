//! Moving one-parameter families, stored as linear functionals on divisor
//! classes.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Result, TautError};
use crate::hyperelliptic_db::{HypClassId, Registry};
use crate::rational::{int, Rational};
use crate::stable_graphs::{enumerate_boundary_divisors, DivisorClassId, MarkedSpace};
use crate::taut_expr::{Monomial, TautExpr};

/// A divisor generator on a marked space.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DivisorGenerator {
    Lambda,
    Psi(String),
    Boundary(DivisorClassId),
}

impl fmt::Display for DivisorGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivisorGenerator::Lambda => write!(f, "lambda"),
            DivisorGenerator::Psi(l) => write!(f, "psi[{l}]"),
            DivisorGenerator::Boundary(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestCurveFunctional {
    space: MarkedSpace,
    values: BTreeMap<DivisorGenerator, Rational>,
    provenance: String,
}

impl TestCurveFunctional {
    /// Every generator of the space must receive a value.
    pub fn new(
        space: &MarkedSpace,
        values: BTreeMap<DivisorGenerator, Rational>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        for g in generators(space) {
            if !values.contains_key(&g) {
                return Err(TautError::InvalidSpace(format!("no value for {g}")));
            }
        }
        if values.len() != generators(space).len() {
            return Err(TautError::InvalidSpace("value for a foreign generator".into()));
        }
        Ok(TestCurveFunctional {
            space: space.clone(),
            values,
            provenance: provenance.into(),
        })
    }

    pub fn space(&self) -> &MarkedSpace {
        &self.space
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn value(&self, g: &DivisorGenerator) -> Option<&Rational> {
        self.values.get(g)
    }

    pub fn values(&self) -> impl Iterator<Item = (&DivisorGenerator, &Rational)> {
        self.values.iter()
    }

    /// `κ_1 = 12λ - δ + Σ ψ_i`, with `δ` the sum of all boundary divisors.
    fn kappa_one(&self) -> Rational {
        let mut total = int(12) * &self.values[&DivisorGenerator::Lambda];
        for (g, v) in &self.values {
            match g {
                DivisorGenerator::Psi(_) => total += v,
                DivisorGenerator::Boundary(_) => total -= v,
                DivisorGenerator::Lambda => {}
            }
        }
        total
    }
}

/// `λ`, each `ψ_i`, and each boundary divisor.
pub fn generators(space: &MarkedSpace) -> Vec<DivisorGenerator> {
    let mut out = vec![DivisorGenerator::Lambda];
    out.extend(space.markings().iter().map(|l| DivisorGenerator::Psi(l.clone())));
    out.extend(enumerate_boundary_divisors(space).into_iter().map(DivisorGenerator::Boundary));
    out
}

/// The class of a generator.
pub fn generator_class(space: &MarkedSpace, g: &DivisorGenerator) -> Result<TautExpr> {
    match g {
        DivisorGenerator::Lambda => Ok(TautExpr::lambda(space)),
        DivisorGenerator::Psi(l) => TautExpr::psi(space, l, 1),
        DivisorGenerator::Boundary(d) => TautExpr::divisor(space, d),
    }
}

pub fn free_labels(n_free: usize) -> Vec<String> {
    (1..=n_free).map(|i| format!("p{i}")).collect()
}

/// A fixed general genus-2 curve with `n_free` fixed points, and a moving
/// conjugate pair `(+, -)`.
///
/// On `(2, {+, -})`: `ψ_± ↦ (2g-2) + (2g+2)`, the rational tail `{+, -}` meets
/// the family at the `2g+2` Weierstrass points, and every other generator
/// pairs to zero. Each fixed point `p_i` is met once by `+` and once by `-`,
/// which adds a rational tail `{±, p_i}`, raises `ψ_±` by one per point and
/// gives `ψ_{p_i} ↦ 2`.
pub fn conj_pair_family(n_free: usize) -> TestCurveFunctional {
    let g = 2i64;
    let mut labels = vec!["+".to_string(), "-".to_string()];
    labels.extend(free_labels(n_free));
    let space = MarkedSpace::new(2, labels).expect("stable");
    let free: Vec<String> = free_labels(n_free);
    let mut values = BTreeMap::new();
    for gen in generators(&space) {
        let v = match &gen {
            DivisorGenerator::Lambda => int(0),
            DivisorGenerator::Psi(l) if l == "+" || l == "-" => int((2 * g - 2) + (2 * g + 2) + n_free as i64),
            DivisorGenerator::Psi(_) => int(2),
            DivisorGenerator::Boundary(DivisorClassId::Irr) => int(0),
            DivisorGenerator::Boundary(DivisorClassId::Separating { genus, markings }) => {
                let tail: Vec<&String> = space.markings().iter().filter(|l| !markings.contains(*l)).collect();
                let moving = tail.iter().filter(|l| **l == "+" || **l == "-").count();
                let fixed = tail.iter().filter(|l| free.contains(l)).count();
                match (*genus, moving, fixed) {
                    (2, 2, 0) => int(2 * g + 2),
                    (2, 1, 1) => int(1),
                    _ => int(0),
                }
            }
        };
        values.insert(gen, v);
    }
    TestCurveFunctional::new(&space, values, "conj-pair").expect("full basis")
}

/// `∫ e · [family]` for a divisor-degree `e`.
pub fn pair(f: &TestCurveFunctional, e: &TautExpr) -> Result<Rational> {
    if e.space() != f.space() {
        return Err(TautError::SpaceMismatch(format!("{} vs {}", e.space(), f.space())));
    }
    let n = e.normalize()?;
    if n.is_zero() {
        return Ok(Rational::zero());
    }
    if n.codim() != Some(1) {
        return Err(TautError::Degree(format!(
            "pairing with a curve needs a divisor class, got codimension {:?}",
            n.codim()
        )));
    }
    let coords = n
        .divisor_coordinates()?
        .ok_or_else(|| TautError::Unsupported("class is not a combination of divisor generators".into()))?;
    let mut total = Rational::zero();
    for (m, c) in coords {
        total += c * generator_value(f, &m)?;
    }
    Ok(total)
}

fn generator_value(f: &TestCurveFunctional, m: &Monomial) -> Result<Rational> {
    let g = match (m.psi.len(), m.divisors.as_slice(), m.kappa.as_slice()) {
        (1, [], []) => DivisorGenerator::Psi(m.psi.keys().next().unwrap().clone()),
        (0, [d], []) => DivisorGenerator::Boundary(d.clone()),
        (0, [], [1]) => return Ok(f.kappa_one()),
        _ => return Err(TautError::Unsupported(format!("no value for the monomial {m:?}"))),
    };
    f.values
        .get(&g)
        .cloned()
        .ok_or_else(|| TautError::Unsupported(format!("no value for {g}")))
}

/// The admissible-cover pairing, reduced to genus one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BCurvePairing {
    /// `∫_{M_{1,2}} -ψ_{w1} · [H_{1,2,0,0}]`.
    pub value: Rational,
    /// The true pairing is `value` times an undetermined positive power of
    /// two.
    pub up_to_positive_power_of_two: bool,
    pub free_points: usize,
}

impl BCurvePairing {
    pub fn is_negative(&self) -> bool {
        self.value < Rational::zero()
    }
}

/// `∫ -π^*⋯π^*ψ_{w1} · [B_n]`. The free points drop out by the projection
/// formula; the remaining integral over `M_{2,1}` is a positive multiple of
/// the genus-one integral.
pub fn b_curve_pairing(n_free: usize) -> Result<BCurvePairing> {
    // The class on M_{2,1+n} whose pairing is being reduced.
    let base = MarkedSpace::new(2, ["w1"])?;
    let mut pulled = TautExpr::psi(&base, "w1", 1)?.neg();
    for p in free_labels(n_free) {
        pulled = pulled.pullback_forget(&p)?;
    }
    debug_assert_eq!(pulled.space().n(), 1 + n_free);

    let h = Registry::shared().class_of(&HypClassId::genus_one(2, 0, 0)?)?;
    let psi = TautExpr::psi(h.space(), "w1", 1)?;
    let value = psi.neg().multiply(&h)?.integrate()?;
    Ok(BCurvePairing {
        value,
        up_to_positive_power_of_two: true,
        free_points: n_free,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn logan(n: usize) -> TautExpr {
        Registry::builtin().class_of(&HypClassId::new(0, 1, n).unwrap()).unwrap()
    }

    #[test]
    fn base_values() {
        let f = conj_pair_family(0);
        assert_eq!(f.value(&DivisorGenerator::Psi("+".into())), Some(&int(8)));
        assert_eq!(f.value(&DivisorGenerator::Lambda), Some(&int(0)));
        let d2 = DivisorClassId::separating(f.space(), 2, Vec::<String>::new()).unwrap();
        assert_eq!(f.value(&DivisorGenerator::Boundary(d2)), Some(&int(6)));
        assert_eq!(f.value(&DivisorGenerator::Boundary(DivisorClassId::Irr)), Some(&int(0)));
        assert_eq!(f.values().count(), 7);
    }

    #[test]
    fn logan_pairing() {
        for n in 0..=3 {
            assert_eq!(pair(&conj_pair_family(n), &logan(n)).unwrap(), int(-2), "n={n}");
        }
    }

    #[test]
    fn termwise_logan_values() {
        let f = conj_pair_family(0);
        let s = f.space().clone();
        let terms = [
            TautExpr::lambda(&s).neg(),
            TautExpr::psi(&s, "+", 1).unwrap(),
            TautExpr::psi(&s, "-", 1).unwrap(),
            TautExpr::divisor(&s, &DivisorClassId::separating(&s, 2, Vec::<String>::new()).unwrap())
                .unwrap()
                .scaled(&int(-3)),
            TautExpr::divisor(&s, &DivisorClassId::separating(&s, 1, Vec::<String>::new()).unwrap())
                .unwrap()
                .neg(),
        ];
        let got: Vec<Rational> = terms.iter().map(|t| pair(&f, t).unwrap()).collect();
        assert_eq!(got, vec![int(0), int(8), int(8), int(-18), int(0)]);
    }

    #[test]
    fn only_the_weierstrass_tail_survives_without_free_points() {
        let f = conj_pair_family(0);
        for d in enumerate_boundary_divisors(f.space()) {
            let v = pair(&f, &TautExpr::divisor(f.space(), &d).unwrap()).unwrap();
            let weierstrass = matches!(&d, DivisorClassId::Separating { genus: 2, markings } if markings.is_empty());
            assert_eq!(v.is_zero(), !weierstrass, "{d}");
        }
    }

    #[test]
    fn pulled_back_classes_pair_as_on_the_base() {
        let base = conj_pair_family(0);
        for n in 1..=3 {
            let f = conj_pair_family(n);
            for g in generators(base.space()) {
                let mut e = generator_class(base.space(), &g).unwrap();
                for p in free_labels(n) {
                    e = e.pullback_forget(&p).unwrap();
                }
                assert_eq!(pair(&f, &e).unwrap(), pair(&base, &generator_class(base.space(), &g).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn kappa_one_relation_holds_numerically() {
        // κ_1 - 12λ + δ - Σψ vanishes against codimension-3 classes on M_{2,1}.
        let s = MarkedSpace::new(2, ["w"]).unwrap();
        let mut rel = TautExpr::kappa(&s, 1).sub(&TautExpr::lambda(&s).scaled(&int(12))).unwrap();
        for g in generators(&s) {
            match g {
                DivisorGenerator::Psi(_) => rel = rel.sub(&generator_class(&s, &g).unwrap()).unwrap(),
                DivisorGenerator::Boundary(_) => rel = rel.add(&generator_class(&s, &g).unwrap()).unwrap(),
                DivisorGenerator::Lambda => {}
            }
        }
        let psi = |e| TautExpr::psi(&s, "w", e).unwrap();
        let tests = [
            psi(3),
            psi(2).multiply(&TautExpr::divisor(&s, &DivisorClassId::Irr).unwrap()).unwrap(),
            psi(1).multiply(&TautExpr::kappa(&s, 2)).unwrap(),
            TautExpr::kappa(&s, 3),
            TautExpr::kappa(&s, 1).multiply(&TautExpr::kappa(&s, 2)).unwrap(),
        ];
        for t in &tests {
            assert_eq!(rel.multiply(t).unwrap().integrate().unwrap(), int(0));
        }
    }

    #[test]
    fn zero_and_degree_errors() {
        let f = conj_pair_family(1);
        assert_eq!(pair(&f, &TautExpr::zero(f.space())).unwrap(), int(0));
        let sq = TautExpr::psi(f.space(), "+", 2).unwrap();
        assert!(matches!(pair(&f, &sq), Err(TautError::Degree(_))));
        assert!(matches!(pair(&f, &TautExpr::one(f.space())), Err(TautError::Degree(_))));
    }

    #[test]
    fn b_curve() {
        for n in 0..=5 {
            let b = b_curve_pairing(n).unwrap();
            assert_eq!(b.value, frac(-1, 8));
            assert!(b.up_to_positive_power_of_two);
            assert!(b.is_negative());
        }
    }
}
