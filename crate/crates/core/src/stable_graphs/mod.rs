//! Stable dual graphs of boundary strata in genus at most two.

mod divisor;
mod space;
mod stratum;

use std::collections::BTreeSet;

pub use divisor::{divisor_to_graph, enumerate_boundary_divisors, DivisorClassId};
pub(crate) use divisor::divisor_stratum;
pub use space::{dimension, validate_label, MarkedSpace, RESERVED_LABEL_CHARS};
pub(crate) use stratum::VertexSplit;
pub use stratum::{
    DecoratedStratum, DecoratedVertex, Decoration, DecorationKind, GraphVertex, Slot, StableGraph,
    WEIERSTRASS,
};

use crate::error::{Result, TautError};
use crate::rational::{frac, Rational};

/// `1 / |Aut|` for automorphisms fixing legs and preserving ψ exponents and
/// decorations.
pub fn automorphism_factor(stratum: &DecoratedStratum) -> Rational {
    frac(1, stratum.automorphism_count() as i64)
}

/// One new-node degeneration of a stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Degeneration {
    pub stratum: DecoratedStratum,
    /// Index of the new edge in `stratum.edges`.
    pub new_edge: usize,
    pub weight: Rational,
}

/// The terms of `δ_D · ξ_{Γ*}(α)`: degenerations creating a node of type `D`,
/// each with its weight, and the existing edges of type `D` that call for an
/// excess contribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Specialization {
    pub degenerations: Vec<Degeneration>,
    pub self_edges: Vec<usize>,
}

/// Degenerate `stratum` along the boundary divisor `divisor`.
///
/// Separating splits are enumerated once per ordering of the two new
/// vertices and loops once, each with weight `1/2`, so that the weights
/// account for the gluing factor of the divisor.
pub fn specialize(
    space: &MarkedSpace,
    stratum: &DecoratedStratum,
    divisor: &DivisorClassId,
) -> Result<Specialization> {
    divisor_stratum(space, divisor)?;
    let half = frac(1, 2);
    let mut degenerations = Vec::new();
    for v in 0..stratum.vertices.len() {
        for split in stratum.graph_splits(v) {
            let (skeleton, e) = stratum.split_graph_with_edge(v, &split);
            if &skeleton.edge_type(space, e) != divisor {
                continue;
            }
            for s in stratum.restrict_split(v, &split)? {
                degenerations.push(Degeneration {
                    stratum: s,
                    new_edge: e,
                    weight: half.clone(),
                });
            }
        }
    }
    let self_edges = (0..stratum.edges.len())
        .filter(|&e| &stratum.edge_type(space, e) == divisor)
        .collect();
    Ok(Specialization {
        degenerations,
        self_edges,
    })
}

/// Canonical undecorated strata of the given codimension.
pub fn enumerate_strata(space: &MarkedSpace, codim: usize) -> BTreeSet<DecoratedStratum> {
    let mut layer: BTreeSet<DecoratedStratum> =
        BTreeSet::from([DecoratedStratum::trivial(space).canonicalize()]);
    for _ in 0..codim {
        let mut next = BTreeSet::new();
        for s in &layer {
            for v in 0..s.vertices.len() {
                for split in s.graph_splits(v) {
                    next.insert(s.split_graph(v, &split).canonicalize());
                }
            }
        }
        layer = next;
    }
    layer
}

/// The stratum `W` on a genus-2 space: a genus-2 vertex meeting a rational
/// vertex with markings `rational_side` at a node that is a Weierstrass
/// point of the genus-2 side.
pub fn w_stratum<S: AsRef<str>>(space: &MarkedSpace, rational_side: &[S]) -> Result<DecoratedStratum> {
    if space.genus() != 2 {
        return Err(TautError::SpaceMismatch(format!("W strata live in genus 2, not {space}")));
    }
    let side: BTreeSet<String> = rational_side.iter().map(|s| s.as_ref().to_string()).collect();
    for m in &side {
        space.require(m)?;
    }
    if side.len() < 2 {
        return Err(TautError::UnstableDivisor(format!(
            "W with rational side {{{}}}",
            side.iter().cloned().collect::<Vec<_>>().join(",")
        )));
    }
    let mut main = DecoratedVertex::new(2);
    let mut tail = DecoratedVertex::new(0);
    for m in space.markings() {
        let v = if side.contains(m) { &mut tail } else { &mut main };
        v.legs.insert(m.clone(), 0);
    }
    main.halves.insert(0, 0);
    tail.halves.insert(1, 0);
    main.decorations.push(Decoration::weierstrass(Slot::Half(0)));
    Ok(DecoratedStratum {
        vertices: vec![main, tail],
        edges: vec![(0, 1)],
    }
    .canonicalize())
}

/// The stratum `γ`: a genus-1 vertex carrying `genus_one_side` and a rational
/// vertex carrying the other markings, joined by two edges.
pub fn gamma_stratum<S: AsRef<str>>(
    space: &MarkedSpace,
    genus_one_side: &[S],
) -> Result<DecoratedStratum> {
    if space.genus() != 2 {
        return Err(TautError::SpaceMismatch(format!("gamma strata live in genus 2, not {space}")));
    }
    let side: BTreeSet<String> = genus_one_side.iter().map(|s| s.as_ref().to_string()).collect();
    for m in &side {
        space.require(m)?;
    }
    if side.len() == space.n() {
        return Err(TautError::UnstableDivisor(
            "gamma needs a marking on the rational side".into(),
        ));
    }
    let mut ell = DecoratedVertex::new(1);
    let mut rat = DecoratedVertex::new(0);
    for m in space.markings() {
        let v = if side.contains(m) { &mut ell } else { &mut rat };
        v.legs.insert(m.clone(), 0);
    }
    ell.halves.insert(0, 0);
    ell.halves.insert(2, 0);
    rat.halves.insert(1, 0);
    rat.halves.insert(3, 0);
    Ok(DecoratedStratum {
        vertices: vec![ell, rat],
        edges: vec![(0, 1), (2, 3)],
    }
    .canonicalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn space(g: u32, m: &[&str]) -> MarkedSpace {
        MarkedSpace::new(g, m.iter().copied()).unwrap()
    }

    fn labels(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("p{i}")).collect()
    }

    #[test]
    fn automorphism_examples() {
        let s = space(2, &[]);
        assert_eq!(automorphism_factor(&DecoratedStratum::trivial(&s)), frac(1, 1));
        let irr = divisor_stratum(&s, &DivisorClassId::Irr).unwrap();
        assert_eq!(automorphism_factor(&irr), frac(1, 2));
        let s = space(2, &["a"]);
        let banana = gamma_stratum(&s, &[] as &[&str]).unwrap();
        assert_eq!(automorphism_factor(&banana), frac(1, 2));
        let w = w_stratum(&space(2, &["a", "b"]), &["a", "b"]).unwrap();
        assert_eq!(automorphism_factor(&w), frac(1, 1));
        let d1 = divisor_stratum(&s, &DivisorClassId::separating(&s, 1, ["a"]).unwrap()).unwrap();
        assert_eq!(d1.automorphism_count(), 1);
        let d1 = divisor_stratum(&space(2, &[]), &DivisorClassId::separating(&space(2, &[]), 1, Vec::<String>::new()).unwrap()).unwrap();
        assert_eq!(d1.automorphism_count(), 2);
    }

    #[test]
    fn psi_breaks_symmetry() {
        let s = space(2, &[]);
        let mut irr = divisor_stratum(&s, &DivisorClassId::Irr).unwrap();
        assert_eq!(irr.graph_automorphism_count(), 2);
        *irr.vertices[0].halves.values_mut().next().unwrap() = 1;
        assert_eq!(irr.automorphism_count(), 1);
        assert_eq!(irr.graph_automorphism_count(), 2);
    }

    #[test]
    fn dumbbell_and_theta_automorphisms() {
        let s = space(2, &[]);
        let codim3 = enumerate_strata(&s, 3);
        let counts: BTreeSet<u64> = codim3.iter().map(|g| g.graph_automorphism_count()).collect();
        // dumbbell: 2 * 2 * 2 = 8; theta graph: 3! * 2 = 12
        assert_eq!(counts, BTreeSet::from([8, 12]));
    }

    #[test]
    fn strata_counts_match_known_tables() {
        let m2 = space(2, &[]);
        let counts: Vec<usize> = (0..=4).map(|k| enumerate_strata(&m2, k).len()).collect();
        assert_eq!(counts, vec![1, 2, 2, 2, 0]);
        let m05 = MarkedSpace::new(0, labels(5)).unwrap();
        assert_eq!(enumerate_strata(&m05, 1).len(), 10);
        assert_eq!(enumerate_strata(&m05, 2).len(), 15);
        let m06 = MarkedSpace::new(0, labels(6)).unwrap();
        assert_eq!(enumerate_strata(&m06, 1).len(), 25);
        assert_eq!(enumerate_strata(&m06, 2).len(), 105);
        assert_eq!(enumerate_strata(&m06, 3).len(), 105);
        let m11 = space(1, &["p"]);
        assert_eq!(enumerate_strata(&m11, 1).len(), 1);
    }

    // Unordered pairs of sides {(h, P), (g - h, P^c)}, plus δ_irr.
    fn brute_force_divisor_count(space: &MarkedSpace) -> usize {
        let g = space.genus();
        let m = space.markings();
        let mut pairs = BTreeSet::new();
        for h in 0..=g {
            for mask in 0u32..(1 << m.len()) {
                let p: BTreeSet<&String> =
                    (0..m.len()).filter(|i| mask & (1 << i) != 0).map(|i| &m[i]).collect();
                let q: BTreeSet<&String> = m.iter().filter(|x| !p.contains(x)).collect();
                let ok = |gen: u32, k: usize| gen > 0 || k >= 2;
                if ok(h, p.len()) && ok(g - h, q.len()) {
                    let a = (h, p);
                    let b = (g - h, q);
                    pairs.insert(if a < b { (a, b) } else { (b, a) });
                }
            }
        }
        pairs.len() + usize::from(g >= 1)
    }

    #[test]
    fn boundary_enumeration_matches_brute_force() {
        for g in 0..=2 {
            for n in 0..=5 {
                let Ok(s) = MarkedSpace::new(g, labels(n)) else { continue };
                let found = enumerate_boundary_divisors(&s);
                assert_eq!(found.len(), brute_force_divisor_count(&s), "g={g} n={n}");
                for d in &found {
                    let graph = divisor_to_graph(&s, d).unwrap();
                    assert!(graph.to_stratum().vertices.iter().all(|v| v.is_stable()));
                    assert_eq!(graph.total_genus(), g);
                    let st = graph.to_stratum();
                    assert_eq!(&st.edge_type(&s, 0), d);
                    assert_eq!(st.codim(), 1);
                    assert_eq!(st.canonicalize(), st.canonicalize().canonicalize());
                }
                assert_eq!(enumerate_strata(&s, 1).len(), found.len());
            }
        }
    }

    #[test]
    fn canonical_form_forgets_labelling() {
        let s = space(2, &["a", "b"]);
        let g = gamma_stratum(&s, &["a"]).unwrap();
        let mut relabelled = g.clone();
        relabelled.vertices.reverse();
        let remap: BTreeMap<u32, u32> = [(0, 7), (1, 3), (2, 5), (3, 11)].into_iter().collect();
        for v in relabelled.vertices.iter_mut() {
            v.halves = v.halves.iter().map(|(h, e)| (remap[h], *e)).collect();
        }
        relabelled.edges = g.edges.iter().map(|(a, b)| (remap[b], remap[a])).collect();
        assert_eq!(relabelled.canonicalize(), g);
    }

    #[test]
    fn specialize_examples() {
        let s = space(2, &["+", "-"]);
        let d1 = DivisorClassId::separating(&s, 1, Vec::<String>::new()).unwrap();
        let spec = specialize(&s, &DecoratedStratum::trivial(&s), &d1).unwrap();
        assert!(spec.self_edges.is_empty());
        let graphs: BTreeSet<_> = spec.degenerations.iter().map(|d| d.stratum.canonicalize()).collect();
        assert_eq!(graphs, BTreeSet::from([divisor_stratum(&s, &d1).unwrap()]));
        // the ordered splits of a symmetric divisor add up to weight one
        let total: Rational = spec.degenerations.iter().map(|d| d.weight.clone()).sum();
        assert_eq!(total, frac(1, 1));

        let s = space(2, &["w1", "w2"]);
        let d2 = DivisorClassId::separating(&s, 2, Vec::<String>::new()).unwrap();
        let st = divisor_stratum(&s, &d2).unwrap();
        let spec = specialize(&s, &st, &d2).unwrap();
        assert!(spec.degenerations.is_empty());
        assert_eq!(spec.self_edges, vec![0]);
    }

    #[test]
    fn specialize_matches_codim_two_enumeration() {
        let s = space(2, &["+", "-"]);
        let d1p = DivisorClassId::separating(&s, 1, ["+"]).unwrap();
        let d1 = DivisorClassId::separating(&s, 1, Vec::<String>::new()).unwrap();
        let base = divisor_stratum(&s, &d1p).unwrap();
        let spec = specialize(&s, &base, &d1).unwrap();
        let found: BTreeSet<_> = spec.degenerations.iter().map(|d| d.stratum.canonicalize()).collect();
        // brute force: codim-2 graphs with an edge of each type
        let expected: BTreeSet<_> = enumerate_strata(&s, 2)
            .into_iter()
            .filter(|g| {
                let types: Vec<_> = (0..2).map(|e| g.edge_type(&s, e)).collect();
                (types[0] == d1p && types[1] == d1) || (types[0] == d1 && types[1] == d1p)
            })
            .collect();
        assert!(!expected.is_empty());
        assert_eq!(found, expected);
    }

    #[test]
    fn contraction_recovers_the_stratum() {
        for n in 0..=3 {
            let s = MarkedSpace::new(2, labels(n)).unwrap();
            let divisors = enumerate_boundary_divisors(&s);
            for base in enumerate_strata(&s, 1) {
                for d in &divisors {
                    for deg in specialize(&s, &base, d).unwrap().degenerations {
                        let contracted = deg.stratum.graph().contract(deg.new_edge);
                        assert!(contracted.is_isomorphic(&base.graph()));
                        assert_eq!(&deg.stratum.edge_type(&s, deg.new_edge), d);
                    }
                }
            }
        }
    }

    #[test]
    fn weierstrass_restriction_is_refused() {
        let s = space(2, &["a", "b", "c"]);
        let w = w_stratum(&s, &["a", "b"]).unwrap();
        let d = DivisorClassId::Irr;
        assert!(matches!(specialize(&s, &w, &d), Err(TautError::UnresolvedDecoration(_))));
    }

    #[test]
    fn graph_json_round_trip() {
        let s = space(2, &["w1", "w2"]);
        let g = divisor_to_graph(&s, &DivisorClassId::separating(&s, 2, Vec::<String>::new()).unwrap()).unwrap();
        let back: StableGraph = serde_json::from_str(&g.to_json()).unwrap();
        assert_eq!(back, g);
        assert!(g.to_json().contains("half_edges"));
    }

    #[test]
    fn validation() {
        let s = space(2, &["a", "b"]);
        assert!(w_stratum(&s, &["a", "b"]).unwrap().validate(&s).is_ok());
        assert!(gamma_stratum(&s, &["a"]).unwrap().validate(&s).is_ok());
        assert!(w_stratum(&s, &["a"]).is_err());
        assert!(gamma_stratum(&s, &["a", "b"]).is_err());
        let other = space(2, &["a", "c"]);
        assert!(w_stratum(&s, &["a", "b"]).unwrap().validate(&other).is_err());
    }
}
