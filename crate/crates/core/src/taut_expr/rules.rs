use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};

use super::{euler_char, Monomial, Terms};
use crate::error::{Result, TautError};
use crate::rational::{frac, Rational};
use crate::stable_graphs::{
    enumerate_boundary_divisors, specialize, DecoratedStratum, DivisorClassId, MarkedSpace, Slot,
    VertexSplit,
};

/// Add `c · ξ_{s*}` to `terms`, dropping classes that vanish for degree
/// reasons.
pub(crate) fn add_term(terms: &mut Terms, s: DecoratedStratum, c: Rational) {
    if c.is_zero() || s.overflows() {
        return;
    }
    let s = s.canonicalize();
    let entry = terms.entry(s.clone()).or_insert_with(Rational::zero);
    *entry += c;
    if entry.is_zero() {
        terms.remove(&s);
    }
}

pub(crate) fn normalize_monomial(space: &MarkedSpace, m: &Monomial) -> Result<Terms> {
    if m.codim() as i64 > space.dimension() {
        return Ok(Terms::new());
    }
    for label in m.psi.keys().chain(m.omega.keys()) {
        space.require(label)?;
    }
    let base = match &m.stratum {
        Some(s) => s.clone(),
        None => DecoratedStratum::trivial(space),
    };
    let mut cur = Terms::new();
    add_term(&mut cur, base, Rational::one());
    for _ in 0..m.lambda_exp {
        let mut next = Terms::new();
        for (d, c) in lambda_expansion(space)? {
            for (s, x) in apply_divisor(space, &cur, &d)? {
                add_term(&mut next, s, x * &c);
            }
        }
        cur = next;
    }
    for d in &m.divisors {
        cur = apply_divisor(space, &cur, d)?;
    }
    for (label, &e) in &m.psi {
        cur = apply_psi(&cur, label, e);
    }
    for &a in &m.kappa {
        cur = apply_kappa(space, &cur, a);
    }
    for (label, &e) in &m.omega {
        for _ in 0..e {
            cur = apply_omega(space, &cur, label)?;
        }
    }
    Ok(cur)
}

/// `λ_1` as a combination of boundary divisors.
pub(crate) fn lambda_expansion(space: &MarkedSpace) -> Result<Vec<(DivisorClassId, Rational)>> {
    match space.genus() {
        0 => Ok(Vec::new()),
        1 => Ok(vec![(DivisorClassId::Irr, frac(1, 12))]),
        2 => {
            let mut out = vec![(DivisorClassId::Irr, frac(1, 10))];
            for d in enumerate_boundary_divisors(space) {
                if matches!(&d, DivisorClassId::Separating { genus: 1, .. }) {
                    out.push((d, frac(1, 5)));
                }
            }
            Ok(out)
        }
        g => Err(TautError::UnsupportedGenus(g)),
    }
}

pub(crate) fn apply_psi(terms: &Terms, label: &str, exp: u32) -> Terms {
    let mut out = Terms::new();
    for (s, c) in terms {
        let mut t = s.clone();
        let v = t.vertex_of_leg(label).expect("label checked against the space");
        *t.vertices[v].legs.get_mut(label).unwrap() += exp;
        add_term(&mut out, t, c.clone());
    }
    out
}

pub(crate) fn apply_kappa(space: &MarkedSpace, terms: &Terms, a: u32) -> Terms {
    let mut out = Terms::new();
    if a == 0 {
        let chi = euler_char(space.genus(), space.n());
        for (s, c) in terms {
            add_term(&mut out, s.clone(), c * &chi);
        }
        return out;
    }
    for (s, c) in terms {
        for v in 0..s.vertices.len() {
            let mut t = s.clone();
            t.vertices[v].kappa.push(a);
            t.vertices[v].kappa.sort_unstable();
            add_term(&mut out, t, c.clone());
        }
    }
    out
}

pub(crate) fn apply_divisor(space: &MarkedSpace, terms: &Terms, d: &DivisorClassId) -> Result<Terms> {
    let mut out = Terms::new();
    for (s, c) in terms {
        let spec = specialize(space, s, d)?;
        for deg in spec.degenerations {
            add_term(&mut out, deg.stratum, c * &deg.weight);
        }
        for e in spec.self_edges {
            let (a, b) = s.edges[e];
            for h in [a, b] {
                let mut t = s.clone();
                let v = t.vertex_of_half(h).unwrap();
                *t.vertices[v].halves.get_mut(&h).unwrap() += 1;
                add_term(&mut out, t, -c.clone());
            }
        }
    }
    Ok(out)
}

pub(crate) fn apply_omega(space: &MarkedSpace, terms: &Terms, p: &str) -> Result<Terms> {
    if space.genus() == 0 {
        return Err(TautError::InvalidSpace(format!(
            "omega[{p}] needs positive genus, got {space}"
        )));
    }
    let mut out = Terms::new();
    for (s, c) in terms {
        for (t, x) in omega_on_stratum(s, p)? {
            add_term(&mut out, t, x * c);
        }
    }
    Ok(out)
}

/// `ω_p · ξ_{Γ*}(α)`: `ω_p` restricted to `Γ` is the pullback of `ψ` at the
/// point where `p` sits on the stabilization of `Γ` with all other markings
/// forgotten.
fn omega_on_stratum(s: &DecoratedStratum, p: &str) -> Result<Vec<(DecoratedStratum, Rational)>> {
    let start = s.vertex_of_leg(p).expect("label checked against the space");
    let n = s.vertices.len();
    let mut alive = vec![true; n];
    let mut slots: Vec<BTreeSet<Slot>> = s
        .vertices
        .iter()
        .map(|v| v.halves.keys().map(|&h| Slot::Half(h)).collect())
        .collect();
    slots[start].insert(Slot::Leg(p.to_string()));
    let mut partner: HashMap<u32, u32> = HashMap::new();
    for &(a, b) in &s.edges {
        partner.insert(a, b);
        partner.insert(b, a);
    }
    let mut at = (start, Slot::Leg(p.to_string()));

    loop {
        let unstable = (0..n).find(|&v| alive[v] && s.vertices[v].genus == 0 && slots[v].len() <= 2);
        let Some(v) = unstable else { break };
        let halves: Vec<u32> = slots[v]
            .iter()
            .filter_map(|slot| match slot {
                Slot::Half(h) if partner.contains_key(h) => Some(*h),
                _ => None,
            })
            .collect();
        let holds_p = at.0 == v;
        alive[v] = false;
        match (holds_p, halves.as_slice()) {
            (false, [h]) => {
                let x = partner[h];
                let w = s.vertex_of_half(x).unwrap();
                slots[w].remove(&Slot::Half(x));
                partner.remove(h);
                partner.remove(&x);
            }
            (true, [h]) => {
                let x = partner[h];
                let w = s.vertex_of_half(x).unwrap();
                partner.remove(h);
                partner.remove(&x);
                at = (w, Slot::Half(x));
            }
            (false, [h1, h2]) => {
                let (x1, x2) = (partner[h1], partner[h2]);
                partner.remove(h1);
                partner.remove(h2);
                partner.insert(x1, x2);
                partner.insert(x2, x1);
            }
            _ => unreachable!("stable graphs of positive genus stabilize"),
        }
    }

    let (u, slot) = at;
    let vert = &s.vertices[u];
    let kept = &slots[u];
    if vert.genus == 0 && kept.len() == 3 {
        return Ok(Vec::new());
    }
    let forgotten: Vec<Slot> = vert.slots().into_iter().filter(|x| !kept.contains(x)).collect();
    let mut out = Vec::new();
    let mut main = s.clone();
    let e = main.vertices[u].psi(&slot);
    main.vertices[u].set_psi(&slot, e + 1);
    out.push((main, Rational::one()));
    let total = vert.n_points();
    for mask in 1u64..(1u64 << forgotten.len()) {
        let mut side: BTreeSet<Slot> = (0..forgotten.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| forgotten[i].clone())
            .collect();
        side.insert(slot.clone());
        let rest = total - side.len() + 1;
        if 2 * vert.genus as i64 - 2 + rest as i64 <= 0 {
            continue;
        }
        let split = VertexSplit::Sep { genus: 0, side };
        for t in s.restrict_split(u, &split)? {
            out.push((t, -Rational::one()));
        }
    }
    Ok(out)
}

/// Rewrite a stratum as a generator monomial: the open part with ψ and κ,
/// or a one-edge graph with only leg ψ classes, `ξ_* = |Aut| δ`.
pub(crate) fn unstratify(space: &MarkedSpace, s: &DecoratedStratum) -> Option<(Monomial, Rational)> {
    if s.has_decorations() {
        return None;
    }
    let legs: BTreeMap<String, u32> = s
        .vertices
        .iter()
        .flat_map(|v| v.legs.iter().filter(|(_, &e)| e > 0).map(|(l, &e)| (l.clone(), e)))
        .collect();
    match s.edges.len() {
        0 => Some((
            Monomial {
                psi: legs,
                kappa: s.vertices[0].kappa.clone(),
                ..Default::default()
            },
            Rational::one(),
        )),
        1 => {
            let plain = s
                .vertices
                .iter()
                .all(|v| v.kappa.is_empty() && v.halves.values().all(|&e| e == 0));
            plain.then(|| {
                (
                    Monomial {
                        psi: legs,
                        divisors: vec![s.edge_type(space, 0)],
                        ..Default::default()
                    },
                    Rational::from_integer(s.graph_automorphism_count().into()),
                )
            })
        }
        _ => None,
    }
}
