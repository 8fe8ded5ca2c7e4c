use num_traits::One;

use super::euler_char;
use crate::error::{Result, TautError};
use crate::rational::Rational;
use crate::stable_graphs::{DecoratedStratum, DecoratedVertex, Slot};

fn check_pullback_stable(v: &DecoratedVertex) -> Result<()> {
    match v.decorations.iter().find(|d| !d.kind.pullback_stable) {
        Some(d) => Err(TautError::UnresolvedDecoration(format!(
            "`{}` has no pullback rule",
            d.kind.name
        ))),
        None => Ok(()),
    }
}

/// `π_q^* ξ_{Γ*}(α)`: place `q` on each vertex and pull back the vertex
/// class, using `π^*ψ_s = ψ_s - D_{s,q}` and `π^*κ_b = κ_b - ψ_q^b`.
pub(crate) fn pullback_stratum(s: &DecoratedStratum, q: &str) -> Result<Vec<(DecoratedStratum, Rational)>> {
    let mut out = Vec::new();
    for v in 0..s.vertices.len() {
        let vert = &s.vertices[v];
        check_pullback_stable(vert)?;
        let m = vert.kappa.len();
        for mask in 0u64..(1u64 << m) {
            let mut t = s.clone();
            let tv = &mut t.vertices[v];
            tv.kappa.clear();
            let mut psi_q = 0;
            let mut sign = Rational::one();
            for (i, &b) in vert.kappa.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    psi_q += b;
                    sign = -sign;
                } else {
                    tv.kappa.push(b);
                }
            }
            tv.legs.insert(q.to_string(), psi_q);
            out.push((t, sign));
        }
        for slot in vert.slots() {
            let a = vert.psi(&slot);
            if a == 0 {
                continue;
            }
            let mut t = s.clone();
            let fresh = t.fresh_half();
            let (t_main, t_tail) = (fresh, fresh + 1);
            let main = &mut t.vertices[v];
            main.remove_slot(&slot);
            main.halves.insert(t_main, a - 1);
            for d in main.decorations.iter_mut() {
                if d.anchor.as_ref() == Some(&slot) {
                    d.anchor = Some(Slot::Half(t_main));
                }
            }
            let mut tail = DecoratedVertex::new(0);
            tail.set_psi(&slot, 0);
            tail.legs.insert(q.to_string(), 0);
            tail.halves.insert(t_tail, 0);
            t.vertices.push(tail);
            t.edges.push((t_main, t_tail));
            out.push((t, -Rational::one()));
        }
    }
    Ok(out)
}

/// `π_{q*} ξ_{Γ*}(α)`.
pub(crate) fn pushforward_stratum(s: &DecoratedStratum, q: &str) -> Result<Vec<(DecoratedStratum, Rational)>> {
    let v = s
        .vertex_of_leg(q)
        .ok_or_else(|| TautError::UnknownLabel(q.to_string()))?;
    let vert = &s.vertices[v];
    if vert.genus == 0 && vert.n_points() == 3 {
        return Ok(contract_unstable(s, v, q).into_iter().map(|t| (t, Rational::one())).collect());
    }
    check_pullback_stable(vert)?;
    if vert.decorations.iter().any(|d| d.anchor == Some(Slot::Leg(q.to_string()))) {
        return Err(TautError::UnresolvedDecoration(format!(
            "decoration anchored at the forgotten marking `{q}`"
        )));
    }
    let chi = euler_char(vert.genus, vert.n_points() - 1);
    let c0 = vert.legs[q];
    let mut out = Vec::new();
    let m = vert.kappa.len();
    for mask in 0u64..(1u64 << m) {
        let mut base = s.clone();
        let bv = &mut base.vertices[v];
        bv.legs.remove(q);
        bv.kappa.clear();
        let mut c = c0;
        for (i, &b) in vert.kappa.iter().enumerate() {
            if mask & (1 << i) != 0 {
                c += b;
            } else {
                bv.kappa.push(b);
            }
        }
        if c >= 2 {
            bv.kappa.push(c - 1);
            bv.kappa.sort_unstable();
            out.push((base, Rational::one()));
        } else if c == 1 {
            out.push((base, chi.clone()));
        } else {
            let reduced = bv.clone();
            for slot in reduced.slots() {
                let a = reduced.psi(&slot);
                if a > 0 {
                    let mut t = base.clone();
                    t.vertices[v].set_psi(&slot, a - 1);
                    out.push((t, Rational::one()));
                }
            }
        }
    }
    Ok(out)
}

// Forgetting `q` on a rational vertex with three points contracts it; a
// positive-degree class there has already vanished.
fn contract_unstable(s: &DecoratedStratum, v: usize, q: &str) -> Option<DecoratedStratum> {
    let vert = &s.vertices[v];
    if !vert.is_plain() {
        return None;
    }
    let mut t = s.clone();
    let others: Vec<Slot> = vert.slots().into_iter().filter(|x| *x != Slot::Leg(q.to_string())).collect();
    match others.as_slice() {
        [Slot::Half(h1), Slot::Half(h2)] => {
            let (p1, p2) = (s.partner(*h1).unwrap(), s.partner(*h2).unwrap());
            t.edges.retain(|&(a, b)| ![a, b].iter().any(|x| x == h1 || x == h2));
            t.edges.push((p1, p2));
        }
        [Slot::Leg(l), Slot::Half(h)] => {
            let x = s.partner(*h).unwrap();
            let w = s.vertex_of_half(x).unwrap();
            t.edges.retain(|&(a, b)| a != *h && b != *h);
            let tw = &mut t.vertices[w];
            let e = tw.halves.remove(&x).unwrap();
            tw.legs.insert(l.clone(), e);
            for d in tw.decorations.iter_mut() {
                if d.anchor == Some(Slot::Half(x)) {
                    d.anchor = Some(Slot::Leg(l.clone()));
                }
            }
        }
        _ => unreachable!("target space is stable"),
    }
    t.vertices.remove(v);
    Some(t)
}
