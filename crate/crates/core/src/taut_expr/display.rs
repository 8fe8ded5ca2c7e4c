use std::collections::BTreeMap;
use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::{rules, Monomial, TautExpr};
use crate::error::{Result, TautError};
use crate::rational::{format as fmt_rational, parse_rational, Rational};
use crate::stable_graphs::{
    DecoratedStratum, DecoratedVertex, Decoration, DecorationKind, DivisorClassId, MarkedSpace,
    Slot,
};

fn psi_factor(label: &str, e: u32) -> String {
    if e == 1 {
        format!("psi[{label}]")
    } else {
        format!("psi[{label}]^{e}")
    }
}

fn slot_text(slot: &Slot) -> String {
    match slot {
        Slot::Leg(l) => l.clone(),
        Slot::Half(h) => format!("#{h}"),
    }
}

fn with_power(base: String, e: u32) -> String {
    if e == 0 {
        base
    } else {
        format!("{base}^{e}")
    }
}

/// The generic stratum syntax `G{g: items ; g: items | #a-#b, ...}`.
pub(crate) fn stratum_text(s: &DecoratedStratum) -> String {
    let vertices: Vec<String> = s
        .vertices
        .iter()
        .map(|v| {
            let mut items: Vec<String> = Vec::new();
            items.extend(v.legs.iter().map(|(l, &e)| with_power(l.clone(), e)));
            items.extend(v.halves.iter().map(|(h, &e)| with_power(format!("#{h}"), e)));
            items.extend(v.kappa.iter().map(|a| format!("kappa[{a}]")));
            items.extend(v.decorations.iter().map(|d| {
                let anchor = d.anchor.as_ref().map(slot_text).unwrap_or_default();
                format!("@{}({anchor})", d.kind.name)
            }));
            format!("{}: {}", v.genus, items.join(", "))
        })
        .collect();
    let mut out = format!("G{{{}", vertices.join(" ; "));
    if !s.edges.is_empty() {
        let edges: Vec<String> = s.edges.iter().map(|(a, b)| format!("#{a}-#{b}")).collect();
        out.push_str(&format!(" | {}", edges.join(", ")));
    }
    out.push('}');
    out
}

/// Factors printing `[Γ, α]`, together with `|Aut Γ|`.
fn stratum_factors(space: &MarkedSpace, s: &DecoratedStratum) -> (Vec<String>, u64) {
    let aut = s.graph_automorphism_count();
    match rules::unstratify(space, s) {
        Some((m, _)) => {
            let mut factors: Vec<String> = m.divisors.iter().map(|d| d.to_string()).collect();
            factors.extend(m.psi.iter().map(|(l, &e)| psi_factor(l, e)));
            factors.extend(m.kappa.iter().map(|a| format!("kappa[{a}]")));
            (factors, aut)
        }
        None => (vec![stratum_text(s)], aut),
    }
}

fn monomial_factors(space: &MarkedSpace, m: &Monomial) -> (Vec<String>, u64) {
    let (mut factors, aut) = match &m.stratum {
        Some(s) => stratum_factors(space, s),
        None => (Vec::new(), 1),
    };
    factors.extend(m.divisors.iter().map(|d| d.to_string()));
    factors.extend(m.psi.iter().map(|(l, &e)| psi_factor(l, e)));
    factors.extend(m.omega.iter().map(|(l, &e)| {
        if e == 1 {
            format!("omega[{l}]")
        } else {
            format!("omega[{l}]^{e}")
        }
    }));
    factors.extend((0..m.lambda_exp).map(|_| "lambda".to_string()));
    factors.extend(m.kappa.iter().map(|a| format!("kappa[{a}]")));
    (factors, aut)
}

impl fmt::Display for TautExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let (factors, aut) = monomial_factors(&self.space, m);
            let c = c * Rational::from_integer(aut.into());
            let mut text = if i == 0 {
                fmt_rational(&c)
            } else if c.is_negative() {
                format!(" - {}", fmt_rational(&-c))
            } else {
                format!(" + {}", fmt_rational(&c))
            };
            for factor in factors {
                text.push('*');
                text.push_str(&factor);
            }
            write!(f, "{text}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ExprJson {
    genus: u32,
    markings: Vec<String>,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coefficient: String,
    #[serde(default)]
    psi: BTreeMap<String, u32>,
    #[serde(default)]
    kappa: Vec<u32>,
    #[serde(default)]
    strata: Vec<StratumJson>,
}

#[derive(Serialize, Deserialize)]
struct StratumJson {
    vertices: Vec<VertexJson>,
    edges: Vec<(u32, u32)>,
    #[serde(default)]
    half_edge_psi: BTreeMap<u32, u32>,
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    genus: u32,
    legs: Vec<String>,
    half_edges: Vec<u32>,
    #[serde(default)]
    kappa: Vec<u32>,
    #[serde(default)]
    decorations: Vec<DecorationJson>,
}

#[derive(Serialize, Deserialize)]
struct DecorationJson {
    name: String,
    anchor: Option<String>,
}

fn stratum_json(s: &DecoratedStratum) -> StratumJson {
    StratumJson {
        vertices: s
            .vertices
            .iter()
            .map(|v| VertexJson {
                genus: v.genus,
                legs: v.legs.keys().cloned().collect(),
                half_edges: v.halves.keys().copied().collect(),
                kappa: v.kappa.clone(),
                decorations: v
                    .decorations
                    .iter()
                    .map(|d| DecorationJson {
                        name: d.kind.name.clone(),
                        anchor: d.anchor.as_ref().map(slot_text),
                    })
                    .collect(),
            })
            .collect(),
        edges: s.edges.clone(),
        half_edge_psi: s
            .vertices
            .iter()
            .flat_map(|v| v.halves.iter().filter(|(_, &e)| e > 0).map(|(&h, &e)| (h, e)))
            .collect(),
    }
}

pub(crate) fn parse_anchor(text: &str) -> Result<Slot> {
    match text.strip_prefix('#') {
        Some(h) => h
            .parse()
            .map(Slot::Half)
            .map_err(|_| TautError::Json(format!("bad half-edge anchor `{text}`"))),
        None => Ok(Slot::Leg(text.to_string())),
    }
}

pub(crate) fn decoration_kind(name: &str) -> Result<DecorationKind> {
    DecorationKind::by_name(name)
        .ok_or_else(|| TautError::UnknownLabel(format!("decoration `{name}`")))
}

fn stratum_from_json(sj: &StratumJson, psi: &BTreeMap<String, u32>) -> Result<DecoratedStratum> {
    let mut vertices = Vec::new();
    for vj in &sj.vertices {
        let mut v = DecoratedVertex::new(vj.genus);
        for l in &vj.legs {
            v.legs.insert(l.clone(), psi.get(l).copied().unwrap_or(0));
        }
        for &h in &vj.half_edges {
            v.halves.insert(h, sj.half_edge_psi.get(&h).copied().unwrap_or(0));
        }
        v.kappa = vj.kappa.clone();
        v.kappa.sort_unstable();
        for dj in &vj.decorations {
            v.decorations.push(Decoration {
                kind: decoration_kind(&dj.name)?,
                anchor: dj.anchor.as_deref().map(parse_anchor).transpose()?,
            });
        }
        v.decorations.sort();
        vertices.push(v);
    }
    Ok(DecoratedStratum {
        vertices,
        edges: sj.edges.clone(),
    })
}

impl TautExpr {
    /// Canonical form as JSON; coefficients use the `[Γ, α]` convention.
    pub fn to_json(&self) -> Result<String> {
        let n = self.normalize()?;
        let mut terms = Vec::new();
        for (s, c) in n.strata().expect("normalized") {
            let aut = Rational::from_integer(s.graph_automorphism_count().into());
            let coefficient = fmt_rational(&(c * aut));
            let psi: BTreeMap<String, u32> = s
                .vertices
                .iter()
                .flat_map(|v| v.legs.iter().filter(|(_, &e)| e > 0).map(|(l, &e)| (l.clone(), e)))
                .collect();
            let term = if s.is_trivial_graph() && !s.has_decorations() {
                TermJson {
                    coefficient,
                    psi,
                    kappa: s.vertices[0].kappa.clone(),
                    strata: Vec::new(),
                }
            } else {
                TermJson {
                    coefficient,
                    psi,
                    kappa: Vec::new(),
                    strata: vec![stratum_json(s)],
                }
            };
            terms.push(term);
        }
        let doc = ExprJson {
            genus: self.space.genus(),
            markings: self.space.markings().to_vec(),
            terms,
        };
        Ok(serde_json::to_string_pretty(&doc).expect("expression serializes"))
    }

    pub fn from_json(text: &str) -> Result<TautExpr> {
        let doc: ExprJson = serde_json::from_str(text).map_err(|e| TautError::Json(e.to_string()))?;
        let space = MarkedSpace::new(doc.genus, doc.markings)?;
        let mut out = TautExpr::zero(&space);
        for t in &doc.terms {
            let c = parse_rational(&t.coefficient)?;
            for l in t.psi.keys() {
                space.require(l)?;
            }
            let term = match t.strata.as_slice() {
                [] => {
                    let m = Monomial {
                        psi: t.psi.iter().filter(|(_, &e)| e > 0).map(|(l, &e)| (l.clone(), e)).collect(),
                        kappa: t.kappa.clone(),
                        ..Default::default()
                    };
                    TautExpr::from_monomial(&space, m, c)
                }
                [sj] => {
                    if !t.kappa.is_empty() {
                        return Err(TautError::Json("kappa outside the open stratum".into()));
                    }
                    let s = stratum_from_json(sj, &t.psi)?;
                    TautExpr::stratum_class(&space, s)?.scaled(&c)
                }
                _ => return Err(TautError::Json("at most one stratum per term".into())),
            };
            out = out.add(&term)?;
        }
        out.normalize()
    }
}

impl DivisorClassId {
    /// Parse the printed forms `d_irr` and `d[h;a,b]`.
    pub fn parse(space: &MarkedSpace, text: &str) -> Result<DivisorClassId> {
        if text == "d_irr" {
            return DivisorClassId::irr(space);
        }
        let inner = text
            .strip_prefix("d[")
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| TautError::Json(format!("not a divisor: `{text}`")))?;
        let (h, labels) = inner
            .split_once(';')
            .ok_or_else(|| TautError::Json(format!("not a divisor: `{text}`")))?;
        let h: u32 = h
            .trim()
            .parse()
            .map_err(|_| TautError::Json(format!("bad genus in `{text}`")))?;
        let labels: Vec<&str> = labels.split(',').map(str::trim).filter(|l| !l.is_empty()).collect();
        DivisorClassId::separating(space, h, labels)
    }
}
