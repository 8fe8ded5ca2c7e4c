use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::space::MarkedSpace;
use super::stratum::{DecoratedStratum, Slot, StableGraph, VertexSplit};
use crate::error::{Result, TautError};

/// A boundary divisor: `δ_irr`, or `δ_{h,P}` with the genus-`h` side carrying
/// the markings `P`.
///
/// Separating ids are always stored in canonical form: the side of larger
/// genus; between sides of equal genus the side without markings, or else the
/// side holding the lexicographically least marking.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DivisorClassId {
    Irr,
    Separating {
        genus: u32,
        markings: BTreeSet<String>,
    },
}

fn side_is_stable(genus: u32, n_markings: usize) -> bool {
    // one extra point for the node
    2 * genus as i64 - 2 + n_markings as i64 + 1 > 0
}

impl DivisorClassId {
    pub fn irr(space: &MarkedSpace) -> Result<Self> {
        if space.genus() == 0 {
            return Err(TautError::UnstableDivisor("d_irr in genus 0".into()));
        }
        Ok(DivisorClassId::Irr)
    }

    /// `δ_{h,P}` in canonical form; unstable choices are rejected.
    pub fn separating<I, S>(space: &MarkedSpace, h: u32, markings: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let p: BTreeSet<String> = markings.into_iter().map(Into::into).collect();
        for m in &p {
            space.require(m)?;
        }
        let g = space.genus();
        let name = || format!("d[{h};{}]", p.iter().cloned().collect::<Vec<_>>().join(","));
        if h > g {
            return Err(TautError::UnstableDivisor(name()));
        }
        let complement: BTreeSet<String> = space
            .markings()
            .iter()
            .filter(|m| !p.contains(*m))
            .cloned()
            .collect();
        if !side_is_stable(h, p.len()) || !side_is_stable(g - h, complement.len()) {
            return Err(TautError::UnstableDivisor(name()));
        }
        let other_h = g - h;
        let keep_first = if h != other_h {
            h > other_h
        } else if p.is_empty() || complement.is_empty() {
            p.is_empty()
        } else {
            let least = space.markings().iter().min().expect("non-empty markings");
            p.contains(least)
        };
        Ok(if keep_first {
            DivisorClassId::Separating { genus: h, markings: p }
        } else {
            DivisorClassId::Separating {
                genus: other_h,
                markings: complement,
            }
        })
    }

    pub fn is_irr(&self) -> bool {
        matches!(self, DivisorClassId::Irr)
    }
}

impl fmt::Display for DivisorClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivisorClassId::Irr => write!(f, "d_irr"),
            DivisorClassId::Separating { genus, markings } => {
                let labels: Vec<&str> = markings.iter().map(String::as_str).collect();
                write!(f, "d[{genus};{}]", labels.join(","))
            }
        }
    }
}

/// The one-edge dual graph of a boundary divisor.
pub fn divisor_to_graph(space: &MarkedSpace, id: &DivisorClassId) -> Result<StableGraph> {
    Ok(divisor_stratum(space, id)?.graph())
}

pub(crate) fn divisor_stratum(space: &MarkedSpace, id: &DivisorClassId) -> Result<DecoratedStratum> {
    let trivial = DecoratedStratum::trivial(space);
    let split = match id {
        DivisorClassId::Irr => {
            if space.genus() == 0 {
                return Err(TautError::UnstableDivisor("d_irr in genus 0".into()));
            }
            VertexSplit::Irr
        }
        DivisorClassId::Separating { genus, markings } => {
            // re-validate: ids may come from deserialized input
            let canonical = DivisorClassId::separating(space, *genus, markings.iter().cloned())?;
            if &canonical != id {
                return Err(TautError::Json(format!("{id} is not in canonical form")));
            }
            VertexSplit::Sep {
                genus: *genus,
                side: markings.iter().map(|m| Slot::Leg(m.clone())).collect(),
            }
        }
    };
    Ok(trivial.split_graph(0, &split).canonicalize())
}

/// All boundary divisors of the space, in canonical form.
pub fn enumerate_boundary_divisors(space: &MarkedSpace) -> BTreeSet<DivisorClassId> {
    let trivial = DecoratedStratum::trivial(space);
    trivial
        .graph_splits(0)
        .iter()
        .map(|split| {
            let (degenerate, edge) = trivial.split_graph_with_edge(0, split);
            degenerate.edge_type(space, edge)
        })
        .collect()
}
