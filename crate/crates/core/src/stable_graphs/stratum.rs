use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::divisor::DivisorClassId;
use super::space::MarkedSpace;
use crate::error::{Result, TautError};

pub const WEIERSTRASS: &str = "weierstrass";

/// A point of a vertex: a marking or a half-edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    Leg(String),
    Half(u32),
}

/// A registered opaque vertex class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DecorationKind {
    pub name: String,
    pub codim: u32,
    /// Whether the class pulls back to itself under forgetting a marking on
    /// its vertex.
    pub pullback_stable: bool,
}

impl DecorationKind {
    /// The condition that a node is a Weierstrass point of the genus-2 side.
    pub fn weierstrass() -> Self {
        DecorationKind {
            name: WEIERSTRASS.to_string(),
            codim: 1,
            pullback_stable: true,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            WEIERSTRASS => Some(Self::weierstrass()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Decoration {
    pub kind: DecorationKind,
    pub anchor: Option<Slot>,
}

impl Decoration {
    pub fn weierstrass(anchor: Slot) -> Self {
        Decoration {
            kind: DecorationKind::weierstrass(),
            anchor: Some(anchor),
        }
    }
}

/// A vertex together with the class `α_v` living on its moduli space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DecoratedVertex {
    pub genus: u32,
    pub legs: BTreeMap<String, u32>,
    pub halves: BTreeMap<u32, u32>,
    /// Indices of κ factors, sorted, each at least 1.
    pub kappa: Vec<u32>,
    pub decorations: Vec<Decoration>,
}

impl DecoratedVertex {
    pub fn new(genus: u32) -> Self {
        DecoratedVertex {
            genus,
            ..Default::default()
        }
    }

    pub fn n_points(&self) -> usize {
        self.legs.len() + self.halves.len()
    }

    pub fn dim(&self) -> i64 {
        3 * self.genus as i64 - 3 + self.n_points() as i64
    }

    pub fn is_stable(&self) -> bool {
        2 * self.genus as i64 - 2 + self.n_points() as i64 > 0
    }

    pub fn degree(&self) -> u32 {
        self.legs.values().sum::<u32>()
            + self.halves.values().sum::<u32>()
            + self.kappa.iter().sum::<u32>()
            + self.decorations.iter().map(|d| d.kind.codim).sum::<u32>()
    }

    pub fn slots(&self) -> Vec<Slot> {
        self.legs
            .keys()
            .map(|l| Slot::Leg(l.clone()))
            .chain(self.halves.keys().map(|&h| Slot::Half(h)))
            .collect()
    }

    pub fn has_slot(&self, slot: &Slot) -> bool {
        match slot {
            Slot::Leg(l) => self.legs.contains_key(l),
            Slot::Half(h) => self.halves.contains_key(h),
        }
    }

    pub fn psi(&self, slot: &Slot) -> u32 {
        match slot {
            Slot::Leg(l) => self.legs.get(l).copied().unwrap_or(0),
            Slot::Half(h) => self.halves.get(h).copied().unwrap_or(0),
        }
    }

    pub(crate) fn set_psi(&mut self, slot: &Slot, exp: u32) {
        match slot {
            Slot::Leg(l) => {
                self.legs.insert(l.clone(), exp);
            }
            Slot::Half(h) => {
                self.halves.insert(*h, exp);
            }
        }
    }

    pub(crate) fn remove_slot(&mut self, slot: &Slot) -> u32 {
        match slot {
            Slot::Leg(l) => self.legs.remove(l).unwrap_or(0),
            Slot::Half(h) => self.halves.remove(h).unwrap_or(0),
        }
    }

    pub fn has_decorations(&self) -> bool {
        !self.decorations.is_empty()
    }

    /// No ψ, κ or decoration.
    pub fn is_plain(&self) -> bool {
        self.degree() == 0 && self.decorations.is_empty()
    }

    fn key(&self, desc: &HashMap<u32, HalfDesc>) -> VertexKey {
        let anchored = |slot: &Slot| -> Vec<DecorationKind> {
            let mut v: Vec<DecorationKind> = self
                .decorations
                .iter()
                .filter(|d| d.anchor.as_ref() == Some(slot))
                .map(|d| d.kind.clone())
                .collect();
            v.sort();
            v
        };
        let mut free: Vec<DecorationKind> = self
            .decorations
            .iter()
            .filter(|d| d.anchor.is_none())
            .map(|d| d.kind.clone())
            .collect();
        free.sort();
        let mut halves: Vec<HalfDesc> = self.halves.keys().map(|h| desc[h].clone()).collect();
        halves.sort();
        VertexKey {
            genus: self.genus,
            legs: self
                .legs
                .iter()
                .map(|(l, &e)| (l.clone(), e, anchored(&Slot::Leg(l.clone()))))
                .collect(),
            kappa: self.kappa.clone(),
            free,
            halves,
        }
    }

    fn bare_key(&self) -> VertexKey {
        VertexKey {
            genus: self.genus,
            legs: self.legs.keys().map(|l| (l.clone(), 0, Vec::new())).collect(),
            kappa: Vec::new(),
            free: Vec::new(),
            halves: vec![(0, Vec::new()); self.halves.len()],
        }
    }

    pub(crate) fn sort_decorations(&mut self) {
        self.decorations.sort();
    }
}

type HalfDesc = (u32, Vec<DecorationKind>);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct VertexKey {
    genus: u32,
    legs: Vec<(String, u32, Vec<DecorationKind>)>,
    kappa: Vec<u32>,
    free: Vec<DecorationKind>,
    halves: Vec<HalfDesc>,
}

type EdgeEnd = (usize, HalfDesc);

/// A way to degenerate one vertex along a new node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum VertexSplit {
    /// Self-node: the vertex loses one genus and gains a loop.
    Irr,
    /// Two vertices; the first has genus `genus` and carries `side`.
    Sep { genus: u32, side: BTreeSet<Slot> },
}

/// Dual graph of a boundary stratum together with a class on each vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DecoratedStratum {
    pub vertices: Vec<DecoratedVertex>,
    pub edges: Vec<(u32, u32)>,
}

/// A vertex of a [`StableGraph`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphVertex {
    pub genus: u32,
    pub legs: Vec<String>,
    pub half_edges: Vec<u32>,
}

/// An undecorated stable dual graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableGraph {
    pub vertices: Vec<GraphVertex>,
    pub edges: Vec<(u32, u32)>,
}

impl StableGraph {
    pub fn total_genus(&self) -> u32 {
        let g: i64 = self.vertices.iter().map(|v| v.genus as i64).sum();
        (g + self.edges.len() as i64 - self.vertices.len() as i64 + 1) as u32
    }

    pub fn to_stratum(&self) -> DecoratedStratum {
        DecoratedStratum {
            vertices: self
                .vertices
                .iter()
                .map(|v| DecoratedVertex {
                    genus: v.genus,
                    legs: v.legs.iter().map(|l| (l.clone(), 0)).collect(),
                    halves: v.half_edges.iter().map(|&h| (h, 0)).collect(),
                    ..Default::default()
                })
                .collect(),
            edges: self.edges.clone(),
        }
    }

    pub fn canonical(&self) -> StableGraph {
        self.to_stratum().canonicalize().graph()
    }

    pub fn is_isomorphic(&self, other: &StableGraph) -> bool {
        self.canonical() == other.canonical()
    }

    /// Contract edge `e`; a loop raises the genus of its vertex.
    pub fn contract(&self, e: usize) -> StableGraph {
        let (a, b) = self.edges[e];
        let va = self.vertex_of_half(a).expect("dangling half-edge");
        let vb = self.vertex_of_half(b).expect("dangling half-edge");
        let mut vertices = self.vertices.clone();
        for v in vertices.iter_mut() {
            v.half_edges.retain(|&h| h != a && h != b);
        }
        if va == vb {
            vertices[va].genus += 1;
        } else {
            let merged = vertices[vb].clone();
            vertices[va].genus += merged.genus;
            vertices[va].legs.extend(merged.legs);
            vertices[va].legs.sort();
            vertices[va].half_edges.extend(merged.half_edges);
            vertices[va].half_edges.sort();
            vertices.remove(vb);
        }
        let mut edges = self.edges.clone();
        edges.remove(e);
        StableGraph { vertices, edges }
    }

    fn vertex_of_half(&self, h: u32) -> Option<usize> {
        self.vertices.iter().position(|v| v.half_edges.contains(&h))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }
}

impl DecoratedStratum {
    /// The smooth locus: one vertex carrying every marking.
    pub fn trivial(space: &MarkedSpace) -> Self {
        let mut v = DecoratedVertex::new(space.genus());
        for m in space.markings() {
            v.legs.insert(m.clone(), 0);
        }
        DecoratedStratum {
            vertices: vec![v],
            edges: Vec::new(),
        }
    }

    pub fn codim(&self) -> u32 {
        self.edges.len() as u32 + self.vertices.iter().map(|v| v.degree()).sum::<u32>()
    }

    pub fn is_trivial_graph(&self) -> bool {
        self.edges.is_empty()
    }

    /// Some vertex class exceeds the dimension of its vertex, so the
    /// stratum class is zero.
    pub fn overflows(&self) -> bool {
        self.vertices.iter().any(|v| v.degree() as i64 > v.dim())
    }

    pub fn has_decorations(&self) -> bool {
        self.vertices.iter().any(|v| v.has_decorations())
    }

    pub fn vertex_of_half(&self, h: u32) -> Option<usize> {
        self.vertices.iter().position(|v| v.halves.contains_key(&h))
    }

    pub fn vertex_of_leg(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.legs.contains_key(label))
    }

    pub fn vertex_of_slot(&self, slot: &Slot) -> Option<usize> {
        match slot {
            Slot::Leg(l) => self.vertex_of_leg(l),
            Slot::Half(h) => self.vertex_of_half(*h),
        }
    }

    pub fn partner(&self, h: u32) -> Option<u32> {
        self.edges.iter().find_map(|&(a, b)| {
            if a == h {
                Some(b)
            } else if b == h {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn edge_of_half(&self, h: u32) -> Option<usize> {
        self.edges.iter().position(|&(a, b)| a == h || b == h)
    }

    pub(crate) fn fresh_half(&self) -> u32 {
        self.edges
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .max()
            .map_or(0, |m| m + 1)
    }

    pub fn markings(&self) -> BTreeSet<String> {
        self.vertices
            .iter()
            .flat_map(|v| v.legs.keys().cloned())
            .collect()
    }

    pub fn total_genus(&self) -> u32 {
        self.graph().total_genus()
    }

    /// The underlying dual graph.
    pub fn graph(&self) -> StableGraph {
        StableGraph {
            vertices: self
                .vertices
                .iter()
                .map(|v| GraphVertex {
                    genus: v.genus,
                    legs: v.legs.keys().cloned().collect(),
                    half_edges: v.halves.keys().copied().collect(),
                })
                .collect(),
            edges: self.edges.clone(),
        }
    }

    /// Structural validity as a stratum of `space`.
    pub fn validate(&self, space: &MarkedSpace) -> Result<()> {
        let bad = |msg: String| Err(TautError::InvalidSpace(msg));
        let mut legs = Vec::new();
        let mut halves = BTreeSet::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if !v.is_stable() {
                return bad(format!("vertex {i} is unstable"));
            }
            if v.kappa.contains(&0) {
                return bad(format!("vertex {i} carries kappa_0"));
            }
            legs.extend(v.legs.keys().cloned());
            for &h in v.halves.keys() {
                if !halves.insert(h) {
                    return bad(format!("half-edge {h} appears twice"));
                }
            }
            for d in &v.decorations {
                if let Some(anchor) = &d.anchor {
                    if !v.has_slot(anchor) {
                        return bad(format!("decoration anchored off vertex {i}"));
                    }
                }
            }
        }
        let mut in_edges = BTreeSet::new();
        for &(a, b) in &self.edges {
            if a == b || !in_edges.insert(a) || !in_edges.insert(b) {
                return bad(format!("malformed edge ({a}, {b})"));
            }
        }
        if in_edges != halves {
            return bad("half-edges and edges disagree".into());
        }
        legs.sort();
        let mut expected: Vec<String> = space.markings().to_vec();
        expected.sort();
        if legs != expected {
            return Err(TautError::SpaceMismatch(format!(
                "stratum markings {legs:?} differ from {space}"
            )));
        }
        if self.vertices.is_empty() || !self.is_connected() {
            return bad("graph is not connected".into());
        }
        if self.total_genus() != space.genus() {
            return Err(TautError::SpaceMismatch(format!(
                "stratum genus {} differs from {space}",
                self.total_genus()
            )));
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        self.component_without(None, 0).len() == self.vertices.len()
    }

    // Vertices reachable from `start` without crossing edge `skip`.
    fn component_without(&self, skip: Option<usize>, start: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for (i, &(a, b)) in self.edges.iter().enumerate() {
                if Some(i) == skip {
                    continue;
                }
                let (va, vb) = (
                    self.vertex_of_half(a).expect("dangling half-edge"),
                    self.vertex_of_half(b).expect("dangling half-edge"),
                );
                for (x, y) in [(va, vb), (vb, va)] {
                    if x == v && seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
        }
        seen
    }

    /// The boundary divisor obtained by smoothing every edge except `e`.
    pub fn edge_type(&self, space: &MarkedSpace, e: usize) -> DivisorClassId {
        let (a, b) = self.edges[e];
        let va = self.vertex_of_half(a).expect("dangling half-edge");
        let vb = self.vertex_of_half(b).expect("dangling half-edge");
        let comp = self.component_without(Some(e), va);
        if comp.contains(&vb) {
            return DivisorClassId::Irr;
        }
        let inner_edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(i, &(x, _))| i != e && comp.contains(&self.vertex_of_half(x).unwrap()))
            .count() as i64;
        let genus_sum: i64 = comp.iter().map(|&v| self.vertices[v].genus as i64).sum();
        let genus = (genus_sum + inner_edges - comp.len() as i64 + 1) as u32;
        let legs: Vec<String> = comp
            .iter()
            .flat_map(|&v| self.vertices[v].legs.keys().cloned())
            .collect();
        DivisorClassId::separating(space, genus, legs).expect("sides of a stable graph are stable")
    }

    fn half_descriptors(&self) -> HashMap<u32, HalfDesc> {
        let mut out = HashMap::new();
        for v in &self.vertices {
            for (&h, &e) in &v.halves {
                let mut decos: Vec<DecorationKind> = v
                    .decorations
                    .iter()
                    .filter(|d| d.anchor == Some(Slot::Half(h)))
                    .map(|d| d.kind.clone())
                    .collect();
                decos.sort();
                out.insert(h, (e, decos));
            }
        }
        out
    }

    /// Canonical representative of the isomorphism class: vertices sorted by
    /// an invariant key, edge `k` made of half-edges `2k` and `2k + 1`.
    pub fn canonicalize(&self) -> DecoratedStratum {
        let desc = self.half_descriptors();
        let keys: Vec<VertexKey> = self.vertices.iter().map(|v| v.key(&desc)).collect();
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        let blocks = blocks_of(&order, &keys);

        let mut best: Option<(Vec<(EdgeEnd, EdgeEnd)>, Vec<usize>)> = None;
        for_each_block_permutation(&blocks, &mut |perm: &[usize]| {
            let mut pos = vec![0usize; perm.len()];
            for (p, &v) in perm.iter().enumerate() {
                pos[v] = p;
            }
            let mut code: Vec<(EdgeEnd, EdgeEnd)> = self
                .edges
                .iter()
                .map(|&(a, b)| {
                    let ea = (pos[self.vertex_of_half(a).unwrap()], desc[&a].clone());
                    let eb = (pos[self.vertex_of_half(b).unwrap()], desc[&b].clone());
                    if ea <= eb {
                        (ea, eb)
                    } else {
                        (eb, ea)
                    }
                })
                .collect();
            code.sort();
            if best.as_ref().map_or(true, |(c, _)| code < *c) {
                best = Some((code, perm.to_vec()));
            }
            !self.edges.is_empty()
        });
        let (code, perm) = best.expect("at least one ordering");

        let mut vertices: Vec<DecoratedVertex> = perm
            .iter()
            .map(|&o| {
                let src = &self.vertices[o];
                DecoratedVertex {
                    genus: src.genus,
                    legs: src.legs.clone(),
                    halves: BTreeMap::new(),
                    kappa: src.kappa.clone(),
                    decorations: src
                        .decorations
                        .iter()
                        .filter(|d| !matches!(d.anchor, Some(Slot::Half(_))))
                        .cloned()
                        .collect(),
                }
            })
            .collect();
        let mut edges = Vec::with_capacity(code.len());
        for (k, (x, y)) in code.into_iter().enumerate() {
            let (ha, hb) = (2 * k as u32, 2 * k as u32 + 1);
            for (h, (v, (e, decos))) in [(ha, x), (hb, y)] {
                vertices[v].halves.insert(h, e);
                for kind in decos {
                    vertices[v].decorations.push(Decoration {
                        kind,
                        anchor: Some(Slot::Half(h)),
                    });
                }
            }
            edges.push((ha, hb));
        }
        for v in vertices.iter_mut() {
            v.kappa.sort_unstable();
            v.sort_decorations();
        }
        DecoratedStratum { vertices, edges }
    }

    /// Automorphisms fixing legs and preserving ψ exponents and decorations.
    pub fn automorphism_count(&self) -> u64 {
        let desc = self.half_descriptors();
        let keys: Vec<VertexKey> = self.vertices.iter().map(|v| v.key(&desc)).collect();
        self.count_automorphisms(&keys, &desc)
    }

    /// Automorphisms of the underlying dual graph fixing legs.
    pub fn graph_automorphism_count(&self) -> u64 {
        let keys: Vec<VertexKey> = self.vertices.iter().map(|v| v.bare_key()).collect();
        let desc: HashMap<u32, HalfDesc> = self
            .vertices
            .iter()
            .flat_map(|v| v.halves.keys().map(|&h| (h, (0, Vec::new()))))
            .collect();
        self.count_automorphisms(&keys, &desc)
    }

    fn count_automorphisms(&self, keys: &[VertexKey], desc: &HashMap<u32, HalfDesc>) -> u64 {
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        let blocks = blocks_of(&order, keys);
        let halves: Vec<u32> = self
            .vertices
            .iter()
            .flat_map(|v| v.halves.keys().copied())
            .collect();
        let mut total = 0u64;
        for_each_block_permutation(&blocks, &mut |perm: &[usize]| {
            // `perm` lists the vertices in block order; pairing it with the
            // identity ordering gives the vertex map.
            let mut sigma = vec![0usize; perm.len()];
            for (p, &v) in perm.iter().enumerate() {
                sigma[order[p]] = v;
            }
            let mut phi: HashMap<u32, u32> = HashMap::new();
            let mut used: BTreeSet<u32> = BTreeSet::new();
            total += self.count_half_maps(&halves, 0, &sigma, desc, &mut phi, &mut used);
            true
        });
        total
    }

    fn count_half_maps(
        &self,
        halves: &[u32],
        i: usize,
        sigma: &[usize],
        desc: &HashMap<u32, HalfDesc>,
        phi: &mut HashMap<u32, u32>,
        used: &mut BTreeSet<u32>,
    ) -> u64 {
        let Some(&h) = halves.get(i) else {
            return 1;
        };
        if phi.contains_key(&h) {
            return self.count_half_maps(halves, i + 1, sigma, desc, phi, used);
        }
        let p = self.partner(h).expect("half-edge in an edge");
        let target_v = sigma[self.vertex_of_half(h).unwrap()];
        let partner_v = sigma[self.vertex_of_half(p).unwrap()];
        let mut count = 0;
        let candidates: Vec<u32> = self.vertices[target_v].halves.keys().copied().collect();
        for c in candidates {
            if used.contains(&c) || desc[&c] != desc[&h] {
                continue;
            }
            let q = self.partner(c).expect("half-edge in an edge");
            if used.contains(&q)
                || self.vertex_of_half(q) != Some(partner_v)
                || desc[&q] != desc[&p]
            {
                continue;
            }
            phi.insert(h, c);
            phi.insert(p, q);
            used.insert(c);
            used.insert(q);
            count += self.count_half_maps(halves, i + 1, sigma, desc, phi, used);
            phi.remove(&h);
            phi.remove(&p);
            used.remove(&c);
            used.remove(&q);
        }
        count
    }

    /// Every one-node degeneration of vertex `v`; separating splits are
    /// listed once per ordering of the two new vertices.
    pub(crate) fn graph_splits(&self, v: usize) -> Vec<VertexSplit> {
        let vert = &self.vertices[v];
        let mut out = Vec::new();
        if vert.genus >= 1 {
            out.push(VertexSplit::Irr);
        }
        let slots = vert.slots();
        let n = slots.len();
        for h in 0..=vert.genus {
            for mask in 0u64..(1u64 << n) {
                let side: BTreeSet<Slot> = (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| slots[i].clone())
                    .collect();
                let k = side.len();
                let stable_a = 2 * h as i64 - 2 + k as i64 + 1 > 0;
                let stable_b = 2 * (vert.genus - h) as i64 - 2 + (n - k) as i64 + 1 > 0;
                if stable_a && stable_b {
                    out.push(VertexSplit::Sep { genus: h, side });
                }
            }
        }
        out
    }

    /// Degenerate vertex `v`, keeping ψ exponents on their slots and
    /// dropping κ and decorations of `v`. Returns the index of the new edge.
    pub(crate) fn split_graph_with_edge(&self, v: usize, split: &VertexSplit) -> (Self, usize) {
        let mut out = self.clone();
        let (a, b) = (self.fresh_half(), self.fresh_half() + 1);
        out.vertices[v].kappa.clear();
        out.vertices[v].decorations.clear();
        match split {
            VertexSplit::Irr => {
                let vert = &mut out.vertices[v];
                vert.genus -= 1;
                vert.halves.insert(a, 0);
                vert.halves.insert(b, 0);
            }
            VertexSplit::Sep { genus, side } => {
                let old = out.vertices[v].clone();
                let mut first = DecoratedVertex::new(*genus);
                let mut second = DecoratedVertex::new(old.genus - genus);
                for slot in old.slots() {
                    let target = if side.contains(&slot) {
                        &mut first
                    } else {
                        &mut second
                    };
                    target.set_psi(&slot, old.psi(&slot));
                }
                first.halves.insert(a, 0);
                second.halves.insert(b, 0);
                out.vertices[v] = first;
                out.vertices.push(second);
            }
        }
        out.edges.push((a, b));
        let e = out.edges.len() - 1;
        (out, e)
    }

    pub(crate) fn split_graph(&self, v: usize, split: &VertexSplit) -> Self {
        self.split_graph_with_edge(v, split).0
    }

    /// Restrict the class on vertex `v` to a degeneration: ψ exponents stay
    /// on their slots and each κ factor goes to one of the new vertices.
    pub(crate) fn restrict_split(&self, v: usize, split: &VertexSplit) -> Result<Vec<Self>> {
        let vert = &self.vertices[v];
        if vert.has_decorations() {
            return Err(TautError::UnresolvedDecoration(format!(
                "cannot restrict `{}` to a boundary divisor",
                vert.decorations[0].kind.name
            )));
        }
        let (skeleton, e) = self.split_graph_with_edge(v, split);
        match split {
            VertexSplit::Irr => {
                let mut s = skeleton;
                s.vertices[v].kappa = vert.kappa.clone();
                Ok(vec![s])
            }
            VertexSplit::Sep { .. } => {
                let second = skeleton.vertex_of_half(skeleton.edges[e].1).unwrap();
                let m = vert.kappa.len();
                let mut out = Vec::with_capacity(1 << m);
                for mask in 0u64..(1u64 << m) {
                    let mut s = skeleton.clone();
                    for (i, &k) in vert.kappa.iter().enumerate() {
                        let target = if mask & (1 << i) != 0 { v } else { second };
                        s.vertices[target].kappa.push(k);
                    }
                    for x in [v, second] {
                        s.vertices[x].kappa.sort_unstable();
                    }
                    out.push(s);
                }
                Ok(out)
            }
        }
    }
}

fn blocks_of(order: &[usize], keys: &[VertexKey]) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for &v in order {
        match blocks.last_mut() {
            Some(b) if keys[b[0]] == keys[v] => b.push(v),
            _ => blocks.push(vec![v]),
        }
    }
    blocks
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

// Calls `f` with every concatenation of per-block permutations, stopping
// early once `f` returns false.
fn for_each_block_permutation(blocks: &[Vec<usize>], f: &mut dyn FnMut(&[usize]) -> bool) {
    let options: Vec<Vec<Vec<usize>>> = blocks.iter().map(|b| permutations(b)).collect();
    let mut idx = vec![0usize; blocks.len()];
    loop {
        let perm: Vec<usize> = idx
            .iter()
            .enumerate()
            .flat_map(|(b, &i)| options[b][i].iter().copied())
            .collect();
        if !f(&perm) {
            return;
        }
        let mut b = 0;
        loop {
            if b == idx.len() {
                return;
            }
            idx[b] += 1;
            if idx[b] < options[b].len() {
                break;
            }
            idx[b] = 0;
            b += 1;
        }
    }
}
