//! Basepointed cactus graphs, their spanning trees, and heights of
//! spanning-tree collapses under a character.
//!
//! A graph is given by its cladodes. Cladode `ℓ` of length `L` has vertices
//! `v_0` (its base), `v_1, …, v_{L-1}` and edges `e_t : v_{t-1} → v_t`, with
//! `e_L` returning to the base. Each cladode is attached at a vertex of its
//! parent (`(parent, k)` means `v_k` of the parent) or at the basepoint.
//! Attaching at `(parent, 0)` puts the base on the parent's own base.
//!
//! A spanning tree excludes exactly one edge per cladode. Heights and
//! markings are relative to the reference tree `R`, which excludes `e_1`
//! everywhere: collapsing `R` gives the trivially marked rose.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::character::Character;
use crate::freegroup::{GroupError, Letter, PureSymAut, Word};
use crate::homology::{HomologyError, SimplicialComplex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CactusError {
    #[error("graph needs at least one cladode")]
    Empty,
    #[error("expected {expected} cladodes, got {got}")]
    CladodeCount { expected: usize, got: usize },
    #[error("label {label} is outside 1..={n}")]
    LabelOutOfRange { label: usize, n: usize },
    #[error("label {0} appears twice")]
    DuplicateLabel(usize),
    #[error("cladode {0} has length zero")]
    ZeroLength(usize),
    #[error("cladode {label} is attached to unknown cladode {parent}")]
    UnknownParent { label: usize, parent: usize },
    #[error("cladode {label} is attached to the basepoint at position {position}, expected 0")]
    RootPosition { label: usize, position: usize },
    #[error("cladode {label} is attached at position {position} of cladode {parent}, which has length {length}")]
    PositionOutOfRange { label: usize, parent: usize, position: usize, length: usize },
    #[error("attachment cycle through cladode {0}")]
    AttachmentCycle(usize),
    #[error("vertex {position} of cladode {label} has degree 2 (nothing attached)")]
    BareVertex { label: usize, position: usize },
    #[error("cladode {label} has no edge {edge}")]
    NoSuchEdge { label: usize, edge: usize },
    #[error("forest contains every edge of cladode {0}")]
    FullCladode(usize),
    #[error("spanning tree has {got} entries for {n} cladodes")]
    TreeSize { got: usize, n: usize },
    #[error("character rank {character} does not match graph rank {graph}")]
    RankMismatch { character: usize, graph: usize },
    #[error("cladode {i} is not above cladode {j}")]
    NotAbove { i: usize, j: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parent {
    Root,
    Cladode(usize),
}

impl Serialize for Parent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Parent::Root => s.serialize_str("ROOT"),
            Parent::Cladode(p) => s.serialize_u64(*p as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Parent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Label(usize),
            Name(String),
        }
        match Raw::deserialize(d)? {
            Raw::Label(p) => Ok(Parent::Cladode(p)),
            Raw::Name(s) if s == "ROOT" => Ok(Parent::Root),
            Raw::Name(s) => Err(serde::de::Error::custom(format!("expected a label or \"ROOT\", got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cladode {
    pub label: usize,
    pub length: usize,
    pub parent: Parent,
    pub position: usize,
}

impl Cladode {
    pub fn new(label: usize, length: usize, parent: Parent, position: usize) -> Self {
        Self { label, length, parent, position }
    }

    pub fn at_root(label: usize, length: usize) -> Self {
        Self::new(label, length, Parent::Root, 0)
    }
}

/// A validated cactus graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct CactusGraph {
    n: usize,
    /// Indexed by `label - 1`.
    cladodes: Vec<Cladode>,
    /// Graph vertex of `v_0` for each cladode; the basepoint is vertex 0.
    base_vertex: Vec<usize>,
    /// First interior vertex id of each cladode.
    interior_offset: Vec<usize>,
    vertex_count: usize,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    cladodes: Vec<Cladode>,
}

impl TryFrom<GraphRepr> for CactusGraph {
    type Error = CactusError;
    fn try_from(r: GraphRepr) -> Result<Self, Self::Error> {
        CactusGraph::new(r.n, r.cladodes)
    }
}

impl From<CactusGraph> for GraphRepr {
    fn from(g: CactusGraph) -> Self {
        GraphRepr { n: g.n, cladodes: g.cladodes }
    }
}

/// Relative position of two vertices on one cladode, following its orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PositionOrder {
    Before,
    Same,
    After,
}

impl CactusGraph {
    pub fn new(n: usize, mut cladodes: Vec<Cladode>) -> Result<Self, CactusError> {
        validate(n, &cladodes)?;
        cladodes.sort_by_key(|c| c.label);
        // (p, 0) is the vertex p itself hangs from; store that instead
        for _ in 0..n {
            for idx in 0..n {
                if let (Parent::Cladode(p), 0) = (cladodes[idx].parent, cladodes[idx].position) {
                    cladodes[idx].parent = cladodes[p - 1].parent;
                    cladodes[idx].position = cladodes[p - 1].position;
                }
            }
        }
        let mut interior_offset = Vec::with_capacity(n);
        let mut next = 1;
        for c in &cladodes {
            interior_offset.push(next);
            next += c.length - 1;
        }
        let mut g = Self { n, cladodes, base_vertex: vec![0; n], interior_offset, vertex_count: next };
        for label in g.top_down_order() {
            let c = &g.cladodes[label - 1];
            g.base_vertex[label - 1] = match c.parent {
                Parent::Root => 0,
                Parent::Cladode(p) => g.vertex(p, c.position),
            };
        }
        Ok(g)
    }

    /// All cladodes are loops at the basepoint.
    pub fn rose(n: usize) -> Self {
        Self::new(n, (1..=n).map(|l| Cladode::at_root(l, 1)).collect()).expect("rose is valid")
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn cladodes(&self) -> &[Cladode] {
        &self.cladodes
    }

    pub fn cladode(&self, label: usize) -> &Cladode {
        &self.cladodes[label - 1]
    }

    pub fn length(&self, label: usize) -> usize {
        self.cladodes[label - 1].length
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.cladodes.iter().map(|c| c.length).sum()
    }

    pub fn is_rose(&self) -> bool {
        self.vertex_count == 1
    }

    /// Graph vertex id of `v_k` on cladode `label` (vertex 0 is the basepoint).
    pub fn vertex(&self, label: usize, k: usize) -> usize {
        if k == 0 {
            self.base_vertex[label - 1]
        } else {
            self.interior_offset[label - 1] + k - 1
        }
    }

    /// Where the base of `label` sits: `(parent, position)` with a nonzero
    /// position, or `(Root, 0)`.
    pub fn base_vertex(&self, label: usize) -> (Parent, usize) {
        let c = &self.cladodes[label - 1];
        (c.parent, c.position)
    }

    /// Labels ordered so that every cladode comes after its parent.
    pub fn top_down_order(&self) -> Vec<usize> {
        let depth = |mut l: usize| {
            let mut d = 0;
            while let Parent::Cladode(p) = self.cladodes[l - 1].parent {
                l = p;
                d += 1;
            }
            d
        };
        let mut labels: Vec<usize> = (1..=self.n).collect();
        labels.sort_by_key(|&l| (depth(l), l));
        labels
    }

    /// Cladodes whose edges the path from the base of `label` to the
    /// basepoint runs through, nearest first, with the position reached on each.
    pub fn projections(&self, label: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut cur = label;
        while let Parent::Cladode(p) = self.cladodes[cur - 1].parent {
            let k = self.cladodes[cur - 1].position;
            if k != 0 {
                out.push((p, k));
            }
            cur = p;
        }
        out
    }

    /// Whether `i` is above `j`: the path from the base of `i` to the
    /// basepoint passes through an edge of `j`.
    pub fn is_above(&self, i: usize, j: usize) -> bool {
        self.projections(i).iter().any(|&(p, _)| p == j)
    }

    /// Position on `j` where the path from `i` down to the basepoint meets `j`.
    pub fn projection(&self, i: usize, j: usize) -> Result<usize, CactusError> {
        self.projections(i)
            .into_iter()
            .find(|&(p, _)| p == j)
            .map(|(_, k)| k)
            .ok_or(CactusError::NotAbove { i, j })
    }

    pub fn order(&self, label: usize, a: usize, b: usize) -> PositionOrder {
        let _ = self.length(label);
        match a.cmp(&b) {
            std::cmp::Ordering::Less => PositionOrder::Before,
            std::cmp::Ordering::Equal => PositionOrder::Same,
            std::cmp::Ordering::Greater => PositionOrder::After,
        }
    }

    /// Whether vertex `v_k` lies after edge `e_s` and before edge `e_t`,
    /// i.e. `s ≤ k ≤ t-1`.
    pub fn between(&self, label: usize, s: usize, t: usize, k: usize) -> bool {
        let _ = self.length(label);
        s <= k && k < t
    }

    /// Every edge as `(label, t, from, to)`.
    pub fn edges(&self) -> Vec<(usize, usize, usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for c in &self.cladodes {
            for t in 1..=c.length {
                out.push((c.label, t, self.vertex(c.label, t - 1), self.vertex(c.label, t % c.length)));
            }
        }
        out
    }

    /// Edges that are not loops, in label-then-index order. These index the
    /// vertices of [`forest_complex`].
    pub fn non_loop_edges(&self) -> Vec<(usize, usize)> {
        self.cladodes
            .iter()
            .filter(|c| c.length > 1)
            .flat_map(|c| (1..=c.length).map(move |t| (c.label, t)))
            .collect()
    }

    pub fn reference_tree(&self) -> SpanningTree {
        SpanningTree { excluded: vec![1; self.n] }
    }

    pub fn tree_count(&self) -> usize {
        self.cladodes.iter().map(|c| c.length).product()
    }

    /// All spanning trees, lexicographic in `(s_1, …, s_n)`.
    pub fn spanning_trees(&self) -> SpanningTrees<'_> {
        SpanningTrees { graph: self, next: Some(self.reference_tree()) }
    }

    pub fn check_tree(&self, t: &SpanningTree) -> Result<(), CactusError> {
        if t.excluded.len() != self.n {
            return Err(CactusError::TreeSize { got: t.excluded.len(), n: self.n });
        }
        for (idx, &s) in t.excluded.iter().enumerate() {
            if s == 0 || s > self.cladodes[idx].length {
                return Err(CactusError::NoSuchEdge { label: idx + 1, edge: s });
            }
        }
        Ok(())
    }

    fn check_character(&self, chi: &Character) -> Result<(), CactusError> {
        if chi.rank() != self.n {
            return Err(CactusError::RankMismatch { character: chi.rank(), graph: self.n });
        }
        Ok(())
    }

    /// Height of the collapse of `t`, relative to the reference tree:
    /// `-Σ_ℓ Σ { a_{i,ℓ} : 1 ≤ proj_ℓ(i) ≤ s_ℓ - 1 }`.
    pub fn tree_height(&self, chi: &Character, t: &SpanningTree) -> Result<BigRational, CactusError> {
        self.check_tree(t)?;
        self.check_character(chi)?;
        let mut h = BigRational::zero();
        for i in 1..=self.n {
            for (l, k) in self.projections(i) {
                if k < t.excluded[l - 1] {
                    h -= chi.get(i, l);
                }
            }
        }
        Ok(h)
    }

    /// Height of `t` built up by moving excluded edges one step at a time in
    /// the given cladode order, each step evaluated on the two-vertex graph
    /// left after collapsing the edges both trees share.
    pub fn tree_height_by_switching(
        &self,
        chi: &Character,
        t: &SpanningTree,
        order: &[usize],
    ) -> Result<BigRational, CactusError> {
        self.check_tree(t)?;
        self.check_character(chi)?;
        let mut cur = self.reference_tree();
        let mut h = BigRational::zero();
        for &l in order {
            while cur.excluded[l - 1] < t.excluded[l - 1] {
                let s = cur.excluded[l - 1];
                let mut next = cur.clone();
                next.excluded[l - 1] = s + 1;
                let mut shared = Forest::from_tree(self, &cur);
                shared.edges.remove(&(l, s + 1));
                let small = self.collapse(&shared)?;
                // e_s and e_{s+1} become e_1 and e_2 of the collapsed cladode
                let mut far = small.reference_tree();
                far.excluded[l - 1] = 2;
                h += small.tree_height(chi, &far)?;
                cur = next;
            }
        }
        Ok(h)
    }

    /// The marking of the rose obtained by collapsing `t`. The path in `t`
    /// from the basepoint to each base `b_ℓ` is walked explicitly; every
    /// crossing of an edge `e_1` (the edges missing from the reference tree)
    /// of cladode `k` contributes `x_k^{±1}` by direction, giving `u_ℓ`, and
    /// the conjugator of `x_ℓ` is `u_ℓ^{-1}`.
    pub fn marking_of_tree(&self, t: &SpanningTree) -> Result<PureSymAut, CactusError> {
        self.check_tree(t)?;
        let edges = self.edges();
        let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); self.vertex_count];
        for (idx, &(l, s, from, to)) in edges.iter().enumerate() {
            if t.excluded[l - 1] == s {
                continue;
            }
            adj[from].push((idx, true));
            adj[to].push((idx, false));
        }
        // BFS tree from the basepoint: (edge index, traversed forward)
        let mut came_from: Vec<Option<(usize, bool)>> = vec![None; self.vertex_count];
        let mut seen = vec![false; self.vertex_count];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for &(e, out_of_v) in &adj[v] {
                let (_, _, from, to) = edges[e];
                let w = if out_of_v { to } else { from };
                if !seen[w] {
                    seen[w] = true;
                    came_from[w] = Some((e, out_of_v));
                    queue.push_back(w);
                }
            }
        }
        debug_assert!(seen.iter().all(|&s| s), "complement of one edge per cladode is spanning");
        let mut conjugators = Vec::with_capacity(self.n);
        for l in 1..=self.n {
            let mut letters = Vec::new();
            let mut v = self.base_vertex[l - 1];
            while let Some((e, forward)) = came_from[v] {
                let (k, s, from, to) = edges[e];
                if s == 1 {
                    letters.push(if forward { Letter::pos(k) } else { Letter::neg(k) });
                }
                v = if forward { from } else { to };
            }
            letters.reverse();
            let u = Word::reduce(letters, self.n)?;
            conjugators.push(u.inverse());
        }
        Ok(PureSymAut::new(self.n, conjugators)?)
    }

    /// Maximum tree height with every tree attaining it, in tree order.
    pub fn graph_height(&self, chi: &Character) -> Result<GraphHeight, CactusError> {
        self.check_character(chi)?;
        let mut best: Option<BigRational> = None;
        let mut argmax = Vec::new();
        for t in self.spanning_trees() {
            let h = self.tree_height(chi, &t)?;
            match &best {
                Some(b) if &h < b => {}
                Some(b) if &h == b => argmax.push(t),
                _ => {
                    best = Some(h);
                    argmax = vec![t];
                }
            }
        }
        Ok(GraphHeight { value: best.expect("at least one tree"), argmax })
    }

    /// Quotient by `forest`, contracting each component to a point. Labels
    /// and orientations are kept.
    pub fn collapse(&self, forest: &Forest) -> Result<CactusGraph, CactusError> {
        self.check_forest(forest)?;
        let cladodes = self
            .cladodes
            .iter()
            .map(|c| {
                let new_len = c.length - forest.count_in(c.label);
                let (parent, position) = match c.parent {
                    Parent::Root => (Parent::Root, 0),
                    Parent::Cladode(p) => (Parent::Cladode(p), self.collapsed_position(forest, p, c.position)),
                };
                Cladode { label: c.label, length: new_len, parent, position }
            })
            .collect();
        CactusGraph::new(self.n, cladodes)
    }

    /// Position of `v_k` of `label` after collapsing `forest`.
    fn collapsed_position(&self, forest: &Forest, label: usize, k: usize) -> usize {
        let len = self.length(label) - forest.count_in(label);
        let kept = (1..=k).filter(|&t| !forest.edges.contains(&(label, t))).count();
        kept % len
    }

    /// Spanning tree of `self` whose collapse is the tree `t` of `self/forest`.
    pub fn lift_tree(&self, forest: &Forest, t: &SpanningTree) -> Result<SpanningTree, CactusError> {
        self.check_forest(forest)?;
        let excluded = (1..=self.n)
            .map(|l| {
                let kept: Vec<usize> =
                    (1..=self.length(l)).filter(|&s| !forest.edges.contains(&(l, s))).collect();
                kept.get(t.excluded[l - 1] - 1)
                    .copied()
                    .ok_or(CactusError::NoSuchEdge { label: l, edge: t.excluded[l - 1] })
            })
            .collect::<Result<_, _>>()?;
        Ok(SpanningTree { excluded })
    }

    /// Height of the collapse `self/forest` with its induced marking, on the
    /// same scale as [`CactusGraph::tree_height`].
    pub fn collapse_height(&self, chi: &Character, forest: &Forest) -> Result<BigRational, CactusError> {
        let small = self.collapse(forest)?;
        let offset = self.tree_height(chi, &self.lift_tree(forest, &small.reference_tree())?)?;
        Ok(small.graph_height(chi)?.value + offset)
    }

    pub fn check_forest(&self, forest: &Forest) -> Result<(), CactusError> {
        for &(l, t) in &forest.edges {
            if l == 0 || l > self.n || t == 0 || t > self.length(l) {
                return Err(CactusError::NoSuchEdge { label: l, edge: t });
            }
        }
        for c in &self.cladodes {
            if forest.count_in(c.label) == c.length {
                return Err(CactusError::FullCladode(c.label));
            }
        }
        Ok(())
    }

    /// Every nonempty forest, in lexicographic order of edge sets.
    pub fn forests(&self) -> Vec<Forest> {
        let mut acc: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new()];
        for c in self.cladodes.iter().filter(|c| c.length > 1) {
            let mut next = Vec::new();
            for base in &acc {
                for mask in 0u32..(1 << c.length) - 1 {
                    let mut f = base.clone();
                    for t in 1..=c.length {
                        if mask & (1 << (t - 1)) != 0 {
                            f.insert((c.label, t));
                        }
                    }
                    next.push(f);
                }
            }
            acc = next;
        }
        let mut out: Vec<Forest> = acc.into_iter().filter(|f| !f.is_empty()).map(|edges| Forest { edges }).collect();
        out.sort();
        out
    }
}

fn validate(n: usize, cladodes: &[Cladode]) -> Result<(), CactusError> {
    if n == 0 {
        return Err(CactusError::Empty);
    }
    if cladodes.len() != n {
        return Err(CactusError::CladodeCount { expected: n, got: cladodes.len() });
    }
    let mut by_label: Vec<Option<&Cladode>> = vec![None; n];
    for c in cladodes {
        if c.label == 0 || c.label > n {
            return Err(CactusError::LabelOutOfRange { label: c.label, n });
        }
        if by_label[c.label - 1].is_some() {
            return Err(CactusError::DuplicateLabel(c.label));
        }
        by_label[c.label - 1] = Some(c);
    }
    let by_label: Vec<&Cladode> = by_label.into_iter().map(|c| c.expect("bijective labels")).collect();
    for c in &by_label {
        if c.length == 0 {
            return Err(CactusError::ZeroLength(c.label));
        }
    }
    for c in &by_label {
        match c.parent {
            Parent::Root if c.position != 0 => {
                return Err(CactusError::RootPosition { label: c.label, position: c.position })
            }
            Parent::Root => {}
            Parent::Cladode(p) if p == 0 || p > n => {
                return Err(CactusError::UnknownParent { label: c.label, parent: p })
            }
            Parent::Cladode(p) if c.position >= by_label[p - 1].length => {
                return Err(CactusError::PositionOutOfRange {
                    label: c.label,
                    parent: p,
                    position: c.position,
                    length: by_label[p - 1].length,
                })
            }
            Parent::Cladode(_) => {}
        }
    }
    for c in &by_label {
        let mut cur = c.label;
        let mut steps = 0;
        while let Parent::Cladode(p) = by_label[cur - 1].parent {
            cur = p;
            steps += 1;
            if steps > n {
                return Err(CactusError::AttachmentCycle(c.label));
            }
        }
    }
    for c in &by_label {
        for k in 1..c.length {
            let occupied = by_label.iter().any(|d| d.parent == Parent::Cladode(c.label) && d.position == k);
            if !occupied {
                return Err(CactusError::BareVertex { label: c.label, position: k });
            }
        }
    }
    Ok(())
}

/// Checks every invariant of a cactus graph description, reporting the first
/// violation.
pub fn validate_parts(n: usize, cladodes: &[Cladode]) -> Result<(), CactusError> {
    validate(n, cladodes)
}

impl fmt::Display for CactusGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .cladodes
            .iter()
            .map(|c| match c.parent {
                Parent::Root => format!("{}:{}@*", c.label, c.length),
                Parent::Cladode(p) => format!("{}:{}@{}.{}", c.label, c.length, p, c.position),
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Excluded edge `e_{s_ℓ}` for each cladode, indexed by `label - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpanningTree {
    pub excluded: Vec<usize>,
}

impl SpanningTree {
    pub fn excluded(&self, label: usize) -> usize {
        self.excluded[label - 1]
    }

    /// Non-loop edges of the tree, as forest-complex vertex indices.
    pub fn edge_vertices(&self, g: &CactusGraph) -> Vec<usize> {
        g.non_loop_edges()
            .iter()
            .enumerate()
            .filter(|(_, &(l, t))| self.excluded[l - 1] != t)
            .map(|(i, _)| i)
            .collect()
    }
}

pub struct SpanningTrees<'a> {
    graph: &'a CactusGraph,
    next: Option<SpanningTree>,
}

impl Iterator for SpanningTrees<'_> {
    type Item = SpanningTree;

    fn next(&mut self) -> Option<SpanningTree> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        for idx in (0..succ.excluded.len()).rev() {
            if succ.excluded[idx] < self.graph.cladodes[idx].length {
                succ.excluded[idx] += 1;
                self.next = Some(succ);
                return Some(cur);
            }
            succ.excluded[idx] = 1;
        }
        Some(cur)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphHeight {
    pub value: BigRational,
    pub argmax: Vec<SpanningTree>,
}

impl GraphHeight {
    pub fn is_decisive(&self) -> bool {
        self.argmax.len() == 1
    }
}

/// A set of edges `(label, t)` containing no full cladode.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Forest {
    pub edges: BTreeSet<(usize, usize)>,
}

impl Forest {
    pub fn new(edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self { edges: edges.into_iter().collect() }
    }

    /// All edges of the tree `t`.
    pub fn from_tree(g: &CactusGraph, t: &SpanningTree) -> Self {
        Self::new(
            g.cladodes
                .iter()
                .flat_map(|c| (1..=c.length).filter(move |&s| s != t.excluded[c.label - 1]).map(move |s| (c.label, s))),
        )
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn count_in(&self, label: usize) -> usize {
        self.edges.range((label, 0)..(label + 1, 0)).count()
    }

    pub fn is_subset_of_tree(&self, t: &SpanningTree) -> bool {
        self.edges.iter().all(|&(l, s)| t.excluded[l - 1] != s)
    }
}

/// Complex whose simplices are the nonempty forests, on the vertex set
/// [`CactusGraph::non_loop_edges`]. Its maximal faces are the spanning
/// trees; its face poset is the poset of nonempty forests, so it has the
/// homotopy type of that poset's order complex.
pub fn forest_complex(g: &CactusGraph) -> SimplicialComplex {
    let faces: Vec<Vec<usize>> = g.spanning_trees().map(|t| t.edge_vertices(g)).filter(|f| !f.is_empty()).collect();
    SimplicialComplex::new(g.non_loop_edges().len(), faces).expect("tree edges index non-loop edges")
}

/// The order complex of the poset of nonempty forests, built literally.
/// Only practical for small graphs.
pub fn forest_order_complex(g: &CactusGraph) -> SimplicialComplex {
    let forests = g.forests();
    SimplicialComplex::order_complex(forests.len(), |a, b| {
        let (fa, fb) = (&forests[a].edges, &forests[b].edges);
        fa.len() < fb.len() && fa.is_subset(fb)
    })
    .expect("poset on listed forests")
}

/// Subcomplex of [`forest_complex`] on the ascending forests: those lying in
/// some maximal-height spanning tree.
pub fn ascending_forest_complex(g: &CactusGraph, chi: &Character) -> Result<SimplicialComplex, CactusError> {
    let height = g.graph_height(chi)?;
    let faces: Vec<Vec<usize>> =
        height.argmax.iter().map(|t| t.edge_vertices(g)).filter(|f| !f.is_empty()).collect();
    Ok(SimplicialComplex::new(g.non_loop_edges().len(), faces)?)
}

/// Ascending forests found by comparing the height of each collapse with
/// the height of the graph.
pub fn ascending_forests_by_height(g: &CactusGraph, chi: &Character) -> Result<Vec<Forest>, CactusError> {
    let top = g.graph_height(chi)?.value;
    let mut out = Vec::new();
    for f in g.forests() {
        if g.collapse_height(chi, &f)? == top {
            out.push(f);
        }
    }
    Ok(out)
}

/// Ascending forests found by containment in a maximal-height tree.
pub fn ascending_forests_by_containment(g: &CactusGraph, chi: &Character) -> Result<Vec<Forest>, CactusError> {
    let argmax = g.graph_height(chi)?.argmax;
    Ok(g.forests().into_iter().filter(|f| argmax.iter().any(|t| f.is_subset_of_tree(t))).collect())
}

/// Seeded random cactus graph with `2 ≤ V ≤ max_vertices` and cladode
/// lengths at most 4.
pub fn random_cactus<R: Rng>(rng: &mut R, max_vertices: usize) -> CactusGraph {
    let max_vertices = max_vertices.max(2);
    let target_interior = rng.gen_range(1..max_vertices);
    // cladodes as (length, parent index into `specs` or None, position)
    let mut specs: Vec<(usize, Option<usize>, usize)> = Vec::new();
    let mut budget = target_interior;
    let mut open: VecDeque<(usize, usize)> = VecDeque::new();
    let add = |specs: &mut Vec<(usize, Option<usize>, usize)>,
                   open: &mut VecDeque<(usize, usize)>,
                   budget: &mut usize,
                   rng: &mut R,
                   at: Option<(usize, usize)>| {
        let len = rng.gen_range(1..=(*budget + 1).min(4));
        *budget -= len - 1;
        let idx = specs.len();
        specs.push((len, at.map(|(p, _)| p), at.map_or(0, |(_, k)| k)));
        for k in 1..len {
            open.push_back((idx, k));
        }
    };
    add(&mut specs, &mut open, &mut budget, rng, None);
    loop {
        while let Some(at) = open.pop_front() {
            add(&mut specs, &mut open, &mut budget, rng, Some(at));
        }
        if budget == 0 {
            break;
        }
        let at = random_attachment(rng, &specs);
        add(&mut specs, &mut open, &mut budget, rng, at);
    }
    for _ in 0..rng.gen_range(0..=2) {
        let at = random_attachment(rng, &specs);
        specs.push((1, at.map(|(p, _)| p), at.map_or(0, |(_, k)| k)));
    }
    let n = specs.len();
    let mut labels: Vec<usize> = (1..=n).collect();
    labels.shuffle(rng);
    let cladodes = specs
        .iter()
        .enumerate()
        .map(|(idx, &(len, parent, pos))| Cladode {
            label: labels[idx],
            length: len,
            parent: parent.map_or(Parent::Root, |p| Parent::Cladode(labels[p])),
            position: pos,
        })
        .collect();
    CactusGraph::new(n, cladodes).expect("generator respects the invariants")
}

fn random_attachment<R: Rng>(rng: &mut R, specs: &[(usize, Option<usize>, usize)]) -> Option<(usize, usize)> {
    let slots: usize = 1 + specs.iter().map(|s| s.0).sum::<usize>();
    let mut pick = rng.gen_range(0..slots);
    if pick == 0 {
        return None;
    }
    pick -= 1;
    for (idx, s) in specs.iter().enumerate() {
        if pick < s.0 {
            return Some((idx, pick));
        }
        pick -= s.0;
    }
    unreachable!("pick is below the slot count")
}

/// `count` seeded random graphs with at most `max_vertices` vertices.
pub fn corpus(count: usize, seed: u64, max_vertices: usize) -> Vec<CactusGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_cactus(&mut rng, max_vertices)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn two_vertex() -> CactusGraph {
        CactusGraph::new(2, vec![Cladode::at_root(1, 2), Cladode::new(2, 1, Parent::Cladode(1), 1)]).unwrap()
    }

    fn twelve_cladodes() -> CactusGraph {
        serde_json::from_str(include_str!("../fixtures/twelve_cladodes.json")).unwrap()
    }

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn validate_examples() {
        let g = twelve_cladodes();
        assert_eq!((g.vertex_count(), g.edge_count()), (9, 20));
        assert!(CactusGraph::new(1, vec![Cladode::at_root(1, 2)]).is_err());
        assert_eq!(
            validate_parts(1, &[Cladode::at_root(1, 2)]),
            Err(CactusError::BareVertex { label: 1, position: 1 })
        );
        assert!(CactusGraph::rose(4).is_rose());
        let cyclic = vec![Cladode::new(1, 1, Parent::Cladode(2), 0), Cladode::new(2, 1, Parent::Cladode(1), 0)];
        assert_eq!(validate_parts(2, &cyclic), Err(CactusError::AttachmentCycle(1)));
        assert!(validate_parts(1, &[Cladode::new(1, 1, Parent::Root, 1)]).is_err());
    }

    #[test]
    fn twelve_cladodes_queries() {
        let g = twelve_cladodes();
        assert!(g.is_above(7, 2) && g.is_above(7, 1));
        assert!(!g.is_above(7, 3));
        assert_eq!(g.projection(8, 1).unwrap(), 2);
        assert_eq!(g.vertex(1, 2), g.vertex(3, 0));
        assert!(g.projection(7, 3).is_err());
        assert!((1..=12).all(|k| !g.is_above(1, k)));
        assert_eq!(g.order(1, 1, 3), PositionOrder::Before);
        assert!(g.between(1, 2, 4, 3) && !g.between(1, 2, 4, 1));
    }

    #[test]
    fn spanning_tree_counts() {
        assert_eq!(CactusGraph::rose(3).spanning_trees().count(), 1);
        assert_eq!(two_vertex().spanning_trees().count(), 2);
        let g = twelve_cladodes();
        let trees: Vec<_> = g.spanning_trees().collect();
        assert_eq!(trees.len(), g.tree_count());
        assert_eq!(trees.len(), 4 * 3 * 2 * 3);
        assert_eq!(trees.iter().collect::<BTreeSet<_>>().len(), trees.len());
    }

    #[test]
    fn two_vertex_height_and_marking() {
        let g = two_vertex();
        let chi = Character::from_integers(2, |i, j| (10 * i + j) as i64);
        let far = SpanningTree { excluded: vec![2, 1] };
        assert_eq!(g.tree_height(&chi, &far).unwrap(), -q(21));
        assert_eq!(g.tree_height(&chi, &g.reference_tree()).unwrap(), q(0));
        let m = g.marking_of_tree(&far).unwrap();
        assert_eq!(m, PureSymAut::whitehead(&[2], 1, 2).unwrap().inverse().unwrap());
        assert!(g.marking_of_tree(&g.reference_tree()).unwrap().is_identity());
    }

    #[test]
    fn positive_character_prefers_reference() {
        let g = twelve_cladodes();
        let chi = Character::from_integers(12, |_, _| 1);
        let h = g.graph_height(&chi).unwrap();
        assert_eq!(h.value, q(0));
        assert_eq!(h.argmax, vec![g.reference_tree()]);
    }

    #[test]
    fn marking_matches_height_on_twelve_cladodes() {
        let g = twelve_cladodes();
        let chi = Character::random_generic(12, 3).unwrap();
        for t in g.spanning_trees().step_by(5) {
            let m = g.marking_of_tree(&t).unwrap();
            assert_eq!(chi.evaluate(&m).unwrap(), g.tree_height(&chi, &t).unwrap());
        }
    }

    #[test]
    fn switching_order_is_irrelevant() {
        let g = twelve_cladodes();
        let chi = Character::random_generic(12, 11).unwrap();
        let t = SpanningTree { excluded: vec![4, 3, 2, 2, 1, 1, 1, 1, 1, 1, 1, 1] };
        let direct = g.tree_height(&chi, &t).unwrap();
        let forward: Vec<usize> = (1..=12).collect();
        let backward: Vec<usize> = (1..=12).rev().collect();
        assert_eq!(g.tree_height_by_switching(&chi, &t, &forward).unwrap(), direct);
        assert_eq!(g.tree_height_by_switching(&chi, &t, &backward).unwrap(), direct);
    }

    #[test]
    fn collapse_examples() {
        let g = twelve_cladodes();
        let t = g.spanning_trees().nth(17).unwrap();
        assert!(g.collapse(&Forest::from_tree(&g, &t)).unwrap().is_rose());
        assert_eq!(g.collapse(&Forest::default()).unwrap(), g);
        let two = two_vertex();
        assert_eq!(two.collapse(&Forest::new([(1, 1)])).unwrap(), CactusGraph::rose(2));
        assert_eq!(two.collapse(&Forest::new([(1, 1), (1, 2)])), Err(CactusError::FullCladode(1)));
        let partial = g.collapse(&Forest::new([(1, 2), (2, 3)])).unwrap();
        assert_eq!(partial.vertex_count(), 7);
    }

    #[test]
    fn forest_complex_examples() {
        assert!(forest_complex(&CactusGraph::rose(2)).is_empty());
        let two = forest_complex(&two_vertex());
        assert_eq!(two.maximal_faces(), &[vec![0], vec![1]]);
        let h = two.reduced_homology().unwrap();
        assert_eq!(h.betti(0), 1);
    }

    #[test]
    fn forest_complex_matches_literal_order_complex() {
        for g in corpus(6, 5, 5) {
            let a = forest_complex(&g).reduced_homology().unwrap();
            let b = forest_order_complex(&g).reduced_homology().unwrap();
            assert_eq!(a.dims, b.dims, "graph {g}");
        }
    }

    #[test]
    fn corpus_is_valid_and_seeded() {
        let a = corpus(30, 1, 8);
        assert_eq!(a, corpus(30, 1, 8));
        for g in &a {
            assert!((2..=8).contains(&g.vertex_count()));
            assert!(g.cladodes().iter().all(|c| c.length <= 4));
        }
    }

    #[test]
    fn ascending_routes_agree() {
        let g = twelve_cladodes();
        let chi = Character::random_generic(12, 9).unwrap();
        let small = g.collapse(&Forest::new([(1, 1), (4, 2)])).unwrap();
        assert_eq!(
            ascending_forests_by_height(&small, &chi).unwrap(),
            ascending_forests_by_containment(&small, &chi).unwrap()
        );
    }

    #[test]
    fn json_round_trip() {
        let g = twelve_cladodes();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"ROOT\""));
        assert_eq!(serde_json::from_str::<CactusGraph>(&s).unwrap(), g);
        assert!(serde_json::from_str::<CactusGraph>(r#"{"n":1,"cladodes":[{"label":1,"length":2,"parent":"ROOT","position":0}]}"#).is_err());
    }
}
