//! Symmetric ideal edges at the vertex of the rose and the complexes they
//! span.
//!
//! The half-edges at the rose's vertex are `E(*) = {1, 1̄, …, n, n̄}`. A
//! symmetric ideal edge `(j, side, I)` is the set containing `j` (side out) or
//! `j̄` (side in) together with both halves of every `i ∈ I`.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cactus::{CactusError, CactusGraph, Cladode, Parent, SpanningTree};
use crate::character::{Character, CharacterError};
use crate::freegroup::{GroupError, PureSymAut};
use crate::homology::SimplicialComplex;

/// Ranks above this do not fit the 64-bit half-edge masks.
pub const MAX_RANK: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealEdgeError {
    #[error("rank must be between 2 and {MAX_RANK}, got {0}")]
    Rank(usize),
    #[error("split index {j} outside 1..={n}")]
    SplitIndex { j: usize, n: usize },
    #[error("pair set must be nonempty")]
    EmptySet,
    #[error("pair set contains the split index {0}")]
    SplitInSet(usize),
    #[error("pair index {i} outside 1..={n}")]
    PairIndex { i: usize, n: usize },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("{0} is in the subset but its unbarred partner is not")]
    NotPositive(HalfEdge),
    #[error("subset has defect {0}; hubs need defect 0")]
    Defect(usize),
    #[error("subset has weight {0}; hubs need weight at least 2")]
    Weight(usize),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Cactus(#[from] CactusError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Out,
    In,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Out => Side::In,
            Side::In => Side::Out,
        }
    }
}

/// Half-edge `i` or `ī` at the rose's vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfEdge {
    pub index: usize,
    pub bar: bool,
}

impl HalfEdge {
    pub fn plain(index: usize) -> Self {
        Self { index, bar: false }
    }

    pub fn barred(index: usize) -> Self {
        Self { index, bar: true }
    }

    fn bit(self) -> u64 {
        1u64 << (2 * (self.index - 1) + self.bar as usize)
    }
}

impl fmt::Display for HalfEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bar {
            write!(f, "{}̄", self.index)
        } else {
            write!(f, "{}", self.index)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "EdgeRepr", into = "EdgeRepr")]
pub struct IdealEdge {
    n: usize,
    j: usize,
    side: Side,
    set: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct EdgeRepr {
    #[serde(default, skip_serializing)]
    n: Option<usize>,
    j: usize,
    side: Side,
    #[serde(rename = "I")]
    set: Vec<usize>,
}

impl TryFrom<EdgeRepr> for IdealEdge {
    type Error = IdealEdgeError;
    fn try_from(r: EdgeRepr) -> Result<Self, Self::Error> {
        // without an explicit rank, the smallest one that fits
        let n = r.n.unwrap_or_else(|| r.set.iter().copied().chain([r.j]).max().unwrap_or(0).max(2));
        IdealEdge::new(n, r.j, r.side, r.set)
    }
}

impl From<IdealEdge> for EdgeRepr {
    fn from(e: IdealEdge) -> Self {
        EdgeRepr { n: None, j: e.j, side: e.side, set: e.set }
    }
}

impl IdealEdge {
    pub fn new(n: usize, j: usize, side: Side, mut set: Vec<usize>) -> Result<Self, IdealEdgeError> {
        check_rank(n)?;
        if j == 0 || j > n {
            return Err(IdealEdgeError::SplitIndex { j, n });
        }
        set.sort_unstable();
        set.dedup();
        if set.is_empty() {
            return Err(IdealEdgeError::EmptySet);
        }
        for &i in &set {
            if i == j {
                return Err(IdealEdgeError::SplitInSet(j));
            }
            if i == 0 || i > n {
                return Err(IdealEdgeError::PairIndex { i, n });
            }
        }
        Ok(Self { n, j, side, set })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn split(&self) -> usize {
        self.j
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn pairs(&self) -> &[usize] {
        &self.set
    }

    pub fn is_depot(&self) -> bool {
        self.set.len() == 1
    }

    pub fn is_hub(&self) -> bool {
        self.set.len() == self.n - 1
    }

    /// The same `(j, I)` on the other side of the split pair.
    pub fn flip(&self) -> IdealEdge {
        IdealEdge { side: self.side.flip(), ..self.clone() }
    }

    pub fn split_half(&self) -> HalfEdge {
        HalfEdge { index: self.j, bar: self.side == Side::In }
    }

    pub fn half_edges(&self) -> BTreeSet<HalfEdge> {
        let mut out: BTreeSet<HalfEdge> = self.set.iter().flat_map(|&i| [HalfEdge::plain(i), HalfEdge::barred(i)]).collect();
        out.insert(self.split_half());
        out
    }

    /// The underlying subset of `E(*)` as a bit mask.
    pub fn mask(&self) -> u64 {
        self.half_edges().into_iter().fold(0, |m, h| m | h.bit())
    }

    pub fn compatible(&self, other: &IdealEdge) -> Result<bool, IdealEdgeError> {
        if self.n != other.n {
            return Err(IdealEdgeError::RankMismatch { left: self.n, right: other.n });
        }
        Ok(masks_compatible(self.mask(), other.mask()))
    }

    pub fn is_ascending(&self, chi: &Character) -> Result<bool, IdealEdgeError> {
        if chi.rank() != self.n {
            return Err(IdealEdgeError::RankMismatch { left: self.n, right: chi.rank() });
        }
        let sum = chi.column_sum(self.j, &self.set);
        Ok(match self.side {
            Side::Out => sum > Zero::zero(),
            Side::In => sum < Zero::zero(),
        })
    }

    /// The symmetric Whitehead automorphism `α_{I,j}`.
    pub fn whitehead(&self) -> Result<PureSymAut, IdealEdgeError> {
        Ok(PureSymAut::whitehead(&self.set, self.j, self.n)?)
    }
}

impl fmt::Display for IdealEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.half_edges().iter().map(HalfEdge::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

fn masks_compatible(a: u64, b: u64) -> bool {
    let m = a & b;
    m == 0 || m == a || m == b
}

fn check_rank(n: usize) -> Result<(), IdealEdgeError> {
    if !(2..=MAX_RANK).contains(&n) {
        return Err(IdealEdgeError::Rank(n));
    }
    Ok(())
}

/// All `2n(2^{n-1} - 1)` symmetric ideal edges, ordered by split index,
/// side, pair count and then lexicographically.
pub fn enumerate(n: usize) -> Result<Vec<IdealEdge>, IdealEdgeError> {
    check_rank(n)?;
    let mut out = Vec::new();
    for j in 1..=n {
        let others: Vec<usize> = (1..=n).filter(|&i| i != j).collect();
        let mut sets: Vec<Vec<usize>> = (1..1u64 << others.len())
            .map(|mask| others.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| i).collect())
            .collect();
        sets.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        for side in [Side::Out, Side::In] {
            for s in &sets {
                out.push(IdealEdge { n, j, side, set: s.clone() });
            }
        }
    }
    Ok(out)
}

/// A subset `P ⊆ E(*)` with `ī ∈ P ⇒ i ∈ P`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PositiveSubset {
    n: usize,
    members: BTreeSet<HalfEdge>,
}

impl PositiveSubset {
    pub fn new(n: usize, members: impl IntoIterator<Item = HalfEdge>) -> Result<Self, IdealEdgeError> {
        check_rank(n)?;
        let members: BTreeSet<HalfEdge> = members.into_iter().collect();
        for h in &members {
            if h.index == 0 || h.index > n {
                return Err(IdealEdgeError::PairIndex { i: h.index, n });
            }
            if h.bar && !members.contains(&HalfEdge::plain(h.index)) {
                return Err(IdealEdgeError::NotPositive(*h));
            }
        }
        Ok(Self { n, members })
    }

    /// All of `E(*)`.
    pub fn full(n: usize) -> Result<Self, IdealEdgeError> {
        Self::new(n, (1..=n).flat_map(|i| [HalfEdge::plain(i), HalfEdge::barred(i)]))
    }

    /// `full_pairs` as whole pairs plus the single halves `singles`.
    pub fn from_parts(n: usize, full_pairs: &[usize], singles: &[usize]) -> Result<Self, IdealEdgeError> {
        Self::new(
            n,
            full_pairs
                .iter()
                .flat_map(|&i| [HalfEdge::plain(i), HalfEdge::barred(i)])
                .chain(singles.iter().map(|&i| HalfEdge::plain(i))),
        )
    }

    /// Every positive subset of `E(*)`.
    pub fn all(n: usize) -> Result<Vec<Self>, IdealEdgeError> {
        check_rank(n)?;
        let mut out = Vec::new();
        // each index is absent, half present, or fully present
        for code in 0..3usize.pow(n as u32) {
            let mut c = code;
            let mut members = Vec::new();
            for i in 1..=n {
                match c % 3 {
                    1 => members.push(HalfEdge::plain(i)),
                    2 => members.extend([HalfEdge::plain(i), HalfEdge::barred(i)]),
                    _ => {}
                }
                c /= 3;
            }
            out.push(Self::new(n, members)?);
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &BTreeSet<HalfEdge> {
        &self.members
    }

    pub fn contains(&self, h: HalfEdge) -> bool {
        self.members.contains(&h)
    }

    fn mask(&self) -> u64 {
        self.members.iter().fold(0, |m, h| m | h.bit())
    }

    /// Indices whose pair lies entirely in `P`.
    pub fn full_pairs(&self) -> Vec<usize> {
        (1..=self.n).filter(|&i| self.contains(HalfEdge::barred(i))).collect()
    }

    /// `d(P) = #{ i ∈ P : ī ∉ P }`.
    pub fn defect(&self) -> usize {
        (1..=self.n).filter(|&i| self.contains(HalfEdge::plain(i)) && !self.contains(HalfEdge::barred(i))).count()
    }

    /// Number of full pairs, plus one if the defect is nonzero.
    pub fn weight(&self) -> usize {
        self.full_pairs().len() + usize::from(self.defect() > 0)
    }

    /// The hubs `Θ_i = P ∖ {ī}` for `i ∈ P`.
    pub fn hubs(&self) -> Result<Vec<IdealEdge>, IdealEdgeError> {
        if self.defect() != 0 {
            return Err(IdealEdgeError::Defect(self.defect()));
        }
        if self.weight() < 2 {
            return Err(IdealEdgeError::Weight(self.weight()));
        }
        let pairs = self.full_pairs();
        Ok(pairs
            .iter()
            .map(|&i| IdealEdge {
                n: self.n,
                j: i,
                side: Side::Out,
                set: pairs.iter().copied().filter(|&k| k != i).collect(),
            })
            .collect())
    }
}

/// Which ideal edges go into a complex.
#[derive(Debug, Clone, Copy)]
pub enum Filter<'a> {
    All,
    Ascending(&'a Character),
    /// Edges ascending for a positive character (side out) with `A ⊆ P`.
    PositiveRestricted(&'a PositiveSubset),
}

/// A flag complex of ideal edges; vertex `k` of `complex` is `edges[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealComplex {
    pub n: usize,
    pub edges: Vec<IdealEdge>,
    pub complex: SimplicialComplex,
}

impl IdealComplex {
    pub fn vertex_count(&self) -> usize {
        self.edges.len()
    }

    /// Pairs of compatible vertices, i.e. the 1-skeleton.
    pub fn graph_edges(&self) -> Vec<(usize, usize)> {
        compatibility_pairs(&self.edges)
    }

    pub fn degree(&self, v: usize) -> usize {
        let m = self.edges[v].mask();
        self.edges.iter().enumerate().filter(|&(w, e)| w != v && masks_compatible(m, e.mask())).count()
    }

    pub fn neighbours(&self, v: usize) -> BTreeSet<usize> {
        let m = self.edges[v].mask();
        self.edges
            .iter()
            .enumerate()
            .filter(|&(w, e)| w != v && masks_compatible(m, e.mask()))
            .map(|(w, _)| w)
            .collect()
    }

    pub fn index_of(&self, e: &IdealEdge) -> Option<usize> {
        self.edges.iter().position(|x| x == e)
    }
}

fn compatibility_pairs(edges: &[IdealEdge]) -> Vec<(usize, usize)> {
    let masks: Vec<u64> = edges.iter().map(IdealEdge::mask).collect();
    let mut out = Vec::new();
    for a in 0..masks.len() {
        for b in a + 1..masks.len() {
            if masks_compatible(masks[a], masks[b]) {
                out.push((a, b));
            }
        }
    }
    out
}

pub fn build_complex(n: usize, filter: Filter<'_>) -> Result<IdealComplex, IdealEdgeError> {
    let all = enumerate(n)?;
    let edges: Vec<IdealEdge> = match filter {
        Filter::All => all,
        Filter::Ascending(chi) => {
            let mut keep = Vec::new();
            for e in all {
                if e.is_ascending(chi)? {
                    keep.push(e);
                }
            }
            keep
        }
        Filter::PositiveRestricted(p) => {
            if p.rank() != n {
                return Err(IdealEdgeError::RankMismatch { left: n, right: p.rank() });
            }
            let pm = p.mask();
            all.into_iter().filter(|e| e.side == Side::Out && e.mask() & !pm == 0).collect()
        }
    };
    let complex = SimplicialComplex::flag(edges.len(), &compatibility_pairs(&edges)).expect("indices in range");
    Ok(IdealComplex { n, edges, complex })
}

/// Whether every maximal face of the `P`-restricted complex together with
/// some hub of `P` is still a face.
pub fn covered_by_hub_stars(p: &PositiveSubset) -> Result<bool, IdealEdgeError> {
    let hubs = p.hubs()?;
    let c = build_complex(p.rank(), Filter::PositiveRestricted(p))?;
    let hub_idx: Vec<usize> = hubs.iter().map(|h| c.index_of(h).expect("hubs lie in P")).collect();
    Ok(c.complex.maximal_faces().iter().all(|face| {
        hub_idx.iter().any(|&h| {
            let mut f = face.clone();
            if !f.contains(&h) {
                f.push(h);
            }
            c.complex.contains_face(&f)
        })
    }))
}

/// The blow-up of the rose along one ideal edge, together with the spanning
/// tree whose collapse recovers the trivially marked rose.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowUp {
    pub edge: IdealEdge,
    pub graph: CactusGraph,
    pub collapse_tree: SpanningTree,
}

/// Two-vertex cactus graph: cladode `j` of length 2 with the loops `I` at
/// its interior vertex and every other loop at the basepoint.
pub fn blowup(a: &IdealEdge) -> BlowUp {
    let n = a.n;
    let cladodes = (1..=n)
        .map(|l| {
            if l == a.j {
                Cladode::at_root(l, 2)
            } else if a.set.contains(&l) {
                Cladode::new(l, 1, Parent::Cladode(a.j), 1)
            } else {
                Cladode::at_root(l, 1)
            }
        })
        .collect();
    let graph = CactusGraph::new(n, cladodes).expect("ideal edges blow up to cactus graphs");
    let mut far = graph.reference_tree();
    far.excluded[a.j - 1] = 2;
    let collapse_tree = match a.side {
        Side::Out => far,
        Side::In => graph.reference_tree(),
    };
    BlowUp { edge: a.clone(), graph, collapse_tree }
}

impl BlowUp {
    /// The spanning tree other than [`BlowUp::collapse_tree`].
    pub fn other_tree(&self) -> SpanningTree {
        let mut t = self.collapse_tree.clone();
        let j = self.edge.j - 1;
        t.excluded[j] = 3 - t.excluded[j];
        t
    }

    /// Height of `t` with the collapse tree at height zero.
    pub fn relative_tree_height(&self, chi: &Character, t: &SpanningTree) -> Result<num_rational::BigRational, IdealEdgeError> {
        Ok(self.graph.tree_height(chi, t)? - self.graph.tree_height(chi, &self.collapse_tree)?)
    }

    /// Height of the blown-up graph over that of the rose it collapses to.
    pub fn relative_height(&self, chi: &Character) -> Result<num_rational::BigRational, IdealEdgeError> {
        Ok(self.graph.graph_height(chi)?.value - self.graph.tree_height(chi, &self.collapse_tree)?)
    }

    /// Marking of the rose obtained by collapsing `t`, when collapsing the
    /// collapse tree gives the trivially marked rose.
    pub fn relative_marking(&self, t: &SpanningTree) -> Result<PureSymAut, IdealEdgeError> {
        let base = self.graph.marking_of_tree(&self.collapse_tree)?;
        let m = self.graph.marking_of_tree(t)?;
        Ok(base.inverse()?.compose(&m)?)
    }
}
