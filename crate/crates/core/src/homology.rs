//! Finite abstract simplicial complexes and their reduced integral homology.
//!
//! Homology is computed from the augmented chain complex
//! `… → C_1 → C_0 → C_{-1} = Z`, so the empty complex has `H̃_{-1} = Z` and
//! every nonempty complex has `H̃_{-1} = 0`. Boundary matrices are first
//! reduced by sparse elimination on unit pivots (unimodular, so the Smith form
//! is unchanged); whatever is left goes through a dense Smith normal form over
//! arbitrary-precision integers.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on the total number of faces a homology computation will touch.
pub const DEFAULT_FACE_BUDGET: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("vertex {vertex} out of range for {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("face with repeated vertex {0}")]
    RepeatedVertex(usize),
    #[error("empty face listed as maximal")]
    EmptyFace,
    #[error("complex has {faces} faces, over the budget of {budget}")]
    BudgetExceeded { faces: usize, budget: usize },
    #[error("elementary divisor {0} does not fit in 128 bits")]
    TorsionOverflow(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ComplexRepr", into = "ComplexRepr")]
pub struct SimplicialComplex {
    vertex_count: usize,
    maximal_faces: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct ComplexRepr {
    vertices: usize,
    maximal_faces: Vec<Vec<usize>>,
}

impl TryFrom<ComplexRepr> for SimplicialComplex {
    type Error = HomologyError;
    fn try_from(r: ComplexRepr) -> Result<Self, Self::Error> {
        SimplicialComplex::new(r.vertices, r.maximal_faces)
    }
}

impl From<SimplicialComplex> for ComplexRepr {
    fn from(c: SimplicialComplex) -> Self {
        ComplexRepr { vertices: c.vertex_count, maximal_faces: c.maximal_faces }
    }
}

impl SimplicialComplex {
    /// Normalizes `faces` (sorted vertices, non-maximal faces dropped, faces
    /// in canonical order) after validating them.
    pub fn new(vertex_count: usize, faces: Vec<Vec<usize>>) -> Result<Self, HomologyError> {
        let mut sets: Vec<Vec<usize>> = Vec::with_capacity(faces.len());
        for mut f in faces {
            if f.is_empty() {
                return Err(HomologyError::EmptyFace);
            }
            f.sort_unstable();
            if let Some(w) = f.windows(2).find(|w| w[0] == w[1]) {
                return Err(HomologyError::RepeatedVertex(w[0]));
            }
            if let Some(&v) = f.iter().find(|&&v| v >= vertex_count) {
                return Err(HomologyError::VertexOutOfRange { vertex: v, count: vertex_count });
            }
            sets.push(f);
        }
        sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        sets.dedup();
        let mut maximal: Vec<Vec<usize>> = Vec::new();
        for f in sets {
            if !maximal.iter().any(|m| is_subset(&f, m)) {
                maximal.push(f);
            }
        }
        maximal.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(Self { vertex_count, maximal_faces: maximal })
    }

    pub fn empty() -> Self {
        Self { vertex_count: 0, maximal_faces: Vec::new() }
    }

    /// Flag (clique) complex of a graph on `vertex_count` vertices.
    pub fn flag(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self, HomologyError> {
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); vertex_count];
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= vertex_count {
                    return Err(HomologyError::VertexOutOfRange { vertex: v, count: vertex_count });
                }
            }
            if a == b {
                return Err(HomologyError::RepeatedVertex(a));
            }
            adj[a].insert(b);
            adj[b].insert(a);
        }
        let mut cliques = Vec::new();
        let all: BTreeSet<usize> = (0..vertex_count).collect();
        bron_kerbosch(&adj, Vec::new(), all, BTreeSet::new(), &mut cliques);
        Self::new(vertex_count, cliques)
    }

    /// Order complex of a finite poset given by its strict order relation.
    pub fn order_complex(
        element_count: usize,
        less: impl Fn(usize, usize) -> bool,
    ) -> Result<Self, HomologyError> {
        let mut edges = Vec::new();
        for a in 0..element_count {
            for b in a + 1..element_count {
                if less(a, b) || less(b, a) {
                    edges.push((a, b));
                }
            }
        }
        // chains are exactly the cliques of the comparability graph
        Self::flag(element_count, &edges)
    }

    /// Full subcomplex spanned by the vertices for which `keep` holds,
    /// reindexed in increasing order of the kept vertices.
    pub fn induced(&self, keep: impl Fn(usize) -> bool) -> (Self, Vec<usize>) {
        let kept: Vec<usize> = (0..self.vertex_count).filter(|&v| keep(v)).collect();
        let index: HashMap<usize, usize> = kept.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let faces = self
            .maximal_faces
            .iter()
            .map(|f| f.iter().filter_map(|v| index.get(v).copied()).collect::<Vec<_>>())
            .filter(|f| !f.is_empty())
            .collect();
        (Self::new(kept.len(), faces).expect("restriction of a valid complex"), kept)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn maximal_faces(&self) -> &[Vec<usize>] {
        &self.maximal_faces
    }

    pub fn is_empty(&self) -> bool {
        self.maximal_faces.is_empty()
    }

    /// Dimension, with `-1` for the empty complex.
    pub fn dim(&self) -> i64 {
        self.maximal_faces.iter().map(|f| f.len() as i64 - 1).max().unwrap_or(-1)
    }

    /// Vertices that lie in some face.
    pub fn used_vertices(&self) -> BTreeSet<usize> {
        self.maximal_faces.iter().flatten().copied().collect()
    }

    pub fn contains_face(&self, face: &[usize]) -> bool {
        let mut f = face.to_vec();
        f.sort_unstable();
        self.maximal_faces.iter().any(|m| is_subset(&f, m))
    }

    /// All `k`-dimensional faces, sorted.
    pub fn close_faces(&self, k: usize) -> Vec<Vec<usize>> {
        let size = k + 1;
        let mut out: HashSet<Vec<usize>> = HashSet::new();
        for f in &self.maximal_faces {
            if f.len() < size {
                continue;
            }
            for_each_subset(f, size, |s| {
                out.insert(s.to_vec());
            });
        }
        let mut v: Vec<Vec<usize>> = out.into_iter().collect();
        v.sort();
        v
    }

    /// Face counts `f_0, f_1, …, f_dim`.
    pub fn face_counts(&self) -> Vec<usize> {
        (0..=self.dim().max(-1))
            .map(|k| self.close_faces(k as usize).len())
            .collect()
    }

    /// Upper bound on the number of faces, from the maximal faces alone.
    pub fn face_bound(&self) -> usize {
        self.maximal_faces
            .iter()
            .map(|f| 1usize.checked_shl(f.len() as u32).map_or(usize::MAX, |x| x - 1))
            .fold(0usize, |a, b| a.saturating_add(b))
    }

    pub fn relabel(&self, perm: &[usize]) -> Self {
        let faces = self.maximal_faces.iter().map(|f| f.iter().map(|&v| perm[v]).collect()).collect();
        Self::new(self.vertex_count, faces).expect("permutation of a valid complex")
    }

    /// Number of connected components (isolated vertices count).
    pub fn connected_components(&self) -> usize {
        let mut uf = UnionFind::new(self.vertex_count);
        for f in &self.maximal_faces {
            for w in f.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        let roots: HashSet<usize> = self.used_vertices().into_iter().map(|v| uf.find(v)).collect();
        roots.len()
    }

    pub fn reduced_homology(&self) -> Result<HomologyReport, HomologyError> {
        self.reduced_homology_with_budget(DEFAULT_FACE_BUDGET)
    }

    pub fn reduced_homology_with_budget(&self, budget: usize) -> Result<HomologyReport, HomologyError> {
        let faces = self.graded_faces(budget)?;
        let face_counts: Vec<usize> = faces.iter().map(Vec::len).collect();
        // divisors[k] describes ∂_k : C_k → C_{k-1}, k = 0..=dim
        let mut divisors: Vec<Divisors> = Vec::with_capacity(faces.len());
        for k in 0..faces.len() {
            let d = if k == 0 {
                // augmentation onto C_{-1} = Z
                if faces[0].is_empty() {
                    Divisors::default()
                } else {
                    Divisors { rank: 1, torsion: Vec::new() }
                }
            } else {
                elementary_divisors(&boundary_matrix(&faces[k], &faces[k - 1]))
            };
            divisors.push(d);
        }
        let rank = |k: usize| divisors.get(k).map_or(0, |d| d.rank);
        let mut dims = Vec::with_capacity(faces.len() + 1);
        dims.push(DimHomology { k: -1, betti: 1 - rank(0), torsion: Vec::new() });
        for k in 0..faces.len() {
            let torsion = match divisors.get(k + 1) {
                Some(d) => d.torsion.iter().map(to_u128).collect::<Result<_, _>>()?,
                None => Vec::new(),
            };
            dims.push(DimHomology { k: k as i64, betti: face_counts[k] - rank(k) - rank(k + 1), torsion });
        }
        Ok(HomologyReport { reduced: true, dims, face_counts })
    }

    /// Betti numbers over the rationals by fraction-based Gaussian
    /// elimination, sharing nothing with the integral path except the
    /// boundary matrices.
    pub fn rational_betti(&self) -> Result<Vec<(i64, usize)>, HomologyError> {
        let faces = self.graded_faces(DEFAULT_FACE_BUDGET)?;
        let mut ranks = vec![0usize; faces.len() + 1];
        if !faces.is_empty() && !faces[0].is_empty() {
            ranks[0] = 1;
        }
        for k in 1..faces.len() {
            ranks[k] = rational_rank(&boundary_matrix(&faces[k], &faces[k - 1]));
        }
        let mut out = vec![(-1, 1 - ranks[0])];
        for k in 0..faces.len() {
            out.push((k as i64, faces[k].len() - ranks[k] - ranks[k + 1]));
        }
        Ok(out)
    }

    fn graded_faces(&self, budget: usize) -> Result<Vec<Vec<Vec<usize>>>, HomologyError> {
        let bound = self.face_bound();
        let dim = self.dim();
        let mut faces = Vec::new();
        let mut total = 0usize;
        for k in 0..=dim.max(-1) {
            let fk = self.close_faces(k as usize);
            total += fk.len();
            if total > budget {
                return Err(HomologyError::BudgetExceeded { faces: bound.max(total), budget });
            }
            faces.push(fk);
        }
        Ok(faces)
    }
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    // both sorted
    let mut it = big.iter();
    small.iter().all(|x| it.by_ref().any(|y| y == x))
}

fn for_each_subset(set: &[usize], size: usize, mut f: impl FnMut(&[usize])) {
    let n = set.len();
    if size == 0 || size > n {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    let mut buf = vec![0; size];
    loop {
        for (b, &i) in buf.iter_mut().zip(&idx) {
            *b = set[i];
        }
        f(&buf);
        let mut t = size;
        loop {
            if t == 0 {
                return;
            }
            t -= 1;
            if idx[t] != t + n - size {
                break;
            }
            if t == 0 {
                return;
            }
        }
        idx[t] += 1;
        for s in t + 1..size {
            idx[s] = idx[s - 1] + 1;
        }
    }
}

fn bron_kerbosch(
    adj: &[BTreeSet<usize>],
    r: Vec<usize>,
    mut p: BTreeSet<usize>,
    mut x: BTreeSet<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() {
        if x.is_empty() && !r.is_empty() {
            out.push(r);
        }
        return;
    }
    let pivot = *p.union(&x).max_by_key(|&&u| p.intersection(&adj[u]).count()).expect("nonempty");
    let candidates: Vec<usize> = p.difference(&adj[pivot]).copied().collect();
    for v in candidates {
        let mut r2 = r.clone();
        r2.push(v);
        let p2 = p.intersection(&adj[v]).copied().collect();
        let x2 = x.intersection(&adj[v]).copied().collect();
        bron_kerbosch(adj, r2, p2, x2, out);
        p.remove(&v);
        x.insert(v);
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimHomology {
    pub k: i64,
    pub betti: usize,
    pub torsion: Vec<u128>,
}

impl DimHomology {
    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub reduced: bool,
    pub dims: Vec<DimHomology>,
    #[serde(skip)]
    pub face_counts: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AcyclicityProfile {
    pub acyclic_through_m: bool,
    pub first_nonzero: Option<i64>,
}

impl HomologyReport {
    pub fn dim(&self, k: i64) -> Option<&DimHomology> {
        self.dims.iter().find(|d| d.k == k)
    }

    pub fn betti(&self, k: i64) -> usize {
        self.dim(k).map_or(0, |d| d.betti)
    }

    pub fn is_zero_in(&self, k: i64) -> bool {
        self.dim(k).is_none_or(DimHomology::is_zero)
    }

    /// `(k, betti)` pairs, for comparison with [`SimplicialComplex::rational_betti`].
    pub fn betti_numbers(&self) -> Vec<(i64, usize)> {
        self.dims.iter().map(|d| (d.k, d.betti)).collect()
    }

    pub fn first_nonzero(&self) -> Option<i64> {
        self.dims.iter().find(|d| !d.is_zero()).map(|d| d.k)
    }

    /// Whether `H̃_k = 0` for every `k ≤ m`, plus the least nonzero degree.
    pub fn acyclicity_profile(&self, m: i64) -> AcyclicityProfile {
        AcyclicityProfile {
            acyclic_through_m: self.dims.iter().filter(|d| d.k <= m).all(DimHomology::is_zero),
            first_nonzero: self.first_nonzero(),
        }
    }

    /// Reduced Euler characteristic from the Betti numbers.
    pub fn euler_from_betti(&self) -> i64 {
        self.dims.iter().map(|d| sign(d.k) * d.betti as i64).sum()
    }

    /// Reduced Euler characteristic `-1 + f_0 - f_1 + …` from face counts.
    pub fn euler_from_faces(&self) -> i64 {
        -1 + self.face_counts.iter().enumerate().map(|(k, &c)| sign(k as i64) * c as i64).sum::<i64>()
    }

    pub fn euler_consistent(&self) -> bool {
        self.euler_from_betti() == self.euler_from_faces()
    }

    /// Compact human-readable summary such as `H̃0=0 H̃1=Z^4`.
    pub fn summary(&self) -> String {
        self.dims
            .iter()
            .map(|d| {
                let mut parts = Vec::new();
                if d.betti > 0 {
                    parts.push(if d.betti == 1 { "Z".to_string() } else { format!("Z^{}", d.betti) });
                }
                for t in &d.torsion {
                    parts.push(format!("Z/{t}"));
                }
                let g = if parts.is_empty() { "0".to_string() } else { parts.join("+") };
                format!("H̃{}={}", d.k, g)
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn to_u128(d: &BigInt) -> Result<u128, HomologyError> {
    d.to_u128().ok_or_else(|| HomologyError::TorsionOverflow(d.to_string()))
}

/// Sparse integer matrix stored by columns, each column sorted by row.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: Vec<Vec<(usize, BigInt)>>,
}

impl SparseMatrix {
    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut m = vec![vec![BigInt::zero(); self.cols.len()]; self.rows];
        for (c, col) in self.cols.iter().enumerate() {
            for (r, v) in col {
                m[*r][c] = v.clone();
            }
        }
        m
    }
}

/// `∂_k` with columns indexed by `k`-faces and rows by `(k-1)`-faces.
pub fn boundary_matrix(faces: &[Vec<usize>], lower: &[Vec<usize>]) -> SparseMatrix {
    let index: HashMap<&[usize], usize> = lower.iter().enumerate().map(|(i, f)| (f.as_slice(), i)).collect();
    let cols = faces
        .iter()
        .map(|f| {
            let mut col: Vec<(usize, BigInt)> = (0..f.len())
                .map(|drop| {
                    let sub: Vec<usize> =
                        f.iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, &v)| v).collect();
                    let row = index[sub.as_slice()];
                    let s = if drop % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                    (row, s)
                })
                .collect();
            col.sort_by_key(|&(r, _)| r);
            col
        })
        .collect();
    SparseMatrix { rows: lower.len(), cols }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Divisors {
    pub rank: usize,
    /// Elementary divisors greater than one, ascending.
    pub torsion: Vec<BigInt>,
}

/// Rank and nontrivial elementary divisors of a sparse integer matrix.
pub fn elementary_divisors(m: &SparseMatrix) -> Divisors {
    let mut cols: Vec<Vec<(usize, BigInt)>> = m.cols.clone();
    let mut row_cols: Vec<HashSet<usize>> = vec![HashSet::new(); m.rows];
    for (c, col) in cols.iter().enumerate() {
        for (r, _) in col {
            row_cols[*r].insert(c);
        }
    }
    let mut alive = vec![true; cols.len()];
    let mut unit_rank = 0usize;
    loop {
        let mut progressed = false;
        let mut order: Vec<usize> = (0..cols.len()).filter(|&c| alive[c] && !cols[c].is_empty()).collect();
        order.sort_by_key(|&c| cols[c].len());
        for c in order {
            if !alive[c] || cols[c].is_empty() {
                continue;
            }
            let pivot = cols[c]
                .iter()
                .filter(|(_, v)| v.abs().is_one())
                .min_by_key(|(r, _)| row_cols[*r].len())
                .map(|(r, v)| (*r, v.clone()));
            let Some((prow, pval)) = pivot else { continue };
            let pivot_col = std::mem::take(&mut cols[c]);
            for (r, _) in &pivot_col {
                row_cols[*r].remove(&c);
            }
            alive[c] = false;
            let others: Vec<usize> = row_cols[prow].iter().copied().collect();
            for other in others {
                let coeff = {
                    let entry = cols[other].iter().find(|(r, _)| *r == prow).expect("indexed").1.clone();
                    entry * &pval
                };
                let updated = axpy(&cols[other], &pivot_col, &coeff);
                for (r, _) in &cols[other] {
                    row_cols[*r].remove(&other);
                }
                for (r, _) in &updated {
                    row_cols[*r].insert(other);
                }
                cols[other] = updated;
            }
            debug_assert!(row_cols[prow].is_empty());
            unit_rank += 1;
            progressed = true;
        }
        if !progressed {
            break;
        }
    }
    let rest: Vec<usize> = (0..cols.len()).filter(|&c| alive[c] && !cols[c].is_empty()).collect();
    if rest.is_empty() {
        return Divisors { rank: unit_rank, torsion: Vec::new() };
    }
    let rows: Vec<usize> = {
        let set: BTreeSet<usize> = rest.iter().flat_map(|&c| cols[c].iter().map(|(r, _)| *r)).collect();
        set.into_iter().collect()
    };
    let row_index: HashMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut dense = vec![vec![BigInt::zero(); rest.len()]; rows.len()];
    for (j, &c) in rest.iter().enumerate() {
        for (r, v) in &cols[c] {
            dense[row_index[r]][j] = v.clone();
        }
    }
    let diag = snf_diagonal(dense);
    let mut torsion: Vec<BigInt> = diag.iter().filter(|d| !d.is_one()).cloned().collect();
    torsion.sort();
    Divisors { rank: unit_rank + diag.len(), torsion }
}

/// `a - coeff * b` for sorted sparse columns.
fn axpy(a: &[(usize, BigInt)], b: &[(usize, BigInt)], coeff: &BigInt) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, -(coeff * &b[j].1)));
            j += 1;
        } else {
            let v = &a[i].1 - coeff * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Dense Smith normal form `U · M · V = D` with unimodular `U`, `V`.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub u: Vec<Vec<BigInt>>,
    pub d: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
}

impl SmithForm {
    /// Nonzero diagonal entries, each dividing the next.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.len().min(self.d.first().map_or(0, Vec::len)))
            .map(|i| self.d[i][i].clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }
}

pub fn smith_normal_form(m: &[Vec<BigInt>]) -> SmithForm {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut s = Snf {
        a: m.to_vec(),
        u: Some(identity(rows)),
        v: Some(identity(cols)),
    };
    s.run();
    SmithForm { u: s.u.unwrap(), d: s.a, v: s.v.unwrap() }
}

/// Nonzero invariant factors only, without tracking transforms.
pub fn snf_diagonal(m: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let mut s = Snf { a: m, u: None, v: None };
    let r = s.run();
    (0..r).map(|i| s.a[i][i].clone()).collect()
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

struct Snf {
    a: Vec<Vec<BigInt>>,
    /// Row transform, updated alongside every row operation.
    u: Option<Vec<Vec<BigInt>>>,
    /// Column transform, updated alongside every column operation.
    v: Option<Vec<Vec<BigInt>>>,
}

impl Snf {
    fn rows(&self) -> usize {
        self.a.len()
    }

    fn cols(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if let Some(u) = &mut self.u {
            u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in &mut self.a {
            row.swap(i, j);
        }
        if let Some(v) = &mut self.v {
            for row in v.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    /// row_i -= q * row_j
    fn row_sub(&mut self, i: usize, j: usize, q: &BigInt) {
        sub_row(&mut self.a, i, j, q);
        if let Some(u) = &mut self.u {
            sub_row(u, i, j, q);
        }
    }

    /// col_i -= q * col_j
    fn col_sub(&mut self, i: usize, j: usize, q: &BigInt) {
        for row in &mut self.a {
            let t = q * &row[j];
            row[i] -= t;
        }
        if let Some(v) = &mut self.v {
            for row in v.iter_mut() {
                let t = q * &row[j];
                row[i] -= t;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -&*x;
        }
        if let Some(u) = &mut self.u {
            for x in &mut u[i] {
                *x = -&*x;
            }
        }
    }

    /// Reduces to diagonal form with the divisibility chain; returns the rank.
    fn run(&mut self) -> usize {
        let (m, n) = (self.rows(), self.cols());
        let mut t = 0;
        while t < m.min(n) {
            // minimal nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if self.a[i][j].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| self.a[i][j].abs() < self.a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..m {
                    if self.a[i][t].is_zero() {
                        continue;
                    }
                    let q = self.a[i][t].div_floor(&self.a[t][t]);
                    self.row_sub(i, t, &q);
                    if !self.a[i][t].is_zero() {
                        dirty = true;
                    }
                }
                for j in t + 1..n {
                    if self.a[t][j].is_zero() {
                        continue;
                    }
                    let q = self.a[t][j].div_floor(&self.a[t][t]);
                    self.col_sub(j, t, &q);
                    if !self.a[t][j].is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    self.move_min_to_pivot(t);
                    continue;
                }
                // pivot must divide the whole trailing block
                let offender = (t + 1..m)
                    .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !(&self.a[i][j] % &self.a[t][t]).is_zero());
                match offender {
                    Some((i, _)) => {
                        let minus_one = -BigInt::one();
                        self.row_sub(t, i, &minus_one);
                    }
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
        t
    }

    /// Brings the smallest nonzero entry of row `t` / column `t` to `(t, t)`.
    fn move_min_to_pivot(&mut self, t: usize) {
        let (m, n) = (self.rows(), self.cols());
        let mut best = (t, t);
        for i in t..m {
            if !self.a[i][t].is_zero() && self.a[i][t].abs() < self.a[best.0][best.1].abs() {
                best = (i, t);
            }
        }
        for j in t..n {
            if !self.a[t][j].is_zero() && self.a[t][j].abs() < self.a[best.0][best.1].abs() {
                best = (t, j);
            }
        }
        if best.0 != t {
            self.swap_rows(t, best.0);
        }
        if best.1 != t {
            self.swap_cols(t, best.1);
        }
    }
}

fn sub_row(a: &mut [Vec<BigInt>], i: usize, j: usize, q: &BigInt) {
    let (src, dst) = if i < j {
        let (lo, hi) = a.split_at_mut(j);
        (&hi[0], &mut lo[i])
    } else {
        let (lo, hi) = a.split_at_mut(i);
        (&lo[j], &mut hi[0])
    };
    for (d, s) in dst.iter_mut().zip(src) {
        *d -= q * s;
    }
}

/// Rank over `Q`, by reducing each column against earlier pivots keyed by
/// their leading row.
pub fn rational_rank(m: &SparseMatrix) -> usize {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, BigRational>> = BTreeMap::new();
    for col in &m.cols {
        let mut v: BTreeMap<usize, BigRational> =
            col.iter().map(|(r, x)| (*r, BigRational::from_integer(x.clone()))).collect();
        while let Some((&lead, x)) = v.iter().next() {
            let Some(p) = pivots.get(&lead) else { break };
            let f = x / &p[&lead];
            for (r, y) in p {
                let e = v.entry(*r).or_insert_with(BigRational::zero);
                *e -= &f * y;
                if e.is_zero() {
                    v.remove(r);
                }
            }
        }
        if let Some((&lead, _)) = v.iter().next() {
            pivots.insert(lead, v);
        }
    }
    pivots.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(n: usize, faces: &[&[usize]]) -> SimplicialComplex {
        SimplicialComplex::new(n, faces.iter().map(|f| f.to_vec()).collect()).unwrap()
    }

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn close_faces_examples() {
        let t = cx(3, &[&[0, 1, 2]]);
        assert_eq!(t.close_faces(1), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert!(SimplicialComplex::empty().close_faces(0).is_empty());
        assert!(SimplicialComplex::empty().close_faces(3).is_empty());
    }

    #[test]
    fn new_normalizes_and_validates() {
        let c = cx(4, &[&[2, 1], &[1, 2, 3], &[0]]);
        assert_eq!(c.maximal_faces(), &[vec![0], vec![1, 2, 3]]);
        assert!(SimplicialComplex::new(2, vec![vec![0, 2]]).is_err());
        assert!(SimplicialComplex::new(3, vec![vec![1, 1]]).is_err());
        assert!(SimplicialComplex::new(3, vec![vec![]]).is_err());
    }

    #[test]
    fn sphere_examples() {
        let tetra_boundary = cx(4, &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]]);
        let h = tetra_boundary.reduced_homology().unwrap();
        assert_eq!(h.betti(2), 1);
        assert!(h.is_zero_in(0) && h.is_zero_in(1) && h.is_zero_in(-1));
        assert!(h.euler_consistent());

        let s0 = cx(2, &[&[0], &[1]]);
        let h = s0.reduced_homology().unwrap();
        assert_eq!(h.betti(0), 1);
        assert_eq!(h.acyclicity_profile(-1).first_nonzero, Some(0));

        let void = SimplicialComplex::empty().reduced_homology().unwrap();
        assert_eq!(void.betti(-1), 1);
    }

    #[test]
    fn projective_plane_has_two_torsion() {
        // six-vertex triangulation of RP^2
        let rp2 = cx(
            6,
            &[
                &[0, 1, 2],
                &[0, 2, 3],
                &[0, 3, 4],
                &[0, 4, 5],
                &[0, 1, 5],
                &[1, 2, 4],
                &[2, 3, 5],
                &[1, 3, 4],
                &[1, 3, 5],
                &[2, 4, 5],
            ],
        );
        let h = rp2.reduced_homology().unwrap();
        assert_eq!(h.dim(1).unwrap().torsion, vec![2]);
        assert_eq!(h.betti(1), 0);
        assert_eq!(h.betti(2), 0);
        assert!(h.euler_consistent());
        assert_eq!(rp2.rational_betti().unwrap(), h.betti_numbers());
    }

    #[test]
    fn connected_components_examples() {
        assert_eq!(cx(2, &[&[0], &[1]]).connected_components(), 2);
        assert_eq!(SimplicialComplex::empty().connected_components(), 0);
        assert_eq!(cx(5, &[&[0, 1], &[1, 2], &[3, 4]]).connected_components(), 2);
    }

    #[test]
    fn flag_complex_of_square_and_triangle() {
        let square = SimplicialComplex::flag(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(square.dim(), 1);
        assert_eq!(square.reduced_homology().unwrap().betti(1), 1);
        let filled = SimplicialComplex::flag(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(filled.maximal_faces(), &[vec![0, 1, 2]]);
        let isolated = SimplicialComplex::flag(3, &[(0, 1)]).unwrap();
        assert_eq!(isolated.maximal_faces(), &[vec![2], vec![0, 1]]);
    }

    #[test]
    fn order_complex_of_boolean_lattice_interior() {
        // proper nonempty subsets of {a,b,c}: the barycentric subdivision of a circle
        let sets: Vec<u8> = (1..7).collect();
        let oc = SimplicialComplex::order_complex(sets.len(), |a, b| {
            sets[a] != sets[b] && sets[a] & sets[b] == sets[a]
        })
        .unwrap();
        assert_eq!(oc.reduced_homology().unwrap().betti(1), 1);
    }

    #[test]
    fn smith_form_small() {
        let m = vec![vec![int(2), int(4), int(4)], vec![int(-6), int(6), int(12)], vec![int(10), int(-4), int(-16)]];
        let s = smith_normal_form(&m);
        assert_eq!(s.diagonal(), vec![int(2), int(6), int(12)]);
    }

    #[test]
    fn elementary_divisors_match_dense() {
        let m = SparseMatrix { rows: 2, cols: vec![vec![(0, int(2))], vec![(1, int(3))], vec![(0, int(1)), (1, int(1))]] };
        let d = elementary_divisors(&m);
        assert_eq!(d.rank, 2);
        assert!(d.torsion.is_empty());
        let m = SparseMatrix { rows: 2, cols: vec![vec![(0, int(2))], vec![(1, int(4))]] };
        assert_eq!(elementary_divisors(&m).torsion, vec![int(2), int(4)]);
    }
}
