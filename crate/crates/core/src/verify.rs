//! Named verification runs with JSON reports.
//!
//! Every run is deterministic for fixed parameters; only `wall_time_ms`
//! varies between runs.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};
use std::path::Path;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cactus::{self, ascending_forest_complex, forest_complex, CactusGraph};
use crate::character::{perturb, preserves_column_signs, remark48_base, Character, CharacterError, Sigma1Status};
use crate::freegroup::{mccool_check, GroupError, PureSymAut};
use crate::homology::{HomologyError, HomologyReport, SimplicialComplex, DEFAULT_FACE_BUDGET};
use crate::idealedge::{self, blowup, build_complex, Filter, IdealComplex, IdealEdgeError, Side};

/// Face count up to which Betti numbers are recomputed over the rationals.
const RATIONAL_CHECK_LIMIT: usize = 200_000;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("rank {n} outside the supported range {min}..={max}")]
    Rank { n: usize, min: usize, max: usize },
    #[error("epsilon {0} changes the sign of a nonzero column subset sum")]
    EpsilonTooLarge(String),
    #[error("sample count must be positive")]
    NoSamples,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Cactus(#[from] cactus::CactusError),
    #[error(transparent)]
    IdealEdge(#[from] IdealEdgeError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub claim: String,
    pub computed: Value,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub cases: Vec<CaseResult>,
    /// Values reported without a pass/fail judgement.
    pub info: BTreeMap<String, Value>,
    pub pass: bool,
    pub wall_time_ms: u64,
}

struct Builder {
    command: String,
    parameters: BTreeMap<String, Value>,
    seed: Option<u64>,
    cases: Vec<CaseResult>,
    info: BTreeMap<String, Value>,
    start: Instant,
}

impl Builder {
    fn new(command: &str, seed: Option<u64>) -> Self {
        Self {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            seed,
            cases: Vec::new(),
            info: BTreeMap::new(),
            start: Instant::now(),
        }
    }

    fn param(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.parameters.insert(key.to_string(), serde_json::to_value(v).expect("plain data"));
        self
    }

    fn case(&mut self, claim: impl Into<String>, computed: impl Serialize, pass: bool) -> &mut Self {
        self.cases.push(CaseResult {
            claim: claim.into(),
            computed: serde_json::to_value(computed).expect("plain data"),
            pass,
        });
        self
    }

    fn info(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.info.insert(key.to_string(), serde_json::to_value(v).expect("plain data"));
        self
    }

    fn finish(self) -> VerificationReport {
        let pass = !self.cases.is_empty() && self.cases.iter().all(|c| c.pass);
        VerificationReport {
            command: self.command,
            parameters: self.parameters,
            seed: self.seed,
            cases: self.cases,
            info: self.info,
            pass,
            wall_time_ms: self.start.elapsed().as_millis() as u64,
        }
    }
}

impl VerificationReport {
    pub fn failed_cases(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| !c.pass)
    }

    pub fn case(&self, claim_prefix: &str) -> Option<&CaseResult> {
        self.cases.iter().find(|c| c.claim.starts_with(claim_prefix))
    }

    /// JSON with the wall time zeroed, for comparing runs.
    pub fn stable_json(&self) -> String {
        let mut r = self.clone();
        r.wall_time_ms = 0;
        to_json(&r).expect("report serializes")
    }
}

/// Pretty JSON followed by a newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes `value` as JSON to `path`, or to stdout when `path` is `None`.
pub fn emit<T: Serialize>(value: &T, path: Option<&Path>) -> Result<(), VerifyError> {
    let s = to_json(value)?;
    match path {
        Some(p) => std::fs::write(p, s)?,
        None => io::stdout().lock().write_all(s.as_bytes())?,
    }
    Ok(())
}

fn homology_json(h: &HomologyReport) -> Value {
    serde_json::to_value(h).expect("plain data")
}

/// `I↑ₙ` for the character with every entry equal to `value`.
fn constant_complex(n: usize, value: i64) -> Result<IdealComplex, VerifyError> {
    Ok(build_complex(n, Filter::Ascending(&Character::from_integers(n, |_, _| value)))?)
}

fn rational_agrees(c: &SimplicialComplex, h: &HomologyReport) -> Option<bool> {
    if h.face_counts.iter().sum::<usize>() > RATIONAL_CHECK_LIMIT {
        return None;
    }
    Some(c.rational_betti().ok()? == h.betti_numbers())
}

/// Records the homology checks common to every computed complex.
fn homology_cases(b: &mut Builder, label: &str, c: &SimplicialComplex, h: &HomologyReport) {
    b.case(
        format!("{label}: Euler characteristic from Betti numbers matches face counts"),
        json!({"betti": h.euler_from_betti(), "faces": h.euler_from_faces()}),
        h.euler_consistent(),
    );
    match rational_agrees(c, h) {
        Some(ok) => {
            b.case(format!("{label}: Betti numbers agree with the rank computation over Q"), h.betti_numbers(), ok);
        }
        None => {
            b.info(&format!("{label}: rational cross-check"), "skipped (complex too large)");
        }
    }
}

pub fn verify_prop47(n: usize, budget: usize) -> Result<VerificationReport, VerifyError> {
    if !(2..=5).contains(&n) {
        return Err(VerifyError::Rank { n, min: 2, max: 5 });
    }
    let mut b = Builder::new("verify prop47", None);
    b.param("n", n).param("budget", budget);
    let pos = constant_complex(n, 1)?;
    b.info("vertices", pos.vertex_count());
    b.info("dimension", pos.complex.dim());
    let h = match pos.complex.reduced_homology_with_budget(budget) {
        Ok(h) => h,
        Err(e) => {
            b.case("homology of the positive complex fits the face budget", e.to_string(), false);
            return Ok(b.finish());
        }
    };
    b.info("face_counts", &h.face_counts);
    b.info("homology", homology_json(&h));
    b.info("summary", h.summary());
    let m = n as i64 - 3;
    let profile = h.acyclicity_profile(m);
    b.case(format!("H̃_k = 0 for k ≤ {m}"), profile, profile.acyclic_through_m);
    if n >= 3 {
        let comps = pos.complex.connected_components();
        b.case("complex is connected", comps, comps == 1);
    }
    let top = h.dim(n as i64 - 2).cloned();
    b.case(format!("H̃_{} ≠ 0", n - 2), &top, !h.is_zero_in(n as i64 - 2));
    if n == 3 {
        b.case("rank of H̃_1 is 4", h.betti(1), h.betti(1) == 4);
    }
    homology_cases(&mut b, "positive", &pos.complex, &h);

    // the all-(-1) character, through the side-flipping involution
    let neg = constant_complex(n, -1)?;
    let perm: Option<Vec<usize>> = pos.edges.iter().map(|e| neg.index_of(&e.flip())).collect();
    let iso = match &perm {
        Some(p) if neg.vertex_count() == pos.vertex_count() => pos.complex.relabel(p) == neg.complex,
        _ => false,
    };
    b.case("flipping sides maps the positive complex onto the negative one", iso, iso);
    let hn = neg.complex.reduced_homology_with_budget(budget)?;
    b.case("negative complex has the same reduced homology", hn.summary(), hn.dims == h.dims);
    Ok(b.finish())
}

/// Structure of `I↑₃(χ)` as used in the rank-3 argument.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct N3Check {
    pub vertices: usize,
    pub edges: usize,
    pub depots: usize,
    pub hubs: usize,
    pub components: usize,
    pub min_hub_degree: usize,
    pub max_shared_depots: usize,
}

impl N3Check {
    pub fn pass(&self) -> bool {
        self.vertices == 9
            && self.components == 1
            && self.edges >= self.vertices
            && self.min_hub_degree >= 3
            && self.max_shared_depots <= 2
    }
}

pub fn check_n3(chi: &Character) -> Result<N3Check, VerifyError> {
    let c = build_complex(3, Filter::Ascending(chi))?;
    let hubs: Vec<usize> = (0..c.vertex_count()).filter(|&v| c.edges[v].is_hub()).collect();
    let depots: BTreeSet<usize> = (0..c.vertex_count()).filter(|&v| c.edges[v].is_depot()).collect();
    let neighbours: Vec<BTreeSet<usize>> = (0..c.vertex_count()).map(|v| c.neighbours(v)).collect();
    let mut max_shared = 0;
    for (x, &h1) in hubs.iter().enumerate() {
        for &h2 in &hubs[x + 1..] {
            let shared = neighbours[h1].intersection(&neighbours[h2]).filter(|v| depots.contains(v)).count();
            max_shared = max_shared.max(shared);
        }
    }
    Ok(N3Check {
        vertices: c.vertex_count(),
        edges: c.graph_edges().len(),
        depots: depots.len(),
        hubs: hubs.len(),
        components: c.complex.connected_components(),
        min_hub_degree: hubs.iter().map(|&h| neighbours[h].len()).min().unwrap_or(0),
        max_shared_depots: max_shared,
    })
}

/// The six realizable sign triples `(a_{i,j}, a_{k,j}, a_{i,j} + a_{k,j})`.
pub const COLUMN_PATTERNS: [(i8, i8, i8); 6] = [(1, 1, 1), (-1, -1, -1), (1, -1, 1), (1, -1, -1), (-1, 1, 1), (-1, 1, -1)];

/// A rank-3 character realizing one sign pattern per column, with entries
/// `±3^e` for distinct `e` (hence generic).
pub fn pattern_character(patterns: [usize; 3]) -> Character {
    let mut c = Character::zero(3);
    for j in 1..=3usize {
        let (i, k) = match j {
            1 => (2, 3),
            2 => (1, 3),
            _ => (1, 2),
        };
        let (si, sk, ssum) = COLUMN_PATTERNS[patterns[j - 1]];
        let small = BigInt::from(3).pow(2 * (j as u32 - 1));
        let big: BigInt = &small * 3u32;
        // with mixed signs, the entry agreeing with the sum is the larger one
        let (mi, mk) = if si == sk || si == ssum { (big.clone(), small.clone()) } else { (small.clone(), big.clone()) };
        c.set(i, j, BigRational::from_integer(mi * si)).expect("off-diagonal");
        c.set(k, j, BigRational::from_integer(mk * sk)).expect("off-diagonal");
    }
    c
}

fn column_signs(chi: &Character) -> [(i8, i8, i8); 3] {
    let sign = |q: &BigRational| if q > &BigRational::zero() { 1 } else if q < &BigRational::zero() { -1 } else { 0 };
    let mut out = [(0, 0, 0); 3];
    for j in 1..=3usize {
        let others: Vec<usize> = (1..=3).filter(|&i| i != j).collect();
        out[j - 1] = (sign(chi.get(others[0], j)), sign(chi.get(others[1], j)), sign(&chi.column_sum(j, &others)));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Random,
}

pub fn verify_thm_n3(mode: Mode, samples: usize, seed: u64) -> Result<VerificationReport, VerifyError> {
    let mut b = Builder::new("verify thm-n3", Some(seed));
    b.param("mode", if mode == Mode::Exhaustive { "exhaustive" } else { "random" });
    if mode == Mode::Random {
        if samples == 0 {
            return Err(VerifyError::NoSamples);
        }
        b.param("samples", samples);
    }

    let all = build_complex(3, Filter::All)?;
    let degrees: Vec<(bool, usize)> = (0..all.vertex_count()).map(|v| (all.edges[v].is_hub(), all.degree(v))).collect();
    let hubs = degrees.iter().filter(|d| d.0).count();
    b.case("I_3 has 18 vertices: 12 depots and 6 hubs", json!({"vertices": all.vertex_count(), "hubs": hubs}), all.vertex_count() == 18 && hubs == 6);
    b.case(
        "every depot of I_3 has degree 4 and every hub degree 6",
        degrees.iter().map(|d| d.1).collect::<Vec<_>>(),
        degrees.iter().all(|&(hub, d)| d == if hub { 6 } else { 4 }),
    );

    let mut checked = 0usize;
    let mut failures: Vec<Value> = Vec::new();
    let mut not_generic = 0usize;
    let mut hub_fail = 0usize;
    let mut depot_fail = 0usize;
    let mut edge_totals = BTreeMap::<usize, usize>::new();
    let mut record = |chi: &Character, label: Value| -> Result<(), VerifyError> {
        if !chi.is_generic()? {
            not_generic += 1;
            failures.push(json!({"case": label, "reason": "not generic"}));
            return Ok(());
        }
        let r = check_n3(chi)?;
        checked += 1;
        *edge_totals.entry(r.edges).or_default() += 1;
        if r.min_hub_degree < 3 {
            hub_fail += 1;
        }
        if r.max_shared_depots > 2 {
            depot_fail += 1;
        }
        if !r.pass() {
            failures.push(json!({"case": label, "structure": r}));
        }
        Ok(())
    };
    let total = match mode {
        Mode::Exhaustive => {
            let mut realized = BTreeSet::new();
            for p0 in 0..6 {
                for p1 in 0..6 {
                    for p2 in 0..6 {
                        let chi = pattern_character([p0, p1, p2]);
                        realized.insert(column_signs(&chi));
                        record(&chi, json!([p0, p1, p2]))?;
                    }
                }
            }
            b.info("distinct_sign_patterns", realized.len());
            216
        }
        Mode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for s in 0..samples {
                let chi = Character::random_generic_with(3, &mut rng)?;
                record(&chi, json!(s))?;
            }
            samples
        }
    };
    let passed = total - failures.len();
    b.info("edge_count_histogram", &edge_totals);
    b.case(
        "every case: 9 vertices, connected, at least as many edges as vertices",
        json!({"passed": passed, "total": total, "failures": failures.iter().take(5).collect::<Vec<_>>()}),
        failures.is_empty() && not_generic == 0,
    );
    b.case("every ascending hub has degree at least 3", json!({"violations": hub_fail, "checked": checked}), hub_fail == 0 && checked == total);
    b.case("two ascending hubs share at most two ascending depots", json!({"violations": depot_fail, "checked": checked}), depot_fail == 0 && checked == total);
    Ok(b.finish())
}

pub fn verify_remark48(epsilon: &BigRational, budget: usize) -> Result<VerificationReport, VerifyError> {
    let base = remark48_base();
    let chi = perturb(&base, epsilon);
    if !preserves_column_signs(&base, &chi) {
        return Err(VerifyError::EpsilonTooLarge(epsilon.to_string()));
    }
    let mut b = Builder::new("verify remark48", None);
    b.param("epsilon", epsilon.to_string()).param("budget", budget);
    let generic = chi.is_generic()?;
    b.case("perturbed character is generic", generic, generic);
    let c = build_complex(4, Filter::Ascending(&chi))?;
    let h = c.complex.reduced_homology_with_budget(budget)?;
    b.info("vertices", c.vertex_count());
    b.info("face_counts", &h.face_counts);
    b.info("homology", homology_json(&h));
    b.info("H1", h.dim(1).cloned());
    b.info("summary", h.summary());
    b.case("H̃_2 ≠ 0", h.dim(2).cloned(), !h.is_zero_in(2));
    homology_cases(&mut b, "ascending complex", &c.complex, &h);
    Ok(b.finish())
}

/// Parameters of [`verify_foundations`].
#[derive(Debug, Clone, Copy)]
pub struct FoundationParams {
    /// Rank for the homomorphism checks.
    pub n: usize,
    /// Random composite pairs for the homomorphism checks.
    pub samples: usize,
    pub seed: u64,
    pub graphs: usize,
    pub max_vertices: usize,
    /// Generic characters per graph for decisiveness.
    pub generic_characters: usize,
    /// Positive characters per graph.
    pub positive_characters: usize,
    /// Characters per graph for the height/marking comparison.
    pub oracle_characters: usize,
    /// Characters per rank for the blow-up comparison.
    pub blowup_characters: usize,
}

impl FoundationParams {
    pub fn new(n: usize, samples: usize, seed: u64) -> Self {
        Self {
            n,
            samples,
            seed,
            graphs: 50,
            max_vertices: 8,
            generic_characters: 100,
            positive_characters: 10,
            oracle_characters: 100,
            blowup_characters: 50,
        }
    }
}

fn random_product<R: Rng>(n: usize, len: usize, rng: &mut R) -> Result<PureSymAut, GroupError> {
    let mut acc = PureSymAut::identity(n);
    for _ in 0..len {
        let i = rng.gen_range(1..=n);
        let mut j = rng.gen_range(1..n);
        if j >= i {
            j += 1;
        }
        let mut g = PureSymAut::elementary(i, j, n)?;
        if rng.gen() {
            g = g.inverse()?;
        }
        acc = acc.compose(&g)?;
    }
    Ok(acc)
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn verify_foundations(p: FoundationParams) -> Result<VerificationReport, VerifyError> {
    if p.n < 2 {
        return Err(VerifyError::Rank { n: p.n, min: 2, max: usize::MAX });
    }
    if p.samples == 0 {
        return Err(VerifyError::NoSamples);
    }
    let mut b = Builder::new("verify foundations", Some(p.seed));
    b.param("n", p.n)
        .param("samples", p.samples)
        .param("graphs", p.graphs)
        .param("max_vertices", p.max_vertices)
        .param("generic_characters", p.generic_characters)
        .param("oracle_characters", p.oracle_characters)
        .param("blowup_characters", p.blowup_characters);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);

    // McCool relations
    let mut ranks: BTreeSet<usize> = [3, 4, 5].into();
    ranks.insert(p.n.max(2));
    let mut counts = BTreeMap::new();
    let mut ok = true;
    for &n in &ranks {
        let r = mccool_check(n)?;
        ok &= r.all_hold();
        counts.insert(n, r.instances.len());
    }
    b.case("McCool relations hold", json!({"instances_by_rank": counts}), ok);

    // χ_{i,j}(α_{k,l}) = δ
    let n = p.n;
    let mut delta_ok = true;
    for (k, l) in Character::positions(n) {
        let a = PureSymAut::elementary(k, l, n)?;
        for (i, j) in Character::positions(n) {
            delta_ok &= a.chi(i, j)? == i64::from((i, j) == (k, l));
        }
    }
    b.case("χ_{i,j}(α_{k,l}) is the Kronecker delta", n, delta_ok);

    // additivity on random composites
    let mut bad = 0;
    for _ in 0..p.samples {
        let (l1, l2) = (rng.gen_range(0..=8), rng.gen_range(0..=8));
        let a = random_product(n, l1, &mut rng)?;
        let c = random_product(n, l2, &mut rng)?;
        let ac = a.compose(&c)?;
        for (i, j) in Character::positions(n) {
            if ac.chi(i, j)? != a.chi(i, j)? + c.chi(i, j)? {
                bad += 1;
                break;
            }
        }
    }
    b.case("χ_{i,j}(αβ) = χ_{i,j}(α) + χ_{i,j}(β)", json!({"pairs": p.samples, "violations": bad}), bad == 0);

    // forest complexes are spheres
    let graphs = cactus::corpus(p.graphs, p.seed, p.max_vertices);
    let mut sphere_bad = Vec::new();
    for (idx, g) in graphs.iter().enumerate() {
        let h = forest_complex(g).reduced_homology()?;
        let v = g.vertex_count() as i64;
        let ok = h.dims.iter().all(|d| d.torsion.is_empty() && d.betti == usize::from(d.k == v - 2));
        if !ok {
            sphere_bad.push(json!({"graph": idx, "homology": h.summary()}));
        }
    }
    b.case(
        "forest complex of every corpus graph has the homology of S^{V-2}",
        json!({"graphs": graphs.len(), "failures": sphere_bad}),
        sphere_bad.is_empty(),
    );

    // decisiveness
    let mut pos_bad = 0;
    let mut gen_bad = 0;
    let mut asc_bad = 0;
    let mut cases = 0;
    for g in &graphs {
        let r = g.reference_tree();
        for _ in 0..p.positive_characters {
            let chi = Character::random_positive(g.rank(), &mut rng);
            let h = g.graph_height(&chi)?;
            if h.argmax != [r.clone()] || !h.value.is_zero() {
                pos_bad += 1;
            }
            if !ascending_acyclic(g, &chi)? {
                asc_bad += 1;
            }
            cases += 1;
        }
        for _ in 0..p.generic_characters {
            let chi = Character::random_generic_with(g.rank(), &mut rng)?;
            if !g.graph_height(&chi)?.is_decisive() {
                gen_bad += 1;
            } else if !ascending_acyclic(g, &chi)? {
                asc_bad += 1;
            }
            cases += 1;
        }
    }
    b.case(
        "positive characters: the reference tree is the unique maximum",
        json!({"graphs": graphs.len(), "characters_per_graph": p.positive_characters, "violations": pos_bad}),
        pos_bad == 0,
    );
    b.case(
        "generic characters: the maximal-height tree is unique",
        json!({"graphs": graphs.len(), "characters_per_graph": p.generic_characters, "violations": gen_bad}),
        gen_bad == 0,
    );
    b.case(
        "decisive cases: the ascending forest complex is acyclic",
        json!({"cases": cases, "violations": asc_bad}),
        asc_bad == 0,
    );

    // ascending forests two ways, on the smaller graphs
    let mut route_bad = 0;
    let mut route_checked = 0;
    for g in graphs.iter().filter(|g| g.vertex_count() <= 6).take(15) {
        let chi = Character::random_generic_with(g.rank(), &mut rng)?;
        route_checked += 1;
        if cactus::ascending_forests_by_height(g, &chi)? != cactus::ascending_forests_by_containment(g, &chi)? {
            route_bad += 1;
        }
    }
    b.case(
        "ascending forests by height equality and by containment in a top tree agree",
        json!({"graphs": route_checked, "violations": route_bad}),
        route_bad == 0 && route_checked > 0,
    );

    // height calculus against markings
    let mut oracle_bad = 0;
    let mut oracle_pairs = 0usize;
    let mut switch_bad = 0;
    for g in &graphs {
        let mut trees: Vec<_> = g.spanning_trees().collect();
        trees.shuffle(&mut rng);
        trees.truncate(16);
        // χ_{i,j} of each marking, evaluated once
        let mut chi_tables = Vec::with_capacity(trees.len());
        for t in &trees {
            let m = g.marking_of_tree(t)?;
            let table: Vec<((usize, usize), i64)> =
                Character::positions(g.rank()).map(|(i, j)| m.chi(i, j).map(|v| ((i, j), v))).collect::<Result<_, _>>()?;
            chi_tables.push(table);
        }
        for _ in 0..p.oracle_characters {
            let chi = Character::from_integers(g.rank(), |_, _| rng.gen_range(-50..=50));
            for (t, table) in trees.iter().zip(&chi_tables) {
                let via_marking: BigRational =
                    table.iter().filter(|(_, v)| *v != 0).map(|&((i, j), v)| chi.get(i, j) * q(v)).sum();
                if via_marking != g.tree_height(&chi, t)? {
                    oracle_bad += 1;
                }
                oracle_pairs += 1;
            }
        }
        let chi = Character::from_integers(g.rank(), |_, _| rng.gen_range(-50..=50));
        for t in trees.iter().take(3) {
            let mut order: Vec<usize> = (1..=g.rank()).collect();
            order.shuffle(&mut rng);
            if g.tree_height_by_switching(&chi, t, &order)? != g.tree_height(&chi, t)? {
                switch_bad += 1;
            }
        }
    }
    b.case(
        "χ of the marking equals the tree height",
        json!({"graphs": graphs.len(), "characters_per_graph": p.oracle_characters, "tree_character_pairs": oracle_pairs, "violations": oracle_bad}),
        oracle_bad == 0,
    );
    b.case(
        "tree heights do not depend on the order cladodes are switched",
        json!({"violations": switch_bad}),
        switch_bad == 0,
    );

    // blow-ups of ideal edges
    let mut blow_bad = 0;
    let mut blow_checked = 0;
    for n in 2..=4 {
        let edges = idealedge::enumerate(n)?;
        let markings: Vec<bool> = edges
            .iter()
            .map(|e| {
                let bu = blowup(e);
                let expected = match e.side() {
                    Side::Out => e.whitehead()?,
                    Side::In => e.whitehead()?.inverse()?,
                };
                Ok::<bool, VerifyError>(bu.relative_marking(&bu.other_tree())? == expected)
            })
            .collect::<Result<_, _>>()?;
        blow_bad += markings.iter().filter(|ok| !**ok).count();
        for _ in 0..p.blowup_characters {
            let chi = Character::random_generic_with(n, &mut rng)?;
            for e in &edges {
                let bu = blowup(e);
                blow_checked += 1;
                if e.is_ascending(&chi)? != (bu.relative_height(&chi)? > BigRational::zero()) {
                    blow_bad += 1;
                }
            }
        }
    }
    b.case(
        "blow-ups: ascending exactly when the blown-up graph is higher, marking is α_{I,j}^{±1}",
        json!({"edge_character_pairs": blow_checked, "violations": blow_bad}),
        blow_bad == 0,
    );

    // antipode equivariance
    let mut anti_bad = 0;
    for n in 2..=4 {
        let edges = idealedge::enumerate(n)?;
        for a in &edges {
            for c in &edges {
                if a.compatible(c)? != a.flip().compatible(&c.flip())? {
                    anti_bad += 1;
                }
            }
        }
        for _ in 0..10 {
            let chi = Character::random_generic_with(n, &mut rng)?;
            let neg = chi.antipode();
            for a in &edges {
                if a.flip().is_ascending(&neg)? != a.is_ascending(&chi)? {
                    anti_bad += 1;
                }
            }
        }
    }
    b.case("flipping sides is compatible with the antipode", json!({"violations": anti_bad}), anti_bad == 0);

    let sigma = sigma1_checks(&mut rng)?;
    b.case("Σ¹ predicate spot checks", &sigma, sigma.values().all(|v| *v));
    Ok(b.finish())
}

fn ascending_acyclic(g: &CactusGraph, chi: &Character) -> Result<bool, VerifyError> {
    let h = ascending_forest_complex(g, chi)?.reduced_homology()?;
    Ok(h.dims.iter().all(|d| d.is_zero()))
}

/// The fixed Σ¹ examples plus random rank-2 and positive rank-3 characters.
pub fn sigma1_checks<R: Rng>(rng: &mut R) -> Result<BTreeMap<String, bool>, VerifyError> {
    let mut out = BTreeMap::new();
    out.insert(
        "χ_{1,2} is excluded by case 1".to_string(),
        Character::basis(3, 1, 2)?.sigma1_status()? == Sigma1Status::ExcludedCase1,
    );
    let mut triple = Character::zero(3);
    for (i, j, v) in [(1, 2, 1), (3, 2, -1), (1, 3, 1), (2, 3, -1), (2, 1, 1), (3, 1, -1)] {
        triple.set(i, j, q(v))?;
    }
    out.insert(
        "antisymmetric triple character is excluded by case 2".to_string(),
        triple.sigma1_status()? == Sigma1Status::ExcludedCase2,
    );
    let mut pos_ok = true;
    for _ in 0..100 {
        pos_ok &= Character::random_positive(3, rng).sigma1_status()? == Sigma1Status::InSigma1;
    }
    out.insert("positive rank-3 characters lie in Σ¹".to_string(), pos_ok);
    let mut two_ok = true;
    for _ in 0..100 {
        let a = rng.gen_range(-5..=5);
        let b = rng.gen_range(-5..=5);
        if a == 0 && b == 0 {
            continue;
        }
        let c = Character::from_integers(2, |i, _| if i == 1 { a } else { b });
        two_ok &= c.sigma1_status()? != Sigma1Status::InSigma1;
    }
    out.insert("every nontrivial rank-2 character is excluded".to_string(), two_ok);
    out.insert(
        "rank-2 unit characters are excluded".to_string(),
        [Character::basis(2, 1, 2)?, Character::basis(2, 2, 1)?, Character::from_integers(2, |_, _| 1)]
            .iter()
            .all(|c| c.sigma1_status().map(|s| s == Sigma1Status::ExcludedCase1).unwrap_or(false)),
    );
    Ok(out)
}

/// Parses `NUM/DEN` or an integer.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim().parse::<BigInt>().ok()?, b.trim().parse::<BigInt>().ok()?),
        None => (s.trim().parse::<BigInt>().ok()?, BigInt::one()),
    };
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

pub const DEFAULT_BUDGET: usize = DEFAULT_FACE_BUDGET;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patterns_are_realized_and_generic() {
        let mut seen = BTreeSet::new();
        for p0 in 0..6 {
            for p1 in 0..6 {
                for p2 in 0..6 {
                    let chi = pattern_character([p0, p1, p2]);
                    assert!(chi.is_generic().unwrap());
                    let signs = column_signs(&chi);
                    assert_eq!(signs, [COLUMN_PATTERNS[p0], COLUMN_PATTERNS[p1], COLUMN_PATTERNS[p2]]);
                    seen.insert(signs);
                }
            }
        }
        assert_eq!(seen.len(), 216);
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("1/100"), Some(BigRational::new(1.into(), 100.into())));
        assert_eq!(parse_rational("-3"), Some(q(-3)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn prop47_small_ranks() {
        for n in 2..=3 {
            let r = verify_prop47(n, DEFAULT_BUDGET).unwrap();
            assert!(r.pass, "{}", r.stable_json());
        }
        assert!(verify_prop47(6, DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn remark48_rejects_large_epsilon() {
        assert!(matches!(verify_remark48(&q(10), DEFAULT_BUDGET), Err(VerifyError::EpsilonTooLarge(_))));
    }

    #[test]
    fn reports_are_deterministic() {
        let a = verify_thm_n3(Mode::Random, 20, 3).unwrap();
        let b = verify_thm_n3(Mode::Random, 20, 3).unwrap();
        assert_eq!(a.stable_json(), b.stable_json());
        assert!(a.pass);
    }
}
