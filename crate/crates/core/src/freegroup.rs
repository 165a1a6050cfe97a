//! Free-group words and pure symmetric automorphisms.
//!
//! Automorphisms act on the right: `alpha.compose(&beta)` is "alpha, then
//! beta". A pure symmetric automorphism is stored by its conjugators, so the
//! image of `x_i` is `w_i^-1 x_i w_i`. Conjugators are kept in a canonical
//! form with no leading `x_i^{±1}`, which makes structural equality agree with
//! equality of automorphisms.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("generator index {index} outside 1..={rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("letter sign must be +1 or -1, got {0}")]
    InvalidSign(i64),
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("expected {expected} conjugators, got {got}")]
    ConjugatorCount { expected: usize, got: usize },
    #[error("split index {0} must not lie in the conjugated set")]
    SplitIndexInSet(usize),
    #[error("chi_{{i,j}} needs distinct indices, got i = j = {0}")]
    DiagonalIndex(usize),
    #[error("rank must be at least {min}, got {got}")]
    RankTooSmall { min: usize, got: usize },
    #[error("automorphism could not be inverted within the pure symmetric group")]
    NotInvertible,
}

/// A generator or its inverse. Serialized as `[index, sign]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "(usize, i64)", into = "(usize, i64)")]
pub struct Letter {
    generator: usize,
    inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, sign: i64) -> Result<Self, GroupError> {
        match sign {
            1 => Ok(Self { generator, inverse: false }),
            -1 => Ok(Self { generator, inverse: true }),
            s => Err(GroupError::InvalidSign(s)),
        }
    }

    pub fn pos(generator: usize) -> Self {
        Self { generator, inverse: false }
    }

    pub fn neg(generator: usize) -> Self {
        Self { generator, inverse: true }
    }

    pub fn generator(self) -> usize {
        self.generator
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inv(self) -> Self {
        Self { generator: self.generator, inverse: !self.inverse }
    }

    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }
}

impl TryFrom<(usize, i64)> for Letter {
    type Error = GroupError;
    fn try_from((generator, sign): (usize, i64)) -> Result<Self, Self::Error> {
        Letter::new(generator, sign)
    }
}

impl From<Letter> for (usize, i64) {
    fn from(l: Letter) -> Self {
        (l.generator, l.sign())
    }
}

/// A freely reduced word.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Word(Vec<Letter>);

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let letters = Vec::<Letter>::deserialize(d)?;
        Ok(Word::reduced(letters))
    }
}

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn generator(i: usize) -> Self {
        Word(vec![Letter::pos(i)])
    }

    /// Freely reduces `raw`, rejecting generator indices outside `1..=rank`.
    pub fn reduce(raw: impl IntoIterator<Item = Letter>, rank: usize) -> Result<Self, GroupError> {
        let letters: Vec<Letter> = raw.into_iter().collect();
        if let Some(bad) = letters.iter().find(|l| l.generator == 0 || l.generator > rank) {
            return Err(GroupError::IndexOutOfRange { index: bad.generator, rank });
        }
        Ok(Word::reduced(letters))
    }

    pub(crate) fn reduced(raw: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in raw {
            match out.last() {
                Some(&top) if top.cancels(l) => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_generator(&self) -> usize {
        self.0.iter().map(|l| l.generator).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        Word::reduced(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = Word::empty();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Exponent sum of `x_j`.
    pub fn phi(&self, j: usize) -> i64 {
        self.0.iter().filter(|l| l.generator == j).map(|l| l.sign()).sum()
    }

    /// `w^-1 x_i w`
    pub fn conjugate_of_generator(i: usize, w: &Word) -> Word {
        w.inverse().mul(&Word::generator(i)).mul(w)
    }

    /// Inverse of [`Word::conjugate_of_generator`]: the canonical `w` with
    /// `self = w^-1 x_i w`, if `self` has that shape.
    pub fn conjugator_for(&self, i: usize) -> Option<Word> {
        let n = self.0.len();
        if n.is_multiple_of(2) {
            return None;
        }
        let mid = n / 2;
        if self.0[mid] != Letter::pos(i) {
            return None;
        }
        let w = Word(self.0[mid + 1..].to_vec());
        let prefix = Word(self.0[..mid].to_vec());
        (prefix == w.inverse()).then(|| canonical_conjugator(i, w))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "·")?;
            }
            if l.inverse {
                write!(f, "x{}⁻¹", l.generator)?;
            } else {
                write!(f, "x{}", l.generator)?;
            }
        }
        Ok(())
    }
}

/// Strips leading powers of `x_i`; `x_i^k w` and `w` conjugate `x_i` alike.
fn canonical_conjugator(i: usize, w: Word) -> Word {
    let skip = w.0.iter().take_while(|l| l.generator == i).count();
    if skip == 0 {
        w
    } else {
        Word(w.0[skip..].to_vec())
    }
}

/// A pure symmetric automorphism `x_i ↦ w_i^-1 x_i w_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "AutRepr", into = "AutRepr")]
pub struct PureSymAut {
    rank: usize,
    conjugators: Vec<Word>,
}

#[derive(Serialize, Deserialize)]
struct AutRepr {
    n: usize,
    conjugators: Vec<Word>,
}

impl TryFrom<AutRepr> for PureSymAut {
    type Error = GroupError;
    fn try_from(r: AutRepr) -> Result<Self, Self::Error> {
        PureSymAut::new(r.n, r.conjugators)
    }
}

impl From<PureSymAut> for AutRepr {
    fn from(a: PureSymAut) -> Self {
        AutRepr { n: a.rank, conjugators: a.conjugators }
    }
}

impl PureSymAut {
    pub fn new(rank: usize, conjugators: Vec<Word>) -> Result<Self, GroupError> {
        if conjugators.len() != rank {
            return Err(GroupError::ConjugatorCount { expected: rank, got: conjugators.len() });
        }
        let mut out = Vec::with_capacity(rank);
        for (idx, w) in conjugators.into_iter().enumerate() {
            let w = Word::reduce(w.0, rank)?;
            out.push(canonical_conjugator(idx + 1, w));
        }
        Ok(Self { rank, conjugators: out })
    }

    pub fn identity(rank: usize) -> Self {
        Self { rank, conjugators: vec![Word::empty(); rank] }
    }

    /// The McCool generator `α_{i,j}`: `x_i ↦ x_j^-1 x_i x_j`.
    pub fn elementary(i: usize, j: usize, rank: usize) -> Result<Self, GroupError> {
        Self::whitehead(&[i], j, rank)
    }

    /// The symmetric Whitehead automorphism `α_{I,j} = ∏_{i∈I} α_{i,j}`.
    pub fn whitehead(set: &[usize], j: usize, rank: usize) -> Result<Self, GroupError> {
        check_index(j, rank)?;
        let mut aut = Self::identity(rank);
        for &i in set {
            check_index(i, rank)?;
            if i == j {
                return Err(GroupError::SplitIndexInSet(j));
            }
            aut.conjugators[i - 1] = Word::generator(j);
        }
        Ok(aut)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn conjugators(&self) -> &[Word] {
        &self.conjugators
    }

    pub fn conjugator(&self, i: usize) -> &Word {
        &self.conjugators[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.conjugators.iter().all(Word::is_empty)
    }

    /// Image of the generator `x_i`.
    pub fn image(&self, i: usize) -> Word {
        Word::conjugate_of_generator(i, &self.conjugators[i - 1])
    }

    pub fn apply(&self, w: &Word) -> Result<Word, GroupError> {
        if let Some(bad) = w.0.iter().find(|l| l.generator == 0 || l.generator > self.rank) {
            return Err(GroupError::IndexOutOfRange { index: bad.generator, rank: self.rank });
        }
        Ok(self.apply_unchecked(w))
    }

    fn apply_unchecked(&self, w: &Word) -> Word {
        let images: Vec<Word> = (1..=self.rank).map(|i| self.image(i)).collect();
        Word::reduced(w.0.iter().flat_map(|l| {
            let img = &images[l.generator - 1];
            let v: Vec<Letter> = if l.inverse {
                img.0.iter().rev().map(|x| x.inv()).collect()
            } else {
                img.0.clone()
            };
            v
        }))
    }

    /// `self` followed by `other`, via `w_{i,αβ} = w_{i,β} · (w_{i,α})β`.
    pub fn compose(&self, other: &PureSymAut) -> Result<PureSymAut, GroupError> {
        if self.rank != other.rank {
            return Err(GroupError::RankMismatch { left: self.rank, right: other.rank });
        }
        let conjugators = (0..self.rank)
            .map(|idx| {
                let moved = other.apply_unchecked(&self.conjugators[idx]);
                canonical_conjugator(idx + 1, other.conjugators[idx].mul(&moved))
            })
            .collect();
        Ok(PureSymAut { rank: self.rank, conjugators })
    }

    /// Inverse by Nielsen reduction of the image basis.
    ///
    /// Each step replaces one image `u_a` by `u_a u_b^e`, `u_b^e u_a` or
    /// `u_b^-e u_a u_b^e` whenever that strictly shortens it, carrying along
    /// the word `y_a` with `(y_a)self = u_a`. When every image is a single
    /// letter the carried words are the images of the inverse.
    pub fn inverse(&self) -> Result<PureSymAut, GroupError> {
        let n = self.rank;
        let mut imgs: Vec<Word> = (1..=n).map(|i| self.image(i)).collect();
        let mut pre: Vec<Word> = (1..=n).map(Word::generator).collect();
        let budget = 64 + 16 * imgs.iter().map(Word::len).sum::<usize>();
        for _ in 0..budget {
            if imgs.iter().all(|u| u.len() == 1) {
                break;
            }
            let mut best: Option<(usize, Word, Word)> = None;
            for a in 0..n {
                for b in 0..n {
                    if a == b {
                        continue;
                    }
                    for e in [1i64, -1] {
                        let ub = imgs[b].pow(e);
                        let yb = pre[b].pow(e);
                        let ub_inv = ub.inverse();
                        let yb_inv = yb.inverse();
                        let candidates = [
                            (imgs[a].mul(&ub), pre[a].mul(&yb)),
                            (ub.mul(&imgs[a]), yb.mul(&pre[a])),
                            (ub_inv.mul(&imgs[a]).mul(&ub), yb_inv.mul(&pre[a]).mul(&yb)),
                        ];
                        for (u, y) in candidates {
                            let current = best.as_ref().map_or(imgs[a].len(), |(_, bu, _)| bu.len());
                            let beats_a = u.len() < imgs[a].len();
                            if beats_a && (best.is_none() || u.len() < current) {
                                best = Some((a, u, y));
                            }
                        }
                    }
                }
            }
            match best {
                Some((a, u, y)) => {
                    imgs[a] = u;
                    pre[a] = y;
                }
                None => return Err(GroupError::NotInvertible),
            }
        }
        let mut inv = vec![Word::empty(); n];
        let mut seen = vec![false; n];
        for (u, y) in imgs.iter().zip(&pre) {
            if u.len() != 1 {
                return Err(GroupError::NotInvertible);
            }
            let l = u.0[0];
            let g = l.generator;
            if seen[g - 1] {
                return Err(GroupError::NotInvertible);
            }
            seen[g - 1] = true;
            let image = if l.inverse { y.inverse() } else { y.clone() };
            inv[g - 1] = image.conjugator_for(g).ok_or(GroupError::NotInvertible)?;
        }
        Ok(PureSymAut { rank: n, conjugators: inv })
    }

    /// `χ_{i,j}(self) = φ_j(w_i)`.
    pub fn chi(&self, i: usize, j: usize) -> Result<i64, GroupError> {
        check_index(i, self.rank)?;
        check_index(j, self.rank)?;
        if i == j {
            return Err(GroupError::DiagonalIndex(i));
        }
        Ok(self.conjugators[i - 1].phi(j))
    }

    /// `[a, b] = a^-1 b^-1 a b` in composition order.
    pub fn commutator(a: &PureSymAut, b: &PureSymAut) -> Result<PureSymAut, GroupError> {
        a.inverse()?.compose(&b.inverse()?)?.compose(a)?.compose(b)
    }
}

impl fmt::Display for PureSymAut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            (1..=self.rank).map(|i| format!("x{} ↦ {}", i, self.image(i))).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

fn check_index(i: usize, rank: usize) -> Result<(), GroupError> {
    if i == 0 || i > rank {
        Err(GroupError::IndexOutOfRange { index: i, rank })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationFamily {
    /// `[α_{i,j}, α_{k,l}]`
    Disjoint,
    /// `[α_{i,j}, α_{k,j}]`
    SharedTarget,
    /// `[α_{i,j} α_{k,j}, α_{i,k}]`
    Triangle,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationInstance {
    pub family: RelationFamily,
    pub indices: Vec<usize>,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct McCoolReport {
    pub n: usize,
    pub instances: Vec<RelationInstance>,
}

impl McCoolReport {
    pub fn all_hold(&self) -> bool {
        self.instances.iter().all(|r| r.holds)
    }
}

/// Evaluates every instance of McCool's three relation families over
/// distinct indices in `1..=n`.
pub fn mccool_check(n: usize) -> Result<McCoolReport, GroupError> {
    if n < 2 {
        return Err(GroupError::RankTooSmall { min: 2, got: n });
    }
    let a = |i, j| PureSymAut::elementary(i, j, n);
    let mut instances = Vec::new();
    let idx: Vec<usize> = (1..=n).collect();
    for &i in &idx {
        for &j in &idx {
            if i == j {
                continue;
            }
            for &k in &idx {
                if k == i || k == j {
                    continue;
                }
                let c = PureSymAut::commutator(&a(i, j)?, &a(k, j)?)?;
                instances.push(RelationInstance {
                    family: RelationFamily::SharedTarget,
                    indices: vec![i, j, k],
                    holds: c.is_identity(),
                });
                let prod = a(i, j)?.compose(&a(k, j)?)?;
                let c = PureSymAut::commutator(&prod, &a(i, k)?)?;
                instances.push(RelationInstance {
                    family: RelationFamily::Triangle,
                    indices: vec![i, j, k],
                    holds: c.is_identity(),
                });
                for &l in &idx {
                    if l == i || l == j || l == k {
                        continue;
                    }
                    let c = PureSymAut::commutator(&a(i, j)?, &a(k, l)?)?;
                    instances.push(RelationInstance {
                        family: RelationFamily::Disjoint,
                        indices: vec![i, j, k, l],
                        holds: c.is_identity(),
                    });
                }
            }
        }
    }
    Ok(McCoolReport { n, instances })
}
