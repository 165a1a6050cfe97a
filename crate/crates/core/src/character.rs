//! Characters `χ = Σ a_{i,j} χ_{i,j}` of the pure symmetric automorphism group.
//!
//! Entries are exact rationals. Off-diagonal entries are addressed either by
//! `(i, j)` (1-based) or by their row-major *position* among the `n(n-1)`
//! off-diagonal slots.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freegroup::{GroupError, PureSymAut};

/// Largest entry count `n(n-1)` for which [`Character::is_generic`] runs the
/// exact `{-1,0,1}` dependence search.
pub const DEFAULT_GENERIC_BOUND: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharacterError {
    #[error("index ({i}, {j}) is not an off-diagonal entry for rank {n}")]
    BadEntry { i: usize, j: usize, n: usize },
    #[error("rank mismatch: character has rank {character}, automorphism has rank {automorphism}")]
    RankMismatch { character: usize, automorphism: usize },
    #[error("the trivial character has no classification")]
    Trivial,
    #[error("{entries} entries exceed the exact genericity bound {bound}; use column_generic")]
    TooManyEntries { entries: usize, bound: usize },
    #[error("index set must be nonempty and avoid column {j}")]
    BadIndexSet { j: usize },
    #[error("rank must be at least 2, got {0}")]
    RankTooSmall(usize),
    #[error("zero denominator in entry ({i}, {j})")]
    ZeroDenominator { i: usize, j: usize },
    #[error("entry ({i}, {j}) does not fit the JSON integer range")]
    Overflow { i: usize, j: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignClass {
    Positive,
    Negative,
    Mixed,
}

/// Outcome of the test for membership in `Σ¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sigma1Status {
    InSigma1,
    /// Support inside a single pair `{i, j}`.
    ExcludedCase1,
    /// Support inside a triple with the antisymmetry `a_{p,q} = -a_{p',q}`.
    ExcludedCase2,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Deserialize)]
#[serde(try_from = "CharacterRepr")]
pub struct Character {
    n: usize,
    /// Row-major `n × n`, diagonal zero.
    entries: Vec<BigRational>,
}

#[derive(Serialize, Deserialize)]
struct CharacterRepr {
    n: usize,
    entries: Vec<EntryRepr>,
}

#[derive(Serialize, Deserialize)]
struct EntryRepr {
    i: usize,
    j: usize,
    num: i128,
    den: i128,
}

impl TryFrom<CharacterRepr> for Character {
    type Error = CharacterError;
    fn try_from(r: CharacterRepr) -> Result<Self, Self::Error> {
        let mut chi = Character::zero(r.n);
        for e in r.entries {
            if e.den == 0 {
                return Err(CharacterError::ZeroDenominator { i: e.i, j: e.j });
            }
            let q = BigRational::new(BigInt::from(e.num), BigInt::from(e.den));
            chi.set(e.i, e.j, q)?;
        }
        Ok(chi)
    }
}

impl Serialize for Character {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_repr().map_err(serde::ser::Error::custom)?.serialize(s)
    }
}

impl Character {
    pub fn zero(n: usize) -> Self {
        Self { n, entries: vec![BigRational::zero(); n * n] }
    }

    /// Builds a character from a function of `(i, j)`, `i != j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut c = Self::zero(n);
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    c.entries[(i - 1) * n + (j - 1)] = f(i, j);
                }
            }
        }
        c
    }

    pub fn from_integers(n: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        Self::from_fn(n, |i, j| BigRational::from_integer(BigInt::from(f(i, j))))
    }

    /// The basis character `χ_{i,j}`.
    pub fn basis(n: usize, i: usize, j: usize) -> Result<Self, CharacterError> {
        let mut c = Self::zero(n);
        c.set(i, j, BigRational::one())?;
        Ok(c)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    fn check(&self, i: usize, j: usize) -> Result<usize, CharacterError> {
        if i == 0 || j == 0 || i > self.n || j > self.n || i == j {
            return Err(CharacterError::BadEntry { i, j, n: self.n });
        }
        Ok((i - 1) * self.n + (j - 1))
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigRational) -> Result<(), CharacterError> {
        let k = self.check(i, j)?;
        self.entries[k] = value;
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[(i - 1) * self.n + (j - 1)]
    }

    /// Off-diagonal index pairs in row-major order.
    pub fn positions(n: usize) -> impl Iterator<Item = (usize, usize)> {
        (1..=n).flat_map(move |i| (1..=n).filter(move |&j| j != i).map(move |j| (i, j)))
    }

    pub fn off_diagonal(&self) -> Vec<BigRational> {
        Self::positions(self.n).map(|(i, j)| self.get(i, j).clone()).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn evaluate(&self, alpha: &PureSymAut) -> Result<BigRational, CharacterError> {
        if alpha.rank() != self.n {
            return Err(CharacterError::RankMismatch { character: self.n, automorphism: alpha.rank() });
        }
        let mut total = BigRational::zero();
        for (i, j) in Self::positions(self.n) {
            let a = self.get(i, j);
            if a.is_zero() {
                continue;
            }
            let c = alpha.chi(i, j)?;
            if c != 0 {
                total += a * BigRational::from_integer(BigInt::from(c));
            }
        }
        Ok(total)
    }

    pub fn classify(&self) -> Result<SignClass, CharacterError> {
        if self.is_trivial() {
            return Err(CharacterError::Trivial);
        }
        let vals = self.off_diagonal();
        if vals.iter().all(Signed::is_positive) {
            Ok(SignClass::Positive)
        } else if vals.iter().all(Signed::is_negative) {
            Ok(SignClass::Negative)
        } else {
            Ok(SignClass::Mixed)
        }
    }

    pub fn is_generic(&self) -> Result<bool, CharacterError> {
        self.is_generic_with_bound(DEFAULT_GENERIC_BOUND)
    }

    /// True iff no nonzero `ε ∈ {-1,0,1}^{n(n-1)}` has `Σ ε a = 0`.
    ///
    /// Meet in the middle: the entry vector is scaled to integers and split in
    /// two halves whose signed subset sums are joined through a hash set.
    pub fn is_generic_with_bound(&self, bound: usize) -> Result<bool, CharacterError> {
        let vals = integer_scaled(&self.off_diagonal());
        if vals.len() > bound {
            return Err(CharacterError::TooManyEntries { entries: vals.len(), bound });
        }
        Ok(!has_signed_dependence(&vals))
    }

    /// Every nonempty column subset sum `Σ_{i∈I} a_{i,j}` is nonzero.
    ///
    /// Weaker than genericity, but enough to make every split pair carry
    /// exactly one ascending ideal edge. Cost is `n · 2^{n-1}`.
    pub fn column_generic(&self) -> bool {
        (1..=self.n).all(|j| {
            let others: Vec<usize> = (1..=self.n).filter(|&i| i != j).collect();
            (1..(1u64 << others.len())).all(|mask| {
                let set: Vec<usize> =
                    others.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| i).collect();
                !self.column_sum(j, &set).is_zero()
            })
        })
    }

    pub fn column_sum(&self, j: usize, set: &[usize]) -> BigRational {
        set.iter().map(|&i| self.get(i, j).clone()).sum()
    }

    /// Sign of `Σ_{i∈I} a_{i,j}`.
    pub fn column_sum_sign(&self, j: usize, set: &[usize]) -> Result<Ordering, CharacterError> {
        if j == 0 || j > self.n || set.is_empty() || set.contains(&j) {
            return Err(CharacterError::BadIndexSet { j });
        }
        for &i in set {
            self.check(i, j)?;
        }
        Ok(self.column_sum(j, set).cmp(&BigRational::zero()))
    }

    pub fn antipode(&self) -> Character {
        Character { n: self.n, entries: self.entries.iter().map(|a| -a).collect() }
    }

    pub fn sigma1_status(&self) -> Result<Sigma1Status, CharacterError> {
        if self.is_trivial() {
            return Err(CharacterError::Trivial);
        }
        let support: Vec<(usize, usize)> =
            Self::positions(self.n).filter(|&(i, j)| !self.get(i, j).is_zero()).collect();
        let inside = |set: &[usize]| support.iter().all(|(p, q)| set.contains(p) && set.contains(q));
        for i in 1..=self.n {
            for j in i + 1..=self.n {
                if inside(&[i, j]) {
                    return Ok(Sigma1Status::ExcludedCase1);
                }
            }
        }
        for i in 1..=self.n {
            for j in i + 1..=self.n {
                for k in j + 1..=self.n {
                    let t = [i, j, k];
                    if !inside(&t) {
                        continue;
                    }
                    let antisymmetric = (0..3).all(|c| {
                        let q = t[c];
                        let p = t[(c + 1) % 3];
                        let p2 = t[(c + 2) % 3];
                        *self.get(p, q) == -self.get(p2, q)
                    });
                    if antisymmetric {
                        return Ok(Sigma1Status::ExcludedCase2);
                    }
                }
            }
        }
        Ok(Sigma1Status::InSigma1)
    }

    /// Seeded random generic character.
    ///
    /// Up to rank 4, nonzero integers of size up to `10^9` are drawn until
    /// the exact check passes. From rank 5 on, entry
    /// `p` is `±3^{π(p)}·M + r_p` for a random permutation `π` and
    /// `|r_p| < M / n(n-1)`, which is generic by uniqueness of balanced
    /// ternary expansions.
    pub fn random_generic(n: usize, seed: u64) -> Result<Character, CharacterError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_generic_with(n, &mut rng)
    }

    pub fn random_generic_with<R: Rng>(n: usize, rng: &mut R) -> Result<Character, CharacterError> {
        if n < 2 {
            return Err(CharacterError::RankTooSmall(n));
        }
        let k = n * (n - 1);
        if n >= 5 {
            let mut powers: Vec<usize> = (0..k).collect();
            powers.shuffle(rng);
            let slack = 1000i64;
            let m = BigInt::from(slack * k as i64);
            let three = BigInt::from(3);
            let mut p = 0;
            return Ok(Self::from_fn(n, |_, _| {
                let sign = if rng.gen::<bool>() { 1 } else { -1 };
                let r: i64 = rng.gen_range(-(slack - 1)..=slack - 1);
                let v = three.pow(powers[p] as u32) * &m * sign + r;
                p += 1;
                BigRational::from_integer(v)
            }));
        }
        loop {
            let c = Self::from_integers(n, |_, _| loop {
                let v: i64 = rng.gen_range(-1_000_000_000..=1_000_000_000);
                if v != 0 {
                    break v;
                }
            });
            if c.is_generic()? {
                return Ok(c);
            }
        }
    }

    /// Seeded random character with every entry strictly positive.
    pub fn random_positive<R: Rng>(n: usize, rng: &mut R) -> Character {
        Self::from_integers(n, |_, _| rng.gen_range(1..=1000))
    }

    fn to_repr(&self) -> Result<CharacterRepr, CharacterError> {
        let mut entries = Vec::new();
        for (i, j) in Self::positions(self.n) {
            let q = self.get(i, j);
            if q.is_zero() {
                continue;
            }
            let num = q.numer().to_i128().ok_or(CharacterError::Overflow { i, j })?;
            let den = q.denom().to_i128().ok_or(CharacterError::Overflow { i, j })?;
            entries.push(EntryRepr { i, j, num, den });
        }
        Ok(CharacterRepr { n: self.n, entries })
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = Self::positions(self.n)
            .filter(|&(i, j)| !self.get(i, j).is_zero())
            .map(|(i, j)| format!("{}·χ{},{}", self.get(i, j), i, j))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Scales a rational vector by the lcm of its denominators.
fn integer_scaled(vals: &[BigRational]) -> Vec<BigInt> {
    let l = vals.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    vals.iter().map(|q| q.numer() * (&l / q.denom())).collect()
}

/// Signed subset sums `Σ ε_k v_k` over all nonzero `ε ∈ {-1,0,1}^k`.
fn nonzero_signed_sums<T>(vals: &[T]) -> Vec<T>
where
    T: Clone + Zero + for<'a> std::ops::Add<&'a T, Output = T> + for<'a> std::ops::Sub<&'a T, Output = T>,
{
    // all sums including the zero vector, in ternary order; drop index 0
    let mut sums = vec![T::zero()];
    for v in vals {
        let mut next = Vec::with_capacity(sums.len() * 3);
        for s in &sums {
            next.push(s.clone());
            next.push(s.clone() + v);
            next.push(s.clone() - v);
        }
        sums = next;
    }
    sums.swap_remove(0);
    sums
}

fn has_signed_dependence(vals: &[BigInt]) -> bool {
    if vals.iter().any(Zero::is_zero) {
        return true;
    }
    let total: BigInt = vals.iter().map(|v| v.abs()).sum();
    if total < BigInt::from(i128::MAX) {
        let small: Vec<i128> = vals.iter().map(|v| v.to_i128().expect("bounded by total")).collect();
        return has_signed_dependence_small(&small);
    }
    let (left, right) = vals.split_at(vals.len() / 2);
    let lsums = nonzero_signed_sums(left);
    let rsums = nonzero_signed_sums(right);
    if lsums.iter().chain(&rsums).any(Zero::is_zero) {
        return true;
    }
    let lset: HashSet<&BigInt> = lsums.iter().collect();
    rsums.iter().any(|s| lset.contains(&-s))
}

fn has_signed_dependence_small(vals: &[i128]) -> bool {
    let (left, right) = vals.split_at(vals.len() / 2);
    let mut lsums = nonzero_signed_sums(left);
    let rsums = nonzero_signed_sums(right);
    if lsums.iter().chain(&rsums).any(|s| *s == 0) {
        return true;
    }
    lsums.sort_unstable();
    rsums.iter().any(|s| lsums.binary_search(&-s).is_ok())
}

/// The rank-4 character with `a_{1,2} = a_{2,1} = a_{3,4} = a_{4,3} = 3` and
/// every other entry `-1`.
pub fn remark48_base() -> Character {
    Character::from_integers(4, |i, j| match (i, j) {
        (1, 2) | (2, 1) | (3, 4) | (4, 3) => 3,
        _ => -1,
    })
}

/// Adds `ε · 3^{p - n(n-1)}` to the entry at position `p`.
///
/// The offsets are distinct powers of three scaled so their total magnitude
/// stays below `|ε|/2`. For an integer base character any `0 < |ε| < 2` then
/// yields a generic character.
pub fn perturb(base: &Character, epsilon: &BigRational) -> Character {
    let n = base.rank();
    let k = (n * (n - 1)) as u32;
    let scale = BigRational::new(BigInt::one(), BigInt::from(3u32).pow(k));
    let mut out = base.clone();
    for (p, (i, j)) in Character::positions(n).enumerate() {
        let offset = epsilon * &scale * BigRational::from_integer(BigInt::from(3u32).pow(p as u32));
        let v = base.get(i, j) + offset;
        out.set(i, j, v).expect("position is off-diagonal");
    }
    out
}

/// Whether every nonzero column subset sum of `base` keeps its sign in
/// `perturbed`.
pub fn preserves_column_signs(base: &Character, perturbed: &Character) -> bool {
    let n = base.rank();
    (1..=n).all(|j| {
        let others: Vec<usize> = (1..=n).filter(|&i| i != j).collect();
        (1..(1u64 << others.len())).all(|mask| {
            let set: Vec<usize> =
                others.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| i).collect();
            let b = base.column_sum(j, &set);
            b.is_zero() || b.signum() == perturbed.column_sum(j, &set).signum()
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// Brute-force `{-1,0,1}` dependence search, independent of the
    /// meet-in-the-middle join.
    fn brute_generic(c: &Character) -> bool {
        let vals = c.off_diagonal();
        let k = vals.len();
        let total = 3usize.pow(k as u32);
        (1..total).all(|mut code| {
            let mut s = BigRational::zero();
            for v in &vals {
                match code % 3 {
                    1 => s += v,
                    2 => s -= v,
                    _ => {}
                }
                code /= 3;
            }
            !s.is_zero()
        })
    }

    #[test]
    fn evaluate_examples() {
        let mut c = Character::zero(3);
        c.set(1, 2, q(5, 1)).unwrap();
        let a12 = PureSymAut::elementary(1, 2, 3).unwrap();
        assert_eq!(c.evaluate(&a12).unwrap(), q(5, 1));
        assert!(c.evaluate(&PureSymAut::identity(3)).unwrap().is_zero());
        assert!(matches!(
            c.evaluate(&PureSymAut::identity(2)),
            Err(CharacterError::RankMismatch { .. })
        ));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(Character::from_integers(3, |_, _| 1).classify().unwrap(), SignClass::Positive);
        assert_eq!(Character::from_integers(3, |_, _| -1).classify().unwrap(), SignClass::Negative);
        assert_eq!(remark48_base().classify().unwrap(), SignClass::Mixed);
        assert_eq!(Character::zero(3).classify().unwrap_err(), CharacterError::Trivial);
    }

    #[test]
    fn genericity_examples() {
        let mut p = 0u32;
        let powers = Character::from_fn(3, |_, _| {
            p += 1;
            BigRational::from_integer(BigInt::from(3).pow(p - 1))
        });
        assert!(brute_generic(&powers));
        assert!(powers.is_generic().unwrap());
        assert!(!Character::from_integers(3, |_, _| 1).is_generic().unwrap());
        assert!(!Character::basis(2, 1, 2).unwrap().is_generic().unwrap());
        let big = Character::from_integers(6, |_, _| 1);
        assert!(matches!(big.is_generic(), Err(CharacterError::TooManyEntries { entries: 30, .. })));
    }

    #[test]
    fn meet_in_the_middle_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let c = Character::from_integers(3, |_, _| rng.gen_range(-6..=6));
            assert_eq!(c.is_generic().unwrap(), brute_generic(&c), "{c}");
        }
    }

    #[test]
    fn column_sum_sign_examples() {
        let pos = Character::from_integers(3, |_, _| 2);
        assert_eq!(pos.column_sum_sign(1, &[2, 3]).unwrap(), Ordering::Greater);
        let r = remark48_base();
        assert_eq!(r.column_sum_sign(2, &[1]).unwrap(), Ordering::Greater);
        assert_eq!(r.column_sum_sign(2, &[3]).unwrap(), Ordering::Less);
        assert!(r.column_sum_sign(2, &[]).is_err());
        assert!(r.column_sum_sign(2, &[2, 3]).is_err());
    }

    #[test]
    fn random_generic_examples() {
        let a = Character::random_generic(3, 7).unwrap();
        assert!(a.is_generic().unwrap());
        assert_eq!(a, Character::random_generic(3, 7).unwrap());
        for seed in 0..50 {
            let c = Character::random_generic(2, seed).unwrap();
            let (x, y) = (c.get(1, 2), c.get(2, 1));
            assert!(!x.is_zero() && !y.is_zero() && x.abs() != y.abs());
        }
        assert!(Character::random_generic(1, 0).is_err());
    }

    #[test]
    fn sigma1_examples() {
        assert_eq!(Character::basis(3, 1, 2).unwrap().sigma1_status().unwrap(), Sigma1Status::ExcludedCase1);
        let mut c = Character::zero(3);
        for (i, j, v) in [(1, 2, 1), (3, 2, -1), (1, 3, 1), (2, 3, -1), (2, 1, 1), (3, 1, -1)] {
            c.set(i, j, q(v, 1)).unwrap();
        }
        assert_eq!(c.sigma1_status().unwrap(), Sigma1Status::ExcludedCase2);
        assert_eq!(Character::from_integers(3, |_, _| 1).sigma1_status().unwrap(), Sigma1Status::InSigma1);
        assert!(Character::zero(2).sigma1_status().is_err());
    }

    #[test]
    fn antipode_examples() {
        let r = remark48_base();
        let a = r.antipode();
        assert_eq!(a.get(1, 2), &q(-3, 1));
        assert_eq!(a.get(1, 3), &q(1, 1));
        assert_eq!(a.antipode(), r);
        assert_eq!(Character::from_integers(3, |_, _| 4).antipode().classify().unwrap(), SignClass::Negative);
    }

    #[test]
    fn remark48_perturbation() {
        let base = remark48_base();
        assert!(base.column_generic());
        for eps in [q(1, 100), q(1, 1000)] {
            let c = perturb(&base, &eps);
            assert!(c.is_generic().unwrap());
            assert!(preserves_column_signs(&base, &c));
        }
        assert!(!preserves_column_signs(&base, &perturb(&base, &q(10, 1))));
    }

    #[test]
    fn json_round_trip() {
        let c = perturb(&remark48_base(), &q(1, 100));
        let s = serde_json::to_string(&c).unwrap();
        let back: Character = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        let sparse: Character = serde_json::from_str(r#"{"n":3,"entries":[{"i":1,"j":2,"num":1,"den":2}]}"#).unwrap();
        assert_eq!(sparse.get(1, 2), &q(1, 2));
        assert!(sparse.get(2, 1).is_zero());
        assert!(serde_json::from_str::<Character>(r#"{"n":3,"entries":[{"i":1,"j":1,"num":1,"den":1}]}"#).is_err());
    }
}
