//! Twisted conjugacy in free and free-abelian groups, and the mapping
//! torus `π ⋊ Z`.
//!
//! Words are freely reduced sequences of nonzero letters: `+(i+1)` is the
//! generator `a_i`, `-(i+1)` its inverse. Generators print as `a, b, c, …`.
//!
//! Class counting uses word length in `π` as its norm; the geodesic-length
//! norm of the closed-surface setting is not computed here.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

/// Label attached to every counting output.
pub const NORM_LABEL: &str = "word-length norm";

/// Largest word ball any enumeration is allowed to materialize.
pub const MAX_BALL: u128 = 1_000_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupWord(Vec<i32>);

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord(Vec::new())
    }

    pub fn generator(i: usize) -> Self {
        GroupWord(vec![i as i32 + 1])
    }

    /// Freely reduces `letters`. Zero letters are rejected.
    pub fn from_letters<I: IntoIterator<Item = i32>>(letters: I) -> Self {
        let mut out: Vec<i32> = Vec::new();
        for l in letters {
            assert!(l != 0, "letter 0 is not a generator");
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GroupWord(out)
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Highest generator index used plus one.
    pub fn rank_used(&self) -> usize {
        self.0.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Self {
        GroupWord(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.0.clone();
        for &l in &other.0 {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GroupWord(out)
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(Self::identity(), |acc, _| acc.mul(&base))
    }
}

fn generator_name(i: usize) -> char {
    (b'a' + i as u8) as char
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, &l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", generator_name(l.unsigned_abs() as usize - 1))?;
            if l < 0 {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupWord({self})")
    }
}

/// Accepts `a b^-1`, `aB` (upper case for inverses), `a^3`, and `1`/`e`
/// for the identity.
impl FromStr for GroupWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "1" || s == "e" {
            return Ok(Self::identity());
        }
        let chars: Vec<char> = s.chars().collect();
        let mut letters = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == '*' || c == '.' {
                i += 1;
                continue;
            }
            if !c.is_ascii_alphabetic() {
                return Err(Error::Parse(format!("unexpected character {c:?} in word {s:?}")));
            }
            let idx = (c.to_ascii_lowercase() as u8 - b'a') as i32 + 1;
            let mut letter = if c.is_ascii_uppercase() { -idx } else { idx };
            i += 1;
            let mut power = 1i64;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let start = i;
                if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let exp: String = chars[start..i].iter().collect();
                power = exp
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent {exp:?} in word {s:?}")))?;
            }
            if power < 0 {
                letter = -letter;
            }
            letters.extend(std::iter::repeat_n(letter, power.unsigned_abs() as usize));
        }
        Ok(Self::from_letters(letters))
    }
}

/// Endomorphism of the free group of rank `images.len()`, given by the
/// images of the generators.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FreeEndomorphism {
    images: Vec<GroupWord>,
}

impl FreeEndomorphism {
    pub fn new(images: Vec<GroupWord>) -> Result<Self> {
        let rank = images.len();
        if rank == 0 {
            return Err(Error::InvalidArgument("endomorphism needs at least one generator".into()));
        }
        if let Some(w) = images.iter().find(|w| w.rank_used() > rank) {
            return Err(Error::InvalidArgument(format!("image {w} uses a generator outside rank {rank}")));
        }
        Ok(FreeEndomorphism { images })
    }

    pub fn identity(rank: usize) -> Self {
        FreeEndomorphism {
            images: (0..rank).map(GroupWord::generator).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[GroupWord] {
        &self.images
    }

    pub fn check_word(&self, w: &GroupWord) -> Result<()> {
        if w.rank_used() > self.rank() {
            return Err(Error::InvalidArgument(format!(
                "word {w} uses a generator outside rank {}",
                self.rank()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, w: &GroupWord) -> GroupWord {
        let mut out = GroupWord::identity();
        for &l in w.letters() {
            let img = &self.images[l.unsigned_abs() as usize - 1];
            out = if l > 0 { out.mul(img) } else { out.mul(&img.inverse()) };
        }
        out
    }

    /// `φ^k(w)` for `k ≥ 0`.
    pub fn apply_iter(&self, w: &GroupWord, k: u64) -> GroupWord {
        (0..k).fold(w.clone(), |acc, _| self.apply(&acc))
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Self {
        FreeEndomorphism {
            images: other.images.iter().map(|w| self.apply(w)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| *w == GroupWord::generator(i))
    }
}

impl fmt::Display for FreeEndomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} -> {w}", generator_name(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for FreeEndomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeEndomorphism({self})")
    }
}

/// Parses `"a -> a b, b -> a"`. Every generator `a, b, …` up to the highest
/// one named must be given exactly once.
impl FromStr for FreeEndomorphism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut images: Vec<Option<GroupWord>> = Vec::new();
        for clause in s.split(',').map(str::trim).filter(|c| !c.is_empty()) {
            let (lhs, rhs) = clause
                .split_once("->")
                .ok_or_else(|| Error::Parse(format!("expected `g -> word` in {clause:?}")))?;
            let lhs = lhs.trim();
            let mut it = lhs.chars();
            let (Some(g), None) = (it.next(), it.next()) else {
                return Err(Error::Parse(format!("left side {lhs:?} must be a single generator")));
            };
            if !g.is_ascii_lowercase() {
                return Err(Error::Parse(format!("left side {lhs:?} must be a lower-case generator")));
            }
            let idx = (g as u8 - b'a') as usize;
            if images.len() <= idx {
                images.resize(idx + 1, None);
            }
            if images[idx].is_some() {
                return Err(Error::Parse(format!("generator {g} given twice")));
            }
            images[idx] = Some(rhs.parse()?);
        }
        if images.is_empty() {
            return Err(Error::Parse("empty endomorphism".into()));
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, w)| w.ok_or_else(|| Error::Parse(format!("missing image of {}", generator_name(i)))))
            .collect::<Result<Vec<_>>>()?;
        FreeEndomorphism::new(images)
    }
}

/// `γ · x · φ(γ)⁻¹`, freely reduced.
pub fn twisted_conjugate_action(gamma: &GroupWord, x: &GroupWord, phi: &FreeEndomorphism) -> GroupWord {
    gamma.mul(x).mul(&phi.apply(gamma).inverse())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwistedSearch {
    /// A conjugator `γ` with `γ x φ(γ)⁻¹ = y`.
    Yes(GroupWord),
    /// No conjugator within the bound; not a proof of non-conjugacy.
    Unknown,
}

impl TwistedSearch {
    pub fn witness(&self) -> Option<&GroupWord> {
        match self {
            TwistedSearch::Yes(w) => Some(w),
            TwistedSearch::Unknown => None,
        }
    }
}

/// Number of reduced words of length ≤ `len` in the free group of `rank`.
pub fn ball_size(rank: usize, len: usize) -> u128 {
    if rank == 0 {
        return 1;
    }
    let mut total: u128 = 1;
    let mut sphere: u128 = 2 * rank as u128;
    for _ in 0..len {
        total = total.saturating_add(sphere);
        sphere = sphere.saturating_mul(2 * rank as u128 - 1);
    }
    total
}

/// All reduced words of length ≤ `len`, in shortlex order.
pub fn word_ball(rank: usize, len: usize) -> Result<Vec<GroupWord>> {
    let size = ball_size(rank, len);
    if size > MAX_BALL {
        return Err(Error::ResourceLimit(format!(
            "ball of radius {len} in rank {rank} has {size} words (limit {MAX_BALL})"
        )));
    }
    let mut letters: Vec<i32> = (1..=rank as i32).flat_map(|g| [g, -g]).collect();
    letters.sort_by_key(|&l| (l.abs(), l < 0));
    let mut all = vec![GroupWord::identity()];
    let mut frontier = vec![GroupWord::identity()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in &letters {
                if w.0.last() == Some(&-l) {
                    continue;
                }
                let mut v = w.0.clone();
                v.push(l);
                next.push(GroupWord(v));
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(all)
}

/// Exhaustive search over conjugators of length ≤ `bound`, shortest first.
pub fn are_twisted_conjugate_bounded(
    x: &GroupWord,
    y: &GroupWord,
    phi: &FreeEndomorphism,
    bound: usize,
) -> Result<TwistedSearch> {
    phi.check_word(x)?;
    phi.check_word(y)?;
    for gamma in word_ball(phi.rank(), bound)? {
        if twisted_conjugate_action(&gamma, x, phi) == *y {
            return Ok(TwistedSearch::Yes(gamma));
        }
    }
    Ok(TwistedSearch::Unknown)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reidemeister {
    Finite(BigInt),
    Infinite,
}

/// Number of classes of `x ~ x + (I − M)γ` on `Z^k`: `|det(I − M)|`, or
/// infinite when the determinant vanishes.
pub fn reidemeister_number_abelian(m: &IntMatrix) -> Reidemeister {
    let d = m.scalar_minus(1).det();
    if d.is_zero() {
        Reidemeister::Infinite
    } else {
        Reidemeister::Finite(d.abs())
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    cells: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
            cells: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.cells -= 1;
        true
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn cell_sizes(&mut self) -> Vec<usize> {
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for i in 0..self.parent.len() {
            *counts.entry(self.find(i)).or_default() += 1;
        }
        counts.into_values().collect()
    }
}

/// Classes of `(Z/N)^k` under `x ↦ x + (I − M)e_i`, counted with a
/// union-find over all residues.
pub fn abelian_cells_mod(m: &IntMatrix, modulus: u64) -> Result<usize> {
    let k = m.size();
    let n = modulus as usize;
    let total = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if modulus == 0 || total > MAX_BALL {
        return Err(Error::ResourceLimit(format!("(Z/{modulus})^{k} is too large to enumerate")));
    }
    let total = total as usize;
    let shift = m.scalar_minus(1);
    let moves: Vec<Vec<usize>> = (0..k)
        .map(|col| {
            (0..k)
                .map(|row| {
                    let v = shift.get(row, col) % BigInt::from(modulus);
                    let v: i64 = v.try_into().expect("residue fits in i64");
                    v.rem_euclid(modulus as i64) as usize
                })
                .collect()
        })
        .collect();
    let mut uf = UnionFind::new(total);
    let mut digits = vec![0usize; k];
    for idx in 0..total {
        let mut rest = idx;
        for d in digits.iter_mut() {
            *d = rest % n;
            rest /= n;
        }
        for mv in &moves {
            let mut target = 0;
            for j in (0..k).rev() {
                target = target * n + (digits[j] + mv[j]) % n;
            }
            uf.union(idx, target);
        }
    }
    Ok(uf.cells())
}

/// Enumerative count of abelian twisted classes: the largest cell count of
/// [`abelian_cells_mod`] over moduli `1..=modulus_bound`. Equals the
/// Reidemeister number once the bound reaches the exponent of the cokernel.
pub fn abelian_class_count_enumerated(m: &IntMatrix, modulus_bound: u64) -> Result<usize> {
    let mut best = 0;
    for n in 1..=modulus_bound {
        best = best.max(abelian_cells_mod(m, n)?);
    }
    Ok(best)
}

/// Element `w · z^t` of the mapping torus, normal form for the relation
/// `z g z⁻¹ = φ(g)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MappingTorusElement {
    pub w: GroupWord,
    pub t: i64,
}

impl MappingTorusElement {
    pub fn new(w: GroupWord, t: i64) -> Self {
        MappingTorusElement { w, t }
    }

    pub fn identity() -> Self {
        Self::new(GroupWord::identity(), 0)
    }

    pub fn stable_letter() -> Self {
        Self::new(GroupWord::identity(), 1)
    }
}

impl fmt::Display for MappingTorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.w.is_empty(), self.t) {
            (_, 0) => write!(f, "{}", self.w),
            (true, t) => write!(f, "z^{t}"),
            (false, t) => write!(f, "{} z^{t}", self.w),
        }
    }
}

/// `π ⋊_φ Z`, optionally with `φ⁻¹` so negative stable-letter powers can be
/// normalized.
#[derive(Clone, Debug)]
pub struct MappingTorus {
    phi: FreeEndomorphism,
    phi_inv: Option<FreeEndomorphism>,
}

impl MappingTorus {
    pub fn new(phi: FreeEndomorphism) -> Self {
        MappingTorus { phi, phi_inv: None }
    }

    /// Checks `φ ∘ φ⁻¹ = φ⁻¹ ∘ φ = id` on generators.
    pub fn with_inverse(phi: FreeEndomorphism, phi_inv: FreeEndomorphism) -> Result<Self> {
        if phi.rank() != phi_inv.rank() {
            return Err(Error::InvalidArgument("endomorphism and inverse have different ranks".into()));
        }
        if !phi.compose(&phi_inv).is_identity() || !phi_inv.compose(&phi).is_identity() {
            return Err(Error::InvalidArgument(format!(
                "supplied inverse ({phi_inv}) does not invert ({phi}) on generators"
            )));
        }
        Ok(MappingTorus {
            phi,
            phi_inv: Some(phi_inv),
        })
    }

    pub fn phi(&self) -> &FreeEndomorphism {
        &self.phi
    }

    pub fn is_automorphism(&self) -> bool {
        self.phi_inv.is_some()
    }

    /// `φ^k(w)` for any integer `k`.
    pub fn phi_pow(&self, w: &GroupWord, k: i64) -> Result<GroupWord> {
        if k >= 0 {
            return Ok(self.phi.apply_iter(w, k as u64));
        }
        let inv = self.phi_inv.as_ref().ok_or_else(|| {
            Error::Unsupported("negative stable-letter power needs a supplied inverse endomorphism".into())
        })?;
        Ok(inv.apply_iter(w, k.unsigned_abs()))
    }

    /// `(w₁z^{t₁})(w₂z^{t₂}) = w₁·φ^{t₁}(w₂)·z^{t₁+t₂}`
    pub fn mul(&self, u: &MappingTorusElement, v: &MappingTorusElement) -> Result<MappingTorusElement> {
        let moved = self.phi_pow(&v.w, u.t)?;
        Ok(MappingTorusElement::new(u.w.mul(&moved), u.t + v.t))
    }

    /// `(w z^t)⁻¹ = φ^{−t}(w⁻¹) z^{−t}`
    pub fn inverse(&self, u: &MappingTorusElement) -> Result<MappingTorusElement> {
        Ok(MappingTorusElement::new(self.phi_pow(&u.w.inverse(), -u.t)?, -u.t))
    }

    /// `g·u = v·g`
    pub fn conjugates(&self, g: &MappingTorusElement, u: &MappingTorusElement, v: &MappingTorusElement) -> Result<bool> {
        Ok(self.mul(g, u)? == self.mul(v, g)?)
    }

    /// Search for `g = w z^s` with `|w| + |s| ≤ bound` and `g·u = v·g`.
    pub fn conjugate_bounded(
        &self,
        u: &MappingTorusElement,
        v: &MappingTorusElement,
        bound: usize,
    ) -> Result<Option<MappingTorusElement>> {
        let ball = word_ball(self.phi.rank(), bound)?;
        for w in &ball {
            let rest = (bound - w.len()) as i64;
            for s in std::iter::once(0).chain((1..=rest).flat_map(|s| [s, -s])) {
                if s < 0 && self.phi_inv.is_none() {
                    continue;
                }
                let g = MappingTorusElement::new(w.clone(), s);
                if self.conjugates(&g, u, v)? {
                    return Ok(Some(g));
                }
            }
        }
        Ok(None)
    }
}

/// `u · v` in the mapping torus.
pub fn mapping_torus_mul(
    u: &MappingTorusElement,
    v: &MappingTorusElement,
    torus: &MappingTorus,
) -> Result<MappingTorusElement> {
    torus.mul(u, v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusCrosscheck {
    pub x: GroupWord,
    pub y: GroupWord,
    pub twisted: TwistedSearch,
    /// Conjugator `g` in the mapping torus with `g(xz) = (yz)g`.
    pub torus: Option<MappingTorusElement>,
    /// The twisted witness `γ` satisfies `γ(xz) = (yz)γ`.
    pub twisted_witness_valid: Option<bool>,
    /// Twisted witness derived from `torus`, if that search succeeded.
    pub derived_twisted_witness: Option<GroupWord>,
    pub derived_witness_valid: Option<bool>,
}

impl TorusCrosscheck {
    /// Every witness found on either side validated on the other side.
    pub fn agrees(&self) -> bool {
        self.twisted_witness_valid != Some(false) && self.derived_witness_valid != Some(false)
    }
}

/// Runs bounded searches on both sides of the correspondence
/// `x ~_φ y ⇔ xz ~ yz` and checks each witness on the other side.
pub fn torus_crosscheck(x: &GroupWord, y: &GroupWord, torus: &MappingTorus, bound: usize) -> Result<TorusCrosscheck> {
    if !torus.is_automorphism() {
        return Err(Error::Unsupported("cross-check needs an automorphism with supplied inverse".into()));
    }
    let phi = torus.phi();
    let twisted = are_twisted_conjugate_bounded(x, y, phi, bound)?;
    let xz = MappingTorusElement::new(x.clone(), 1);
    let yz = MappingTorusElement::new(y.clone(), 1);
    let twisted_witness_valid = match twisted.witness() {
        Some(g) => Some(torus.conjugates(&MappingTorusElement::new(g.clone(), 0), &xz, &yz)?),
        None => None,
    };
    let found = torus.conjugate_bounded(&xz, &yz, bound)?;
    let (derived, derived_valid) = match &found {
        Some(g) => {
            let gamma = twisted_witness_from_torus(g, x, torus)?;
            let ok = twisted_conjugate_action(&gamma, x, phi) == *y;
            (Some(gamma), Some(ok))
        }
        None => (None, None),
    };
    Ok(TorusCrosscheck {
        x: x.clone(),
        y: y.clone(),
        twisted,
        torus: found,
        twisted_witness_valid,
        derived_twisted_witness: derived,
        derived_witness_valid: derived_valid,
    })
}

/// From `g = w z^s` with `g(xz)g⁻¹ = yz`, the twisted conjugator
/// `w·γ_s` where `γ_s x φ(γ_s)⁻¹ = φ^s(x)`.
pub fn twisted_witness_from_torus(g: &MappingTorusElement, x: &GroupWord, torus: &MappingTorus) -> Result<GroupWord> {
    let mut gamma = GroupWord::identity();
    if g.t >= 0 {
        for i in 0..g.t {
            gamma = torus.phi_pow(x, i)?.inverse().mul(&gamma);
        }
    } else {
        for i in (g.t..0).rev() {
            gamma = torus.phi_pow(x, i)?.mul(&gamma);
        }
    }
    Ok(g.w.mul(&gamma))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassCountRow {
    pub length: usize,
    pub words: usize,
    pub cells: usize,
    /// Fraction of word pairs left in different cells.
    pub unknown_fraction: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassCountReport {
    pub norm: &'static str,
    pub bound: usize,
    pub rows: Vec<ClassCountRow>,
}

/// Partitions the words of length ≤ ℓ, for each ℓ in `0..=max_len`, by the
/// bounded-witness relation (`x` and `γxφ(γ)⁻¹` merged for `|γ| ≤ bound`).
///
/// Distinct cells may still be twisted conjugate through longer conjugators;
/// the unknown fraction reports how many pairs remain unresolved.
pub fn class_count_lower_bound(phi: &FreeEndomorphism, max_len: usize, bound: usize) -> Result<ClassCountReport> {
    let rank = phi.rank();
    let ball = word_ball(rank, max_len)?;
    let conjugators: Vec<(GroupWord, GroupWord)> = word_ball(rank, bound)?
        .into_iter()
        .map(|g| {
            let tail = phi.apply(&g).inverse();
            (g, tail)
        })
        .collect();
    let mut rows = Vec::with_capacity(max_len + 1);
    for len in 0..=max_len {
        let words: Vec<&GroupWord> = ball.iter().take_while(|w| w.len() <= len).collect();
        let index: HashMap<&GroupWord, usize> = words.iter().enumerate().map(|(i, w)| (*w, i)).collect();
        let mut uf = UnionFind::new(words.len());
        for (i, x) in words.iter().enumerate() {
            for (g, tail) in &conjugators {
                let y = g.mul(x).mul(tail);
                if y.len() <= len {
                    if let Some(&j) = index.get(&y) {
                        uf.union(i, j);
                    }
                }
            }
        }
        let n = words.len() as f64;
        let total_pairs = n * (n - 1.0) / 2.0;
        let same: f64 = uf.cell_sizes().iter().map(|&s| (s as f64) * (s as f64 - 1.0) / 2.0).sum();
        rows.push(ClassCountRow {
            length: len,
            words: words.len(),
            cells: uf.cells(),
            unknown_fraction: if total_pairs > 0.0 { (total_pairs - same) / total_pairs } else { 0.0 },
        });
    }
    Ok(ClassCountReport {
        norm: NORM_LABEL,
        bound,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> GroupWord {
        s.parse().unwrap()
    }

    fn anosov() -> MappingTorus {
        MappingTorus::with_inverse("a -> a b, b -> a".parse().unwrap(), "a -> b, b -> b^-1 a".parse().unwrap()).unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(w("a b^-1").letters(), &[1, -2]);
        assert_eq!(w("aB"), w("a b^-1"));
        assert_eq!(w("a a^-1 b"), w("b"));
        assert_eq!(w("a^3").len(), 3);
        assert_eq!(w("b^-2"), w("B B"));
        assert_eq!(w("1"), GroupWord::identity());
        assert_eq!(w("a b^-1").to_string(), "a b^-1");
        assert!("a?".parse::<GroupWord>().is_err());
        let phi: FreeEndomorphism = "a -> a b, b -> a".parse().unwrap();
        assert_eq!(phi.to_string(), "a -> a b, b -> a");
        assert!("a -> b, a -> a".parse::<FreeEndomorphism>().is_err());
        assert!("b -> a".parse::<FreeEndomorphism>().is_err());
    }

    #[test]
    fn action_examples() {
        let phi = anosov().phi().clone();
        let x = w("a b a^-1");
        assert_eq!(twisted_conjugate_action(&GroupWord::identity(), &x, &phi), x);
        assert_eq!(twisted_conjugate_action(&x.inverse(), &x, &phi), phi.apply(&x));
        let id = FreeEndomorphism::identity(2);
        let g = w("b a");
        assert_eq!(twisted_conjugate_action(&g, &x, &id), g.mul(&x).mul(&g.inverse()));
    }

    #[test]
    fn bounded_search_examples() {
        let phi = anosov().phi().clone();
        let x = w("a b^-1 a");
        let y = phi.apply(&x);
        let found = are_twisted_conjugate_bounded(&x, &y, &phi, x.len()).unwrap();
        let g = found.witness().expect("x ~ φ(x)");
        assert!(g.len() <= x.len());
        assert_eq!(twisted_conjugate_action(g, &x, &phi), y);
        assert_eq!(
            are_twisted_conjugate_bounded(&x, &x, &phi, 0).unwrap(),
            TwistedSearch::Yes(GroupWord::identity())
        );
        let id = FreeEndomorphism::identity(2);
        assert_eq!(are_twisted_conjugate_bounded(&w("a"), &w("b"), &id, 3).unwrap(), TwistedSearch::Unknown);
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(ball_size(1, 3), 7);
        assert_eq!(ball_size(2, 2), 1 + 4 + 12);
        assert_eq!(word_ball(2, 2).unwrap().len(), 17);
        assert!(word_ball(3, 12).is_err());
    }

    #[test]
    fn abelian_examples() {
        let m = |v: i64| IntMatrix::from_rows(&[vec![v]]).unwrap();
        assert_eq!(reidemeister_number_abelian(&m(2)), Reidemeister::Finite(1.into()));
        assert_eq!(reidemeister_number_abelian(&m(-1)), Reidemeister::Finite(2.into()));
        assert_eq!(reidemeister_number_abelian(&IntMatrix::identity(2)), Reidemeister::Infinite);
        // direct orbit enumeration on residues
        assert_eq!(abelian_class_count_enumerated(&m(2), 6).unwrap(), 1);
        assert_eq!(abelian_class_count_enumerated(&m(-1), 6).unwrap(), 2);
        // identity: every residue its own class, grows with the modulus
        assert_eq!(abelian_class_count_enumerated(&IntMatrix::identity(1), 6).unwrap(), 6);
    }

    #[test]
    fn torus_multiplication() {
        let t = anosov();
        let g = w("a b^-1");
        let h = w("b");
        let e = |w: &GroupWord, t: i64| MappingTorusElement::new(w.clone(), t);
        assert_eq!(t.mul(&e(&g, 0), &e(&h, 0)).unwrap(), e(&g.mul(&h), 0));
        assert_eq!(
            t.mul(&MappingTorusElement::stable_letter(), &e(&g, 0)).unwrap(),
            e(&t.phi().apply(&g), 1)
        );
        let u = e(&w("a b a"), -2);
        assert_eq!(t.mul(&u, &t.inverse(&u).unwrap()).unwrap(), MappingTorusElement::identity());
        assert_eq!(t.mul(&t.inverse(&u).unwrap(), &u).unwrap(), MappingTorusElement::identity());

        let plain = MappingTorus::new(t.phi().clone());
        assert!(matches!(plain.mul(&e(&g, -1), &e(&h, 0)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn bad_inverse_rejected() {
        let phi: FreeEndomorphism = "a -> a b, b -> a".parse().unwrap();
        assert!(MappingTorus::with_inverse(phi.clone(), phi).is_err());
    }

    #[test]
    fn torus_crosscheck_examples() {
        let t = anosov();
        let x = w("a b^-1");
        let rep = torus_crosscheck(&x, &t.phi().apply(&x), &t, 3).unwrap();
        assert!(rep.twisted.witness().is_some());
        assert_eq!(rep.twisted_witness_valid, Some(true));
        assert!(rep.torus.is_some());
        assert!(rep.agrees());

        let same = torus_crosscheck(&x, &x, &t, 2).unwrap();
        assert_eq!(same.twisted, TwistedSearch::Yes(GroupWord::identity()));
        assert!(same.agrees());
    }

    #[test]
    fn torus_witness_conversion_handles_stable_powers() {
        let t = anosov();
        let x = w("a b^-1 a");
        for s in -3i64..=3 {
            let g = MappingTorusElement::new(w("b a"), s);
            let xz = MappingTorusElement::new(x.clone(), 1);
            let conj = t.mul(&t.mul(&g, &xz).unwrap(), &t.inverse(&g).unwrap()).unwrap();
            assert_eq!(conj.t, 1);
            let gamma = twisted_witness_from_torus(&g, &x, &t).unwrap();
            assert_eq!(twisted_conjugate_action(&gamma, &x, t.phi()), conj.w, "s = {s}");
        }
    }

    #[test]
    fn class_counts_rank_one() {
        let id = FreeEndomorphism::identity(1);
        let rep = class_count_lower_bound(&id, 3, 2).unwrap();
        assert_eq!(rep.rows[3].cells, 7);
        assert_eq!(rep.norm, NORM_LABEL);

        let square: FreeEndomorphism = "a -> a^2".parse().unwrap();
        let rep = class_count_lower_bound(&square, 4, 0).unwrap();
        assert_eq!(rep.rows[4].cells, 9);
        let rep = class_count_lower_bound(&square, 4, 2).unwrap();
        assert_eq!(rep.rows[4].cells, 1);
        assert_eq!(rep.rows[4].unknown_fraction, 0.0);
    }

    #[test]
    fn union_find_basics() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(0, 1));
        assert!(!uf.union(1, 0));
        uf.union(3, 4);
        assert_eq!(uf.cells(), 3);
        let mut sizes = uf.cell_sizes();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 2]);
    }
}
