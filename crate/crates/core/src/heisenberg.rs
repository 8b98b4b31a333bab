//! The discrete Heisenberg group `H3(Z)` as integer triples.
//!
//! `(x, y, z)` stands for the matrix `[[1, x, z], [0, 1, y], [0, 0, 1]]`, so
//! `(x, y, z) (x', y', z') = (x + x', y + y', z + z' + x y')`. The generators
//! are `a = (1, 0, 0)`, `b = (0, 1, 0)` and the central `c = (0, 0, 1) = [a, b]`.
//!
//! Central powers `c^k` have word length of order `sqrt|k|`. This module
//! builds explicit short words for them and measures exact lengths by
//! breadth-first search over the Cayley graph.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

/// Default constant `K` in `l(w) <= K sqrt|k|`.
pub const DEFAULT_WORD_CONSTANT: f64 = 21.0;

/// Default BFS radius.
pub const DEFAULT_RADIUS: u32 = 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeisenbergError {
    #[error("word constant {given} is below the threshold 12 + 6 sqrt(2) = {threshold}")]
    KTooSmall { given: f64, threshold: f64 },
    #[error("ball exploration reached {states} states, over the budget of {budget}")]
    BudgetExceeded { states: usize, budget: usize },
    #[error("word for k = {k} has length {length} > {constant} sqrt|k|")]
    BoundViolated { k: i64, length: usize, constant: f64 },
    #[error("profile row k = {k} breaks the length chain: {detail}")]
    ProfileInvariant { k: i64, detail: String },
    #[error("invalid letter {0:?}; expected one of a, A, b, B, c, C")]
    InvalidLetter(char),
}

pub type Result<T, E = HeisenbergError> = std::result::Result<T, E>;

/// A group element with arbitrary-precision coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeisenbergElement {
    pub x: BigInt,
    pub y: BigInt,
    pub z: BigInt,
}

impl HeisenbergElement {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>, z: impl Into<BigInt>) -> Self {
        HeisenbergElement {
            x: x.into(),
            y: y.into(),
            z: z.into(),
        }
    }

    pub fn identity() -> Self {
        Self::new(0, 0, 0)
    }

    pub fn a() -> Self {
        Self::new(1, 0, 0)
    }

    pub fn b() -> Self {
        Self::new(0, 1, 0)
    }

    pub fn c() -> Self {
        Self::new(0, 0, 1)
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn multiply(&self, other: &Self) -> Self {
        HeisenbergElement {
            x: &self.x + &other.x,
            y: &self.y + &other.y,
            z: &self.z + &other.z + &self.x * &other.y,
        }
    }

    /// `(-x, -y, x y - z)`.
    pub fn inverse(&self) -> Self {
        HeisenbergElement {
            x: -&self.x,
            y: -&self.y,
            z: &self.x * &self.y - &self.z,
        }
    }

    /// `g h g^-1 h^-1`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.multiply(other)
            .multiply(&self.inverse())
            .multiply(&other.inverse())
    }

    /// Right multiplication by `letter^exp`, in closed form.
    fn push_run(&mut self, letter: Generator, exp: &BigInt) {
        match letter {
            Generator::A => self.x += exp,
            Generator::B => {
                self.z += &self.x * exp;
                self.y += exp;
            }
            Generator::C => self.z += exp,
        }
    }

    /// Small-integer coordinates, when they fit.
    pub fn to_i64(&self) -> Option<[i64; 3]> {
        Some([
            i64::try_from(&self.x).ok()?,
            i64::try_from(&self.y).ok()?,
            i64::try_from(&self.z).ok()?,
        ])
    }
}

impl Mul for &HeisenbergElement {
    type Output = HeisenbergElement;

    fn mul(self, rhs: &HeisenbergElement) -> HeisenbergElement {
        self.multiply(rhs)
    }
}

impl fmt::Display for HeisenbergElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Generator {
    A,
    B,
    C,
}

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
    C,
    CInv,
}

impl Letter {
    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
            Letter::C => Letter::CInv,
            Letter::CInv => Letter::C,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
            Letter::C => 'c',
            Letter::CInv => 'C',
        }
    }

    pub fn from_char(ch: char) -> Result<Letter> {
        Ok(match ch {
            'a' => Letter::A,
            'A' => Letter::AInv,
            'b' => Letter::B,
            'B' => Letter::BInv,
            'c' => Letter::C,
            'C' => Letter::CInv,
            other => return Err(HeisenbergError::InvalidLetter(other)),
        })
    }

    fn split(self) -> (Generator, i64) {
        match self {
            Letter::A => (Generator::A, 1),
            Letter::AInv => (Generator::A, -1),
            Letter::B => (Generator::B, 1),
            Letter::BInv => (Generator::B, -1),
            Letter::C => (Generator::C, 1),
            Letter::CInv => (Generator::C, -1),
        }
    }

    fn power(generator_positive: Letter, exp: i64) -> (Letter, u64) {
        if exp >= 0 {
            (generator_positive, exp as u64)
        } else {
            (generator_positive.inverse(), exp.unsigned_abs())
        }
    }
}

/// A word over `{a, a^-1, b, b^-1, c, c^-1}`, written `a A b B c C`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new() -> Self {
        Word::default()
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Appends `letter^exp` (the inverse letter for negative `exp`).
    pub fn push_power(&mut self, letter: Letter, exp: i64) {
        let (letter, count) = Letter::power(letter, exp);
        self.letters.extend(std::iter::repeat_n(letter, count as usize));
    }

    pub fn extend(&mut self, other: &Word) {
        self.letters.extend_from_slice(&other.letters);
    }

    /// Formal inverse: letters reversed and inverted.
    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// True when only `a` and `b` letters (with inverses) occur.
    pub fn is_ab_word(&self) -> bool {
        self.letters.iter().all(|l| !matches!(l, Letter::C | Letter::CInv))
    }

    /// The ordered product of the letters. Runs of one generator are applied
    /// in closed form.
    pub fn evaluate(&self) -> HeisenbergElement {
        let mut g = HeisenbergElement::identity();
        let mut iter = self.letters.iter().map(|l| l.split()).peekable();
        while let Some((generator, step)) = iter.next() {
            let mut exp = step;
            while let Some(&(next, s)) = iter.peek() {
                if next != generator {
                    break;
                }
                exp += s;
                iter.next();
            }
            if exp != 0 {
                g.push_run(generator, &BigInt::from(exp));
            }
        }
        g
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.letters.iter().try_for_each(|l| write!(f, "{}", l.to_char()))
    }
}

impl FromStr for Word {
    type Err = HeisenbergError;

    fn from_str(s: &str) -> Result<Word> {
        s.chars()
            .map(Letter::from_char)
            .collect::<Result<Vec<_>>>()
            .map(Word::from_letters)
    }
}

/// The word `a^u b^v a^-u b^-v`, which evaluates to `c^(u v)`.
pub fn commutator_power(u: i64, v: i64) -> Word {
    let mut w = Word::new();
    w.push_power(Letter::A, u);
    w.push_power(Letter::B, v);
    w.push_power(Letter::A, -u);
    w.push_power(Letter::B, -v);
    w
}

/// `12 + 6 sqrt(2)`: the supremum of `4(n+1)/(n - sqrt n)` over `n >= 2`.
pub fn word_constant_threshold() -> f64 {
    12.0 + 6.0 * std::f64::consts::SQRT_2
}

/// An `{a, b}`-word for `c^k` of length at most `constant * sqrt|k|`.
///
/// `k = 0..=3` use `[a, b]^k`. For larger `k` with `n = floor(sqrt k)`:
/// `k = n^2` gives `[a^n, b^n]`; `n^2 < k <= n^2 + n` gives
/// `[a^n, b^n] w(k - n^2)`; otherwise `[a^(n+1), b^(n+1)] w(k - (n+1)^2)`.
/// Negative `k` uses the formal inverse of the word for `|k|`.
pub fn claim1_word(k: i64, constant: f64) -> Result<Word> {
    let threshold = word_constant_threshold();
    if constant.is_nan() || constant < threshold {
        return Err(HeisenbergError::KTooSmall {
            given: constant,
            threshold,
        });
    }
    let word = claim1_word_unchecked(k);
    let length = word.len();
    let bound_sq = constant * constant * k.unsigned_abs() as f64;
    if (length as f64) * (length as f64) > bound_sq {
        return Err(HeisenbergError::BoundViolated { k, length, constant });
    }
    Ok(word)
}

/// The recursive construction without the length check.
pub fn claim1_word_unchecked(k: i64) -> Word {
    let mut word = Word::new();
    append_positive(k.unsigned_abs(), &mut word);
    if k < 0 {
        word.inverse()
    } else {
        word
    }
}

fn append_positive(k: u64, out: &mut Word) {
    match k {
        0 => {}
        1..=3 => {
            let base = commutator_power(1, 1);
            for _ in 0..k {
                out.extend(&base);
            }
        }
        _ => {
            let n = k.isqrt();
            let (n, sq) = (n as i64, n * n);
            if k == sq {
                out.extend(&commutator_power(n, n));
            } else if k <= sq + n as u64 {
                out.extend(&commutator_power(n, n));
                append_positive(k - sq, out);
            } else {
                let next = (n + 1) as u64 * (n + 1) as u64;
                out.extend(&commutator_power(n + 1, n + 1));
                // k - (n+1)^2 is negative here.
                let mut rest = Word::new();
                append_positive(next - k, &mut rest);
                out.extend(&rest.inverse());
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantCertificate {
    /// `12 + 6 sqrt(2)`.
    pub value: f64,
    pub scan_start: u64,
    pub scan_end: u64,
    pub scan_max: f64,
    pub argmax: u64,
    /// Every scanned term is strictly below its predecessor.
    pub strictly_decreasing: bool,
}

pub fn constant_term(n: u64) -> f64 {
    let n = n as f64;
    4.0 * (n + 1.0) / (n - n.sqrt())
}

/// Scans `4(n+1)/(n - sqrt n)` for integers `n` in `[2, 10^6]`.
pub fn nagata_constant() -> ConstantCertificate {
    nagata_constant_scan(1_000_000)
}

pub fn nagata_constant_scan(scan_end: u64) -> ConstantCertificate {
    let scan_start = 2;
    let mut previous = constant_term(scan_start);
    let (mut scan_max, mut argmax) = (previous, scan_start);
    let mut strictly_decreasing = true;
    for n in (scan_start + 1)..=scan_end {
        let term = constant_term(n);
        if term >= previous {
            strictly_decreasing = false;
        }
        if term > scan_max {
            scan_max = term;
            argmax = n;
        }
        previous = term;
    }
    ConstantCertificate {
        value: word_constant_threshold(),
        scan_start,
        scan_end,
        scan_max,
        argmax,
        strictly_decreasing,
    }
}

/// Generating sets for the word metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratingSet {
    /// `{a, a^-1, b, b^-1}`.
    Ab,
    /// `{a, a^-1, b, b^-1, c, c^-1}`.
    Abc,
}

impl GeneratingSet {
    /// Right multiplication by each generator in coordinates.
    fn neighbours(self, [x, y, z]: [i64; 3]) -> impl Iterator<Item = [i64; 3]> {
        let base = [[x + 1, y, z], [x - 1, y, z], [x, y + 1, z + x], [x, y - 1, z - x]];
        let central = [[x, y, z + 1], [x, y, z - 1]];
        let extra = match self {
            GeneratingSet::Ab => 0,
            GeneratingSet::Abc => 2,
        };
        base.into_iter().chain(central.into_iter().take(extra))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BfsBudget {
    pub max_states: usize,
}

impl Default for BfsBudget {
    fn default() -> Self {
        BfsBudget { max_states: 50_000_000 }
    }
}

/// Exact word lengths of every element in the ball of a given radius.
#[derive(Clone, Debug)]
pub struct WordLengthTable {
    radius: u32,
    generators: GeneratingSet,
    lengths: FxHashMap<[i64; 3], u32>,
    /// Number of elements at each distance `0..=radius`.
    spheres: Vec<usize>,
}

impl WordLengthTable {
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn generators(&self) -> GeneratingSet {
        self.generators
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn sphere_sizes(&self) -> &[usize] {
        &self.spheres
    }

    pub fn length(&self, coords: [i64; 3]) -> Option<u32> {
        self.lengths.get(&coords).copied()
    }

    pub fn length_of(&self, g: &HeisenbergElement) -> Option<u32> {
        self.length(g.to_i64()?)
    }

    /// `(k, length of c^k)` for every central element of the ball, by `k`.
    pub fn central_lengths(&self) -> Vec<(i64, u32)> {
        let mut rows: Vec<(i64, u32)> = self
            .lengths
            .iter()
            .filter(|(c, _)| c[0] == 0 && c[1] == 0)
            .map(|(c, &l)| (c[2], l))
            .collect();
        rows.sort_unstable();
        rows
    }

    pub fn iter(&self) -> impl Iterator<Item = ([i64; 3], u32)> + '_ {
        self.lengths.iter().map(|(&c, &l)| (c, l))
    }
}

/// Level-by-level exploration from the identity; each element is recorded at
/// the level where it first appears, which is its word length.
pub fn bfs_word_lengths(radius: u32, generators: GeneratingSet, budget: BfsBudget) -> Result<WordLengthTable> {
    let mut lengths: FxHashMap<[i64; 3], u32> = FxHashMap::default();
    lengths.insert([0, 0, 0], 0);
    let mut frontier = vec![[0_i64, 0, 0]];
    let mut spheres = vec![1];
    for level in 1..=radius {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for &g in &frontier {
            for h in generators.neighbours(g) {
                if let std::collections::hash_map::Entry::Vacant(slot) = lengths.entry(h) {
                    slot.insert(level);
                    next.push(h);
                }
            }
        }
        if lengths.len() > budget.max_states {
            return Err(HeisenbergError::BudgetExceeded {
                states: lengths.len(),
                budget: budget.max_states,
            });
        }
        spheres.push(next.len());
        frontier = next;
    }
    Ok(WordLengthTable {
        radius,
        generators,
        lengths,
        spheres,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileRow {
    pub k: i64,
    pub exact_length: u32,
    pub claim1_length: usize,
    /// `2 sqrt|k|`.
    pub lower_bound: f64,
}

impl ProfileRow {
    /// `exact_length / sqrt|k|`, zero at `k = 0`.
    pub fn ratio(&self) -> f64 {
        if self.k == 0 {
            0.0
        } else {
            self.exact_length as f64 / (self.k.unsigned_abs() as f64).sqrt()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceProfile {
    pub radius: u32,
    pub generators: GeneratingSet,
    pub rows: Vec<ProfileRow>,
}

/// Smallest integer `m` with `m >= 2 sqrt|k|`, i.e. `m^2 >= 4|k|`.
pub fn ceil_two_sqrt(k: i64) -> u64 {
    let target = 4 * k.unsigned_abs() as u128;
    let mut m = (target as f64).sqrt() as u128;
    while m * m < target {
        m += 1;
    }
    while m > 0 && (m - 1) * (m - 1) >= target {
        m -= 1;
    }
    m as u64
}

/// Central word lengths in the ball of radius `radius`, next to the explicit
/// word length and the `2 sqrt|k|` lower bound. Checks
/// `ceil(2 sqrt|k|) <= l(c^k) <= l(claim1_word(k)) <= 21 sqrt|k|` for the
/// `{a, b}` generators (the lower bound is skipped for `{a, b, c}`).
pub fn central_distance_profile(radius: u32, generators: GeneratingSet, budget: BfsBudget) -> Result<DistanceProfile> {
    let table = bfs_word_lengths(radius, generators, budget)?;
    profile_from_table(&table)
}

pub fn profile_from_table(table: &WordLengthTable) -> Result<DistanceProfile> {
    let mut rows = Vec::new();
    for (k, exact) in table.central_lengths() {
        let word = claim1_word(k, DEFAULT_WORD_CONSTANT)?;
        let claim1_length = word.len();
        let abs = k.unsigned_abs();
        if table.generators() == GeneratingSet::Ab && (exact as u64) < ceil_two_sqrt(k) {
            return Err(HeisenbergError::ProfileInvariant {
                k,
                detail: format!("exact length {exact} below 2 sqrt|k|"),
            });
        }
        if exact as usize > claim1_length {
            return Err(HeisenbergError::ProfileInvariant {
                k,
                detail: format!("exact length {exact} above explicit word length {claim1_length}"),
            });
        }
        // 21 sqrt|k| compared via squares: l^2 <= 441 |k|.
        if (claim1_length as u128).pow(2) > 441 * abs as u128 {
            return Err(HeisenbergError::ProfileInvariant {
                k,
                detail: format!("explicit word length {claim1_length} above 21 sqrt|k|"),
            });
        }
        rows.push(ProfileRow {
            k,
            exact_length: exact,
            claim1_length,
            lower_bound: 2.0 * (abs as f64).sqrt(),
        });
    }
    Ok(DistanceProfile {
        radius: table.radius(),
        generators: table.generators(),
        rows,
    })
}

impl Mul for HeisenbergElement {
    type Output = HeisenbergElement;

    fn mul(self, rhs: HeisenbergElement) -> HeisenbergElement {
        self.multiply(&rhs)
    }
}
