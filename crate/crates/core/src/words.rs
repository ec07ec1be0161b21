//! Sturmian words, continued fractions and subword frequencies.
//!
//! A Sturmian word with rotation number `α ∈ (0,1)` (irrational) and offset
//! `θ ∈ [0,1)` assigns to every integer `n` the letter
//!
//! ```text
//! ω(n) = 1  iff  {nα + θ} ∈ [1−α, 1),      ω(n) = 0 otherwise,
//! ```
//!
//! where `{·}` is the fractional part and the left endpoint of the coding
//! interval is included.  Letter `1` appears with frequency `α`, letter `0`
//! with frequency `1−α`, and more generally every finite pattern `W` occurs
//! with frequency equal to the circle measure of the set of offsets whose
//! orbit spells `W` — computed here by intersecting rotated arcs.
//!
//! Two evaluation modes are supported.  The *float* mode evaluates `{nα+θ}`
//! directly and is adequate for `|n|` well below `1/ε` of the scalar type.
//! The *rational-convergent* mode replaces `α` by a continued-fraction
//! convergent `p/q` and `θ` by the nearest `t/q`, after which letters are
//! exact integer comparisons `(np + t) mod q ≥ q − p`; the resulting word is
//! periodic with period `q` and agrees with the float word on a range that
//! grows with the convergent depth.

use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};
use serde::Serialize;

/// How letters of the word are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PrecisionMode {
    /// Evaluate `{nα + θ}` in floating point.
    Float,
    /// Replace `α` by its continued-fraction convergent of the given depth
    /// and evaluate letters in exact integer arithmetic.
    RationalConvergent { depth: usize },
}

/// Continued-fraction convergent `p/q` of `α` together with the rationalized
/// offset `t/q`; all letter evaluations reduce to integers mod `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
struct Convergent {
    p: i128,
    q: i128,
    t: i128,
}

/// Rotation number, offset and evaluation mode of a Sturmian word.
#[derive(Debug, Clone, Serialize)]
pub struct SturmianParameters<S> {
    alpha: S,
    theta: S,
    mode: PrecisionMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    convergent: Option<Convergent>,
}

impl<S: Scalar> SturmianParameters<S> {
    /// Parameters in float mode.  Requires `α ∈ (0,1)` and `θ ∈ [0,1)`,
    /// both finite.
    pub fn new(alpha: S, theta: S) -> Result<Self> {
        Self::with_mode(alpha, theta, PrecisionMode::Float)
    }

    /// Parameters with an explicit evaluation mode.
    ///
    /// In rational-convergent mode the convergent `p/q` is computed up front;
    /// depths whose convergent has `q < 2` (too crude to code any word) or
    /// overflows 128-bit arithmetic are rejected.
    pub fn with_mode(alpha: S, theta: S, mode: PrecisionMode) -> Result<Self> {
        if !alpha.is_finite() || alpha <= S::zero() || alpha >= S::one() {
            return Err(Error::input(format!(
                "rotation number must lie strictly inside (0,1), got {alpha}"
            )));
        }
        if !theta.is_finite() || theta < S::zero() || theta >= S::one() {
            return Err(Error::input(format!(
                "offset must lie in [0,1), got {theta}"
            )));
        }
        let convergent = match mode {
            PrecisionMode::Float => None,
            PrecisionMode::RationalConvergent { depth } => {
                Some(convergent_of(alpha, theta, depth)?)
            }
        };
        Ok(SturmianParameters {
            alpha,
            theta,
            mode,
            convergent,
        })
    }

    pub fn alpha(&self) -> S {
        self.alpha
    }

    pub fn theta(&self) -> S {
        self.theta
    }

    pub fn mode(&self) -> PrecisionMode {
        self.mode
    }

    /// Letter of the word at position `n`.
    pub fn sturmian_letter(&self, n: i64) -> u8 {
        match self.convergent {
            None => {
                let x = fract_unit(cast_i64::<S>(n) * self.alpha + self.theta);
                u8::from(x >= S::one() - self.alpha)
            }
            Some(Convergent { p, q, t }) => {
                let r = (i128::from(n) * p + t).rem_euclid(q);
                u8::from(r >= q - p)
            }
        }
    }

    /// Word over the inclusive index range `[n0, n1]`.
    pub fn generate_word(&self, n0: i64, n1: i64) -> Result<Word> {
        if n0 > n1 {
            return Err(Error::input(format!(
                "empty index range: n0 = {n0} exceeds n1 = {n1}"
            )));
        }
        let len = (n1 - n0 + 1) as u64;
        if len > 100_000_000 {
            return Err(Error::input(format!(
                "requested word of {len} letters exceeds the 1e8 cap"
            )));
        }
        let letters = (n0..=n1).map(|n| self.sturmian_letter(n)).collect();
        Ok(Word {
            letters,
            origin: n0,
        })
    }

    /// Asymptotic frequency of each letter: `0 ↦ 1−α`, `1 ↦ α`.
    pub fn letter_frequencies(&self) -> [(u8, S); 2] {
        [(0, S::one() - self.alpha), (1, self.alpha)]
    }
}

/// Finite block of letters together with the index of its first letter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Word {
    letters: Vec<u8>,
    origin: i64,
}

impl Word {
    /// Word from an explicit letter list (letters must be drawn from a
    /// two-letter alphabet `{0,1}`; larger alphabets are built through model
    /// configuration, not through Sturmian words).
    pub fn from_letters(letters: Vec<u8>, origin: i64) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::input("word must contain at least one letter"));
        }
        if let Some(&bad) = letters.iter().find(|&&a| a > 1) {
            return Err(Error::input(format!(
                "letter {bad} outside the two-letter alphabet {{0,1}}"
            )));
        }
        Ok(Word { letters, origin })
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of occurrences of a single letter.
    pub fn letter_count(&self, letter: u8) -> usize {
        self.letters.iter().filter(|&&a| a == letter).count()
    }

    /// Fraction of windows equal to `pattern`, with denominator
    /// `|word| − |pattern| + 1` (number of placements).
    pub fn empirical_frequency<S: Scalar>(&self, pattern: &Word) -> Result<S> {
        if pattern.len() > self.len() {
            return Err(Error::input(format!(
                "pattern of {} letters longer than word of {} letters",
                pattern.len(),
                self.len()
            )));
        }
        let hits = self
            .letters
            .windows(pattern.len())
            .filter(|w| *w == pattern.letters())
            .count();
        let placements = self.len() - pattern.len() + 1;
        Ok(cast::<S>(hits as f64) / cast::<S>(placements as f64))
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &a in &self.letters {
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Leading continued-fraction digits of `α = [0; c₁, c₂, …]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContinuedFraction {
    digits: Vec<u64>,
}

impl ContinuedFraction {
    pub fn digits(&self) -> &[u64] {
        &self.digits
    }
}

/// Pattern together with its asymptotic frequency.
#[derive(Debug, Clone, Serialize)]
pub struct PatternFrequency<S> {
    pub pattern: Word,
    pub frequency: S,
}

/// First `depth` continued-fraction digits of `α ∈ (0,1)`.
///
/// Expansion stops early — returning fewer digits — when the remainder drops
/// below `1e−12`, which signals an effectively rational `α`; callers that
/// require irrationality treat a short digit list as a rejection.
pub fn continued_fraction_digits<S: Scalar>(alpha: S, depth: usize) -> Result<ContinuedFraction> {
    if !alpha.is_finite() || alpha <= S::zero() || alpha >= S::one() {
        return Err(Error::input(format!(
            "continued fraction requires α strictly inside (0,1), got {alpha}"
        )));
    }
    if depth == 0 {
        return Err(Error::input("continued-fraction depth must be at least 1"));
    }
    let cutoff = cast::<S>(1e-12);
    let mut digits = Vec::with_capacity(depth);
    let mut x = alpha;
    for _ in 0..depth {
        if x < cutoff {
            break;
        }
        let inv = x.recip();
        let digit = inv.floor();
        digits.push(digit.to_u64().unwrap_or(u64::MAX));
        x = inv - digit;
    }
    Ok(ContinuedFraction { digits })
}

/// Errors unless `α` survives a 40-digit continued-fraction probe, i.e. is
/// not within `1e−12` of a rational with small denominator.
pub(crate) fn require_irrational<S: Scalar>(alpha: S, context: &str) -> Result<ContinuedFraction> {
    const PROBE_DEPTH: usize = 40;
    let cf = continued_fraction_digits(alpha, PROBE_DEPTH)?;
    if cf.digits().len() < PROBE_DEPTH {
        return Err(Error::input(format!(
            "{context} requires an irrational rotation number, but α = {alpha} is rational to \
             within 1e-12 (continued fraction terminates after {} digits)",
            cf.digits().len()
        )));
    }
    Ok(cf)
}

/// Asymptotic frequency of an arbitrary pattern, via circle-arc measure.
///
/// The pattern `W = w₀…w_{r−1}` occurs at position `n` iff the rotation
/// orbit point `{nα + θ}` lies in `⋂ᵢ (A_{wᵢ} − iα)`, where `A₁ = [1−α, 1)`
/// and `A₀ = [0, 1−α)`; the frequency is the Lebesgue measure of that
/// intersection and does not depend on `θ`.
pub fn sturmian_pattern_frequency<S: Scalar>(alpha: S, pattern: &Word) -> Result<PatternFrequency<S>> {
    if !alpha.is_finite() || alpha <= S::zero() || alpha >= S::one() {
        return Err(Error::input(format!(
            "pattern frequency requires α strictly inside (0,1), got {alpha}"
        )));
    }
    let mut set = ArcSet::full_circle();
    let split = S::one() - alpha;
    for (i, &letter) in pattern.letters().iter().enumerate() {
        let arc = if letter == 1 {
            ArcSet::arc(split, alpha)
        } else {
            ArcSet::arc(S::zero(), split)
        };
        let shift = fract_unit(-cast_i64::<S>(i as i64) * alpha);
        set = set.intersect(&arc.rotate(shift));
    }
    Ok(PatternFrequency {
        pattern: pattern.clone(),
        frequency: set.measure(),
    })
}

/// The two separation patterns between consecutive `1`s.
///
/// With `c₁ = ⌊1/α⌋`, consecutive `1`s in a Sturmian word are separated by
/// either `c₁` or `c₁−1` zeros, and no other separation occurs.  Returns
/// `[1 0^{c₁} 1, 1 0^{c₁−1} 1]` with their frequencies `1 − c₁α` and
/// `(c₁+1)α − 1`, which sum to `α` minus the frequency of the trailing `1`
/// pattern being cut off, i.e. exactly to `α` in the limit.
pub fn adjacent_one_separations<S: Scalar>(alpha: S) -> Result<[PatternFrequency<S>; 2]> {
    let cf = require_irrational(alpha, "separation-pattern analysis")?;
    let c1 = cf.digits()[0];
    let c1s = cast::<S>(c1 as f64);
    let long = separation_pattern(c1 as usize);
    let short = separation_pattern(c1 as usize - 1);
    Ok([
        PatternFrequency {
            pattern: long,
            frequency: S::one() - c1s * alpha,
        },
        PatternFrequency {
            pattern: short,
            frequency: (c1s + S::one()) * alpha - S::one(),
        },
    ])
}

fn separation_pattern(zeros: usize) -> Word {
    let mut letters = Vec::with_capacity(zeros + 2);
    letters.push(1);
    letters.extend(std::iter::repeat(0).take(zeros));
    letters.push(1);
    Word { letters, origin: 0 }
}

/// Fractional part mapped into `[0, 1)`.
fn fract_unit<S: Scalar>(x: S) -> S {
    let f = x - x.floor();
    if f >= S::one() {
        S::zero()
    } else {
        f
    }
}

fn cast_i64<S: Scalar>(n: i64) -> S {
    S::from_i64(n).expect("i64 representable in Scalar")
}

/// Convergent `p/q` of depth `depth` with the offset rationalized to `t/q`.
fn convergent_of<S: Scalar>(alpha: S, theta: S, depth: usize) -> Result<Convergent> {
    if depth == 0 {
        return Err(Error::input(
            "rational-convergent mode requires depth of at least 1",
        ));
    }
    let cf = continued_fraction_digits(alpha, depth)?;
    // p/q recurrence for [0; c₁, c₂, …]: start from 0/1 and 1/0.
    let (mut p_prev, mut q_prev) = (1i128, 0i128);
    let (mut p, mut q) = (0i128, 1i128);
    for &c in cf.digits() {
        let c = i128::from(c);
        let p_next = c
            .checked_mul(p)
            .and_then(|v| v.checked_add(p_prev))
            .ok_or_else(|| Error::input("continued-fraction convergent overflows 128 bits"))?;
        let q_next = c
            .checked_mul(q)
            .and_then(|v| v.checked_add(q_prev))
            .ok_or_else(|| Error::input("continued-fraction convergent overflows 128 bits"))?;
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
        if q > 1i128 << 100 {
            return Err(Error::input(
                "convergent denominator exceeds the exact-arithmetic range",
            ));
        }
    }
    if q < 2 {
        return Err(Error::input(format!(
            "convergent of depth {depth} has denominator {q} < 2; increase the depth"
        )));
    }
    let t = (theta * cast::<S>(q as f64))
        .round()
        .to_i128()
        .unwrap_or(0)
        .rem_euclid(q);
    Ok(Convergent { p, q, t })
}

/// Disjoint, sorted, half-open arcs `[a, b) ⊂ [0, 1)` representing a subset
/// of the unit circle.  Arcs shorter than a few ε of the scalar type are
/// dropped; they are rounding slivers, not geometry.
#[derive(Debug, Clone)]
struct ArcSet<S> {
    arcs: Vec<(S, S)>,
}

impl<S: Scalar> ArcSet<S> {
    fn sliver<Sc: Scalar>() -> Sc {
        Sc::epsilon() * cast::<Sc>(1e4)
    }

    fn full_circle() -> Self {
        ArcSet {
            arcs: vec![(S::zero(), S::one())],
        }
    }

    /// Arc of the given length starting at `start ∈ [0,1)`, wrapped mod 1.
    fn arc(start: S, length: S) -> Self {
        let mut arcs = Vec::with_capacity(2);
        let end = start + length;
        if end <= S::one() {
            arcs.push((start, end));
        } else {
            arcs.push((start, S::one()));
            arcs.push((S::zero(), end - S::one()));
        }
        arcs.retain(|&(a, b)| b - a > Self::sliver::<S>());
        arcs.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite endpoints"));
        ArcSet { arcs }
    }

    /// The set rotated by `shift ∈ [0,1)`.
    fn rotate(&self, shift: S) -> Self {
        let mut arcs = Vec::with_capacity(self.arcs.len() + 1);
        for &(a, b) in &self.arcs {
            let start = fract_unit(a + shift);
            let length = b - a;
            if start + length <= S::one() {
                arcs.push((start, start + length));
            } else {
                arcs.push((start, S::one()));
                arcs.push((S::zero(), start + length - S::one()));
            }
        }
        arcs.retain(|&(a, b)| b - a > Self::sliver::<S>());
        arcs.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite endpoints"));
        ArcSet { arcs }
    }

    /// Intersection by a two-pointer sweep over the sorted arc lists.
    fn intersect(&self, other: &Self) -> Self {
        let mut arcs = Vec::new();
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.arcs.len() && j < other.arcs.len() {
            let (a1, b1) = self.arcs[i];
            let (a2, b2) = other.arcs[j];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if hi - lo > Self::sliver::<S>() {
                arcs.push((lo, hi));
            }
            if b1 <= b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        ArcSet { arcs }
    }

    fn measure(&self) -> S {
        self.arcs
            .iter()
            .fold(S::zero(), |acc, &(a, b)| acc + (b - a))
    }
}
