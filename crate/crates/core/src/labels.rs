//! Integrated density of states, gap detection, and gap labelling.
//!
//! The integrated density of states (IDS) of a decorated chain is the limit
//! of normalized eigenvalue counting functions of finite truncations —
//! normalized by total metric length on the metric side and by vertex count
//! on the discrete side.  On every spectral gap the IDS is constant, and for
//! Sturmian-driven chains that constant lies in the countable lattice
//! `(αℤ + ℤ)/L̄` spanned by the rotation number `α` and the mean cell length
//! `L̄` — the *gap label*.  This module computes IDS curves from truncated
//! spectra, detects gaps robustly against truncation-boundary artifacts,
//! matches plateau values to lattice points, and predicts and measures the
//! IDS jump discontinuities produced by compactly supported eigenfunctions
//! of pendant ("tooth") decorations.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{build_metric_truncation, BoundaryCondition, ModelSpec};
use crate::metric_solver::{spectrum_of_truncation, SolveOptions, Spectrum};
use crate::scalar::{cast, cast_usize, EigenScalar, Scalar};
use crate::words::{require_irrational, SturmianParameters, Word};

/// Relative tolerance for recognizing `ℓ/L` as the rational demanded by a
/// jump-witness equation.
const RATIONAL_TOL: f64 = 1e-12;
/// Relative spacing in `k = √λ` under which two predicted jump energies are
/// treated as one coincident discontinuity.
const ENERGY_MERGE: f64 = 1e-9;
/// Relative width (in `k`) of the window in which eigenvalues count towards
/// the kernel dimension at a jump energy.
const KERNEL_K_TOL: f64 = 1e-7;
/// Proximity (in `k`) to a declared jump energy below which the
/// discrete↔metric counting relation refuses to evaluate.
const JUMP_PROX: f64 = 1e-6;
/// Relative spacing under which two stable eigenvalues are collapsed before
/// gap-interval analysis.
const DEDUP_TOL: f64 = 1e-12;
/// Number of level spacings inspected on each side when estimating the
/// local spacing scale.
const LOCAL_SPAN: usize = 8;
/// Multiple of the local spacing within which an eigenvalue must find a
/// partner under the toggled cut condition to count as a bulk state.
const MATCH_FACTOR: f64 = 3.0;
/// Default gap threshold, as a multiple of the local level spacing.
const GAP_FACTOR: f64 = 4.0;

/// Normalized eigenvalue counting function of one finite truncation: the
/// right-continuous step function `E ↦ #{λ ≤ E} / normalization`.
///
/// `breakpoints` are the distinct eigenvalues in increasing order and
/// `values` the normalized cumulative counts, so `values[i]` is the value on
/// `[breakpoints[i], breakpoints[i+1])`; left of every breakpoint the curve
/// is zero.  `size` records the truncation size (number of unit cells or
/// word letters) the curve came from.
#[derive(Debug, Clone, Serialize)]
pub struct IDSCurve<S> {
    breakpoints: Vec<S>,
    values: Vec<S>,
    normalization: S,
    size: usize,
}

impl<S: Scalar> IDSCurve<S> {
    /// Wraps precomputed breakpoints and values, validating monotonicity.
    pub fn new(
        breakpoints: Vec<S>,
        values: Vec<S>,
        normalization: S,
        size: usize,
    ) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::input("IDS curve needs at least one breakpoint"));
        }
        if breakpoints.len() != values.len() {
            return Err(Error::input(format!(
                "IDS curve needs one value per breakpoint, got {} breakpoints and {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if !normalization.is_finite() || normalization <= S::zero() {
            return Err(Error::input(format!(
                "IDS normalization must be positive and finite, got {normalization}"
            )));
        }
        for w in breakpoints.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::input(format!(
                    "IDS breakpoints must increase strictly, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let mut prev = S::zero();
        for &v in &values {
            if !v.is_finite() || v < prev {
                return Err(Error::input(format!(
                    "IDS values must be finite and non-decreasing, got {v} after {prev}"
                )));
            }
            prev = v;
        }
        if values[0] <= S::zero() {
            return Err(Error::input(
                "IDS value must be positive at the first breakpoint",
            ));
        }
        Ok(IDSCurve {
            breakpoints,
            values,
            normalization,
            size,
        })
    }

    /// Curve of a truncated spectrum under the given normalization.
    pub fn from_spectrum(spectrum: &Spectrum<S>, normalization: S, size: usize) -> Result<Self> {
        Self::from_multiplicities(spectrum.eigenvalues(), normalization, size)
    }

    /// Curve from `(eigenvalue, multiplicity)` pairs in increasing order.
    pub fn from_multiplicities(
        points: &[(S, usize)],
        normalization: S,
        size: usize,
    ) -> Result<Self> {
        let mut breakpoints = Vec::with_capacity(points.len());
        let mut values = Vec::with_capacity(points.len());
        let mut cumulative = 0usize;
        for &(lambda, mult) in points {
            if mult == 0 {
                return Err(Error::input("eigenvalue multiplicities must be positive"));
            }
            cumulative += mult;
            breakpoints.push(lambda);
            values.push(cast_usize::<S>(cumulative) / normalization);
        }
        Self::new(breakpoints, values, normalization, size)
    }

    pub fn breakpoints(&self) -> &[S] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn normalization(&self) -> S {
        self.normalization
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Right-continuous evaluation: `#{λ ≤ energy} / normalization`.
    pub fn eval(&self, energy: S) -> S {
        let idx = self.breakpoints.partition_point(|&b| b <= energy);
        if idx == 0 {
            S::zero()
        } else {
            self.values[idx - 1]
        }
    }

    /// Left limit at `energy`: `#{λ < energy} / normalization`.
    pub fn eval_left(&self, energy: S) -> S {
        let idx = self.breakpoints.partition_point(|&b| b < energy);
        if idx == 0 {
            S::zero()
        } else {
            self.values[idx - 1]
        }
    }

    /// Largest pointwise distance to `other` over `[lo, hi]`, probing both
    /// one-sided limits at every breakpoint of either curve.
    ///
    /// Breakpoints of the two curves closer together than a relative
    /// `1e−9` are treated as one location: the curves are compared just
    /// left of the cluster and just right of it, never inside.  A large
    /// shared jump (an atom of the underlying spectral measure, such as a
    /// flat band) otherwise registers its full height whenever eigensolver
    /// round-off puts the two copies an ulp apart.
    pub fn sup_distance(&self, other: &Self, lo: S, hi: S) -> Result<S> {
        if !(lo < hi) {
            return Err(Error::input(format!(
                "sup-distance window needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        let scale = S::one() + num_traits::Float::abs(lo).max(num_traits::Float::abs(hi));
        let merge = cast::<S>(ENERGY_MERGE) * scale;
        let mut points: Vec<S> = Vec::new();
        for curve in [self, other] {
            for &b in &curve.breakpoints {
                if b > lo && b <= hi {
                    points.push(b);
                }
            }
        }
        points.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        let mut worst = (self.eval(lo) - other.eval(lo)).abs();
        let mut probe_left = |e: S, worst: &mut S| {
            let d = (self.eval_left(e) - other.eval_left(e)).abs();
            *worst = num_traits::Float::max(*worst, d);
        };
        let mut probe_right = |e: S, worst: &mut S| {
            let d = (self.eval(e) - other.eval(e)).abs();
            *worst = num_traits::Float::max(*worst, d);
        };
        let mut i = 0usize;
        while i < points.len() {
            let mut j = i;
            while j + 1 < points.len() && points[j + 1] - points[j] <= merge {
                j += 1;
            }
            probe_left(points[i], &mut worst);
            probe_right(points[j], &mut worst);
            i = j + 1;
        }
        probe_right(hi, &mut worst);
        Ok(worst)
    }

    /// CSV dump `E,ids` with one row per breakpoint.
    pub fn csv(&self) -> String {
        let mut out = String::from("E,ids\n");
        for (b, v) in self.breakpoints.iter().zip(&self.values) {
            out.push_str(&format!("{b:.12e},{v:.12e}\n"));
        }
        out
    }

    /// Eigenvalues with integer multiplicities recovered from the value
    /// increments.
    fn counts(&self) -> Vec<(S, usize)> {
        let mut out = Vec::with_capacity(self.breakpoints.len());
        let mut prev = S::zero();
        for (&b, &v) in self.breakpoints.iter().zip(&self.values) {
            let mult = ((v - prev) * self.normalization).round();
            prev = v;
            out.push((b, mult.to_usize().unwrap_or(0).max(1)));
        }
        out
    }
}

/// Stability classification of a detected spectral gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GapStability {
    /// The IDS plateau agrees across truncation sizes: a bulk gap.
    Stable,
    /// The candidate interval exists but its plateau drifts with the
    /// truncation, so it is an artifact of the cut.
    BoundaryArtifact,
}

/// Maximal interval free of bulk eigenvalues in every supplied truncation,
/// together with the IDS plateau value on it.
#[derive(Debug, Clone, Serialize)]
pub struct Gap<S> {
    pub lo: S,
    pub hi: S,
    /// Plateau value from the largest truncation.
    pub ids_value: S,
    pub stability: GapStability,
}

/// IDS curves of one truncation size under the two cut conditions.
///
/// Both curves must cover the same energy window; gap detection treats an
/// interval as empty only when *neither* variant has a bulk eigenvalue in
/// it, so curves of mismatched windows would manufacture phantom gaps.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryPair<S> {
    pub free: IDSCurve<S>,
    pub dirichlet: IDSCurve<S>,
}

/// Detects spectral gaps common to a family of truncations.
///
/// Toggling the cut condition at the two chain ends perturbs the operator
/// by a boundary term of rank ≤ 2: bands barely move, while the few states
/// the cut creates sit isolated inside gaps, at positions that depend on
/// where the cut falls.  With several truncation sizes an eigenvalue is
/// kept as bulk exactly when every other size has an eigenvalue (either
/// variant) within [`MATCH_FACTOR`] local median spacings; a cut-induced
/// state fails that consensus because the other truncations put their own
/// artifacts elsewhere.  With a single size the free/Dirichlet variant
/// matching stands in — weaker, since one artifact of each variant can
/// land close enough to pair up.
///
/// Maximal intervals of the surviving pool of width at least `eps_gap`
/// (default: [`GAP_FACTOR`] times the local median spacing) become gap
/// candidates.  A candidate is [`GapStability::Stable`] when the
/// variant-averaged IDS values at its midpoint agree across sizes within
/// `delta_plateau` (default: `3/normalization` of the smallest
/// truncation).  The reported plateau averages the free and Dirichlet
/// counting functions of the largest truncation: the free cut tends to
/// leave extra boundary states below a gap and the Dirichlet cut to push
/// them out, so the average is unbiased to within half a state where
/// either raw count alone carries an O(1) offset.
pub fn detect_gaps<S: Scalar>(
    pairs: &[BoundaryPair<S>],
    eps_gap: Option<S>,
    delta_plateau: Option<S>,
) -> Result<Vec<Gap<S>>> {
    if pairs.is_empty() {
        return Err(Error::input("gap detection needs at least one truncation"));
    }
    for pair in pairs {
        if pair.free.size() != pair.dirichlet.size() {
            return Err(Error::input(format!(
                "cut-condition variants must come from the same truncation, got sizes {} and {}",
                pair.free.size(),
                pair.dirichlet.size()
            )));
        }
    }
    for w in pairs.windows(2) {
        if w[0].free.size() >= w[1].free.size() {
            return Err(Error::input(format!(
                "truncation sizes must increase strictly, got {} then {}",
                w[0].free.size(),
                w[1].free.size()
            )));
        }
    }
    if let Some(eps) = eps_gap {
        if !eps.is_finite() || eps <= S::zero() {
            return Err(Error::input(format!(
                "gap width threshold must be positive, got {eps}"
            )));
        }
    }
    if let Some(delta) = delta_plateau {
        if !delta.is_finite() || delta <= S::zero() {
            return Err(Error::input(format!(
                "plateau tolerance must be positive, got {delta}"
            )));
        }
    }

    // One sorted list per truncation size, pooling both cut variants.
    let per_size: Vec<Vec<S>> = pairs
        .iter()
        .map(|pair| {
            let mut list = flatten(&pair.free);
            list.extend(flatten(&pair.dirichlet));
            list.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
            list
        })
        .collect();

    // Bulk filter.  With several sizes, a state is bulk when every other
    // truncation has a state nearby — bands persist across sizes while a
    // cut-induced state sits wherever its cut happens to fall.  With a
    // single size the free/Dirichlet variant matching stands in.
    let mut stable: Vec<S> = Vec::new();
    if per_size.len() == 1 {
        let free = flatten(&pairs[0].free);
        let dirichlet = flatten(&pairs[0].dirichlet);
        let (matched_f, matched_d) = match_variants(&free, &dirichlet);
        stable.extend(
            free.iter()
                .zip(&matched_f)
                .filter(|&(_, &m)| m)
                .map(|(&e, _)| e),
        );
        stable.extend(
            dirichlet
                .iter()
                .zip(&matched_d)
                .filter(|&(_, &m)| m)
                .map(|(&e, _)| e),
        );
    } else {
        for (si, list) in per_size.iter().enumerate() {
            'point: for &e in list {
                for (sj, other) in per_size.iter().enumerate() {
                    if sj == si {
                        continue;
                    }
                    if !has_neighbor(other, e) {
                        continue 'point;
                    }
                }
                stable.push(e);
            }
        }
    }
    stable.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    let scale = stable
        .last()
        .map(|&e| e.abs().max(S::one()))
        .unwrap_or(S::one());
    stable.dedup_by(|a, b| (*a - *b).abs() <= cast::<S>(DEDUP_TOL) * scale);
    if stable.len() < 2 {
        return Ok(Vec::new());
    }

    let delta_eff =
        delta_plateau.unwrap_or(cast::<S>(3.0) / pairs[0].free.normalization());
    let largest = &pairs[pairs.len() - 1];

    let mut gaps = Vec::new();
    for (i, w) in stable.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let width = b - a;
        let eps_eff = match eps_gap {
            Some(eps) => eps,
            None => match local_spacing(&stable, i) {
                Some(spacing) => cast::<S>(GAP_FACTOR) * spacing,
                None => continue,
            },
        };
        if width < eps_eff {
            continue;
        }
        let mid = (a + b) / cast::<S>(2.0);
        let half = cast::<S>(0.5);
        let mut lo_val = S::infinity();
        let mut hi_val = -S::infinity();
        for pair in pairs {
            let v = half * (pair.free.eval(mid) + pair.dirichlet.eval(mid));
            lo_val = lo_val.min(v);
            hi_val = hi_val.max(v);
        }
        let stability = if hi_val - lo_val <= delta_eff {
            GapStability::Stable
        } else {
            GapStability::BoundaryArtifact
        };
        // Averaging the two variants' counting functions cancels the cut
        // bias to within half a state: the free cut tends to add boundary
        // states below a gap, the Dirichlet cut to displace them above.
        gaps.push(Gap {
            lo: a,
            hi: b,
            ids_value: half * (largest.free.eval(mid) + largest.dirichlet.eval(mid)),
            stability,
        });
    }
    Ok(gaps)
}

/// Eigenvalues of a curve repeated according to multiplicity.
fn flatten<S: Scalar>(curve: &IDSCurve<S>) -> Vec<S> {
    let mut out = Vec::new();
    for (lambda, mult) in curve.counts() {
        out.extend(std::iter::repeat(lambda).take(mult));
    }
    out
}

/// Median spacing among up to [`LOCAL_SPAN`] level spacings on each side of
/// the spacing with index `i` (which is itself excluded, so a wide gap does
/// not inflate its own threshold).  `None` when no other spacing exists.
fn local_spacing<S: Scalar>(sorted: &[S], i: usize) -> Option<S> {
    let lo = i.saturating_sub(LOCAL_SPAN);
    let hi = (i + LOCAL_SPAN).min(sorted.len().saturating_sub(2));
    let mut spacings: Vec<S> = (lo..=hi)
        .filter(|&j| j != i)
        .map(|j| sorted[j + 1] - sorted[j])
        .collect();
    if spacings.is_empty() {
        return None;
    }
    spacings.sort_by(|a, b| a.partial_cmp(b).expect("finite spacings"));
    Some(spacings[spacings.len() / 2])
}

/// Whether the sorted `list` has an element within [`MATCH_FACTOR`] of its
/// own local median spacing around `e`.
fn has_neighbor<S: Scalar>(list: &[S], e: S) -> bool {
    if list.len() < 2 {
        return !list.is_empty();
    }
    let pos = list.partition_point(|&x| x < e);
    let spacing_index = pos.min(list.len() - 2);
    let window = match local_spacing(list, spacing_index) {
        Some(spacing) => cast::<S>(MATCH_FACTOR) * spacing,
        None => return true,
    };
    let mut nearest = S::infinity();
    if pos < list.len() {
        nearest = nearest.min(list[pos] - e);
    }
    if pos > 0 {
        nearest = nearest.min(e - list[pos - 1]);
    }
    nearest <= window
}

/// Greedy two-pointer matching of eigenvalue lists from the two cut
/// conditions; returns per-element "has a partner" masks.
fn match_variants<S: Scalar>(free: &[S], dirichlet: &[S]) -> (Vec<bool>, Vec<bool>) {
    let mut matched_f = vec![false; free.len()];
    let mut matched_d = vec![false; dirichlet.len()];
    let mut i = 0usize;
    let mut j = 0usize;
    while i < free.len() && j < dirichlet.len() {
        let wf = local_spacing(free, i.min(free.len().saturating_sub(2)));
        let wd = local_spacing(dirichlet, j.min(dirichlet.len().saturating_sub(2)));
        let window = match (wf, wd) {
            (Some(a), Some(b)) => cast::<S>(MATCH_FACTOR) * a.max(b),
            (Some(a), None) => cast::<S>(MATCH_FACTOR) * a,
            (None, Some(b)) => cast::<S>(MATCH_FACTOR) * b,
            // Too few eigenvalues to estimate any spacing: match freely.
            (None, None) => S::infinity(),
        };
        if (free[i] - dirichlet[j]).abs() <= window {
            matched_f[i] = true;
            matched_d[j] = true;
            i += 1;
            j += 1;
        } else if free[i] < dirichlet[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    (matched_f, matched_d)
}

/// IDS curves of metric truncations under the free (Kirchhoff) cut, one per
/// requested size.
///
/// Size `n` means `n` unit cells: the word covers sites `0..=n`, so the
/// chain part is `[0, nL]`.  Counting runs over `λ ≤ energy_max` and the
/// normalization is the truncation's total metric length.
pub fn ids_metric<S: EigenScalar>(
    model: &ModelSpec<S>,
    params: &SturmianParameters<S>,
    sizes: &[usize],
    energy_max: S,
) -> Result<Vec<IDSCurve<S>>> {
    ids_metric_boundary(model, params, sizes, energy_max, BoundaryCondition::Free)
}

/// [`ids_metric`] with an explicit cut condition at the two chain ends.
pub fn ids_metric_boundary<S: EigenScalar>(
    model: &ModelSpec<S>,
    params: &SturmianParameters<S>,
    sizes: &[usize],
    energy_max: S,
    boundary: BoundaryCondition,
) -> Result<Vec<IDSCurve<S>>> {
    validate_sizes(sizes)?;
    if !energy_max.is_finite() || energy_max <= S::zero() {
        return Err(Error::input(format!(
            "energy window top must be positive, got {energy_max}"
        )));
    }
    let opts = SolveOptions::new(k_for_energy(energy_max));
    let mut curves = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let word = truncation_word(params, n)?;
        let spectrum = spectrum_of_truncation(model, &word, boundary, &opts)?;
        let length = build_metric_truncation(model, &word, boundary)?.total_length();
        curves.push(IDSCurve::from_spectrum(&spectrum, length, n)?);
    }
    Ok(curves)
}

/// Word of the size-`n` truncation: sites `0..=n`.
pub(crate) fn truncation_word<S: Scalar>(
    params: &SturmianParameters<S>,
    n: usize,
) -> Result<Word> {
    if n == 0 {
        return Err(Error::input("truncation size must be at least 1 cell"));
    }
    let n1 = i64::try_from(n).map_err(|_| Error::input("truncation size exceeds i64"))?;
    params.generate_word(0, n1)
}

/// Search bound in `k` that safely covers all eigenvalues `≤ energy_max`.
pub(crate) fn k_for_energy<S: Scalar>(energy_max: S) -> S {
    energy_max.max(S::zero()).sqrt() * (S::one() + cast::<S>(1e-9)) + cast::<S>(1e-9)
}

pub(crate) fn validate_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::input("at least one truncation size is required"));
    }
    for w in sizes.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::input(format!(
                "truncation sizes must increase strictly, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// A point of the rotation-number lattice `(αn + m)/denominator`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LabelPoint<S> {
    pub n: i64,
    pub m: i64,
    pub value: S,
}

/// Result of matching an IDS plateau against the label lattice.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LabelMatch<S> {
    pub n: i64,
    pub m: i64,
    /// The matched lattice value `(αn + m)/L̄`.
    pub predicted: S,
    /// `|plateau − predicted|`; never hidden, however large.
    pub residual: S,
}

/// All lattice points `(αn + m)/lbar` with `|n| ≤ n_max`, `|m| ≤ m_max` and
/// value in `[0, cap]`, sorted by value (ties by `|n|`, then `|m|`, then
/// non-negative `n` first).
pub fn label_lattice_sturmian<S: Scalar>(
    alpha: S,
    lbar: S,
    n_max: i64,
    m_max: i64,
    cap: S,
) -> Result<Vec<LabelPoint<S>>> {
    if !alpha.is_finite() || alpha <= S::zero() || alpha >= S::one() {
        return Err(Error::input(format!(
            "rotation number must lie strictly inside (0,1), got {alpha}"
        )));
    }
    if !lbar.is_finite() || lbar <= S::zero() {
        return Err(Error::input(format!(
            "lattice denominator must be positive, got {lbar}"
        )));
    }
    if n_max < 0 || m_max < 0 {
        return Err(Error::input("lattice box bounds must be non-negative"));
    }
    if !cap.is_finite() || cap < S::zero() {
        return Err(Error::input(format!(
            "lattice value cap must be non-negative, got {cap}"
        )));
    }
    let mut points = Vec::new();
    for n in -n_max..=n_max {
        for m in -m_max..=m_max {
            let value = (alpha * cast::<S>(n as f64) + cast::<S>(m as f64)) / lbar;
            if value >= S::zero() && value <= cap {
                points.push(LabelPoint { n, m, value });
            }
        }
    }
    points.sort_by(|a, b| {
        a.value
            .partial_cmp(&b.value)
            .expect("finite lattice values")
            .then(a.n.abs().cmp(&b.n.abs()))
            .then(a.m.abs().cmp(&b.m.abs()))
            .then((a.n < 0).cmp(&(b.n < 0)))
    });
    Ok(points)
}

/// Discrete label set `{(αn + m)/vbar} ∩ [0, 1]`, where `vbar` is the mean
/// vertex count per unit cell.
pub fn discrete_label_set<S: Scalar>(
    alpha: S,
    vbar: S,
    n_max: i64,
    m_max: i64,
) -> Result<Vec<LabelPoint<S>>> {
    label_lattice_sturmian(alpha, vbar, n_max, m_max, S::one())
}

/// Nearest lattice point to an IDS plateau value.
///
/// Ties at exactly equal residual resolve to the smaller `|n|`, then the
/// smaller `|m|`, then non-negative `n`.  Label membership is a candidate
/// assignment, not a proof: the residual is always reported.
pub fn match_gap_label<S: Scalar>(ids_value: S, lattice: &[LabelPoint<S>]) -> Result<LabelMatch<S>> {
    if lattice.is_empty() {
        return Err(Error::input("label matching needs a non-empty lattice"));
    }
    if !ids_value.is_finite() {
        return Err(Error::input(format!(
            "IDS plateau value must be finite, got {ids_value}"
        )));
    }
    let mut best: Option<(S, &LabelPoint<S>)> = None;
    for point in lattice {
        let residual = (ids_value - point.value).abs();
        let better = match best {
            None => true,
            Some((best_res, best_pt)) => {
                if residual < best_res {
                    true
                } else if residual > best_res {
                    false
                } else {
                    let key = (point.n.abs(), point.m.abs(), point.n < 0);
                    let best_key = (best_pt.n.abs(), best_pt.m.abs(), best_pt.n < 0);
                    key < best_key
                }
            }
        };
        if better {
            best = Some((residual, point));
        }
    }
    let (residual, point) = best.expect("non-empty lattice");
    Ok(LabelMatch {
        n: point.n,
        m: point.m,
        predicted: point.value,
        residual,
    })
}

/// Distance from `value` to the nearest point `αn + m` of the rotation
/// lattice with `|n| ≤ n_box`, together with that point's coefficients.
pub(crate) fn nearest_rotation_lattice_point<S: Scalar>(
    alpha: S,
    value: S,
    n_box: i64,
) -> (S, i64, i64) {
    let mut best = (S::infinity(), 0i64, 0i64);
    for n in -n_box..=n_box {
        let rem = value - alpha * cast::<S>(n as f64);
        let m = rem.round();
        let residual = (rem - m).abs();
        if residual < best.0 {
            best = (residual, n, m.to_i64().unwrap_or(0));
        }
    }
    best
}

/// Which of the two tooth-resonance mechanisms produces an IDS jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum JumpCase {
    /// Compact states supported on long (`c₁`-separated) tooth blocks.
    One,
    /// Compact states supported on short (`c₁−1`-separated) tooth blocks.
    Two,
    /// Both mechanisms at a coincident energy.
    Both,
}

/// Predicted IDS discontinuity of a comb at a tooth-resonance energy.
#[derive(Debug, Clone, Serialize)]
pub struct JumpPrediction<S> {
    pub case: JumpCase,
    /// `(m, n)` witness pairs of the case-one equation `ℓ/L = (2m+1)(c₁+1)/(2n)`.
    pub witnesses_case_one: Vec<(u64, u64)>,
    /// `(m, n)` witness pairs of the case-two equation `ℓ/L = (2m+1)c₁/(2n)`.
    pub witnesses_case_two: Vec<(u64, u64)>,
    pub energy: S,
    /// Predicted height of the IDS jump.
    pub delta_ids: S,
}

/// Predicts the IDS jump discontinuities of the comb with tooth length
/// `ell` and spacing `L`, driven by an irrational rotation number `alpha`
/// with first continued-fraction digit `c₁`.
///
/// Consecutive teeth are separated by either `c₁` or `c₁−1` bare cells, so
/// a tooth-Dirichlet resonance supports a compactly supported eigenfunction
/// exactly when a half-integer number of waves fits between tooth bases:
/// case one at `ℓ/L = (2m+1)(c₁+1)/(2n)` with energy `(πn/((c₁+1)L))²` and
/// jump `(1−c₁α)/(L+αℓ)`, case two at `ℓ/L = (2m+1)c₁/(2n)` with energy
/// `(πn/(c₁L))²` and jump `((c₁+1)α−1)/(L+αℓ)`.  Coincident energies merge
/// into a single prediction with the summed jump `α/(L+αℓ)`.  Witness
/// indices range over `m ≤ m_max`, `n ≤ n_max`; predictions return sorted
/// by energy.
pub fn predict_jumps<S: Scalar>(
    alpha: S,
    ell: S,
    spacing: S,
    m_max: u64,
    n_max: u64,
) -> Result<Vec<JumpPrediction<S>>> {
    for (name, v) in [("tooth length", ell), ("spacing", spacing)] {
        if !v.is_finite() || v <= S::zero() {
            return Err(Error::input(format!("{name} must be positive, got {v}")));
        }
    }
    if n_max == 0 {
        return Err(Error::input("witness bound n_max must be at least 1"));
    }
    let cf = require_irrational(alpha, "jump prediction")?;
    let c1 = cf.digits()[0];
    let c1s = cast::<S>(c1 as f64);
    let lbar = spacing + alpha * ell;

    // (energy k-value, case index, witness) for every admissible (m, n).
    let mut hits: Vec<(S, usize, (u64, u64))> = Vec::new();
    for m in 0..=m_max {
        let odd = cast::<S>((2 * m + 1) as f64);
        for (case, factor) in [(0usize, c1s + S::one()), (1usize, c1s)] {
            // ℓ/L = odd·factor/(2n)  ⇔  n = odd·factor·L/(2ℓ).
            let n_real = odd * factor * spacing / (cast::<S>(2.0) * ell);
            let n_rounded = n_real.round();
            if (n_real - n_rounded).abs() > cast::<S>(RATIONAL_TOL) * n_real.max(S::one()) {
                continue;
            }
            let Some(n) = n_rounded.to_u64() else {
                continue;
            };
            if n < 1 || n > n_max {
                continue;
            }
            let k = S::PI() * cast::<S>(n as f64) / (factor * spacing);
            hits.push((k, case, (m, n)));
        }
    }
    hits.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite energies")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    let delta_one = (S::one() - c1s * alpha) / lbar;
    let delta_two = ((c1s + S::one()) * alpha - S::one()) / lbar;
    let mut out: Vec<JumpPrediction<S>> = Vec::new();
    for (k, case, witness) in hits {
        let coincident = out.last().is_some_and(|prev: &JumpPrediction<S>| {
            (prev.energy.sqrt() - k).abs() <= cast::<S>(ENERGY_MERGE) * k
        });
        if !coincident {
            out.push(JumpPrediction {
                case: if case == 0 { JumpCase::One } else { JumpCase::Two },
                witnesses_case_one: Vec::new(),
                witnesses_case_two: Vec::new(),
                energy: k * k,
                delta_ids: S::zero(),
            });
        }
        let prediction = out.last_mut().expect("just pushed");
        if case == 0 {
            prediction.witnesses_case_one.push(witness);
        } else {
            prediction.witnesses_case_two.push(witness);
        }
    }
    for prediction in &mut out {
        let has_one = !prediction.witnesses_case_one.is_empty();
        let has_two = !prediction.witnesses_case_two.is_empty();
        prediction.case = match (has_one, has_two) {
            (true, false) => JumpCase::One,
            (false, true) => JumpCase::Two,
            (true, true) => JumpCase::Both,
            (false, false) => unreachable!("prediction without witnesses"),
        };
        prediction.delta_ids = match prediction.case {
            JumpCase::One => delta_one,
            JumpCase::Two => delta_two,
            JumpCase::Both => alpha / lbar,
        };
    }
    Ok(out)
}

/// Measured IDS jump at `energy`: the dimension of the eigenspace at that
/// energy divided by the truncation's total length, from the largest of the
/// given truncation sizes (the smaller sizes are computed as a finite-size
/// consistency ladder and then discarded).
pub fn measure_jump<S: EigenScalar>(
    model: &ModelSpec<S>,
    params: &SturmianParameters<S>,
    energy: S,
    sizes: &[usize],
) -> Result<S> {
    validate_sizes(sizes)?;
    if !energy.is_finite() || energy <= S::zero() {
        return Err(Error::input(format!(
            "jump measurement needs a positive energy, got {energy}"
        )));
    }
    let k0 = num_traits::Float::sqrt(energy);
    let window = cast::<S>(KERNEL_K_TOL) * (S::one() + k0);
    let opts = SolveOptions::new(k0 + cast::<S>(0.5));
    let mut last = S::zero();
    for &n in sizes {
        let word = truncation_word(params, n)?;
        let spectrum = spectrum_of_truncation(model, &word, BoundaryCondition::Free, &opts)?;
        let mut mult = 0usize;
        for &(lambda, m) in spectrum.eigenvalues() {
            let k = if lambda >= S::zero() {
                num_traits::Float::sqrt(lambda)
            } else {
                continue;
            };
            if num_traits::Float::abs(k - k0) <= window {
                mult += m;
            }
        }
        let length = build_metric_truncation(model, &word, BoundaryCondition::Free)?.total_length();
        last = cast_usize::<S>(mult) / length;
    }
    Ok(last)
}

/// Residual of the discrete↔metric counting relation at a continuity point.
///
/// With `q = ⌊√E/π⌋` and conversion factor `C = V̄/Ē`, the per-edge metric
/// IDS of a unit-equilateral decorated chain satisfies
/// `N_H(E) = q + C·N_Δ(1−cos√E)` when `q` is even and
/// `N_H(E) = q + C·(1 − N_Δ(1−cos√E))` when `q` is odd.  Returns the signed
/// residual `metric_ids − predicted`.
///
/// # Errors
///
/// `Input` for a non-positive energy or conversion factor; `ExcludedEnergy`
/// when `√E` is within [`JUMP_PROX`] of a declared jump energy's `√E` — the
/// relation compares one-sided limits there and a pointwise check is
/// meaningless.
pub fn correspondence_ids_check<S: Scalar>(
    energy: S,
    metric_ids: S,
    discrete_ids: S,
    conversion: S,
    jump_energies: &[S],
) -> Result<S> {
    if !energy.is_finite() || energy <= S::zero() {
        return Err(Error::input(format!(
            "counting relation needs a positive energy, got {energy}"
        )));
    }
    if !conversion.is_finite() || conversion <= S::zero() {
        return Err(Error::input(format!(
            "conversion factor must be positive, got {conversion}"
        )));
    }
    let k = energy.sqrt();
    for &jump in jump_energies {
        if jump <= S::zero() {
            continue;
        }
        if (k - jump.sqrt()).abs() <= cast::<S>(JUMP_PROX) * (S::one() + k) {
            return Err(Error::excluded_energy(format!(
                "energy {energy} sits at a declared IDS jump; \
                 the counting relation only holds at continuity points"
            )));
        }
    }
    let q = (k / S::PI()).floor();
    let parity_even = (q / cast::<S>(2.0)).fract() == S::zero();
    let predicted = if parity_even {
        q + conversion * discrete_ids
    } else {
        q + conversion * (S::one() - discrete_ids)
    };
    Ok(metric_ids - predicted)
}
