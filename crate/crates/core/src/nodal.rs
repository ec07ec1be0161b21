//! Nodal counts of half-line truncations and the oscillation identities
//! they satisfy.
//!
//! For an energy in a spectral gap, the decorated half line carries a unique
//! decaying solution `f_E`.  Its zero set on the first `t` unit cells grows
//! linearly in `t`, and the growth rate — a Schwartzman-type winding number
//! of the associated Prüfer angle — equals the integrated density of states
//! times the mean cell length, corrected by the nodal surplus of each
//! decoration.  That identity places the rate in the rotation-number lattice
//! `αℤ + ℤ`: counting zeros labels the gap.
//!
//! The module provides the zero counts themselves
//! ([`truncation_zero_count`], [`zeros_on_interval`], [`decoration_nodal`]),
//! a continuously-lifted Prüfer trace whose integer part reproduces them
//! ([`prufer_trace`]), an exact finite-`t` eigenvalue-counting identity
//! relating decorated and bare chains ([`verify_counting_lemma`]), and the
//! asymptotic zero-rate identity ([`schwartzman_identity_check`]).
//!
//! Everything driven by half-line data is restricted to comb-like models
//! (every decoration a bare vertex or a pendant edge): only there does the
//! sphere of radius `t` stay finite-dimensional with explicitly integrable
//! dynamics between sites.  [`decoration_nodal`] alone accepts arbitrary
//! decorations.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{
    build_metric_truncation, BoundaryCondition, CompactMetricGraph, Decoration, ModelSpec,
    VertexCondition,
};
use crate::labels::nearest_rotation_lattice_point;
use crate::metric_solver::{
    decoration_m_function, fd_count_below, half_line_solution_data, ChainProblem, EndCondition,
    SiteCoupling,
};
use crate::scalar::{cast, cast_usize, EigenScalar, Scalar};
use crate::words::{SturmianParameters, Word};

/// Relative energy nudge applied when the decoration eigenfunction vanishes
/// at a vertex, before giving up.
const VERTEX_NUDGE: f64 = 1e-9;
/// Relative size of a vertex value (against the largest one) below which it
/// counts as vanishing.
const VERTEX_TOL: f64 = 1e-9;
/// Relative margin below the energy at which the finite-difference count of
/// the base-restricted decoration operator is taken: the operator has an
/// eigenvalue exactly at the energy, and the count of *strictly smaller*
/// eigenvalues is read off at `E(1 − δ)`.  Decorations with another
/// eigenvalue inside that margin would be miscounted; the margin is wide
/// enough for the mesh error and narrow enough for generic spectra.
const RESTRICTED_DELTA: f64 = 1e-3;
/// Resonance guard for the tooth coupling inside nodal routines.
const TOOTH_TOL: f64 = 1e-12;
/// Advance (in units of π) above which a Prüfer step refuses to commit and
/// bisects instead.
const MAX_STEP_ADVANCE: f64 = 0.5;
/// Bisection floor of the Prüfer stepper, in cell units.
const MIN_STEP: f64 = 1e-6;
/// Slack added before taking floors of windings, so a sample that lands
/// exactly on a pole still counts its zero.
const FLOOR_SLACK: f64 = 1e-9;
/// Box `|n| ≤ N_BOX` searched when matching a rate to the lattice `αℤ + ℤ`.
const LATTICE_N_BOX: i64 = 50;

/// Number of zeros of the solution of `−f″ = k²f` with initial data
/// `f(0) = f0`, `f′(0) = fp0` on the half-open interval `(0, len]`.
///
/// The solution is `R·sin(kx + ψ)` with `ψ = atan2(f0, fp0/k)`; its zeros
/// are counted exactly by an integer-floor formula, so the result is
/// correct to the last zero unless one sits within float roundoff of `len`.
///
/// # Errors
///
/// `Input` when `k ≤ 0`, `len ≤ 0`, or both initial values vanish.
pub fn zeros_on_interval<S: Scalar>(f0: S, fp0: S, k: S, len: S) -> Result<usize> {
    if !k.is_finite() || k <= S::zero() {
        return Err(Error::input(format!(
            "zero counting needs k > 0, got {k}; use the energy form for E ≤ 0"
        )));
    }
    validate_interval_data(f0, fp0, len)?;
    let phi = (fp0 / k).atan2(f0);
    let half = S::PI() / cast::<S>(2.0);
    let a = -(phi + half) / S::PI();
    let b = (k * len - (phi + half)) / S::PI();
    let count = b.floor() - a.floor();
    Ok(count.to_usize().unwrap_or(0))
}

/// [`zeros_on_interval`] extended to all energies: `E = k² > 0` delegates to
/// the trigonometric formula; for `E ≤ 0` the solution is convexly
/// hyperbolic (or affine) and has at most one zero, found by a sign check.
pub(crate) fn zeros_on_interval_energy<S: Scalar>(
    f0: S,
    fp0: S,
    energy: S,
    len: S,
) -> Result<usize> {
    if energy > S::zero() {
        return zeros_on_interval(f0, fp0, energy.sqrt(), len);
    }
    validate_interval_data(f0, fp0, len)?;
    let f_end = if energy < S::zero() {
        let kappa = (-energy).sqrt();
        f0 * (kappa * len).cosh() + fp0 / kappa * (kappa * len).sinh()
    } else {
        f0 + fp0 * len
    };
    if f0 == S::zero() {
        // The zero at the left endpoint is excluded and the solution cannot
        // return to zero: E ≤ 0 solutions vanishing once stay one-signed.
        return Ok(0);
    }
    Ok(usize::from(f0 * f_end <= S::zero()))
}

fn validate_interval_data<S: Scalar>(f0: S, fp0: S, len: S) -> Result<()> {
    if !len.is_finite() || len <= S::zero() {
        return Err(Error::input(format!(
            "zero counting needs a positive interval, got length {len}"
        )));
    }
    if !f0.is_finite() || !fp0.is_finite() {
        return Err(Error::input(format!(
            "zero counting needs finite initial data, got ({f0}, {fp0})"
        )));
    }
    if f0 == S::zero() && fp0 == S::zero() {
        return Err(Error::input("zero counting of the trivial solution"));
    }
    Ok(())
}

/// Nodal data of one decoration at one energy.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NodalData<S> {
    /// Energy the counts refer to — possibly nudged by a relative `1e−9`
    /// when the eigenfunction vanished at a decoration vertex.
    pub energy: S,
    /// Zeros of the Dirichlet-to-Neumann solution in the decoration's
    /// interior (vertices excluded, they never vanish at the reported
    /// energy).
    pub zero_count: usize,
    /// Nodal surplus `σ = zero_count − (n − 1)`, with `n` the position of
    /// the energy in the spectrum of the decoration restricted by the Robin
    /// condition `∂f = m(E)·f` at its base.
    pub surplus: i64,
    pub letter: u8,
}

/// Zeros and nodal surplus of the decoration's Dirichlet-to-Neumann
/// solution at `energy`.
///
/// The solution extending value 1 at the base into the decoration is an
/// eigenfunction of the decoration operator with the energy-dependent Robin
/// condition `∂f = m(E)·f` at the base; its zero count compared to its
/// spectral position `n` gives the surplus `σ = Z − (n − 1)`, which is 0 on
/// trees and between 0 and the cycle count in general.
///
/// Bare vertices and pendant edges are solved in closed form at any energy.
/// General decorations require `E > 0` and use a finite-difference count of
/// the restricted operator below `E(1−δ)` with `δ =` [`RESTRICTED_DELTA`];
/// see that constant for the genericity caveat.
///
/// # Errors
///
/// `ExcludedEnergy` at decoration Dirichlet energies and when the
/// eigenfunction still vanishes at a vertex after one energy nudge;
/// `Input` for `E ≤ 0` on general decorations.
pub fn decoration_nodal<S: EigenScalar>(
    decoration: &Decoration<S>,
    energy: S,
) -> Result<NodalData<S>> {
    match comb_decoration_nodal(decoration, energy) {
        Some(result) => result,
        None => general_decoration_nodal(decoration, energy),
    }
}

/// Closed-form nodal data for bare vertices and pendant edges; `None` for
/// anything larger.
fn comb_decoration_nodal<S: Scalar>(
    decoration: &Decoration<S>,
    energy: S,
) -> Option<Result<NodalData<S>>> {
    if decoration.is_single_vertex() {
        return Some(Ok(NodalData {
            energy,
            zero_count: 0,
            surplus: 0,
            letter: decoration.letter(),
        }));
    }
    let ell = decoration.pendant_length()?;
    Some(tooth_nodal(decoration.letter(), energy, ell))
}

fn tooth_nodal<S: Scalar>(letter: u8, energy: S, ell: S) -> Result<NodalData<S>> {
    let m = crate::metric_solver::tooth_coupling_energy(energy, ell, cast(TOOTH_TOL))?;
    let zero_count = zeros_on_interval_energy(S::one(), m, energy, ell)?;
    let n = restricted_tooth_count(energy, ell, m)?;
    Ok(NodalData {
        energy,
        zero_count,
        surplus: zero_count as i64 - (n as i64 - 1),
        letter,
    })
}

/// Position of `energy` in the spectrum of the pendant interval with the
/// Robin condition `f′ = m·f` at the base and a free tip (`count ≤ energy`;
/// the energy is always an eigenvalue because the Dirichlet-to-Neumann
/// solution is its eigenfunction).
fn restricted_tooth_count<S: Scalar>(energy: S, ell: S, m: S) -> Result<usize> {
    let problem = ChainProblem::new(
        vec![ell],
        vec![SiteCoupling::Free, SiteCoupling::Free],
        EndCondition::Robin(m),
        EndCondition::Robin(S::zero()),
    )?;
    Ok(problem.count_leq(energy))
}

fn general_decoration_nodal<S: EigenScalar>(
    decoration: &Decoration<S>,
    energy: S,
) -> Result<NodalData<S>> {
    if !num_traits::Float::is_finite(energy) || energy <= S::zero() {
        return Err(Error::input(format!(
            "nodal data of a general decoration needs E > 0, got {energy}"
        )));
    }
    // Nudge once if the eigenfunction vanishes at a vertex; vertex zeros
    // make the edgewise count ill-defined.
    let mut at = energy;
    let mut solution = decoration_m_function(decoration, at)?;
    if vanishes_at_vertex(&solution.1) {
        at = energy * (S::one() + cast::<S>(VERTEX_NUDGE));
        solution = decoration_m_function(decoration, at)?;
        if vanishes_at_vertex(&solution.1) {
            return Err(Error::excluded_energy(format!(
                "decoration eigenfunction vanishes at a vertex at energy {energy} \
                 and at its nudged neighbour"
            )));
        }
    }
    let (m, values) = solution;

    let mut zero_count = 0usize;
    for &(u, v, len) in decoration.edges() {
        let (a, b) = crate::metric_solver::edge_coefficients(at, len)?;
        let fp_u = -a * values[u] + b * values[v];
        zero_count += zeros_on_interval_energy(values[u], fp_u, at, len)?;
    }

    // Spectral position of `at` in the base-restricted decoration operator.
    let conditions: Vec<VertexCondition<S>> = (0..decoration.vertex_count())
        .map(|v| {
            if v == decoration.base() {
                VertexCondition::Robin(m)
            } else {
                VertexCondition::Kirchhoff
            }
        })
        .collect();
    let graph = CompactMetricGraph::new(conditions, decoration.edges().to_vec())?;
    let shortest = decoration
        .edges()
        .iter()
        .map(|&(_, _, len)| len)
        .fold(S::infinity(), num_traits::Float::min);
    let k = num_traits::Float::sqrt(at);
    let h = num_traits::Float::min(shortest / cast::<S>(32.0), S::one() / (k * cast::<S>(64.0)));
    let below = fd_count_below(&graph, h, at * (S::one() - cast::<S>(RESTRICTED_DELTA)))?;
    let n = below + 1;
    Ok(NodalData {
        energy: at,
        zero_count,
        surplus: zero_count as i64 - (n as i64 - 1),
        letter: decoration.letter(),
    })
}

fn vanishes_at_vertex<S: Scalar>(values: &[S]) -> bool {
    let scale = values
        .iter()
        .fold(S::zero(), |acc, &v| acc.max(v.abs()))
        .max(S::one());
    values.iter().any(|&v| v.abs() < cast::<S>(VERTEX_TOL) * scale)
}

/// Context shared by the half-line routines: per-site couplings and
/// boundary ratios of the decaying solution.
struct HalfLineContext<S> {
    spacing: S,
    /// `out[j] = f′(x_j⁻)/f(x_j)` for `j = 0..=cells`.
    out: Vec<S>,
    /// Per-site decoration coupling `m_{ω(j)}(E)` for `j = 0..cells`.
    site_m: Vec<S>,
    /// Pendant length at site `j`, `None` for a bare site, `j = 0..cells`.
    site_tooth: Vec<Option<S>>,
}

fn half_line_context<S: Scalar>(
    model: &ModelSpec<S>,
    word: &Word,
    energy: S,
    cells: usize,
    what: &str,
) -> Result<HalfLineContext<S>> {
    if !model.is_comb_like() {
        return Err(Error::input(format!(
            "{what} is implemented for chains of bare and pendant decorations; \
             route general models through the compact-graph solvers"
        )));
    }
    if cells == 0 {
        return Err(Error::input(format!("{what} needs at least one cell")));
    }
    // The data window must reach site `cells`, so the horizon must be at
    // least `4·cells` (and the word `8·cells + 1` letters).  When the word
    // is longer, push the horizon out — the artificial far condition decays
    // like the gap's Lyapunov exponent times the horizon, and shallow gaps
    // need more room than the minimum.
    let available = word.len().saturating_sub(1) / 2;
    let far_n = (4 * cells).max((4 * cells).max(32).min(available));
    let out = half_line_solution_data(model, word, energy, far_n)?;
    let mut site_m = Vec::with_capacity(cells);
    let mut site_tooth = Vec::with_capacity(cells);
    for &letter in &word.letters()[..cells] {
        let decoration = model.decoration(letter)?;
        match decoration.pendant_length() {
            Some(ell) => {
                site_m.push(crate::metric_solver::tooth_coupling_energy(
                    energy,
                    ell,
                    cast(TOOTH_TOL),
                )?);
                site_tooth.push(Some(ell));
            }
            None => {
                site_m.push(S::zero());
                site_tooth.push(None);
            }
        }
    }
    Ok(HalfLineContext {
        spacing: model.spacing(),
        out,
        site_m,
        site_tooth,
    })
}

/// Number of zeros of the decaying half-line solution on the truncation of
/// `cells` unit cells: chain zeros in `(0, cells·L]` plus the interior
/// zeros of the decorations at sites `0, …, cells−1`.
///
/// Comb-like models only.  The word must cover at least `8·cells + 1`
/// letters (the half-line shooting horizon), and the energy must lie in a
/// spectral gap of the half-line operator.
pub fn truncation_zero_count<S: Scalar>(
    model: &ModelSpec<S>,
    word: &Word,
    energy: S,
    cells: usize,
) -> Result<usize> {
    let ctx = half_line_context(model, word, energy, cells, "truncation zero counting")?;
    let mut zeros = 0usize;
    for j in 0..cells {
        let slope = ctx.out[j] - ctx.site_m[j];
        zeros += zeros_on_interval_energy(S::one(), slope, energy, ctx.spacing)?;
        if let Some(ell) = ctx.site_tooth[j] {
            zeros += zeros_on_interval_energy(S::one(), ctx.site_m[j], energy, ell)?;
        }
    }
    Ok(zeros)
}

/// One sample of a Prüfer winding trace.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TraceRow<S> {
    /// Sphere radius in cell units.
    pub t: S,
    /// Continuously lifted winding `φ̃(t)`, in units of π.
    pub winding: S,
    /// Running zero count `max_{s ≤ t} ⌊φ̃(s)⌋`.
    pub zero_count: usize,
}

/// Continuously lifted Prüfer winding of the decaying half-line solution.
///
/// At radius `t ∈ (j, j+1]` the sphere of the truncation consists of one
/// chain point at `x = t·L` and, when site `j` carries a pendant, one point
/// at depth `(t−j)·ℓ` inside it.  The summed outward logarithmic derivative
/// `m(t)` of the solution over the sphere defines the angle
/// `θ = π/2 − atan(m/c₀) ∈ (0, π)` with `c₀ = √|E|` (1 at `E = 0`), and
/// `φ̃` is the continuous lift of `θ/π` that increases by 1 through every
/// pole of `m` — each pole is a zero of the solution crossing the sphere.
/// Consequently `⌊φ̃(t)⌋` at integer `t` equals [`truncation_zero_count`],
/// and `φ̃(t)/t` converges to the zero-line rate of
/// [`schwartzman_identity_check`].
pub fn prufer_trace<S: Scalar>(
    model: &ModelSpec<S>,
    word: &Word,
    energy: S,
    t_max: usize,
) -> Result<PruferTrace<S>> {
    let ctx = half_line_context(model, word, energy, t_max, "Prüfer tracing")?;
    let c0 = if energy == S::zero() {
        S::one()
    } else {
        energy.abs().sqrt()
    };
    let angle = |m: S| -> S {
        let half = S::PI() / cast::<S>(2.0);
        half - (m / c0).atan()
    };

    let ell_max = ctx
        .site_tooth
        .iter()
        .filter_map(|t| *t)
        .fold(S::zero(), S::max);
    let rate = c0 * (ctx.spacing + ell_max) / S::PI();
    let substeps = (rate / cast::<S>(0.35))
        .ceil()
        .to_usize()
        .unwrap_or(0)
        .max(1)
        + 4;

    let mut winding = angle(ctx.out[0]) / S::PI();
    let mut zero_count = 0usize;
    let mut rows = Vec::with_capacity(t_max * substeps + 1);
    push_trace_row(&mut rows, S::zero(), winding, &mut zero_count);

    for j in 0..t_max {
        let slope = ctx.out[j] - ctx.site_m[j];
        let tooth = ctx.site_tooth[j];
        // Summed sphere flux at fraction s through cell j.
        let flux = |s: S| -> S {
            let chain = chain_log_derivative(slope, energy, s * ctx.spacing);
            let pendant = match tooth {
                Some(ell) => remaining_tooth_flux(energy, ell * (S::one() - s)),
                None => S::zero(),
            };
            chain + pendant
        };
        let mut s_prev = S::zero();
        let mut theta_prev = angle(flux(S::zero()));
        // The sum telescopes against out[j]: entering the cell is seamless.
        debug_assert!({
            let gap = (theta_prev - angle(ctx.out[j])).abs();
            gap < cast::<S>(1e-6) * S::PI()
        });
        for step in 1..=substeps {
            let s_next = cast_usize::<S>(step) / cast_usize::<S>(substeps);
            advance(
                &flux,
                &angle,
                &mut s_prev,
                &mut theta_prev,
                s_next,
                &mut winding,
            )?;
            push_trace_row(&mut rows, cast_usize::<S>(j) + s_next, winding, &mut zero_count);
        }
        // Exact left-limit ratio at the next site: absorb the roundoff of
        // the in-cell propagation so integer radii are exact.
        let theta_site = angle(ctx.out[j + 1]);
        let correction = (theta_site - theta_prev) / S::PI();
        if correction.abs() >= cast::<S>(MAX_STEP_ADVANCE) {
            return Err(Error::numerical(format!(
                "Prüfer trace end-of-cell mismatch of {correction} half-turns at site {}",
                j + 1
            )));
        }
        winding += correction;
        if let Some(last) = rows.last_mut() {
            last.winding = winding;
        }
    }
    Ok(PruferTrace { rows })
}

/// Appends one trace sample, updating the running zero count.
fn push_trace_row<S: Scalar>(rows: &mut Vec<TraceRow<S>>, t: S, winding: S, zero_count: &mut usize) {
    *zero_count = (*zero_count).max(
        (winding + cast::<S>(FLOOR_SLACK))
            .floor()
            .to_usize()
            .unwrap_or(0),
    );
    rows.push(TraceRow {
        t,
        winding,
        zero_count: *zero_count,
    });
}

/// Advances the lifted winding from `s_prev` to `s_next`, bisecting until
/// each committed step stays below half a turn.
fn advance<S: Scalar>(
    flux: &dyn Fn(S) -> S,
    angle: &dyn Fn(S) -> S,
    s_prev: &mut S,
    theta_prev: &mut S,
    s_next: S,
    winding: &mut S,
) -> Result<()> {
    let theta_next = angle(flux(s_next));
    let raw = (theta_next - *theta_prev) / S::PI();
    // θ lives on a circle of circumference π: a drop below −π/2 is a pole
    // wrap (the lift only ever wraps upwards).
    let lifted = if raw > -cast::<S>(MAX_STEP_ADVANCE) {
        raw
    } else {
        raw + S::one()
    };
    if lifted.abs() < cast::<S>(MAX_STEP_ADVANCE) {
        *winding += lifted;
        *s_prev = s_next;
        *theta_prev = theta_next;
        return Ok(());
    }
    if s_next - *s_prev < cast::<S>(MIN_STEP) {
        return Err(Error::numerical(format!(
            "Prüfer winding advances by {lifted} half-turns across a step of \
             {:.3e} cells; the angle moves too fast to lift",
            s_next - *s_prev
        )));
    }
    let mid = (*s_prev + s_next) / cast::<S>(2.0);
    advance(flux, angle, s_prev, theta_prev, mid, winding)?;
    advance(flux, angle, s_prev, theta_prev, s_next, winding)
}

/// Logarithmic derivative at distance `x` of the chain solution with
/// `f(0) = 1`, `f′(0) = slope`.
fn chain_log_derivative<S: Scalar>(slope: S, energy: S, x: S) -> S {
    if energy > S::zero() {
        let k = energy.sqrt();
        let (s, c) = (k * x).sin_cos();
        (-k * s + slope * c) / (c + slope / k * s)
    } else if energy < S::zero() {
        let kappa = (-energy).sqrt();
        let (s, c) = ((kappa * x).sinh(), (kappa * x).cosh());
        (kappa * s + slope * c) / (c + slope / kappa * s)
    } else {
        slope / (S::one() + slope * x)
    }
}

/// Outward flux of the remaining pendant of length `rest` with a free tip.
fn remaining_tooth_flux<S: Scalar>(energy: S, rest: S) -> S {
    if rest <= S::zero() {
        return S::zero();
    }
    if energy > S::zero() {
        let k = energy.sqrt();
        k * (k * rest).tan()
    } else if energy < S::zero() {
        let kappa = (-energy).sqrt();
        -kappa * (kappa * rest).tanh()
    } else {
        S::zero()
    }
}

/// Sampled Prüfer winding along a half-line truncation.
#[derive(Debug, Clone, Serialize)]
pub struct PruferTrace<S> {
    rows: Vec<TraceRow<S>>,
}

impl<S: Scalar> PruferTrace<S> {
    pub fn rows(&self) -> &[TraceRow<S>] {
        &self.rows
    }

    /// The sample at integer radius `site`, when present.
    pub fn at_site(&self, site: usize) -> Option<&TraceRow<S>> {
        let target = cast_usize::<S>(site);
        self.rows
            .iter()
            .find(|row| (row.t - target).abs() < cast::<S>(1e-12))
    }

    /// Final lifted winding `φ̃(t_max)`.
    pub fn final_winding(&self) -> S {
        self.rows.last().map(|r| r.winding).unwrap_or(S::zero())
    }

    /// Final running zero count.
    pub fn zero_count(&self) -> usize {
        self.rows.last().map(|r| r.zero_count).unwrap_or(0)
    }

    /// CSV dump `t,phi,zeros` with one row per sample.
    pub fn csv(&self) -> String {
        let mut out = String::from("t,phi,zeros\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{:.12e},{:.12e},{}\n",
                row.t, row.winding, row.zero_count
            ));
        }
        out
    }
}

/// Outcome of the eigenvalue-counting identity on one truncation.
#[derive(Debug, Clone, Serialize)]
pub struct CountingLemmaReport<S> {
    pub energy: S,
    /// Number of unit cells in the truncation.
    pub cells: usize,
    /// `lhs`: eigenvalues `≤ E` of the decorated truncation wired with the
    /// half-line Robin data.
    pub lhs: usize,
    /// `rhs`: the horizontal count plus the per-site decoration
    /// corrections `Σ (n^{(ω(j))} − 1)`.
    pub rhs: usize,
    pub equal: bool,
    /// Eigenvalues `≤ E` of the horizontal (δ-coupled bare chain) operator.
    pub horizontal_count: usize,
    /// Chain zeros of the half-line solution in `(0, cells·L]`; Sturm
    /// oscillation makes `horizontal_count = horizontal_zeros + 1`.
    pub horizontal_zeros: usize,
}

/// Verifies, exactly in integer arithmetic, the eigenvalue-counting
/// identity linking the decorated truncation to its bare horizontal chain.
///
/// Both operators are wired with the logarithmic derivatives of the
/// decaying half-line solution as Robin end conditions, which makes `E`
/// itself an eigenvalue of each; the decorated count then exceeds the
/// horizontal count by exactly the sum of base-restricted decoration counts
/// `n^{(a)} − 1` over the truncated sites.  Comb-like models only; the word
/// must cover `8·cells + 1` letters and the energy must lie in a gap.
pub fn verify_counting_lemma<S: Scalar>(
    model: &ModelSpec<S>,
    word: &Word,
    cells: usize,
    energy: S,
) -> Result<CountingLemmaReport<S>> {
    let ctx = half_line_context(model, word, energy, cells, "counting-identity checking")?;
    let left = EndCondition::Robin(ctx.out[0]);
    let right = EndCondition::Robin(ctx.out[cells]);
    let segments = vec![ctx.spacing; cells];

    let mut decorated = Vec::with_capacity(cells + 1);
    let mut horizontal = Vec::with_capacity(cells + 1);
    for j in 0..cells {
        decorated.push(match ctx.site_tooth[j] {
            Some(ell) => SiteCoupling::Tooth(ell),
            None => SiteCoupling::Free,
        });
        horizontal.push(SiteCoupling::Delta(-ctx.site_m[j]));
    }
    decorated.push(SiteCoupling::Free);
    horizontal.push(SiteCoupling::Free);

    let lhs = ChainProblem::new(segments.clone(), decorated, left, right)?.count_leq(energy);
    let horizontal_count =
        ChainProblem::new(segments, horizontal, left, right)?.count_leq(energy);

    let mut corrections = 0i64;
    let mut horizontal_zeros = 0usize;
    for j in 0..cells {
        horizontal_zeros += zeros_on_interval_energy(
            S::one(),
            ctx.out[j] - ctx.site_m[j],
            energy,
            ctx.spacing,
        )?;
        if let Some(ell) = ctx.site_tooth[j] {
            let n = restricted_tooth_count(energy, ell, ctx.site_m[j])?;
            corrections += n as i64 - 1;
        }
    }
    let rhs_signed = horizontal_count as i64 + corrections;
    let rhs = usize::try_from(rhs_signed)
        .map_err(|_| Error::numerical(format!("negative predicted count {rhs_signed}")))?;
    Ok(CountingLemmaReport {
        energy,
        cells,
        lhs,
        rhs,
        equal: lhs == rhs,
        horizontal_count,
        horizontal_zeros,
    })
}

/// Outcome of the asymptotic zero-rate identity at one gap energy.
#[derive(Debug, Clone, Serialize)]
pub struct SchwartzmanReport<S> {
    pub energy: S,
    /// Number of cells the zero count was averaged over.
    pub t_max: usize,
    /// Measured zeros per unit cell, `Z_{ω,t}/t`.
    pub zero_rate: S,
    /// IDS value `N(E)` (per unit length) of the reference truncation.
    pub ids_value: S,
    /// Mean metric length per cell `L̄`.
    pub normalized_length: S,
    /// Frequency-weighted decoration surplus `Σ_a ν_a σ^{(a)}(E)`.
    pub surplus_term: S,
    /// `N(E)·L̄ + Σ_a ν_a σ^{(a)}(E)`.
    pub predicted: S,
    /// `zero_rate − predicted`; decays like `O(1/t)` in a gap.
    pub residual: S,
    /// Coefficients of the nearest lattice point `αn + m` to the rate.
    pub lattice_n: i64,
    pub lattice_m: i64,
    /// Distance of the rate to that lattice point.
    pub lattice_residual: S,
}

/// Measures the zero rate of the decaying half-line solution over `t_max`
/// cells and compares it with the gap-labelling prediction
/// `N(E)·L̄ + Σ_a ν_a σ^{(a)}(E)`, reporting both the raw residual and the
/// distance of the rate to the rotation lattice `αℤ + ℤ`.
///
/// Comb-like models only; the Sturmian word is generated internally (at
/// least `8·t_max + 1` letters) and the energy must lie in a spectral gap.
pub fn schwartzman_identity_check<S: Scalar>(
    model: &ModelSpec<S>,
    params: &SturmianParameters<S>,
    energy: S,
    t_max: usize,
) -> Result<SchwartzmanReport<S>> {
    if t_max == 0 {
        return Err(Error::input("zero-rate measurement needs at least one cell"));
    }
    if model.decorations().len() < 2 {
        return Err(Error::input(
            "Sturmian chains need decorations for both letters 0 and 1",
        ));
    }
    // `8·t_max.max(8)` sites keep the half-line horizon deep enough for
    // the decay check even when few cells are requested.
    let horizon =
        i64::try_from(8 * t_max.max(8)).map_err(|_| Error::input("t_max exceeds i64"))?;
    let word = params.generate_word(0, horizon)?;
    let zeros = truncation_zero_count(model, &word, energy, t_max)?;
    let zero_rate = cast_usize::<S>(zeros) / cast_usize::<S>(t_max);

    // Reference IDS from an exact eigenvalue count on a long truncation.
    let n_ref = t_max.max(200);
    let ref_word = params.generate_word(0, n_ref as i64)?;
    let ref_problem = comb_like_chain(model, &ref_word)?;
    let count = ref_problem.count_leq(energy);
    let length = build_metric_truncation(model, &ref_word, BoundaryCondition::Free)?.total_length();
    let ids_value = cast_usize::<S>(count) / length;

    let alpha = params.alpha();
    let mut freqs = vec![S::zero(); model.decorations().len()];
    freqs[0] = S::one() - alpha;
    freqs[1] = alpha;
    let normalized_length = model.normalized_length(&freqs)?;

    let mut surplus_term = S::zero();
    for (letter, &nu) in freqs.iter().enumerate() {
        if nu == S::zero() {
            continue;
        }
        let decoration = model.decoration(letter as u8)?;
        let data = comb_decoration_nodal(decoration, energy)
            .expect("comb-like decorations have closed-form nodal data")?;
        surplus_term += nu * cast::<S>(data.surplus as f64);
    }

    let predicted = ids_value * normalized_length + surplus_term;
    let residual = zero_rate - predicted;
    let (lattice_residual, lattice_n, lattice_m) =
        nearest_rotation_lattice_point(alpha, zero_rate, LATTICE_N_BOX);
    Ok(SchwartzmanReport {
        energy,
        t_max,
        zero_rate,
        ids_value,
        normalized_length,
        surplus_term,
        predicted,
        residual,
        lattice_n,
        lattice_m,
        lattice_residual,
    })
}

/// Free-ended chain problem of a comb-like truncation over arbitrary
/// two-letter (or wider) comb-like models.
fn comb_like_chain<S: Scalar>(model: &ModelSpec<S>, word: &Word) -> Result<ChainProblem<S>> {
    let letters = word.letters();
    if letters.len() < 2 {
        return Err(Error::input("comb-like chain needs at least two sites"));
    }
    let mut couplings = Vec::with_capacity(letters.len());
    for &letter in letters {
        let decoration = model.decoration(letter)?;
        couplings.push(match decoration.pendant_length() {
            Some(ell) => SiteCoupling::Tooth(ell),
            None => SiteCoupling::Free,
        });
    }
    ChainProblem::new(
        vec![model.spacing(); letters.len() - 1],
        couplings,
        EndCondition::Robin(S::zero()),
        EndCondition::Robin(S::zero()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_solver::{comb_spectrum_fast, SolveOptions};

    const GOLDEN: f64 = 0.618033988749894848;
    const PI: f64 = std::f64::consts::PI;

    fn golden_params() -> SturmianParameters<f64> {
        SturmianParameters::new(GOLDEN, 0.0).unwrap()
    }

    fn comb() -> ModelSpec<f64> {
        ModelSpec::comb(1.0, 1.0).unwrap()
    }

    /// Midpoint of the widest spectral gap of a finite golden comb below
    /// `π²`, located from an exact truncated spectrum.  The half-line
    /// doubling test downstream certifies it really sits in a gap.
    fn golden_gap_energy() -> f64 {
        let word = golden_params().generate_word(0, 89).unwrap();
        let spectrum = comb_spectrum_fast(
            1.0,
            1.0,
            &word,
            BoundaryCondition::Free,
            &SolveOptions::new(PI),
        )
        .unwrap();
        let eigs: Vec<f64> = spectrum.eigenvalues().iter().map(|&(l, _)| l).collect();
        let mut best = (0.0, 0.0);
        for w in eigs.windows(2) {
            if w[1] - w[0] > best.0 {
                best = (w[1] - w[0], (w[0] + w[1]) / 2.0);
            }
        }
        assert!(best.0 > 0.2, "no visible gap below π², widest {}", best.0);
        best.1
    }

    #[test]
    fn interval_zero_counts_match_hand_values() {
        assert_eq!(zeros_on_interval(1.0, 0.0, PI, 1.0).unwrap(), 1);
        assert_eq!(zeros_on_interval(0.0, 1.0, PI, 1.0).unwrap(), 1);
        assert_eq!(zeros_on_interval(1.0, 0.0, 0.1, 1.0).unwrap(), 0);
        assert_eq!(zeros_on_interval(1.0, 0.0, 4.0 * PI, 1.0).unwrap(), 4);
        assert!(zeros_on_interval(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(zeros_on_interval(0.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn nonpositive_energy_counts_sign_changes() {
        // cosh(u) − 2 sinh(u) starts positive and ends negative on (0, 3].
        assert_eq!(zeros_on_interval_energy(1.0, -2.0, -1.0, 3.0).unwrap(), 1);
        assert_eq!(zeros_on_interval_energy(1.0, 1.0, -1.0, 3.0).unwrap(), 0);
        assert_eq!(zeros_on_interval_energy(1.0, -1.0, 0.0, 2.0).unwrap(), 1);
        // At E = 0 the solution 1 − u/2 vanishes exactly at the endpoint,
        // which the half-open interval (0, ℓ] includes; shortening the
        // interval by any amount drops the zero, as does a gentler slope.
        assert_eq!(zeros_on_interval_energy(1.0, -0.5, 0.0, 2.0).unwrap(), 1);
        assert_eq!(zeros_on_interval_energy(1.0, -0.5, 0.0, 2.0 - 1e-9).unwrap(), 0);
        assert_eq!(zeros_on_interval_energy(1.0, -0.4, 0.0, 2.0).unwrap(), 0);
    }

    #[test]
    fn tooth_nodal_matches_hand_values() {
        let tooth = Decoration::pendant(1, 1.0).unwrap();
        let low = decoration_nodal(&tooth, (PI / 4.0).powi(2)).unwrap();
        assert_eq!((low.zero_count, low.surplus), (0, 0));
        let high = decoration_nodal(&tooth, (3.0 * PI / 4.0).powi(2)).unwrap();
        assert_eq!((high.zero_count, high.surplus), (1, 0));
        let bare = Decoration::single_vertex(0);
        let flat = decoration_nodal(&bare, 2.0).unwrap();
        assert_eq!((flat.zero_count, flat.surplus), (0, 0));
        // Pendant Dirichlet energies are excluded.
        assert!(decoration_nodal(&tooth, (PI / 2.0).powi(2)).is_err());
    }

    #[test]
    fn split_pendant_agrees_with_closed_form() {
        // A path of two half-length edges is metrically the unit pendant;
        // the general finite-difference route must agree with the
        // closed-form tooth at every regular energy.
        let split = Decoration::new(1, 3, 0, vec![(0, 1, 0.5), (1, 2, 0.5)]).unwrap();
        let tooth = Decoration::pendant(1, 1.0).unwrap();
        for energy in [2.0, (3.0 * PI / 4.0).powi(2), 9.0] {
            let a = decoration_nodal(&split, energy).unwrap();
            let b = decoration_nodal(&tooth, energy).unwrap();
            assert_eq!(a.zero_count, b.zero_count, "zeros at E = {energy}");
            assert_eq!(a.surplus, b.surplus, "surplus at E = {energy}");
        }
    }

    #[test]
    fn tree_decorations_have_zero_surplus_and_loops_bounded() {
        let star = Decoration::new(2, 3, 0, vec![(0, 1, 0.7), (0, 2, 1.3)]).unwrap();
        for energy in [1.0, 3.3, 7.1] {
            let data = decoration_nodal(&star, energy).unwrap();
            assert_eq!(data.surplus, 0, "tree surplus at E = {energy}");
        }
        // A subdivided loop (triangle through the base) has first Betti
        // number 1.
        let loop_dec =
            Decoration::new(3, 3, 0, vec![(0, 1, 0.5), (1, 2, 0.25), (2, 0, 0.25)]).unwrap();
        for energy in [1.0, 5.0, 11.0] {
            let data = decoration_nodal(&loop_dec, energy).unwrap();
            assert!(
                (0..=1).contains(&data.surplus),
                "loop surplus {} at E = {energy}",
                data.surplus
            );
        }
    }

    #[test]
    fn trace_floor_reproduces_direct_zero_count() {
        let model = comb();
        let energy = golden_gap_energy();
        let cells = 12usize;
        let word = golden_params().generate_word(0, (8 * cells) as i64).unwrap();
        let trace = prufer_trace(&model, &word, energy, cells).unwrap();
        for t in 1..=cells {
            let direct = truncation_zero_count(&model, &word, energy, t).unwrap();
            let row = trace.at_site(t).expect("integer radii are sampled");
            assert_eq!(
                row.zero_count, direct,
                "floor vs direct at t = {t}, E = {energy}"
            );
            assert_eq!(row.winding.floor() as usize, direct);
        }
        // The winding starts inside (0, 1) and never decreases at E > 0.
        let rows = trace.rows();
        assert!(rows[0].winding > 0.0 && rows[0].winding < 1.0);
        for w in rows.windows(2) {
            assert!(w[1].winding >= w[0].winding - 1e-9);
        }
    }

    #[test]
    fn trace_is_consistent_under_the_shift() {
        let model = comb();
        let energy = golden_gap_energy();
        let word = golden_params().generate_word(0, 200).unwrap();
        let shifted = Word::from_letters(word.letters()[1..].to_vec(), 0).unwrap();
        let trace = prufer_trace(&model, &word, energy, 8).unwrap();
        let trace_shifted = prufer_trace(&model, &shifted, energy, 8).unwrap();
        let phi1 = trace.at_site(1).unwrap().winding;
        let phi0 = trace_shifted.rows()[0].winding;
        // φ(ω, 1) and φ(Tω, 0) agree modulo the integer zero count.
        let diff = (phi1 - phi1.floor() - phi0).abs();
        assert!(diff < 1e-5, "shift mismatch {diff}");
    }

    #[test]
    fn counting_identity_holds_on_the_periodic_comb() {
        // All-ones word: the period-1 comb, which has a gap at E = 2.1
        // (transfer-matrix trace ≈ −7.9).
        let model = comb();
        let word = Word::from_letters(vec![1; 20], 0).unwrap();
        let report = verify_counting_lemma(&model, &word, 2, 2.1).unwrap();
        assert!(report.equal, "identity off: {report:?}");
        assert_eq!(
            report.horizontal_count,
            report.horizontal_zeros + 1,
            "Sturm oscillation failed: {report:?}"
        );
    }

    #[test]
    fn counting_identity_holds_on_the_golden_comb() {
        let model = comb();
        let energy = golden_gap_energy();
        for cells in [1usize, 3, 5] {
            // Longer words let the half-line shoot use a deeper horizon,
            // which shallow gaps need for the decay check to settle.
            let word = golden_params()
                .generate_word(0, (8 * cells.max(8)) as i64)
                .unwrap();
            let report = verify_counting_lemma(&model, &word, cells, energy).unwrap();
            assert!(report.equal, "identity off at t = {cells}: {report:?}");
            assert_eq!(report.horizontal_count, report.horizontal_zeros + 1);
        }
    }

    #[test]
    fn zero_rate_approaches_the_labelling_prediction() {
        let model = comb();
        let energy = golden_gap_energy();
        let report = schwartzman_identity_check(&model, &golden_params(), energy, 40).unwrap();
        assert!(
            report.residual.abs() < 0.1,
            "rate {} vs predicted {}",
            report.zero_rate,
            report.predicted
        );
        let check = report.ids_value * report.normalized_length + report.surplus_term;
        assert_eq!(report.predicted, check);
        assert!(report.lattice_residual < 0.1, "report: {report:?}");
    }

    #[test]
    fn general_models_are_rejected_by_half_line_routines() {
        let star = Decoration::new(1, 3, 0, vec![(0, 1, 0.7), (0, 2, 1.3)]).unwrap();
        let model = ModelSpec::new(1.0, vec![Decoration::single_vertex(0), star]).unwrap();
        let word = Word::from_letters(vec![1; 20], 0).unwrap();
        let err = truncation_zero_count(&model, &word, 2.0, 2).unwrap_err();
        assert!(matches!(err, Error::Input(_)), "got: {err}");
    }
}
