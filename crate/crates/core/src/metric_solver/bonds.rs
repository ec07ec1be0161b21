//! General eigenvalue solver on the directed-bond evolution operator.
//!
//! Eigenvalues `λ = k² > 0` of a compact graph are the roots of the secular
//! condition `det(I − U(k)) = 0`, where `U(k) = D(k)·S(k)` acts on directed
//! bonds: `D(k)` carries the phases `e^{ikℓ_b}` and `S(k)` the vertex
//! scattering blocks.  Every eigenphase of `U(k)` moves upward in `k` (bond
//! phases at speed between the shortest and longest edge, Robin corrections
//! at non-negative speed for non-negative coefficients), so the number of
//! roots in `(0, k]` is the total winding of the phases — an exact integer:
//!
//! ```text
//! N(k) = [C₀ + F(k) − Σ_j θ_j(k)] / 2π
//! ```
//!
//! with `θ_j(k) ∈ [0, 2π)` the measured eigenphases, `F(k) = 2|Γ|k +
//! Σ_{Robin v} (π − 2·atan(ρ_v/(d_v k)))` the lifted phase gain of
//! `det U(k)`, and `C₀` the phase sum at `k → 0⁺`.  There `U` tends to the
//! real orthogonal matrix `S₀` (Robin blocks tend to `−I`), whose phases
//! come as conjugate pairs summing to `2π`, plus `0`s and `π`s — so
//! `C₀ = π·(B − dim ker(S₀ − I))` with `B` the number of directed bonds,
//! computable without any limit.  Eigenvalues are then located by bisecting
//! on `N`, which can neither miss roots nor misjudge multiplicities.
//!
//! Negative Robin coefficients break the monotonicity (and create negative
//! spectrum outside the `k` axis), so they are rejected here; the chain
//! solver and the finite-difference oracle cover that regime.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::graphs::{CompactMetricGraph, Decoration, VertexCondition};
use crate::linalg::unitary_eigenphases;
use crate::scalar::{cast, EigenScalar};

use super::{SolveOptions, Spectrum};

/// Probes with an eigenphase closer than this to `0` or `2π` are abandoned
/// and retried at a nudged `k`: so close to a root, the winding count is
/// genuinely ambiguous at floating-point precision.
const PHASE_GUARD: f64 = 1e-11;
/// Accepted distance of the phase-sum expression from an integer.
const COUNT_RESIDUAL_TOL: f64 = 0.05;
/// Singular values of `S₀ − I` below this count as kernel directions.
const KERNEL_TOL: f64 = 1e-7;
/// Roots closer than this in `k` are merged into one multiplicity.
const MERGE_K: f64 = 1e-7;

// `EigenScalar` sees both num-traits `Float` and nalgebra `RealField`;
// route shared method names through these to stay unambiguous.
fn fabs<S: EigenScalar>(x: S) -> S {
    num_traits::Float::abs(x)
}

fn fmax<S: EigenScalar>(a: S, b: S) -> S {
    num_traits::Float::max(a, b)
}

fn fsqrt<S: EigenScalar>(x: S) -> S {
    num_traits::Float::sqrt(x)
}

fn fatan<S: EigenScalar>(x: S) -> S {
    num_traits::Float::atan(x)
}

fn fsin<S: EigenScalar>(x: S) -> S {
    num_traits::Float::sin(x)
}

fn fcos<S: EigenScalar>(x: S) -> S {
    num_traits::Float::cos(x)
}

fn fround<S: EigenScalar>(x: S) -> S {
    num_traits::Float::round(x)
}

/// Bond scattering matrix for Kirchhoff/Dirichlet graphs: real, orthogonal,
/// independent of `k`.
///
/// Directed bonds are indexed `2e` (`u→v`) and `2e+1` (`v→u`) for edge `e`;
/// at a Kirchhoff vertex of degree `d` the block is `2/d − δ`, at a
/// Dirichlet vertex it is `−δ` (reflection `−1`).
///
/// # Errors
///
/// `Input` for graphs with Robin tags — their scattering depends on `k` and
/// lives inside [`metric_spectrum_general`] instead.
pub fn bond_scattering_matrix<S: EigenScalar>(g: &CompactMetricGraph<S>) -> Result<DMatrix<S>> {
    if g.has_robin_vertex() {
        return Err(Error::input(
            "bond scattering matrix is k-independent only without Robin vertices; \
             the general solver handles Robin internally",
        ));
    }
    Ok(scattering_limit(g))
}

/// Real orthogonal `k → 0⁺` limit of the scattering matrix: Kirchhoff blocks
/// verbatim, Dirichlet reflections, and Robin (`ρ > 0`) blocks collapsed to
/// `−I`.
fn scattering_limit<S: EigenScalar>(g: &CompactMetricGraph<S>) -> DMatrix<S> {
    let nb = 2 * g.edge_count();
    let degrees = g.degrees();
    let in_bonds = in_bonds_by_vertex(g);
    let mut s = DMatrix::<S>::zeros(nb, nb);
    for (v, cond) in g.conditions().iter().enumerate() {
        let d = cast::<S>(degrees[v] as f64);
        let t = match *cond {
            VertexCondition::Kirchhoff => cast::<S>(2.0) / d,
            VertexCondition::Robin(rho) if rho == S::zero() => cast::<S>(2.0) / d,
            VertexCondition::Dirichlet | VertexCondition::Robin(_) => S::zero(),
        };
        for &b_in in &in_bonds[v] {
            for &c in &in_bonds[v] {
                let b_out = c ^ 1;
                let mut val = t;
                if b_out == (b_in ^ 1) {
                    val -= S::one();
                }
                s[(b_out, b_in)] = val;
            }
        }
    }
    s
}

/// Directed bonds ending at each vertex; the reversal of bond `b` is `b ^ 1`.
fn in_bonds_by_vertex<S: EigenScalar>(g: &CompactMetricGraph<S>) -> Vec<Vec<usize>> {
    let mut in_bonds: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    for (e, &(u, v, _)) in g.edges().iter().enumerate() {
        in_bonds[v].push(2 * e);
        in_bonds[u].push(2 * e + 1);
    }
    in_bonds
}

/// Evolution operator `U(k) = D(k)·S(k)` at a positive `k`.
fn evolution<S: EigenScalar>(g: &CompactMetricGraph<S>, k: S) -> DMatrix<Complex<S>> {
    let nb = 2 * g.edge_count();
    let degrees = g.degrees();
    let in_bonds = in_bonds_by_vertex(g);
    let zero = Complex::new(S::zero(), S::zero());
    let mut s = DMatrix::<Complex<S>>::from_element(nb, nb, zero);
    for (v, cond) in g.conditions().iter().enumerate() {
        let d = cast::<S>(degrees[v] as f64);
        let t = match *cond {
            VertexCondition::Kirchhoff => Complex::new(cast::<S>(2.0) / d, S::zero()),
            VertexCondition::Dirichlet => zero,
            VertexCondition::Robin(rho) => {
                if rho == S::zero() {
                    Complex::new(cast::<S>(2.0) / d, S::zero())
                } else {
                    Complex::new(cast::<S>(2.0), S::zero()) / Complex::new(d, rho / k)
                }
            }
        };
        let one = Complex::new(S::one(), S::zero());
        for &b_in in &in_bonds[v] {
            for &c in &in_bonds[v] {
                let b_out = c ^ 1;
                let mut val = t;
                if b_out == (b_in ^ 1) {
                    val -= one;
                }
                s[(b_out, b_in)] = val;
            }
        }
    }
    // Bond phases: row b of U carries e^{ikℓ_b}.
    for (e, &(_, _, len)) in g.edges().iter().enumerate() {
        let kl = k * len;
        let phase = Complex::new(fcos(kl), fsin(kl));
        for b in [2 * e, 2 * e + 1] {
            for c in 0..nb {
                s[(b, c)] *= phase;
            }
        }
    }
    s
}

/// `C₀ = π·(B − dim ker(S₀ − I))`: the exact phase sum of the evolution
/// operator at `k → 0⁺`.
fn base_phase_sum<S: EigenScalar>(g: &CompactMetricGraph<S>) -> S {
    let s0 = scattering_limit(g);
    let nb = s0.nrows();
    let diff = &s0 - DMatrix::<S>::identity(nb, nb);
    let sv = diff.svd(false, false).singular_values;
    let kernel = sv.iter().filter(|&&x| fabs(x) < cast(KERNEL_TOL)).count();
    S::PI() * cast::<S>((nb - kernel) as f64)
}

/// Lifted phase gain of `det U` from `0⁺` to `k`: the bond part `2|Γ|k` plus
/// one `π − 2·atan(ρ/(dk))` per positive Robin vertex.
fn lift_gain<S: EigenScalar>(g: &CompactMetricGraph<S>, k: S) -> S {
    let two = cast::<S>(2.0);
    let mut gain = two * g.total_length() * k;
    let degrees = g.degrees();
    for (v, cond) in g.conditions().iter().enumerate() {
        if let VertexCondition::Robin(rho) = *cond {
            if rho > S::zero() {
                let d = cast::<S>(degrees[v] as f64);
                gain += S::PI() - two * fatan(rho / (d * k));
            }
        }
    }
    gain
}

enum Probe {
    Count(i64),
    /// Some eigenphase sits inside the guard band around `0`/`2π`: the probe
    /// is too close to a root to count reliably and must be moved.
    Ambiguous,
}

/// Exact number of eigenvalues `0 < λ ≤ k²`, or `Ambiguous` near a root.
fn probe_count<S: EigenScalar>(g: &CompactMetricGraph<S>, k: S, c0: S) -> Result<Probe> {
    let u = evolution(g, k);
    // A phase-extraction failure here is a shift-conditioning accident of
    // this particular k (the matrix is unitary by construction); nudging the
    // probe moves every phase and resolves it.
    let phases = match unitary_eigenphases(&u) {
        Ok(p) => p,
        Err(_) => return Ok(Probe::Ambiguous),
    };
    let two_pi = S::PI() + S::PI();
    let guard = cast::<S>(PHASE_GUARD);
    let mut sum = S::zero();
    for &theta in &phases {
        if theta < guard || two_pi - theta < guard {
            return Ok(Probe::Ambiguous);
        }
        sum += theta;
    }
    let x = (c0 + lift_gain(g, k) - sum) / two_pi;
    let n = fround(x);
    if fabs(x - n) > cast(COUNT_RESIDUAL_TOL) {
        return Ok(Probe::Ambiguous);
    }
    let n = n
        .to_i64()
        .ok_or_else(|| Error::numerical("eigenvalue count out of integer range"))?;
    if n < 0 {
        return Err(Error::numerical(format!(
            "negative eigenvalue count {n} at k = {k}: phase bookkeeping broken"
        )));
    }
    Ok(Probe::Count(n))
}

/// Runs [`probe_count`] at `k + offset·step` for each offset, staying inside
/// the open interval `(lo, hi)`; returns the first unambiguous probe.
fn count_nudged<S: EigenScalar>(
    g: &CompactMetricGraph<S>,
    c0: S,
    k: S,
    step: S,
    lo: S,
    hi: S,
    offsets: &[f64],
) -> Result<(S, i64)> {
    for &off in offsets {
        let kk = k + cast::<S>(off) * step;
        if kk <= lo || kk >= hi {
            continue;
        }
        if let Probe::Count(n) = probe_count(g, kk, c0)? {
            return Ok((kk, n));
        }
    }
    Err(Error::numerical(format!(
        "no unambiguous counting probe near k = {k}; eigenvalues closer than \
         the working precision surround it"
    )))
}

fn validate_graph_for_general<S: EigenScalar>(
    g: &CompactMetricGraph<S>,
    max_dim: usize,
) -> Result<()> {
    let nb = 2 * g.edge_count();
    if nb > max_dim {
        return Err(Error::dimension_cap(format!(
            "{nb} directed bonds exceed the configured cap {max_dim}"
        )));
    }
    for cond in g.conditions() {
        if let VertexCondition::Robin(rho) = *cond {
            if rho < S::zero() {
                return Err(Error::input(format!(
                    "negative Robin coefficient {rho} breaks the phase monotonicity \
                     of the general solver; use the chain solver or the \
                     finite-difference oracle for that regime"
                )));
            }
        }
    }
    Ok(())
}

/// Whether `λ = 0` (the constant function) is an eigenvalue: every condition
/// must be Kirchhoff or `Robin(0)`.
fn has_zero_mode<S: EigenScalar>(g: &CompactMetricGraph<S>) -> bool {
    g.conditions().iter().all(|cond| match *cond {
        VertexCondition::Kirchhoff => true,
        VertexCondition::Robin(rho) => rho == S::zero(),
        VertexCondition::Dirichlet => false,
    })
}

/// Complete spectrum `λ ≤ k_max²` of a compact metric graph with Kirchhoff,
/// Dirichlet, and non-negative Robin conditions.
///
/// Counting is exact (see the module docs), so the returned [`Spectrum`]
/// satisfies its completeness invariant by construction; the λ = 0 constant
/// mode is added by rule on graphs with only natural conditions.
///
/// # Errors
///
/// `DimensionCap` beyond `opts.max_dim` directed bonds; `Input` for negative
/// Robin coefficients; `GridTooCoarse` when an explicit `k_step` could let an
/// eigenphase advance by `π` between samples; `Numerical` when probes cannot
/// be disambiguated.
pub fn metric_spectrum_general<S: EigenScalar>(
    g: &CompactMetricGraph<S>,
    opts: &SolveOptions<S>,
) -> Result<Spectrum<S>> {
    opts.validate()?;
    validate_graph_for_general(g, opts.max_dim)?;
    if let Some(step) = opts.k_step {
        // A-priori scan check: bond phases move at speed ≤ ℓ_max (Robin
        // corrections only add at isolated vertices and are covered by the
        // exact counting itself).
        if step * g.max_edge_length() >= S::PI() {
            return Err(Error::grid_too_coarse(format!(
                "k_step {step} times the longest edge {} reaches π: eigenphases \
                 could advance a full branch between samples",
                g.max_edge_length()
            )));
        }
    }

    let c0 = base_phase_sum(g);
    let ell_min = g.min_edge_length();
    let stop = fmax(opts.tol, cast::<S>(4e-11) / ell_min);
    let nudge = fmax(stop / cast(5.0), cast::<S>(1e-12) * (S::one() + opts.k_max));
    let huge = cast::<S>(f64::MAX);

    // Top probe: only upward nudges, so completeness up to k_max is kept.
    let top_start = opts.k_max * (S::one() + cast(1e-12)) + cast(1e-12);
    let (k_top, n_top) = count_nudged(
        g,
        c0,
        top_start,
        nudge,
        S::zero(),
        huge,
        &[0.0, 1.0, 2.0, 3.0, 4.0, 6.0],
    )?;

    // Seed cells: a single span by default; explicit k_step slices it first.
    let mut walls: Vec<(S, i64)> = vec![(S::zero(), 0)];
    if let Some(step) = opts.k_step {
        let mut j = 1usize;
        loop {
            let kw = step * cast::<S>(j as f64);
            if kw >= k_top - step * cast(0.5) {
                break;
            }
            let lo = walls.last().expect("seeded").0;
            let (kw, nw) = count_nudged(
                g,
                c0,
                kw,
                nudge,
                lo,
                k_top,
                &[0.0, 1.0, -1.0, 2.0, -2.0, 3.0, -3.0],
            )?;
            walls.push((kw, nw));
            j += 1;
            if j > 4_000_000 {
                return Err(Error::numerical("runaway k_step seeding"));
            }
        }
    }
    walls.push((k_top, n_top));

    let mut roots: Vec<(S, usize)> = Vec::new();
    let mut stack: Vec<(S, i64, S, i64)> = walls
        .windows(2)
        .map(|w| (w[0].0, w[0].1, w[1].0, w[1].1))
        .collect();
    while let Some((ka, na, kb, nb)) = stack.pop() {
        if nb == na {
            continue;
        }
        if nb < na {
            return Err(Error::numerical(format!(
                "eigenvalue count decreased from {na} to {nb} between k = {ka} and {kb}"
            )));
        }
        if kb - ka <= stop {
            let mid = (ka + kb) * cast(0.5);
            roots.push((mid * mid, (nb - na) as usize));
            continue;
        }
        let mid = (ka + kb) * cast(0.5);
        let (km, nm) = count_nudged(
            g,
            c0,
            mid,
            nudge,
            ka,
            kb,
            &[0.0, 1.0, -1.0, 2.0, -2.0, 3.0, -3.0],
        )?;
        stack.push((ka, na, km, nm));
        stack.push((km, nm, kb, nb));
    }

    roots.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite roots"));
    let located: usize = roots.iter().map(|&(_, m)| m).sum();
    if located as i64 != n_top {
        return Err(Error::numerical(format!(
            "located {located} roots but the winding count says {n_top}"
        )));
    }
    if has_zero_mode(g) {
        roots.insert(0, (S::zero(), 1));
    }
    Spectrum::from_raw(roots, opts.k_max, cast(MERGE_K))
}

/// Smallest singular value of `I − U(k)`: the factor of the secular
/// determinant that vanishes at eigenvalues.  Since `I − U` is normal this is
/// `min_j 2·|sin(θ_j/2)|` over the eigenphases.
///
/// # Errors
///
/// `Input` for non-positive `k` or negative Robin coefficients.
pub fn secular_residual<S: EigenScalar>(g: &CompactMetricGraph<S>, k: S) -> Result<S> {
    if !num_traits::Float::is_finite(k) || k <= S::zero() {
        return Err(Error::input(format!(
            "secular residual needs k > 0, got {k}"
        )));
    }
    validate_graph_for_general(g, usize::MAX)?;
    let phases = unitary_eigenphases(&evolution(g, k))?;
    let half = cast::<S>(0.5);
    let mut best = cast::<S>(2.0);
    for &theta in &phases {
        let factor = cast::<S>(2.0) * fabs(fsin(theta * half));
        if factor < best {
            best = factor;
        }
    }
    Ok(best)
}

/// `k` values of the decoration's spectrum with a Dirichlet condition at the
/// base and natural conditions elsewhere — the excluded energies of pendant
/// elimination and nodal analysis.  Multiplicities are expanded into repeats;
/// the list is ascending.
///
/// # Errors
///
/// Solver errors propagated from [`metric_spectrum_general`].
pub fn dirichlet_decoration_energies<S: EigenScalar>(
    dec: &Decoration<S>,
    k_max: S,
) -> Result<Vec<S>> {
    if dec.is_single_vertex() {
        return Ok(Vec::new());
    }
    let simple = dec.simplified();
    let mut conditions = vec![VertexCondition::Kirchhoff; simple.vertex_count()];
    conditions[simple.base()] = VertexCondition::Dirichlet;
    let g = CompactMetricGraph::new(conditions, simple.edges().to_vec())?;
    let spec = metric_spectrum_general(&g, &SolveOptions::new(k_max))?;
    let mut ks = Vec::new();
    for &(lambda, mult) in spec.eigenvalues() {
        for _ in 0..mult {
            ks.push(fsqrt(lambda));
        }
    }
    Ok(ks)
}
