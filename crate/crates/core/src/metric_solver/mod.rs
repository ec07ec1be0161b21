//! Eigenvalue computation for compact metric graphs.
//!
//! Two solvers cover complementary regimes:
//!
//! * [`metric_spectrum_general`] works on arbitrary compact graphs with
//!   Kirchhoff, Dirichlet, and non-negative Robin conditions.  It counts
//!   eigenvalues below any threshold exactly by summing the eigenphases of the
//!   directed-bond evolution operator, so no root is ever missed and
//!   multiplicities come out as honest integer cell counts.
//! * [`comb_spectrum_fast`] is specialized to chain graphs whose sites carry
//!   pendant edges ("teeth").  The pendants are eliminated into
//!   energy-dependent vertex couplings and eigenvalues are located by an exact
//!   oscillation count along the chain, which scales linearly in the chain
//!   length and handles the pendant resonance energies — where the coupling
//!   has a pole — by an explicit eigenfunction construction.
//!
//! Supporting operations: [`tooth_robin`] (the pendant coupling itself),
//! [`decoration_m_function`] (its generalization to arbitrary decorations),
//! [`half_line_solution_data`] (boundary data of the decaying solution on a
//! half-infinite chain), [`fd_oracle`] (an independent finite-difference
//! verification solver), and [`dirichlet_decoration_energies`] (the excluded
//! energies at which pendant elimination breaks down).

mod bonds;
mod chain;
mod dtn;
mod fd;
mod halfline;

pub use bonds::{
    bond_scattering_matrix, dirichlet_decoration_energies, metric_spectrum_general,
    secular_residual,
};
pub use chain::{ChainProblem, EndCondition, SiteCoupling};
pub(crate) use dtn::edge_coefficients;
pub use dtn::decoration_m_function;
pub use fd::{fd_count_below, fd_oracle};
pub use halfline::half_line_solution_data;

use crate::error::{Error, Result};
use crate::graphs::{build_metric_truncation, BoundaryCondition, ModelSpec};
use crate::scalar::{cast, EigenScalar, Scalar};
use crate::words::Word;
use serde::Serialize;

/// Truncated spectrum of a self-adjoint metric-graph Laplacian.
///
/// Holds every eigenvalue `λ ≤ k_max²` as a strictly increasing list of
/// `(λ, multiplicity)` pairs.  Negative eigenvalues (possible with negative
/// Robin coefficients) are included; `k_max` only bounds the list from above.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum<S> {
    eigenvalues: Vec<(S, usize)>,
    k_max: S,
}

impl<S: Scalar> Spectrum<S> {
    /// Wraps a finished eigenvalue list, validating its invariants.
    pub fn new(eigenvalues: Vec<(S, usize)>, k_max: S) -> Result<Self> {
        if !k_max.is_finite() || k_max <= S::zero() {
            return Err(Error::input(format!(
                "spectrum bound k_max must be positive and finite, got {k_max}"
            )));
        }
        let cap = k_max * k_max * (S::one() + cast::<S>(1e-9));
        for (i, &(lambda, mult)) in eigenvalues.iter().enumerate() {
            if !lambda.is_finite() {
                return Err(Error::numerical("non-finite eigenvalue in spectrum"));
            }
            if mult == 0 {
                return Err(Error::input(format!(
                    "eigenvalue {lambda} carries multiplicity zero"
                )));
            }
            if lambda > cap {
                return Err(Error::input(format!(
                    "eigenvalue {lambda} exceeds the completeness bound k_max² = {cap}"
                )));
            }
            if i > 0 && eigenvalues[i - 1].0 >= lambda {
                return Err(Error::input(
                    "spectrum eigenvalues must be strictly increasing",
                ));
            }
        }
        Ok(Spectrum { eigenvalues, k_max })
    }

    /// Eigenvalues as strictly increasing `(λ, multiplicity)` pairs.
    pub fn eigenvalues(&self) -> &[(S, usize)] {
        &self.eigenvalues
    }

    /// Completeness bound: the list contains every eigenvalue `λ ≤ k_max²`.
    pub fn k_max(&self) -> S {
        self.k_max
    }

    /// Number of eigenvalues `≤ energy`, counted with multiplicity.
    pub fn count_leq(&self, energy: S) -> usize {
        self.eigenvalues
            .iter()
            .take_while(|&&(lambda, _)| lambda <= energy)
            .map(|&(_, mult)| mult)
            .sum()
    }

    /// Total number of listed eigenvalues, counted with multiplicity.
    pub fn total_count(&self) -> usize {
        self.eigenvalues.iter().map(|&(_, mult)| mult).sum()
    }

    /// The `n`-th eigenvalue (1-based, counted with multiplicity).
    pub fn nth(&self, n: usize) -> Option<S> {
        if n == 0 {
            return None;
        }
        let mut seen = 0usize;
        for &(lambda, mult) in &self.eigenvalues {
            seen += mult;
            if seen >= n {
                return Some(lambda);
            }
        }
        None
    }

    /// CSV dump with header `lambda,multiplicity`.
    pub fn csv(&self) -> String {
        let mut out = String::from("lambda,multiplicity\n");
        for &(lambda, mult) in &self.eigenvalues {
            out.push_str(&format!("{lambda:.12e},{mult}\n"));
        }
        out
    }

    /// Merges a sorted list of located roots `(λ, mult)` into a spectrum,
    /// combining entries closer than `k_merge` in `k = sign(λ)·√|λ|`.
    pub(crate) fn from_raw(raw: Vec<(S, usize)>, k_max: S, k_merge: S) -> Result<Self> {
        let mut merged: Vec<(S, usize)> = Vec::with_capacity(raw.len());
        for (lambda, mult) in raw {
            match merged.last_mut() {
                Some(&mut (prev, ref mut m)) if (signed_k(lambda) - signed_k(prev)).abs() <= k_merge => {
                    *m += mult;
                }
                _ => merged.push((lambda, mult)),
            }
        }
        Spectrum::new(merged, k_max)
    }
}

/// `sign(λ)·√|λ|`, the monotone coordinate used for root merging.
pub(crate) fn signed_k<S: Scalar>(lambda: S) -> S {
    if lambda >= S::zero() {
        lambda.sqrt()
    } else {
        -(-lambda).sqrt()
    }
}

/// Options shared by the metric-spectrum solvers.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolveOptions<S> {
    /// Upper bound of the search window in `k`; all `λ ≤ k_max²` are found.
    pub k_max: S,
    /// Initial scan granularity of the general solver.  `None` selects
    /// `π / (8 · total length)`.
    pub k_step: Option<S>,
    /// Root localization tolerance in `k`.
    pub tol: S,
    /// Size cap (number of directed bonds) for the general solver.
    pub max_dim: usize,
}

impl<S: Scalar> SolveOptions<S> {
    /// Defaults for a given search bound: automatic `k_step`, `tol = 1e-10`,
    /// `max_dim = 200`.
    pub fn new(k_max: S) -> Self {
        SolveOptions {
            k_max,
            k_step: None,
            tol: cast(1e-10),
            max_dim: 200,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !self.k_max.is_finite() || self.k_max <= S::zero() {
            return Err(Error::input(format!(
                "k_max must be positive and finite, got {}",
                self.k_max
            )));
        }
        if let Some(step) = self.k_step {
            if !step.is_finite() || step <= S::zero() {
                return Err(Error::input(format!(
                    "k_step must be positive and finite, got {step}"
                )));
            }
        }
        if !self.tol.is_finite() || self.tol <= S::zero() {
            return Err(Error::input(format!(
                "tol must be positive and finite, got {}",
                self.tol
            )));
        }
        if self.max_dim == 0 {
            return Err(Error::input("max_dim must be positive"));
        }
        Ok(())
    }
}

/// Robin coefficient induced at the base of a pendant edge of length `ell`
/// with a free tip: `m(k) = k·tan(kℓ)` for energy `E = k²`.
///
/// The unique pendant solution with value 1 at the base has outgoing base
/// derivative `m(k)`; eliminating the pendant replaces it by this coefficient.
/// Energies with `cos(kℓ) ≈ 0` are the pendant's own Dirichlet eigenvalues,
/// where no such solution exists.
///
/// # Errors
///
/// `ExcludedEnergy` ("Dirichlet tooth energy") when `|cos(kℓ)| < tol`.
pub fn tooth_robin<S: Scalar>(k: S, ell: S) -> Result<S> {
    tooth_robin_tol(k, ell, cast(1e-12))
}

/// [`tooth_robin`] with an explicit exclusion tolerance on `cos(kℓ)`.
pub fn tooth_robin_tol<S: Scalar>(k: S, ell: S, tol: S) -> Result<S> {
    if !k.is_finite() || !ell.is_finite() || ell <= S::zero() {
        return Err(Error::input(format!(
            "tooth coupling needs finite k and positive length, got k={k}, ell={ell}"
        )));
    }
    let c = (k * ell).cos();
    if c.abs() < tol {
        return Err(Error::excluded_energy(format!(
            "Dirichlet tooth energy: cos(kℓ) = {c:.3e} at k = {k}"
        )));
    }
    Ok(k * (k * ell).tan())
}

/// Energy-dependent pendant coupling over the whole real energy axis:
/// `k·tan(kℓ)` for `E = k² > 0`, `−κ·tanh(κℓ)` for `E = −κ² < 0`, and the
/// limit `0` at `E = 0`.
pub(crate) fn tooth_coupling_energy<S: Scalar>(energy: S, ell: S, tol: S) -> Result<S> {
    if energy > S::zero() {
        tooth_robin_tol(energy.sqrt(), ell, tol)
    } else if energy < S::zero() {
        let kappa = (-energy).sqrt();
        Ok(-kappa * (kappa * ell).tanh())
    } else {
        Ok(S::zero())
    }
}

/// Spectrum of a chain truncation whose letters map to a pendant of length
/// `ell` (letter 1) or a bare vertex (letter 0), with spacing `L` and the
/// given condition at both chain ends.
///
/// Equivalent to running [`metric_spectrum_general`] on
/// [`crate::graphs::build_metric_truncation`] of the comb model, but linear in
/// the chain length: pendants are eliminated into [`tooth_robin`] couplings
/// and roots are located by exact oscillation counts.  Pendant resonance
/// energies `((j+½)π/ℓ)²`, where the coupling has a pole, are reinstated with
/// the multiplicity of their explicit compactly-supported eigenfunctions.
///
/// # Errors
///
/// `Input` for degenerate words (a single bare letter yields an edge-free
/// graph) or invalid geometry; `GridTooCoarse` propagated from option
/// validation.
pub fn comb_spectrum_fast<S: Scalar>(
    spacing: S,
    ell: S,
    word: &Word,
    boundary: BoundaryCondition,
    opts: &SolveOptions<S>,
) -> Result<Spectrum<S>> {
    opts.validate()?;
    if !spacing.is_finite() || spacing <= S::zero() {
        return Err(Error::input(format!(
            "chain spacing must be positive, got {spacing}"
        )));
    }
    if !ell.is_finite() || ell <= S::zero() {
        return Err(Error::input(format!(
            "tooth length must be positive, got {ell}"
        )));
    }
    let letters = word.letters();
    if let Some(&bad) = letters.iter().find(|&&a| a > 1) {
        return Err(Error::input(format!(
            "comb words use letters 0 and 1 only, found {bad}"
        )));
    }
    let problem = comb_chain_problem(spacing, ell, letters, boundary)?;
    problem.spectrum(opts)
}

/// Chain-problem encoding of a comb truncation; shared by the fast solver and
/// the counting-identity checks.
pub fn comb_chain_problem<S: Scalar>(
    spacing: S,
    ell: S,
    letters: &[u8],
    boundary: BoundaryCondition,
) -> Result<ChainProblem<S>> {
    let end = match boundary {
        BoundaryCondition::Free => EndCondition::Robin(S::zero()),
        BoundaryCondition::Dirichlet => EndCondition::Dirichlet,
    };
    if letters.is_empty() {
        return Err(Error::input("empty word"));
    }
    if letters.len() == 1 {
        // A single decorated site is the pendant interval itself: base at the
        // chain end, free tip.  A single bare site has no edges at all.
        if letters[0] == 0 {
            return Err(Error::input(
                "degenerate truncation: a single bare site has no edges",
            ));
        }
        return ChainProblem::new(
            vec![ell],
            vec![SiteCoupling::Free, SiteCoupling::Free],
            end,
            EndCondition::Robin(S::zero()),
        );
    }
    let segments = vec![spacing; letters.len() - 1];
    let couplings = letters
        .iter()
        .map(|&a| {
            if a == 1 {
                SiteCoupling::Tooth(ell)
            } else {
                SiteCoupling::Free
            }
        })
        .collect();
    ChainProblem::new(segments, couplings, end, end)
}

/// Spectrum of the metric truncation of `model` along `word`, dispatched to
/// the fastest applicable solver.
///
/// The two-letter comb form (letter 0 bare, letter 1 a pendant) goes through
/// [`comb_spectrum_fast`]; every other model is assembled with
/// [`build_metric_truncation`] and solved by [`metric_spectrum_general`].
/// Both paths find every eigenvalue `λ ≤ k_max²` with exact multiplicities,
/// so the dispatch is invisible apart from running time and the general
/// path's dimension cap.
pub fn spectrum_of_truncation<S: EigenScalar>(
    model: &ModelSpec<S>,
    word: &Word,
    boundary: BoundaryCondition,
    opts: &SolveOptions<S>,
) -> Result<Spectrum<S>> {
    if let Some(ell) = comb_form(model) {
        return comb_spectrum_fast(model.spacing(), ell, word, boundary, opts);
    }
    let graph = build_metric_truncation(model, word, boundary)?;
    metric_spectrum_general(&graph, opts)
}

/// `Some(tooth length)` when the model is exactly the two-letter comb the
/// fast chain solver understands: letter 0 a bare vertex, letter 1 a pendant.
fn comb_form<S: Scalar>(model: &ModelSpec<S>) -> Option<S> {
    let decs = model.decorations();
    if decs.len() != 2 || !decs[0].is_single_vertex() {
        return None;
    }
    decs[1].pendant_length()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tooth_robin_matches_tangent() {
        let k = std::f64::consts::FRAC_PI_4;
        let m = tooth_robin(k, 1.0).unwrap();
        assert!((m - k).abs() < 1e-12, "tan(π/4) = 1 should give m = k");
    }

    #[test]
    fn tooth_robin_small_k_limit() {
        let m = tooth_robin::<f64>(1e-6, 2.0).unwrap();
        assert!((m - 2e-12).abs() < 1e-18, "m ≈ k²ℓ for small k, got {m}");
    }

    #[test]
    fn tooth_robin_rejects_pendant_dirichlet_energy() {
        let err = tooth_robin(std::f64::consts::FRAC_PI_2, 1.0).unwrap_err();
        assert!(err.to_string().contains("tooth"), "got: {err}");
    }

    #[test]
    fn spectrum_validates_ordering() {
        assert!(Spectrum::new(vec![(1.0, 1), (1.0, 1)], 10.0).is_err());
        assert!(Spectrum::new(vec![(1.0, 0)], 10.0).is_err());
        assert!(Spectrum::new(vec![(200.0, 1)], 10.0).is_err());
        let s = Spectrum::new(vec![(0.0, 1), (1.0, 2)], 10.0).unwrap();
        assert_eq!(s.count_leq(0.5), 1);
        assert_eq!(s.count_leq(1.0), 3);
        assert_eq!(s.nth(2), Some(1.0));
        assert_eq!(s.nth(4), None);
    }

    #[test]
    fn negative_energy_tooth_coupling_is_monotone_bounded() {
        // −κ·tanh(κℓ) lies in (−κ, 0) and tends to −κ for long pendants.
        let m = tooth_coupling_energy::<f64>(-4.0, 50.0, 1e-12).unwrap();
        assert!((m - (-2.0)).abs() < 1e-12);
        assert_eq!(tooth_coupling_energy::<f64>(0.0, 1.0, 1e-12).unwrap(), 0.0);
    }
}
