//! Normalized-Laplacian spectra of discrete decorated chains, and the exact
//! spectral correspondence with their unit-equilateral metric counterparts.
//!
//! The discrete side of a decorated chain is the combinatorial graph with
//! one vertex per metric vertex and one edge per metric edge, carrying the
//! normalized Laplacian `Δ = I − D^{−1/2} A D^{−1/2}` with spectrum in
//! `[0, 2]`.  When every metric edge has length 1, a metric eigenvalue
//! `λ = k²` with `sin k ≠ 0` corresponds to the discrete eigenvalue
//! `μ = 1 − cos k`: the two eigenfunctions agree at vertices.
//! [`metric_spectrum_via_correspondence`] inverts this correspondence — it
//! rebuilds the full metric spectrum from the discrete one, reinstating the
//! vertex-vanishing eigenvalues at `k ∈ πℤ` from the eigenvalue count
//! `#{λ ≤ (πm)²} = |E|·m + M` of a graph with `|E|` edges, where `M` is the
//! multiplicity of the discrete endpoint eigenvalue reached at `k = πm`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{build_discrete_truncation, BoundaryCondition, DiscreteGraph, ModelSpec};
use crate::labels::{truncation_word, validate_sizes, IDSCurve};
use crate::metric_solver::Spectrum;
use crate::scalar::{cast, cast_usize, EigenScalar, Scalar};
use crate::words::{SturmianParameters, Word};

/// Width within which raw eigenvalues merge into one multiplicity group.
const MERGE_MU: f64 = 1e-9;
/// Allowed overshoot of the `[0, 2]` normalized-Laplacian range before the
/// eigensolve is declared broken.
const RANGE_TOL: f64 = 1e-9;
/// Distance below which a merged group counts as the endpoint `μ = 0` or
/// `μ = 2` in the correspondence.
const END_TOL: f64 = 1e-9;
/// Default symmetry tolerance for [`symmetric_eigenvalues`].
const SYMMETRY_TOL: f64 = 1e-10;
/// Vertex-count cap of the dense discrete eigensolve.
const MAX_VERTICES: usize = 4000;

/// Spectrum of a normalized graph Laplacian: increasing eigenvalues in
/// `[0, 2]` with integer multiplicities.
#[derive(Debug, Clone, Serialize)]
pub struct DiscreteSpectrum<S> {
    eigenvalues: Vec<(S, usize)>,
}

impl<S: Scalar> DiscreteSpectrum<S> {
    /// Wraps a finished `(μ, multiplicity)` list, validating its invariants.
    pub fn new(eigenvalues: Vec<(S, usize)>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::input("discrete spectrum must be non-empty"));
        }
        for &(mu, mult) in &eigenvalues {
            if mult == 0 {
                return Err(Error::input("eigenvalue multiplicities must be positive"));
            }
            if !mu.is_finite() || mu < -cast::<S>(RANGE_TOL) || mu > cast::<S>(2.0 + RANGE_TOL) {
                return Err(Error::input(format!(
                    "normalized-Laplacian eigenvalue {mu} outside [0, 2]"
                )));
            }
        }
        for w in eigenvalues.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::input(format!(
                    "discrete eigenvalues must increase strictly, got {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        Ok(DiscreteSpectrum { eigenvalues })
    }

    /// Builds the spectrum from raw solver output: sorts, merges values
    /// within [`MERGE_MU`] into multiplicity groups at their mean, and clamps
    /// the result into `[0, 2]`.
    ///
    /// # Errors
    ///
    /// `Numerical` when a raw value lies outside `[0, 2]` by more than
    /// [`RANGE_TOL`] — normalized-Laplacian output must not.
    pub fn from_raw(mut raw: Vec<S>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::input("discrete spectrum must be non-empty"));
        }
        for &mu in &raw {
            if !mu.is_finite() || mu < -cast::<S>(RANGE_TOL) || mu > cast::<S>(2.0 + RANGE_TOL) {
                return Err(Error::numerical(format!(
                    "normalized-Laplacian eigenvalue {mu} outside [0, 2]"
                )));
            }
        }
        raw.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        let mut eigenvalues: Vec<(S, usize)> = Vec::new();
        let mut group_start = 0usize;
        for i in 1..=raw.len() {
            let closes = i == raw.len() || raw[i] - raw[i - 1] > cast::<S>(MERGE_MU);
            if closes {
                let group = &raw[group_start..i];
                let sum = group.iter().fold(S::zero(), |acc, &x| acc + x);
                let mean = sum / cast_usize::<S>(group.len());
                let clamped = mean.max(S::zero()).min(cast::<S>(2.0));
                eigenvalues.push((clamped, group.len()));
                group_start = i;
            }
        }
        DiscreteSpectrum::new(eigenvalues)
    }

    pub fn eigenvalues(&self) -> &[(S, usize)] {
        &self.eigenvalues
    }

    pub fn total_count(&self) -> usize {
        self.eigenvalues.iter().map(|&(_, m)| m).sum()
    }

    /// Number of eigenvalues `μ ≤ level`, with multiplicity.
    pub fn count_leq(&self, level: S) -> usize {
        self.eigenvalues
            .iter()
            .take_while(|&&(mu, _)| mu <= level)
            .map(|&(_, m)| m)
            .sum()
    }

    /// Total multiplicity within `tol` of `mu`.
    pub fn multiplicity_near(&self, mu: S, tol: S) -> usize {
        self.eigenvalues
            .iter()
            .filter(|&&(x, _)| (x - mu).abs() <= tol)
            .map(|&(_, m)| m)
            .sum()
    }

    /// CSV dump `mu,multiplicity` with one row per distinct eigenvalue.
    pub fn csv(&self) -> String {
        let mut out = String::from("mu,multiplicity\n");
        for &(mu, mult) in &self.eigenvalues {
            out.push_str(&format!("{mu:.12e},{mult}\n"));
        }
        out
    }
}

/// Eigenvalues of a dense symmetric matrix in increasing order.
///
/// Validates squareness and symmetry (`|A − Aᵀ|` entrywise at most `tol`)
/// before handing the matrix to the symmetric eigensolver, so silent
/// symmetrization can never hide an assembly bug.
pub fn symmetric_eigenvalues<S: EigenScalar>(matrix: &DMatrix<S>, tol: S) -> Result<Vec<S>> {
    if matrix.nrows() != matrix.ncols() {
        return Err(Error::input(format!(
            "eigensolve needs a square matrix, got {}×{}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    if matrix.nrows() == 0 {
        return Err(Error::input("eigensolve needs a non-empty matrix"));
    }
    if !num_traits::Float::is_finite(tol) || tol < S::zero() {
        return Err(Error::input(format!(
            "symmetry tolerance must be non-negative, got {tol}"
        )));
    }
    for i in 0..matrix.nrows() {
        for j in (i + 1)..matrix.ncols() {
            let gap = num_traits::Float::abs(matrix[(i, j)] - matrix[(j, i)]);
            if !(gap <= tol) {
                return Err(Error::input(format!(
                    "matrix asymmetric at ({i},{j}): |a_ij − a_ji| = {gap}"
                )));
            }
        }
    }
    if matrix.nrows() > MAX_VERTICES {
        return Err(Error::dimension_cap(format!(
            "dense eigensolve capped at {MAX_VERTICES} rows, got {}",
            matrix.nrows()
        )));
    }
    let eigen = matrix.clone().symmetric_eigenvalues();
    let mut out: Vec<S> = eigen.iter().copied().collect();
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(out)
}

/// Normalized-Laplacian spectrum of a discrete graph.
pub fn discrete_graph_spectrum<S: EigenScalar>(graph: &DiscreteGraph) -> Result<DiscreteSpectrum<S>> {
    let matrix = graph.normalized_laplacian_matrix::<S>();
    let raw = symmetric_eigenvalues(&matrix, cast(SYMMETRY_TOL))?;
    DiscreteSpectrum::from_raw(raw)
}

/// Normalized-Laplacian spectrum of the discrete truncation of `model`
/// along `word`.
pub fn discrete_spectrum<S: EigenScalar>(
    model: &ModelSpec<S>,
    word: &Word,
) -> Result<DiscreteSpectrum<S>> {
    let graph = build_discrete_truncation(model, word)?;
    discrete_graph_spectrum(&graph)
}

/// The `k`-value on dispersion branch `m` of a discrete eigenvalue `μ`:
/// `k = πm + arccos(1−μ)` for even `m` and `k = π(m+1) − arccos(1−μ)` for
/// odd `m`, so `1 − cos k = μ` and `k` sweeps `[πm, π(m+1)]` as `μ` runs
/// over `[0, 2]` (forwards on even branches, backwards on odd ones).
pub fn dispersion_k<S: Scalar>(mu: S, m: u64) -> Result<S> {
    if !mu.is_finite() || mu < -cast::<S>(RANGE_TOL) || mu > cast::<S>(2.0 + RANGE_TOL) {
        return Err(Error::input(format!(
            "dispersion needs μ in [0, 2], got {mu}"
        )));
    }
    let c = (S::one() - mu).max(-S::one()).min(S::one());
    let arc = c.acos();
    let base = S::PI() * cast::<S>(m as f64);
    if m % 2 == 0 {
        Ok(base + arc)
    } else {
        Ok(base + S::PI() - arc)
    }
}

/// Rebuilds the metric spectrum of a unit-equilateral graph from its
/// discrete spectrum, up to `λ ≤ k_max²`.
///
/// Interior eigenvalues (`0 < μ < 2`) map through [`dispersion_k`] branch by
/// branch with their multiplicities.  At each branch point `k = πm` the
/// cumulative count must reach `|E|·m + M`, with `M` the multiplicity of the
/// discrete endpoint eigenvalue reached there (`μ = 0` for even `m`, `μ = 2`
/// for odd `m`); the deficit is inserted as the multiplicity of the metric
/// eigenvalue `(πm)²`, whose eigenfunctions vanish at vertices and are
/// invisible to the discrete graph.
///
/// # Errors
///
/// `Input` when the spectrum is not that of a connected graph (multiplicity
/// of `μ = 0` different from 1, or of `μ = 2` above 1); `Numerical` when the
/// cumulative count ever exceeds the branch-point total — the discrete
/// spectrum and `edge_count` are then inconsistent.
pub fn metric_spectrum_via_correspondence<S: Scalar>(
    ds: &DiscreteSpectrum<S>,
    edge_count: usize,
    k_max: S,
) -> Result<Spectrum<S>> {
    if edge_count == 0 {
        return Err(Error::input("correspondence needs at least one edge"));
    }
    if !k_max.is_finite() || k_max <= S::zero() {
        return Err(Error::input(format!(
            "k_max must be positive and finite, got {k_max}"
        )));
    }
    let end_tol = cast::<S>(END_TOL);
    let mult_zero = ds.multiplicity_near(S::zero(), end_tol);
    let mult_two = ds.multiplicity_near(cast::<S>(2.0), end_tol);
    if mult_zero != 1 {
        return Err(Error::input(format!(
            "correspondence needs a connected graph: multiplicity of μ=0 is {mult_zero}"
        )));
    }
    if mult_two > 1 {
        return Err(Error::input(format!(
            "correspondence needs a connected graph: multiplicity of μ=2 is {mult_two}"
        )));
    }
    let interior: Vec<(S, usize)> = ds
        .eigenvalues()
        .iter()
        .copied()
        .filter(|&(mu, _)| mu > end_tol && mu < cast::<S>(2.0) - end_tol)
        .collect();

    let ktol = cast::<S>(1e-12) * (S::one() + k_max);
    let mut eigenvalues: Vec<(S, usize)> = Vec::new();
    let mut cumulative = 0usize;
    let mut m = 0u64;
    loop {
        let base = S::PI() * cast::<S>(m as f64);
        if base > k_max + ktol {
            break;
        }
        let endpoint_mult = if m % 2 == 0 { mult_zero } else { mult_two };
        let target = edge_count * (m as usize) + endpoint_mult;
        if cumulative > target {
            return Err(Error::numerical(format!(
                "eigenvalue count regressed at k = {m}π: {cumulative} > {target}; \
                 discrete spectrum and edge count are inconsistent"
            )));
        }
        let insert = target - cumulative;
        if insert > 0 {
            eigenvalues.push((base * base, insert));
        }
        cumulative = target;

        let mut branch: Vec<(S, usize)> = Vec::with_capacity(interior.len());
        for &(mu, mult) in &interior {
            branch.push((dispersion_k(mu, m)?, mult));
        }
        if m % 2 == 1 {
            branch.reverse();
        }
        for (k, mult) in branch {
            if k <= k_max + ktol {
                eigenvalues.push((k * k, mult));
                cumulative += mult;
            }
        }
        m += 1;
    }
    Spectrum::new(eigenvalues, k_max)
}

/// IDS curves of discrete truncations, one per requested size, normalized
/// by vertex count.  Size `n` means `n` unit cells (word sites `0..=n`).
pub fn discrete_ids<S: EigenScalar>(
    model: &ModelSpec<S>,
    params: &SturmianParameters<S>,
    sizes: &[usize],
) -> Result<Vec<IDSCurve<S>>> {
    discrete_ids_boundary(model, params, sizes, BoundaryCondition::Free)
}

/// [`discrete_ids`] with an explicit cut condition: the Dirichlet variant
/// removes the two chain-end vertices and renormalizes by the reduced
/// vertex count, mirroring the metric Dirichlet cut.
///
/// Decoration vertices at an end site lose their base when the end vertex
/// goes; whatever they formed disconnects from the chain and is dropped
/// with it (the normalized Laplacian has no row for a stranded vertex).
/// The variant therefore differs from the free truncation by a perturbation
/// of rank bounded by twice the largest decoration — exactly the property
/// [`crate::labels::detect_gaps`] relies on.
pub fn discrete_ids_boundary<S: EigenScalar>(
    model: &ModelSpec<S>,
    params: &SturmianParameters<S>,
    sizes: &[usize],
    boundary: BoundaryCondition,
) -> Result<Vec<IDSCurve<S>>> {
    validate_sizes(sizes)?;
    let mut curves = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let word = truncation_word(params, n)?;
        let mut graph = build_discrete_truncation(model, &word)?;
        if boundary == BoundaryCondition::Dirichlet {
            graph = dirichlet_variant(&graph)?;
        }
        let spectrum = discrete_graph_spectrum::<S>(&graph)?;
        curves.push(IDSCurve::from_multiplicities(
            spectrum.eigenvalues(),
            cast_usize::<S>(graph.vertex_count()),
            n,
        )?);
    }
    Ok(curves)
}

/// The graph with its two chain-end vertices removed, restricted to the
/// component still containing the interior chain.
fn dirichlet_variant(graph: &DiscreteGraph) -> Result<DiscreteGraph> {
    let (lo, hi) = graph
        .chain_ends()
        .ok_or_else(|| Error::input("truncation has no chain sites"))?;
    if graph.chain_sites() < 3 {
        return Err(Error::input(format!(
            "Dirichlet variant needs at least 3 chain sites, got {}",
            graph.chain_sites()
        )));
    }
    let n = graph.vertex_count();
    let mut reachable = vec![false; n];
    // Chain vertices come first, so `lo + 1` is the interior site next to
    // the removed end.
    let mut stack = vec![lo + 1];
    reachable[lo + 1] = true;
    while let Some(v) = stack.pop() {
        for &w in &graph.adjacency()[v] {
            if w != lo && w != hi && !reachable[w] {
                reachable[w] = true;
                stack.push(w);
            }
        }
    }
    let removed: Vec<usize> = (0..n).filter(|&v| !reachable[v]).collect();
    graph.without_vertices(&removed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Decoration;
    use crate::metric_solver::{comb_spectrum_fast, SolveOptions};

    const GOLDEN: f64 = 0.618033988749894848;
    const PI: f64 = std::f64::consts::PI;

    fn bare_model() -> ModelSpec<f64> {
        ModelSpec::new(
            1.0,
            vec![Decoration::single_vertex(0), Decoration::single_vertex(1)],
        )
        .unwrap()
    }

    fn word_of(letters: &[u8]) -> Word {
        Word::from_letters(letters.to_vec(), 0).unwrap()
    }

    fn assert_spectrum(ds: &DiscreteSpectrum<f64>, expect: &[(f64, usize)], tol: f64) {
        assert_eq!(ds.eigenvalues().len(), expect.len(), "{ds:?}");
        for (&(mu, mult), &(emu, emult)) in ds.eigenvalues().iter().zip(expect) {
            assert!((mu - emu).abs() < tol, "μ = {mu}, expected {emu}");
            assert_eq!(mult, emult, "at μ = {mu}");
        }
    }

    #[test]
    fn identity_matrix_has_flat_spectrum() {
        let m = DMatrix::<f64>::identity(5, 5);
        let eig = symmetric_eigenvalues(&m, 0.0).unwrap();
        assert_eq!(eig.len(), 5);
        assert!(eig.iter().all(|&x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn asymmetric_matrix_is_rejected() {
        let mut m = DMatrix::<f64>::identity(3, 3);
        m[(0, 1)] = 0.5;
        assert!(symmetric_eigenvalues(&m, 1e-10).is_err());
    }

    #[test]
    fn path_graph_spectra_match_cosine_law() {
        // P_N has normalized-Laplacian eigenvalues 1 − cos(πj/(N−1)).
        let p2 = DiscreteGraph::new(vec![vec![1], vec![0]]).unwrap();
        assert_spectrum(
            &discrete_graph_spectrum::<f64>(&p2).unwrap(),
            &[(0.0, 1), (2.0, 1)],
            1e-12,
        );
        let p3 = DiscreteGraph::new(vec![vec![1], vec![0, 2], vec![1]]).unwrap();
        assert_spectrum(
            &discrete_graph_spectrum::<f64>(&p3).unwrap(),
            &[(0.0, 1), (1.0, 1), (2.0, 1)],
            1e-12,
        );
        let n = 7usize;
        let adjacency: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                let mut nb = Vec::new();
                if v > 0 {
                    nb.push(v - 1);
                }
                if v + 1 < n {
                    nb.push(v + 1);
                }
                nb
            })
            .collect();
        let pn = DiscreteGraph::new(adjacency).unwrap();
        let ds = discrete_graph_spectrum::<f64>(&pn).unwrap();
        let expect: Vec<(f64, usize)> = (0..n)
            .map(|j| (1.0 - (PI * j as f64 / (n - 1) as f64).cos(), 1))
            .collect();
        assert_spectrum(&ds, &expect, 1e-10);
    }

    #[test]
    fn triangle_has_double_three_halves() {
        let c3 = DiscreteGraph::new(vec![vec![1, 2], vec![0, 2], vec![0, 1]]).unwrap();
        assert_spectrum(
            &discrete_graph_spectrum::<f64>(&c3).unwrap(),
            &[(0.0, 1), (1.5, 2)],
            1e-12,
        );
    }

    #[test]
    fn two_tooth_comb_is_a_renumbered_path() {
        // Sites 0 and 1 both decorated with a pendant vertex: the discrete
        // truncation is P₄ in disguise, eigenvalues {0, 1/2, 3/2, 2}.
        let model = ModelSpec::comb(1.0, 1.0).unwrap();
        let ds = discrete_spectrum::<f64>(&model, &word_of(&[1, 1])).unwrap();
        assert_spectrum(&ds, &[(0.0, 1), (0.5, 1), (1.5, 1), (2.0, 1)], 1e-12);
    }

    #[test]
    fn dispersion_sweeps_branches_alternately() {
        assert!((dispersion_k(1.0, 0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(dispersion_k(0.0, 0).unwrap(), 0.0);
        assert!((dispersion_k(0.0, 1).unwrap() - 2.0 * PI).abs() < 1e-15);
        assert!((dispersion_k(2.0, 0).unwrap() - PI).abs() < 1e-15);
        assert!((dispersion_k(2.0, 1).unwrap() - PI).abs() < 1e-15);
        assert!(dispersion_k(2.5, 0).is_err());
        assert!(dispersion_k(-0.5, 0).is_err());
    }

    #[test]
    fn correspondence_rebuilds_the_free_interval() {
        // P₂ is the discrete shadow of a single unit interval, whose free
        // spectrum is (πj)².
        let ds = DiscreteSpectrum::new(vec![(0.0, 1), (2.0, 1)]).unwrap();
        let spectrum = metric_spectrum_via_correspondence(&ds, 1, 2.5 * PI).unwrap();
        let expect = [(0.0, 1), (PI * PI, 1), (4.0 * PI * PI, 1)];
        assert_eq!(spectrum.eigenvalues().len(), 3);
        for (&(l, m), &(el, em)) in spectrum.eigenvalues().iter().zip(&expect) {
            assert!((l - el).abs() < 1e-12 * (1.0 + el), "λ = {l}");
            assert_eq!(m, em);
        }
    }

    #[test]
    fn correspondence_matches_the_fast_comb_solver() {
        let model = ModelSpec::comb(1.0, 1.0).unwrap();
        let word = word_of(&[1, 1]);
        let ds = discrete_spectrum::<f64>(&model, &word).unwrap();
        let k_max = 2.5 * PI;
        let via = metric_spectrum_via_correspondence(&ds, 3, k_max).unwrap();
        let direct = comb_spectrum_fast(
            1.0,
            1.0,
            &word,
            BoundaryCondition::Free,
            &SolveOptions::new(k_max),
        )
        .unwrap();
        assert_eq!(via.total_count(), direct.total_count());
        for (&(a, ma), &(b, mb)) in via.eigenvalues().iter().zip(direct.eigenvalues()) {
            assert!((a - b).abs() < 1e-8 * (1.0 + b), "correspondence {a} vs direct {b}");
            assert_eq!(ma, mb);
        }
    }

    #[test]
    fn correspondence_rejects_inconsistent_edge_count() {
        let ds = DiscreteSpectrum::new(vec![(0.0, 1), (1.0, 2), (2.0, 1)]).unwrap();
        // Interior multiplicity 2 per branch cannot fit one edge per cell.
        assert!(metric_spectrum_via_correspondence(&ds, 1, 2.5 * PI).is_err());
    }

    #[test]
    fn raw_merging_groups_near_degeneracies() {
        let ds = DiscreteSpectrum::from_raw(vec![1.0 + 2e-10, 0.0, 1.0, 2.0, 1.0 - 2e-10])
            .unwrap();
        assert_spectrum(&ds, &[(0.0, 1), (1.0, 3), (2.0, 1)], 1e-10);
        assert!(DiscreteSpectrum::from_raw(vec![2.5]).is_err());
        assert!(DiscreteSpectrum::from_raw(vec![-0.5]).is_err());
    }

    #[test]
    fn discrete_ids_normalizes_by_vertex_count() {
        let model = ModelSpec::comb(1.0, 1.0).unwrap();
        let params = SturmianParameters::new(GOLDEN, 0.0).unwrap();
        let curves = discrete_ids(&model, &params, &[2, 3]).unwrap();
        assert_eq!(curves.len(), 2);
        for curve in &curves {
            let top = *curve.values().last().unwrap();
            assert!((top - 1.0).abs() < 1e-12, "IDS must end at 1, got {top}");
            assert!(curve.eval(-0.1) == 0.0);
        }
        // Size 3 reads letters 0,1,0,1: six vertices free; the Dirichlet cut
        // removes both chain ends plus the tooth stranded at site 3.
        assert_eq!(curves[1].normalization(), 6.0);
        let dirichlet =
            discrete_ids_boundary(&model, &params, &[3], BoundaryCondition::Dirichlet).unwrap();
        assert_eq!(dirichlet[0].normalization(), 3.0);
    }

    #[test]
    fn bare_chain_ids_interlaces_boundary_variants() {
        let model = bare_model();
        let params = SturmianParameters::new(GOLDEN, 0.0).unwrap();
        let free = discrete_ids(&model, &params, &[6]).unwrap();
        let dir =
            discrete_ids_boundary(&model, &params, &[6], BoundaryCondition::Dirichlet).unwrap();
        // P₇ against P₅: eigenvalue counts 7 and 5, both curves reach 1.
        assert_eq!(free[0].breakpoints().len(), 7);
        assert_eq!(dir[0].breakpoints().len(), 5);
        assert!((free[0].eval(2.0) - 1.0).abs() < 1e-12);
        assert!((dir[0].eval(2.0) - 1.0).abs() < 1e-12);
    }
}
