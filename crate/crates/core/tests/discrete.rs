//! Discrete-spectrum tests with an independent eigensolver.
//!
//! The library computes normalized-Laplacian spectra through nalgebra's
//! symmetric eigendecomposition.  Everything here is cross-checked along a
//! second route that shares no code with that path: the Laplacian is
//! re-assembled by hand from raw adjacency lists and diagonalized with a
//! self-contained cyclic Jacobi rotation solver written in this file, or
//! compared against closed forms (path/cycle/star/complete-graph cosine
//! laws) evaluated directly.

use gaplab_core::discrete_solver::{
    discrete_graph_spectrum, discrete_ids, discrete_spectrum, metric_spectrum_via_correspondence,
};
use gaplab_core::graphs::{build_discrete_truncation, BoundaryCondition, DiscreteGraph, ModelSpec};
use gaplab_core::metric_solver::{comb_spectrum_fast, SolveOptions};
use gaplab_core::words::SturmianParameters;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PI: f64 = std::f64::consts::PI;

fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

fn silver() -> f64 {
    2f64.sqrt() - 1.0
}

/// Dense symmetric eigenvalues by cyclic Jacobi rotations — deliberately
/// primitive and independent of the library's linear algebra.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..200 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p][q] * a[p][q];
            }
        }
        if off.sqrt() < 1e-13 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// `I − D^{−1/2} A D^{−1/2}` assembled from scratch out of adjacency lists.
fn laplacian_by_hand(adjacency: &[Vec<usize>]) -> Vec<Vec<f64>> {
    let n = adjacency.len();
    let deg: Vec<f64> = adjacency.iter().map(|nb| nb.len() as f64).collect();
    let mut m = vec![vec![0.0; n]; n];
    for (v, row) in m.iter_mut().enumerate() {
        row[v] = 1.0;
        for &u in &adjacency[v] {
            row[u] -= 1.0 / (deg[v] * deg[u]).sqrt();
        }
    }
    m
}

/// Flattens a merged `(value, multiplicity)` list into plain eigenvalues.
fn flatten(spectrum: &gaplab_core::DiscreteSpectrum) -> Vec<f64> {
    let mut out = Vec::new();
    for &(mu, mult) in spectrum.eigenvalues() {
        out.extend(std::iter::repeat(mu).take(mult));
    }
    out
}

fn assert_spectra_match(library: &[f64], oracle: &[f64], tol: f64, what: &str) {
    assert_eq!(library.len(), oracle.len(), "{what}: eigenvalue counts");
    for (i, (a, b)) in library.iter().zip(oracle.iter()).enumerate() {
        assert!(
            (a - b).abs() <= tol,
            "{what}: eigenvalue {i} differs: {a} vs {b}"
        );
    }
}

fn path_graph(n: usize) -> DiscreteGraph {
    let mut adj = vec![Vec::new(); n];
    for v in 0..n - 1 {
        adj[v].push(v + 1);
        adj[v + 1].push(v);
    }
    DiscreteGraph::new(adj).unwrap()
}

fn cycle_graph(n: usize) -> DiscreteGraph {
    let mut adj = vec![Vec::new(); n];
    for v in 0..n {
        let w = (v + 1) % n;
        adj[v].push(w);
        adj[w].push(v);
    }
    DiscreteGraph::new(adj).unwrap()
}

fn star_graph(leaves: usize) -> DiscreteGraph {
    let mut adj = vec![Vec::new(); leaves + 1];
    for v in 1..=leaves {
        adj[0].push(v);
        adj[v].push(0);
    }
    DiscreteGraph::new(adj).unwrap()
}

fn complete_graph(n: usize) -> DiscreteGraph {
    let mut adj = vec![Vec::new(); n];
    for v in 0..n {
        for u in 0..n {
            if u != v {
                adj[v].push(u);
            }
        }
    }
    DiscreteGraph::new(adj).unwrap()
}

#[test]
fn jacobi_solver_reproduces_hand_eigenvalues() {
    // [[2,1],[1,2]] has eigenvalues 1 and 3; a diagonal matrix is returned
    // sorted.  These pin down the oracle before it is used as a referee.
    let ev = jacobi_eigenvalues(vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
    assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
    let ev = jacobi_eigenvalues(vec![
        vec![3.0, 0.0, 0.0],
        vec![0.0, -1.0, 0.0],
        vec![0.0, 0.0, 2.0],
    ]);
    assert!((ev[0] + 1.0).abs() < 1e-12);
    assert!((ev[1] - 2.0).abs() < 1e-12);
    assert!((ev[2] - 3.0).abs() < 1e-12);
}

#[test]
fn golden_comb_truncation_matches_jacobi_oracle() {
    let model = ModelSpec::comb(1.0, 1.0).unwrap();
    let params = SturmianParameters::new(golden(), 0.0).unwrap();
    for n in [8i64, 21] {
        let word = params.generate_word(0, n).unwrap();
        let graph = build_discrete_truncation(&model, &word).unwrap();
        let library = flatten(&discrete_spectrum(&model, &word).unwrap());
        let oracle = jacobi_eigenvalues(laplacian_by_hand(graph.adjacency()));
        assert_spectra_match(&library, &oracle, 5e-9, &format!("comb n={n}"));
    }
}

#[test]
fn cycle_spectrum_matches_closed_form_and_oracle() {
    // C_N has normalized-Laplacian eigenvalues 1 − cos(2πj/N).
    for n in [3usize, 5, 8] {
        let graph = cycle_graph(n);
        let library = flatten(&discrete_graph_spectrum(&graph).unwrap());
        let mut closed: Vec<f64> = (0..n).map(|j| 1.0 - (2.0 * PI * j as f64 / n as f64).cos()).collect();
        closed.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_spectra_match(&library, &closed, 1e-10, &format!("C_{n} closed form"));
        let oracle = jacobi_eigenvalues(laplacian_by_hand(graph.adjacency()));
        assert_spectra_match(&library, &oracle, 5e-9, &format!("C_{n} Jacobi"));
    }
}

#[test]
fn star_and_complete_graphs_match_closed_forms() {
    // K_{1,m}: eigenvalues {0, 1 × (m−1), 2}.  K_n: {0, n/(n−1) × (n−1)}.
    for m in [3usize, 4, 6] {
        let library = flatten(&discrete_graph_spectrum(&star_graph(m)).unwrap());
        let mut closed = vec![0.0];
        closed.extend(std::iter::repeat(1.0).take(m - 1));
        closed.push(2.0);
        assert_spectra_match(&library, &closed, 1e-10, &format!("star K_1,{m}"));
    }
    for n in [4usize, 5] {
        let library = flatten(&discrete_graph_spectrum(&complete_graph(n)).unwrap());
        let mut closed = vec![0.0];
        closed.extend(std::iter::repeat(n as f64 / (n as f64 - 1.0)).take(n - 1));
        assert_spectra_match(&library, &closed, 1e-10, &format!("K_{n}"));
    }
}

#[test]
fn path_cosine_law_matches_both_routes() {
    // P_N: eigenvalues 1 − cos(πj/(N−1)), j = 0..N−1.
    for n in [4usize, 10] {
        let graph = path_graph(n);
        let library = flatten(&discrete_graph_spectrum(&graph).unwrap());
        let mut closed: Vec<f64> = (0..n)
            .map(|j| 1.0 - (PI * j as f64 / (n as f64 - 1.0)).cos())
            .collect();
        closed.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_spectra_match(&library, &closed, 1e-10, &format!("P_{n} closed form"));
        let oracle = jacobi_eigenvalues(laplacian_by_hand(graph.adjacency()));
        assert_spectra_match(&library, &oracle, 5e-9, &format!("P_{n} Jacobi"));
    }
}

#[test]
fn random_graph_spectra_satisfy_trace_and_range_invariants() {
    // The normalized Laplacian of a connected graph has unit diagonal, so
    // the eigenvalues sum to the vertex count, lie in [0, 2], and include 0
    // exactly once.  Random trees plus chords exercise both routes.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d15c);
    for case in 0..25 {
        let n = rng.gen_range(3..12usize);
        let mut edges = std::collections::BTreeSet::new();
        for v in 1..n {
            let u = rng.gen_range(0..v);
            edges.insert((u, v));
        }
        for _ in 0..rng.gen_range(0..4usize) {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v {
                edges.insert((u.min(v), u.max(v)));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let graph = DiscreteGraph::new(adj).unwrap();
        let spectrum = discrete_graph_spectrum(&graph).unwrap();
        let library = flatten(&spectrum);
        assert_eq!(library.len(), n, "case {case}: count");
        let trace: f64 = library.iter().sum();
        assert!(
            (trace - n as f64).abs() < 1e-8,
            "case {case}: trace {trace} vs {n}"
        );
        assert!(library.iter().all(|&mu| (-1e-9..=2.0 + 1e-9).contains(&mu)));
        assert!(library[0].abs() < 1e-9 && library[1] > 1e-9, "case {case}: kernel");
        let oracle = jacobi_eigenvalues(laplacian_by_hand(graph.adjacency()));
        assert_spectra_match(&library, &oracle, 5e-9, &format!("random case {case}"));
    }
}

#[test]
fn correspondence_rebuilds_the_metric_silver_comb() {
    // Unit comb over a silver word: the metric spectrum pushed through the
    // dispersion relation must agree with the direct secular computation.
    let model = ModelSpec::comb(1.0, 1.0).unwrap();
    let params = SturmianParameters::new(silver(), 0.0).unwrap();
    let word = params.generate_word(0, 13).unwrap();
    let graph = build_discrete_truncation(&model, &word).unwrap();
    let ds = discrete_spectrum(&model, &word).unwrap();
    let k_max = 2.0 * PI + 0.5;
    let via = metric_spectrum_via_correspondence(&ds, graph.edge_count(), k_max).unwrap();
    let direct = comb_spectrum_fast(
        1.0,
        1.0,
        &word,
        BoundaryCondition::Free,
        &SolveOptions::new(k_max),
    )
    .unwrap();
    let a: Vec<(f64, usize)> = via.eigenvalues().to_vec();
    let b: Vec<(f64, usize)> = direct.eigenvalues().to_vec();
    let na: usize = a.iter().map(|&(_, m)| m).sum();
    let nb: usize = b.iter().map(|&(_, m)| m).sum();
    assert_eq!(na, nb, "total multiplicity");
    let fa: Vec<f64> = a.iter().flat_map(|&(l, m)| std::iter::repeat(l).take(m)).collect();
    let fb: Vec<f64> = b.iter().flat_map(|&(l, m)| std::iter::repeat(l).take(m)).collect();
    for (x, y) in fa.iter().zip(fb.iter()) {
        assert!((x - y).abs() < 1e-8, "correspondence {x} vs direct {y}");
    }
}

#[test]
fn discrete_ids_curves_tighten_with_size() {
    let model = ModelSpec::comb(1.0, 1.0).unwrap();
    let params = SturmianParameters::new(golden(), 0.0).unwrap();
    let curves = discrete_ids(&model, &params, &[60, 120]).unwrap();
    assert_eq!(curves.len(), 2);
    let d = curves[0].sup_distance(&curves[1], 0.0, 2.0).unwrap();
    assert!(d < 0.06, "size-60 vs size-120 IDS sup distance {d}");
    // Values are genuine distribution functions.
    for curve in &curves {
        let vals = curve.values();
        assert!(vals.last().unwrap() <= &1.0000001);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }
}
