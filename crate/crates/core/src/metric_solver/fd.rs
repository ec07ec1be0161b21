//! Finite-difference verification solver.
//!
//! Discretizes the second derivative on every edge with a three-point
//! stencil and a lumped (trapezoidal) mass, which turns the graph Laplacian
//! into a generalized symmetric pencil.  Eigenvalues below a threshold are
//! counted exactly for the discretized pencil by Sylvester inertia: interior
//! chain unknowns are eliminated edge by edge (each elimination touches only
//! the running chain front and the two endpoint vertices), then the small
//! dense vertex block is factored.  Eigenvalues are then located by bisection
//! on the count.  Accuracy is `O(h²)` in the mesh width; this module is a
//! cross-check oracle, not the production solver.

use crate::error::{Error, Result};
use crate::graphs::{CompactMetricGraph, VertexCondition};
use crate::scalar::{cast, Scalar};

use super::Spectrum;

/// Number of eigenvalues of the discretized operator strictly below
/// `energy`, counted with multiplicity.
///
/// Exact for the mesh via inertia counting; the mesh itself carries an
/// `O(h²)` forward error, so counts are reliable once `energy` is farther
/// than that from the true spectrum.
///
/// # Errors
///
/// `Input` if `h` exceeds an eighth of the shortest edge.
pub fn fd_count_below<S: Scalar>(g: &CompactMetricGraph<S>, h: S, energy: S) -> Result<usize> {
    validate_mesh(g, h)?;
    inertia_below(g, h, energy)
}

/// Lowest `count` eigenvalues of the discretized graph Laplacian, merged
/// into multiplicities, with `O(h²)` accuracy.
///
/// # Errors
///
/// `Input` for a non-positive `count` or a mesh coarser than an eighth of
/// the shortest edge.
pub fn fd_oracle<S: Scalar>(g: &CompactMetricGraph<S>, h: S, count: usize) -> Result<Spectrum<S>> {
    validate_mesh(g, h)?;
    if count == 0 {
        return Err(Error::input("eigenvalue count must be positive"));
    }

    // Bracket the requested part of the spectrum.
    let mut lo = -S::one();
    let mut guard = 0;
    while fd_count_below(g, h, lo)? > 0 {
        lo = lo * cast(4.0) - S::one();
        guard += 1;
        if guard > 200 {
            return Err(Error::numerical("runaway lower bracket expansion"));
        }
    }
    let mut hi = S::one();
    guard = 0;
    while fd_count_below(g, h, hi)? < count {
        hi = hi * cast(4.0);
        guard += 1;
        if guard > 200 {
            return Err(Error::numerical("runaway upper bracket expansion"));
        }
    }

    let mut values = Vec::with_capacity(count);
    for index in 1..=count {
        let (mut a, mut b) = (lo, hi);
        // Invariant: count_below(a) < index ≤ count_below(b).
        while b - a > cast::<S>(1e-11) * (S::one() + a.abs()) {
            let mid = (a + b) * cast(0.5);
            if fd_count_below(g, h, mid)? < index {
                a = mid;
            } else {
                b = mid;
            }
        }
        values.push((a + b) * cast(0.5));
    }

    let mut merged: Vec<(S, usize)> = Vec::new();
    for v in values {
        match merged.last_mut() {
            Some(&mut (prev, ref mut m)) if (v - prev).abs() <= cast::<S>(1e-8) * (S::one() + v.abs()) => {
                *m += 1;
            }
            _ => merged.push((v, 1)),
        }
    }
    let last = merged.last().expect("count >= 1").0;
    let k_max = if last > S::zero() {
        last.sqrt()
    } else {
        S::one()
    };
    Spectrum::new(merged, k_max)
}

fn validate_mesh<S: Scalar>(g: &CompactMetricGraph<S>, h: S) -> Result<()> {
    if !h.is_finite() || h <= S::zero() {
        return Err(Error::input(format!("mesh width must be positive, got {h}")));
    }
    let shortest = g.min_edge_length();
    if h > shortest / cast(8.0) {
        return Err(Error::input(format!(
            "mesh width {h} too coarse for shortest edge {shortest}; need h ≤ length/8"
        )));
    }
    Ok(())
}

/// Negative-pivot count of the pencil `A − E·B` in elimination order:
/// interior chains first, vertex block last.
///
/// A pivot smaller in magnitude than the working threshold means the probe
/// energy is (numerically) an eigenvalue of the pencil; the pivot is then
/// replaced by `−threshold` — counting the eigenvalue as passed — so the
/// probe stays total and bisection cannot stall on exact hits.
fn inertia_below<S: Scalar>(g: &CompactMetricGraph<S>, h: S, energy: S) -> Result<usize> {
    let nv = g.vertex_count();
    let conditions = g.conditions();
    // Map graph vertices to vertex-block unknowns; Dirichlet values are
    // pinned to zero and drop out.
    let mut slot = vec![usize::MAX; nv];
    let mut nfree = 0usize;
    for (v, cond) in conditions.iter().enumerate() {
        if !matches!(cond, VertexCondition::Dirichlet) {
            slot[v] = nfree;
            nfree += 1;
        }
    }

    let mut diag = vec![S::zero(); nfree];
    let mut off = vec![S::zero(); nfree * nfree];
    for (v, cond) in conditions.iter().enumerate() {
        if let VertexCondition::Robin(rho) = *cond {
            diag[slot[v]] += rho;
        }
    }

    let mut negatives = 0usize;
    let tiny = cast::<S>(1e-13);

    for &(u, v, len) in g.edges() {
        let n = (len / h).round().max(cast(2.0));
        let m = n
            .to_usize()
            .ok_or_else(|| Error::input("edge too long for the requested mesh"))?
            - 1;
        let he = len / n;
        let d_int = cast::<S>(2.0) / he - energy * he;
        let t = -S::one() / he;
        let end_load = S::one() / he - energy * he * cast(0.5);

        let su = slot[u];
        let sv = slot[v];
        if su != usize::MAX {
            diag[su] += end_load;
        }
        if sv != usize::MAX {
            diag[sv] += end_load;
        }

        // Eliminate the interior chain u — 1 — 2 — … — m — v.  `cu` carries
        // the fill-in coupling between u and the current front node.
        let mut p = d_int;
        let mut cu = if su != usize::MAX { t } else { S::zero() };
        let scale = d_int.abs().max(t.abs());
        for i in 1..=m {
            if p.abs() <= tiny * scale {
                p = -(tiny * scale);
            }
            if p < S::zero() {
                negatives += 1;
            }
            if i < m {
                if su != usize::MAX {
                    diag[su] -= cu * cu / p;
                }
                let fill = -(cu * t) / p;
                let next = d_int - t * t / p;
                cu = fill;
                p = next;
            } else {
                if su != usize::MAX {
                    diag[su] -= cu * cu / p;
                }
                if sv != usize::MAX {
                    diag[sv] -= t * t / p;
                }
                if su != usize::MAX && sv != usize::MAX {
                    off[su * nfree + sv] -= cu * t / p;
                    off[sv * nfree + su] -= cu * t / p;
                }
            }
        }
    }

    // Dense LDLᵀ of the remaining vertex block.
    let mut a = off;
    for i in 0..nfree {
        a[i * nfree + i] = diag[i];
    }
    let scale = a
        .iter()
        .fold(S::zero(), |acc, x| acc.max(x.abs()))
        .max(S::one());
    for i in 0..nfree {
        let mut p = a[i * nfree + i];
        if p.abs() <= tiny * scale {
            p = -(tiny * scale);
        }
        if p < S::zero() {
            negatives += 1;
        }
        for r in (i + 1)..nfree {
            let f = a[r * nfree + i] / p;
            if f == S::zero() {
                continue;
            }
            for c in (i + 1)..nfree {
                let update = f * a[i * nfree + c];
                a[r * nfree + c] -= update;
            }
        }
    }
    Ok(negatives)
}
