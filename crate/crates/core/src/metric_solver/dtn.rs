//! Dirichlet-to-Neumann elimination of decorations.
//!
//! For a decoration with value 1 prescribed at its base vertex and
//! flux-balance conditions everywhere else, there is a unique solution of
//! `−f″ = E·f` away from a discrete set of excluded energies.  Its total
//! outward derivative at the base is the m-function, which replaces the
//! decoration by an energy-dependent Robin coupling on the chain.  The module
//! also exposes the per-edge transfer coefficients so callers can reconstruct
//! the solution inside edges (for zero counting) from the vertex values.

use crate::error::{Error, Result};
use crate::graphs::Decoration;
use crate::scalar::{cast, Scalar};

/// Relative tolerance under which an edge is declared resonant (the energy
/// lies in the edge's Dirichlet spectrum, where the transfer coefficients
/// blow up).
const RESONANCE_TOL: f64 = 1e-12;

/// Per-edge transfer coefficients `(a, b)` of `−f″ = E·f`.
///
/// For an edge of length `ℓ` with endpoint values `f_u`, `f_v`, the outward
/// derivative into the edge at `u` is `−a·f_u + b·f_v`.  Concretely
/// `a = k·cot(kℓ)`, `b = k/sin(kℓ)` for `E = k² > 0`, with the hyperbolic
/// analogue below zero and the `1/ℓ` limit at zero.
///
/// # Errors
///
/// `ExcludedEnergy` when `sin(kℓ)` vanishes to within tolerance: the edge
/// then carries Dirichlet eigenfunctions and the endpoint values no longer
/// determine the solution.
pub(crate) fn edge_coefficients<S: Scalar>(energy: S, len: S) -> Result<(S, S)> {
    if energy > S::zero() {
        let k = energy.sqrt();
        let (s, c) = (k * len).sin_cos();
        if s.abs() < cast::<S>(RESONANCE_TOL) * c.abs().max(S::one()) {
            return Err(Error::excluded_energy(format!(
                "edge of length {len} is resonant at energy {energy}: sin(kℓ) = {s}"
            )));
        }
        Ok((k * c / s, k / s))
    } else if energy < S::zero() {
        let kappa = (-energy).sqrt();
        // coth through tanh and 1/sinh stay finite/underflow gracefully for
        // large κℓ, where the edge decouples its endpoints.
        let a = kappa / (kappa * len).tanh();
        let b = kappa / (kappa * len).sinh();
        Ok((a, b))
    } else {
        let inv = S::one() / len;
        Ok((inv, inv))
    }
}

/// m-function of a decoration: the total outward derivative at the base of
/// the unique solution with base value 1, together with the solution's
/// vertex values (base entry = 1).
///
/// A pendant of length `ℓ` reduces to the closed form `k·tan(kℓ)`; a bare
/// single-vertex decoration has `m = 0`.
///
/// # Errors
///
/// `ExcludedEnergy` when an edge is resonant or when the interior
/// flux-balance system is singular (the energy is an eigenvalue of the
/// decoration with Dirichlet base, so the solution is not unique).
pub fn decoration_m_function<S: Scalar>(dec: &Decoration<S>, energy: S) -> Result<(S, Vec<S>)> {
    let n = dec.vertex_count();
    let base = dec.base();
    if dec.is_single_vertex() {
        return Ok((S::zero(), vec![S::one()]));
    }

    let mut coeffs = Vec::with_capacity(dec.edge_count());
    for &(_, _, len) in dec.edges() {
        coeffs.push(edge_coefficients(energy, len)?);
    }

    // Unknowns are the non-base vertex values; the base contributes to the
    // right-hand side with its prescribed value 1.
    let mut slot = vec![usize::MAX; n];
    let mut nfree = 0;
    for v in 0..n {
        if v != base {
            slot[v] = nfree;
            nfree += 1;
        }
    }
    let mut mat = vec![S::zero(); nfree * nfree];
    let mut rhs = vec![S::zero(); nfree];
    for (&(u, v, _), &(a, b)) in dec.edges().iter().zip(&coeffs) {
        // Each endpoint of each edge contributes −a·f_here + b·f_there to the
        // flux balance at `here`; self-loops hit the same row twice.
        for (here, there) in [(u, v), (v, u)] {
            if here == base {
                continue;
            }
            let row = slot[here];
            mat[row * nfree + row] -= a;
            if there == base {
                rhs[row] -= b;
            } else {
                mat[row * nfree + slot[there]] += b;
            }
        }
    }

    let interior = solve_dense(&mut mat, &mut rhs, nfree).map_err(|_| {
        Error::excluded_energy(format!(
            "decoration flux-balance system is singular at energy {energy} \
             (Dirichlet-base eigenvalue)"
        ))
    })?;

    let mut values = vec![S::one(); n];
    for v in 0..n {
        if v != base {
            values[v] = interior[slot[v]];
        }
    }

    let mut m = S::zero();
    for (&(u, v, _), &(a, b)) in dec.edges().iter().zip(&coeffs) {
        for (here, there) in [(u, v), (v, u)] {
            if here == base {
                m += -a * values[here] + b * values[there];
            }
        }
    }
    Ok((m, values))
}

/// In-place Gaussian elimination with partial pivoting; `Err(())` on a
/// collapsed pivot.
fn solve_dense<S: Scalar>(
    mat: &mut [S],
    rhs: &mut [S],
    n: usize,
) -> std::result::Result<Vec<S>, ()> {
    let mut scale = S::zero();
    for &x in mat.iter() {
        scale = scale.max(x.abs());
    }
    let tiny = cast::<S>(1e-10) * scale.max(S::one());
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&a, &b| {
                mat[a * n + col]
                    .abs()
                    .partial_cmp(&mat[b * n + col].abs())
                    .expect("finite entries")
            })
            .expect("non-empty column range");
        if mat[pivot_row * n + col].abs() <= tiny {
            return Err(());
        }
        if pivot_row != col {
            for c in 0..n {
                mat.swap(col * n + c, pivot_row * n + c);
            }
            rhs.swap(col, pivot_row);
        }
        let inv = S::one() / mat[col * n + col];
        for r in (col + 1)..n {
            let f = mat[r * n + col] * inv;
            if f == S::zero() {
                continue;
            }
            for c in col..n {
                let sub = f * mat[col * n + c];
                mat[r * n + c] -= sub;
            }
            let sub = f * rhs[col];
            rhs[r] -= sub;
        }
    }
    let mut x = vec![S::zero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for c in (row + 1)..n {
            acc -= mat[row * n + c] * x[c];
        }
        x[row] = acc / mat[row * n + row];
    }
    Ok(x)
}
