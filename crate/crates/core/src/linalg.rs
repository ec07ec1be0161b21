//! Dense linear-algebra kernels shared by the solvers.
//!
//! Three operations live here: ascending eigenvalues of real symmetric
//! matrices (nalgebra's tridiagonalization + implicit QL, values only),
//! eigenphases of unitary matrices, and kernel vectors of almost-square
//! homogeneous systems.
//!
//! Eigenphases are obtained through a shifted Cayley transform: for any
//! shift `β` with `e^{iβ}` off the spectrum of the unitary `U`,
//!
//! ```text
//! M = i (I + e^{−iβ}U)(I − e^{−iβ}U)^{−1}
//! ```
//!
//! is Hermitian, and an eigenvalue `h` of `M` corresponds to the eigenphase
//! `θ = β + π + 2 atan(h)  (mod 2π)` of `U`.  The Hermitian `M` is realified
//! to the symmetric `[[Re M, −Im M], [Im M, Re M]]`, whose spectrum is that
//! of `M` doubled; shifts that land too close to an eigenphase are detected
//! (huge `|h|`, broken Hermiticity or pairing) and retried from a fixed
//! candidate list.

use crate::error::{Error, Result};
use crate::scalar::{cast, EigenScalar};
use nalgebra::{Complex, DMatrix};

// `EigenScalar` sees both num-traits `Float` and nalgebra `RealField`, which
// overlap on several method names; route through these to stay unambiguous.
fn fabs<S: EigenScalar>(x: S) -> S {
    num_traits::Float::abs(x)
}

fn fmax<S: EigenScalar>(a: S, b: S) -> S {
    num_traits::Float::max(a, b)
}

/// Ascending eigenvalues of a real symmetric matrix.
///
/// Symmetry is enforced to `1e−12` (scaled by the largest entry); the input
/// is then symmetrized exactly before the solve so the backend sees a
/// bitwise-symmetric matrix.
pub(crate) fn symmetric_eigenvalues_sorted<S: EigenScalar>(m: &DMatrix<S>) -> Result<Vec<S>> {
    if m.nrows() != m.ncols() {
        return Err(Error::input(format!(
            "eigenvalue solve requires a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    let mut scale = S::one();
    for &x in m.iter() {
        scale = fmax(scale, fabs(x));
    }
    let tol = cast::<S>(1e-12) * scale;
    for i in 0..n {
        for j in (i + 1)..n {
            if fabs(m[(i, j)] - m[(j, i)]) > tol {
                return Err(Error::input(format!(
                    "matrix is not symmetric: |m[{i},{j}] - m[{j},{i}]| = {} exceeds {tol}",
                    fabs(m[(i, j)] - m[(j, i)])
                )));
            }
        }
    }
    let half = cast::<S>(0.5);
    let sym = (m + m.transpose()).scale(half);
    let mut ev: Vec<S> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(ev)
}

/// Eigenphases `θ_j ∈ [0, 2π)` of a unitary matrix, ascending.
pub(crate) fn unitary_eigenphases<S: EigenScalar>(u: &DMatrix<Complex<S>>) -> Result<Vec<S>> {
    let d = u.nrows();
    if d != u.ncols() || d == 0 {
        return Err(Error::input("eigenphase solve requires a square matrix"));
    }
    let shift_candidates = [
        3.141592653589793,
        2.5183,
        3.9174,
        1.2764,
        5.0313,
        0.6092,
        5.7521,
    ];
    let mut last_failure = String::new();
    for &beta_f in &shift_candidates {
        let beta = cast::<S>(beta_f);
        match eigenphases_with_shift(u, beta) {
            Ok(mut phases) => {
                phases.sort_by(|a, b| a.partial_cmp(b).expect("finite phases"));
                // Second pass with the shift centred in the largest spectral
                // gap.  The first accepted shift may sit close to a phase,
                // which inflates the transform and costs absolute accuracy
                // exactly on the phases near 0/2π that drive eigenvalue
                // counting; the recentred shift keeps the transform bounded
                // by cot(gap/4), so those phases come back at working
                // precision.
                let recentred = largest_gap_midpoint(&phases);
                if let Ok(mut better) = eigenphases_with_shift(u, recentred) {
                    better.sort_by(|a, b| a.partial_cmp(b).expect("finite phases"));
                    return Ok(better);
                }
                return Ok(phases);
            }
            Err(e) => last_failure = e.to_string(),
        }
    }
    Err(Error::numerical(format!(
        "all Cayley shifts failed for the {d}x{d} unitary: {last_failure}"
    )))
}

/// Midpoint of the largest gap between consecutive phases on the circle —
/// the point farthest from the (sorted, nonempty) spectrum.
fn largest_gap_midpoint<S: EigenScalar>(sorted: &[S]) -> S {
    let two_pi = S::PI() + S::PI();
    let n = sorted.len();
    let mut best_gap = sorted[0] + two_pi - sorted[n - 1];
    let mut best_mid = sorted[n - 1] + best_gap * cast::<S>(0.5);
    for w in sorted.windows(2) {
        let gap = w[1] - w[0];
        if gap > best_gap {
            best_gap = gap;
            best_mid = (w[0] + w[1]) * cast::<S>(0.5);
        }
    }
    while best_mid >= two_pi {
        best_mid -= two_pi;
    }
    best_mid
}

fn eigenphases_with_shift<S: EigenScalar>(u: &DMatrix<Complex<S>>, beta: S) -> Result<Vec<S>> {
    let d = u.nrows();
    let phase = Complex::new(num_traits::Float::cos(beta), -num_traits::Float::sin(beta));
    let w = u.map(|z| z * phase);
    let id = DMatrix::<Complex<S>>::identity(d, d);
    let a = &id - &w;
    let b = &id + &w;
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::numerical("Cayley denominator is singular at this shift"))?;
    let m = x.map(|z| z * Complex::new(S::zero(), S::one()));

    // Hermiticity of the transform fails only when the shift sits on (or
    // numerically near) an eigenphase.
    let mut max_entry = S::zero();
    let mut max_dev = S::zero();
    for i in 0..d {
        for j in 0..d {
            let entry = m[(i, j)];
            max_entry = fmax(max_entry, entry.norm());
            let dev = (entry - m[(j, i)].conj()).norm();
            max_dev = fmax(max_dev, dev);
        }
    }
    if max_dev > cast::<S>(1e-7) * (S::one() + max_entry) {
        return Err(Error::numerical(format!(
            "Cayley transform not Hermitian (deviation {max_dev})"
        )));
    }
    if max_entry > cast::<S>(1e9) {
        return Err(Error::numerical(
            "Cayley transform badly conditioned at this shift",
        ));
    }

    // Realify: Hermitian M = A + iB with A symmetric, B antisymmetric maps
    // to the real symmetric [[A, −B], [B, A]] with every eigenvalue doubled.
    let mut r = DMatrix::<S>::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let re = (m[(i, j)].re + m[(j, i)].re) * cast::<S>(0.5);
            let im = (m[(i, j)].im - m[(j, i)].im) * cast::<S>(0.5);
            r[(i, j)] = re;
            r[(i + d, j + d)] = re;
            r[(i, j + d)] = -im;
            r[(i + d, j)] = im;
        }
    }
    let doubled = symmetric_eigenvalues_sorted(&r)?;

    let mut phases = Vec::with_capacity(d);
    let two_pi = S::PI() + S::PI();
    for k in 0..d {
        let lo = doubled[2 * k];
        let hi = doubled[2 * k + 1];
        let h = (lo + hi) * cast::<S>(0.5);
        if fabs(hi - lo) > cast::<S>(1e-5) * (S::one() + fabs(h))
        {
            return Err(Error::numerical(format!(
                "realified spectrum failed to pair: gap {} at index {k}",
                hi - lo
            )));
        }
        let mut theta = beta + S::PI() + (num_traits::Float::atan(h) + num_traits::Float::atan(h));
        while theta >= two_pi {
            theta -= two_pi;
        }
        while theta < S::zero() {
            theta += two_pi;
        }
        phases.push(theta);
    }
    Ok(phases)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_eigenvalues_of_2x2() {
        let m = DMatrix::<f64>::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let ev = symmetric_eigenvalues_sorted(&m).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!((ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        let m = DMatrix::<f64>::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(symmetric_eigenvalues_sorted(&m).is_err());
    }

    #[test]
    fn eigenphases_of_diagonal_unitary() {
        let angles = [0.3f64, 1.9, 4.4];
        let mut u = DMatrix::<Complex<f64>>::zeros(3, 3);
        for (i, &t) in angles.iter().enumerate() {
            u[(i, i)] = Complex::new(t.cos(), t.sin());
        }
        let phases = unitary_eigenphases(&u).unwrap();
        for (p, t) in phases.iter().zip(angles.iter()) {
            assert!((p - t).abs() < 1e-9, "phase {p} vs angle {t}");
        }
    }

    #[test]
    fn eigenphases_of_rotation_block() {
        // 2x2 real rotation by t has eigenphases ±t.
        let t = 0.7f64;
        let u = DMatrix::<Complex<f64>>::from_row_slice(
            2,
            2,
            &[
                Complex::new(t.cos(), 0.0),
                Complex::new(-t.sin(), 0.0),
                Complex::new(t.sin(), 0.0),
                Complex::new(t.cos(), 0.0),
            ],
        );
        let phases = unitary_eigenphases(&u).unwrap();
        assert!((phases[0] - t).abs() < 1e-9);
        assert!((phases[1] - (2.0 * std::f64::consts::PI - t)).abs() < 1e-9);
    }

    #[test]
    fn eigenphase_near_every_default_shift_still_resolves() {
        // Identity has all phases at 0; any shift works except β = 0.
        let u = DMatrix::<Complex<f64>>::identity(4, 4).map(|z| z);
        let phases = unitary_eigenphases(&u).unwrap();
        for p in phases {
            assert!(p.abs() < 1e-9 || (p - 2.0 * std::f64::consts::PI).abs() < 1e-9);
        }
    }

}
