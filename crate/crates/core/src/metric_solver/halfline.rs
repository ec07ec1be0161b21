//! Decaying solution on the decorated half line.
//!
//! For an energy in a spectral gap, the operator on the decorated half line
//! has (up to scale) exactly one solution that is square-integrable at
//! infinity.  Its logarithmic derivatives at the chain vertices are the
//! Robin data that truncation operators impose at their cut points.  The
//! solution is approximated by placing an artificial Dirichlet condition far
//! to the right and shooting back towards the origin; the far condition's
//! influence decays exponentially, which a second shot from a roughly
//! doubled horizon verifies before any data is accepted.

use crate::error::{Error, Result};
use crate::graphs::ModelSpec;
use crate::scalar::{cast, Scalar};
use crate::words::Word;

use super::decoration_m_function;

/// Relative agreement required between the two shooting horizons.
const DOUBLING_TOL: f64 = 1e-6;
/// Relative size of `f` at a chain vertex below which the ratio `f′/f` is
/// declared unusable.
const VANISH_TOL: f64 = 1e-12;

/// Logarithmic derivatives `f′(x_j⁻)/f(x_j)` of the decaying solution at
/// chain sites `j = 0, …, far_n/4`.
///
/// The left-limit convention folds each site's decoration flux into the
/// ratio, so at the origin the value is the total outward flux of the
/// half-line solution — exactly the coefficient a truncation imposes as its
/// end condition (applied before the site's own coupling).
///
/// The far Dirichlet condition sits at chain site `far_n`; a control shot
/// from site `2·far_n + 1` must agree to `1e−6` on the returned window, so
/// the word must cover at least `2·far_n + 1` letters.
///
/// # Errors
///
/// `Input` when `far_n < 4` or the word is too short; `ExcludedEnergy` when
/// a decoration is resonant at this energy, when the solution vanishes at a
/// chain vertex, or when the doubling test fails (no decaying solution — the
/// energy lies in the spectrum).
pub fn half_line_solution_data<S: Scalar>(
    model: &ModelSpec<S>,
    word: &Word,
    energy: S,
    far_n: usize,
) -> Result<Vec<S>> {
    if far_n < 4 {
        return Err(Error::input(format!(
            "far horizon must be at least 4 times the data window, got far_n = {far_n}"
        )));
    }
    let window = far_n / 4;
    let long = 2 * far_n + 1;
    if word.len() < long {
        return Err(Error::input(format!(
            "word with {} letters cannot support the doubling test at far_n = {far_n}; \
             need at least {long}",
            word.len()
        )));
    }

    // One m-function evaluation per distinct letter in range.
    let mut m_of: Vec<Option<S>> = vec![None; 256];
    for &letter in &word.letters()[..long] {
        if m_of[letter as usize].is_none() {
            let (m, _) = decoration_m_function(model.decoration(letter)?, energy)?;
            m_of[letter as usize] = Some(m);
        }
    }

    let short_data = shoot(model, word, energy, far_n, window, &m_of)?;
    let long_data = shoot(model, word, energy, long, window, &m_of)?;
    for (j, (&r_short, &r_long)) in short_data.iter().zip(&long_data).enumerate() {
        let dev = (r_short - r_long).abs();
        if dev > cast::<S>(DOUBLING_TOL) * (S::one() + r_long.abs()) {
            return Err(Error::excluded_energy(format!(
                "no decaying half-line solution at energy {energy}: horizon doubling \
                 moves the ratio at site {j} by {dev} (energy lies in the spectrum \
                 or the horizon {far_n} is too short)"
            )));
        }
    }
    Ok(long_data)
}

/// Shoots from a Dirichlet condition at chain site `horizon` down to the
/// origin, returning the post-coupling ratios at sites `0..=window`.
fn shoot<S: Scalar>(
    model: &ModelSpec<S>,
    word: &Word,
    energy: S,
    horizon: usize,
    window: usize,
    m_of: &[Option<S>],
) -> Result<Vec<S>> {
    let spacing = model.spacing();
    // f = 0 at the cut; the slope sign makes f positive just left of it.
    let mut state = (S::zero(), -S::one());
    let mut out = vec![S::zero(); window + 1];
    for site in (0..horizon).rev() {
        state = back_step(state, spacing, energy);
        let m = m_of[word.letters()[site] as usize].expect("letter prepared by caller");
        state.1 += m * state.0;
        let scale = state.0.abs().max(state.1.abs());
        if state.0.abs() <= cast::<S>(VANISH_TOL) * scale {
            return Err(Error::excluded_energy(format!(
                "half-line solution vanishes at chain site {site}; \
                 energy {energy} is too close to the spectrum"
            )));
        }
        if site <= window {
            out[site] = state.1 / state.0;
        }
        state.0 /= scale;
        state.1 /= scale;
    }
    Ok(out)
}

/// Propagates `(f, f′)` leftward across a bare segment of length `d`.
fn back_step<S: Scalar>(state: (S, S), d: S, energy: S) -> (S, S) {
    let (f, g) = state;
    if energy > S::zero() {
        let k = energy.sqrt();
        let (s, c) = (k * d).sin_cos();
        (f * c - g * s / k, f * k * s + g * c)
    } else if energy < S::zero() {
        let kappa = (-energy).sqrt();
        let (s, c) = ((kappa * d).sinh(), (kappa * d).cosh());
        (f * c - g * s / kappa, -f * kappa * s + g * c)
    } else {
        (f - g * d, g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{Decoration, ModelSpec};
    use crate::words::Word;

    fn bare_model() -> ModelSpec<f64> {
        ModelSpec::new(
            1.0,
            vec![
                Decoration::single_vertex(0),
                Decoration::single_vertex(1),
            ],
        )
        .unwrap()
    }

    fn zero_word(len: usize) -> Word {
        Word::from_letters(vec![0u8; len], 0).unwrap()
    }

    #[test]
    fn free_line_below_spectrum_is_pure_exponential() {
        // f = e^{−x} has f′/f = −1 at every point.  The horizon must leave
        // room for the Dirichlet cut to decay away: the contamination at the
        // last reported site falls like e^{−2κ·(horizon − window)}.
        let data = half_line_solution_data(&bare_model(), &zero_word(40), -1.0, 16).unwrap();
        assert_eq!(data.len(), 5);
        for (j, r) in data.iter().enumerate() {
            assert!((r + 1.0).abs() < 1e-9, "site {j}: ratio {r}");
        }
    }

    #[test]
    fn free_line_inside_spectrum_rejected() {
        // Positive energies belong to the free half line's spectrum: no
        // decaying solution, and the doubling test must say so.
        let err = half_line_solution_data(&bare_model(), &zero_word(60), 1.3, 12).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("spectrum"), "unexpected message: {msg}");
    }

    #[test]
    fn comb_below_spectrum_succeeds() {
        let model = ModelSpec::<f64>::comb(1.0, 1.0).unwrap();
        let word = Word::from_letters(
            (0..50).map(|i| u8::from(i % 2 == 0)).collect(),
            0,
        )
        .unwrap();
        let data = half_line_solution_data(&model, &word, -0.7, 16).unwrap();
        assert_eq!(data.len(), 5);
        for r in &data {
            assert!(r.is_finite());
            // Below the spectrum the solution decays monotonically, so every
            // left-limit ratio is negative.
            assert!(*r < 0.0, "ratio {r}");
        }
    }

    #[test]
    fn word_too_short_rejected() {
        let err = half_line_solution_data(&bare_model(), &zero_word(10), -1.0, 8).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn tooth_resonance_energy_rejected() {
        let model = ModelSpec::comb(1.0, 1.0).unwrap();
        let word = Word::from_letters(vec![1u8; 40], 0).unwrap();
        let e = std::f64::consts::FRAC_PI_2.powi(2);
        let err = half_line_solution_data(&model, &word, e, 8).unwrap_err();
        assert!(matches!(err, Error::ExcludedEnergy(_)));
    }
}
