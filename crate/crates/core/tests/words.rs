//! Word-level tests.
//!
//! The short prefixes asserted here were produced by direct evaluation of
//! the coding map `n ↦ χ_{[1−α,1)}({nα + θ})` at high precision, separately
//! from the library, and are frozen as literals; analytic pattern
//! frequencies come from the circle-rotation picture and are cross-checked
//! along three independent routes (closed form, arc measure, empirical
//! count).

use gaplab_core::words::{
    adjacent_one_separations, continued_fraction_digits, sturmian_pattern_frequency,
    PrecisionMode, SturmianParameters, Word,
};
use proptest::prelude::*;

fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

fn silver() -> f64 {
    2f64.sqrt() - 1.0
}

fn word_of(letters: &str) -> Word {
    Word::from_letters(
        letters.bytes().map(|b| b - b'0').collect(),
        0,
    )
    .unwrap()
}

#[test]
fn golden_prefix_matches_direct_evaluation() {
    let params = SturmianParameters::new(golden(), 0.0).unwrap();
    let w = params.generate_word(0, 5).unwrap();
    assert_eq!(w.letters(), &[0, 1, 0, 1, 1, 0]);
    let w20 = params.generate_word(0, 19).unwrap();
    assert_eq!(w20.to_string(), "01011010110110101101");
}

#[test]
fn silver_prefix_matches_direct_evaluation() {
    let params = SturmianParameters::new(silver(), 0.0).unwrap();
    let w = params.generate_word(0, 15).unwrap();
    assert_eq!(w.to_string(), "0010100101001010");
}

#[test]
fn offset_shifts_the_word() {
    // θ = 1 − α puts the orbit start exactly on the included left endpoint
    // of the coding interval, so the word begins with the letter 1.
    let a = golden();
    let params = SturmianParameters::new(a, 1.0 - a).unwrap();
    assert_eq!(params.sturmian_letter(0), 1);
}

#[test]
fn continued_fraction_of_golden_is_all_ones() {
    let cf = continued_fraction_digits(golden(), 5).unwrap();
    assert_eq!(cf.digits(), &[1, 1, 1, 1, 1]);
}

#[test]
fn continued_fraction_of_silver_is_all_twos() {
    let cf = continued_fraction_digits(silver(), 4).unwrap();
    assert_eq!(cf.digits(), &[2, 2, 2, 2]);
}

#[test]
fn continued_fraction_of_half_terminates_early() {
    let cf = continued_fraction_digits(0.5f64, 6).unwrap();
    assert_eq!(cf.digits(), &[2]);
}

#[test]
fn continued_fraction_rejects_out_of_range() {
    assert!(continued_fraction_digits(0.0f64, 3).is_err());
    assert!(continued_fraction_digits(1.0f64, 3).is_err());
    assert!(continued_fraction_digits(golden(), 0).is_err());
}

#[test]
fn letter_frequencies_sum_to_one() {
    let params = SturmianParameters::new(silver(), 0.25).unwrap();
    let [(a0, f0), (a1, f1)] = params.letter_frequencies();
    assert_eq!((a0, a1), (0, 1));
    assert!((f0 + f1 - 1.0).abs() < 1e-15);
    assert!((f1 - silver()).abs() < 1e-15);
}

#[test]
fn empirical_frequency_counts_windows() {
    let w = word_of("0101101");
    let p = word_of("01");
    // Placements: 6 windows of length 2, of which 0-1 occurs at 0, 2, 5.
    let f: f64 = w.empirical_frequency(&p).unwrap();
    assert!((f - 3.0 / 6.0).abs() < 1e-15);
}

#[test]
fn empirical_frequency_rejects_long_pattern() {
    let w = word_of("01");
    let p = word_of("0101");
    assert!(w.empirical_frequency::<f64>(&p).is_err());
}

#[test]
fn golden_pattern_frequencies_match_closed_forms() {
    let a = golden();
    for (pattern, expected) in [
        ("1", a),
        ("0", 1.0 - a),
        ("11", 2.0 * a - 1.0),
        ("00", 0.0),
        ("101", 1.0 - a),
        ("010", 2.0 - 3.0 * a),
        ("1001", 0.0),
    ] {
        let rec = sturmian_pattern_frequency(a, &word_of(pattern)).unwrap();
        assert!(
            (rec.frequency - expected).abs() < 1e-12,
            "pattern {pattern}: got {}, expected {expected}",
            rec.frequency
        );
    }
}

#[test]
fn silver_pattern_frequencies_match_closed_forms() {
    let a = silver();
    for (pattern, expected) in [
        ("1", a),
        ("11", 0.0),
        ("1001", 1.0 - 2.0 * a),
        ("101", 3.0 * a - 1.0),
    ] {
        let rec = sturmian_pattern_frequency(a, &word_of(pattern)).unwrap();
        assert!(
            (rec.frequency - expected).abs() < 1e-12,
            "pattern {pattern}: got {}, expected {expected}",
            rec.frequency
        );
    }
}

#[test]
fn separation_patterns_golden() {
    let [long, short] = adjacent_one_separations(golden()).unwrap();
    assert_eq!(long.pattern.letters(), &[1, 0, 1]);
    assert_eq!(short.pattern.letters(), &[1, 1]);
    assert!((long.frequency - (1.0 - golden())).abs() < 1e-12);
    assert!((short.frequency - (2.0 * golden() - 1.0)).abs() < 1e-12);
    assert!((long.frequency + short.frequency - golden()).abs() < 1e-12);
}

#[test]
fn separation_patterns_silver() {
    let a = silver();
    let [long, short] = adjacent_one_separations(a).unwrap();
    assert_eq!(long.pattern.letters(), &[1, 0, 0, 1]);
    assert_eq!(short.pattern.letters(), &[1, 0, 1]);
    assert!((long.frequency - (1.0 - 2.0 * a)).abs() < 1e-12);
    assert!((short.frequency - (3.0 * a - 1.0)).abs() < 1e-12);
}

#[test]
fn separation_patterns_reject_rational_rotation() {
    assert!(adjacent_one_separations(0.5f64).is_err());
    assert!(adjacent_one_separations(2.0f64 / 3.0).is_err());
}

#[test]
fn separation_frequencies_agree_with_arc_measure_and_empirical_count() {
    for a in [golden(), silver()] {
        let params = SturmianParameters::new(a, 0.0).unwrap();
        let w = params.generate_word(0, 99_999).unwrap();
        for rec in adjacent_one_separations(a).unwrap() {
            let via_arcs = sturmian_pattern_frequency(a, &rec.pattern).unwrap().frequency;
            let via_count: f64 = w.empirical_frequency(&rec.pattern).unwrap();
            assert!((rec.frequency - via_arcs).abs() < 1e-12);
            assert!((rec.frequency - via_count).abs() < 1e-3);
        }
    }
}

#[test]
fn rational_convergent_mode_is_periodic_and_tracks_float_mode() {
    let depth = 20; // convergent 6765/10946 for the golden rotation number
    let float = SturmianParameters::new(golden(), 0.0).unwrap();
    let exact = SturmianParameters::with_mode(
        golden(),
        0.0,
        PrecisionMode::RationalConvergent { depth },
    )
    .unwrap();
    for n in -2000..2000 {
        assert_eq!(
            float.sturmian_letter(n),
            exact.sturmian_letter(n),
            "disagreement at n = {n}"
        );
    }
    // Exact mode is periodic with the convergent denominator.
    for n in [-7, 0, 3, 1000] {
        assert_eq!(exact.sturmian_letter(n), exact.sturmian_letter(n + 10946));
    }
}

#[test]
fn rational_convergent_mode_rejects_degenerate_depth() {
    let r = SturmianParameters::with_mode(
        golden(),
        0.0,
        PrecisionMode::RationalConvergent { depth: 1 },
    );
    assert!(r.is_err());
}

#[test]
fn parameter_validation() {
    assert!(SturmianParameters::new(0.0f64, 0.0).is_err());
    assert!(SturmianParameters::new(1.0f64, 0.0).is_err());
    assert!(SturmianParameters::new(f64::NAN, 0.0).is_err());
    assert!(SturmianParameters::new(0.5f64, 1.0).is_err());
    assert!(SturmianParameters::new(0.5f64, -0.1).is_err());
    assert!(SturmianParameters::new(0.5f64, 0.0).is_ok());
}

#[test]
fn word_validation() {
    assert!(Word::from_letters(vec![], 0).is_err());
    assert!(Word::from_letters(vec![0, 2], 0).is_err());
    assert!(Word::from_letters(vec![0, 1, 1], -3).is_ok());
}

proptest! {
    /// Balance: over any window of length N the number of 1s differs from
    /// Nα by at most 2 (three-distance theorem), with slack for letters
    /// whose orbit point lands within float noise of the interval endpoint.
    #[test]
    fn letter_counts_are_balanced(
        alpha in 0.02f64..0.98,
        theta in 0.0f64..1.0,
        start in -500i64..500,
        len in 1i64..2000,
    ) {
        let params = SturmianParameters::new(alpha, theta).unwrap();
        let w = params.generate_word(start, start + len - 1).unwrap();
        let ones = w.letter_count(1) as f64;
        prop_assert!((ones - len as f64 * alpha).abs() <= 3.0);
    }

    /// Kolmogorov consistency of the arc-measure frequencies: extending a
    /// pattern by one letter splits its frequency.
    #[test]
    fn pattern_frequency_is_consistent_under_extension(
        alpha in 0.05f64..0.95,
        bits in proptest::collection::vec(0u8..2, 1..5),
    ) {
        let w = Word::from_letters(bits.clone(), 0).unwrap();
        let f = sturmian_pattern_frequency(alpha, &w).unwrap().frequency;
        let mut ext0 = bits.clone();
        ext0.push(0);
        let mut ext1 = bits;
        ext1.push(1);
        let f0 = sturmian_pattern_frequency(alpha, &Word::from_letters(ext0, 0).unwrap())
            .unwrap()
            .frequency;
        let f1 = sturmian_pattern_frequency(alpha, &Word::from_letters(ext1, 0).unwrap())
            .unwrap()
            .frequency;
        prop_assert!((f - (f0 + f1)).abs() < 1e-9);
        prop_assert!(f >= 0.0 && f <= 1.0 + 1e-12);
    }
}
