use std::collections::BTreeSet;

use jiomber::signal::gold::{degree_for_length, periodic_correlation};
use jiomber::signal::{
    build_convolution_matrix, generate_gold_family, jakes_step, synthesize_stream, ChannelState, StreamShape,
    UserConfig,
};
use jiomber::CMatrix;
use num_complex::Complex64;

#[test]
fn degree5_family_is_exhaustively_three_valued() {
    let family = generate_gold_family(5).unwrap();
    assert_eq!(family.len(), 33);
    let signs: Vec<Vec<i32>> = family.iter().map(|c| c.signs()).collect();
    let mut spectrum = BTreeSet::new();
    for (i, a) in signs.iter().enumerate() {
        assert_eq!(a.len(), 31);
        for (j, b) in signs.iter().enumerate() {
            for shift in 0..31 {
                if i == j && shift == 0 {
                    continue;
                }
                spectrum.insert(periodic_correlation(a, b, shift));
            }
        }
    }
    assert_eq!(spectrum.into_iter().collect::<Vec<_>>(), vec![-9, -1, 7]);
}

#[test]
fn family_codes_are_distinct() {
    for degree in [5, 7] {
        let family = generate_gold_family(degree).unwrap();
        let set: BTreeSet<Vec<i32>> = family.iter().map(|c| c.signs()).collect();
        assert_eq!(set.len(), family.len());
        for (k, c) in family.iter().enumerate() {
            assert_eq!(c.user_id, k);
        }
    }
    assert_eq!(degree_for_length(31), Some(5));
    assert_eq!(degree_for_length(127), Some(7));
    assert_eq!(degree_for_length(63), None);
}

#[test]
fn convolution_matrix_matches_shift_oracle() {
    let family = generate_gold_family(5).unwrap();
    for paths in 1..=4 {
        let code = &family[3];
        let c = build_convolution_matrix(code, paths).unwrap();
        assert_eq!(c.rows(), 31 + paths - 1);
        for row in 0..c.rows() {
            for col in 0..paths {
                let expected = if row >= col && row - col < 31 { code.chips()[row - col] } else { 0.0 };
                assert_eq!(c.entries()[(row, col)], expected);
            }
        }
    }
}

#[test]
fn jakes_tap_power_follows_profile() {
    let profile = [0.0, -7.0, -10.0];
    let mut ch = ChannelState::new(&profile, 0.01, 99).unwrap();
    let steps = 1_000_000;
    let mut power = [0.0f64; 3];
    for _ in 0..steps {
        for (p, h) in power.iter_mut().zip(jakes_step(&mut ch)) {
            *p += h.norm_sqr();
        }
    }
    for (p, db) in power.iter().zip(profile) {
        let measured = p / steps as f64;
        let expected = 10f64.powf(db / 10.0);
        assert!(
            (measured / expected - 1.0).abs() < 0.03,
            "tap at {db} dB: measured {measured}, expected {expected}"
        );
    }
}

/// `J₀(x) = Σ (−1)^k (x/2)^{2k} / (k!)²`.
fn bessel_j0(x: f64) -> f64 {
    let q = -(x * x) / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= q / (k as f64 * k as f64);
        sum += term;
    }
    sum
}

#[test]
fn bessel_series_sanity() {
    assert!((bessel_j0(0.0) - 1.0).abs() < 1e-15);
    assert!((bessel_j0(2.404_825_557_695_773)).abs() < 1e-12);
    assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-14);
}

#[test]
fn jakes_autocorrelation_tracks_bessel() {
    let doppler = 5e-5;
    let lags = [0usize, 500, 1000, 1500, 2000];
    let seeds = 5000u64;
    let mut acc = [0.0f64; 5];
    for seed in 0..seeds {
        let mut ch = ChannelState::new(&[0.0], doppler, seed).unwrap();
        let h0 = jakes_step(&mut ch)[0];
        let mut t = 0;
        for (a, &lag) in acc.iter_mut().zip(&lags) {
            let mut h = h0;
            while t < lag {
                h = jakes_step(&mut ch)[0];
                t += 1;
            }
            *a += (h0 * h.conj()).re;
        }
    }
    for (a, &lag) in acc.iter().zip(&lags) {
        let measured = a / seeds as f64;
        let expected = bessel_j0(2.0 * std::f64::consts::PI * doppler * lag as f64);
        assert!(
            (measured / expected - 1.0).abs() < 0.05,
            "lag {lag}: measured {measured}, expected {expected}"
        );
    }
}

#[test]
fn noise_only_stream_has_white_covariance() {
    let shape = StreamShape {
        spreading_gain: 7,
        paths: 2,
    };
    let m = shape.window();
    let samples = synthesize_stream(shape, &[], 20_000, 1.0, 5).unwrap();
    let mut cov = CMatrix::zeros(m, m);
    for s in &samples {
        cov += &s.r * s.r.adjoint();
    }
    cov /= Complex64::from(samples.len() as f64);
    let diff = (&cov - CMatrix::identity(m, m)).norm();
    let rel = diff / (m as f64).sqrt();
    assert!(rel < 0.05, "relative Frobenius error {rel}");
}

#[test]
fn noiseless_window_is_signature_plus_isi() {
    let family = generate_gold_family(5).unwrap();
    let shape = StreamShape {
        spreading_gain: 31,
        paths: 3,
    };
    let channel = ChannelState::new(&[0.0, -3.0, -6.0], 0.0, 4).unwrap();
    let taps = jakes_step(&mut channel.clone()).to_vec();
    let user = UserConfig::new(0.7, family[0].clone(), channel).unwrap();
    let samples = synthesize_stream(shape, &[user], 6, 0.0, 8).unwrap();

    // Chip-level oracle: place every symbol's signature at offset iN and read windows back.
    let conv = build_convolution_matrix(&family[0], 3).unwrap();
    let sig: Vec<Complex64> = (0..33)
        .map(|row| (0..3).map(|l| taps[l] * conv.entries()[(row, l)]).sum::<Complex64>() * 0.7)
        .collect();
    let bits: Vec<f64> = samples.iter().map(|s| s.true_bits[0].sign()).collect();
    for i in 1..5 {
        for idx in 0..33 {
            let mut expected = sig[idx] * bits[i];
            if idx + 31 < 33 {
                expected += sig[idx + 31] * bits[i - 1];
            }
            if idx >= 31 {
                expected += sig[idx - 31] * bits[i + 1];
            }
            assert!((samples[i].r[idx] - expected).norm() < 1e-12);
        }
    }
}
