mod common;

use common::*;
use jiomber::complexity::{op_count, Algorithm, OpParams};
use jiomber::detector::{error_probability, q_function, DecisionStatistic};
use jiomber::jio::{jio_step, select_rank, JioParams, JioState, RankSelectionConfig};
use jiomber::signal::{build_convolution_matrix, generate_gold_family, synthesize_stream, ChannelState, StreamShape, UserConfig};
use jiomber::{Bit, CVector};
use num_complex::Complex64;
use proptest::prelude::*;

fn state(seed: u64, m: usize, d: usize, mu: f64, cycles: usize) -> (JioState, rand_chacha::ChaCha8Rng) {
    let mut g = rng(seed);
    let s = cmat(&mut g, m, d);
    let w = normalise(&s, &cvec(&mut g, d));
    let mut st = JioState::new(
        m,
        d,
        JioParams {
            mu_w: mu,
            mu_s: mu,
            cycles,
            rho: 0.7,
        },
    )
    .unwrap();
    st.set_pair(s, w).unwrap();
    (st, g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_columns_have_unit_energy(k in 0usize..33, paths in 1usize..6) {
        let family = generate_gold_family(5).unwrap();
        let c = build_convolution_matrix(&family[k], paths).unwrap();
        for col in 0..paths {
            let e: f64 = c.entries().column(col).iter().map(|x| x * x).sum();
            prop_assert!((e - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn stream_is_reproducible(seed in any::<u64>(), users in 1usize..4) {
        let family = generate_gold_family(5).unwrap();
        let make = || -> Vec<UserConfig> {
            (0..users)
                .map(|k| UserConfig::new(1.0, family[k].clone(), ChannelState::new(&[0.0, -7.0], 1e-3, seed ^ k as u64).unwrap()).unwrap())
                .collect()
        };
        let shape = StreamShape { spreading_gain: 31, paths: 2 };
        let a = synthesize_stream(shape, &make(), 20, 0.3, seed).unwrap();
        let b = synthesize_stream(shape, &make(), 20, 0.3, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn noiseless_matched_filter_recovers_bits(seed in any::<u64>(), k in 0usize..33) {
        let family = generate_gold_family(5).unwrap();
        let code = family[k].clone();
        let user = UserConfig::new(1.0, code.clone(), ChannelState::flat_unit()).unwrap();
        let shape = StreamShape { spreading_gain: 31, paths: 1 };
        for s in synthesize_stream(shape, &[user], 30, 0.0, seed).unwrap() {
            let mf: f64 = code.chips().iter().zip(s.r.iter()).map(|(c, r)| c * r.re).sum();
            prop_assert!((mf - s.true_bits[0].sign()).abs() < 1e-12);
            prop_assert!(s.r.iter().all(|z| z.im == 0.0));
        }
    }

    #[test]
    fn error_probability_strictly_decreases(a in -6.0f64..6.0, gap in 1e-3f64..2.0, n in 0.1f64..4.0, rho in 0.1f64..3.0) {
        let lo = DecisionStatistic::new(Complex64::new(a * rho * n.sqrt(), 0.0), Bit::Plus);
        let hi = DecisionStatistic::new(Complex64::new((a + gap) * rho * n.sqrt(), 0.0), Bit::Plus);
        prop_assert!(error_probability(&hi, n, rho).unwrap() < error_probability(&lo, n, rho).unwrap());
    }

    #[test]
    fn error_probability_ignores_positive_scaling(x in -3.0f64..3.0, n in 0.1f64..4.0, rho in 0.1f64..3.0, k in -6i32..6, c in 0.01f64..100.0) {
        let stat = DecisionStatistic::new(Complex64::new(x, 0.5), Bit::Minus);
        let p = error_probability(&stat, n, rho).unwrap();
        // Powers of two scale without rounding.
        let p2 = 2f64.powi(k);
        let scaled = DecisionStatistic::new(Complex64::new(x * p2, 0.5 * p2), Bit::Minus);
        prop_assert_eq!(error_probability(&scaled, n * p2 * p2, rho).unwrap(), p);
        let scaled = DecisionStatistic::new(Complex64::new(x * c, 0.5 * c), Bit::Minus);
        prop_assert!((error_probability(&scaled, n * c * c, rho).unwrap() - p).abs() < 1e-14);
    }

    #[test]
    fn q_is_antisymmetric_about_one_half(x in -8.0f64..8.0) {
        prop_assert!((q_function(x) + q_function(-x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn step_preserves_unit_norm(seed in any::<u64>(), m in 2usize..12, cycles in 1usize..4) {
        let d = 1 + (seed as usize) % m;
        let (mut st, mut g) = state(seed, m, d, 0.05, cycles);
        for _ in 0..30 {
            let r = cvec(&mut g, m);
            let b = bit(&mut g);
            jio_step(&mut st, &r, Some(b)).unwrap();
            prop_assert!((st.norm_sq() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn frozen_steps_decide_from_the_initial_state(seed in any::<u64>(), m in 2usize..10) {
        let (mut st, mut g) = state(seed, m, 1 + m / 2, 0.0, 2);
        let frozen = st.clone();
        for _ in 0..20 {
            let r = cvec(&mut g, m);
            let out = jio_step(&mut st, &r, Some(bit(&mut g))).unwrap();
            prop_assert_eq!(out.decision, Bit::decide(frozen.output(&r).unwrap().re));
        }
    }

    #[test]
    fn training_step_is_invariant_under_joint_negation(seed in any::<u64>(), m in 2usize..10) {
        let (st, mut g) = state(seed, m, 1 + m / 3, 0.05, 3);
        let (mut a, mut b) = (st.clone(), st);
        for _ in 0..10 {
            let r = cvec(&mut g, m);
            let bit = bit(&mut g);
            jio_step(&mut a, &r, Some(bit)).unwrap();
            jio_step(&mut b, &-r.clone(), Some(bit.flip())).unwrap();
        }
        prop_assert_eq!(a.s(), b.s());
        prop_assert_eq!(a.w(), b.w());
    }

    #[test]
    fn selected_rank_is_in_range(seed in any::<u64>(), d_min in 1usize..5, extra in 0usize..6) {
        let d_max = d_min + extra;
        let (st, mut g) = state(seed, 12, d_max, 0.05, 1);
        let r: CVector = cvec(&mut g, 12);
        let d = select_rank(&st, &RankSelectionConfig::new(d_min, d_max), &r, bit(&mut g)).unwrap();
        prop_assert!((d_min..=d_max).contains(&d));
    }

    #[test]
    fn complexity_rows_are_monotone_in_rank(m in 2u64..200, d in 1u64..40, j in 1u64..8, lp in 1u64..6) {
        let at = |d| OpParams { m: Some(m), d: Some(d), j: Some(j), lp: Some(lp), d_max: Some(40) };
        for alg in Algorithm::ALL {
            let (a, b) = (op_count(alg, at(d)).unwrap(), op_count(alg, at(d + 1)).unwrap());
            prop_assert!(b.multiplications >= a.multiplications && b.additions >= a.additions, "{}", alg);
        }
        let one = op_count(Algorithm::JioMber, OpParams { j: Some(1), ..at(d) }).unwrap();
        let many = op_count(Algorithm::JioMber, at(d)).unwrap();
        prop_assert_eq!(many.multiplications, j * one.multiplications);
        prop_assert_eq!(many.additions, j * one.additions);
    }
}
