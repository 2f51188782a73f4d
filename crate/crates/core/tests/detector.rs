mod common;

use common::*;
use jiomber::detector::{
    error_probability, filter_and_decide, gradient_s, gradient_w, kernel_density, project, q_function,
    DecisionStatistic, ProjectionMatrix, ReducedRankFilter,
};
use jiomber::jio::{JioParams, JioState};
use jiomber::{Bit, CMatrix, CVector};
use num_complex::Complex64;
use rand::Rng;

#[test]
fn q_function_matches_series_oracle() {
    for i in -32..=32 {
        let x = i as f64 * 0.25;
        let err = (q_function(x) - q_oracle(x)).abs();
        assert!(err <= 1e-12, "x = {x}: error {err}");
    }
}

#[test]
fn q_oracle_sanity() {
    assert!((q_oracle(0.0) - 0.5).abs() < 1e-16);
    assert!((q_oracle(1.0) - 0.158_655_253_931_457_05).abs() < 1e-15);
    assert!((q_oracle(-2.0) + q_oracle(2.0) - 1.0).abs() < 1e-15);
}

#[test]
fn kernel_density_integrates_to_error_probability() {
    // ∫_{-∞}^{0} p(x̃) dx̃ with p centred at the statistic equals Q(center/(ρ√n)).
    for (center, n, rho) in [(0.3, 1.0, 0.2), (-0.1, 2.5, 0.5), (1.2, 0.7, 1.0)] {
        let sd = rho * f64::sqrt(n);
        let lo = center - 12.0 * sd;
        let steps = 200_000;
        let h = (0.0 - lo) / steps as f64;
        let mut integral = 0.0;
        for k in 0..steps {
            let x = lo + (k as f64 + 0.5) * h;
            integral += kernel_density(x, center, n, rho).unwrap() * h;
        }
        let stat = DecisionStatistic::new(Complex64::new(center, 0.4), Bit::Plus);
        let p = error_probability(&stat, n, rho).unwrap();
        assert!((integral - p).abs() < 1e-8, "{integral} vs {p}");
    }
}

#[test]
fn project_and_decide_follow_definitions() {
    let mut g = rng(3);
    for _ in 0..20 {
        let m = g.random_range(1..9);
        let d = g.random_range(1..=m);
        let s = cmat(&mut g, m, d);
        let r = cvec(&mut g, m);
        let w = cvec(&mut g, d);
        let rbar = project(&ProjectionMatrix::new(s.clone()).unwrap(), &r).unwrap();
        let expected = s.adjoint() * &r;
        assert!(rel_err(&CMatrix::from_column_slice(d, 1, rbar.as_slice()), &CMatrix::from_column_slice(d, 1, expected.as_slice())) < 1e-14);
        let (stat, bit) = filter_and_decide(&ReducedRankFilter::new(w.clone()), &rbar).unwrap();
        let x = (w.adjoint() * &rbar)[(0, 0)];
        assert!((stat.x - x).norm() < 1e-12 * (1.0 + x.norm()));
        assert_eq!(bit, if x.re >= 0.0 { Bit::Plus } else { Bit::Minus });
        assert!(stat.signed_real >= 0.0);
    }
}

/// Wirtinger derivative `∂f/∂z*` from central differences: `½(∂f/∂a + j·∂f/∂b)`.
fn fd_wirtinger(f: impl Fn(Complex64) -> f64, h: f64) -> Complex64 {
    let da = (f(Complex64::new(h, 0.0)) - f(Complex64::new(-h, 0.0))) / (2.0 * h);
    let db = (f(Complex64::new(0.0, h)) - f(Complex64::new(0.0, -h))) / (2.0 * h);
    Complex64::new(da, db) * 0.5
}

struct Instance {
    s: CMatrix,
    w: CVector,
    r: CVector,
    b: Bit,
    rho: f64,
}

fn instance(seed: u64) -> Instance {
    let mut g = rng(seed);
    let m = g.random_range(2..=8);
    let d = g.random_range(1..=4.min(m));
    let s = cmat(&mut g, m, d);
    let w = cvec(&mut g, d);
    let r = cvec(&mut g, m) * Complex64::from(0.3);
    let b = bit(&mut g);
    let rho = g.random_range(0.5..2.0);
    // Start on the unit-norm constraint surface.
    let n = (&s * &w).norm();
    let w = w / Complex64::from(n);
    Instance { s, w, r, b, rho }
}

fn numerical_gradients(inst: &Instance) -> (CMatrix, CMatrix) {
    let h = 1e-6;
    let (m, d) = inst.s.shape();
    let gw = CMatrix::from_fn(d, 1, |i, _| {
        fd_wirtinger(
            |dz| {
                let mut w = inst.w.clone();
                w[i] += dz;
                cost_oracle(&inst.s, &w, &inst.r, inst.b, inst.rho)
            },
            h,
        )
    });
    let gs = CMatrix::from_fn(m, d, |i, j| {
        fd_wirtinger(
            |dz| {
                let mut s = inst.s.clone();
                s[(i, j)] += dz;
                cost_oracle(&s, &inst.w, &inst.r, inst.b, inst.rho)
            },
            h,
        )
    });
    (gw, gs)
}

#[test]
fn analytic_gradients_match_finite_differences() {
    let mut worst: f64 = 0.0;
    for seed in 0..100 {
        let inst = instance(seed);
        let (gw_fd, gs_fd) = numerical_gradients(&inst);
        let s = ProjectionMatrix::new(inst.s.clone()).unwrap();
        let w = ReducedRankFilter::new(inst.w.clone());
        let gw = gradient_w(&s, &w, &inst.r, inst.b, inst.rho).unwrap();
        let gs = gradient_s(&s, &w, &inst.r, inst.b, inst.rho).unwrap();
        let ew = rel_err(&CMatrix::from_column_slice(gw.len(), 1, gw.as_slice()), &gw_fd);
        let es = rel_err(&gs, &gs_fd);
        worst = worst.max(ew).max(es);
        assert!(ew <= 1e-6 && es <= 1e-6, "seed {seed}: w error {ew}, S error {es}");
    }
    assert!(worst <= 1e-6);
}

#[test]
fn gradients_hold_off_unit_norm() {
    for seed in 200..220 {
        let mut inst = instance(seed);
        inst.w *= Complex64::new(1.7, -0.4);
        let (gw_fd, gs_fd) = numerical_gradients(&inst);
        let s = ProjectionMatrix::new(inst.s.clone()).unwrap();
        let w = ReducedRankFilter::new(inst.w.clone());
        let gw = gradient_w(&s, &w, &inst.r, inst.b, inst.rho).unwrap();
        let gs = gradient_s(&s, &w, &inst.r, inst.b, inst.rho).unwrap();
        assert!(rel_err(&CMatrix::from_column_slice(gw.len(), 1, gw.as_slice()), &gw_fd) <= 1e-6);
        assert!(rel_err(&gs, &gs_fd) <= 1e-6);
    }
}

fn state_for(inst: &Instance, mu_w: f64, mu_s: f64) -> JioState {
    let (m, d) = inst.s.shape();
    let mut st = JioState::new(
        m,
        d,
        JioParams {
            mu_w,
            mu_s,
            cycles: 1,
            rho: inst.rho,
        },
    )
    .unwrap();
    st.set_pair(inst.s.clone(), inst.w.clone()).unwrap();
    st
}

#[test]
fn updates_are_gradient_steps_at_unit_norm() {
    for seed in 300..400 {
        let inst = instance(seed);
        let (mu_w, mu_s) = (0.07, 0.03);
        let st = state_for(&inst, mu_w, mu_s);
        let s = ProjectionMatrix::new(inst.s.clone()).unwrap();
        let w = ReducedRankFilter::new(inst.w.clone());
        let gw = gradient_w(&s, &w, &inst.r, inst.b, inst.rho).unwrap();
        let gs = gradient_s(&s, &w, &inst.r, inst.b, inst.rho).unwrap();

        let w_new = st.update_filter(&inst.r, inst.b).unwrap();
        let w_ref = &inst.w - gw * Complex64::from(mu_w);
        assert!((w_new.vector() - &w_ref).norm() <= 1e-12);

        let s_new = st.update_projection(&inst.r, inst.b).unwrap();
        let s_ref = &inst.s - gs * Complex64::from(mu_s);
        assert!((s_new.matrix() - &s_ref).norm() <= 1e-12);
    }
}

#[test]
fn small_steps_descend_the_cost() {
    let mu = 1e-6;
    let mut checked = 0;
    for seed in 500..640 {
        let inst = instance(seed);
        let before = cost_oracle(&inst.s, &inst.w, &inst.r, inst.b, inst.rho);
        let st = state_for(&inst, mu, mu);
        let w_new = st.update_filter(&inst.r, inst.b).unwrap();
        let s_new = st.update_projection(&inst.r, inst.b).unwrap();
        let after_w = cost_oracle(&inst.s, w_new.vector(), &inst.r, inst.b, inst.rho);
        let after_s = cost_oracle(s_new.matrix(), &inst.w, &inst.r, inst.b, inst.rho);
        let after_joint = cost_oracle(s_new.matrix(), w_new.vector(), &inst.r, inst.b, inst.rho);
        // Resolution limit of the cost evaluation.
        let tol = 1e-15;
        assert!(after_w <= before + tol, "seed {seed}: filter step raised {before} to {after_w}");
        assert!(after_s <= before + tol, "seed {seed}: projection step raised {before} to {after_s}");
        assert!(after_joint <= before + tol, "seed {seed}: joint step raised {before} to {after_joint}");
        checked += 1;
    }
    assert!(checked >= 100);
}
