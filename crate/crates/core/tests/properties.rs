use adiabatic_core::criteria::numeric::{c1_at, report_from_path, tong_b_integrand, wu_at, FdConfig};
use adiabatic_core::criteria::{full_report, is_resonant, wu_denominator};
use adiabatic_core::integrators::{make_schedule, pulse_sequence_evolve};
use adiabatic_core::spin::{fidelity_closed, t_min};
use adiabatic_core::sweep::{surface_sweep, GridSpec, Quantity};
use adiabatic_core::{eigensystem, exact_state, f_min_closed, fidelity, EigenSystem, FieldParams, Matrix2H};
use proptest::prelude::*;

fn ratios() -> impl Strategy<Value = FieldParams> {
    (0.0f64..20.0, 0.005f64..2.0).prop_map(|(k, r)| FieldParams::from_ratios(k, r, 100.0).unwrap())
}

/// Off-resonant points of the criterion grid.
fn grid_point() -> impl Strategy<Value = FieldParams> {
    (0.5f64..1.5, 0.05f64..0.3)
        .prop_map(|(k, r)| FieldParams::from_ratios(k, r, 100.0).unwrap())
        .prop_filter("near resonance", |p| {
            wu_denominator(p).abs() > 1e-6 * eigensystem(0.0, p).gap
        })
}

#[derive(Debug, Clone, Copy)]
struct Gauge {
    amp: f64,
    freq: f64,
    offset: f64,
    drift: f64,
}

impl Gauge {
    fn phase(&self, t: f64) -> f64 {
        self.amp * (std::f64::consts::TAU * self.freq * t + self.offset).sin() + self.drift * t
    }
}

/// Smooth phases slow enough for the finite-difference steps to resolve.
fn gauge(p: &FieldParams) -> impl Strategy<Value = Gauge> {
    let f = p.omega0().max(p.omega_prime());
    (0.0f64..3.0, 0.05f64..1.0, 0.0f64..6.3, -2.0f64..2.0).prop_map(move |(amp, rel, offset, drift)| Gauge {
        amp,
        freq: rel * f,
        offset,
        drift: drift * f,
    })
}

fn regauged(p: FieldParams, gp: Gauge, gm: Gauge) -> impl Fn(f64) -> EigenSystem {
    move |t| {
        let mut es = eigensystem(t, &p);
        es.v_plus = es.v_plus.with_phase(gp.phase(t));
        es.v_minus = es.v_minus.with_phase(gm.phase(t));
        es
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn propagator_is_unitary(h0 in -1e4f64..1e4, hx in -1e4f64..1e4, hy in -1e4f64..1e4, hz in -1e4f64..1e4, dt in 1e-9f64..1e-2) {
        let u = Matrix2H::from_pauli(h0, hx, hy, hz).propagator(dt);
        prop_assert!(u.unitarity_defect() < 1e-13);
    }

    #[test]
    fn fidelity_bounded_by_minimum(p in ratios(), x in 0.0f64..1.0) {
        let fmin = f_min_closed(&p).unwrap();
        let t = x * 3.0 / p.f_eff();
        let f = fidelity_closed(t, &p);
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!(f >= fmin - 1e-12);
        prop_assert!((fidelity_closed(t_min(&p).unwrap(), &p) - fmin).abs() < 1e-12);
    }

    #[test]
    fn closed_form_agrees_with_exact_state(p in ratios(), x in 0.0f64..1.0) {
        let t = x * 2.0 / p.f_eff();
        let direct = fidelity(&exact_state(t, &p), &eigensystem(t, &p).v_plus);
        prop_assert!((direct - fidelity_closed(t, &p)).abs() < 1e-10);
    }

    #[test]
    fn exact_state_stays_normalized(p in ratios(), t in 0.0f64..1.0) {
        prop_assert!((exact_state(t, &p).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pulse_sequence_preserves_norm(p in ratios().prop_filter("static", |p| p.omega_prime() > 0.0)) {
        let res = pulse_sequence_evolve(&p, &make_schedule(&p, 15).unwrap()).unwrap();
        prop_assert!((res.final_state.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wu_sign_structure(k in 0.0f64..5.0, r in 0.01f64..1.0) {
        let p = FieldParams::from_ratios(k, r, 100.0).unwrap();
        prop_assume!(!is_resonant(&p));
        prop_assert_eq!(wu_denominator(&p) > 0.0, k < 1.0 + r * r);
    }

    #[test]
    fn sweep_independent_of_jobs(
        ks in prop::collection::btree_set(1u32..400, 1..6),
        rs in prop::collection::btree_set(1u32..100, 1..6),
        jobs in 2usize..9,
    ) {
        let ks: Vec<f64> = ks.into_iter().map(|k| k as f64 / 100.0).collect();
        let rs: Vec<f64> = rs.into_iter().map(|r| r as f64 / 200.0).collect();
        let g = GridSpec::new(ks, rs, 100.0, &Quantity::ALL).unwrap();
        prop_assert_eq!(surface_sweep(&g, Some(1)).unwrap(), surface_sweep(&g, Some(jobs)).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pointwise_criteria_are_gauge_invariant(
        (p, gp, gm) in grid_point().prop_flat_map(|p| (Just(p), gauge(&p), gauge(&p))),
        x in 0.0f64..1.0,
    ) {
        let fd = FdConfig::for_params(&p);
        let t = x * p.default_horizon();
        let fixed = |s: f64| eigensystem(s, &p);
        let moved = regauged(p, gp, gm);
        prop_assert!(rel(c1_at(&moved, t, &fd), c1_at(&fixed, t, &fd)) < 1e-8);
        let (c3, den) = wu_at(&moved, t, &fd);
        let (c3_ref, den_ref) = wu_at(&fixed, t, &fd);
        prop_assert!(rel(c3, c3_ref) < 1e-8, "{} vs {}", c3, c3_ref);
        prop_assert!(rel(den, den_ref) < 1e-8);
        prop_assert!(rel(tong_b_integrand(&moved, t, &fd), tong_b_integrand(&fixed, t, &fd)) < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn numeric_report_is_gauge_invariant_and_matches_closed_form(
        (p, gp, gm) in grid_point().prop_flat_map(|p| (Just(p), gauge(&p), gauge(&p))),
    ) {
        let fd = FdConfig::for_params(&p);
        let exact = full_report(&p, None).unwrap();
        let num = report_from_path(&regauged(p, gp, gm), exact.horizon, &fd).unwrap();
        for (a, b) in [
            (num.c1, exact.c1),
            (num.tong_b, exact.tong_b),
            (num.tong_c, exact.tong_c),
            (num.wu_c3, exact.wu_c3),
        ] {
            prop_assert!(rel(a, b) < 1e-6, "{} vs {}", a, b);
        }
    }
}
