//! Adiabaticity measures for the rotating-field Hamiltonian.
//!
//! Closed forms live here. [`numeric`] evaluates the same quantities from an
//! arbitrary eigenstate trajectory by finite differences and adaptive
//! quadrature, and [`gauge`] builds parallel-transported trajectories.
//!
//! With `φ = 2πω′t`, the fixed-gauge eigenstates
//! `|E+⟩ = (cos θ/2, e^{iφ} sin θ/2)` and `|E-⟩ = (sin θ/2, -e^{iφ} cos θ/2)`
//! give `⟨E+|Ė-⟩ = -iφ̇ sin θ / 2`, `⟨E+|Ė+⟩ = iφ̇ sin²(θ/2)` and
//! `⟨E-|Ė-⟩ = iφ̇ cos²(θ/2)`. Everything below follows from these.

pub mod gauge;
pub mod numeric;

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::spin::FieldParams;
use crate::TWO_PI;

/// `|wu_denominator| < RESONANCE_TOL · gap` counts as resonance.
pub const RESONANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    pub c1: f64,
    pub tong_a: f64,
    /// The integral condition on the derivative of the coupling ratio.
    pub tong_b: f64,
    pub tong_c: f64,
    /// `+inf` at resonance.
    pub wu_c3: f64,
    /// Signed, rad/s.
    pub wu_denominator: f64,
    pub resonant: bool,
    /// Integration horizon `T`, seconds.
    pub horizon: f64,
}

/// Angular rotation rate of the rf field, `2πω′` (rad/s).
fn rotation_rate(p: &FieldParams) -> f64 {
    TWO_PI * p.omega_prime()
}

fn gap(p: &FieldParams) -> f64 {
    TWO_PI * p.field_strength()
}

/// `⟨E+(t)|Ė-(t)⟩` in the fixed gauge (1/s). Independent of `t`.
pub fn coupling_term(_t: f64, p: &FieldParams) -> Complex64 {
    Complex64::new(0.0, -0.5 * rotation_rate(p) * p.theta().sin())
}

/// `|⟨E+|Ė-⟩| / (E+ - E-)`, equal to `K R / (2(1 + R²))`.
pub fn c1_traditional(p: &FieldParams) -> f64 {
    coupling_term(0.0, p).norm() / gap(p)
}

/// Berry connection rates `(γ̇+, γ̇-)` of the parallel-transport gauge,
/// `-2πω′ sin²(θ/2)` and `-2πω′ cos²(θ/2)`.
pub fn transport_rates(p: &FieldParams) -> (f64, f64) {
    let (s, c) = (0.5 * p.theta()).sin_cos();
    let w = rotation_rate(p);
    (-w * s * s, -w * c * c)
}

fn check_horizon(horizon: f64) -> Result<()> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(CoreError::InvalidParams(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    Ok(())
}

/// Tong's three conditions over `[0, horizon]`.
///
/// In the parallel-transport gauge the coupling ratio keeps a constant
/// modulus and rotates at `γ̇- - γ̇+ = -2πω′ cos θ`, so
/// `tong_b = C1 · 2πω′ cos θ · T` and
/// `tong_c = |⟨E+|Ė-⟩|² / (E+ - E-) · T`. For `T = 1/ω′` these reduce to
/// `πK sin θ cos²θ` and `(π/2) K sin²θ cos θ`.
pub fn tong_conditions(p: &FieldParams, horizon: f64) -> Result<(f64, f64, f64)> {
    check_horizon(horizon)?;
    let c1 = c1_traditional(p);
    let coupling = coupling_term(0.0, p).norm();
    let tong_b = c1 * rotation_rate(p) * p.theta().cos() * horizon;
    let tong_c = coupling * coupling / gap(p) * horizon;
    Ok((c1, tong_b, tong_c))
}

/// Signed Wu denominator `E+ - E- + i⟨E-|Ė-⟩ - i⟨E+|Ė+⟩`
/// `= 2π[sqrt(ω0² + ω1²) - ω′ cos θ]`, evaluated as
/// `2π(ω0² + ω1² - ω′ω0)/sqrt(ω0² + ω1²)` to keep the zero at
/// `K = 1 + R²` sharp.
pub fn wu_denominator(p: &FieldParams) -> f64 {
    let (w0, w1, wp) = (p.omega0(), p.omega1(), p.omega_prime());
    TWO_PI * (w0 * w0 + w1 * w1 - wp * w0) / p.field_strength()
}

pub fn is_resonant(p: &FieldParams) -> bool {
    wu_denominator(p).abs() < RESONANCE_TOL * gap(p)
}

/// `(C3, denominator)`; `C3 = +inf` at resonance.
pub fn wu_condition(p: &FieldParams) -> (f64, f64) {
    let denom = wu_denominator(p);
    let coupling = coupling_term(0.0, p).norm();
    let c3 = if is_resonant(p) {
        if coupling == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        coupling / denom.abs()
    };
    (c3, denom)
}

/// All conditions from their closed forms. `horizon` defaults to one rf
/// revolution.
pub fn full_report(p: &FieldParams, horizon: Option<f64>) -> Result<ConditionReport> {
    let horizon = horizon.unwrap_or_else(|| p.default_horizon());
    let (tong_a, tong_b, tong_c) = tong_conditions(p, horizon)?;
    let (wu_c3, wu_denominator) = wu_condition(p);
    Ok(ConditionReport {
        c1: c1_traditional(p),
        tong_a,
        tong_b,
        tong_c,
        wu_c3,
        wu_denominator,
        resonant: is_resonant(p),
        horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn params(k: f64, r: f64) -> FieldParams {
        FieldParams::from_ratios_with_omega0(k, r, 1700.0).unwrap()
    }

    #[test]
    fn coupling_magnitude() {
        let p = params(1.0, 0.06);
        assert_relative_eq!(coupling_term(0.0, &p).norm(), 319.87, epsilon = 0.01);
        assert_eq!(coupling_term(0.4, &params(3.0, 0.0)).norm(), 0.0);
    }

    #[test]
    fn c1_values() {
        assert_relative_eq!(c1_traditional(&params(1.0, 0.06)), 0.02989, epsilon = 1e-5);
        assert_relative_eq!(c1_traditional(&params(10.0, 0.06)), 0.29893, epsilon = 1e-5);
        assert_eq!(c1_traditional(&params(5.0, 0.0)), 0.0);
        for (k, r) in [(0.3, 0.2), (2.0, 0.7), (1.1, 0.01)] {
            assert_relative_eq!(
                c1_traditional(&params(k, r)),
                k * r / (2.0 * (1.0 + r * r)),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn transport_rate_difference() {
        let p = params(1.0, 0.06);
        let (plus, minus) = transport_rates(&p);
        assert_relative_eq!(minus - plus, -TWO_PI * 1700.0 * 0.99821, max_relative = 1e-5);
    }

    #[test]
    fn tong_values() {
        let p = params(1.0, 0.06);
        let (a, b, c) = tong_conditions(&p, p.default_horizon()).unwrap();
        assert_eq!(a, c1_traditional(&p));
        // π K sin θ cos²θ and (π/2) K sin²θ cos θ
        let th = p.theta();
        assert_relative_eq!(b, PI * th.sin() * th.cos().powi(2), max_relative = 1e-14);
        assert_relative_eq!(b, 0.18748, epsilon = 1e-5);
        assert_relative_eq!(c, 0.5 * PI * th.sin().powi(2) * th.cos(), max_relative = 1e-14);
        assert_relative_eq!(c, 0.005624, epsilon = 1e-6);
        assert!(b > a && a > c);
        assert_eq!(tong_conditions(&params(4.0, 0.0), 1e-3).unwrap(), (0.0, 0.0, 0.0));
        assert!(tong_conditions(&p, 0.0).is_err());
    }

    #[test]
    fn wu_values() {
        let (c3, d) = wu_condition(&params(1.0, 0.06));
        assert_relative_eq!(c3, 1.0 / 0.12, max_relative = 1e-9);
        assert!(d > 0.0);
        let (c3, d) = wu_condition(&params(10.0, 0.06));
        assert_relative_eq!(c3, 0.03335, epsilon = 1e-5);
        assert!(d < 0.0);
        assert_eq!(wu_condition(&params(2.0, 0.0)).0, 0.0);
    }

    #[test]
    fn wu_resonance_locus() {
        for r in [0.05, 0.06, 0.3, 1.0] {
            let p = FieldParams::from_ratios(1.0 + r * r, r, 100.0).unwrap();
            let (c3, _) = wu_condition(&p);
            assert!(is_resonant(&p));
            assert_eq!(c3, f64::INFINITY);
        }
        assert!(is_resonant(&FieldParams::from_ratios(1.0036, 0.06, 100.0).unwrap()));
        assert!(!is_resonant(&FieldParams::from_ratios(1.0037, 0.06, 100.0).unwrap()));
    }

    #[test]
    fn wu_denominator_sign_structure() {
        let r = 0.1;
        let mut last = f64::INFINITY;
        for i in 0..200 {
            let k = 0.02 + i as f64 * 0.01;
            let d = wu_denominator(&params(k, r));
            assert!(d < last);
            assert_eq!(d > 0.0, k < 1.0 + r * r);
            last = d;
        }
    }

    #[test]
    fn report_aggregates() {
        let rep = full_report(&params(1.0, 0.06), None).unwrap();
        assert_relative_eq!(rep.horizon, 1.0 / 1700.0);
        assert_relative_eq!(rep.c1, 0.02989, epsilon = 1e-5);
        assert_relative_eq!(rep.tong_b, 0.18748, epsilon = 1e-5);
        assert_relative_eq!(rep.wu_c3, 8.3333, epsilon = 1e-4);
        assert!(!rep.resonant);
        assert_eq!(rep.tong_a, rep.c1);

        let rep = full_report(&params(1.0, 0.0), None).unwrap();
        assert_eq!(
            (rep.c1, rep.tong_a, rep.tong_b, rep.tong_c, rep.wu_c3),
            (0.0, 0.0, 0.0, 0.0, 0.0)
        );

        let rep = full_report(&params(1.0036, 0.06), None).unwrap();
        assert!(rep.resonant);
        assert_eq!(rep.wu_c3, f64::INFINITY);

        // static field: horizon falls back to 1/ω0
        let rep = full_report(&params(0.0, 0.1), None).unwrap();
        assert_relative_eq!(rep.horizon, 1.0 / 1700.0);
        assert_eq!(rep.c1, 0.0);
    }
}
