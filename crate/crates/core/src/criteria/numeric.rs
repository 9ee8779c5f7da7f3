//! Finite-difference and quadrature evaluation of the adiabatic conditions.
//!
//! Every function takes an eigenstate trajectory `t -> EigenSystem` in an
//! arbitrary smooth gauge, so the gauge invariance of each quantity can be
//! checked directly. Derivatives use an eighth-order central stencil.

use num_complex::Complex64;

use super::{ConditionReport, RESONANCE_TOL};
use crate::error::Result;
use crate::quadrature;
use crate::spin::{eigensystem, EigenSystem, FieldParams, Spinor};

/// `(offset, weight)` pairs of the antisymmetric 9-point first-derivative
/// stencil.
const STENCIL: [(f64, f64); 4] = [
    (1.0, 4.0 / 5.0),
    (2.0, -1.0 / 5.0),
    (3.0, 4.0 / 105.0),
    (4.0, -1.0 / 280.0),
];

/// Relative tolerance of the Tong integrals.
pub const QUAD_REL_TOL: f64 = 1e-8;

/// Samples used for the sup-over-`[0, T]` conditions.
const SUP_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    /// Step for derivatives of eigenvectors, seconds.
    pub h: f64,
    /// Step for derivatives of derived scalars (coupling ratio, phases).
    pub h_outer: f64,
}

impl FdConfig {
    /// Steps scaled to the fastest of `ω0`, `ω′`.
    pub fn for_params(p: &FieldParams) -> Self {
        let f = p.omega0().max(p.omega_prime());
        Self {
            h: 1e-3 / f,
            h_outer: 1e-2 / f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

fn branch(es: &EigenSystem, b: Branch) -> Spinor {
    match b {
        Branch::Plus => es.v_plus,
        Branch::Minus => es.v_minus,
    }
}

fn derivative_spinor<F: Fn(f64) -> Spinor>(f: F, t: f64, h: f64) -> Spinor {
    let mut acc = Spinor::from_raw(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for &(k, w) in &STENCIL {
        let d = f(t + k * h).sub(&f(t - k * h)).scaled(Complex64::new(w / h, 0.0));
        acc = Spinor::from_raw(acc.a() + d.a(), acc.b() + d.b());
    }
    acc
}

/// Derivative of an eigenvector in the trajectory's own gauge.
pub fn eigenvector_derivative<P: Fn(f64) -> EigenSystem>(path: &P, t: f64, h: f64, b: Branch) -> Spinor {
    derivative_spinor(|s| branch(&path(s), b), t, h)
}

/// Derivative after aligning every stencil point so that
/// `⟨v(t)|v(t+s)⟩` is real and positive.
pub fn aligned_derivative<P: Fn(f64) -> EigenSystem>(path: &P, t: f64, h: f64, b: Branch) -> Spinor {
    let anchor = branch(&path(t), b);
    derivative_spinor(
        |s| {
            let v = branch(&path(s), b);
            let overlap = anchor.inner(&v);
            v.scaled(overlap.conj() / overlap.norm())
        },
        t,
        h,
    )
}

/// `⟨E+|Ė-⟩` at `t` from phase-aligned finite differences.
pub fn coupling_fd<P: Fn(f64) -> EigenSystem>(path: &P, t: f64, h: f64) -> Complex64 {
    path(t).v_plus.inner(&aligned_derivative(path, t, h, Branch::Minus))
}

/// `⟨E_n|Ė_n⟩` in the trajectory's gauge (purely imaginary).
pub fn connection_fd<P: Fn(f64) -> EigenSystem>(path: &P, t: f64, h: f64, b: Branch) -> Complex64 {
    branch(&path(t), b).inner(&eigenvector_derivative(path, t, h, b))
}

/// The pieces of the Wu denominator at one instant, rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WuTerms {
    pub gap: f64,
    /// `Re(i⟨E-|Ė-⟩)`
    pub minus_connection: f64,
    /// `Re(-i⟨E+|Ė+⟩)`
    pub plus_connection: f64,
    /// `d/dt arg⟨E+|Ė-⟩`
    pub arg_rate: f64,
}

impl WuTerms {
    pub fn denominator(&self) -> f64 {
        self.gap + self.minus_connection + self.plus_connection + self.arg_rate
    }
}

/// Phase difference `arg(z1) - arg(z0)` in `(-π, π]`.
fn phase_step(z0: Complex64, z1: Complex64) -> f64 {
    (z1 * z0.conj()).arg()
}

/// `d/dt arg⟨E+|Ė-⟩` from unwrapped phase increments relative to `t`.
fn coupling_arg_rate<P: Fn(f64) -> EigenSystem>(path: &P, t: f64, fd: &FdConfig) -> f64 {
    let c0 = coupling_fd(path, t, fd.h);
    if c0.norm() == 0.0 {
        return 0.0;
    }
    STENCIL
        .iter()
        .map(|&(k, w)| {
            let fwd = phase_step(c0, coupling_fd(path, t + k * fd.h_outer, fd.h));
            let back = phase_step(c0, coupling_fd(path, t - k * fd.h_outer, fd.h));
            w * (fwd - back)
        })
        .sum::<f64>()
        / fd.h_outer
}

pub fn wu_terms<P: Fn(f64) -> EigenSystem>(path: &P, t: f64, fd: &FdConfig) -> WuTerms {
    let i = Complex64::i();
    WuTerms {
        gap: path(t).gap,
        minus_connection: (i * connection_fd(path, t, fd.h, Branch::Minus)).re,
        plus_connection: (-i * connection_fd(path, t, fd.h, Branch::Plus)).re,
        arg_rate: coupling_arg_rate(path, t, fd),
    }
}

/// `|⟨E+|Ė-⟩ / (E+ - E-)|` at `t`.
pub fn c1_at<P: Fn(f64) -> EigenSystem>(path: &P, t: f64, fd: &FdConfig) -> f64 {
    coupling_fd(path, t, fd.h).norm() / path(t).gap
}

/// `(C3, denominator)` at `t`.
pub fn wu_at<P: Fn(f64) -> EigenSystem>(path: &P, t: f64, fd: &FdConfig) -> (f64, f64) {
    let terms = wu_terms(path, t, fd);
    let denom = terms.denominator();
    let coupling = coupling_fd(path, t, fd.h).norm();
    let c3 = if denom.abs() < RESONANCE_TOL * terms.gap {
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

/// `|d/dt(⟨Ẽ+|Ẽ̇-⟩/(E+ - E-))|` in the parallel-transport gauge, evaluated
/// locally. With `ρ = ⟨E+|Ė-⟩/(E+ - E-) = |ρ|e^{iα}` in the trajectory's
/// gauge the transported derivative has modulus
/// `sqrt(|ρ|'² + |ρ|²(α̇ + γ̇- - γ̇+)²)`, `γ̇n = i⟨E_n|Ė_n⟩`. Modulus and phase
/// are differenced separately so a rapidly varying gauge phase does not leak
/// into the stencil truncation error.
pub fn tong_b_integrand<P: Fn(f64) -> EigenSystem>(path: &P, t: f64, fd: &FdConfig) -> f64 {
    let modulus = |s: f64| coupling_fd(path, s, fd.h).norm() / path(s).gap;
    let m = modulus(t);
    if m == 0.0 {
        return 0.0;
    }
    let dm = STENCIL
        .iter()
        .map(|&(k, w)| w * (modulus(t + k * fd.h_outer) - modulus(t - k * fd.h_outer)))
        .sum::<f64>()
        / fd.h_outer;
    let i = Complex64::i();
    let rate_plus = (i * connection_fd(path, t, fd.h, Branch::Plus)).re;
    let rate_minus = (i * connection_fd(path, t, fd.h, Branch::Minus)).re;
    dm.hypot(m * (coupling_arg_rate(path, t, fd) + rate_minus - rate_plus))
}

/// `|⟨E+|Ė-⟩⟨E-|Ė+⟩ / (E+ - E-)|` at `t`.
pub fn tong_c_integrand<P: Fn(f64) -> EigenSystem>(path: &P, t: f64, fd: &FdConfig) -> f64 {
    let es = path(t);
    let up = es.v_minus.inner(&aligned_derivative(path, t, fd.h, Branch::Plus));
    (coupling_fd(path, t, fd.h) * up).norm() / es.gap
}

fn sup_samples(horizon: f64) -> impl Iterator<Item = f64> {
    (0..SUP_SAMPLES).map(move |j| horizon * j as f64 / (SUP_SAMPLES - 1) as f64)
}

/// Tong's conditions from an arbitrary trajectory: sup for A, adaptive
/// quadrature for B and C.
pub fn tong_conditions_numeric<P: Fn(f64) -> EigenSystem>(
    path: &P,
    horizon: f64,
    fd: &FdConfig,
) -> Result<(f64, f64, f64)> {
    super::check_horizon(horizon)?;
    let tong_a = sup_samples(horizon).map(|t| c1_at(path, t, fd)).fold(0.0, f64::max);
    let tong_b = quadrature::integrate(|t| tong_b_integrand(path, t, fd), 0.0, horizon, QUAD_REL_TOL, 0.0)?.value;
    let tong_c = quadrature::integrate(|t| tong_c_integrand(path, t, fd), 0.0, horizon, QUAD_REL_TOL, 0.0)?.value;
    Ok((tong_a, tong_b, tong_c))
}

/// Report built entirely from finite differences on `path`.
pub fn report_from_path<P: Fn(f64) -> EigenSystem>(path: &P, horizon: f64, fd: &FdConfig) -> Result<ConditionReport> {
    let (tong_a, tong_b, tong_c) = tong_conditions_numeric(path, horizon, fd)?;
    let (wu_c3, wu_denominator) =
        sup_samples(horizon)
            .map(|t| wu_at(path, t, fd))
            .fold(
                (f64::NEG_INFINITY, 0.0),
                |best, cur| if cur.0 > best.0 { cur } else { best },
            );
    let gap = path(0.0).gap;
    Ok(ConditionReport {
        c1: tong_a,
        tong_a,
        tong_b,
        tong_c,
        wu_c3,
        wu_denominator,
        resonant: wu_denominator.abs() < RESONANCE_TOL * gap,
        horizon,
    })
}

/// [`report_from_path`] on the closed-form eigensystem.
pub fn numeric_report(p: &FieldParams, horizon: Option<f64>) -> Result<ConditionReport> {
    let horizon = horizon.unwrap_or_else(|| p.default_horizon());
    report_from_path(&|t| eigensystem(t, p), horizon, &FdConfig::for_params(p))
}
