//! Physical types and closed-form quantities of the rotating-field problem.

use std::fmt;

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::matrix::{Matrix2H, Unitary2};
use crate::TWO_PI;

const NORM_TOL: f64 = 1e-12;

/// Field frequencies in Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    omega0: f64,
    omega1: f64,
    omega_prime: f64,
}

impl FieldParams {
    /// `omega0` is the Larmor frequency, `omega1` the rf coupling strength and
    /// `omega_prime` the rotation frequency of the rf field, all in Hz.
    pub fn new(omega0: f64, omega1: f64, omega_prime: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(CoreError::InvalidParams(format!(
                "omega0 must be positive and finite, got {omega0}"
            )));
        }
        if !(omega1.is_finite() && omega1 >= 0.0) {
            return Err(CoreError::InvalidParams(format!(
                "omega1 must be non-negative and finite, got {omega1}"
            )));
        }
        if !(omega_prime.is_finite() && omega_prime >= 0.0) {
            return Err(CoreError::InvalidParams(format!(
                "omega_prime must be non-negative and finite, got {omega_prime}"
            )));
        }
        Ok(Self {
            omega0,
            omega1,
            omega_prime,
        })
    }

    /// Fixed rf strength `omega1`, with `omega0 = omega1 / r` and
    /// `omega_prime = k * omega0` (the sweep convention).
    pub fn from_ratios(k: f64, r: f64, omega1: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(CoreError::InvalidParams(format!(
                "R must be positive to derive omega0 from omega1, got {r}"
            )));
        }
        let omega0 = omega1 / r;
        Self::new(omega0, omega1, k * omega0)
    }

    /// Fixed Larmor frequency, with `omega1 = r * omega0` and
    /// `omega_prime = k * omega0`.
    pub fn from_ratios_with_omega0(k: f64, r: f64, omega0: f64) -> Result<Self> {
        Self::new(omega0, r * omega0, k * omega0)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn omega_prime(&self) -> f64 {
        self.omega_prime
    }

    /// `R = ω1/ω0`
    pub fn r(&self) -> f64 {
        self.omega1 / self.omega0
    }

    /// `K = ω′/ω0`
    pub fn k(&self) -> f64 {
        self.omega_prime / self.omega0
    }

    /// Tilt of the field from the z axis, `arctan R`, in `[0, π/2)`.
    pub fn theta(&self) -> f64 {
        self.r().atan()
    }

    /// Total field strength `sqrt(ω0² + ω1²)` in Hz.
    pub fn field_strength(&self) -> f64 {
        self.omega0.hypot(self.omega1)
    }

    /// Rabi frequency in the rotating frame, `sqrt((ω0-ω′)² + ω1²)` in Hz.
    pub fn f_eff(&self) -> f64 {
        (self.omega0 - self.omega_prime).hypot(self.omega1)
    }

    /// Tilt of the rotating-frame field, `atan2(R, 1-K)` in `[0, π]`.
    pub fn theta_eff(&self) -> f64 {
        self.omega1.atan2(self.omega0 - self.omega_prime)
    }

    /// Phase of the rf field at time `t`, `2πω′t`.
    pub fn field_phase(&self, t: f64) -> f64 {
        TWO_PI * self.omega_prime * t
    }

    /// One rf revolution `1/ω′`, falling back to `1/ω0` for a static field.
    pub fn default_horizon(&self) -> f64 {
        if self.omega_prime > 0.0 {
            1.0 / self.omega_prime
        } else {
            1.0 / self.omega0
        }
    }
}

/// Normalized two-component state `a|0⟩ + b|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    a: Complex64,
    b: Complex64,
}

impl Spinor {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let s = Self { a, b };
        let norm = s.norm();
        if (norm - 1.0).abs() > NORM_TOL || !norm.is_finite() {
            return Err(CoreError::NotNormalized { norm });
        }
        Ok(s)
    }

    /// Rescales `(a, b)` to unit norm.
    pub fn normalized(a: Complex64, b: Complex64) -> Result<Self> {
        let norm = a.norm().hypot(b.norm());
        if !(norm.is_finite() && norm > 0.0) {
            return Err(CoreError::NotNormalized { norm });
        }
        Ok(Self {
            a: a / norm,
            b: b / norm,
        })
    }

    /// Unchecked constructor for propagation results, whose norm is kept
    /// observable rather than forced back to one.
    pub(crate) fn from_raw(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    pub fn from_real(a: f64, b: f64) -> Result<Self> {
        Self::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0))
    }

    pub fn up() -> Self {
        Self::from_raw(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn down() -> Self {
        Self::from_raw(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn components(&self) -> (Complex64, Complex64) {
        (self.a, self.b)
    }

    pub fn norm(&self) -> f64 {
        self.a.norm().hypot(self.b.norm())
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Spinor) -> Complex64 {
        self.a.conj() * other.a + self.b.conj() * other.b
    }

    /// Multiplies by the global phase `e^{iφ}`.
    pub fn with_phase(&self, phi: f64) -> Self {
        let u = Complex64::from_polar(1.0, phi);
        Self {
            a: self.a * u,
            b: self.b * u,
        }
    }

    pub(crate) fn scaled(&self, z: Complex64) -> Self {
        Self {
            a: self.a * z,
            b: self.b * z,
        }
    }

    pub(crate) fn sub(&self, other: &Spinor) -> Self {
        Self {
            a: self.a - other.a,
            b: self.b - other.b,
        }
    }
}

/// Instantaneous eigen-decomposition of `H(t)`.
///
/// The `|0⟩` component of both eigenvectors is real and non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    pub t: f64,
    /// rad/s
    pub e_plus: f64,
    /// rad/s
    pub e_minus: f64,
    /// rad/s
    pub gap: f64,
    pub v_plus: Spinor,
    pub v_minus: Spinor,
}

/// Which propagation produced a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    Integrator,
    PulseSequence,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::Integrator => "integrator",
            Method::PulseSequence => "pulse-sequence",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Fidelity samples `F(t)` on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityTrace {
    times: Vec<f64>,
    values: Vec<f64>,
    method: Method,
    params: FieldParams,
}

impl FidelityTrace {
    pub fn new(times: Vec<f64>, values: Vec<f64>, method: Method, params: FieldParams) -> Result<Self> {
        if times.len() != values.len() {
            return Err(CoreError::InvalidGrid(format!(
                "{} times but {} fidelity values",
                times.len(),
                values.len()
            )));
        }
        check_increasing(&times)?;
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(CoreError::InvalidGrid(format!("fidelity {v} outside [0, 1]")));
        }
        Ok(Self {
            times,
            values,
            method,
            params,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    /// `(t, F)` at the smallest fidelity; the first one on ties.
    pub fn min(&self) -> Option<(f64, f64)> {
        self.iter().fold(None, |best, (t, v)| match best {
            Some((_, bv)) if bv <= v => best,
            _ => Some((t, v)),
        })
    }
}

pub(crate) fn check_increasing(times: &[f64]) -> Result<()> {
    if let Some(t) = times.iter().find(|t| !t.is_finite()) {
        return Err(CoreError::InvalidGrid(format!("non-finite time {t}")));
    }
    if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
        return Err(CoreError::InvalidGrid(format!(
            "times must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Clamps a computed overlap into `[0, 1]` against rounding overshoot.
pub(crate) fn clamp_unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// `H(t)` in rad/s.
pub fn hamiltonian_matrix(t: f64, p: &FieldParams) -> Matrix2H {
    field_hamiltonian(p.field_phase(t), p)
}

/// Hamiltonian with the rf field frozen at phase `phi`.
pub fn field_hamiltonian(phi: f64, p: &FieldParams) -> Matrix2H {
    let (s, c) = phi.sin_cos();
    let half = 0.5 * TWO_PI;
    Matrix2H::from_pauli(0.0, half * p.omega1 * c, half * p.omega1 * s, half * p.omega0)
}

pub fn eigensystem(t: f64, p: &FieldParams) -> EigenSystem {
    eigensystem_at_phase(p.field_phase(t), t, p)
}

/// Eigen-decomposition with the field at phase `phi`; `t` is carried along
/// as the label.
pub fn eigensystem_at_phase(phi: f64, t: f64, p: &FieldParams) -> EigenSystem {
    let (sh, ch) = (0.5 * p.theta()).sin_cos();
    let rot = Complex64::from_polar(1.0, phi);
    let e = 0.5 * TWO_PI * p.field_strength();
    EigenSystem {
        t,
        e_plus: e,
        e_minus: -e,
        gap: 2.0 * e,
        v_plus: Spinor::from_raw(Complex64::new(ch, 0.0), rot * sh),
        v_minus: Spinor::from_raw(Complex64::new(sh, 0.0), -rot * ch),
    }
}

/// The `t = 0` upper eigenstate `(cos θ/2, sin θ/2)`.
pub fn initial_state(p: &FieldParams) -> Spinor {
    let (s, c) = (0.5 * p.theta()).sin_cos();
    Spinor::from_raw(Complex64::new(c, 0.0), Complex64::new(s, 0.0))
}

/// Rotating-frame Hamiltonian `2π[(ω0-ω′)σz/2 + ω1σx/2]`.
pub fn rotating_frame_hamiltonian(p: &FieldParams) -> Matrix2H {
    let half = 0.5 * TWO_PI;
    Matrix2H::from_pauli(0.0, half * p.omega1, 0.0, half * (p.omega0 - p.omega_prime))
}

/// Exact solution of the Schrödinger equation from [`initial_state`].
///
/// `|φ(t)⟩ = exp(-i 2πω′t σz/2) exp(-i H_rot t) |Ψ(0)⟩`
pub fn exact_state(t: f64, p: &FieldParams) -> Spinor {
    let frame = Unitary2::z_rotation(p.field_phase(t));
    let evolved = rotating_frame_hamiltonian(p).propagator(t).apply(&initial_state(p));
    let out = frame.apply(&evolved);
    // both factors are exact unitaries; this only strips rounding
    let n = out.norm();
    Spinor::from_raw(out.a / n, out.b / n)
}

/// `|⟨x|y⟩|`
pub fn fidelity(x: &Spinor, y: &Spinor) -> f64 {
    clamp_unit(x.inner(y).norm())
}

/// Closed-form `F(t) = sqrt(1 - sin²(θ_eff-θ) sin²(π f_eff t))`.
pub fn fidelity_closed(t: f64, p: &FieldParams) -> f64 {
    let tilt = (p.theta_eff() - p.theta()).sin();
    let osc = (std::f64::consts::PI * p.f_eff() * t).sin();
    clamp_unit((1.0 - tilt * tilt * osc * osc).max(0.0).sqrt())
}

pub fn fidelity_trace_closed(p: &FieldParams, times: &[f64]) -> Result<FidelityTrace> {
    let values = times.iter().map(|&t| fidelity_closed(t, p)).collect();
    FidelityTrace::new(times.to_vec(), values, Method::ClosedForm, *p)
}

/// Minimum fidelity over the evolution,
/// `|(1-K)cos θ + R sin θ| / sqrt((1-K)² + R²)`.
pub fn f_min_closed(p: &FieldParams) -> Result<f64> {
    let detuning = p.omega0 - p.omega_prime;
    let denom = detuning.hypot(p.omega1);
    if denom == 0.0 {
        return Err(CoreError::Degenerate);
    }
    let (s, c) = p.theta().sin_cos();
    Ok(clamp_unit((detuning * c + p.omega1 * s).abs() / denom))
}

/// Time of the first fidelity minimum, `1 / (2 sqrt((1-K)²ω0² + ω1²))`.
pub fn t_min(p: &FieldParams) -> Result<f64> {
    let f = p.f_eff();
    if f == 0.0 {
        return Err(CoreError::Degenerate);
    }
    Ok(0.5 / f)
}
