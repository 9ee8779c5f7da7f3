//! Numerical propagation: midpoint exact-exponential stepping and the
//! discrete phase-stepped pulse sequence used to emulate the rotating field.

use std::f64::consts::PI;

use crate::error::{CoreError, Result};
use crate::matrix::{Matrix2H, Unitary2};
use crate::spin::{
    check_increasing, eigensystem, eigensystem_at_phase, fidelity, field_hamiltonian, hamiltonian_matrix,
    initial_state, FidelityTrace, FieldParams, Method, Spinor,
};
use crate::TWO_PI;

/// Phase increment between consecutive pulses.
pub const PHASE_STEP: f64 = PI / 36.0;
/// Pulses per full rf revolution (`2π / PHASE_STEP`).
pub const PULSES_PER_CYCLE: usize = 72;

/// Steps per period of the fastest frequency when no step is requested.
const STEPS_PER_OSCILLATION: f64 = 200.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    pub trace: FidelityTrace,
    pub final_state: Spinor,
    pub step_count: usize,
    pub method: Method,
    /// Set when the step was at least a tenth of the fastest period.
    pub coarse_step: bool,
}

/// One midpoint step: `exp(-i H(t + dt/2) dt) s`.
pub fn step_exact(s: &Spinor, t: f64, dt: f64, p: &FieldParams) -> Spinor {
    hamiltonian_matrix(t + 0.5 * dt, p).propagator(dt).apply(s)
}

/// Largest frequency in the problem (Hz): lab-frame splitting, rf rotation or
/// rotating-frame Rabi frequency.
pub fn fastest_frequency(p: &FieldParams) -> f64 {
    p.field_strength().max(p.omega_prime()).max(p.f_eff())
}

/// `min(1/(200·f_max), sample_spacing)`
pub fn default_dt(p: &FieldParams, sample_spacing: Option<f64>) -> f64 {
    let dt = 1.0 / (STEPS_PER_OSCILLATION * fastest_frequency(p));
    match sample_spacing {
        Some(s) if s > 0.0 => dt.min(s),
        _ => dt,
    }
}

/// Propagates [`initial_state`] to `t_end` with midpoint steps of at most
/// `dt`, shortening steps so that every sample time is hit exactly.
///
/// Fidelity is measured against the instantaneous upper eigenstate.
pub fn evolve(p: &FieldParams, t_end: f64, dt: f64, sample_times: &[f64]) -> Result<PropagationResult> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(CoreError::InvalidGrid(format!("step must be positive, got {dt}")));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(CoreError::InvalidGrid(format!(
            "t_end must be non-negative, got {t_end}"
        )));
    }
    check_increasing(sample_times)?;
    if let Some(&t) = sample_times.iter().find(|&&t| t < 0.0 || t > t_end) {
        return Err(CoreError::InvalidGrid(format!("sample time {t} outside [0, {t_end}]")));
    }

    let mut state = initial_state(p);
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut values = Vec::with_capacity(sample_times.len());
    let targets = sample_times.iter().copied().chain(std::iter::once(t_end));
    for (i, target) in targets.enumerate() {
        let n = ((target - t) / dt).ceil() as usize;
        if n > 0 {
            let h = (target - t) / n as f64;
            for j in 0..n {
                state = step_exact(&state, t + j as f64 * h, h, p);
            }
            steps += n;
        }
        t = target;
        if i < sample_times.len() {
            values.push(fidelity(&state, &eigensystem(t, p).v_plus));
        }
    }

    let trace = FidelityTrace::new(sample_times.to_vec(), values, Method::Integrator, *p)?;
    Ok(PropagationResult {
        trace,
        final_state: state,
        step_count: steps,
        method: Method::Integrator,
        coarse_step: dt >= 0.1 / fastest_frequency(p),
    })
}

/// Timing of the discrete pulse sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSchedule {
    /// Width of one pulse, seconds.
    pub delta_t: f64,
    /// Phase increment between pulses, radians.
    pub phase_step: f64,
    pub pulses_per_cycle: usize,
    /// Duration of one full revolution, seconds.
    pub tau: f64,
    pub n_cycles: usize,
}

impl PulseSchedule {
    /// Rounds the pulse width to the nearest multiple of `resolution`
    /// seconds, as a pulse programmer with a finite clock would, and
    /// recomputes `tau` from the rounded width.
    pub fn quantized(self, resolution: f64) -> Result<Self> {
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(CoreError::InvalidSchedule(format!(
                "timing resolution must be positive, got {resolution}"
            )));
        }
        let delta_t = (self.delta_t / resolution).round() * resolution;
        if delta_t <= 0.0 {
            return Err(CoreError::InvalidSchedule(format!(
                "pulse width {:e} s rounds to zero at resolution {resolution:e} s",
                self.delta_t
            )));
        }
        Ok(Self {
            delta_t,
            tau: self.pulses_per_cycle as f64 * delta_t,
            ..self
        })
    }

    /// Rf rotation frequency actually realized by the schedule, Hz.
    pub fn realized_omega_prime(&self) -> f64 {
        self.phase_step / (TWO_PI * self.delta_t)
    }

    pub fn total_pulses(&self) -> usize {
        self.pulses_per_cycle * self.n_cycles
    }
}

/// `Δt = (π/36) / (2π ω′)`, `τ = 72 Δt`.
pub fn make_schedule(p: &FieldParams, n_cycles: usize) -> Result<PulseSchedule> {
    if p.omega_prime() <= 0.0 {
        return Err(CoreError::InvalidSchedule(
            "a pulse sequence needs omega_prime > 0".into(),
        ));
    }
    let delta_t = PHASE_STEP / (TWO_PI * p.omega_prime());
    Ok(PulseSchedule {
        delta_t,
        phase_step: PHASE_STEP,
        pulses_per_cycle: PULSES_PER_CYCLE,
        tau: PULSES_PER_CYCLE as f64 * delta_t,
        n_cycles,
    })
}

/// Pulse `k` applies the static Hamiltonian with the rf phase held at
/// `k·phase_step` for `delta_t`. Fidelity is recorded at every cycle
/// boundary `t = nτ` against the eigenstate of the field at that boundary.
pub fn pulse_sequence_evolve(p: &FieldParams, sched: &PulseSchedule) -> Result<PropagationResult> {
    if !(sched.delta_t.is_finite() && sched.delta_t > 0.0) || sched.pulses_per_cycle == 0 {
        return Err(CoreError::InvalidSchedule(format!("{sched:?}")));
    }
    // Pulse unitaries repeat every cycle.
    let pulses: Vec<Unitary2> = (0..sched.pulses_per_cycle)
        .map(|k| field_hamiltonian(k as f64 * sched.phase_step, p).propagator(sched.delta_t))
        .collect();
    let boundary_phase = sched.pulses_per_cycle as f64 * sched.phase_step;

    let mut state = initial_state(p);
    let mut times = Vec::with_capacity(sched.n_cycles + 1);
    let mut values = Vec::with_capacity(sched.n_cycles + 1);
    for n in 0..=sched.n_cycles {
        if n > 0 {
            for u in &pulses {
                state = u.apply(&state);
            }
        }
        let t = n as f64 * sched.tau;
        let reference = eigensystem_at_phase(n as f64 * boundary_phase, t, p).v_plus;
        times.push(t);
        values.push(fidelity(&state, &reference));
    }

    Ok(PropagationResult {
        trace: FidelityTrace::new(times, values, Method::PulseSequence, *p)?,
        final_state: state,
        step_count: sched.total_pulses(),
        method: Method::PulseSequence,
        coarse_step: false,
    })
}

/// Fidelity after `n` cycles of the pulse sequence without stepping through
/// it. Pulse `k` equals `Z(kδ) exp(-iH(0)Δt) Z(-kδ)`, so `n` cycles of `N`
/// pulses collapse to `Z(nNδ) M^{nN}` with `M = Z(-δ) exp(-iH(0)Δt)`, and
/// the frame factor drops out against the co-rotated eigenstate.
pub fn stroboscopic_fidelity(p: &FieldParams, sched: &PulseSchedule, n: usize) -> f64 {
    let m = Unitary2::z_rotation(-sched.phase_step).compose(&field_hamiltonian(0.0, p).propagator(sched.delta_t));
    let [[a, b], [c, d]] = m.entries();
    // strip the global phase, leaving cos β - i sin β (n·σ)
    let g = (a * d - b * c).sqrt();
    let (a, b) = (a / g, b / g);
    let (sx, sy, sz) = (-b.im, -b.re, -a.im);
    let sin_beta = (sx * sx + sy * sy + sz * sz).sqrt();
    let psi0 = initial_state(p);
    if sin_beta == 0.0 {
        return 1.0;
    }
    let scale = sin_beta.atan2(a.re) / sin_beta;
    let generator = Matrix2H::from_pauli(0.0, sx * scale, sy * scale, sz * scale);
    let steps = (n * sched.pulses_per_cycle) as f64;
    fidelity(&generator.propagator(steps).apply(&psi0), &psi0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{exact_state, fidelity_closed};
    use approx::assert_relative_eq;

    fn params(k: f64, r: f64) -> FieldParams {
        FieldParams::from_ratios_with_omega0(k, r, 1700.0).unwrap()
    }

    #[test]
    fn static_field_eigenstate_only_picks_up_phase() {
        let p = FieldParams::new(1700.0, 0.0, 1700.0).unwrap();
        let dt = 3.7e-5;
        let s = step_exact(&Spinor::up(), 0.0, dt, &p);
        assert_relative_eq!(s.a().arg(), -PI * 1700.0 * dt, epsilon = 1e-14);
        assert_eq!(s.b().norm(), 0.0);
        assert_eq!(fidelity(&s, &Spinor::up()), 1.0);
    }

    #[test]
    fn constant_hamiltonian_semigroup() {
        let p = FieldParams::new(1700.0, 0.0, 900.0).unwrap();
        let s0 = Spinor::from_real(0.6, 0.8).unwrap();
        let whole = step_exact(&s0, 0.0, 2e-4, &p);
        let halves = step_exact(&step_exact(&s0, 0.0, 1e-4, &p), 1e-4, 1e-4, &p);
        assert!((whole.a() - halves.a()).norm() < 1e-14);
        assert!((whole.b() - halves.b()).norm() < 1e-14);
    }

    #[test]
    fn evolve_with_zero_end_time() {
        let r = evolve(&params(1.0, 0.06), 0.0, 1e-6, &[0.0]).unwrap();
        assert_eq!(r.trace.values(), &[1.0]);
        assert_eq!(r.step_count, 0);
    }

    #[test]
    fn evolve_rejects_bad_input() {
        let p = params(1.0, 0.06);
        assert!(evolve(&p, 1e-3, 0.0, &[]).is_err());
        assert!(evolve(&p, 1e-3, 1e-6, &[2e-3]).is_err());
        assert!(evolve(&p, 1e-3, 1e-6, &[5e-4, 1e-4]).is_err());
        assert!(evolve(&p, -1.0, 1e-6, &[]).is_err());
    }

    #[test]
    fn evolve_lands_on_sample_points() {
        let p = params(1.0, 0.06);
        let samples = [0.0, 1.234567e-4, 3e-4];
        let r = evolve(&p, 3e-4, 1e-5, &samples).unwrap();
        assert_eq!(r.trace.times(), &samples);
        assert!(!r.coarse_step);
        assert!(evolve(&p, 3e-4, 1e-4, &samples).unwrap().coarse_step);
    }

    #[test]
    fn evolve_tracks_exact_state_at_resonance() {
        let p = params(1.0, 0.06);
        // midpoint error at 5 ms is 3.0e-6 for dt = 1 µs and 7.6e-7 for 0.5 µs
        let r = evolve(&p, 5e-3, 0.5e-6, &[5e-3]).unwrap();
        let exact = fidelity(&exact_state(5e-3, &p), &eigensystem(5e-3, &p).v_plus);
        let err = (r.trace.values()[0] - exact).abs();
        assert!(err < 1e-6, "{err}");
        assert!((r.final_state.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn default_dt_resolves_fastest_frequency() {
        let p = params(10.0, 0.06);
        assert_relative_eq!(default_dt(&p, None), 1.0 / (200.0 * 17000.0));
        assert_eq!(default_dt(&p, Some(1e-9)), 1e-9);
    }

    #[test]
    fn schedule_constants() {
        let s = make_schedule(&params(1.0, 0.06), 15).unwrap();
        assert_relative_eq!(s.delta_t, 1.0 / (72.0 * 1700.0), max_relative = 1e-15);
        assert_relative_eq!(
            s.pulses_per_cycle as f64 * s.delta_t * 1700.0,
            1.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(s.pulses_per_cycle as f64 * s.phase_step, TWO_PI, max_relative = 1e-15);
        let s = make_schedule(&FieldParams::new(1700.0, 100.0, 850.0).unwrap(), 1).unwrap();
        assert_eq!((s.delta_t * 1e7).round() / 10.0, 16.3);
        assert!(make_schedule(&params(0.0, 0.06), 1).is_err());
    }

    #[test]
    fn quantized_schedule() {
        let s = make_schedule(&params(1.0, 0.06), 15)
            .unwrap()
            .quantized(0.1e-6)
            .unwrap();
        assert_relative_eq!(s.delta_t, 8.2e-6, max_relative = 1e-12);
        assert_relative_eq!(s.tau, 590.4e-6, max_relative = 1e-12);
        assert!(make_schedule(&params(1.0, 0.06), 1).unwrap().quantized(1e-3).is_err());
    }

    #[test]
    fn pulse_sequence_zero_cycles() {
        let p = params(1.0, 0.06);
        let r = pulse_sequence_evolve(&p, &make_schedule(&p, 0).unwrap()).unwrap();
        assert_eq!(r.trace.values(), &[1.0]);
        assert_eq!(r.step_count, 0);
    }

    #[test]
    fn pulse_sequence_follows_closed_form() {
        let p = params(1.0, 0.06);
        let r = pulse_sequence_evolve(&p, &make_schedule(&p, 15).unwrap()).unwrap();
        assert_eq!(r.trace.len(), 16);
        for (t, f) in r.trace.iter() {
            assert!((f - fidelity_closed(t, &p)).abs() < 2e-3, "t={t} pulse={f}");
        }
        let (t, f) = r.trace.min().unwrap();
        assert!(f < 0.1);
        assert!((4e-3..6e-3).contains(&t));
    }

    #[test]
    fn pulse_sequence_matches_step_operator_power() {
        for (k, r) in [(1.0, 0.06), (10.0, 0.06), (1.05, 0.2), (3.0, 0.5), (0.3, 0.0)] {
            let p = params(k, r);
            let sched = make_schedule(&p, 15).unwrap();
            let tr = pulse_sequence_evolve(&p, &sched).unwrap().trace;
            for (n, f) in tr.values().iter().enumerate() {
                let g = stroboscopic_fidelity(&p, &sched, n);
                assert!((f - g).abs() < 1e-10, "K={k} R={r} n={n}: {f} vs {g}");
            }
        }
    }
}
