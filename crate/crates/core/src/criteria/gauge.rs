//! Parallel-transport re-phasing of eigenstate trajectories.

use num_complex::Complex64;

use super::numeric::{connection_fd, Branch, FdConfig};
use crate::error::{CoreError, Result};
use crate::spin::{check_increasing, eigensystem, FieldParams, Spinor};

/// Minimum `|⟨v(t_i)|v(t_{i+1})⟩|` accepted between neighbouring grid points.
pub const MIN_OVERLAP: f64 = 0.999;

/// Eigenstates re-phased so that `⟨v_n|v̇_n⟩ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugedTrajectory {
    pub times: Vec<f64>,
    pub v_plus: Vec<Spinor>,
    pub v_minus: Vec<Spinor>,
    /// Accumulated phases `γ+(t)`, radians.
    pub gamma_plus: Vec<f64>,
    pub gamma_minus: Vec<f64>,
    /// Gap at each grid point, rad/s.
    pub gaps: Vec<f64>,
    /// Largest `|⟨ṽ|ṽ̇⟩| / |⟨v|v̇⟩|` over interior points and both branches.
    pub residual: f64,
}

fn cumulative_trapezoid(times: &[f64], rates: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(times.len());
    out.push(0.0);
    for i in 1..times.len() {
        acc += 0.5 * (rates[i] + rates[i - 1]) * (times[i] - times[i - 1]);
        out.push(acc);
    }
    out
}

/// Re-phases both eigenstate branches by `γ_n(t) = ∫₀ᵗ i⟨E_n|Ė_n⟩ dt′`,
/// accumulated with the trapezoidal rule over `times` (which must start at
/// the phase origin of interest; `γ(times[0]) = 0`).
pub fn parallel_transport(times: &[f64], p: &FieldParams) -> Result<GaugedTrajectory> {
    if times.is_empty() {
        return Err(CoreError::InvalidGrid("empty time grid".into()));
    }
    check_increasing(times)?;
    let path = |t: f64| eigensystem(t, p);
    let systems: Vec<_> = times.iter().map(|&t| path(t)).collect();

    for (i, w) in systems.windows(2).enumerate() {
        for (a, b) in [(w[0].v_plus, w[1].v_plus), (w[0].v_minus, w[1].v_minus)] {
            let overlap = a.inner(&b).norm();
            if overlap < MIN_OVERLAP {
                return Err(CoreError::GridTooCoarse {
                    index: i,
                    overlap,
                    threshold: MIN_OVERLAP,
                });
            }
        }
    }

    let fd = FdConfig::for_params(p);
    let i = Complex64::i();
    let rates = |b: Branch| -> Vec<f64> {
        times
            .iter()
            .map(|&t| (i * connection_fd(&path, t, fd.h, b)).re)
            .collect()
    };
    let (rate_plus, rate_minus) = (rates(Branch::Plus), rates(Branch::Minus));
    let gamma_plus = cumulative_trapezoid(times, &rate_plus);
    let gamma_minus = cumulative_trapezoid(times, &rate_minus);

    // ⟨ṽ|ṽ̇⟩ = iγ̇ + ⟨v|v̇⟩ = i(γ̇ - rate); γ̇ from central differences of γ.
    let mut residual: f64 = 0.0;
    for j in 1..times.len().saturating_sub(1) {
        let dt = times[j + 1] - times[j - 1];
        for (gamma, rate) in [(&gamma_plus, &rate_plus), (&gamma_minus, &rate_minus)] {
            if rate[j] != 0.0 {
                let gamma_dot = (gamma[j + 1] - gamma[j - 1]) / dt;
                residual = residual.max((gamma_dot - rate[j]).abs() / rate[j].abs());
            }
        }
    }

    Ok(GaugedTrajectory {
        times: times.to_vec(),
        v_plus: systems
            .iter()
            .zip(&gamma_plus)
            .map(|(es, &g)| es.v_plus.with_phase(g))
            .collect(),
        v_minus: systems
            .iter()
            .zip(&gamma_minus)
            .map(|(es, &g)| es.v_minus.with_phase(g))
            .collect(),
        gaps: systems.iter().map(|es| es.gap).collect(),
        gamma_plus,
        gamma_minus,
        residual,
    })
}

/// Three-point (second-order) derivative of samples on a possibly
/// non-uniform grid, one-sided at the ends.
fn grid_derivative(times: &[f64], values: &[Complex64]) -> Vec<Complex64> {
    let n = times.len();
    if n < 3 {
        let d = if n == 2 {
            (values[1] - values[0]) / (times[1] - times[0])
        } else {
            Complex64::new(0.0, 0.0)
        };
        return vec![d; n];
    }
    (0..n)
        .map(|j| {
            // stencil anchored at i..i+2, derivative evaluated at times[j]
            let i = j.saturating_sub(1).min(n - 3);
            let (t0, t1, t2) = (times[i], times[i + 1], times[i + 2]);
            let x = times[j];
            let w0 = (2.0 * x - t1 - t2) / ((t0 - t1) * (t0 - t2));
            let w1 = (2.0 * x - t0 - t2) / ((t1 - t0) * (t1 - t2));
            let w2 = (2.0 * x - t0 - t1) / ((t2 - t0) * (t2 - t1));
            values[i] * w0 + values[i + 1] * w1 + values[i + 2] * w2
        })
        .collect()
}

impl GaugedTrajectory {
    /// `⟨ṽ+|ṽ̇-⟩` at every grid point from differences along the grid.
    pub fn coupling(&self) -> Vec<Complex64> {
        let a: Vec<_> = self.v_minus.iter().map(|v| v.a()).collect();
        let b: Vec<_> = self.v_minus.iter().map(|v| v.b()).collect();
        let (da, db) = (grid_derivative(&self.times, &a), grid_derivative(&self.times, &b));
        self.v_plus
            .iter()
            .zip(da.iter().zip(&db))
            .map(|(v, (&x, &y))| v.a().conj() * x + v.b().conj() * y)
            .collect()
    }

    /// `∫ |d/dt(⟨ṽ+|ṽ̇-⟩/(E+ - E-))| dt` over the grid (trapezoidal).
    pub fn tong_b(&self) -> f64 {
        if self.times.len() < 3 {
            return 0.0;
        }
        let ratio: Vec<_> = self.coupling().iter().zip(&self.gaps).map(|(c, g)| c / g).collect();
        let rate: Vec<f64> = grid_derivative(&self.times, &ratio).iter().map(|z| z.norm()).collect();
        *cumulative_trapezoid(&self.times, &rate).last().unwrap_or(&0.0)
    }
}
