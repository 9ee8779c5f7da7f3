//! Field parameters from either dimensionless ratios or explicit frequencies.

use adiabatic_core::sweep::DEFAULT_OMEGA1;
use adiabatic_core::FieldParams;
use clap::Args;

/// Larmor frequency used when nothing else pins it down (only possible with
/// `--r 0`).
pub const FALLBACK_OMEGA0: f64 = 1700.0;

const CONSISTENCY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Default, Args)]
pub struct FieldArgs {
    /// K = omega'/omega0
    #[arg(long)]
    pub k: Option<f64>,
    /// R = omega1/omega0
    #[arg(long)]
    pub r: Option<f64>,
    /// Larmor frequency, Hz
    #[arg(long)]
    pub omega0: Option<f64>,
    /// rf strength, Hz (default 100 when only ratios are given)
    #[arg(long)]
    pub omega1: Option<f64>,
    /// rf rotation frequency, Hz
    #[arg(long = "omega-prime")]
    pub omega_prime: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Resolved {
    pub params: FieldParams,
    /// Ratio flags that disagree with the explicit frequencies.
    pub overridden: Vec<String>,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= CONSISTENCY_TOL * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Explicit frequencies are taken as given; ratios fill in whatever is
/// missing. `ω0` comes from `--omega0`, else `ω1/R`, else `ω′/K`; `ω1` from
/// `--omega1`, else `R·ω0`, else 100 Hz; `ω′` from `--omega-prime`, else
/// `K·ω0`.
pub fn resolve(a: &FieldArgs) -> Result<Resolved, String> {
    for (name, v) in [
        ("--k", a.k),
        ("--r", a.r),
        ("--omega0", a.omega0),
        ("--omega1", a.omega1),
        ("--omega-prime", a.omega_prime),
    ] {
        if let Some(x) = v {
            if !x.is_finite() || x < 0.0 {
                return Err(format!("{name} must be a non-negative number, got {x}"));
            }
        }
    }

    let from_ratio = |w0: f64| a.omega1.or(a.r.map(|r| r * w0)).unwrap_or(DEFAULT_OMEGA1);
    let (omega0, omega1) = match (a.omega0, a.r) {
        (Some(w0), _) => (w0, from_ratio(w0)),
        (None, Some(r)) if r > 0.0 => {
            let w1 = a.omega1.unwrap_or(DEFAULT_OMEGA1);
            (w1 / r, w1)
        }
        _ => {
            let w0 = match (a.k, a.omega_prime) {
                (Some(k), Some(wp)) if k > 0.0 => wp / k,
                _ if a.r.is_some() => FALLBACK_OMEGA0,
                _ => {
                    return Err("cannot determine omega0: give --omega0, or --r > 0, or --k with --omega-prime".into())
                }
            };
            (w0, from_ratio(w0))
        }
    };
    let omega_prime = match (a.omega_prime, a.k) {
        (Some(wp), _) => wp,
        (None, Some(k)) => k * omega0,
        (None, None) => return Err("missing --k or --omega-prime".into()),
    };

    let params = FieldParams::new(omega0, omega1, omega_prime).map_err(|e| e.to_string())?;
    let mut overridden = Vec::new();
    if let Some(r) = a.r {
        if !close(params.r(), r) {
            overridden.push(format!("--r {r} (explicit frequencies give R = {})", params.r()));
        }
    }
    if let Some(k) = a.k {
        if !close(params.k(), k) {
            overridden.push(format!("--k {k} (explicit frequencies give K = {})", params.k()));
        }
    }
    Ok(Resolved { params, overridden })
}
