//! Deterministic parallel scans of the `(K, R)` plane.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::criteria;
use crate::error::{CoreError, Result};
use crate::integrators::{make_schedule, pulse_sequence_evolve};
use crate::spin::{f_min_closed, fidelity_trace_closed, t_min, FidelityTrace, FieldParams};

/// rf strength held fixed while `R` is varied through `ω0 = ω1/R`.
pub const DEFAULT_OMEGA1: f64 = 100.0;

/// Declared in name order, which is also the row order within a grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantity {
    C1,
    FMin,
    TMin,
    TongB,
    WuC3,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [
        Quantity::C1,
        Quantity::FMin,
        Quantity::TMin,
        Quantity::TongB,
        Quantity::WuC3,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::C1 => "c1",
            Quantity::FMin => "f_min",
            Quantity::TMin => "t_min",
            Quantity::TongB => "tong_b",
            Quantity::WuC3 => "wu_c3",
        }
    }

    fn evaluate(&self, p: &FieldParams) -> Result<f64> {
        match self {
            Quantity::C1 => Ok(criteria::c1_traditional(p)),
            Quantity::FMin => f_min_closed(p),
            Quantity::TMin => t_min(p),
            Quantity::TongB => criteria::tong_conditions(p, p.default_horizon()).map(|(_, b, _)| b),
            Quantity::WuC3 => Ok(criteria::wu_condition(p).0),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s.trim())
            .ok_or_else(|| CoreError::InvalidSweep(format!("unknown quantity '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub k_values: Vec<f64>,
    pub r_values: Vec<f64>,
    /// Hz
    pub omega1: f64,
    pub quantities: Vec<Quantity>,
}

impl GridSpec {
    pub fn new(k_values: Vec<f64>, r_values: Vec<f64>, omega1: f64, quantities: &[Quantity]) -> Result<Self> {
        let mut quantities = quantities.to_vec();
        quantities.sort();
        quantities.dedup();
        let g = Self {
            k_values,
            r_values,
            omega1,
            quantities,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, values) in [("K", &self.k_values), ("R", &self.r_values)] {
            if values.is_empty() {
                return Err(CoreError::InvalidSweep(format!("{name} list is empty")));
            }
            if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(CoreError::InvalidSweep(format!(
                    "{name} values must be positive, got {v}"
                )));
            }
            if values.windows(2).any(|w| w[1] <= w[0]) {
                return Err(CoreError::InvalidSweep(format!(
                    "{name} values must be strictly increasing"
                )));
            }
        }
        if !(self.omega1.is_finite() && self.omega1 > 0.0) {
            return Err(CoreError::InvalidSweep(format!(
                "omega1 must be positive, got {}",
                self.omega1
            )));
        }
        if self.quantities.is_empty() {
            return Err(CoreError::InvalidSweep("no quantities requested".into()));
        }
        if self.quantities.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CoreError::InvalidSweep("quantities must be sorted and unique".into()));
        }
        Ok(())
    }

    pub fn points(&self) -> usize {
        self.k_values.len() * self.r_values.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub k: f64,
    pub r: f64,
    pub quantity: Quantity,
    /// `+inf` marks a resonant divergence.
    pub value: f64,
    pub resonant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub omega1: f64,
    pub rows: Vec<SweepRow>,
}

/// `n` points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => {
            let mut v: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
            // rounding can otherwise push the last point past b
            v[n - 1] = b;
            v
        }
    }
}

/// `n` points evenly spaced in `ln x` from `a` to `b` inclusive.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    let mut v: Vec<f64> = linspace(la, lb, n).into_iter().map(f64::exp).collect();
    if n > 1 {
        // pin the endpoints against exp/ln rounding
        v[0] = a;
        v[n - 1] = b;
    }
    v
}

fn evaluate_point(k: f64, r: f64, omega1: f64, quantities: &[Quantity]) -> Result<Vec<SweepRow>> {
    let p = FieldParams::from_ratios(k, r, omega1)?;
    let resonant = criteria::is_resonant(&p);
    quantities
        .iter()
        .map(|&quantity| {
            Ok(SweepRow {
                k,
                r,
                quantity,
                value: quantity.evaluate(&p)?,
                resonant,
            })
        })
        .collect()
}

fn run_on_pool<T: Send>(jobs: Option<usize>, work: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(work()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| CoreError::Pool(e.to_string()))?;
            Ok(pool.install(work))
        }
    }
}

/// Evaluates every requested quantity at every `(K, R)` using the closed
/// forms. Rows come out K-major, then R, then quantity name, whatever the
/// degree of parallelism. `jobs = None` uses the global rayon pool.
pub fn surface_sweep(g: &GridSpec, jobs: Option<usize>) -> Result<SweepTable> {
    g.validate()?;
    let nr = g.r_values.len();
    let chunks: Vec<Result<Vec<SweepRow>>> = run_on_pool(jobs, || {
        (0..g.points())
            .into_par_iter()
            .map(|idx| evaluate_point(g.k_values[idx / nr], g.r_values[idx % nr], g.omega1, &g.quantities))
            .collect()
    })?;
    let mut rows = Vec::with_capacity(g.points() * g.quantities.len());
    for chunk in chunks {
        rows.extend(chunk?);
    }
    Ok(SweepTable { omega1: g.omega1, rows })
}

/// `f_min` and `t_min` along K at fixed R. K need not be equidistant.
pub fn slice_vs_k(r: f64, k_values: &[f64], omega1: f64) -> Result<SweepTable> {
    let g = GridSpec::new(k_values.to_vec(), vec![r], omega1, &[Quantity::FMin, Quantity::TMin])?;
    surface_sweep(&g, None)
}

/// `f_min` and `t_min` along R at fixed K.
pub fn slice_vs_r(k: f64, r_values: &[f64], omega1: f64) -> Result<SweepTable> {
    let g = GridSpec::new(vec![k], r_values.to_vec(), omega1, &[Quantity::FMin, Quantity::TMin])?;
    surface_sweep(&g, None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure1Trace {
    pub k: f64,
    /// Pulse-sequence fidelity at `t = nτ`.
    pub stroboscopic: FidelityTrace,
    /// Closed-form curve over the same span.
    pub dense: FidelityTrace,
}

/// Stroboscopic pulse-sequence traces for each K at fixed `ω0` and
/// `ω1 = R ω0`, with the dense closed-form overlay.
pub fn figure1_traces(
    r: f64,
    omega0: f64,
    k_values: &[f64],
    n_cycles: usize,
    dense_points: usize,
) -> Result<Vec<Figure1Trace>> {
    k_values
        .par_iter()
        .map(|&k| {
            let p = FieldParams::from_ratios_with_omega0(k, r, omega0)?;
            let sched = make_schedule(&p, n_cycles)?;
            let stroboscopic = pulse_sequence_evolve(&p, &sched)?.trace;
            let span = n_cycles as f64 * sched.tau;
            let times = if span > 0.0 {
                linspace(0.0, span, dense_points.max(2))
            } else {
                vec![0.0]
            };
            let dense = fidelity_trace_closed(&p, &times)?;
            Ok(Figure1Trace { k, stroboscopic, dense })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn value(t: &SweepTable, k: f64, r: f64, q: Quantity) -> f64 {
        t.rows
            .iter()
            .find(|row| row.k == k && row.r == r && row.quantity == q)
            .unwrap()
            .value
    }

    #[test]
    fn linspace_hits_end_exactly() {
        let b = 0.0038392512633765113;
        assert_eq!(*linspace(0.0, b, 10_001).last().unwrap(), b);
        assert_eq!(linspace(1.0, 2.0, 3), vec![1.0, 1.5, 2.0]);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
        assert!(linspace(1.0, 2.0, 0).is_empty());
    }

    #[test]
    fn single_point() {
        let g = GridSpec::new(vec![1.0], vec![0.06], 100.0, &[Quantity::FMin]).unwrap();
        let t = surface_sweep(&g, None).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_relative_eq!(t.rows[0].value, 0.05989, epsilon = 1e-5);
    }

    #[test]
    fn row_order_and_count() {
        let g = GridSpec::new(
            vec![0.5, 2.0],
            vec![0.1, 0.2, 0.3],
            100.0,
            &[Quantity::WuC3, Quantity::C1],
        )
        .unwrap();
        let t = surface_sweep(&g, Some(3)).unwrap();
        assert_eq!(t.rows.len(), 12);
        let keys: Vec<_> = t.rows.iter().map(|r| (r.k, r.r, r.quantity.name())).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(keys, sorted);
    }

    #[test]
    fn resonant_point_gets_sentinel() {
        let r = 0.06;
        let g = GridSpec::new(vec![0.9, 1.0 + r * r, 1.1], vec![r], 100.0, &Quantity::ALL).unwrap();
        let t = surface_sweep(&g, None).unwrap();
        assert_eq!(value(&t, 1.0 + r * r, r, Quantity::WuC3), f64::INFINITY);
        assert!(t.rows.iter().filter(|row| row.k == 1.0 + r * r).all(|row| row.resonant));
        assert!(t
            .rows
            .iter()
            .filter(|row| row.k != 1.0 + r * r)
            .all(|row| !row.resonant && row.value.is_finite()));
    }

    #[test]
    fn invalid_grids() {
        assert!(GridSpec::new(vec![], vec![0.1], 100.0, &[Quantity::C1]).is_err());
        assert!(GridSpec::new(vec![1.0, 0.5], vec![0.1], 100.0, &[Quantity::C1]).is_err());
        assert!(GridSpec::new(vec![1.0], vec![0.0], 100.0, &[Quantity::C1]).is_err());
        assert!(GridSpec::new(vec![1.0], vec![0.1], 100.0, &[]).is_err());
        assert!(GridSpec::new(vec![1.0], vec![0.1], -1.0, &[Quantity::C1]).is_err());
    }

    #[test]
    fn quantity_names_round_trip() {
        for q in Quantity::ALL {
            assert_eq!(q.name().parse::<Quantity>().unwrap(), q);
        }
        assert!("f_max".parse::<Quantity>().is_err());
        let mut names: Vec<_> = Quantity::ALL.iter().map(|q| q.name()).collect();
        names.sort();
        assert_eq!(names, Quantity::ALL.iter().map(|q| q.name()).collect::<Vec<_>>());
    }

    #[test]
    fn spacing_helpers() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
        let l = logspace(0.1, 30.0, 200);
        assert_eq!((l[0], l[199]), (0.1, 30.0));
        assert!(l.windows(2).all(|w| w[1] > w[0]));
        assert_relative_eq!(l[1] / l[0], l[100] / l[99], max_relative = 1e-12);
    }

    #[test]
    fn slices() {
        let ks = linspace(0.5, 1.5, 401);
        let t = slice_vs_k(0.05, &ks, 100.0).unwrap();
        let (k_best, f_best) = t
            .rows
            .iter()
            .filter(|row| row.quantity == Quantity::FMin)
            .map(|row| (row.k, row.value))
            .fold((0.0, 2.0), |b, c| if c.1 < b.1 { c } else { b });
        assert!((k_best - 1.0025).abs() <= 0.0025 + 1e-12, "{k_best}");
        assert!(f_best < 0.05);

        let single = slice_vs_k(0.05, &[1.0], 100.0).unwrap();
        assert_relative_eq!(single.rows[0].value, 0.04994, epsilon = 1e-5);

        let rs = linspace(0.05, 0.3, 26);
        let t = slice_vs_r(1.0, &rs, 100.0).unwrap();
        let f: Vec<_> = t
            .rows
            .iter()
            .filter(|row| row.quantity == Quantity::FMin)
            .map(|row| row.value)
            .collect();
        assert!(f.windows(2).all(|w| w[1] > w[0]));
        assert_relative_eq!(f[0], 0.04994, epsilon = 1e-5);
        assert_relative_eq!(f[25], 0.28735, epsilon = 1e-5);
    }

    #[test]
    fn figure1() {
        let traces = figure1_traces(0.06, 1700.0, &[1.0, 10.0], 15, 2001).unwrap();
        assert_eq!(traces.len(), 2);
        let (k1, k10) = (&traces[0], &traces[1]);
        assert_eq!(k1.stroboscopic.values()[0], 1.0);
        assert_eq!(k1.stroboscopic.len(), 16);
        let (t, f) = k1.stroboscopic.min().unwrap();
        assert!(f < 0.1 && (4e-3..6e-3).contains(&t));
        assert!(k10.stroboscopic.values().iter().all(|&f| f > 0.99));
        assert!(k10.dense.values().iter().all(|&f| f > 0.997));
    }
}
