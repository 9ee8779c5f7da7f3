//! 2×2 Hermitian matrices and their exact exponentials.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::spin::Spinor;

const HERMITIAN_TOL: f64 = 1e-12;

/// A 2×2 Hermitian matrix in angular-frequency units (rad/s).
///
/// Stored through its Pauli decomposition `h0·I + hx·σx + hy·σy + hz·σz`,
/// which makes Hermiticity structural.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2H {
    h0: f64,
    hx: f64,
    hy: f64,
    hz: f64,
}

impl Matrix2H {
    pub const IDENTITY: Matrix2H = Matrix2H::from_pauli(1.0, 0.0, 0.0, 0.0);
    pub const SIGMA_X: Matrix2H = Matrix2H::from_pauli(0.0, 1.0, 0.0, 0.0);
    pub const SIGMA_Y: Matrix2H = Matrix2H::from_pauli(0.0, 0.0, 1.0, 0.0);
    pub const SIGMA_Z: Matrix2H = Matrix2H::from_pauli(0.0, 0.0, 0.0, 1.0);

    pub const fn from_pauli(h0: f64, hx: f64, hy: f64, hz: f64) -> Self {
        Self { h0, hx, hy, hz }
    }

    /// Builds a matrix from explicit entries, rejecting non-Hermitian input.
    pub fn from_entries(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let scale = m.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
        let tol = HERMITIAN_TOL * scale;
        if m[0][0].im.abs() > tol || m[1][1].im.abs() > tol || (m[1][0] - m[0][1].conj()).norm() > tol {
            return Err(CoreError::NonHermitian);
        }
        Ok(Self {
            h0: 0.5 * (m[0][0].re + m[1][1].re),
            hz: 0.5 * (m[0][0].re - m[1][1].re),
            hx: m[0][1].re,
            hy: -m[0][1].im,
        })
    }

    pub fn pauli(&self) -> (f64, f64, f64, f64) {
        (self.h0, self.hx, self.hy, self.hz)
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        match (row, col) {
            (0, 0) => Complex64::new(self.h0 + self.hz, 0.0),
            (1, 1) => Complex64::new(self.h0 - self.hz, 0.0),
            (0, 1) => Complex64::new(self.hx, -self.hy),
            (1, 0) => Complex64::new(self.hx, self.hy),
            _ => panic!("Matrix2H index ({row}, {col}) out of range"),
        }
    }

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        [
            [self.entry(0, 0), self.entry(0, 1)],
            [self.entry(1, 0), self.entry(1, 1)],
        ]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_pauli(self.h0 * s, self.hx * s, self.hy * s, self.hz * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_pauli(
            self.h0 + other.h0,
            self.hx + other.hx,
            self.hy + other.hy,
            self.hz + other.hz,
        )
    }

    /// Length of the traceless part, i.e. half the eigenvalue splitting.
    pub fn field_magnitude(&self) -> f64 {
        (self.hx * self.hx + self.hy * self.hy + self.hz * self.hz).sqrt()
    }

    /// Spectral norm (largest |eigenvalue|).
    pub fn norm(&self) -> f64 {
        self.h0.abs() + self.field_magnitude()
    }

    /// Raw matrix-vector product; the result is generally not normalized.
    pub fn apply(&self, s: &Spinor) -> [Complex64; 2] {
        let (a, b) = s.components();
        let m = self.entries();
        [m[0][0] * a + m[0][1] * b, m[1][0] * a + m[1][1] * b]
    }

    /// `exp(-i H dt)` in closed form:
    /// `e^{-i h0 dt} [cos(|h| dt) I - i sin(|h| dt) (ĥ·σ)]`.
    pub fn propagator(&self, dt: f64) -> Unitary2 {
        let mag = self.field_magnitude();
        let phi = mag * dt;
        let (sin_phi, cos_phi) = phi.sin_cos();
        // sin(|h|dt)/|h|, finite as |h| → 0
        let k = if mag > 0.0 { sin_phi / mag } else { dt };
        let (nx, ny, nz) = (self.hx * k, self.hy * k, self.hz * k);
        let global = Complex64::from_polar(1.0, -self.h0 * dt);
        let i = Complex64::i();
        let m = [
            [Complex64::new(cos_phi, 0.0) - i * nz, -i * Complex64::new(nx, -ny)],
            [-i * Complex64::new(nx, ny), Complex64::new(cos_phi, 0.0) + i * nz],
        ];
        Unitary2 {
            m: [
                [global * m[0][0], global * m[0][1]],
                [global * m[1][0], global * m[1][1]],
            ],
        }
    }
}

/// A 2×2 unitary acting on spinors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    m: [[Complex64; 2]; 2],
}

impl Unitary2 {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            m: [[one, zero], [zero, one]],
        }
    }

    /// `exp(-i φ σz / 2) = diag(e^{-iφ/2}, e^{iφ/2})`.
    pub fn z_rotation(phi: f64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            m: [
                [Complex64::from_polar(1.0, -0.5 * phi), zero],
                [zero, Complex64::from_polar(1.0, 0.5 * phi)],
            ],
        }
    }

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    /// `self · other`
    pub fn compose(&self, other: &Self) -> Self {
        let (a, b) = (&self.m, &other.m);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Self { m: out }
    }

    /// Applies the unitary. No renormalization is performed so that norm
    /// drift stays observable.
    pub fn apply(&self, s: &Spinor) -> Spinor {
        let (a, b) = s.components();
        Spinor::from_raw(self.m[0][0] * a + self.m[0][1] * b, self.m[1][0] * a + self.m[1][1] * b)
    }

    /// Max-entry deviation of `U† U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let g = self.m[0][r].conj() * self.m[0][c] + self.m[1][r].conj() * self.m[1][c];
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }
}
