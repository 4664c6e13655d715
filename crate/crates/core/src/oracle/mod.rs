//! Covariance-matrix propagation of the quadrature Langevin equations.
//!
//! This path never touches the closed forms: it assembles the drift and
//! diffusion matrices, evolves the symmetrized second moments by matrix
//! exponential or by direct integration, and reads the mode moments off the
//! covariance blocks. The analytic module is checked against it.

mod expm;
mod lyapunov;

pub use expm::expm;

use nalgebra::{Matrix4, SMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{MomentSet, VarianceSet};
use crate::error::{Error, Result};
use crate::model::{input_covariance, validate, CouplingKind, SystemConfig};

/// Quadrature indices in the covariance ordering.
pub const XA: usize = 0;
pub const YA: usize = 1;
pub const XB: usize = 2;
pub const YB: usize = 3;

/// Symmetrized second moments `<z_i z_j + z_j z_i>/2` for `z = (X_a, Y_a, X_b, Y_b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureCovariance(Matrix4<f64>);

impl QuadratureCovariance {
    pub fn new(m: Matrix4<f64>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn asymmetry(&self) -> f64 {
        (self.0 - self.0.transpose()).amax()
    }

    /// Smallest eigenvalue of the Hermitian matrix `M + (i/2) Omega`; it is
    /// non-negative exactly when the covariance describes a quantum state.
    pub fn min_uncertainty_eigenvalue(&self) -> f64 {
        // H = S + iK is Hermitian with K antisymmetric; the real embedding
        // [[S, -K], [K, S]] carries each eigenvalue of H twice.
        let s = 0.5 * (self.0 + self.0.transpose());
        let mut k = Matrix4::zeros();
        for blk in [XA, XB] {
            k[(blk, blk + 1)] = 0.5;
            k[(blk + 1, blk)] = -0.5;
        }
        let mut embed = SMatrix::<f64, 8, 8>::zeros();
        embed.fixed_view_mut::<4, 4>(0, 0).copy_from(&s);
        embed.fixed_view_mut::<4, 4>(4, 4).copy_from(&s);
        embed.fixed_view_mut::<4, 4>(0, 4).copy_from(&(-k));
        embed.fixed_view_mut::<4, 4>(4, 0).copy_from(&k);
        embed.symmetric_eigenvalues().min()
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.asymmetry() <= 1e-12 && self.min_uncertainty_eigenvalue() >= -tol
    }
}

/// Drift `A` and diffusion `D` of `dM/dt = A M + M A^T + D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftDiffusion {
    pub drift: Matrix4<f64>,
    pub diffusion: Matrix4<f64>,
}

impl DriftDiffusion {
    /// Builds the matrices for coupling rate `g` and loss `kappa` with the
    /// reservoir covariance `noise`. No sign or stability constraint on `g`.
    pub fn new(kind: CouplingKind, g: f64, kappa: f64, noise: &QuadratureCovariance) -> Self {
        let mut a = Matrix4::identity() * -kappa;
        match kind {
            CouplingKind::Linear => {
                for (p, q) in [(XA, XB), (YA, YB)] {
                    a[(p, q)] = g;
                    a[(q, p)] = -g;
                }
            }
            CouplingKind::Nonlinear => {
                a[(XA, XB)] = g;
                a[(XB, XA)] = g;
                a[(YA, YB)] = -g;
                a[(YB, YA)] = -g;
            }
        }
        Self {
            drift: a,
            diffusion: noise.matrix() * (2.0 * kappa),
        }
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.drift.complex_eigenvalues().iter().copied().collect()
    }

    pub fn is_hurwitz(&self) -> bool {
        self.eigenvalues().iter().all(|e| e.re < 0.0)
    }

    fn rate_scale(&self) -> f64 {
        expm::one_norm(&self.drift)
    }
}

pub fn assemble(config: &SystemConfig) -> Result<DriftDiffusion> {
    let config = validate(config)?.config;
    let c = config.coupling;
    if !c.g.is_finite() {
        return Err(Error::Config(
            "covariance propagation needs a finite coupling rate".into(),
        ));
    }
    let noise = input_covariance(&config)?;
    Ok(DriftDiffusion::new(c.kind, c.g, c.kappa, &noise))
}

/// Stationary covariance, the solution of `A M + M A^T + D = 0`.
pub fn steady_covariance(dd: &DriftDiffusion) -> Result<QuadratureCovariance> {
    if !dd.is_hurwitz() {
        let rate = dd.drift[(XA, XB)].abs();
        return Err(Error::Stability {
            g: rate,
            kappa: -dd.drift[(XA, XA)],
        });
    }
    let m = lyapunov::solve(&dd.drift, &dd.diffusion)?;
    let res = lyapunov::residual(&dd.drift, &m, &dd.diffusion);
    let scale = dd.diffusion.norm().max(f64::MIN_POSITIVE);
    if res > 1e-10 * scale {
        return Err(Error::Numerical(format!("Lyapunov residual {res:e} too large")));
    }
    Ok(QuadratureCovariance(0.5 * (m + m.transpose())))
}

/// Covariance after time `t` starting from `m0`.
///
/// Stable drift uses `M(t) = e^{At} (M0 - M_inf) e^{A^T t} + M_inf`; unstable
/// drift falls back to [`propagate_integrated`].
pub fn propagate(m0: &QuadratureCovariance, dd: &DriftDiffusion, t: f64) -> Result<QuadratureCovariance> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(*m0);
    }
    if !dd.is_hurwitz() {
        return propagate_integrated(m0, dd, t);
    }
    let m_inf = steady_covariance(dd)?.0;
    let e = expm(&(dd.drift * t));
    let m = e * (m0.0 - m_inf) * e.transpose() + m_inf;
    Ok(QuadratureCovariance(0.5 * (m + m.transpose())))
}

/// Fixed-step fourth-order Runge-Kutta integration of the moment equation.
pub fn propagate_integrated(m0: &QuadratureCovariance, dd: &DriftDiffusion, t: f64) -> Result<QuadratureCovariance> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(*m0);
    }
    // well inside the 1/(20 rate) bound so the integrator error stays near 1e-10
    let h_max = (1.0 / (200.0 * dd.rate_scale())).min(t / 100.0);
    let steps = (t / h_max).ceil() as usize;
    let h = t / steps as f64;
    let (a, d) = (dd.drift, dd.diffusion);
    let rhs = |m: &Matrix4<f64>| a * m + m * a.transpose() + d;
    let mut m = m0.0;
    for _ in 0..steps {
        let k1 = rhs(&m);
        let k2 = rhs(&(m + k1 * (0.5 * h)));
        let k3 = rhs(&(m + k2 * (0.5 * h)));
        let k4 = rhs(&(m + k3 * h));
        m += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Ok(QuadratureCovariance(0.5 * (m + m.transpose())))
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Config(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// Reads populations and correlations off the covariance blocks.
///
/// With `r = (X + iY)/sqrt(2)` the symmetrized blocks give
/// `<r r> = (<X^2> - <Y^2>)/2 + i<XY>_sym` (the commutator term cancels the
/// vacuum offset). Complex outputs are reported as conjugates of these raw
/// block moments, which places the input correlation of mode a at
/// `m_a e^{2i phi}`.
pub fn extract_moments(m: &QuadratureCovariance) -> Result<MomentSet> {
    let g = |i, j| m.get(i, j);
    let pop_a = 0.5 * (g(XA, XA) + g(YA, YA) - 1.0);
    let pop_b = 0.5 * (g(XB, XB) + g(YB, YB) - 1.0);
    for pop in [pop_a, pop_b] {
        if pop < -1e-8 {
            return Err(Error::NegativePopulation { value: pop });
        }
    }
    let c_aa = Complex64::new(0.5 * (g(XA, XA) - g(YA, YA)), -g(XA, YA));
    let c_bb = Complex64::new(0.5 * (g(XB, XB) - g(YB, YB)), -g(XB, YB));
    let c_adagb = Complex64::new(0.5 * (g(XA, XB) + g(YA, YB)), -0.5 * (g(XA, YB) - g(YA, XB)));
    let c_ab = Complex64::new(0.5 * (g(XA, XB) - g(YA, YB)), -0.5 * (g(XA, YB) + g(YA, XB)));
    Ok(MomentSet {
        pop_a,
        pop_b,
        c_aa,
        c_bb,
        c_adagb,
        c_ab,
    })
}

pub fn extract_variances(m: &QuadratureCovariance) -> VarianceSet {
    VarianceSet {
        xx_a: m.get(XA, XA),
        yy_a: m.get(YA, YA),
        xy_a: m.get(XA, YA),
        xx_b: m.get(XB, XB),
        yy_b: m.get(YB, YB),
        xy_b: m.get(XB, YB),
    }
}

/// Oracle moments at time `t` for an uncoupled input state.
pub fn moments_at(config: &SystemConfig, t: f64) -> Result<MomentSet> {
    extract_moments(&covariance_at(config, t)?)
}

pub fn covariance_at(config: &SystemConfig, t: f64) -> Result<QuadratureCovariance> {
    let dd = assemble(config)?;
    propagate(&input_covariance(config)?, &dd, t)
}

pub fn steady_moments(config: &SystemConfig) -> Result<MomentSet> {
    extract_moments(&steady_covariance(&assemble(config)?)?)
}
