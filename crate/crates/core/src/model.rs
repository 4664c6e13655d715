//! Parameter types, physical validation and derived scalars shared by the
//! closed-form and covariance-propagation paths.

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::QuadratureCovariance;

/// Inputs exceeding the squeezing bound by less than this are clamped onto it.
pub const PHYSICALITY_TOL: f64 = 1e-12;

/// State of one input mode (and of its reservoir): thermal occupation `n`
/// and two-photon correlation magnitude `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeParams {
    pub n: f64,
    pub m: f64,
}

impl ModeParams {
    pub const fn new(n: f64, m: f64) -> Self {
        Self { n, m }
    }

    pub const fn vacuum() -> Self {
        Self { n: 0.0, m: 0.0 }
    }

    pub const fn thermal(n: f64) -> Self {
        Self { n, m: 0.0 }
    }

    /// Maximally squeezed state, `m = sqrt(n(n+1))`.
    pub fn ideal_squeezed(n: f64) -> Self {
        Self {
            n,
            m: max_correlation(n),
        }
    }

    pub fn classification(&self) -> ModeClass {
        if self.m == 0.0 {
            if self.n == 0.0 {
                ModeClass::Vacuum
            } else {
                ModeClass::Thermal
            }
        } else if self.m <= self.n {
            ModeClass::ClassicalSqueezed
        } else {
            ModeClass::QuantumSqueezed
        }
    }

    fn validated(self, label: &str) -> Result<Self> {
        if !self.n.is_finite() || self.n < 0.0 {
            return Err(Error::Config(format!(
                "{label}: n must be finite and >= 0, got {}",
                self.n
            )));
        }
        if !self.m.is_finite() || self.m < 0.0 {
            return Err(Error::Config(format!(
                "{label}: m must be finite and >= 0, got {}",
                self.m
            )));
        }
        let bound = max_correlation(self.n);
        if self.m > bound + PHYSICALITY_TOL {
            return Err(Error::Physicality {
                n: self.n,
                m: self.m,
                bound,
            });
        }
        Ok(Self {
            n: self.n,
            m: self.m.min(bound),
        })
    }
}

/// Largest physical two-photon correlation for occupation `n`.
pub fn max_correlation(n: f64) -> f64 {
    (n * (n + 1.0)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeClass {
    Vacuum,
    Thermal,
    ClassicalSqueezed,
    QuantumSqueezed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    /// Beamsplitter-type photon exchange.
    Linear,
    /// Parametric down-conversion.
    Nonlinear,
}

impl std::fmt::Display for CouplingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CouplingKind::Linear => "linear",
            CouplingKind::Nonlinear => "nonlinear",
        })
    }
}

impl std::str::FromStr for CouplingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(CouplingKind::Linear),
            "nonlinear" => Ok(CouplingKind::Nonlinear),
            other => Err(Error::Config(format!("unknown coupling kind '{other}'"))),
        }
    }
}

/// Coupling strength `g` and loss rate `kappa`, both in the same rate unit.
///
/// `g = +inf` is accepted for the linear kind and denotes the strong-coupling
/// limit; only steady-state quantities exist there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingConfig {
    pub kind: CouplingKind,
    pub g: f64,
    pub kappa: f64,
}

impl CouplingConfig {
    pub const fn new(kind: CouplingKind, g: f64, kappa: f64) -> Self {
        Self { kind, g, kappa }
    }

    /// Coupling whose scaled angle is `angle`: `g = kappa tan(psi)` or `g = kappa tanh(chi)`.
    pub fn from_angle(kind: CouplingKind, angle: f64, kappa: f64) -> Self {
        let g = match kind {
            CouplingKind::Linear if angle >= FRAC_PI_2 => f64::INFINITY,
            CouplingKind::Linear => kappa * angle.tan(),
            CouplingKind::Nonlinear => kappa * angle.tanh(),
        };
        Self { kind, g, kappa }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.kappa.is_finite() || self.kappa <= 0.0 {
            return Err(Error::Config(format!(
                "kappa must be finite and > 0, got {}",
                self.kappa
            )));
        }
        if self.g.is_nan() || self.g < 0.0 {
            return Err(Error::Config(format!("g must be >= 0, got {}", self.g)));
        }
        if self.g.is_infinite() && self.kind == CouplingKind::Nonlinear {
            return Err(Error::Config(
                "infinite g is only meaningful for linear coupling".into(),
            ));
        }
        Ok(())
    }
}

/// Scaled coupling angle: `psi = arctan(g/kappa)` (linear) or
/// `chi = artanh(g/kappa)` (nonlinear).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledCoupling {
    pub kind: CouplingKind,
    pub angle: f64,
}

pub fn scaled_coupling(coupling: &CouplingConfig) -> Result<ScaledCoupling> {
    coupling.validate()?;
    let ratio = coupling.g / coupling.kappa;
    let angle = match coupling.kind {
        CouplingKind::Linear => ratio.atan(),
        CouplingKind::Nonlinear => {
            if ratio >= 1.0 {
                return Err(Error::Stability {
                    g: coupling.g,
                    kappa: coupling.kappa,
                });
            }
            ratio.atanh()
        }
    };
    Ok(ScaledCoupling {
        kind: coupling.kind,
        angle,
    })
}

/// Full two-mode configuration. `phi` is the noise-ellipse phase of mode a
/// (mode b is fixed at zero) and is kept reduced to `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub mode_a: ModeParams,
    pub mode_b: ModeParams,
    phi: f64,
    pub coupling: CouplingConfig,
}

impl SystemConfig {
    pub fn new(mode_a: ModeParams, mode_b: ModeParams, phi: f64, coupling: CouplingConfig) -> Self {
        Self {
            mode_a,
            mode_b,
            phi: reduce_phase(phi),
            coupling,
        }
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = reduce_phase(phi);
        self
    }

    pub fn with_coupling(mut self, coupling: CouplingConfig) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn kind(&self) -> CouplingKind {
        self.coupling.kind
    }
}

fn reduce_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// The configuration with `m` clamped onto the physicality bound where needed.
    pub config: SystemConfig,
    pub mode_a: ModeClass,
    pub mode_b: ModeClass,
}

pub fn validate(config: &SystemConfig) -> Result<ValidationReport> {
    config.coupling.validate()?;
    if !config.phi.is_finite() {
        return Err(Error::Config("phi must be finite".into()));
    }
    let mode_a = config.mode_a.validated("mode a")?;
    let mode_b = config.mode_b.validated("mode b")?;
    let config = SystemConfig {
        mode_a,
        mode_b,
        phi: reduce_phase(config.phi),
        ..*config
    };
    Ok(ValidationReport {
        config,
        mode_a: mode_a.classification(),
        mode_b: mode_b.classification(),
    })
}

/// Sum/difference parameters of the two modes together with the phase
/// structure of the redistribution terms.
///
/// The amplitude factors `alpha sin(phi)` and `beta cos(phi)` and the angle
/// `theta` are evaluated from `(delta_m, phi)` directly so no pole appears at
/// `phi` in `{0, pi/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub n: f64,
    pub dn: f64,
    pub m: f64,
    pub dm: f64,
    /// `dn / n`, zero when both modes are vacuum.
    pub delta_n: f64,
    /// `dm / m`, zero when neither mode carries two-photon correlations.
    pub delta_m: f64,
    /// `sqrt(sin^2 phi + delta_m^2 cos^2 phi)`.
    pub alpha_sin_phi: f64,
    /// `sqrt(cos^2 phi + delta_m^2 sin^2 phi)`.
    pub beta_cos_phi: f64,
    /// Phase angle of the redistribution term for the configured coupling kind.
    pub theta: f64,
    pub phi: f64,
}

impl DerivedParams {
    /// `alpha = sqrt(1 + cot^2 theta)`; undefined where `sin(phi) = 0`.
    pub fn alpha(&self) -> Option<f64> {
        let s = self.phi.sin();
        (s.abs() > 1e-15).then(|| self.alpha_sin_phi / s)
    }

    /// `beta = sqrt(1 + tan^2 theta)`; undefined where `cos(phi) = 0`.
    pub fn beta(&self) -> Option<f64> {
        let c = self.phi.cos();
        (c.abs() > 1e-15).then(|| self.beta_cos_phi / c)
    }

    /// `alpha m sin(phi) e^{i(theta + phi)}`, the linear-coupling redistribution amplitude.
    pub fn linear_amplitude(&self) -> Complex64 {
        let theta = linear_theta(self.delta_m, self.phi);
        Complex64::from_polar(self.alpha_sin_phi * self.m, theta + self.phi)
    }

    /// `beta m cos(phi) e^{i(theta + phi)}`, the parametric-coupling amplification amplitude.
    pub fn nonlinear_amplitude(&self) -> Complex64 {
        let theta = nonlinear_theta(self.delta_m, self.phi);
        Complex64::from_polar(self.beta_cos_phi * self.m, theta + self.phi)
    }
}

fn linear_theta(delta_m: f64, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    if delta_m == 0.0 && s == 0.0 {
        FRAC_PI_2
    } else {
        s.atan2(delta_m * c)
    }
}

fn nonlinear_theta(delta_m: f64, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    if delta_m == 0.0 && c == 0.0 {
        0.0
    } else {
        (delta_m * s).atan2(c)
    }
}

pub fn derived_params(config: &SystemConfig) -> Result<DerivedParams> {
    let config = validate(config)?.config;
    let (a, b) = (config.mode_a, config.mode_b);
    let n = 0.5 * (a.n + b.n);
    let dn = 0.5 * (a.n - b.n);
    let m = 0.5 * (a.m + b.m);
    let dm = 0.5 * (a.m - b.m);
    let delta_n = if n > 0.0 { dn / n } else { 0.0 };
    let delta_m = if m > 0.0 { dm / m } else { 0.0 };
    let phi = config.phi;
    let (s, c) = phi.sin_cos();
    let theta = match (config.kind(), m > 0.0) {
        (CouplingKind::Linear, true) => linear_theta(delta_m, phi),
        (CouplingKind::Nonlinear, true) => nonlinear_theta(delta_m, phi),
        (CouplingKind::Linear, false) => FRAC_PI_2,
        (CouplingKind::Nonlinear, false) => 0.0,
    };
    Ok(DerivedParams {
        n,
        dn,
        m,
        dm,
        delta_n,
        delta_m,
        alpha_sin_phi: (s * s + delta_m * delta_m * c * c).sqrt(),
        beta_cos_phi: (c * c + delta_m * delta_m * s * s).sqrt(),
        theta,
        phi,
    })
}

/// Covariance of the uncoupled input state, which is also the reservoir
/// noise covariance. Ordering `(X_a, Y_a, X_b, Y_b)`.
pub fn input_covariance(config: &SystemConfig) -> Result<QuadratureCovariance> {
    let config = validate(config)?.config;
    let (a, b) = (config.mode_a, config.mode_b);
    let (s2, c2) = (2.0 * config.phi).sin_cos();
    let mut m = Matrix4::zeros();
    m[(0, 0)] = 0.5 + a.n + a.m * c2;
    m[(1, 1)] = 0.5 + a.n - a.m * c2;
    m[(0, 1)] = -a.m * s2;
    m[(1, 0)] = -a.m * s2;
    m[(2, 2)] = 0.5 + b.n + b.m;
    m[(3, 3)] = 0.5 + b.n - b.m;
    Ok(QuadratureCovariance::new(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn linear(g: f64) -> CouplingConfig {
        CouplingConfig::new(CouplingKind::Linear, g, 1.0)
    }

    fn cfg(a: ModeParams, b: ModeParams, phi: f64) -> SystemConfig {
        SystemConfig::new(a, b, phi, linear(0.5))
    }

    #[test]
    fn ideal_squeezed_half_photon_is_quantum() {
        let c = cfg(ModeParams::new(0.5, 0.75f64.sqrt()), ModeParams::vacuum(), 0.0);
        let r = validate(&c).unwrap();
        assert_eq!(r.mode_a, ModeClass::QuantumSqueezed);
        assert_eq!(r.mode_b, ModeClass::Vacuum);
    }

    #[test]
    fn thermal_mode_classified() {
        let c = cfg(ModeParams::thermal(1.0), ModeParams::vacuum(), 0.0);
        assert_eq!(validate(&c).unwrap().mode_a, ModeClass::Thermal);
    }

    #[test]
    fn over_squeezed_mode_rejected() {
        // 0.9 > sqrt(0.75) = 0.8660...
        let c = cfg(ModeParams::new(0.5, 0.9), ModeParams::vacuum(), 0.0);
        assert!(matches!(validate(&c), Err(Error::Physicality { .. })));
    }

    #[test]
    fn tiny_violation_is_clamped() {
        let bound = max_correlation(0.5);
        let c = cfg(ModeParams::new(0.5, bound + 5e-13), ModeParams::vacuum(), 0.0);
        let r = validate(&c).unwrap();
        assert_eq!(r.config.mode_a.m, bound);
    }

    #[test]
    fn bad_rates_rejected() {
        let mut c = cfg(ModeParams::vacuum(), ModeParams::vacuum(), 0.0);
        c.coupling.kappa = 0.0;
        assert!(matches!(validate(&c), Err(Error::Config(_))));
        c.coupling.kappa = 1.0;
        c.coupling.g = -0.1;
        assert!(matches!(validate(&c), Err(Error::Config(_))));
    }

    #[test]
    fn phase_reduced_into_range() {
        let c = cfg(ModeParams::vacuum(), ModeParams::vacuum(), -FRAC_PI_4);
        assert!((c.phi() - 7.0 * FRAC_PI_4).abs() < 1e-15);
        let c = c.with_phi(5.0 * PI);
        assert!((c.phi() - PI).abs() < 1e-12);
    }

    #[test]
    fn scaled_angles() {
        assert_eq!(scaled_coupling(&linear(0.0)).unwrap().angle, 0.0);
        assert!((scaled_coupling(&linear(1.0)).unwrap().angle - FRAC_PI_4).abs() < 1e-15);
        let nl = CouplingConfig::new(CouplingKind::Nonlinear, 0.9, 1.0);
        // artanh(0.9) = ln(19)/2
        assert!((scaled_coupling(&nl).unwrap().angle - 0.5 * 19f64.ln()).abs() < 1e-14);
        let unstable = CouplingConfig::new(CouplingKind::Nonlinear, 1.0, 1.0);
        assert!(matches!(scaled_coupling(&unstable), Err(Error::Stability { .. })));
    }

    #[test]
    fn infinite_linear_coupling_is_right_angle() {
        let s = scaled_coupling(&linear(f64::INFINITY)).unwrap();
        assert_eq!(s.angle, FRAC_PI_2);
        let c = CouplingConfig::from_angle(CouplingKind::Linear, FRAC_PI_2, 1.0);
        assert!(c.g.is_infinite());
    }

    #[test]
    fn equal_squeezing_gives_right_angle_theta() {
        let c = cfg(ModeParams::new(1.0, 1.2), ModeParams::new(1.0, 1.2), 1.0);
        let d = derived_params(&c).unwrap();
        assert_eq!(d.delta_m, 0.0);
        assert!((d.theta - FRAC_PI_2).abs() < 1e-15);
        assert!((d.alpha().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn one_sided_squeezing_gives_theta_phi() {
        let phi = 0.7;
        let c = cfg(ModeParams::new(1.0, 1.2), ModeParams::new(0.3, 0.0), phi);
        let d = derived_params(&c).unwrap();
        assert_eq!(d.delta_m, 1.0);
        assert!((d.m - 0.6).abs() < 1e-15);
        assert!((d.theta - phi).abs() < 1e-15);
    }

    #[test]
    fn symmetric_populations_zero_delta_n() {
        let c = cfg(ModeParams::new(0.4, 0.1), ModeParams::new(0.4, 0.3), 0.2);
        assert_eq!(derived_params(&c).unwrap().delta_n, 0.0);
        let vac = cfg(ModeParams::vacuum(), ModeParams::vacuum(), 0.2);
        let d = derived_params(&vac).unwrap();
        assert_eq!((d.delta_n, d.delta_m), (0.0, 0.0));
    }

    #[test]
    fn amplitudes_match_direct_combinations() {
        // alpha m sin(phi) e^{i(theta+phi)} = (m_a e^{2i phi} - m_b)/2 and
        // beta m cos(phi) e^{i(theta+phi)} = (m_a e^{2i phi} + m_b)/2
        for &(ma, mb, phi) in &[(1.1, 0.4, 0.3), (0.2, 0.9, 2.5), (0.0, 0.5, 4.0), (0.7, 0.7, 0.0)] {
            let c = cfg(ModeParams::new(2.0, ma), ModeParams::new(2.0, mb), phi);
            let d = derived_params(&c).unwrap();
            let e2 = Complex64::from_polar(ma, 2.0 * phi);
            assert!((d.linear_amplitude() - (e2 - mb) * 0.5).norm() < 1e-14);
            assert!((d.nonlinear_amplitude() - (e2 + mb) * 0.5).norm() < 1e-14);
        }
    }

    #[test]
    fn input_covariance_entries() {
        let vac = cfg(ModeParams::vacuum(), ModeParams::vacuum(), 0.0);
        assert_eq!(*input_covariance(&vac).unwrap().matrix(), Matrix4::identity() * 0.5);

        let m = 0.75f64.sqrt();
        let c = cfg(ModeParams::new(0.5, m), ModeParams::vacuum(), 0.0);
        let cov = input_covariance(&c).unwrap();
        assert!((cov.get(0, 0) - (1.0 + m)).abs() < 1e-15);
        assert!((cov.get(1, 1) - (1.0 - m)).abs() < 1e-15);
        assert_eq!(cov.get(0, 1), 0.0);

        let c = c.with_phi(FRAC_PI_4);
        let cov = input_covariance(&c).unwrap();
        assert!((cov.get(0, 0) - 1.0).abs() < 1e-15);
        assert!((cov.get(1, 1) - 1.0).abs() < 1e-15);
        assert!((cov.get(0, 1) + m).abs() < 1e-15);
    }
}
