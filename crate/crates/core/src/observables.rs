//! Normalized correlation degrees, squeezing classification and
//! entanglement verdicts.

use serde::{Deserialize, Serialize};

use crate::analytic::{steady_moments_at_angle, MomentSet, VarianceSet};
use crate::error::{Error, Result};
use crate::model::{derived_params, CouplingKind, ModeParams, SystemConfig};

/// Populations below this are treated as empty and their degrees as undefined.
pub const EMPTY_POPULATION: f64 = 1e-14;

/// Variances this far below one half count as quantum squeezed.
pub const SHOT_NOISE_MARGIN: f64 = 1e-12;

/// Normalized correlation degrees. `None` marks a vanishing denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationDegrees {
    pub eta_aa: Option<f64>,
    pub eta_bb: Option<f64>,
    pub gamma_ab: Option<f64>,
    pub eta_ab: Option<f64>,
    pub visibility: Option<f64>,
}

impl CorrelationDegrees {
    /// Look up a degree by name, failing when it is undefined.
    pub fn get(&self, name: &str) -> Result<f64> {
        let (value, key) = match name {
            "eta_aa" => (self.eta_aa, "eta_aa"),
            "eta_bb" => (self.eta_bb, "eta_bb"),
            "gamma_ab" => (self.gamma_ab, "gamma_ab"),
            "eta_ab" => (self.eta_ab, "eta_ab"),
            "visibility" => (self.visibility, "visibility"),
            other => return Err(Error::Config(format!("unknown degree '{other}'"))),
        };
        value.ok_or(Error::UndefinedDegree(key))
    }
}

pub fn degrees(ms: &MomentSet) -> CorrelationDegrees {
    let (pa, pb) = (ms.pop_a, ms.pop_b);
    let single = |c: f64, p: f64| (p >= EMPTY_POPULATION).then(|| c / p);
    let both = (pa >= EMPTY_POPULATION && pb >= EMPTY_POPULATION).then(|| (pa * pb).sqrt());
    let total = pa + pb;
    CorrelationDegrees {
        eta_aa: single(ms.c_aa.norm(), pa),
        eta_bb: single(ms.c_bb.norm(), pb),
        gamma_ab: both.map(|d| ms.c_adagb.norm() / d),
        eta_ab: both.map(|d| ms.c_ab.norm() / d),
        visibility: (total >= EMPTY_POPULATION).then(|| 2.0 * ms.c_adagb.norm() / total),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SqueezingClass {
    None,
    Classical,
    Quantum,
}

impl std::fmt::Display for SqueezingClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SqueezingClass::None => "none",
            SqueezingClass::Classical => "classical",
            SqueezingClass::Quantum => "quantum",
        })
    }
}

/// Below shot noise is quantum; below the conjugate quadrature but above
/// shot noise is classical.
pub fn classify_quadrature(variance: f64, conjugate: f64) -> SqueezingClass {
    if variance < 0.5 - SHOT_NOISE_MARGIN {
        SqueezingClass::Quantum
    } else if variance < conjugate - SHOT_NOISE_MARGIN {
        SqueezingClass::Classical
    } else {
        SqueezingClass::None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqueezingReport {
    pub x_a: SqueezingClass,
    pub y_a: SqueezingClass,
    pub x_b: SqueezingClass,
    pub y_b: SqueezingClass,
}

pub fn squeezing_report(vs: &VarianceSet) -> SqueezingReport {
    SqueezingReport {
        x_a: classify_quadrature(vs.xx_a, vs.yy_a),
        y_a: classify_quadrature(vs.yy_a, vs.xx_a),
        x_b: classify_quadrature(vs.xx_b, vs.yy_b),
        y_b: classify_quadrature(vs.yy_b, vs.xx_b),
    }
}

/// Entanglement tests on the degrees. The inequality with single-mode degree
/// is evaluated once with mode a and once with mode b.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntanglementVerdict {
    /// `eta_ab > 1`
    pub simple: bool,
    /// `eta_ab^2 > 1 + eta_aa^2 - gamma_ab^2`
    pub cauchy_schwarz_a: bool,
    /// same with `eta_bb`
    pub cauchy_schwarz_b: bool,
}

pub fn entanglement_check(deg: &CorrelationDegrees) -> EntanglementVerdict {
    let (Some(eta_ab), Some(gamma)) = (deg.eta_ab, deg.gamma_ab) else {
        return EntanglementVerdict {
            simple: false,
            cauchy_schwarz_a: false,
            cauchy_schwarz_b: false,
        };
    };
    let cs = |single: Option<f64>| single.is_some_and(|e| eta_ab * eta_ab > 1.0 + e * e - gamma * gamma);
    EntanglementVerdict {
        simple: eta_ab > 1.0,
        cauchy_schwarz_a: cs(deg.eta_aa),
        cauchy_schwarz_b: cs(deg.eta_bb),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub squeezing: SqueezingReport,
    pub entanglement: EntanglementVerdict,
}

pub fn verdicts(ms: &MomentSet, vs: &VarianceSet) -> Verdicts {
    Verdicts {
        squeezing: squeezing_report(vs),
        entanglement: entanglement_check(&degrees(ms)),
    }
}

/// Beamsplitter angle below which equal, ideally squeezed inputs keep
/// `eta_ii > 1` in the steady state: `cos^2 psi = sqrt(1 - 1/(n+1))`.
pub fn quantum_threshold_psi(n: f64) -> Result<f64> {
    if !n.is_finite() || n <= 0.0 {
        return Err(Error::Config(format!("threshold needs finite n > 0, got {n}")));
    }
    Ok((1.0 - 1.0 / (n + 1.0)).sqrt().sqrt().acos())
}

/// Left side of the steady beamsplitter pairing condition for equal
/// populations, `(m/n) alpha sin(phi) sin(psi) cos(psi)`; entangled when > 1.
pub fn linear_pairing_strength(config: &SystemConfig, psi: f64) -> Result<f64> {
    let d = derived_params(config)?;
    if d.n < EMPTY_POPULATION {
        return Err(Error::UndefinedDegree("eta_ab"));
    }
    Ok(d.m / d.n * d.alpha_sin_phi * psi.sin() * psi.cos())
}

/// The input pairings for which strong parametric coupling has a closed-form limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitScenario {
    EqualSqueezed,
    SqueezedPlusThermal,
    SqueezedPlusVacuum,
}

/// Degrees approached as the parametric angle grows without bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeLimits {
    pub scenario: LimitScenario,
    pub eta_aa: f64,
    pub eta_bb: f64,
    pub eta_ab: f64,
}

fn same_mode(a: &ModeParams, b: &ModeParams) -> bool {
    (a.n - b.n).abs() <= 1e-12 && (a.m - b.m).abs() <= 1e-12
}

pub fn nonlinear_degree_limits(config: &SystemConfig) -> Result<DegreeLimits> {
    if config.kind() != CouplingKind::Nonlinear {
        return Err(Error::ScenarioMismatch(
            "limits exist only for parametric coupling".into(),
        ));
    }
    let (a, b) = (config.mode_a, config.mode_b);
    let phi = config.phi();
    let scenario = if same_mode(&a, &b) {
        LimitScenario::EqualSqueezed
    } else if b.m == 0.0 && b.n == 0.0 {
        LimitScenario::SqueezedPlusVacuum
    } else if b.m == 0.0 && (a.n - b.n).abs() <= 1e-12 {
        LimitScenario::SqueezedPlusThermal
    } else {
        return Err(Error::ScenarioMismatch(format!(
            "mode a (n={}, m={}) and mode b (n={}, m={})",
            a.n, a.m, b.n, b.m
        )));
    };
    // Both populations grow as (n+1/2) sinh^2 and both single-mode correlations
    // as |m_a e^{2i phi} + m_b|/2 sinh^2, so the single-mode degrees share one limit.
    let pair = 0.5 * (a.m * (2.0 * phi).cos() + b.m).hypot(a.m * (2.0 * phi).sin());
    let single = match scenario {
        LimitScenario::EqualSqueezed => 2.0 * a.m * phi.cos().abs() / (2.0 * a.n + 1.0),
        LimitScenario::SqueezedPlusThermal => a.m / (2.0 * a.n + 1.0),
        LimitScenario::SqueezedPlusVacuum => a.m / (a.n + 1.0),
    };
    debug_assert!((single - pair / (0.5 * (a.n + b.n) + 0.5)).abs() < 1e-12);
    Ok(DegreeLimits {
        scenario,
        eta_aa: single,
        eta_bb: single,
        eta_ab: 1.0,
    })
}

/// Steady degrees at an explicit scaled angle.
pub fn steady_degrees_at_angle(config: &SystemConfig, angle: f64) -> Result<CorrelationDegrees> {
    steady_moments_at_angle(config, angle).map(|ms| degrees(&ms))
}
