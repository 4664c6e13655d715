//! Numerical checks that inter-mode correlations equal half the rate of change
//! of single-mode quantities with the scaled coupling angle, and location of
//! the matching extremum / inflection pairs on an angle grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{steady_moments_at_angle, MomentSet};
use crate::error::{Error, Result};
use crate::model::{input_covariance, scaled_coupling, CouplingKind, SystemConfig};
use crate::observables::degrees;
use crate::oracle::{extract_moments, steady_covariance, DriftDiffusion};

pub const DEFAULT_STEP: f64 = 1e-4;
pub const MIN_GRID_POINTS: usize = 101;

/// Which inter-mode correlation is being checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Identity {
    /// `|<a^dag b>|`
    OnePhoton,
    /// `|<ab>|`
    TwoPhoton,
}

impl std::str::FromStr for Identity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "onePhoton" | "one-photon" | "one" => Ok(Identity::OnePhoton),
            "twoPhoton" | "two-photon" | "two" => Ok(Identity::TwoPhoton),
            other => Err(Error::Config(format!("unknown identity '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    A,
    B,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "A" => Ok(Mode::A),
            "b" | "B" => Ok(Mode::B),
            other => Err(Error::Config(format!("unknown mode '{other}'"))),
        }
    }
}

/// Single-mode quantity whose angle derivative is paired with the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Partner {
    Population,
    Correlation,
}

fn partner(kind: CouplingKind, which: Identity) -> Partner {
    match (kind, which) {
        (CouplingKind::Linear, Identity::OnePhoton) | (CouplingKind::Nonlinear, Identity::TwoPhoton) => {
            Partner::Population
        }
        _ => Partner::Correlation,
    }
}

fn pick(ms: &MomentSet, p: Partner, mode: Mode) -> Complex64 {
    match (p, mode) {
        (Partner::Population, Mode::A) => Complex64::new(ms.pop_a, 0.0),
        (Partner::Population, Mode::B) => Complex64::new(ms.pop_b, 0.0),
        (Partner::Correlation, Mode::A) => ms.c_aa,
        (Partner::Correlation, Mode::B) => ms.c_bb,
    }
}

fn inter(ms: &MomentSet, which: Identity) -> f64 {
    match which {
        Identity::OnePhoton => ms.c_adagb.norm(),
        Identity::TwoPhoton => ms.c_ab.norm(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResult {
    /// Inter-mode correlation magnitude.
    pub lhs: f64,
    /// Half magnitude of the finite-difference angle derivative.
    pub rhs: f64,
    pub residual: f64,
    pub step: f64,
    pub angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Differencing {
    #[default]
    Central,
    /// Central differences at `h` and `h/2` combined to cancel the `h^2` term.
    Richardson,
}

fn check_step(h: f64) -> Result<()> {
    if !(1e-6..=1e-2).contains(&h) {
        return Err(Error::Config(format!(
            "finite-difference step {h} outside [1e-6, 1e-2]"
        )));
    }
    Ok(())
}

fn central(eval: &impl Fn(f64) -> Result<MomentSet>, angle: f64, h: f64, p: Partner, mode: Mode) -> Result<Complex64> {
    let up = pick(&eval(angle + h)?, p, mode);
    let down = pick(&eval(angle - h)?, p, mode);
    Ok((up - down) / (2.0 * h))
}

fn run_identity(
    eval: impl Fn(f64) -> Result<MomentSet>,
    config: &SystemConfig,
    which: Identity,
    mode: Mode,
    h: f64,
    scheme: Differencing,
) -> Result<IdentityResult> {
    check_step(h)?;
    let angle = scaled_coupling(&config.coupling)?.angle;
    let p = partner(config.kind(), which);
    let lhs = inter(&eval(angle)?, which);
    let derivative = match scheme {
        Differencing::Central => central(&eval, angle, h, p, mode)?,
        Differencing::Richardson => {
            let coarse = central(&eval, angle, h, p, mode)?;
            let fine = central(&eval, angle, 0.5 * h, p, mode)?;
            (4.0 * fine - coarse) / 3.0
        }
    };
    let rhs = 0.5 * derivative.norm();
    Ok(IdentityResult {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        step: h,
        angle,
    })
}

/// Check one identity using the closed-form steady state.
pub fn check_identity(
    config: &SystemConfig,
    which: Identity,
    mode: Mode,
    h: f64,
    scheme: Differencing,
) -> Result<IdentityResult> {
    run_identity(|x| steady_moments_at_angle(config, x), config, which, mode, h, scheme)
}

/// Same check with every steady state re-solved from the drift/diffusion pair.
pub fn check_identity_oracle(
    config: &SystemConfig,
    which: Identity,
    mode: Mode,
    h: f64,
    scheme: Differencing,
) -> Result<IdentityResult> {
    if !config.coupling.g.is_finite() {
        return Err(Error::Config("covariance path needs finite coupling".into()));
    }
    let noise = input_covariance(config)?;
    let kappa = config.coupling.kappa;
    let kind = config.kind();
    // Stepping past the angle range gives a negative rate, which is the
    // analytic continuation of the same steady state.
    let eval = |x: f64| {
        let g = match kind {
            CouplingKind::Linear => kappa * x.tan(),
            CouplingKind::Nonlinear => kappa * x.tanh(),
        };
        let dd = DriftDiffusion::new(kind, g, kappa, &noise);
        extract_moments(&steady_covariance(&dd)?)
    };
    run_identity(eval, config, which, mode, h, scheme)
}

/// Residuals below this are indistinguishable from rounding and carry no order information.
pub const VACUOUS_RESIDUAL: f64 = 1e-13;

/// Observed convergence order `log2(r(h) / r(h/2))`; `None` when both
/// residuals are at rounding level.
pub fn convergence_order(config: &SystemConfig, which: Identity, mode: Mode, h: f64) -> Result<Option<f64>> {
    let coarse = check_identity(config, which, mode, h, Differencing::Central)?.residual;
    let fine = check_identity(config, which, mode, 0.5 * h, Differencing::Central)?.residual;
    if coarse < VACUOUS_RESIDUAL || fine < VACUOUS_RESIDUAL {
        return Ok(None);
    }
    Ok(Some((coarse / fine).log2()))
}

/// Curves compared by [`locate_extrema`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtremumPair {
    /// Peak of `|<a^dag b>|` against the inflection of `<a^dag a>`.
    FirstOrderVsPopulation,
    /// Peak of `eta_ab` against the inflection of `eta_aa`.
    PairDegreeVsSingleDegree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremaReport {
    pub pair: ExtremumPair,
    pub argmax: f64,
    pub max_value: f64,
    pub inflection: f64,
    /// `|argmax - inflection|` in units of the mean grid spacing.
    pub separation_cells: f64,
    pub all_inflections: Vec<f64>,
}

/// Evenly spaced grid including both ends.
pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![min],
        _ => (0..count)
            .map(|i| {
                if i + 1 == count {
                    max
                } else {
                    min + (max - min) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

/// Interpolated zero crossings of the second difference, skipping values at
/// rounding level so a root sitting exactly on a grid point is still found.
pub fn inflection_points(grid: &[f64], values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n < 3 {
        return vec![];
    }
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let floor = 1e-12 * scale;
    let d2: Vec<(f64, f64)> = (1..n - 1)
        .map(|i| (grid[i], values[i - 1] - 2.0 * values[i] + values[i + 1]))
        .filter(|(_, d)| d.abs() > floor)
        .collect();
    d2.windows(2)
        .filter(|w| w[0].1.signum() != w[1].1.signum())
        .map(|w| {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            x0 + (x1 - x0) * y0 / (y0 - y1)
        })
        .collect()
}

/// Sweep the scaled angle over `grid` in the steady state and compare the peak
/// of the inter-mode curve with the nearest inflection of its partner.
pub fn locate_extrema(config: &SystemConfig, pair: ExtremumPair, grid: &[f64]) -> Result<ExtremaReport> {
    if grid.len() < MIN_GRID_POINTS {
        return Err(Error::GridTooCoarse(format!(
            "{} points, need at least {MIN_GRID_POINTS}",
            grid.len()
        )));
    }
    if grid
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
    {
        return Err(Error::GridTooCoarse("grid must be strictly increasing".into()));
    }
    let mut peak_curve = Vec::with_capacity(grid.len());
    let mut partner_curve = Vec::with_capacity(grid.len());
    for &x in grid {
        let ms = steady_moments_at_angle(config, x)?;
        match pair {
            ExtremumPair::FirstOrderVsPopulation => {
                peak_curve.push(ms.c_adagb.norm());
                partner_curve.push(ms.pop_a);
            }
            ExtremumPair::PairDegreeVsSingleDegree => {
                let d = degrees(&ms);
                peak_curve.push(d.eta_ab.ok_or(Error::UndefinedDegree("eta_ab"))?);
                partner_curve.push(d.eta_aa.ok_or(Error::UndefinedDegree("eta_aa"))?);
            }
        }
    }
    let (imax, &max_value) = peak_curve
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    let argmax = grid[imax];
    let all = inflection_points(grid, &partner_curve);
    let inflection = all
        .iter()
        .copied()
        .min_by(|a, b| (a - argmax).abs().total_cmp(&(b - argmax).abs()))
        .ok_or_else(|| Error::GridTooCoarse("no inflection resolved on the grid".into()))?;
    let spacing = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    Ok(ExtremaReport {
        pair,
        argmax,
        max_value,
        inflection,
        separation_cells: (argmax - inflection).abs() / spacing,
        all_inflections: all,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CouplingConfig, ModeParams};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn at_angle(kind: CouplingKind, angle: f64, a: ModeParams, b: ModeParams, phi: f64) -> SystemConfig {
        SystemConfig::new(a, b, phi, CouplingConfig::from_angle(kind, angle, 1.0))
    }

    #[test]
    fn linear_population_identity() {
        // delta n = 0.25 from a thermal mode with n = 0.5 against vacuum
        let c = at_angle(
            CouplingKind::Linear,
            FRAC_PI_3,
            ModeParams::thermal(0.5),
            ModeParams::vacuum(),
            0.0,
        );
        let r = check_identity(&c, Identity::OnePhoton, Mode::A, DEFAULT_STEP, Differencing::Central).unwrap();
        assert!((r.lhs - 0.10825317547305485).abs() < 1e-12);
        assert!(r.residual < 1e-6);
    }

    #[test]
    fn parametric_vacuum_two_photon_identity() {
        let c = at_angle(
            CouplingKind::Nonlinear,
            0.5,
            ModeParams::vacuum(),
            ModeParams::vacuum(),
            0.0,
        );
        let r = check_identity(&c, Identity::TwoPhoton, Mode::A, DEFAULT_STEP, Differencing::Central).unwrap();
        assert!((r.angle - 0.5).abs() < 1e-14);
        assert!((r.lhs - 0.5 * 0.5f64.sinh() * 0.5f64.cosh()).abs() < 1e-12);
        assert!((r.lhs - 0.29380029841095034).abs() < 1e-12);
        assert!(r.residual < 1e-6);
        let o = check_identity_oracle(&c, Identity::TwoPhoton, Mode::A, DEFAULT_STEP, Differencing::Central).unwrap();
        assert!((o.residual - r.residual).abs() < 1e-6);
        assert!((o.lhs - r.lhs).abs() < 1e-10);
    }

    #[test]
    fn uncoupled_identities_are_trivial() {
        let a = ModeParams::new(0.7, 0.4);
        let b = ModeParams::new(0.2, 0.1);
        for kind in [CouplingKind::Linear, CouplingKind::Nonlinear] {
            for which in [Identity::OnePhoton, Identity::TwoPhoton] {
                let c = at_angle(kind, 0.0, a, b, 0.8);
                let r = check_identity(&c, which, Mode::A, DEFAULT_STEP, Differencing::Central).unwrap();
                assert_eq!(r.lhs, 0.0);
                assert!(r.rhs < 1e-12, "{kind} {which:?} {}", r.rhs);
            }
        }
    }

    #[test]
    fn all_mappings_hold_for_both_modes() {
        let a = ModeParams::new(1.3, 1.1);
        let b = ModeParams::new(0.4, 0.2);
        for (kind, angle) in [(CouplingKind::Linear, 0.6), (CouplingKind::Nonlinear, 0.9)] {
            let c = at_angle(kind, angle, a, b, 2.0);
            for which in [Identity::OnePhoton, Identity::TwoPhoton] {
                for mode in [Mode::A, Mode::B] {
                    let r = check_identity(&c, which, mode, DEFAULT_STEP, Differencing::Central).unwrap();
                    assert!(r.residual < 1e-6, "{kind} {which:?} {mode:?} {r:?}");
                    assert!(r.lhs > 1e-3);
                    let rich = check_identity(&c, which, mode, 1e-2, Differencing::Richardson).unwrap();
                    assert!(rich.residual < 1e-8, "{kind} {which:?} {mode:?} {rich:?}");
                    let order = convergence_order(&c, which, mode, 1e-2).unwrap().unwrap();
                    assert!(order > 1.9, "{kind} {which:?} {mode:?} order {order}");
                }
            }
        }
    }

    #[test]
    fn step_range_and_stability_enforced() {
        let c = at_angle(
            CouplingKind::Linear,
            0.5,
            ModeParams::thermal(1.0),
            ModeParams::vacuum(),
            0.0,
        );
        assert!(check_identity(&c, Identity::OnePhoton, Mode::A, 0.1, Differencing::Central).is_err());
        let c = SystemConfig::new(
            ModeParams::thermal(1.0),
            ModeParams::vacuum(),
            0.0,
            CouplingConfig::new(CouplingKind::Nonlinear, 1.0, 1.0),
        );
        assert!(matches!(
            check_identity(&c, Identity::OnePhoton, Mode::A, DEFAULT_STEP, Differencing::Central),
            Err(Error::Stability { .. })
        ));
    }

    #[test]
    fn first_order_peak_at_population_inflection() {
        let n = 0.1;
        let c = at_angle(
            CouplingKind::Linear,
            0.0,
            ModeParams::ideal_squeezed(n),
            ModeParams::vacuum(),
            FRAC_PI_2,
        );
        let grid = linspace(0.0, FRAC_PI_2, 201);
        let r = locate_extrema(&c, ExtremumPair::FirstOrderVsPopulation, &grid).unwrap();
        let cell = FRAC_PI_2 / 200.0;
        assert!((r.argmax - FRAC_PI_4).abs() <= cell);
        assert!((r.inflection - FRAC_PI_4).abs() <= cell);
        assert!(r.separation_cells <= 1.0);
    }

    #[test]
    fn pair_degree_peak_at_single_degree_inflection() {
        let n = 0.1;
        for a in [ModeParams::ideal_squeezed(n), ModeParams::new(n, n)] {
            let c = at_angle(CouplingKind::Linear, 0.0, a, ModeParams::thermal(n), FRAC_PI_2);
            let grid = linspace(0.0, FRAC_PI_2, 201);
            let r = locate_extrema(&c, ExtremumPair::PairDegreeVsSingleDegree, &grid).unwrap();
            assert!(r.separation_cells <= 1.0, "{r:?}");
            assert!((r.argmax - FRAC_PI_4).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_grids_rejected() {
        let c = at_angle(
            CouplingKind::Linear,
            0.0,
            ModeParams::thermal(0.1),
            ModeParams::vacuum(),
            0.0,
        );
        assert!(matches!(
            locate_extrema(&c, ExtremumPair::FirstOrderVsPopulation, &[0.3]),
            Err(Error::GridTooCoarse(_))
        ));
        let mut grid = linspace(0.0, 1.0, 150);
        grid[10] = grid[9];
        assert!(matches!(
            locate_extrema(&c, ExtremumPair::FirstOrderVsPopulation, &grid),
            Err(Error::GridTooCoarse(_))
        ));
    }

    #[test]
    fn inflection_of_cubic() {
        let grid = linspace(-1.0, 2.0, 301);
        let vals: Vec<f64> = grid.iter().map(|x| (x - 0.5f64).powi(3)).collect();
        let found = inflection_points(&grid, &vals);
        assert_eq!(found.len(), 1);
        assert!((found[0] - 0.5).abs() < 1e-2);
    }
}
