//! Seeded randomized checks: closed form against covariance propagation,
//! conservation laws, derivative identities and physicality.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, MomentSet};
use crate::model::{max_correlation, CouplingConfig, CouplingKind, ModeParams, SystemConfig};
use crate::observables::{degrees, CorrelationDegrees};
use crate::oracle;
use crate::relations::{check_identity, check_identity_oracle, convergence_order, Differencing, Identity, Mode};

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_COUNT: usize = 100;

/// Sample times in units of `1/kappa`.
pub const SAMPLE_TIMES: [f64; 4] = [0.0, 0.1, 1.0, 10.0];

pub const CROSS_PATH_RTOL: f64 = 1e-8;
pub const CROSS_PATH_ATOL: f64 = 1e-10;
pub const CONSERVATION_TOL: f64 = 1e-12;
pub const CONSTANCY_TOL: f64 = 1e-10;
pub const IDENTITY_TOL: f64 = 1e-6;
pub const IDENTITY_STEP: f64 = 1e-4;
pub const IDENTITY_CONFIGS: usize = 50;
pub const MIN_ORDER: f64 = 1.9;
/// Coarse step for the order measurement; the fine step is half of it.
pub const ORDER_STEP: f64 = 1e-2;
pub const PHYSICALITY_TOL: f64 = 1e-9;

const LINEAR_MAX_RATIO: f64 = 20.0;
const NONLINEAR_MAX_RATIO: f64 = 0.95;

/// Configuration `index` of the seeded sequence for `kind`; each kind draws
/// from its own stream so the two sequences are independent of `count`.
pub fn random_configs(kind: CouplingKind, seed: u64, count: usize) -> Vec<SystemConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(match kind {
        CouplingKind::Linear => 1,
        CouplingKind::Nonlinear => 2,
    });
    (0..count).map(|_| random_config(kind, &mut rng)).collect()
}

fn random_mode(rng: &mut impl Rng) -> ModeParams {
    let n = rng.gen_range(0.0..=2.0);
    let m = rng.gen_range(0.0..=1.0) * max_correlation(n);
    ModeParams::new(n, m)
}

fn random_config(kind: CouplingKind, rng: &mut impl Rng) -> SystemConfig {
    let a = random_mode(rng);
    let b = random_mode(rng);
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    let kappa = rng.gen_range(0.5..=2.0);
    let ratio = match kind {
        CouplingKind::Linear => rng.gen_range(0.0..=LINEAR_MAX_RATIO),
        CouplingKind::Nonlinear => rng.gen_range(0.0..=NONLINEAR_MAX_RATIO),
    };
    SystemConfig::new(a, b, phi, CouplingConfig::new(kind, ratio * kappa, kappa))
}

/// `|a - o| / max(|o|, atol/rtol)`; at most `rtol` exactly when the pair
/// passes a combined relative/absolute test.
pub fn scaled_deviation(analytic: f64, oracle: f64) -> f64 {
    (analytic - oracle).abs() / oracle.abs().max(CROSS_PATH_ATOL / CROSS_PATH_RTOL)
}

fn moment_deviation(a: &MomentSet, o: &MomentSet) -> f64 {
    a.components()
        .iter()
        .zip(o.components())
        .map(|(x, y)| scaled_deviation(*x, y))
        .fold(0.0, f64::max)
}

fn degree_deviation(a: &CorrelationDegrees, o: &CorrelationDegrees) -> f64 {
    let pairs = [
        (a.eta_aa, o.eta_aa),
        (a.eta_bb, o.eta_bb),
        (a.gamma_ab, o.gamma_ab),
        (a.eta_ab, o.eta_ab),
        (a.visibility, o.visibility),
    ];
    pairs
        .iter()
        .map(|p| match p {
            (Some(x), Some(y)) => scaled_deviation(*x, *y),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    CrossPath,
    Conservation,
    Constancy,
    Identities,
    ConvergenceOrder,
    IdentityPaths,
    Physicality,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::CrossPath,
        Suite::Conservation,
        Suite::Constancy,
        Suite::Identities,
        Suite::ConvergenceOrder,
        Suite::IdentityPaths,
        Suite::Physicality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::CrossPath => "cross-path",
            Suite::Conservation => "conservation",
            Suite::Constancy => "constancy",
            Suite::Identities => "identities",
            Suite::ConvergenceOrder => "convergence-order",
            Suite::IdentityPaths => "identity-paths",
            Suite::Physicality => "physicality",
        }
    }

    /// Bound and whether the statistic must stay below (`true`) or above it.
    pub fn bound(self) -> (f64, bool) {
        match self {
            Suite::CrossPath => (CROSS_PATH_RTOL, true),
            Suite::Conservation => (CONSERVATION_TOL, true),
            Suite::Constancy => (CONSTANCY_TOL, true),
            Suite::Identities => (IDENTITY_TOL, true),
            Suite::ConvergenceOrder => (MIN_ORDER, false),
            Suite::IdentityPaths => (IDENTITY_TOL, true),
            Suite::Physicality => (-PHYSICALITY_TOL, false),
        }
    }

    fn within(self, value: f64) -> bool {
        let (bound, upper) = self.bound();
        if upper {
            value <= bound
        } else {
            value >= bound
        }
    }

    /// Worse of two statistics.
    fn worse(self, x: f64, y: f64) -> f64 {
        if self.bound().1 {
            x.max(y)
        } else {
            x.min(y)
        }
    }

    fn start(self) -> f64 {
        if self.bound().1 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// A configuration that failed a suite, with enough to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub suite: Suite,
    pub kind: CouplingKind,
    pub index: usize,
    pub value: f64,
    pub detail: String,
    pub config: SystemConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: Suite,
    /// Worst statistic seen; the largest residual or the smallest order/eigenvalue.
    pub worst: f64,
    pub bound: f64,
    pub samples: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub count: usize,
    pub suites: Vec<SuiteResult>,
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn suite(&self, suite: Suite) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.suite == suite)
    }
}

/// One measured statistic for one configuration.
#[derive(Debug, Clone)]
struct Sample {
    suite: Suite,
    value: f64,
    detail: String,
}

fn sample(suite: Suite, value: f64, detail: impl Into<String>) -> Sample {
    Sample {
        suite,
        value,
        detail: detail.into(),
    }
}

fn error_sample(suite: Suite, err: crate::Error, at: &str) -> Sample {
    let value = if suite.bound().1 {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    };
    sample(suite, value, format!("{at}: {err}"))
}

/// Run every check on one configuration.
fn check_config(config: &SystemConfig, with_identities: bool) -> Vec<Sample> {
    let mut out = Vec::new();
    let kind = config.kind();
    let kappa = config.coupling.kappa;

    // (label, time or None for the steady state)
    let mut points: Vec<(String, Option<f64>)> = SAMPLE_TIMES
        .iter()
        .map(|&tau| (format!("t={tau}/kappa"), Some(tau / kappa)))
        .collect();
    points.push(("steady".into(), None));

    let total = config.mode_a.n + config.mode_b.n;
    for (label, time) in &points {
        let state = match time {
            Some(t) => analytic::moments(config, *t)
                .and_then(|a| Ok((a, analytic::variances(config, *t)?, oracle::covariance_at(config, *t)?))),
            None => analytic::steady_moments(config).and_then(|a| {
                let dd = oracle::assemble(config)?;
                Ok((a, analytic::steady_variances(config)?, oracle::steady_covariance(&dd)?))
            }),
        };
        let (a, va, cov) = match state {
            Ok(s) => s,
            Err(e) => {
                out.push(error_sample(Suite::CrossPath, e, label));
                continue;
            }
        };
        match oracle::extract_moments(&cov) {
            Ok(o) => {
                let dev = moment_deviation(&a, &o).max(degree_deviation(&degrees(&a), &degrees(&o)));
                out.push(sample(Suite::CrossPath, dev, format!("moments/degrees at {label}")));
            }
            Err(e) => out.push(error_sample(Suite::CrossPath, e, label)),
        }
        let vo = oracle::extract_variances(&cov);
        let dev = va
            .components()
            .iter()
            .zip(vo.components())
            .map(|(x, y)| scaled_deviation(*x, y))
            .fold(0.0, f64::max);
        out.push(sample(Suite::CrossPath, dev, format!("variances at {label}")));

        if kind == CouplingKind::Nonlinear {
            match analytic::variance_decomposition(config) {
                Ok(split) => {
                    let worst = [
                        (va.xx_a - va.xx_b - 2.0 * split.u_minus).abs(),
                        (va.yy_a - va.yy_b - 2.0 * split.u_plus).abs(),
                        (vo.xx_a - vo.xx_b - 2.0 * split.u_minus).abs(),
                        (vo.yy_a - vo.yy_b - 2.0 * split.u_plus).abs(),
                    ]
                    .into_iter()
                    .fold(0.0, f64::max);
                    out.push(sample(
                        Suite::Constancy,
                        worst,
                        format!("variance differences at {label}"),
                    ));
                }
                Err(e) => out.push(error_sample(Suite::Constancy, e, label)),
            }
        }
        if kind == CouplingKind::Linear {
            let drift = (a.pop_a + a.pop_b - total).abs();
            out.push(sample(Suite::Conservation, drift, format!("population sum at {label}")));
        }
        out.push(sample(
            Suite::Physicality,
            cov.min_uncertainty_eigenvalue(),
            format!("uncertainty eigenvalue at {label}"),
        ));
    }

    if kind == CouplingKind::Linear {
        // steady state swept across the whole beamsplitter angle range
        for k in 0..=8 {
            let psi = std::f64::consts::FRAC_PI_2 * k as f64 / 8.0;
            match analytic::steady_moments_at_angle(config, psi) {
                Ok(m) => out.push(sample(
                    Suite::Conservation,
                    (m.pop_a + m.pop_b - total).abs(),
                    format!("population sum at psi={psi}"),
                )),
                Err(e) => out.push(error_sample(Suite::Conservation, e, "angle sweep")),
            }
        }
    }

    if with_identities {
        for which in [Identity::OnePhoton, Identity::TwoPhoton] {
            let label = format!("{which:?}");
            let closed = check_identity(config, which, Mode::A, IDENTITY_STEP, Differencing::Central);
            match &closed {
                Ok(r) => out.push(sample(Suite::Identities, r.residual, label.clone())),
                Err(e) => out.push(error_sample(Suite::Identities, e.clone(), &label)),
            }
            match convergence_order(config, which, Mode::A, ORDER_STEP) {
                Ok(Some(order)) => out.push(sample(Suite::ConvergenceOrder, order, label.clone())),
                Ok(None) => {}
                Err(e) => out.push(error_sample(Suite::ConvergenceOrder, e, &label)),
            }
            let via_oracle = check_identity_oracle(config, which, Mode::A, IDENTITY_STEP, Differencing::Central);
            match (&closed, via_oracle) {
                (Ok(c), Ok(o)) => out.push(sample(Suite::IdentityPaths, (c.residual - o.residual).abs(), label)),
                (_, Err(e)) => out.push(error_sample(Suite::IdentityPaths, e, &label)),
                _ => {}
            }
        }
    }
    out
}

/// Run all suites on `count` configurations per coupling kind.
pub fn run(seed: u64, count: usize) -> VerifyReport {
    let mut jobs = Vec::new();
    for kind in [CouplingKind::Linear, CouplingKind::Nonlinear] {
        for (index, config) in random_configs(kind, seed, count).into_iter().enumerate() {
            jobs.push((kind, index, config));
        }
    }
    let results: Vec<_> = jobs
        .par_iter()
        .map(|(kind, index, config)| (*kind, *index, *config, check_config(config, *index < IDENTITY_CONFIGS)))
        .collect();

    let mut suites: Vec<SuiteResult> = Suite::ALL
        .iter()
        .map(|&suite| SuiteResult {
            suite,
            worst: suite.start(),
            bound: suite.bound().0,
            samples: 0,
            passed: true,
        })
        .collect();
    let mut failures = Vec::new();
    for (kind, index, config, samples) in results {
        for s in samples {
            let slot = suites
                .iter_mut()
                .find(|r| r.suite == s.suite)
                .expect("every suite is listed");
            slot.samples += 1;
            slot.worst = s.suite.worse(slot.worst, s.value);
            if !s.suite.within(s.value) {
                slot.passed = false;
                failures.push(Failure {
                    suite: s.suite,
                    kind,
                    index,
                    value: s.value,
                    detail: s.detail,
                    config,
                });
            }
        }
    }
    VerifyReport {
        seed,
        count,
        suites,
        failures,
    }
}
