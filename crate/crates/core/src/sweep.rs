//! Parameter sweeps over one or two axes, evaluated on the closed-form path
//! with a per-row deviation against the covariance path.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, EnvelopePair, MomentSet, VarianceSet};
use crate::error::{Error, Result};
use crate::model::{max_correlation, CouplingConfig, CouplingKind, ModeParams, SystemConfig};
use crate::observables::{degrees, CorrelationDegrees};
use crate::oracle;
use crate::relations::linspace;
use crate::verify::scaled_deviation;

/// Environment variable capping the worker pool used for grid evaluation.
pub const THREADS_ENV: &str = "GAUSSDUET_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Scenario {
    EqualSqueezed,
    EqualPopUnequalSqueeze,
    SqueezedPlusVacuum,
    SqueezedPlusThermal,
    Custom,
}

impl std::str::FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_lowercase();
        match key.as_str() {
            "equalsqueezed" => Ok(Scenario::EqualSqueezed),
            "equalpopunequalsqueeze" => Ok(Scenario::EqualPopUnequalSqueeze),
            "squeezedplusvacuum" => Ok(Scenario::SqueezedPlusVacuum),
            "squeezedplusthermal" => Ok(Scenario::SqueezedPlusThermal),
            "custom" => Ok(Scenario::Custom),
            _ => Err(Error::Config(format!("unknown scenario '{s}'"))),
        }
    }
}

/// How the two-photon correlation of the squeezed mode(s) follows `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Squeeze {
    /// `m = sqrt(n(n+1))`
    Ideal,
    /// `m = n`
    Classical,
    Value(f64),
}

impl Squeeze {
    pub fn correlation(self, n: f64) -> f64 {
        match self {
            Squeeze::Ideal => max_correlation(n),
            Squeeze::Classical => n,
            Squeeze::Value(m) => m,
        }
    }
}

impl std::str::FromStr for Squeeze {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(Squeeze::Ideal),
            "classical" => Ok(Squeeze::Classical),
            v => v
                .parse()
                .map(Squeeze::Value)
                .map_err(|_| Error::Config(format!("squeezing must be 'ideal', 'classical' or a number, got '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    T,
    Psi,
    Chi,
    G,
    N,
    Phi,
    Na,
    Ma,
    Nb,
    Mb,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::T => "t",
            Param::Psi => "psi",
            Param::Chi => "chi",
            Param::G => "g",
            Param::N => "n",
            Param::Phi => "phi",
            Param::Na => "na",
            Param::Ma => "ma",
            Param::Nb => "nb",
            Param::Mb => "mb",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Param::T => "1/rate",
            Param::G => "rate",
            Param::Psi | Param::Chi | Param::Phi => "rad",
            _ => "quanta",
        }
    }

    /// Parameters that set the coupling strength; at most one may be given.
    fn is_coupling(self) -> bool {
        matches!(self, Param::Psi | Param::Chi | Param::G)
    }

    fn sweepable(self) -> bool {
        matches!(
            self,
            Param::T | Param::Psi | Param::Chi | Param::G | Param::N | Param::Phi
        )
    }
}

impl std::str::FromStr for Param {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "t" => Param::T,
            "psi" => Param::Psi,
            "chi" => Param::Chi,
            "g" => Param::G,
            "n" => Param::N,
            "phi" => Param::Phi,
            "na" => Param::Na,
            "ma" => Param::Ma,
            "nb" => Param::Nb,
            "mb" => Param::Mb,
            _ => return Err(Error::Config(format!("unknown parameter '{s}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: Param,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.count)
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;
    /// `name:min:max:count`
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("axis must look like name:min:max:count, got '{s}'"));
        let parts: Vec<&str> = s.split(':').collect();
        let [name, min, max, count] = parts[..] else {
            return Err(bad());
        };
        let axis = Axis {
            param: name.parse()?,
            min: min.trim().parse().map_err(|_| bad())?,
            max: max.trim().parse().map_err(|_| bad())?,
            count: count.trim().parse().map_err(|_| bad())?,
        };
        Ok(axis)
    }
}

/// Named output column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    PopA,
    PopB,
    ReCAa,
    ImCAa,
    AbsCAa,
    ReCBb,
    ImCBb,
    AbsCBb,
    ReCAdagb,
    ImCAdagb,
    AbsCAdagb,
    ReCAb,
    ImCAb,
    AbsCAb,
    XxA,
    YyA,
    XyA,
    XxB,
    YyB,
    XyB,
    EtaAa,
    EtaBb,
    GammaAb,
    EtaAb,
    Visibility,
    W,
    U,
    Psi,
    Chi,
}

impl Quantity {
    pub const ALL: [Quantity; 29] = [
        Quantity::PopA,
        Quantity::PopB,
        Quantity::ReCAa,
        Quantity::ImCAa,
        Quantity::AbsCAa,
        Quantity::ReCBb,
        Quantity::ImCBb,
        Quantity::AbsCBb,
        Quantity::ReCAdagb,
        Quantity::ImCAdagb,
        Quantity::AbsCAdagb,
        Quantity::ReCAb,
        Quantity::ImCAb,
        Quantity::AbsCAb,
        Quantity::XxA,
        Quantity::YyA,
        Quantity::XyA,
        Quantity::XxB,
        Quantity::YyB,
        Quantity::XyB,
        Quantity::EtaAa,
        Quantity::EtaBb,
        Quantity::GammaAb,
        Quantity::EtaAb,
        Quantity::Visibility,
        Quantity::W,
        Quantity::U,
        Quantity::Psi,
        Quantity::Chi,
    ];

    pub fn name(self) -> &'static str {
        use Quantity::*;
        match self {
            PopA => "pop_a",
            PopB => "pop_b",
            ReCAa => "re_c_aa",
            ImCAa => "im_c_aa",
            AbsCAa => "abs_c_aa",
            ReCBb => "re_c_bb",
            ImCBb => "im_c_bb",
            AbsCBb => "abs_c_bb",
            ReCAdagb => "re_c_adagb",
            ImCAdagb => "im_c_adagb",
            AbsCAdagb => "abs_c_adagb",
            ReCAb => "re_c_ab",
            ImCAb => "im_c_ab",
            AbsCAb => "abs_c_ab",
            XxA => "xx_a",
            YyA => "yy_a",
            XyA => "xy_a",
            XxB => "xx_b",
            YyB => "yy_b",
            XyB => "xy_b",
            EtaAa => "eta_aa",
            EtaBb => "eta_bb",
            GammaAb => "gamma_ab",
            EtaAb => "eta_ab",
            Visibility => "visibility",
            W => "w",
            U => "u",
            Psi => "psi",
            Chi => "chi",
        }
    }

    pub fn unit(self) -> &'static str {
        use Quantity::*;
        match self {
            PopA | PopB | ReCAa | ImCAa | AbsCAa | ReCBb | ImCBb | AbsCBb | ReCAdagb | ImCAdagb | AbsCAdagb | ReCAb
            | ImCAb | AbsCAb => "quanta",
            XxA | YyA | XyA | XxB | YyB | XyB => "vacuum=0.5",
            Psi | Chi => "rad",
            _ => "1",
        }
    }

    fn eval(self, p: &PointValues) -> Option<f64> {
        use Quantity::*;
        let (m, v, d) = (&p.moments, &p.variances, &p.degrees);
        Some(match self {
            PopA => m.pop_a,
            PopB => m.pop_b,
            ReCAa => m.c_aa.re,
            ImCAa => m.c_aa.im,
            AbsCAa => m.c_aa.norm(),
            ReCBb => m.c_bb.re,
            ImCBb => m.c_bb.im,
            AbsCBb => m.c_bb.norm(),
            ReCAdagb => m.c_adagb.re,
            ImCAdagb => m.c_adagb.im,
            AbsCAdagb => m.c_adagb.norm(),
            ReCAb => m.c_ab.re,
            ImCAb => m.c_ab.im,
            AbsCAb => m.c_ab.norm(),
            XxA => v.xx_a,
            YyA => v.yy_a,
            XyA => v.xy_a,
            XxB => v.xx_b,
            YyB => v.yy_b,
            XyB => v.xy_b,
            EtaAa => return d.eta_aa,
            EtaBb => return d.eta_bb,
            GammaAb => return d.gamma_ab,
            EtaAb => return d.eta_ab,
            Visibility => return d.visibility,
            W => p.envelopes.w,
            U => p.envelopes.u,
            Psi => return (p.kind == CouplingKind::Linear).then_some(p.angle),
            Chi => return (p.kind == CouplingKind::Nonlinear).then_some(p.angle),
        })
    }
}

impl std::str::FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .iter()
            .copied()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown quantity '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub scenario: Scenario,
    pub kind: CouplingKind,
    pub kappa: f64,
    pub squeeze: Squeeze,
    pub fixed: BTreeMap<Param, f64>,
    pub axes: Vec<Axis>,
    pub outputs: Vec<Quantity>,
}

impl SweepPlan {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Config(format!("need one or two axes, got {}", self.axes.len())));
        }
        if self.outputs.is_empty() {
            return Err(Error::Config("no output quantities requested".into()));
        }
        for axis in &self.axes {
            if !axis.param.sweepable() {
                return Err(Error::Config(format!("'{}' cannot be swept", axis.param.name())));
            }
            if axis.count < 2 {
                return Err(Error::Config(format!(
                    "axis '{}' needs at least 2 points, got {}",
                    axis.param.name(),
                    axis.count
                )));
            }
            if !axis.min.is_finite() || !axis.max.is_finite() || axis.max <= axis.min {
                return Err(Error::Config(format!(
                    "axis '{}' needs finite min < max",
                    axis.param.name()
                )));
            }
        }
        let mut used: Vec<Param> = self.axes.iter().map(|a| a.param).collect();
        used.extend(self.fixed.keys().copied());
        for (i, p) in used.iter().enumerate() {
            if used[..i].contains(p) {
                return Err(Error::Config(format!("parameter '{}' given more than once", p.name())));
            }
        }
        if used.iter().filter(|p| p.is_coupling()).count() > 1 {
            return Err(Error::Config("give the coupling as exactly one of g, psi, chi".into()));
        }
        let custom_only = [Param::Na, Param::Ma, Param::Nb, Param::Mb];
        if self.scenario == Scenario::Custom {
            if used.contains(&Param::N) {
                return Err(Error::Config("custom scenario takes na/nb rather than n".into()));
            }
        } else if let Some(p) = used.iter().find(|p| {
            custom_only.contains(p) && !(**p == Param::Mb && self.scenario == Scenario::EqualPopUnequalSqueeze)
        }) {
            return Err(Error::Config(format!(
                "'{}' applies only to the custom scenario",
                p.name()
            )));
        }
        match self.kind {
            CouplingKind::Linear if used.contains(&Param::Chi) => Err(Error::Config(
                "chi is the parametric angle; use psi or g for linear coupling".into(),
            )),
            CouplingKind::Nonlinear if used.contains(&Param::Psi) => Err(Error::Config(
                "psi is the beamsplitter angle; use chi or g for nonlinear coupling".into(),
            )),
            _ => Ok(()),
        }
    }

    /// All grid points, outer axis major.
    pub fn points(&self) -> Vec<Vec<f64>> {
        match self.axes.as_slice() {
            [a] => a.values().into_iter().map(|x| vec![x]).collect(),
            [a, b] => {
                let inner = b.values();
                a.values()
                    .into_iter()
                    .flat_map(|x| inner.iter().map(move |&y| vec![x, y]))
                    .collect()
            }
            _ => vec![],
        }
    }

    /// Configuration and time (`None` for the steady state) at one grid point.
    pub fn configure(&self, at: &[f64]) -> Result<(SystemConfig, Option<f64>)> {
        let mut values = self.fixed.clone();
        for (axis, &x) in self.axes.iter().zip(at) {
            values.insert(axis.param, x);
        }
        let get = |p: Param| values.get(&p).copied();
        let need = |p: Param| get(p).ok_or_else(|| Error::Config(format!("parameter '{}' is required", p.name())));
        let coupling = if let Some(g) = get(Param::G) {
            CouplingConfig::new(self.kind, g, self.kappa)
        } else if let Some(a) = get(Param::Psi).or(get(Param::Chi)) {
            CouplingConfig::from_angle(self.kind, a, self.kappa)
        } else {
            return Err(Error::Config("coupling strength (g, psi or chi) is required".into()));
        };
        let (a, b) = match self.scenario {
            Scenario::Custom => (
                ModeParams::new(need(Param::Na)?, get(Param::Ma).unwrap_or(0.0)),
                ModeParams::new(need(Param::Nb)?, get(Param::Mb).unwrap_or(0.0)),
            ),
            preset => {
                let n = need(Param::N)?;
                let squeezed = ModeParams::new(n, self.squeeze.correlation(n));
                let partner = match preset {
                    Scenario::EqualSqueezed => squeezed,
                    Scenario::EqualPopUnequalSqueeze => ModeParams::new(n, get(Param::Mb).unwrap_or(0.0)),
                    Scenario::SqueezedPlusVacuum => ModeParams::vacuum(),
                    _ => ModeParams::thermal(n),
                };
                (squeezed, partner)
            }
        };
        let config = SystemConfig::new(a, b, get(Param::Phi).unwrap_or(0.0), coupling);
        let config = crate::model::validate(&config)?.config;
        Ok((config, get(Param::T)))
    }
}

/// Everything a row can report about one grid point.
#[derive(Debug, Clone, Copy)]
pub struct PointValues {
    pub kind: CouplingKind,
    pub angle: f64,
    pub moments: MomentSet,
    pub variances: VarianceSet,
    pub degrees: CorrelationDegrees,
    pub envelopes: EnvelopePair,
}

pub fn evaluate(config: &SystemConfig, time: Option<f64>) -> Result<PointValues> {
    let envelopes = match time {
        Some(t) => EnvelopePair::at(&config.coupling, t)?,
        None => analytic::steady_envelopes(&config.coupling)?,
    };
    let moments = analytic::moments_with(config, envelopes)?;
    let ratio = config.coupling.g / config.coupling.kappa;
    Ok(PointValues {
        kind: config.kind(),
        angle: match config.kind() {
            CouplingKind::Linear => ratio.atan(),
            // above threshold the parametric angle does not exist
            CouplingKind::Nonlinear => ratio.atanh(),
        },
        moments,
        variances: analytic::variances_with(config, envelopes)?,
        degrees: degrees(&moments),
        envelopes,
    })
}

/// Largest scaled deviation between the two paths over moments and variances;
/// `None` when the covariance path does not apply (infinite coupling).
pub fn oracle_deviation(config: &SystemConfig, time: Option<f64>, values: &PointValues) -> Result<Option<f64>> {
    if !config.coupling.g.is_finite() {
        return Ok(None);
    }
    let cov = match time {
        Some(t) => oracle::covariance_at(config, t)?,
        None => oracle::steady_covariance(&oracle::assemble(config)?)?,
    };
    let om = oracle::extract_moments(&cov)?;
    let ov = oracle::extract_variances(&cov);
    let moments = values.moments.components().into_iter().zip(om.components());
    let variances = values.variances.components().into_iter().zip(ov.components());
    Ok(Some(
        moments
            .chain(variances)
            .map(|(a, o)| scaled_deviation(a, o))
            .fold(0.0, f64::max),
    ))
}

/// Rectangular result with optional cells; `None` is written as an empty CSV
/// cell or a JSON null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub units: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

pub const DEVIATION_COLUMN: &str = "oracle_maxdev";

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self
            .columns
            .iter()
            .zip(&self.units)
            .map(|(c, u)| format!("{c} [{u}]"))
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if let Some(x) = cell {
                    write!(out, "{}", format_number(*x)).expect("writing to a String cannot fail");
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let records: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| {
                        (
                            c.clone(),
                            v.filter(|x| x.is_finite()).map_or(serde_json::Value::Null, Into::into),
                        )
                    })
                    .collect();
                serde_json::Value::Object(map)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&records).expect("plain values always serialize");
        s.push('\n');
        s
    }

    /// Side-by-side join of tables sharing their leading `keys` columns; the
    /// remaining columns get `_<suffix>` and deviation columns are combined.
    pub fn merge(parts: &[(String, Table)], keys: usize) -> Result<Table> {
        let (_, first) = parts.first().ok_or_else(|| Error::Config("nothing to merge".into()))?;
        let mut columns: Vec<String> = first.columns[..keys].to_vec();
        let mut units: Vec<String> = first.units[..keys].to_vec();
        let mut rows: Vec<Vec<Option<f64>>> = first.rows.iter().map(|r| r[..keys].to_vec()).collect();
        let mut deviation = vec![Some(0.0f64); rows.len()];
        for (suffix, t) in parts {
            if t.rows.len() != rows.len() || t.rows.iter().zip(&rows).any(|(r, k)| r[..keys] != k[..keys]) {
                return Err(Error::Config("merged tables must share their grid".into()));
            }
            for (i, (c, u)) in t.columns.iter().zip(&t.units).enumerate().skip(keys) {
                if c == DEVIATION_COLUMN {
                    for (d, r) in deviation.iter_mut().zip(&t.rows) {
                        *d = match (*d, r[i]) {
                            (Some(x), Some(y)) => Some(x.max(y)),
                            _ => None,
                        };
                    }
                    continue;
                }
                columns.push(format!("{c}_{suffix}"));
                units.push(u.clone());
                for (row, r) in rows.iter_mut().zip(&t.rows) {
                    row.push(r[i]);
                }
            }
        }
        columns.push(DEVIATION_COLUMN.into());
        units.push("1".into());
        for (row, d) in rows.iter_mut().zip(deviation) {
            row.push(d);
        }
        Ok(Table { columns, units, rows })
    }
}

/// Shortest decimal that round-trips, with exponent form for very large or
/// small magnitudes.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else {
        String::new()
    }
}

/// Run `f` on a worker pool capped by [`THREADS_ENV`] when set.
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let threads: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

pub fn run_sweep(plan: &SweepPlan) -> Result<Table> {
    plan.validate()?;
    let points = plan.points();
    let rows: Result<Vec<Vec<Option<f64>>>> = with_pool(|| {
        points
            .par_iter()
            .map(|at| {
                let (config, time) = plan.configure(at)?;
                let values = evaluate(&config, time)?;
                let mut row: Vec<Option<f64>> = at.iter().map(|&x| Some(x)).collect();
                row.extend(plan.outputs.iter().map(|q| q.eval(&values).filter(|x| x.is_finite())));
                row.push(oracle_deviation(&config, time, &values)?);
                Ok(row)
            })
            .collect()
    })?;
    let mut columns: Vec<String> = plan.axes.iter().map(|a| a.param.name().to_string()).collect();
    let mut units: Vec<String> = plan.axes.iter().map(|a| a.param.unit().to_string()).collect();
    for q in &plan.outputs {
        columns.push(q.name().into());
        units.push(q.unit().into());
    }
    columns.push(DEVIATION_COLUMN.into());
    units.push("1".into());
    Ok(Table {
        columns,
        units,
        rows: rows?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn psi_plan(scenario: Scenario, outputs: Vec<Quantity>) -> SweepPlan {
        SweepPlan {
            scenario,
            kind: CouplingKind::Linear,
            kappa: 1.0,
            squeeze: Squeeze::Ideal,
            fixed: BTreeMap::from([(Param::N, 0.5)]),
            axes: vec![Axis {
                param: Param::Psi,
                min: 0.0,
                max: FRAC_PI_2,
                count: 201,
            }],
            outputs,
        }
    }

    #[test]
    fn axis_parsing() {
        let a: Axis = "psi:0:1.5:11".parse().unwrap();
        assert_eq!((a.param, a.min, a.max, a.count), (Param::Psi, 0.0, 1.5, 11));
        assert!("psi:0:1".parse::<Axis>().is_err());
        assert!("foo:0:1:3".parse::<Axis>().is_err());
        assert!("t:0:x:3".parse::<Axis>().is_err());
    }

    #[test]
    fn visibility_follows_half_sine() {
        let t = run_sweep(&psi_plan(Scenario::SqueezedPlusVacuum, vec![Quantity::Visibility])).unwrap();
        let psi = t.column("psi").unwrap();
        let vis = t.column("visibility").unwrap();
        for (p, v) in psi.iter().zip(&vis) {
            let p = p.unwrap();
            assert!((v.unwrap() - p.sin() * p.cos()).abs() < 1e-14);
        }
        let dev = t.column(DEVIATION_COLUMN).unwrap();
        assert_eq!(dev.last().unwrap(), &None, "infinite coupling has no covariance path");
        assert!(dev[..200].iter().all(|d| d.unwrap() < 1e-8));
        let imax = vis
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.unwrap().total_cmp(&b.1.unwrap()))
            .unwrap()
            .0;
        assert!((psi[imax].unwrap() - FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn plan_errors() {
        let mut s = psi_plan(Scenario::SqueezedPlusVacuum, vec![Quantity::PopA]);
        s.axes[0].count = 1;
        assert!(run_sweep(&s).is_err());

        let mut s = psi_plan(Scenario::SqueezedPlusVacuum, vec![Quantity::PopA]);
        s.fixed.insert(Param::G, 1.0);
        assert!(s.validate().is_err());

        let mut s = psi_plan(Scenario::SqueezedPlusVacuum, vec![Quantity::PopA]);
        s.kind = CouplingKind::Nonlinear;
        assert!(s.validate().is_err());

        let mut s = psi_plan(Scenario::SqueezedPlusVacuum, vec![Quantity::PopA]);
        s.axes.push(s.axes[0].clone());
        assert!(s.validate().is_err());

        let mut s = psi_plan(Scenario::SqueezedPlusVacuum, vec![Quantity::PopA]);
        s.fixed.insert(Param::Na, 1.0);
        assert!(s.validate().is_err());
    }

    #[test]
    fn undefined_cells_are_empty() {
        let plan = SweepPlan {
            scenario: Scenario::Custom,
            kind: CouplingKind::Linear,
            kappa: 1.0,
            squeeze: Squeeze::Ideal,
            fixed: BTreeMap::from([(Param::Na, 0.0), (Param::Nb, 0.0), (Param::G, 1.0)]),
            axes: vec![Axis {
                param: Param::T,
                min: 0.0,
                max: 1.0,
                count: 3,
            }],
            outputs: vec![Quantity::EtaAa, Quantity::PopA],
        };
        let t = run_sweep(&plan).unwrap();
        let csv = t.to_csv();
        assert_eq!(
            csv.lines().next().unwrap(),
            "t [1/rate],eta_aa [1],pop_a [quanta],oracle_maxdev [1]"
        );
        assert_eq!(csv.lines().nth(1).unwrap(), "0.0,,0.0,0.0");
        assert!(!csv.contains("NaN"));
        let json = t.to_json();
        assert!(json.contains("\"eta_aa\": null"));
    }

    #[test]
    fn two_axis_order_is_outer_major() {
        let plan = SweepPlan {
            scenario: Scenario::EqualSqueezed,
            kind: CouplingKind::Nonlinear,
            kappa: 1.0,
            squeeze: Squeeze::Ideal,
            fixed: BTreeMap::new(),
            axes: vec![
                Axis {
                    param: Param::Chi,
                    min: 0.0,
                    max: 1.0,
                    count: 3,
                },
                Axis {
                    param: Param::N,
                    min: 0.1,
                    max: 0.3,
                    count: 2,
                },
            ],
            outputs: vec![Quantity::YyA],
        };
        let t = run_sweep(&plan).unwrap();
        let keys: Vec<(f64, f64)> = t.rows.iter().map(|r| (r[0].unwrap(), r[1].unwrap())).collect();
        assert_eq!(
            keys,
            vec![(0.0, 0.1), (0.0, 0.3), (0.5, 0.1), (0.5, 0.3), (1.0, 0.1), (1.0, 0.3)]
        );
    }

    #[test]
    fn thread_count_does_not_change_bytes() {
        let plan = psi_plan(Scenario::EqualSqueezed, vec![Quantity::EtaAa, Quantity::XxA]);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run_sweep(&plan)).unwrap().to_csv();
        let b = four.install(|| run_sweep(&plan)).unwrap().to_csv();
        assert_eq!(a, b);
    }

    #[test]
    fn number_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 1e-20, 6.02e23, -0.25] {
            assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_number(f64::NAN), "");
    }
}
