//! Command-line front end. Every number printed comes from the library API.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::analytic::{MomentSet, VarianceSet};
use crate::error::{Error, Result};
use crate::figure::{self, FigureId};
use crate::model::{validate, CouplingConfig, CouplingKind, ModeParams, SystemConfig};
use crate::observables::{degrees, verdicts, CorrelationDegrees, Verdicts};
use crate::oracle;
use crate::relations::{check_identity, check_identity_oracle, Differencing, Identity, IdentityResult, Mode};
use crate::sweep::{
    self, evaluate, format_number, oracle_deviation, Axis, Param, Quantity, Scenario, Squeeze, SweepPlan,
};
use crate::verify::{self, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_STABILITY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "gaussduet",
    version,
    about = "Two-mode Gaussian moments under beamsplitter and parametric coupling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one configuration on both paths.
    Moments(MomentsArgs),
    /// Sweep one or two parameters and write CSV or JSON.
    Sweep(SweepArgs),
    /// Regenerate a figure preset into a directory.
    Figure(FigureArgs),
    /// Run the randomized verification suites.
    Verify(VerifyArgs),
    /// Check the derivative identities at one configuration.
    Relations(RelationsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// Flags shared by every command that describes a system. Values missing on
/// the command line are taken from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct SystemArgs {
    #[arg(long)]
    pub kind: Option<CouplingKind>,
    /// Coupling rate; `inf` selects the strong-coupling limit (linear, steady only).
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub na: Option<f64>,
    #[arg(long)]
    pub ma: Option<f64>,
    #[arg(long)]
    pub nb: Option<f64>,
    #[arg(long)]
    pub mb: Option<f64>,
    /// Rotation of the mode-a noise ellipse.
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    #[arg(long, conflicts_with = "steady")]
    pub t: Option<f64>,
    #[arg(long)]
    pub steady: bool,
    /// Flat JSON object whose keys match the long flag names.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// equalSqueezed, equalPopUnequalSqueeze, squeezedPlusVacuum, squeezedPlusThermal or custom.
    #[arg(long)]
    pub scenario: Option<Scenario>,
    /// Photon number of the preset scenarios.
    #[arg(long)]
    pub n: Option<f64>,
    /// Squeezing of the preset scenarios: ideal, classical or a value.
    #[arg(long)]
    pub m: Option<Squeeze>,
    #[arg(long)]
    pub psi: Option<f64>,
    #[arg(long)]
    pub chi: Option<f64>,
    /// `name:min:max:count`, name one of t, psi, chi, g, n, phi.
    #[arg(long = "axis")]
    pub axes: Vec<Axis>,
    /// Comma-separated output quantities.
    #[arg(long, value_delimiter = ',')]
    pub outputs: Vec<Quantity>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// fig2a, fig3u, fig3, fig5, fig6, fig7, fig8a or fig8b.
    pub id: String,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = verify::DEFAULT_SEED)]
    pub seed: u64,
    /// Configurations per coupling kind.
    #[arg(long, default_value_t = verify::DEFAULT_COUNT)]
    pub count: usize,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RelationsArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// onePhoton, twoPhoton; both when omitted.
    #[arg(long)]
    pub which: Option<Identity>,
    #[arg(long, default_value = "a")]
    pub mode: Mode,
    #[arg(long, default_value_t = crate::relations::DEFAULT_STEP)]
    pub h: f64,
    #[arg(long)]
    pub richardson: bool,
    /// Repeat the check with steady states from the covariance path.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Stability { .. } => EXIT_STABILITY,
        _ => EXIT_USAGE,
    }
}

fn read_config(path: &PathBuf) -> Result<Map<String, Value>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(Error::Config("config file must hold a flat JSON object".into())),
        Err(e) => Err(Error::Config(format!("config file {}: {e}", path.display()))),
    }
}

fn number(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::Config(format!("'{key}' is not a number"))),
        Value::String(s) => s
            .parse()
            .map_err(|_| Error::Config(format!("'{key}' is not a number: '{s}'"))),
        _ => Err(Error::Config(format!("'{key}' must be a number"))),
    }
}

fn text(key: &str, v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(Error::Config(format!("'{key}' must be a string"))),
    }
}

fn fill<T>(slot: &mut Option<T>, key: &str, v: &Value, parse: impl Fn(&str, &Value) -> Result<T>) -> Result<()> {
    if slot.is_none() {
        *slot = Some(parse(key, v)?);
    }
    Ok(())
}

impl SystemArgs {
    /// Fill unset fields from the config file; returns keys it did not recognise.
    fn absorb(&mut self, map: &Map<String, Value>) -> Result<Vec<(String, Value)>> {
        let mut rest = Vec::new();
        for (k, v) in map {
            match k.as_str() {
                "kind" => fill(&mut self.kind, k, v, |k, v| text(k, v)?.parse())?,
                "g" => fill(&mut self.g, k, v, number)?,
                "kappa" => fill(&mut self.kappa, k, v, number)?,
                "na" => fill(&mut self.na, k, v, number)?,
                "ma" => fill(&mut self.ma, k, v, number)?,
                "nb" => fill(&mut self.nb, k, v, number)?,
                "mb" => fill(&mut self.mb, k, v, number)?,
                "phi" => fill(&mut self.phi, k, v, number)?,
                "t" => {
                    if !self.steady {
                        fill(&mut self.t, k, v, number)?
                    }
                }
                "steady" => {
                    if self.t.is_none() {
                        self.steady |= v
                            .as_bool()
                            .ok_or_else(|| Error::Config("'steady' must be a boolean".into()))?;
                    }
                }
                _ => rest.push((k.clone(), v.clone())),
            }
        }
        if self.steady && self.t.is_some() {
            return Err(Error::Config("give either t or steady, not both".into()));
        }
        Ok(rest)
    }

    fn load(&mut self) -> Result<Vec<(String, Value)>> {
        match self.config.clone() {
            Some(path) => self.absorb(&read_config(&path)?),
            None => Ok(vec![]),
        }
    }

    fn system(&self) -> Result<SystemConfig> {
        let kind = self.kind.ok_or_else(|| Error::Config("--kind is required".into()))?;
        let g = self.g.ok_or_else(|| Error::Config("--g is required".into()))?;
        let config = SystemConfig::new(
            ModeParams::new(self.na.unwrap_or(0.0), self.ma.unwrap_or(0.0)),
            ModeParams::new(self.nb.unwrap_or(0.0), self.mb.unwrap_or(0.0)),
            self.phi.unwrap_or(0.0),
            CouplingConfig::new(kind, g, self.kappa.unwrap_or(1.0)),
        );
        Ok(validate(&config)?.config)
    }

    fn time(&self) -> Result<Option<f64>> {
        match (self.t, self.steady) {
            (Some(t), false) => Ok(Some(t)),
            (None, true) => Ok(None),
            _ => Err(Error::Config("give exactly one of --t or --steady".into())),
        }
    }
}

fn reject_unknown(rest: Vec<(String, Value)>) -> Result<()> {
    match rest.first() {
        Some((k, _)) => Err(Error::Config(format!("unknown config key '{k}'"))),
        None => Ok(()),
    }
}

/// Everything reported for one path at one point.
#[derive(Debug, Clone, Serialize)]
pub struct PathReport {
    pub moments: MomentSet,
    pub variances: VarianceSet,
    pub degrees: CorrelationDegrees,
    pub verdicts: Verdicts,
}

impl PathReport {
    fn new(moments: MomentSet, variances: VarianceSet) -> Self {
        Self {
            degrees: degrees(&moments),
            verdicts: verdicts(&moments, &variances),
            moments,
            variances,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentsReport {
    pub config: SystemConfig,
    /// `None` for the steady state.
    pub time: Option<f64>,
    pub analytic: PathReport,
    /// Absent for the infinite-coupling limit.
    pub oracle: Option<PathReport>,
    pub max_deviation: Option<f64>,
}

pub fn moments_report(config: &SystemConfig, time: Option<f64>) -> Result<MomentsReport> {
    let values = evaluate(config, time)?;
    let analytic = PathReport::new(values.moments, values.variances);
    let oracle = if config.coupling.g.is_finite() {
        let cov = match time {
            Some(t) => oracle::covariance_at(config, t)?,
            None => oracle::steady_covariance(&oracle::assemble(config)?)?,
        };
        Some(PathReport::new(
            oracle::extract_moments(&cov)?,
            oracle::extract_variances(&cov),
        ))
    } else {
        None
    };
    Ok(MomentsReport {
        config: *config,
        time,
        analytic,
        oracle,
        max_deviation: oracle_deviation(config, time, &values)?,
    })
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".into(), format_number)
}

fn render_moments(r: &MomentsReport) -> String {
    let c = &r.config;
    let mut s = String::new();
    s.push_str(&format!(
        "kind {}  g {}  kappa {}  phi {}\nmode a  n {}  m {}\nmode b  n {}  m {}\ntime {}\n\n",
        c.kind(),
        if c.coupling.g.is_infinite() {
            "inf".into()
        } else {
            format_number(c.coupling.g)
        },
        format_number(c.coupling.kappa),
        format_number(c.phi()),
        format_number(c.mode_a.n),
        format_number(c.mode_a.m),
        format_number(c.mode_b.n),
        format_number(c.mode_b.m),
        r.time.map_or_else(|| "steady".into(), format_number),
    ));
    let rows = |p: &PathReport| -> Vec<(&'static str, String)> {
        let m = &p.moments;
        let v = &p.variances;
        let d = &p.degrees;
        vec![
            ("pop_a", format_number(m.pop_a)),
            ("pop_b", format_number(m.pop_b)),
            ("re c_aa", format_number(m.c_aa.re)),
            ("im c_aa", format_number(m.c_aa.im)),
            ("re c_bb", format_number(m.c_bb.re)),
            ("im c_bb", format_number(m.c_bb.im)),
            ("re c_adagb", format_number(m.c_adagb.re)),
            ("im c_adagb", format_number(m.c_adagb.im)),
            ("re c_ab", format_number(m.c_ab.re)),
            ("im c_ab", format_number(m.c_ab.im)),
            ("xx_a", format_number(v.xx_a)),
            ("yy_a", format_number(v.yy_a)),
            ("xy_a", format_number(v.xy_a)),
            ("xx_b", format_number(v.xx_b)),
            ("yy_b", format_number(v.yy_b)),
            ("xy_b", format_number(v.xy_b)),
            ("eta_aa", opt(d.eta_aa)),
            ("eta_bb", opt(d.eta_bb)),
            ("gamma_ab", opt(d.gamma_ab)),
            ("eta_ab", opt(d.eta_ab)),
            ("visibility", opt(d.visibility)),
            ("squeezing x_a", p.verdicts.squeezing.x_a.to_string()),
            ("squeezing y_a", p.verdicts.squeezing.y_a.to_string()),
            ("squeezing x_b", p.verdicts.squeezing.x_b.to_string()),
            ("squeezing y_b", p.verdicts.squeezing.y_b.to_string()),
            ("entangled eta_ab>1", p.verdicts.entanglement.simple.to_string()),
            (
                "entangled cs (eta_aa)",
                p.verdicts.entanglement.cauchy_schwarz_a.to_string(),
            ),
            (
                "entangled cs (eta_bb)",
                p.verdicts.entanglement.cauchy_schwarz_b.to_string(),
            ),
        ]
    };
    let a = rows(&r.analytic);
    let o = r.oracle.as_ref().map(rows);
    s.push_str(&format!("{:<24}{:<26}{}\n", "quantity", "analytic", "oracle"));
    for (i, (name, value)) in a.iter().enumerate() {
        let other = o.as_ref().map_or("n/a", |o| o[i].1.as_str());
        s.push_str(&format!("{name:<24}{value:<26}{other}\n"));
    }
    s.push_str(&format!(
        "\nmax scaled deviation {}\n",
        r.max_deviation.map_or_else(|| "n/a".into(), format_number)
    ));
    s
}

fn cmd_moments(mut args: MomentsArgs, out: &mut dyn Write) -> Result<i32> {
    let rest = args.system.load()?;
    reject_unknown(rest)?;
    let config = args.system.system()?;
    let time = args.system.time()?;
    let report = moments_report(&config, time)?;
    let body = match args.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report).map_err(|e| Error::Numerical(e.to_string()))?;
            s.push('\n');
            s
        }
        _ => render_moments(&report),
    };
    emit(out, &body)?;
    Ok(EXIT_OK)
}

fn emit(out: &mut dyn Write, body: &str) -> Result<()> {
    out.write_all(body.as_bytes())
        .map_err(|e| Error::Config(format!("write failed: {e}")))
}

/// Default columns of a sweep when `--outputs` is not given.
pub const DEFAULT_OUTPUTS: [Quantity; 11] = [
    Quantity::PopA,
    Quantity::PopB,
    Quantity::AbsCAa,
    Quantity::AbsCBb,
    Quantity::AbsCAdagb,
    Quantity::AbsCAb,
    Quantity::EtaAa,
    Quantity::EtaBb,
    Quantity::GammaAb,
    Quantity::EtaAb,
    Quantity::Visibility,
];

pub fn sweep_plan(args: &mut SweepArgs) -> Result<SweepPlan> {
    let rest = args.system.load()?;
    let mut leftover = Vec::new();
    for (k, v) in rest {
        match k.as_str() {
            "scenario" => fill(&mut args.scenario, &k, &v, |k, v| text(k, v)?.parse())?,
            "n" => fill(&mut args.n, &k, &v, number)?,
            "m" => fill(&mut args.m, &k, &v, |k, v| text(k, v)?.parse())?,
            "psi" => fill(&mut args.psi, &k, &v, number)?,
            "chi" => fill(&mut args.chi, &k, &v, number)?,
            "axis" if args.axes.is_empty() => {
                let list = v
                    .as_array()
                    .ok_or_else(|| Error::Config("'axis' must be a list".into()))?;
                for a in list {
                    args.axes.push(text("axis", a)?.parse()?);
                }
            }
            "outputs" if args.outputs.is_empty() => {
                let list = v
                    .as_array()
                    .ok_or_else(|| Error::Config("'outputs' must be a list".into()))?;
                for q in list {
                    args.outputs.push(text("outputs", q)?.parse()?);
                }
            }
            "axis" | "outputs" => {}
            _ => leftover.push((k, v)),
        }
    }
    reject_unknown(leftover)?;
    let sys = &args.system;
    if sys.steady && args.axes.iter().any(|a| a.param == Param::T) {
        return Err(Error::Config("--steady conflicts with a t axis".into()));
    }
    let scenario = args.scenario.unwrap_or(Scenario::Custom);
    let fixed = [
        (Param::G, sys.g),
        (Param::Psi, args.psi),
        (Param::Chi, args.chi),
        (Param::T, sys.t),
        (Param::Phi, sys.phi),
        (Param::N, args.n),
        (Param::Na, sys.na),
        (Param::Ma, sys.ma),
        (Param::Nb, sys.nb),
        (Param::Mb, sys.mb),
    ]
    .into_iter()
    .filter_map(|(p, v)| v.map(|v| (p, v)))
    .collect();
    if scenario == Scenario::Custom && args.m.is_some() {
        return Err(Error::Config(
            "--m applies to the preset scenarios; use --ma/--mb".into(),
        ));
    }
    let plan = SweepPlan {
        scenario,
        kind: sys.kind.ok_or_else(|| Error::Config("--kind is required".into()))?,
        kappa: sys.kappa.unwrap_or(1.0),
        squeeze: args.m.unwrap_or(Squeeze::Ideal),
        fixed,
        axes: args.axes.clone(),
        outputs: if args.outputs.is_empty() {
            DEFAULT_OUTPUTS.to_vec()
        } else {
            args.outputs.clone()
        },
    };
    plan.validate()?;
    Ok(plan)
}

fn cmd_sweep(mut args: SweepArgs, out: &mut dyn Write) -> Result<i32> {
    let plan = sweep_plan(&mut args)?;
    let table = sweep::run_sweep(&plan)?;
    let body = match args.format {
        Format::Json => table.to_json(),
        Format::Csv => table.to_csv(),
        Format::Text => return Err(Error::Config("sweep writes csv or json".into())),
    };
    match &args.out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        }
        None => emit(out, &body)?,
    }
    Ok(EXIT_OK)
}

fn cmd_figure(args: FigureArgs, out: &mut dyn Write) -> Result<i32> {
    let id: FigureId = args.id.parse()?;
    let (csv, meta) = figure::write(id, &args.out)?;
    emit(out, &format!("wrote {}\nwrote {}\n", csv.display(), meta.display()))?;
    Ok(EXIT_OK)
}

/// Flat config that replays one failing verification case through `--config`.
pub fn replay_config(config: &SystemConfig) -> Value {
    json!({
        "kind": config.kind().to_string(),
        "g": config.coupling.g,
        "kappa": config.coupling.kappa,
        "na": config.mode_a.n,
        "ma": config.mode_a.m,
        "nb": config.mode_b.n,
        "mb": config.mode_b.m,
        "phi": config.phi(),
    })
}

fn render_verify(report: &VerifyReport) -> String {
    let mut s = format!("seed {}  configurations per kind {}\n", report.seed, report.count);
    for r in &report.suites {
        let (_, upper) = r.suite.bound();
        s.push_str(&format!(
            "{:<20}worst {:<24}{} {:<10}samples {:<8}{}\n",
            r.suite.name(),
            format_number(r.worst),
            if upper { "<=" } else { ">=" },
            format_number(r.bound),
            r.samples,
            if r.passed { "ok" } else { "FAIL" }
        ));
    }
    s.push_str(if report.passed() {
        "all suites passed\n"
    } else {
        "verification failed\n"
    });
    s
}

fn cmd_verify(args: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    if args.count == 0 {
        return Err(Error::Config("--count must be at least 1".into()));
    }
    let report = sweep::with_pool(|| verify::run(args.seed, args.count))?;
    let body = match args.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report).map_err(|e| Error::Numerical(e.to_string()))?;
            s.push('\n');
            s
        }
        _ => render_verify(&report),
    };
    emit(out, &body)?;
    for f in &report.failures {
        let line = json!({
            "suite": f.suite.name(),
            "kind": f.kind.to_string(),
            "index": f.index,
            "value": f.value,
            "detail": f.detail,
            "seed": report.seed,
            "config": replay_config(&f.config),
        });
        emit(err, &format!("failure {line}\n"))?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFY })
}

#[derive(Debug, Clone, Serialize)]
struct RelationLine {
    identity: Identity,
    mode: Mode,
    path: &'static str,
    result: IdentityResult,
}

fn cmd_relations(mut args: RelationsArgs, out: &mut dyn Write) -> Result<i32> {
    let rest = args.system.load()?;
    reject_unknown(rest)?;
    let config = args.system.system()?;
    let scheme = if args.richardson {
        Differencing::Richardson
    } else {
        Differencing::Central
    };
    let which = match args.which {
        Some(w) => vec![w],
        None => vec![Identity::OnePhoton, Identity::TwoPhoton],
    };
    let mut lines = Vec::new();
    for w in which {
        lines.push(RelationLine {
            identity: w,
            mode: args.mode,
            path: "analytic",
            result: check_identity(&config, w, args.mode, args.h, scheme)?,
        });
        if args.oracle {
            lines.push(RelationLine {
                identity: w,
                mode: args.mode,
                path: "oracle",
                result: check_identity_oracle(&config, w, args.mode, args.h, scheme)?,
            });
        }
    }
    let body = match args.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&lines).map_err(|e| Error::Numerical(e.to_string()))?;
            s.push('\n');
            s
        }
        _ => {
            let mut s = format!(
                "{:<12}{:<6}{:<10}{:<24}{:<24}{:<24}{}\n",
                "identity", "mode", "path", "lhs", "rhs", "residual", "step"
            );
            for l in &lines {
                s.push_str(&format!(
                    "{:<12}{:<6}{:<10}{:<24}{:<24}{:<24}{}\n",
                    format!("{:?}", l.identity),
                    format!("{:?}", l.mode).to_lowercase(),
                    l.path,
                    format_number(l.result.lhs),
                    format_number(l.result.rhs),
                    format_number(l.result.residual),
                    format_number(l.result.step),
                ));
            }
            s
        }
    };
    emit(out, &body)?;
    Ok(EXIT_OK)
}

/// Parse `args` and run, writing to the given streams; returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Moments(a) => cmd_moments(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Figure(a) => cmd_figure(a, out),
        Command::Verify(a) => cmd_verify(a, out, err),
        Command::Relations(a) => cmd_relations(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
