//! Preset sweeps that regenerate the data behind each published plot.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::CouplingKind;
use crate::relations::{locate_extrema, ExtremaReport, ExtremumPair};
use crate::sweep::{run_sweep, Axis, Param, Quantity, Scenario, Squeeze, SweepPlan, Table};

/// Grid points per axis for every preset.
pub const FIGURE_POINTS: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig2a,
    Fig3u,
    Fig3,
    Fig5,
    Fig6,
    Fig7,
    Fig8a,
    Fig8b,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::Fig2a,
        FigureId::Fig3u,
        FigureId::Fig3,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
        FigureId::Fig8a,
        FigureId::Fig8b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2a => "fig2a",
            FigureId::Fig3u => "fig3u",
            FigureId::Fig3 => "fig3",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::Fig8a => "fig8a",
            FigureId::Fig8b => "fig8b",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            FigureId::Fig2a => "beamsplitter: populations and single-mode correlations vs psi, squeezed mode a (n=0.5, ideal) and vacuum mode b",
            FigureId::Fig3u => "beamsplitter: eta_aa and eta_bb vs psi and n, equal ideally squeezed modes, phi=pi/2",
            FigureId::Fig3 => "beamsplitter: visibility vs kappa*t and psi, mode b vacuum",
            FigureId::Fig5 => "parametric: squeezed-quadrature variances vs chi and n, equal ideally squeezed modes",
            FigureId::Fig6 => "parametric: first-order coherence gamma_ab vs chi and n, equal ideally squeezed modes",
            FigureId::Fig7 => "parametric: inter-mode two-photon degree eta_ab vs chi and n, equal ideally squeezed modes",
            FigureId::Fig8a => "beamsplitter: populations and |<a^dag b>| vs psi, phi=pi/2, n=0.1, mode b vacuum",
            FigureId::Fig8b => "beamsplitter: eta_aa and eta_ab vs psi, phi=pi/2, n=0.1, thermal mode b, ideal and classical squeezing",
        }
    }
}

impl std::str::FromStr for FigureId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown figure '{s}'")))
    }
}

fn axis(param: Param, min: f64, max: f64) -> Axis {
    Axis {
        param,
        min,
        max,
        count: FIGURE_POINTS,
    }
}

fn plan(
    scenario: Scenario,
    kind: CouplingKind,
    squeeze: Squeeze,
    fixed: &[(Param, f64)],
    axes: Vec<Axis>,
    outputs: Vec<Quantity>,
) -> SweepPlan {
    SweepPlan {
        scenario,
        kind,
        kappa: 1.0,
        squeeze,
        fixed: fixed.iter().copied().collect::<BTreeMap<_, _>>(),
        axes,
        outputs,
    }
}

/// Extremum check attached to a preset series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremaCheck {
    pub pair: ExtremumPair,
}

/// One sweep of a preset; presets with several series join them column-wise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub plan: SweepPlan,
    pub extrema: Option<ExtremaCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigurePreset {
    pub id: FigureId,
    pub series: Vec<Series>,
}

fn single(id: FigureId, plan: SweepPlan, extrema: Option<ExtremumPair>) -> FigurePreset {
    FigurePreset {
        id,
        series: vec![Series {
            label: id.name().into(),
            plan,
            extrema: extrema.map(|pair| ExtremaCheck { pair }),
        }],
    }
}

pub fn preset(id: FigureId) -> FigurePreset {
    use CouplingKind::{Linear, Nonlinear};
    use Quantity::*;
    let psi_full = || axis(Param::Psi, 0.0, FRAC_PI_2);
    let chi_n =
        |chi_max: f64, n_min: f64, n_max: f64| vec![axis(Param::Chi, 0.0, chi_max), axis(Param::N, n_min, n_max)];
    match id {
        FigureId::Fig2a => single(
            id,
            plan(
                Scenario::SqueezedPlusVacuum,
                Linear,
                Squeeze::Ideal,
                &[(Param::N, 0.5), (Param::Phi, 0.0)],
                vec![psi_full()],
                vec![PopA, PopB, AbsCAa, AbsCBb],
            ),
            None,
        ),
        FigureId::Fig3u => single(
            id,
            plan(
                Scenario::EqualSqueezed,
                Linear,
                Squeeze::Ideal,
                &[(Param::Phi, FRAC_PI_2)],
                vec![psi_full(), axis(Param::N, 0.01, 2.0)],
                vec![EtaAa, EtaBb],
            ),
            None,
        ),
        FigureId::Fig3 => single(
            id,
            plan(
                Scenario::SqueezedPlusVacuum,
                Linear,
                Squeeze::Ideal,
                &[(Param::N, 0.5), (Param::Phi, 0.0)],
                vec![axis(Param::T, 0.0, 3.0), axis(Param::Psi, 0.0, 0.49 * PI)],
                vec![Visibility],
            ),
            None,
        ),
        FigureId::Fig5 => single(
            id,
            plan(
                Scenario::EqualSqueezed,
                Nonlinear,
                Squeeze::Ideal,
                &[(Param::Phi, 0.0)],
                chi_n(3.0, 0.0, 2.0),
                vec![YyA, YyB],
            ),
            None,
        ),
        FigureId::Fig6 => single(
            id,
            plan(
                Scenario::EqualSqueezed,
                Nonlinear,
                Squeeze::Ideal,
                &[(Param::Phi, 0.0)],
                chi_n(5.0, 0.01, 5.0),
                vec![GammaAb],
            ),
            None,
        ),
        FigureId::Fig7 => single(
            id,
            plan(
                Scenario::EqualSqueezed,
                Nonlinear,
                Squeeze::Ideal,
                &[(Param::Phi, 0.0)],
                chi_n(5.0, 0.01, 5.0),
                vec![EtaAb],
            ),
            None,
        ),
        FigureId::Fig8a => single(
            id,
            plan(
                Scenario::SqueezedPlusVacuum,
                Linear,
                Squeeze::Ideal,
                &[(Param::N, 0.1), (Param::Phi, FRAC_PI_2)],
                vec![psi_full()],
                vec![PopA, PopB, AbsCAdagb],
            ),
            Some(ExtremumPair::FirstOrderVsPopulation),
        ),
        FigureId::Fig8b => FigurePreset {
            id,
            series: [("ideal", Squeeze::Ideal), ("classical", Squeeze::Classical)]
                .into_iter()
                .map(|(label, squeeze)| Series {
                    label: label.into(),
                    plan: plan(
                        Scenario::SqueezedPlusThermal,
                        Linear,
                        squeeze,
                        &[(Param::N, 0.1), (Param::Phi, FRAC_PI_2)],
                        vec![psi_full()],
                        vec![EtaAa, EtaBb, EtaAb],
                    ),
                    extrema: Some(ExtremaCheck {
                        pair: ExtremumPair::PairDegreeVsSingleDegree,
                    }),
                })
                .collect(),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesExtrema {
    pub series: String,
    pub report: ExtremaReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureMeta {
    pub id: FigureId,
    pub description: String,
    pub points_per_axis: usize,
    pub series: Vec<Series>,
    pub columns: Vec<String>,
    pub extrema: Vec<SeriesExtrema>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub table: Table,
    pub meta: FigureMeta,
}

pub fn build(id: FigureId) -> Result<FigureData> {
    let preset = preset(id);
    let mut tables = Vec::new();
    let mut extrema = Vec::new();
    for s in &preset.series {
        let table = run_sweep(&s.plan)?;
        if let Some(check) = s.extrema {
            let grid = s.plan.axes[0].values();
            let (config, _) = s.plan.configure(&[grid[0]])?;
            extrema.push(SeriesExtrema {
                series: s.label.clone(),
                report: locate_extrema(&config, check.pair, &grid)?,
            });
        }
        tables.push((s.label.clone(), table));
    }
    let table = if tables.len() == 1 {
        tables.pop().expect("one table").1
    } else {
        Table::merge(&tables, preset.series[0].plan.axes.len())?
    };
    let meta = FigureMeta {
        id,
        description: id.description().into(),
        points_per_axis: FIGURE_POINTS,
        series: preset.series,
        columns: table.columns.clone(),
        extrema,
    };
    Ok(FigureData { table, meta })
}

/// Write `<id>.csv` and `<id>.meta.json` into `dir`, returning both paths.
pub fn write(id: FigureId, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let data = build(id)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    let csv = dir.join(format!("{}.csv", id.name()));
    let meta = dir.join(format!("{}.meta.json", id.name()));
    let io = |p: &Path, e: std::io::Error| Error::Config(format!("cannot write {}: {e}", p.display()));
    std::fs::write(&csv, data.table.to_csv()).map_err(|e| io(&csv, e))?;
    let mut json = serde_json::to_string_pretty(&data.meta).map_err(|e| Error::Numerical(e.to_string()))?;
    json.push('\n');
    std::fs::write(&meta, json).map_err(|e| io(&meta, e))?;
    Ok((csv, meta))
}
