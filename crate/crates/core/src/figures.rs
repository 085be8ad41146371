//! Preconfigured experiments matching the reference result set: phase-1
//! rate statistics over the placement radius, coherent phase-2 capacity
//! and improvement curves, D-MIMO selection sweeps, and the non-coherent
//! comparison, each addressable by a figure id.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::harness::{run_experiment, CapacityReport, ExperimentSpec, Scheme, SweepVariable};
use crate::real::Real;
use crate::rfenv::{LosMode, PowerMode};
use crate::selection::SelectionMethod;

/// Identifier of a preconfigured experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
        FigureId::Fig8,
        FigureId::Fig9,
    ];
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::Fig8 => "fig8",
            FigureId::Fig9 => "fig9",
        })
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<FigureId> {
        match s {
            "fig3" => Ok(FigureId::Fig3),
            "fig4" => Ok(FigureId::Fig4),
            "fig5" => Ok(FigureId::Fig5),
            "fig6" => Ok(FigureId::Fig6),
            "fig7" => Ok(FigureId::Fig7),
            "fig8" => Ok(FigureId::Fig8),
            "fig9" => Ok(FigureId::Fig9),
            other => Err(Error::UnknownFigure(other.to_string())),
        }
    }
}

/// Command-line style adjustments applied on top of a figure preset.
#[derive(Debug, Clone, Copy, Default)]
pub struct FigureOverrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub power_mode: Option<PowerMode>,
    /// LOS handling of the UE-to-BS links.
    pub los_mode_bs: Option<LosMode>,
}

fn distance_sweep<F: Real>() -> Vec<F> {
    (1..=10).map(|k| F::of(100.0 * k as f64)).collect()
}

fn radius_sweep<F: Real>() -> Vec<F> {
    (1..=20).map(|k| F::of(10.0 * k as f64)).collect()
}

/// The experiments behind one figure, overrides applied. All figures but
/// the last map to a single experiment; the non-coherent comparison runs
/// once per power mode (or once, when an override pins the mode).
pub fn figure_experiments<F: Real>(
    id: FigureId,
    overrides: &FigureOverrides,
) -> Vec<ExperimentSpec<F>> {
    let base = || {
        let mut spec = ExperimentSpec::<F>::default();
        spec.scenario.num_collaborators = 10;
        spec.sweep_variable = SweepVariable::BsDistance;
        spec.sweep_values = distance_sweep();
        spec.trials = 500;
        spec
    };
    let mut specs = match id {
        FigureId::Fig3 => {
            let mut spec = base();
            spec.sweep_variable = SweepVariable::MdaaRadius;
            spec.sweep_values = radius_sweep();
            spec.schemes = vec![Scheme::Phase1Only];
            spec.selection_methods = vec![];
            vec![spec]
        }
        FigureId::Fig4 | FigureId::Fig5 => {
            let mut spec = base();
            spec.scenario.num_collaborators = 9;
            spec.schemes = vec![Scheme::Phase2Cjt];
            spec.selection_methods = vec![];
            spec.phase2_u_series = Some((1..=10).collect());
            if id == FigureId::Fig5 {
                spec.scenario.power_mode = PowerMode::Normalized;
            }
            vec![spec]
        }
        FigureId::Fig6 | FigureId::Fig7 => {
            let mut spec = base();
            spec.schemes = vec![Scheme::DmimoCjt, Scheme::Baseline];
            spec.selection_methods = vec![SelectionMethod::Exhaustive];
            if id == FigureId::Fig7 {
                spec.scenario.power_mode = PowerMode::Normalized;
            }
            vec![spec]
        }
        FigureId::Fig8 => {
            let mut spec = base();
            spec.scenario.mdaa_radius = F::of(200.0);
            spec.schemes = vec![Scheme::DmimoCjt, Scheme::Baseline];
            spec.selection_methods = vec![
                SelectionMethod::Greedy,
                SelectionMethod::All,
                SelectionMethod::Exhaustive,
            ];
            vec![spec]
        }
        FigureId::Fig9 => {
            let mut full = base();
            full.schemes = vec![Scheme::DmimoNcjt, Scheme::Baseline];
            full.selection_methods = vec![SelectionMethod::Exhaustive];
            let mut normalized = full.clone();
            normalized.scenario.power_mode = PowerMode::Normalized;
            if overrides.power_mode.is_some() {
                vec![full]
            } else {
                vec![full, normalized]
            }
        }
    };
    for spec in &mut specs {
        if let Some(seed) = overrides.seed {
            spec.scenario.rng_seed = seed;
        }
        if let Some(trials) = overrides.trials {
            spec.trials = trials;
        }
        if let Some(mode) = overrides.power_mode {
            spec.scenario.power_mode = mode;
        }
        if let Some(los) = overrides.los_mode_bs {
            spec.scenario.los_mode_bs = los;
        }
    }
    specs
}

/// Runs the experiments behind `id` and concatenates their reports in
/// preset order.
pub fn reproduce_figure<F: Real>(
    id: FigureId,
    overrides: &FigureOverrides,
) -> Result<Vec<CapacityReport<F>>> {
    let mut reports = Vec::new();
    for spec in figure_experiments::<F>(id, overrides) {
        reports.extend(run_experiment(&spec)?);
    }
    Ok(reports)
}

/// Default CSV filename for a figure.
pub fn default_figure_filename(id: FigureId) -> String {
    format!("{id}.csv")
}
