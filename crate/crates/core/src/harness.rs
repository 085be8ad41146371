//! Monte Carlo experiment driver: sweep definitions, per-trial channel and
//! placement draws, scheme evaluation, aggregation across trials, and CSV
//! emission.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write as _};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::phase::{
    baseline_rate, phase1_maxmin_precoder, phase1_rate_identity, JointEvaluator, MaxMinConfig,
    MaxMinSolution, Phase1Report, Phase2Scheme,
};
use crate::real::Real;
use crate::rfenv::{
    link_budget, los_probability, place_mdaa, shadow_sigma_db, LinkBudget, LinkKind, LosMode,
    ScenarioConfig,
};
use crate::selection::{
    exhaustive_select, greedy_select, select_all, GreedyObjective, SelectionMethod,
};

/// Which scenario field a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Serving-UE-to-BS distance, m.
    BsDistance,
    /// Total transmitting UEs `U` (the serving UE plus `U - 1`
    /// collaborators).
    NumUes,
    /// Collaborator placement radius, m.
    MdaaRadius,
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVariable::BsDistance => "bs_distance",
            SweepVariable::NumUes => "num_ues",
            SweepVariable::MdaaRadius => "mdaa_radius",
        })
    }
}

/// Transmission schemes an experiment can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Multicast-stage rate statistics (min/median/max under the identity
    /// precoder, plus the max-min precoder's min-rate).
    #[serde(rename = "phase1_only")]
    Phase1Only,
    /// Coherent joint transmission of the full M-DAA.
    #[serde(rename = "phase2_cjt")]
    Phase2Cjt,
    /// Non-coherent joint transmission of the full M-DAA.
    #[serde(rename = "phase2_ncjt")]
    Phase2Ncjt,
    /// Two-phase throughput with collaborator selection, coherent phase 2.
    #[serde(rename = "dmimo_cjt")]
    DmimoCjt,
    /// Two-phase throughput with collaborator selection, non-coherent
    /// phase 2.
    #[serde(rename = "dmimo_ncjt")]
    DmimoNcjt,
    /// Direct serving-UE-to-BS transmission.
    #[serde(rename = "baseline")]
    Baseline,
}

/// A full experiment: scenario, sweep, trial count, and what to report.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, bound(
    serialize = "F: Serialize",
    deserialize = "F: Deserialize<'de>"
))]
pub struct ExperimentSpec<F: Real> {
    pub scenario: ScenarioConfig<F>,
    pub sweep_variable: SweepVariable,
    /// Values the sweep variable takes, strictly ascending.
    pub sweep_values: Vec<F>,
    /// Monte Carlo trials per sweep point.
    pub trials: usize,
    pub schemes: Vec<Scheme>,
    /// Search methods for the D-MIMO schemes, one series each.
    pub selection_methods: Vec<SelectionMethod>,
    /// Extra coherent phase-2 series, one per M-DAA size `U`: the first
    /// `U - 1` collaborators transmit with the serving UE, nested across
    /// `U` so the curves share every draw.
    pub phase2_u_series: Option<Vec<usize>>,
    /// Objective driving the greedy search.
    pub greedy_objective: GreedyObjective,
}

impl<F: Real> Default for ExperimentSpec<F> {
    fn default() -> Self {
        ExperimentSpec {
            scenario: ScenarioConfig::default(),
            sweep_variable: SweepVariable::BsDistance,
            sweep_values: (1..=10).map(|k| F::of(100.0 * k as f64)).collect(),
            trials: 500,
            schemes: vec![Scheme::DmimoCjt, Scheme::Baseline],
            selection_methods: vec![SelectionMethod::Exhaustive],
            phase2_u_series: None,
            greedy_objective: GreedyObjective::HarmonicBits,
        }
    }
}

impl<F: Real> ExperimentSpec<F> {
    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.sweep_values.is_empty() {
            return Err(Error::InvalidConfig("sweep_values must not be empty".into()));
        }
        for w in self.sweep_values.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidConfig(format!(
                    "sweep_values must be strictly ascending, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for &v in &self.sweep_values {
            if !v.is_finite() {
                return Err(Error::InvalidConfig("sweep_values must be finite".into()));
            }
            match self.sweep_variable {
                SweepVariable::BsDistance => {
                    if v <= F::zero() {
                        return Err(Error::InvalidConfig(format!(
                            "bs_distance sweep value must be positive, got {v}"
                        )));
                    }
                }
                SweepVariable::MdaaRadius => {
                    if v < F::zero() {
                        return Err(Error::InvalidConfig(format!(
                            "mdaa_radius sweep value must be non-negative, got {v}"
                        )));
                    }
                }
                SweepVariable::NumUes => {
                    if v.fract() != F::zero() || v < F::one() {
                        return Err(Error::InvalidConfig(format!(
                            "num_ues sweep value must be a whole number of at least 1, got {v}"
                        )));
                    }
                }
            }
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidConfig("schemes must not be empty".into()));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(Error::InvalidConfig(format!("scheme {s:?} listed twice")));
            }
        }
        for (i, m) in self.selection_methods.iter().enumerate() {
            if self.selection_methods[..i].contains(m) {
                return Err(Error::InvalidConfig(format!("method {m:?} listed twice")));
            }
        }
        let wants_dmimo = self
            .schemes
            .iter()
            .any(|s| matches!(s, Scheme::DmimoCjt | Scheme::DmimoNcjt));
        if wants_dmimo && self.selection_methods.is_empty() {
            return Err(Error::InvalidConfig(
                "D-MIMO schemes need at least one selection method".into(),
            ));
        }
        if self.schemes.contains(&Scheme::Phase1Only) {
            let min_collaborators = match self.sweep_variable {
                SweepVariable::NumUes => {
                    self.sweep_values[0].to_usize().unwrap_or(1).saturating_sub(1)
                }
                _ => self.scenario.num_collaborators,
            };
            if min_collaborators == 0 {
                return Err(Error::InvalidConfig(
                    "phase1_only needs at least one collaborator at every sweep point".into(),
                ));
            }
        }
        if let Some(series) = &self.phase2_u_series {
            if series.is_empty() {
                return Err(Error::InvalidConfig("phase2_u_series must not be empty".into()));
            }
            if self.sweep_variable == SweepVariable::NumUes {
                return Err(Error::InvalidConfig(
                    "phase2_u_series cannot combine with a num_ues sweep".into(),
                ));
            }
            for w in series.windows(2) {
                if w[1] <= w[0] {
                    return Err(Error::InvalidConfig(
                        "phase2_u_series must be strictly ascending".into(),
                    ));
                }
            }
            let max_u = self.scenario.num_collaborators + 1;
            if series[0] < 1 || *series.last().unwrap() > max_u {
                return Err(Error::InvalidConfig(format!(
                    "phase2_u_series entries must lie in 1..={max_u}"
                )));
            }
        }
        Ok(())
    }

    /// The scenario with the sweep variable set to `value`.
    fn scenario_at(&self, value: F) -> ScenarioConfig<F> {
        let mut cfg = self.scenario.clone();
        match self.sweep_variable {
            SweepVariable::BsDistance => cfg.bs_distance = value,
            SweepVariable::MdaaRadius => cfg.mdaa_radius = value,
            SweepVariable::NumUes => {
                cfg.num_collaborators = value.to_usize().expect("validated integer") - 1;
            }
        }
        cfg
    }
}

/// Aggregated result for one (sweep value, series) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityReport<F: Real> {
    pub sweep_variable: SweepVariable,
    pub sweep_value: F,
    /// Series label, e.g. `baseline`, `phase1_min`, `phase2_cjt_u4`,
    /// `dmimo_cjt_exhaustive`.
    pub scheme: String,
    pub power_mode: crate::rfenv::PowerMode,
    /// Mean spectral rate, bits/s/Hz (delivered bits over the phase-2
    /// bandwidth for the two-phase schemes).
    pub mean_rate: F,
    /// Mean bits delivered per one-second frame.
    pub mean_bits: F,
    /// Ratio of mean bits to mean baseline bits at this sweep value.
    pub relative_improvement: F,
    /// Mean number of collaborators transmitting in phase 2.
    pub mean_selected_ues: F,
    pub trials: usize,
    /// 95% normal-approximation half-width of the mean bits, bits/s.
    pub ci95_halfwidth: F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SeriesKind {
    Baseline,
    Phase1Min,
    Phase1Median,
    Phase1Max,
    Phase1MaxMin,
    /// Coherent phase 2 with the first `u - 1` collaborators, or the whole
    /// pool when `u` is None.
    Phase2Cjt(Option<usize>),
    Phase2Ncjt,
    Dmimo(Phase2Scheme, SelectionMethod),
}

#[derive(Debug, Clone)]
struct SeriesDef {
    label: String,
    kind: SeriesKind,
}

fn series_list<F: Real>(spec: &ExperimentSpec<F>) -> Vec<SeriesDef> {
    let mut out = Vec::new();
    let method_suffix = |m: &SelectionMethod| match m {
        SelectionMethod::All => "all",
        SelectionMethod::Exhaustive => "exhaustive",
        SelectionMethod::Greedy => "greedy",
    };
    for scheme in &spec.schemes {
        match scheme {
            Scheme::Baseline => out.push(SeriesDef {
                label: "baseline".into(),
                kind: SeriesKind::Baseline,
            }),
            Scheme::Phase1Only => {
                for (label, kind) in [
                    ("phase1_min", SeriesKind::Phase1Min),
                    ("phase1_median", SeriesKind::Phase1Median),
                    ("phase1_max", SeriesKind::Phase1Max),
                    ("phase1_maxmin", SeriesKind::Phase1MaxMin),
                ] {
                    out.push(SeriesDef {
                        label: label.into(),
                        kind,
                    });
                }
            }
            Scheme::Phase2Cjt => match &spec.phase2_u_series {
                Some(series) => {
                    for &u in series {
                        out.push(SeriesDef {
                            label: format!("phase2_cjt_u{u}"),
                            kind: SeriesKind::Phase2Cjt(Some(u)),
                        });
                    }
                }
                None => out.push(SeriesDef {
                    label: "phase2_cjt".into(),
                    kind: SeriesKind::Phase2Cjt(None),
                }),
            },
            Scheme::Phase2Ncjt => out.push(SeriesDef {
                label: "phase2_ncjt".into(),
                kind: SeriesKind::Phase2Ncjt,
            }),
            Scheme::DmimoCjt => {
                for m in &spec.selection_methods {
                    out.push(SeriesDef {
                        label: format!("dmimo_cjt_{}", method_suffix(m)),
                        kind: SeriesKind::Dmimo(Phase2Scheme::Cjt, *m),
                    });
                }
            }
            Scheme::DmimoNcjt => {
                for m in &spec.selection_methods {
                    out.push(SeriesDef {
                        label: format!("dmimo_ncjt_{}", method_suffix(m)),
                        kind: SeriesKind::Dmimo(Phase2Scheme::Ncjt, *m),
                    });
                }
            }
        }
    }
    out
}

/// Independent random stream for one trial, derived from the master seed
/// and the (sweep point, trial) indices so trials can run in any order.
pub fn trial_rng(master_seed: u64, sweep_index: usize, trial_index: usize) -> ChaCha8Rng {
    const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    let mut s = mix(master_seed ^ GOLDEN);
    s = mix(s.wrapping_add(GOLDEN.wrapping_mul(sweep_index as u64 + 1)));
    s = mix(s.wrapping_add(GOLDEN.wrapping_mul(trial_index as u64 + 1)));
    ChaCha8Rng::seed_from_u64(s)
}

/// All link draws of one trial. The draw order is fixed: placement first,
/// then per collaborator the phase-1 link (LOS, shadowing, fading), then
/// the serving UE's BS link, then per collaborator the BS link.
struct TrialLinks<F: Real> {
    phase1_budgets: Vec<LinkBudget<F>>,
    phase1_channels: Vec<CMatrix<F>>,
    serving_budget: LinkBudget<F>,
    serving_channel: CMatrix<F>,
    collab_budgets: Vec<LinkBudget<F>>,
    collab_channels: Vec<CMatrix<F>>,
}

fn resolve_los<F: Real>(mode: LosMode, distance_2d: F, rng: &mut ChaCha8Rng) -> bool {
    match mode {
        LosMode::Los => true,
        LosMode::Nlos => false,
        LosMode::Probabilistic => F::uniform_unit(rng) < los_probability(distance_2d),
    }
}

fn shadow_db<F: Real>(enabled: bool, los: bool, rng: &mut ChaCha8Rng) -> F {
    if enabled {
        F::standard_normal(rng) * shadow_sigma_db(los)
    } else {
        F::zero()
    }
}

fn draw_trial_links<F: Real>(
    cfg: &ScenarioConfig<F>,
    rng: &mut ChaCha8Rng,
) -> Result<TrialLinks<F>> {
    let placement = place_mdaa(cfg, rng);
    let n = cfg.num_collaborators;
    let n_t = cfg.ue_tx_antennas;

    let mut phase1_budgets = Vec::with_capacity(n);
    let mut phase1_channels = Vec::with_capacity(n);
    for i in 0..n {
        let d = placement.phase1_distance(i);
        let los = resolve_los(cfg.los_mode_ue, d, rng);
        let extra = shadow_db(cfg.shadow_fading, los, rng);
        let budget = link_budget(
            cfg.phase1_tx_power,
            d,
            cfg.bandwidth_phase1,
            cfg.noise_figure_ue,
            cfg,
            LinkKind::UeToUe,
            los,
        )?
        .with_extra_loss_db(extra, n_t);
        phase1_budgets.push(budget);
        phase1_channels.push(crate::channel::rayleigh_channel(
            cfg.ue_rx_antennas,
            n_t,
            rng,
        ));
    }

    let bs_link = |pos: &crate::rfenv::Point2<F>,
                       rng: &mut ChaCha8Rng|
     -> Result<(LinkBudget<F>, CMatrix<F>)> {
        let d2 = pos.distance(&placement.bs_position);
        let d3 = placement.bs_distance_3d(pos, cfg);
        let los = resolve_los(cfg.los_mode_bs, d2, rng);
        let extra = shadow_db(cfg.shadow_fading, los, rng);
        let budget = link_budget(
            cfg.phase2_tx_power_per_ue,
            d3,
            cfg.bandwidth_phase2,
            cfg.noise_figure_bs,
            cfg,
            LinkKind::UeToBs,
            los,
        )?
        .with_extra_loss_db(extra, n_t);
        let channel = crate::channel::rayleigh_channel(cfg.bs_rx_antennas, n_t, rng);
        Ok((budget, channel))
    };

    let (serving_budget, serving_channel) = bs_link(&placement.serving_ue_position, rng)?;
    let mut collab_budgets = Vec::with_capacity(n);
    let mut collab_channels = Vec::with_capacity(n);
    for i in 0..n {
        let (b, h) = bs_link(&placement.collaborator_positions[i], rng)?;
        collab_budgets.push(b);
        collab_channels.push(h);
    }

    Ok(TrialLinks {
        phase1_budgets,
        phase1_channels,
        serving_budget,
        serving_channel,
        collab_budgets,
        collab_channels,
    })
}

#[derive(Debug, Clone, Copy)]
struct SeriesSample<F: Real> {
    rate: F,
    bits: F,
    selected: F,
}

struct TrialOutput<F: Real> {
    samples: Vec<SeriesSample<F>>,
    baseline_bits: F,
}

fn run_trial<F: Real>(
    cfg: &ScenarioConfig<F>,
    series: &[SeriesDef],
    greedy_objective: GreedyObjective,
    rng: &mut ChaCha8Rng,
) -> Result<TrialOutput<F>> {
    let links = draw_trial_links(cfg, rng)?;
    let n = cfg.num_collaborators;
    let b1 = cfg.bandwidth_phase1;
    let b2 = cfg.bandwidth_phase2;

    let baseline = baseline_rate(&links.serving_budget, &links.serving_channel)?;
    let baseline_bits = b2 * baseline;

    let mut identity: Option<Phase1Report<F>> = None;
    let mut maxmin: Option<MaxMinSolution<F>> = None;
    let mut cjt: Option<JointEvaluator<F>> = None;
    let mut ncjt: Option<JointEvaluator<F>> = None;

    let mut samples = Vec::with_capacity(series.len());
    for def in series {
        let needs_identity = matches!(
            def.kind,
            SeriesKind::Phase1Min
                | SeriesKind::Phase1Median
                | SeriesKind::Phase1Max
                | SeriesKind::Dmimo(..)
        );
        if needs_identity && identity.is_none() && n > 0 {
            identity = Some(phase1_rate_identity(
                &links.phase1_budgets,
                &links.phase1_channels,
            )?);
        }
        if matches!(def.kind, SeriesKind::Phase1MaxMin) && maxmin.is_none() {
            maxmin = Some(phase1_maxmin_precoder(
                &links.phase1_budgets,
                &links.phase1_channels,
                &MaxMinConfig::default(),
            )?);
        }
        let needs_cjt = matches!(
            def.kind,
            SeriesKind::Phase2Cjt(_) | SeriesKind::Dmimo(Phase2Scheme::Cjt, _)
        );
        if needs_cjt && cjt.is_none() {
            cjt = Some(JointEvaluator::new(
                Phase2Scheme::Cjt,
                cfg.power_mode,
                &links.serving_budget,
                &links.serving_channel,
                &links.collab_budgets,
                &links.collab_channels,
            )?);
        }
        let needs_ncjt = matches!(
            def.kind,
            SeriesKind::Phase2Ncjt | SeriesKind::Dmimo(Phase2Scheme::Ncjt, _)
        );
        if needs_ncjt && ncjt.is_none() {
            ncjt = Some(JointEvaluator::new(
                Phase2Scheme::Ncjt,
                cfg.power_mode,
                &links.serving_budget,
                &links.serving_channel,
                &links.collab_budgets,
                &links.collab_channels,
            )?);
        }

        let sample = match def.kind {
            SeriesKind::Baseline => SeriesSample {
                rate: baseline,
                bits: baseline_bits,
                selected: F::zero(),
            },
            SeriesKind::Phase1Min | SeriesKind::Phase1Median | SeriesKind::Phase1Max => {
                let report = identity.as_ref().expect("validated: collaborators exist");
                let rate = match def.kind {
                    SeriesKind::Phase1Min => report.min_rate,
                    SeriesKind::Phase1Median => report.median_rate,
                    _ => report.max_rate,
                };
                SeriesSample {
                    rate,
                    bits: b1 * rate,
                    selected: F::of(n as f64),
                }
            }
            SeriesKind::Phase1MaxMin => {
                let rate = maxmin.as_ref().unwrap().report.min_rate;
                SeriesSample {
                    rate,
                    bits: b1 * rate,
                    selected: F::of(n as f64),
                }
            }
            SeriesKind::Phase2Cjt(u) => {
                let eval = cjt.as_ref().unwrap();
                let members = u.map(|u| u - 1).unwrap_or(n);
                let subset: Vec<usize> = (0..members).collect();
                let rate = eval.rate(&subset)?;
                SeriesSample {
                    rate,
                    bits: b2 * rate,
                    selected: F::of(members as f64),
                }
            }
            SeriesKind::Phase2Ncjt => {
                let rate = ncjt.as_ref().unwrap().rate_all()?;
                SeriesSample {
                    rate,
                    bits: b2 * rate,
                    selected: F::of(n as f64),
                }
            }
            SeriesKind::Dmimo(scheme, method) => {
                let eval = match scheme {
                    Phase2Scheme::Cjt => cjt.as_ref().unwrap(),
                    Phase2Scheme::Ncjt => ncjt.as_ref().unwrap(),
                };
                let rates = identity
                    .as_ref()
                    .map(|r| r.per_ue_rates.clone())
                    .unwrap_or_default();
                let eval_fn = |s: &[usize]| eval.rate(s);
                let result = match method {
                    SelectionMethod::All => select_all(&rates, &eval_fn, b1, b2)?,
                    SelectionMethod::Exhaustive => exhaustive_select(&rates, &eval_fn, b1, b2)?,
                    SelectionMethod::Greedy => {
                        greedy_select(&rates, &eval_fn, b1, b2, greedy_objective)?
                    }
                };
                SeriesSample {
                    rate: result.objective / b2,
                    bits: result.objective,
                    selected: F::of(result.chosen_set.len() as f64),
                }
            }
        };
        samples.push(sample);
    }

    Ok(TrialOutput {
        samples,
        baseline_bits,
    })
}

/// Sums in a fixed pairwise order, independent of how trials were
/// scheduled, so parallel and sequential runs aggregate identically.
fn pairwise_sum<F: Real>(values: &[F]) -> F {
    if values.len() <= 8 {
        return values.iter().copied().fold(F::zero(), |a, b| a + b);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

fn mean<F: Real>(values: &[F]) -> F {
    pairwise_sum(values) / F::of(values.len() as f64)
}

fn ci95_halfwidth<F: Real>(values: &[F], mean: F) -> F {
    let n = values.len();
    if n < 2 {
        return F::zero();
    }
    let sq: Vec<F> = values.iter().map(|&v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / F::of((n - 1) as f64);
    F::of(1.96) * var.sqrt() / F::of(n as f64).sqrt()
}

/// Runs the Monte Carlo sweep: for every sweep value, `trials` independent
/// placements and fading draws, every requested series evaluated on the
/// same draws, means aggregated in trial order. Improvement ratios are
/// ratios of mean bits against the mean baseline bits at the same sweep
/// value (the baseline is computed in every trial whether or not its
/// series was requested).
pub fn run_experiment<F: Real>(spec: &ExperimentSpec<F>) -> Result<Vec<CapacityReport<F>>> {
    spec.validate()?;
    let series = series_list(spec);
    let mut reports = Vec::with_capacity(spec.sweep_values.len() * series.len());
    for (sweep_index, &value) in spec.sweep_values.iter().enumerate() {
        let cfg = spec.scenario_at(value);
        let outputs: Vec<TrialOutput<F>> = (0..spec.trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(cfg.rng_seed, sweep_index, trial);
                run_trial(&cfg, &series, spec.greedy_objective, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;

        let baseline_bits: Vec<F> = outputs.iter().map(|o| o.baseline_bits).collect();
        let mean_baseline = mean(&baseline_bits);
        for (s, def) in series.iter().enumerate() {
            let bits: Vec<F> = outputs.iter().map(|o| o.samples[s].bits).collect();
            let rates: Vec<F> = outputs.iter().map(|o| o.samples[s].rate).collect();
            let selected: Vec<F> = outputs.iter().map(|o| o.samples[s].selected).collect();
            let mean_bits = mean(&bits);
            let relative_improvement = if mean_baseline > F::zero() {
                mean_bits / mean_baseline
            } else if mean_bits > F::zero() {
                F::infinity()
            } else {
                F::one()
            };
            reports.push(CapacityReport {
                sweep_variable: spec.sweep_variable,
                sweep_value: value,
                scheme: def.label.clone(),
                power_mode: cfg.power_mode,
                mean_rate: mean(&rates),
                mean_bits,
                relative_improvement,
                mean_selected_ues: mean(&selected),
                trials: spec.trials,
                ci95_halfwidth: ci95_halfwidth(&bits, mean_bits),
            });
        }
    }
    Ok(reports)
}

/// Writes reports as CSV: one header row, then one row per report in the
/// given order, numbers in Rust's shortest round-trip decimal form.
pub fn emit_csv<F: Real>(reports: &[CapacityReport<F>], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut out = BufWriter::new(file);
    writeln!(
        out,
        "sweep_variable,sweep_value,scheme,power_mode,mean_rate_bps_hz,mean_bits_per_s,\
         relative_improvement,mean_selected_ues,trials,ci95_halfwidth"
    )
    .map_err(io_err)?;
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.sweep_variable,
            r.sweep_value,
            r.scheme,
            r.power_mode,
            r.mean_rate,
            r.mean_bits,
            r.relative_improvement,
            r.mean_selected_ues,
            r.trials,
            r.ci95_halfwidth
        )
        .map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}
