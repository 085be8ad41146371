//! Per-phase rate expressions: phase-1 multicast with its min-rate capacity
//! and max-min precoder, and phase-2 joint transmission to the BS in both
//! coherent (stacked channel, SVD + water-filling) and non-coherent
//! (two-cluster summed channel) forms.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{adjoint, hermitian_eigen, CMatrix};
use crate::real::Real;
use crate::rfenv::{LinkBudget, PowerMode};
use crate::waterfill::{water_fill, PowerAllocation};

/// Which phase-1 precoder produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecoderKind {
    Identity,
    MaxMin,
}

/// Phase-2 transmission scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase2Scheme {
    Cjt,
    Ncjt,
}

/// Phase-1 multicast rates across the collaborators.
#[derive(Debug, Clone)]
pub struct Phase1Report<F: Real> {
    /// Rate of each collaborator, bits/s/Hz, in input order.
    pub per_ue_rates: Vec<F>,
    /// The multicast rate: the slowest collaborator sets it.
    pub min_rate: F,
    pub median_rate: F,
    pub max_rate: F,
    pub precoder_kind: PrecoderKind,
}

/// Phase-2 rate and the details behind it.
#[derive(Debug, Clone)]
pub struct Phase2Report<F: Real> {
    pub scheme: Phase2Scheme,
    /// Joint-transmission rate, bits/s/Hz.
    pub rate: F,
    /// Stream count of the scheme: `min(U * N_t, N_r)` coherent, `2 * N_t`
    /// non-coherent.
    pub num_streams: usize,
    /// Water-filling allocation (coherent only).
    pub power_allocation: Option<PowerAllocation<F>>,
    /// Cluster sizes (non-coherent only).
    pub cluster_split: Option<(usize, usize)>,
}

/// Transmit precoder with its Frobenius-norm-squared power budget.
#[derive(Debug, Clone)]
pub struct Precoder<F: Real> {
    pub entries: CMatrix<F>,
    pub power_budget: F,
}

impl<F: Real> Precoder<F> {
    /// Squared Frobenius norm of the precoder.
    pub fn power(&self) -> F {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// True when the power constraint holds (with a small float margin).
    pub fn within_budget(&self) -> bool {
        self.power() <= self.power_budget + F::of(1e-9)
    }
}

fn check_links<F: Real>(
    budgets: &[LinkBudget<F>],
    channels: &[CMatrix<F>],
) -> Result<(usize, usize)> {
    if budgets.is_empty() || channels.is_empty() {
        return Err(Error::InvalidInput("no links given".into()));
    }
    if budgets.len() != channels.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} budgets vs {} channels",
            budgets.len(),
            channels.len()
        )));
    }
    let shape = channels[0].dim();
    for ch in channels {
        if ch.dim() != shape {
            return Err(Error::ShapeMismatch(format!(
                "mixed channel shapes {:?} and {:?}",
                shape,
                ch.dim()
            )));
        }
    }
    Ok(shape)
}

fn rate_stats<F: Real>(rates: &[F]) -> (F, F, F) {
    let mut sorted = rates.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / F::of(2.0)
    };
    (sorted[0], median, sorted[n - 1])
}

/// `log2 |I + M|` for a Hermitian positive semidefinite `M`.
fn logdet_one_plus_psd<F: Real>(m: &CMatrix<F>) -> Result<F> {
    let eig = hermitian_eigen(m)?;
    Ok(eig
        .values
        .iter()
        .fold(F::zero(), |acc, &l| acc + (F::one() + l.max(F::zero())).log2()))
}

/// Rate of one collaborator for a given phase-1 precoder:
/// `log2 |I + s * H F F^H H^H|` with `s` the link's SNR scale.
fn collaborator_rate<F: Real>(snr_scale: F, channel: &CMatrix<F>, precoder: &CMatrix<F>) -> Result<F> {
    let hf = channel.dot(precoder);
    let m = hf.dot(&adjoint(&hf)).mapv(|z| z.scale(snr_scale));
    logdet_one_plus_psd(&m)
}

/// Phase-1 multicast rates with the identity precoder (no CSI at the
/// serving UE). The multicast rate is the minimum over collaborators.
pub fn phase1_rate_identity<F: Real>(
    budgets: &[LinkBudget<F>],
    channels: &[CMatrix<F>],
) -> Result<Phase1Report<F>> {
    let (_, n_t) = check_links(budgets, channels)?;
    let eye = CMatrix::<F>::eye(n_t);
    let rates: Vec<F> = budgets
        .iter()
        .zip(channels)
        .map(|(b, h)| collaborator_rate(b.snr_scale, h, &eye))
        .collect::<Result<_>>()?;
    let (min_rate, median_rate, max_rate) = rate_stats(&rates);
    Ok(Phase1Report {
        per_ue_rates: rates,
        min_rate,
        median_rate,
        max_rate,
        precoder_kind: PrecoderKind::Identity,
    })
}

/// Settings for the max-min precoder search.
#[derive(Debug, Clone)]
pub struct MaxMinConfig<F: Real> {
    /// Iteration cap.
    pub max_iterations: usize,
    /// Step-size scale `c` in the diminishing schedule `c / sqrt(k)`.
    pub step_scale: F,
    /// Improvement below this over a full window counts as converged.
    pub stall_tolerance: F,
    /// Window length (iterations) for the stall check.
    pub stall_window: usize,
}

impl<F: Real> Default for MaxMinConfig<F> {
    fn default() -> Self {
        MaxMinConfig {
            max_iterations: 500,
            step_scale: F::of(0.5),
            stall_tolerance: F::of(1e-6),
            stall_window: 50,
        }
    }
}

/// Outcome of the max-min precoder search.
#[derive(Debug, Clone)]
pub struct MaxMinSolution<F: Real> {
    pub precoder: Precoder<F>,
    pub report: Phase1Report<F>,
    /// False when the iteration cap was hit while still improving.
    pub converged: bool,
    pub iterations: usize,
    /// Best objective value after each iteration; non-decreasing.
    pub objective_trace: Vec<F>,
}

/// Finds the common precoder maximizing the minimum collaborator rate
/// under the power budget `||F||_F^2 <= N_t`.
///
/// The search runs over the transmit covariance `Q = F F^H` (each rate is
/// concave in `Q`, so the minimum is concave) by projected subgradient
/// ascent: step along the gradient of the currently slowest collaborator's
/// rate, then project back onto the PSD set with the trace cap. Starting
/// from `Q = I` and keeping the best iterate guarantees the result is
/// never worse than the identity precoder.
pub fn phase1_maxmin_precoder<F: Real>(
    budgets: &[LinkBudget<F>],
    channels: &[CMatrix<F>],
    cfg: &MaxMinConfig<F>,
) -> Result<MaxMinSolution<F>> {
    let (_, n_t) = check_links(budgets, channels)?;
    let trace_cap = F::of(n_t as f64);
    let ln2 = F::LN_2();

    let min_rate_of = |q: &CMatrix<F>| -> Result<(F, usize)> {
        let mut min = F::infinity();
        let mut argmin = 0;
        for (i, (b, h)) in budgets.iter().zip(channels).enumerate() {
            let m = h.dot(q).dot(&adjoint(h)).mapv(|z| z.scale(b.snr_scale));
            let r = logdet_one_plus_psd(&m)?;
            if r < min {
                min = r;
                argmin = i;
            }
        }
        Ok((min, argmin))
    };

    let mut q = CMatrix::<F>::eye(n_t);
    let (mut best_obj, _) = min_rate_of(&q)?;
    let mut best_q = q.clone();
    let mut trace = Vec::with_capacity(cfg.max_iterations);
    let mut converged = false;
    let mut iterations = 0;

    for k in 1..=cfg.max_iterations {
        iterations = k;
        let (_, w) = min_rate_of(&q)?;
        // Gradient of the slowest collaborator's rate at Q:
        // (s / ln 2) * H^H (I + s H Q H^H)^{-1} H.
        let (b, h) = (&budgets[w], &channels[w]);
        let mut inner = h.dot(&q).dot(&adjoint(h)).mapv(|z| z.scale(b.snr_scale));
        for i in 0..inner.nrows() {
            inner[[i, i]] += Complex::new(F::one(), F::zero());
        }
        let inv = hermitian_inverse(&inner)?;
        let grad = adjoint(h)
            .dot(&inv)
            .dot(h)
            .mapv(|z| z.scale(b.snr_scale / ln2));
        let gnorm = grad.iter().map(|z| z.norm_sqr()).sum::<F>().sqrt();
        if gnorm == F::zero() {
            converged = true;
            trace.push(best_obj);
            break;
        }
        let step = cfg.step_scale / F::of(k as f64).sqrt() / gnorm;
        q = psd_project(&(&q + &grad.mapv(|z| z.scale(step))), trace_cap)?;

        let (obj, _) = min_rate_of(&q)?;
        if obj > best_obj {
            best_obj = obj;
            best_q = q.clone();
        }
        trace.push(best_obj);
        if k > cfg.stall_window {
            let before = trace[k - 1 - cfg.stall_window];
            if best_obj - before < cfg.stall_tolerance {
                converged = true;
                break;
            }
        }
    }

    let f = psd_sqrt(&best_q)?;
    let rates: Vec<F> = budgets
        .iter()
        .zip(channels)
        .map(|(b, h)| collaborator_rate(b.snr_scale, h, &f))
        .collect::<Result<_>>()?;
    let (min_rate, median_rate, max_rate) = rate_stats(&rates);
    Ok(MaxMinSolution {
        precoder: Precoder {
            entries: f,
            power_budget: trace_cap,
        },
        report: Phase1Report {
            per_ue_rates: rates,
            min_rate,
            median_rate,
            max_rate,
            precoder_kind: PrecoderKind::MaxMin,
        },
        converged,
        iterations,
        objective_trace: trace,
    })
}

/// Inverse of a Hermitian positive definite matrix via eigendecomposition.
fn hermitian_inverse<F: Real>(a: &CMatrix<F>) -> Result<CMatrix<F>> {
    let eig = hermitian_eigen(a)?;
    let n = a.nrows();
    let floor = eig.values[0].abs() * F::of(1e-14);
    let mut out = CMatrix::<F>::zeros((n, n));
    for j in 0..n {
        if eig.values[j].abs() <= floor {
            return Err(Error::InvalidInput("singular matrix has no inverse".into()));
        }
        let inv = eig.values[j].recip();
        for r in 0..n {
            for c in 0..n {
                out[[r, c]] += eig.vectors[[r, j]] * eig.vectors[[c, j]].conj() * inv;
            }
        }
    }
    Ok(out)
}

/// Euclidean projection onto `{Q >= 0, tr(Q) <= cap}`: in the eigenbasis
/// this is the projection of the eigenvalue vector onto the capped simplex,
/// i.e. clip to non-negative and, when the cap binds, subtract the uniform
/// shift that brings the active eigenvalues back onto the budget.
fn psd_project<F: Real>(a: &CMatrix<F>, trace_cap: F) -> Result<CMatrix<F>> {
    let eig = hermitian_eigen(a)?;
    let n = a.nrows();
    let mut projected: Vec<F> = eig.values.iter().map(|&l| l.max(F::zero())).collect();
    let trace: F = projected.iter().copied().sum();
    if trace > trace_cap {
        // Eigenvalues arrive sorted descending; find the largest active set
        // whose uniform shift keeps all of its members positive.
        let vals = &eig.values;
        let mut cumulative = F::zero();
        let mut shift = F::zero();
        for k in 0..n {
            cumulative += vals[k];
            let candidate = (cumulative - trace_cap) / F::of((k + 1) as f64);
            if k + 1 == n || candidate >= vals[k + 1] {
                shift = candidate;
                break;
            }
        }
        for (p, &l) in projected.iter_mut().zip(vals.iter()) {
            *p = (l - shift).max(F::zero());
        }
    }
    let mut out = CMatrix::<F>::zeros((n, n));
    for j in 0..n {
        let l = projected[j];
        if l == F::zero() {
            continue;
        }
        for r in 0..n {
            for c in 0..n {
                out[[r, c]] += eig.vectors[[r, j]] * eig.vectors[[c, j]].conj() * l;
            }
        }
    }
    Ok(out)
}

/// Hermitian square root of a PSD matrix.
fn psd_sqrt<F: Real>(a: &CMatrix<F>) -> Result<CMatrix<F>> {
    let eig = hermitian_eigen(a)?;
    let n = a.nrows();
    let mut out = CMatrix::<F>::zeros((n, n));
    for j in 0..n {
        let l = eig.values[j].max(F::zero()).sqrt();
        if l == F::zero() {
            continue;
        }
        for r in 0..n {
            for c in 0..n {
                out[[r, c]] += eig.vectors[[r, j]] * eig.vectors[[c, j]].conj() * l;
            }
        }
    }
    Ok(out)
}

/// Channel block with the link's SNR folded in: `sqrt(snr_scale) * H`.
/// The Gram matrix of the horizontally stacked folded blocks then feeds
/// rate expressions with unit noise scale.
fn folded_block<F: Real>(budget: &LinkBudget<F>, channel: &CMatrix<F>) -> CMatrix<F> {
    let s = budget.snr_scale.max(F::zero()).sqrt();
    channel.mapv(|z| z.scale(s))
}

/// Coherent joint transmission of `U` UEs: the BS sees the horizontally
/// stacked composite channel, the group applies its SVD precoder, and
/// power is water-filled across eigenmodes with total budget `U * N_t`.
pub fn phase2_cjt<F: Real>(
    budgets: &[LinkBudget<F>],
    channels: &[CMatrix<F>],
) -> Result<Phase2Report<F>> {
    let (n_r, n_t) = check_links(budgets, channels)?;
    let u = budgets.len();
    let mut gram = CMatrix::<F>::zeros((n_r, n_r));
    for (b, h) in budgets.iter().zip(channels) {
        let blk = folded_block(b, h);
        gram = gram + blk.dot(&adjoint(&blk));
    }
    let eig = hermitian_eigen(&gram)?;
    let eigs: Vec<F> = eig.values.iter().map(|&l| l.max(F::zero())).collect();
    let total = F::of((u * n_t) as f64);
    let alloc = water_fill(&eigs, total, F::one())?;
    Ok(Phase2Report {
        scheme: Phase2Scheme::Cjt,
        rate: alloc.capacity,
        num_streams: (u * n_t).min(n_r),
        power_allocation: Some(alloc),
        cluster_split: None,
    })
}

/// Assignment of the `U` transmitting UEs (serving UE is index 0) to the
/// two non-coherent clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    pub group1: Vec<usize>,
    pub group2: Vec<usize>,
}

impl ClusterAssignment {
    /// Equal split by index order: the first `ceil(U/2)` UEs (serving UE
    /// included) form group 1, the rest group 2.
    pub fn equal_split(u: usize) -> ClusterAssignment {
        let n1 = u.div_ceil(2);
        ClusterAssignment {
            group1: (0..n1).collect(),
            group2: (n1..u).collect(),
        }
    }

    fn validate(&self, u: usize) -> Result<()> {
        let mut seen = vec![false; u];
        for &i in self.group1.iter().chain(&self.group2) {
            if i >= u {
                return Err(Error::InvalidInput(format!(
                    "cluster index {i} out of range for {u} UEs"
                )));
            }
            if seen[i] {
                return Err(Error::InvalidInput(format!("UE {i} assigned twice")));
            }
            seen[i] = true;
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::InvalidInput("cluster assignment misses a UE".into()));
        }
        Ok(())
    }
}

/// Non-coherent joint transmission: each cluster's gain-weighted channels
/// sum into one effective block, the two blocks are concatenated, and the
/// rate is the open-loop log-det of the result (2 * N_t streams, no
/// precoder).
pub fn phase2_ncjt<F: Real>(
    budgets: &[LinkBudget<F>],
    channels: &[CMatrix<F>],
    clusters: &ClusterAssignment,
) -> Result<Phase2Report<F>> {
    let (n_r, n_t) = check_links(budgets, channels)?;
    if n_r < 2 * n_t {
        return Err(Error::InvalidInput(format!(
            "non-coherent transmission needs at least {} BS antennas, got {n_r}",
            2 * n_t
        )));
    }
    let u = budgets.len();
    clusters.validate(u)?;

    let mut stacked = CMatrix::<F>::zeros((n_r, 2 * n_t));
    for (offset, group) in [(0, &clusters.group1), (n_t, &clusters.group2)] {
        for &i in group {
            let blk = folded_block(&budgets[i], &channels[i]);
            for r in 0..n_r {
                for c in 0..n_t {
                    stacked[[r, offset + c]] += blk[[r, c]];
                }
            }
        }
    }
    let m = stacked.dot(&adjoint(&stacked));
    Ok(Phase2Report {
        scheme: Phase2Scheme::Ncjt,
        rate: logdet_one_plus_psd(&m)?,
        num_streams: 2 * n_t,
        power_allocation: None,
        cluster_split: Some((clusters.group1.len(), clusters.group2.len())),
    })
}

/// Direct serving-UE-to-BS rate: single-user SVD transmission with
/// water-filled power over the link's eigenmodes. An unusable (zero-gain)
/// channel delivers rate 0.
pub fn baseline_rate<F: Real>(budget: &LinkBudget<F>, channel: &CMatrix<F>) -> Result<F> {
    let n_t = channel.ncols();
    let blk = folded_block(budget, channel);
    let svd = crate::linalg::svd(&blk)?;
    let eigs: Vec<F> = svd.values.iter().map(|&s| s * s).collect();
    match water_fill(&eigs, F::of(n_t as f64), F::one()) {
        Ok(alloc) => Ok(alloc.capacity),
        Err(Error::UnusableChannel) => Ok(F::zero()),
        Err(e) => Err(e),
    }
}

/// Phase-2 rate evaluator over collaborator subsets, with the per-trial
/// fading fixed.
///
/// Folds each link's full-power SNR into its channel block once; a subset
/// evaluation then only sums small precomputed matrices. Under
/// [`PowerMode::Normalized`] the per-UE power shrinks with the transmit
/// count, which scales the summed Gram matrix by `1 / U`.
pub struct JointEvaluator<F: Real> {
    scheme: Phase2Scheme,
    power_mode: PowerMode,
    /// Folded blocks, serving UE first, then collaborators in index order.
    blocks: Vec<CMatrix<F>>,
    /// Gram outer products of `blocks`, same order.
    outers: Vec<CMatrix<F>>,
    n_rx: usize,
    n_tx: usize,
}

impl<F: Real> JointEvaluator<F> {
    pub fn new(
        scheme: Phase2Scheme,
        power_mode: PowerMode,
        serving_budget: &LinkBudget<F>,
        serving_channel: &CMatrix<F>,
        collab_budgets: &[LinkBudget<F>],
        collab_channels: &[CMatrix<F>],
    ) -> Result<JointEvaluator<F>> {
        if collab_budgets.len() != collab_channels.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} budgets vs {} channels",
                collab_budgets.len(),
                collab_channels.len()
            )));
        }
        let (n_rx, n_tx) = serving_channel.dim();
        let mut blocks = Vec::with_capacity(1 + collab_channels.len());
        blocks.push(folded_block(serving_budget, serving_channel));
        for (b, h) in collab_budgets.iter().zip(collab_channels) {
            if h.dim() != (n_rx, n_tx) {
                return Err(Error::ShapeMismatch(format!(
                    "collaborator channel {:?} vs serving {:?}",
                    h.dim(),
                    (n_rx, n_tx)
                )));
            }
            blocks.push(folded_block(b, h));
        }
        let outers = blocks.iter().map(|b| b.dot(&adjoint(b))).collect();
        Ok(JointEvaluator {
            scheme,
            power_mode,
            blocks,
            outers,
            n_rx,
            n_tx,
        })
    }

    /// Number of available collaborators.
    pub fn num_collaborators(&self) -> usize {
        self.blocks.len() - 1
    }

    /// Phase-2 rate (bits/s/Hz) when the serving UE transmits together
    /// with the given collaborators (collaborator indices, ascending).
    pub fn rate(&self, subset: &[usize]) -> Result<F> {
        for &i in subset {
            if i >= self.num_collaborators() {
                return Err(Error::InvalidInput(format!(
                    "collaborator index {i} out of range ({} available)",
                    self.num_collaborators()
                )));
            }
        }
        let u = subset.len() + 1;
        let power_scale = match self.power_mode {
            PowerMode::FullPower => F::one(),
            PowerMode::Normalized => F::of(u as f64).recip(),
        };
        match self.scheme {
            Phase2Scheme::Cjt => {
                let mut gram = self.outers[0].clone();
                for &i in subset {
                    gram = gram + &self.outers[i + 1];
                }
                if power_scale != F::one() {
                    gram = gram.mapv(|z| z.scale(power_scale));
                }
                let eig = hermitian_eigen(&gram)?;
                let eigs: Vec<F> = eig.values.iter().map(|&l| l.max(F::zero())).collect();
                let total = F::of((u * self.n_tx) as f64);
                Ok(water_fill(&eigs, total, F::one())?.capacity)
            }
            Phase2Scheme::Ncjt => {
                let amp = power_scale.sqrt();
                let split = ClusterAssignment::equal_split(u);
                let mut stacked = CMatrix::<F>::zeros((self.n_rx, 2 * self.n_tx));
                // Transmit list: serving UE first, then the chosen subset.
                let member = |pos: usize| -> &CMatrix<F> {
                    if pos == 0 {
                        &self.blocks[0]
                    } else {
                        &self.blocks[subset[pos - 1] + 1]
                    }
                };
                for (offset, group) in [(0, &split.group1), (self.n_tx, &split.group2)] {
                    for &pos in group {
                        let blk = member(pos);
                        for r in 0..self.n_rx {
                            for c in 0..self.n_tx {
                                stacked[[r, offset + c]] += blk[[r, c]] * amp;
                            }
                        }
                    }
                }
                let m = stacked.dot(&adjoint(&stacked));
                logdet_one_plus_psd(&m)
            }
        }
    }

    /// Rate with every collaborator transmitting.
    pub fn rate_all(&self) -> Result<F> {
        let all: Vec<usize> = (0..self.num_collaborators()).collect();
        self.rate(&all)
    }

    /// Rate of the serving UE alone (the direct-transmission baseline).
    pub fn baseline(&self) -> Result<F> {
        self.rate(&[])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::rayleigh_channel;
    use crate::linalg::gram_eigenvalues;
    use ndarray::concatenate;
    use ndarray::Axis;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn budget(snr_scale: f64) -> LinkBudget<f64> {
        LinkBudget {
            pathloss_gain: 1.0,
            tx_power: 1.0,
            symbol_energy: 1e-7,
            noise_variance: 1.0,
            snr_scale,
        }
    }

    fn draw_links(
        n: usize,
        rx: usize,
        tx: usize,
        snr: f64,
        rng: &mut ChaCha8Rng,
    ) -> (Vec<LinkBudget<f64>>, Vec<CMatrix<f64>>) {
        let budgets = vec![budget(snr); n];
        let channels = (0..n).map(|_| rayleigh_channel(rx, tx, rng)).collect();
        (budgets, channels)
    }

    #[test]
    fn identity_rate_scalar_case() {
        // 1x1 channel h = 1 at unit SNR scale: log2(1 + 1) = 1.
        let h = CMatrix::<f64>::eye(1);
        let report = phase1_rate_identity(&[budget(1.0)], &[h]).unwrap();
        assert!((report.min_rate - 1.0).abs() < 1e-12);
        assert_eq!(report.min_rate, report.median_rate);
        assert_eq!(report.min_rate, report.max_rate);
    }

    #[test]
    fn empty_collaborator_list_is_an_error() {
        let out = phase1_rate_identity::<f64>(&[], &[]);
        assert!(matches!(out, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn rate_ordering_and_min_shrinks_with_more_ues() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let (budgets, channels) = draw_links(7, 2, 2, 2.0, &mut rng);
            let full = phase1_rate_identity(&budgets, &channels).unwrap();
            assert!(full.min_rate <= full.median_rate && full.median_rate <= full.max_rate);
            let fewer = phase1_rate_identity(&budgets[..6], &channels[..6]).unwrap();
            assert!(full.min_rate <= fewer.min_rate + 1e-12);
        }
    }

    #[test]
    fn median_averages_middle_pair_for_even_counts() {
        // Two links with different SNR scales: median = mean of both rates.
        let h = CMatrix::<f64>::eye(1);
        let report =
            phase1_rate_identity(&[budget(1.0), budget(3.0)], &[h.clone(), h]).unwrap();
        assert!((report.min_rate - 1.0).abs() < 1e-12);
        assert!((report.max_rate - 2.0).abs() < 1e-12);
        assert!((report.median_rate - 1.5).abs() < 1e-12);
    }

    fn single_user_optimum(snr: f64, h: &CMatrix<f64>) -> f64 {
        let b = h.mapv(|z| z.scale(snr.sqrt()));
        let eigs: Vec<f64> = gram_eigenvalues(&b).unwrap().to_vec();
        water_fill(&eigs, h.ncols() as f64, 1.0).unwrap().capacity
    }

    #[test]
    fn maxmin_single_user_approaches_waterfilling_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let h: CMatrix<f64> = rayleigh_channel(2, 2, &mut rng);
            let sol =
                phase1_maxmin_precoder(&[budget(1.5)], &[h.clone()], &MaxMinConfig::default())
                    .unwrap();
            let opt = single_user_optimum(1.5, &h);
            assert!(
                sol.report.min_rate <= opt + 1e-9,
                "solver {} exceeds the optimum {opt}",
                sol.report.min_rate
            );
            assert!(
                sol.report.min_rate >= opt * 0.98,
                "solver {} too far below optimum {opt}",
                sol.report.min_rate
            );
            assert!(sol.precoder.within_budget());
        }
    }

    #[test]
    fn maxmin_identical_channels_match_single_user() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let h: CMatrix<f64> = rayleigh_channel(2, 2, &mut rng);
        let budgets = vec![budget(2.0); 4];
        let channels = vec![h.clone(); 4];
        let sol = phase1_maxmin_precoder(&budgets, &channels, &MaxMinConfig::default()).unwrap();
        let opt = single_user_optimum(2.0, &h);
        assert!(sol.report.min_rate >= opt * 0.98 && sol.report.min_rate <= opt + 1e-9);
    }

    #[test]
    fn maxmin_never_below_identity_and_trace_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..5 {
            let (budgets, channels) = draw_links(10, 2, 2, 1.0, &mut rng);
            let identity = phase1_rate_identity(&budgets, &channels).unwrap();
            let sol =
                phase1_maxmin_precoder(&budgets, &channels, &MaxMinConfig::default()).unwrap();
            assert!(
                sol.report.min_rate >= identity.min_rate - 1e-12,
                "max-min {} fell below identity {}",
                sol.report.min_rate,
                identity.min_rate
            );
            for w in sol.objective_trace.windows(2) {
                assert!(w[1] >= w[0], "best-objective trace decreased");
            }
            assert!(sol.precoder.within_budget());
        }
    }

    #[test]
    fn cjt_single_user_equals_baseline() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..10 {
            let h: CMatrix<f64> = rayleigh_channel(4, 2, &mut rng);
            let b = budget(0.8);
            let cjt = phase2_cjt(&[b], &[h.clone()]).unwrap();
            let direct = baseline_rate(&b, &h).unwrap();
            assert!((cjt.rate - direct).abs() < 1e-9, "{} vs {direct}", cjt.rate);
            assert_eq!(cjt.num_streams, 2);
        }
    }

    #[test]
    fn cjt_matches_stacked_oracle() {
        // Build the composite channel by explicit horizontal stacking and
        // solve it independently of the Gram-sum path.
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..10 {
            let (budgets, channels) = draw_links(2, 2, 2, 1.0, &mut rng);
            let folded: Vec<CMatrix<f64>> = budgets
                .iter()
                .zip(&channels)
                .map(|(b, h)| h.mapv(|z| z.scale(b.snr_scale.sqrt())))
                .collect();
            let stacked = concatenate(Axis(1), &[folded[0].view(), folded[1].view()]).unwrap();
            let eigs: Vec<f64> = gram_eigenvalues(&stacked).unwrap().to_vec();
            let oracle = water_fill(&eigs, 4.0, 1.0).unwrap().capacity;
            let got = phase2_cjt(&budgets, &channels).unwrap();
            assert!((got.rate - oracle).abs() < 1e-9, "{} vs {oracle}", got.rate);
        }
    }

    #[test]
    fn cjt_power_allocation_spends_group_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for u in [1usize, 3, 5, 10] {
            let (budgets, channels) = draw_links(u, 4, 2, 0.5, &mut rng);
            let report = phase2_cjt(&budgets, &channels).unwrap();
            let alloc = report.power_allocation.unwrap();
            let spent: f64 = alloc.powers.iter().sum();
            let total = (u * 2) as f64;
            assert!(
                (spent / total - 1.0).abs() < 1e-9,
                "u={u}: spent {spent} of {total}"
            );
            assert_eq!(report.num_streams, (u * 2).min(4));
        }
    }

    #[test]
    fn cjt_rate_grows_with_more_ues_and_beats_baseline() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..10 {
            let (budgets, channels) = draw_links(6, 4, 2, 0.3, &mut rng);
            let mut prev = 0.0;
            for u in 1..=6 {
                let r = phase2_cjt(&budgets[..u], &channels[..u]).unwrap().rate;
                assert!(r >= prev - 1e-12, "rate shrank when adding UE {u}");
                prev = r;
            }
            let direct = baseline_rate(&budgets[0], &channels[0]).unwrap();
            assert!(prev >= direct - 1e-12);
        }
    }

    #[test]
    fn cjt_dead_links_leave_spectrum_of_the_live_one() {
        // Zero-gain UEs contribute nothing to the composite channel; the
        // group power budget still counts every member.
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let h_live: CMatrix<f64> = rayleigh_channel(4, 2, &mut rng);
        let h_dead: CMatrix<f64> = rayleigh_channel(4, 2, &mut rng);
        let budgets = vec![budget(2.0), budget(0.0), budget(0.0)];
        let channels = vec![h_live.clone(), h_dead.clone(), h_dead];
        let got = phase2_cjt(&budgets, &channels).unwrap();

        let folded = h_live.mapv(|z| z.scale(2.0f64.sqrt()));
        let live_eigs: Vec<f64> = gram_eigenvalues(&folded).unwrap().to_vec();
        let oracle = water_fill(&live_eigs, 6.0, 1.0).unwrap().capacity;
        assert!((got.rate - oracle).abs() < 1e-9);
    }

    #[test]
    fn ncjt_matches_literal_transcription() {
        // Recompute the two summed blocks and the log-det with plain loops.
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        for _ in 0..10 {
            let (budgets, channels) = draw_links(4, 4, 2, 0.6, &mut rng);
            let split = ClusterAssignment::equal_split(4);
            let got = phase2_ncjt(&budgets, &channels, &split).unwrap();
            assert_eq!(got.cluster_split, Some((2, 2)));
            assert_eq!(got.num_streams, 4);

            let sum_group = |idx: &[usize]| -> CMatrix<f64> {
                let mut acc = CMatrix::<f64>::zeros((4, 2));
                for &i in idx {
                    let s = budgets[i].snr_scale.sqrt();
                    for r in 0..4 {
                        for c in 0..2 {
                            acc[[r, c]] += channels[i][[r, c]] * s;
                        }
                    }
                }
                acc
            };
            let h1 = sum_group(&[0, 1]);
            let h2 = sum_group(&[2, 3]);
            let stacked = concatenate(Axis(1), &[h1.view(), h2.view()]).unwrap();
            let oracle = crate::linalg::logdet_capacity(&stacked, 1.0).unwrap();
            assert!((got.rate - oracle).abs() < 1e-9, "{} vs {oracle}", got.rate);
        }
    }

    #[test]
    fn ncjt_single_ue_is_open_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let h: CMatrix<f64> = rayleigh_channel(4, 2, &mut rng);
        let b = budget(1.2);
        let got = phase2_ncjt(&[b], &[h.clone()], &ClusterAssignment::equal_split(1)).unwrap();
        let folded = h.mapv(|z| z.scale(1.2f64.sqrt()));
        let oracle = crate::linalg::logdet_capacity(&folded, 1.0).unwrap();
        assert!((got.rate - oracle).abs() < 1e-9);
        assert_eq!(got.cluster_split, Some((1, 0)));
    }

    #[test]
    fn ncjt_same_group_channels_add_coherently() {
        // Two identical same-group channels double the block amplitude.
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        let h: CMatrix<f64> = rayleigh_channel(4, 2, &mut rng);
        let budgets = vec![budget(1.0); 2];
        let channels = vec![h.clone(), h.clone()];
        let both_in_one = ClusterAssignment {
            group1: vec![0, 1],
            group2: vec![],
        };
        let got = phase2_ncjt(&budgets, &channels, &both_in_one).unwrap();
        let doubled = h.mapv(|z| z.scale(2.0));
        let oracle = crate::linalg::logdet_capacity(&doubled, 1.0).unwrap();
        assert!((got.rate - oracle).abs() < 1e-9);
    }

    #[test]
    fn ncjt_validates_antennas_and_assignment() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        let h: CMatrix<f64> = rayleigh_channel(2, 2, &mut rng);
        let out = phase2_ncjt(&[budget(1.0)], &[h], &ClusterAssignment::equal_split(1));
        assert!(matches!(out, Err(Error::InvalidInput(_))));

        let h4: CMatrix<f64> = rayleigh_channel(4, 2, &mut rng);
        let bad = ClusterAssignment {
            group1: vec![0, 0],
            group2: vec![],
        };
        let out = phase2_ncjt(&[budget(1.0), budget(1.0)], &[h4.clone(), h4], &bad);
        assert!(out.is_err());
    }

    #[test]
    fn equal_split_counts() {
        let s1 = ClusterAssignment::equal_split(1);
        assert_eq!((s1.group1.len(), s1.group2.len()), (1, 0));
        let s4 = ClusterAssignment::equal_split(4);
        assert_eq!((s4.group1, s4.group2), (vec![0, 1], vec![2, 3]));
        let s5 = ClusterAssignment::equal_split(5);
        assert_eq!((s5.group1.len(), s5.group2.len()), (3, 2));
    }

    #[test]
    fn baseline_zero_gain_gives_zero_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let h: CMatrix<f64> = rayleigh_channel(4, 2, &mut rng);
        assert_eq!(baseline_rate(&budget(0.0), &h).unwrap(), 0.0);
    }

    #[test]
    fn baseline_beats_open_loop_transmission() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        for _ in 0..20 {
            let h: CMatrix<f64> = rayleigh_channel(4, 2, &mut rng);
            let b = budget(0.7);
            let wf = baseline_rate(&b, &h).unwrap();
            let open = crate::linalg::logdet_capacity(&h, 0.7).unwrap();
            assert!(wf >= open - 1e-12, "water-filled {wf} < open-loop {open}");
        }
    }

    #[test]
    fn evaluator_agrees_with_direct_cjt() {
        let mut rng = ChaCha8Rng::seed_from_u64(107);
        let (budgets, channels) = draw_links(6, 4, 2, 0.4, &mut rng);
        let eval = JointEvaluator::new(
            Phase2Scheme::Cjt,
            PowerMode::FullPower,
            &budgets[0],
            &channels[0],
            &budgets[1..],
            &channels[1..],
        )
        .unwrap();
        for subset in [vec![], vec![0], vec![1, 3], vec![0, 1, 2, 3, 4]] {
            let members: Vec<usize> = std::iter::once(0)
                .chain(subset.iter().map(|&i| i + 1))
                .collect();
            let sub_budgets: Vec<_> = members.iter().map(|&i| budgets[i]).collect();
            let sub_channels: Vec<_> = members.iter().map(|&i| channels[i].clone()).collect();
            let direct = phase2_cjt(&sub_budgets, &sub_channels).unwrap().rate;
            let fast = eval.rate(&subset).unwrap();
            assert!((fast - direct).abs() < 1e-9, "subset {subset:?}");
        }
    }

    #[test]
    fn evaluator_normalized_mode_rescales_power() {
        // Normalized power splits each UE's budget by the transmit count,
        // which is the same as dividing every SNR scale by U.
        let mut rng = ChaCha8Rng::seed_from_u64(109);
        let (budgets, channels) = draw_links(4, 4, 2, 0.9, &mut rng);
        let eval = JointEvaluator::new(
            Phase2Scheme::Cjt,
            PowerMode::Normalized,
            &budgets[0],
            &channels[0],
            &budgets[1..],
            &channels[1..],
        )
        .unwrap();
        let subset = [0usize, 1, 2];
        let u = subset.len() + 1;
        let scaled: Vec<LinkBudget<f64>> = budgets
            .iter()
            .map(|b| LinkBudget {
                snr_scale: b.snr_scale / u as f64,
                ..*b
            })
            .collect();
        let direct = phase2_cjt(&scaled, &channels).unwrap().rate;
        let fast = eval.rate(&subset).unwrap();
        assert!((fast - direct).abs() < 1e-9);
        // Baseline (serving alone) is unaffected by normalization.
        let direct_base = baseline_rate(&budgets[0], &channels[0]).unwrap();
        assert!((eval.baseline().unwrap() - direct_base).abs() < 1e-9);
    }

    #[test]
    fn evaluator_agrees_with_direct_ncjt() {
        let mut rng = ChaCha8Rng::seed_from_u64(113);
        let (budgets, channels) = draw_links(5, 4, 2, 0.4, &mut rng);
        let eval = JointEvaluator::new(
            Phase2Scheme::Ncjt,
            PowerMode::FullPower,
            &budgets[0],
            &channels[0],
            &budgets[1..],
            &channels[1..],
        )
        .unwrap();
        let subset = [0usize, 2, 3];
        let members: Vec<usize> = std::iter::once(0)
            .chain(subset.iter().map(|&i| i + 1))
            .collect();
        let sub_budgets: Vec<_> = members.iter().map(|&i| budgets[i]).collect();
        let sub_channels: Vec<_> = members.iter().map(|&i| channels[i].clone()).collect();
        let direct = phase2_ncjt(
            &sub_budgets,
            &sub_channels,
            &ClusterAssignment::equal_split(members.len()),
        )
        .unwrap()
        .rate;
        let fast = eval.rate(&subset).unwrap();
        assert!((fast - direct).abs() < 1e-9);
    }

    #[test]
    fn evaluator_rejects_out_of_range_indices() {
        let mut rng = ChaCha8Rng::seed_from_u64(127);
        let (budgets, channels) = draw_links(3, 4, 2, 1.0, &mut rng);
        let eval = JointEvaluator::new(
            Phase2Scheme::Cjt,
            PowerMode::FullPower,
            &budgets[0],
            &channels[0],
            &budgets[1..],
            &channels[1..],
        )
        .unwrap();
        assert!(eval.rate(&[5]).is_err());
    }
}
