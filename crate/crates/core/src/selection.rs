//! Collaborator-subset selection: the two-phase throughput objective,
//! exhaustive enumeration over all subsets, and a greedy search seeded by
//! the phase-1 rate ranking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Enumeration cap for [`exhaustive_select`]: above this many collaborators
/// the 2^n subset count is rejected.
pub const MAX_EXHAUSTIVE_COLLABORATORS: usize = 20;

/// How a subset was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMethod {
    /// Every collaborator transmits; no search.
    All,
    /// Argmax over all 2^n subsets.
    Exhaustive,
    /// Rank-seeded greedy growth.
    Greedy,
}

/// Objective steering the greedy search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreedyObjective {
    /// Two-phase delivered bits `C1*C2/(C1+C2)`; what exhaustive search
    /// maximizes, so the two methods stay comparable.
    #[default]
    HarmonicBits,
    /// The bottleneck rate `min(C1, C2)` in bits/s.
    MinRate,
}

/// Throughput of one two-phase configuration over a one-second frame.
///
/// For a nonempty relay set the time split balances the phases
/// (`c1 * t1 = c2 * t2`, `t1 + t2 = 1`). The empty set is the degenerate
/// direct-transmission case: the serving UE sends to the BS for the whole
/// second, so `t1 = 0` and the flow-balance identity does not apply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmimoThroughput<F: Real> {
    /// Phase-1 multicast capacity, bits/s.
    pub c1: F,
    /// Phase-2 joint-transmission capacity, bits/s.
    pub c2: F,
    /// Seconds spent multicasting.
    pub t1: F,
    /// Seconds spent transmitting to the BS.
    pub t2: F,
    /// Bits the BS receives within the frame.
    pub bits_delivered: F,
    /// Bits direct transmission would deliver in the same frame.
    pub baseline_bits: F,
    /// `bits_delivered / baseline_bits`.
    pub relative_improvement: F,
}

impl<F: Real> DmimoThroughput<F> {
    /// Sets the baseline and the improvement ratio against it.
    pub fn with_baseline(mut self, baseline_bits: F) -> Self {
        self.baseline_bits = baseline_bits;
        self.relative_improvement = if baseline_bits > F::zero() {
            self.bits_delivered / baseline_bits
        } else if self.bits_delivered > F::zero() {
            F::infinity()
        } else {
            F::one()
        };
        self
    }
}

/// Splits the one-second frame between the phases so no phase idles:
/// `t1 + t2 = 1` and `c1 * t1 = c2 * t2`, delivering `c1*c2/(c1+c2)` bits.
/// If either capacity is zero nothing gets through; by convention the
/// frame is then charged to phase 1.
///
/// The baseline fields are neutral (the throughput itself, ratio 1) until
/// [`DmimoThroughput::with_baseline`] attaches a real baseline.
pub fn combine_phases<F: Real>(c1: F, c2: F) -> Result<DmimoThroughput<F>> {
    if c1 < F::zero() || c2 < F::zero() || !c1.is_finite() || !c2.is_finite() {
        return Err(Error::InvalidInput(format!(
            "phase capacities must be finite and non-negative, got {c1} and {c2}"
        )));
    }
    let (t1, t2, bits) = if c1 == F::zero() || c2 == F::zero() {
        (F::one(), F::zero(), F::zero())
    } else {
        let sum = c1 + c2;
        (c2 / sum, c1 / sum, c1 * c2 / sum)
    };
    Ok(DmimoThroughput {
        c1,
        c2,
        t1,
        t2,
        bits_delivered: bits,
        baseline_bits: bits,
        relative_improvement: F::one(),
    })
}

fn check_subset<F: Real>(subset: &[usize], phase1_rates: &[F]) -> Result<()> {
    let mut seen = vec![false; phase1_rates.len()];
    for &i in subset {
        if i >= phase1_rates.len() {
            return Err(Error::InvalidInput(format!(
                "collaborator index {i} out of range ({} rates given)",
                phase1_rates.len()
            )));
        }
        if seen[i] {
            return Err(Error::InvalidInput(format!(
                "collaborator index {i} listed twice"
            )));
        }
        seen[i] = true;
    }
    Ok(())
}

fn subset_throughput<F, P2>(
    subset: &[usize],
    phase1_rates: &[F],
    phase2_eval: &P2,
    b1: F,
    b2: F,
    baseline_bits: F,
) -> Result<DmimoThroughput<F>>
where
    F: Real,
    P2: Fn(&[usize]) -> Result<F>,
{
    if subset.is_empty() {
        return Ok(DmimoThroughput {
            c1: F::zero(),
            c2: baseline_bits,
            t1: F::zero(),
            t2: F::one(),
            bits_delivered: baseline_bits,
            baseline_bits,
            relative_improvement: F::one(),
        });
    }
    let min_rate = subset
        .iter()
        .map(|&i| phase1_rates[i])
        .fold(F::infinity(), F::min);
    let c1 = b1 * min_rate;
    let c2 = b2 * phase2_eval(subset)?;
    Ok(combine_phases(c1, c2)?.with_baseline(baseline_bits))
}

/// Two-phase throughput of one relay subset. `phase2_eval` maps a
/// collaborator subset to the phase-2 rate (bits/s/Hz) of that subset
/// transmitting together with the serving UE; the empty subset gives the
/// direct-transmission baseline, which fills the comparison fields.
pub fn evaluate_subset<F, P2>(
    subset: &[usize],
    phase1_rates: &[F],
    phase2_eval: &P2,
    b1: F,
    b2: F,
) -> Result<DmimoThroughput<F>>
where
    F: Real,
    P2: Fn(&[usize]) -> Result<F>,
{
    check_subset(subset, phase1_rates)?;
    let baseline_bits = b2 * phase2_eval(&[])?;
    subset_throughput(subset, phase1_rates, phase2_eval, b1, b2, baseline_bits)
}

/// Outcome of a subset search.
#[derive(Debug, Clone)]
pub struct SelectionResult<F: Real> {
    /// Chosen collaborator indices, ascending. Empty means direct
    /// transmission beat every relay set considered.
    pub chosen_set: Vec<usize>,
    /// Delivered bits of the chosen configuration over the frame.
    pub objective: F,
    /// Number of subsets whose throughput was computed.
    pub subsets_evaluated: usize,
    pub method: SelectionMethod,
}

/// Throughput of the full collaborator set, without any search.
pub fn select_all<F, P2>(
    phase1_rates: &[F],
    phase2_eval: &P2,
    b1: F,
    b2: F,
) -> Result<SelectionResult<F>>
where
    F: Real,
    P2: Fn(&[usize]) -> Result<F>,
{
    let all: Vec<usize> = (0..phase1_rates.len()).collect();
    let through = evaluate_subset(&all, phase1_rates, phase2_eval, b1, b2)?;
    Ok(SelectionResult {
        chosen_set: all,
        objective: through.bits_delivered,
        subsets_evaluated: 1,
        method: SelectionMethod::All,
    })
}

/// Evaluates every one of the 2^n collaborator subsets (the empty set
/// included) and returns the throughput maximizer. Ties keep the earliest
/// subset in mask order, so smaller sets win over supersets of equal value.
pub fn exhaustive_select<F, P2>(
    phase1_rates: &[F],
    phase2_eval: &P2,
    b1: F,
    b2: F,
) -> Result<SelectionResult<F>>
where
    F: Real,
    P2: Fn(&[usize]) -> Result<F>,
{
    let n = phase1_rates.len();
    if n > MAX_EXHAUSTIVE_COLLABORATORS {
        return Err(Error::EnumerationCap(n, MAX_EXHAUSTIVE_COLLABORATORS));
    }
    let baseline_bits = b2 * phase2_eval(&[])?;
    let mut best_mask = 0u32;
    let mut best_bits = baseline_bits;
    let mut scratch = Vec::with_capacity(n);
    for mask in 1u32..(1u32 << n) {
        scratch.clear();
        scratch.extend((0..n).filter(|&i| mask >> i & 1 == 1));
        let through =
            subset_throughput(&scratch, phase1_rates, phase2_eval, b1, b2, baseline_bits)?;
        if through.bits_delivered > best_bits {
            best_bits = through.bits_delivered;
            best_mask = mask;
        }
    }
    Ok(SelectionResult {
        chosen_set: (0..n).filter(|&i| best_mask >> i & 1 == 1).collect(),
        objective: best_bits,
        subsets_evaluated: 1usize << n,
        method: SelectionMethod::Exhaustive,
    })
}

/// Greedy subset growth seeded by the phase-1 ranking.
///
/// Collaborators are sorted by descending phase-1 rate (ties by index).
/// The seed is the largest prefix length `K` whose K-th best phase-1
/// capacity still reaches the prefix's phase-2 capacity (compared in
/// bits/s); if phase 2 always wins, phase 1 is the bottleneck everywhere
/// and the seed is the full set. From the seed, next-ranked collaborators
/// join one at a time while the objective strictly improves. The result
/// is kept only if it beats direct transmission.
pub fn greedy_select<F, P2>(
    phase1_rates: &[F],
    phase2_eval: &P2,
    b1: F,
    b2: F,
    objective: GreedyObjective,
) -> Result<SelectionResult<F>>
where
    F: Real,
    P2: Fn(&[usize]) -> Result<F>,
{
    let n = phase1_rates.len();
    let baseline_bits = b2 * phase2_eval(&[])?;
    let mut evaluated = 1usize;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        phase1_rates[b]
            .partial_cmp(&phase1_rates[a])
            .unwrap()
            .then(a.cmp(&b))
    });

    let score = |t: &DmimoThroughput<F>| match objective {
        GreedyObjective::HarmonicBits => t.bits_delivered,
        GreedyObjective::MinRate => t.c1.min(t.c2),
    };

    // Seed: largest K with B1 * R_(K) >= B2 * R2(top-K).
    let mut seed_len = n;
    let mut prefix: Vec<usize> = Vec::with_capacity(n);
    if n > 0 {
        let mut found = None;
        for k in (1..=n).rev() {
            prefix.clear();
            prefix.extend_from_slice(&order[..k]);
            prefix.sort_unstable();
            let r2 = phase2_eval(&prefix)?;
            evaluated += 1;
            if b1 * phase1_rates[order[k - 1]] >= b2 * r2 {
                found = Some(k);
                break;
            }
        }
        seed_len = found.unwrap_or(n);
    }

    let mut current: Vec<usize> = order[..seed_len].to_vec();
    current.sort_unstable();
    let mut current_through = if current.is_empty() {
        None
    } else {
        Some(subset_throughput(
            &current,
            phase1_rates,
            phase2_eval,
            b1,
            b2,
            baseline_bits,
        )?)
    };
    if seed_len > 0 {
        evaluated += 1;
    }

    for &next in &order[seed_len..] {
        let mut candidate = current.clone();
        candidate.push(next);
        candidate.sort_unstable();
        let through = subset_throughput(
            &candidate,
            phase1_rates,
            phase2_eval,
            b1,
            b2,
            baseline_bits,
        )?;
        evaluated += 1;
        let improves = match &current_through {
            Some(prev) => score(&through) > score(prev),
            None => true,
        };
        if !improves {
            break;
        }
        current = candidate;
        current_through = Some(through);
    }

    let final_bits = current_through
        .as_ref()
        .map(|t| t.bits_delivered)
        .unwrap_or(baseline_bits);
    if current_through.is_none() || final_bits <= baseline_bits {
        return Ok(SelectionResult {
            chosen_set: Vec::new(),
            objective: baseline_bits,
            subsets_evaluated: evaluated,
            method: SelectionMethod::Greedy,
        });
    }
    Ok(SelectionResult {
        chosen_set: current,
        objective: final_bits,
        subsets_evaluated: evaluated,
        method: SelectionMethod::Greedy,
    })
}
