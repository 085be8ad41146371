//! Water-filling power allocation across parallel eigenchannels.

use crate::error::{Error, Result};
use crate::real::Real;

/// Eigenvalues this far below the strongest one count as unusable.
const EIGENVALUE_FLOOR: f64 = 1e-12;

/// Result of a water-filling allocation.
#[derive(Debug, Clone)]
pub struct PowerAllocation<F: Real> {
    /// Per-channel power, aligned with the input eigenvalue order.
    pub powers: Vec<F>,
    /// Water level; every active channel satisfies `p_i = level - 1/(s * lambda_i)`.
    pub water_level: F,
    /// Sum rate `sum log2(1 + s * lambda_i * p_i)` in bits/s/Hz.
    pub capacity: F,
}

/// Optimal power split of `total_power` over channels with the given
/// eigenvalues, each seen at SNR `snr_scale * lambda_i * p_i`.
///
/// Channels whose eigenvalue falls below `1e-12` of the strongest are
/// treated as zero. The allocation spends the whole budget whenever at
/// least one channel is usable; if none is, the channel matrix carried no
/// energy and the call fails with [`Error::UnusableChannel`].
pub fn water_fill<F: Real>(
    eigenvalues: &[F],
    total_power: F,
    snr_scale: F,
) -> Result<PowerAllocation<F>> {
    if !(snr_scale > F::zero()) || !snr_scale.is_finite() {
        return Err(Error::InvalidInput(format!(
            "snr_scale must be positive and finite, got {snr_scale}"
        )));
    }
    if !(total_power >= F::zero()) || !total_power.is_finite() {
        return Err(Error::InvalidInput(format!(
            "total_power must be non-negative and finite, got {total_power}"
        )));
    }
    let mut max_eig = F::zero();
    for &l in eigenvalues {
        if !l.is_finite() {
            return Err(Error::NonFinite);
        }
        if l < F::zero() {
            return Err(Error::InvalidInput(format!("negative eigenvalue {l}")));
        }
        max_eig = max_eig.max(l);
    }
    if max_eig == F::zero() {
        return Err(Error::UnusableChannel);
    }

    let floor = max_eig * F::of(EIGENVALUE_FLOOR);
    // Inverse gains of the usable channels, ascending (strongest first).
    let mut active: Vec<(usize, F)> = eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > floor)
        .map(|(i, &l)| (i, (snr_scale * l).recip()))
        .collect();
    if active.is_empty() {
        return Err(Error::UnusableChannel);
    }
    active.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());

    // Walk down from the full active set: the water level for k channels is
    // (P + sum of their inverse gains) / k, valid once it covers the k-th.
    let mut level = F::zero();
    let mut kept = 0;
    let mut inv_sum: F = active.iter().map(|&(_, inv)| inv).sum();
    for k in (1..=active.len()).rev() {
        level = (total_power + inv_sum) / F::of(k as f64);
        if level >= active[k - 1].1 {
            kept = k;
            break;
        }
        inv_sum -= active[k - 1].1;
    }
    debug_assert!(kept >= 1, "the strongest channel always gets power");

    let mut powers = vec![F::zero(); eigenvalues.len()];
    for &(idx, inv) in active.iter().take(kept) {
        powers[idx] = (level - inv).max(F::zero());
    }
    let capacity = sum_rate(eigenvalues, &powers, snr_scale)?;
    Ok(PowerAllocation {
        powers,
        water_level: level,
        capacity,
    })
}

/// Sum rate `sum log2(1 + snr_scale * lambda_i * p_i)` for a given allocation.
pub fn sum_rate<F: Real>(eigenvalues: &[F], powers: &[F], snr_scale: F) -> Result<F> {
    if eigenvalues.len() != powers.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} eigenvalues vs {} powers",
            eigenvalues.len(),
            powers.len()
        )));
    }
    let mut rate = F::zero();
    for (&l, &p) in eigenvalues.iter().zip(powers) {
        rate += (F::one() + snr_scale * l * p).log2();
    }
    if !rate.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(rate)
}
