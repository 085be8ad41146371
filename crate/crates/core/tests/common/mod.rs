//! Independent oracles shared by the acceptance tests. Everything here
//! recomputes results from first principles, on purpose avoiding the
//! closed-form and eigenvalue routes the library itself uses.

use dmimo_core::linalg::CMatrix;
use dmimo_core::waterfill::PowerAllocation;
use num_complex::Complex;

/// Water-filling capacity by scanning candidate water levels on a fixed
/// grid. The scan only picks which channels are active; the level is then
/// balanced exactly so the budget comparison is not polluted by grid
/// quantization.
pub fn grid_waterfill_capacity(eigenvalues: &[f64], total_power: f64, snr_scale: f64, step: f64) -> f64 {
    let inv_gains: Vec<f64> = eigenvalues.iter().map(|&l| 1.0 / (snr_scale * l)).collect();
    let spend = |mu: f64| -> f64 { inv_gains.iter().map(|&a| (mu - a).max(0.0)).sum() };

    let lowest = inv_gains.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut mu = (lowest / step).floor() * step;
    while spend(mu) < total_power {
        mu += step;
    }
    let active: Vec<usize> = (0..eigenvalues.len()).filter(|&i| mu > inv_gains[i]).collect();
    let exact_mu =
        (total_power + active.iter().map(|&i| inv_gains[i]).sum::<f64>()) / active.len() as f64;
    active
        .iter()
        .map(|&i| {
            let p = (exact_mu - inv_gains[i]).max(0.0);
            (1.0 + snr_scale * eigenvalues[i] * p).log2()
        })
        .sum()
}

/// Largest violation of the water-filling optimality conditions for a
/// returned allocation: budget exhaustion, a common level across powered
/// channels, and no level headroom on starved ones.
pub fn waterfill_kkt_residual(
    eigenvalues: &[f64],
    total_power: f64,
    snr_scale: f64,
    alloc: &PowerAllocation<f64>,
) -> f64 {
    let mut residual = (alloc.powers.iter().sum::<f64>() - total_power).abs();
    for (&l, &p) in eigenvalues.iter().zip(&alloc.powers) {
        let inv = 1.0 / (snr_scale * l);
        residual = residual.max(-p);
        if p > 0.0 {
            residual = residual.max((p + inv - alloc.water_level).abs());
        } else {
            residual = residual.max(alloc.water_level - inv);
        }
    }
    residual
}

/// `log2 |I + s * M M^H|` through an LU factorization with partial
/// pivoting, the plain determinant reading of the capacity expression.
pub fn lu_logdet_capacity(m: &CMatrix<f64>, snr_scale: f64) -> f64 {
    let n = m.nrows();
    let mh = m.mapv(|z| z.conj()).reversed_axes();
    let gram = m.dot(&mh);
    let mut a: Vec<Vec<Complex<f64>>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let eye = if r == c { 1.0 } else { 0.0 };
                    Complex::new(eye, 0.0) + gram[[r, c]].scale(snr_scale)
                })
                .collect()
        })
        .collect();

    let mut log2_abs_det = 0.0;
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| a[i][k].norm().partial_cmp(&a[j][k].norm()).unwrap())
            .unwrap();
        a.swap(k, pivot);
        log2_abs_det += a[k][k].norm().log2();
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                let sub = f * a[k][j];
                a[i][j] -= sub;
            }
        }
    }
    log2_abs_det
}

/// Coefficient of determination of the least-squares line through the
/// points.
pub fn linear_fit_r_squared(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    1.0 - ss_res / ss_tot
}
