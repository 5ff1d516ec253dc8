//! Evaluation metrics: RMSE, success rate, location deviation, resolution
//! constants, and a single-snapshot CRLB reference curve.

use ndarray::prelude::*;

use crate::geometry::{ArrayGeometry, Scene, steering_vector_unchecked};
use crate::{DoaError, Result};

/// Outcome of one Monte-Carlo trial. Estimated and ground-truth angles are
/// matched by minimum-cost assignment before any error is computed.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub estimated: Vec<f64>,
    pub truth: Vec<f64>,
    /// Per-target absolute errors after matching, same order as `truth`.
    pub matched_errors: Vec<f64>,
    pub max_abs_error: f64,
    pub runtime_s: f64,
}

impl TrialResult {
    /// Match `estimated` against `truth` (optimal assignment on absolute
    /// angle error). A missing estimate counts as the worst possible error
    /// (pi), so failed trials weigh into RMSE instead of vanishing.
    pub fn new(estimated: Vec<f64>, truth: Vec<f64>, runtime_s: f64) -> Self {
        let matched_errors = match_errors(&estimated, &truth);
        let max_abs_error = matched_errors.iter().cloned().fold(0.0, f64::max);
        TrialResult {
            estimated,
            truth,
            matched_errors,
            max_abs_error,
            runtime_s,
        }
    }
}

/// Optimal-assignment absolute errors of `estimated` against `truth`.
/// K is small here, so exhaustive permutation search is exact and cheap.
pub fn match_errors(estimated: &[f64], truth: &[f64]) -> Vec<f64> {
    let k = truth.len();
    if estimated.is_empty() {
        return vec![std::f64::consts::PI; k];
    }
    let mut idx: Vec<usize> = (0..estimated.len()).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    permute(&mut idx, 0, &mut |perm| {
        let errs: Vec<f64> = truth
            .iter()
            .enumerate()
            .map(|(i, t)| {
                perm.get(i)
                    .map(|&j| (estimated[j] - t).abs())
                    .unwrap_or(std::f64::consts::PI)
            })
            .collect();
        let cost: f64 = errs.iter().map(|e| e * e).sum();
        if best.as_ref().map_or(true, |(b, _)| cost < *b) {
            best = Some((cost, errs));
        }
    });
    best.unwrap().1
}

fn permute(idx: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start >= idx.len() {
        visit(idx);
        return;
    }
    for i in start..idx.len() {
        idx.swap(start, i);
        permute(idx, start + 1, visit);
        idx.swap(start, i);
    }
}

/// Root mean square angle error over all trials and targets:
/// sqrt( sum_i ||theta_hat_i - theta_0||^2 / (MC * K) ).
pub fn rmse(trials: &[TrialResult]) -> Result<f64> {
    if trials.is_empty() {
        return Err(DoaError::domain("rmse of an empty trial list"));
    }
    let k = trials[0].truth.len();
    if trials.iter().any(|t| t.truth.len() != k) {
        return Err(DoaError::domain("trials disagree on K"));
    }
    let ss: f64 = trials
        .iter()
        .flat_map(|t| t.matched_errors.iter())
        .map(|e| e * e)
        .sum();
    Ok((ss / (trials.len() * k) as f64).sqrt())
}

/// Fraction of trials whose max matched absolute error is below gamma.
pub fn success_rate(trials: &[TrialResult], gamma: f64) -> Result<f64> {
    if trials.is_empty() {
        return Err(DoaError::domain("success rate of an empty trial list"));
    }
    if !(gamma > 0.0) {
        return Err(DoaError::domain("gamma must be positive"));
    }
    let hits = trials.iter().filter(|t| t.max_abs_error < gamma).count();
    Ok(hits as f64 / trials.len() as f64)
}

/// Location deviation of an NLA against the same-size ULA:
/// sqrt(||r - r_ula||^2 / N) / d.
pub fn location_deviation(nla: &ArrayGeometry, ula: &ArrayGeometry) -> Result<f64> {
    if nla.n_elements() != ula.n_elements() {
        return Err(DoaError::domain("arrays differ in element count"));
    }
    let d = ula.positions()[1] - ula.positions()[0];
    for (i, w) in ula.positions().windows(2).enumerate() {
        if ((w[1] - w[0]) - d).abs() > 1e-9 * d {
            return Err(DoaError::domain(format!(
                "reference array is not uniform at element {}",
                i + 1
            )));
        }
    }
    let n = nla.n_elements() as f64;
    let ss: f64 = nla
        .positions()
        .iter()
        .zip(ula.positions())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((ss / n).sqrt() / d)
}

/// Rayleigh-type resolution rho = 1.22 lambda / D and the grid interval
/// rho_s = rho / eta, both in radians.
pub fn resolution(geometry: &ArrayGeometry, eta: f64) -> Result<(f64, f64)> {
    if !(eta >= 1.0) {
        return Err(DoaError::domain("super-resolution factor eta must be >= 1"));
    }
    let rho = 1.22 * geometry.wavelength() / geometry.aperture();
    Ok((rho, rho / eta))
}

/// Deterministic single-snapshot CRLB on each target angle (radians^2).
///
/// Model: x = sum_k c_k a(theta_k) + n with known circular complex Gaussian
/// noise of per-element variance sigma^2. The Fisher information over the
/// real parameter vector (theta_1..K, Re c_1..K, Im c_1..K) is
/// F[p,q] = (2 / sigma^2) Re(d mu/d p ^H d mu/d q); the bound on theta_k is
/// the (k,k) entry of F^{-1}. Nuisance amplitude parameters are marginalized
/// by the inversion.
pub fn crlb_single_snapshot(
    geometry: &ArrayGeometry,
    scene: &Scene,
    snr_db: f64,
) -> Result<Vec<f64>> {
    use crate::C64;
    let k = scene.k_targets();
    let n = geometry.n_elements();
    let clean = crate::geometry::clean_response(geometry, scene);
    let signal_power: f64 = clean.iter().map(|c| c.norm_sqr()).sum();
    if signal_power == 0.0 {
        return Err(DoaError::domain("scene has zero signal power"));
    }
    let sigma2 = signal_power * 10f64.powf(-snr_db / 10.0) / n as f64;

    // Columns: d mu / d theta_k, d mu / d Re c_k, d mu / d Im c_k.
    let mut dm = Array2::<C64>::zeros((n, 3 * k));
    let scale = 2.0 * std::f64::consts::PI / geometry.wavelength();
    for (t, &(c, theta)) in scene.targets().iter().enumerate() {
        let a = steering_vector_unchecked(geometry, theta);
        for (row, &r) in geometry.positions().iter().enumerate() {
            let da = a[row] * C64::new(0.0, -scale * r * theta.sin());
            dm[(row, t)] = c * da;
            dm[(row, k + t)] = a[row];
            dm[(row, 2 * k + t)] = C64::new(0.0, 1.0) * a[row];
        }
    }
    let mut fisher = Array2::<f64>::zeros((3 * k, 3 * k));
    for p in 0..3 * k {
        for q in 0..3 * k {
            let dot: C64 = dm
                .column(p)
                .iter()
                .zip(dm.column(q).iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            fisher[(p, q)] = 2.0 / sigma2 * dot.re;
        }
    }
    let inv = invert_spd(&fisher).ok_or_else(|| {
        DoaError::domain("singular Fisher information (coinciding angles?)")
    })?;
    Ok((0..k).map(|t| inv[(t, t)]).collect())
}

/// Gauss-Jordan inverse with partial pivoting; None when singular.
fn invert_spd(m: &Array2<f64>) -> Option<Array2<f64>> {
    let n = m.nrows();
    let mut a = m.clone();
    let mut inv = Array2::<f64>::eye(n);
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[(r, col)].abs() > a[(piv, col)].abs() {
                piv = r;
            }
        }
        if a[(piv, col)].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                a.swap((col, j), (piv, j));
                inv.swap((col, j), (piv, j));
            }
        }
        let p = a[(col, col)];
        for j in 0..n {
            a[(col, j)] /= p;
            inv[(col, j)] /= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[(r, col)];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                a[(r, j)] -= f * a[(col, j)];
                inv[(r, j)] -= f * inv[(col, j)];
            }
        }
    }
    Some(inv)
}
