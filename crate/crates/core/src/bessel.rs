//! Integer-order Bessel functions of the first kind.
//!
//! Values are produced by Miller's downward recurrence with normalization:
//! the three-term recurrence J_{k-1}(z) = (2k/z) J_k(z) - J_{k+1}(z) is run
//! from a start order well above both the requested order and the argument
//! (where the trial sequence decays) down to zero, and the whole sequence is
//! scaled with the identity J_0(z) + 2 * sum_{k>=1} J_{2k}(z) = 1. Running
//! downward is stable because J is the minimal solution of the recurrence.

/// J_n(z) for all n = 0..=max_order at a single argument z >= 0.
///
/// Negative orders follow from the parity identity J_{-n}(z) = (-1)^n J_n(z)
/// and are not stored.
pub fn bessel_j_sequence(max_order: usize, z: f64) -> Vec<f64> {
    assert!(z >= 0.0 && z.is_finite(), "argument must be finite and >= 0");
    if z == 0.0 {
        let mut out = vec![0.0; max_order + 1];
        out[0] = 1.0;
        return out;
    }
    if z < 1e-4 {
        return small_argument_series(max_order, z);
    }

    // Start far enough above max(order, z) that the downward trial sequence
    // has fully entered the decaying regime; the start region scales with
    // the Airy transition width z^(1/3).
    let zc = z.max(1.0);
    let start = (max_order as f64).max(z) + 12.0 * zc.cbrt() + 30.0;
    let start = start.ceil() as usize;
    // Even start keeps the normalization sum aligned.
    let start = start + (start % 2);

    let mut seq = vec![0.0f64; start + 2];
    seq[start + 1] = 0.0;
    seq[start] = f64::MIN_POSITIVE.sqrt(); // arbitrary tiny seed
    let mut norm = 0.0f64;
    for k in (1..=start).rev() {
        seq[k - 1] = (2.0 * k as f64 / z) * seq[k] - seq[k + 1];
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * seq[k - 1];
        }
        // Rescale if the trial values threaten overflow.
        if seq[k - 1].abs() > 1e250 {
            let s = 1e-250;
            for v in seq[k - 1..].iter_mut() {
                *v *= s;
            }
            norm *= s;
        }
    }
    norm += seq[0];
    let scale = 1.0 / norm;
    seq.truncate(max_order + 1);
    for v in &mut seq {
        *v *= scale;
    }
    // Pad when max_order exceeded the computed range (cannot happen: start > max_order).
    seq
}

/// J_order(z) for a single (possibly negative) integer order.
pub fn bessel_j(order: i64, z: f64) -> f64 {
    let n = order.unsigned_abs() as usize;
    let v = bessel_j_sequence(n, z)[n];
    if order < 0 && order % 2 != 0 {
        -v
    } else {
        v
    }
}

/// Power-series evaluation, accurate only for small z; used below the
/// recurrence cutoff and as an independent cross-check in tests.
fn small_argument_series(max_order: usize, z: f64) -> Vec<f64> {
    (0..=max_order).map(|n| series_jn(n, z)).collect()
}

fn series_jn(n: usize, z: f64) -> f64 {
    // J_n(z) = sum_m (-1)^m (z/2)^(n+2m) / (m! (n+m)!)
    let half = z / 2.0;
    let mut term = 1.0f64;
    for k in 1..=n {
        term *= half / k as f64;
        if term == 0.0 {
            return 0.0;
        }
    }
    let mut sum = term;
    let z2 = half * half;
    for m in 1..40 {
        term *= -z2 / (m as f64 * (n + m) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Smallest truncation order I whose discarded Bessel tail at argument
/// z_max keeps every reconstructed manifold entry within `tol`:
/// |sum_{|i|>I} j^i J_i(z) e^{j i theta}| <= 2 * sum_{i>I} |J_i(z)| <= tol.
///
/// The returned order always satisfies the strict bound I > z_max.
pub fn order_for_tail_tolerance(z_max: f64, tol: f64) -> usize {
    assert!(z_max >= 0.0 && tol > 0.0);
    let floor_min = z_max.floor() as usize + 1;
    let hi = (z_max + 14.0 * z_max.max(1.0).cbrt() + 40.0).ceil() as usize;
    let seq = bessel_j_sequence(hi, z_max);
    // tail[i] = 2 * sum_{k >= i} |J_k|
    let mut tail = vec![0.0f64; hi + 2];
    for i in (0..=hi).rev() {
        tail[i] = tail[i + 1] + 2.0 * seq[i].abs();
    }
    for order in floor_min..=hi {
        if tail[order + 1] <= tol {
            return order;
        }
    }
    hi
}
