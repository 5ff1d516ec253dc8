//! Array manifold separation: a(theta) = G v(theta).
//!
//! Each manifold entry exp(j z_n cos theta) with z_n = 2 pi r_n / lambda
//! is expanded in integer harmonics of theta with Bessel-function weights;
//! truncating at order I turns the physical manifold into the product of an
//! N x (2I+1) sampling matrix G (geometry only) and a length-(2I+1)
//! Vandermonde vector v(theta) = [e^{-jI theta}, ..., 1, ..., e^{jI theta}],
//! the manifold of a virtual uniform array.

use std::f64::consts::PI;

use ndarray::prelude::*;

use crate::bessel::{bessel_j_sequence, order_for_tail_tolerance};
use crate::geometry::ArrayGeometry;
use crate::{C64, DoaError, Result};

/// Default tail tolerance used when building a sampling matrix for the
/// estimation pipeline; keeps ||G v(theta) - a(theta)||_inf comfortably
/// below 1e-6 for any geometry.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

/// The N x (2I+1) manifold-separation matrix.
#[derive(Debug, Clone)]
pub struct SamplingMatrix {
    g: Array2<C64>,
    truncation_order: usize,
}

impl SamplingMatrix {
    pub fn matrix(&self) -> &Array2<C64> {
        &self.g
    }

    pub fn truncation_order(&self) -> usize {
        self.truncation_order
    }

    /// Number of virtual elements, 2I + 1 (always odd).
    pub fn n_virtual(&self) -> usize {
        2 * self.truncation_order + 1
    }

    pub fn n_physical(&self) -> usize {
        self.g.nrows()
    }

    /// Serialize as the text matrix format: header "N N_v", then one row
    /// per line of "re im" pairs.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n_physical(), self.n_virtual());
        for row in self.g.rows() {
            let cells: Vec<String> = row.iter().map(|c| format!("{:.17e} {:.17e}", c.re, c.im)).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parse the text matrix format (e.g. an EADF-measured matrix).
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| DoaError::domain("empty sampling-matrix file"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| DoaError::domain(format!("bad header {header:?}"))))
            .collect::<Result<_>>()?;
        if dims.len() != 2 {
            return Err(DoaError::domain("header must be \"N N_v\""));
        }
        let (n, nv) = (dims[0], dims[1]);
        if nv % 2 == 0 || nv < 3 {
            return Err(DoaError::domain("N_v must be odd and >= 3"));
        }
        let mut g = Array2::<C64>::zeros((n, nv));
        for (i, line) in lines.enumerate() {
            if i >= n {
                return Err(DoaError::domain("more matrix rows than the header declares"));
            }
            let nums: Vec<f64> = line
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| DoaError::domain(format!("row {}: bad number {t:?}", i + 1)))
                })
                .collect::<Result<_>>()?;
            if nums.len() != 2 * nv {
                return Err(DoaError::domain(format!(
                    "row {}: expected {} numbers, got {}",
                    i + 1,
                    2 * nv,
                    nums.len()
                )));
            }
            for k in 0..nv {
                g[(i, k)] = C64::new(nums[2 * k], nums[2 * k + 1]);
            }
        }
        Ok(SamplingMatrix {
            g,
            truncation_order: (nv - 1) / 2,
        })
    }
}

/// J_order(argument) for integer (possibly negative) order.
pub fn bessel_j(order: i64, argument: f64) -> f64 {
    crate::bessel::bessel_j(order, argument)
}

/// Minimal truncation order satisfying the strict separation bound
/// I > 2 pi D / lambda: floor(2 pi D / lambda) + 1.
///
/// This is the smallest admissible order, not an accuracy guarantee; the
/// discarded Bessel tail still carries O(0.1) weight right above the bound.
/// Pipelines that need a faithful manifold should use
/// [`truncation_order_for_tolerance`].
pub fn default_truncation_order(geometry: &ArrayGeometry) -> usize {
    let z = 2.0 * PI * geometry.aperture() / geometry.wavelength();
    z.floor() as usize + 1
}

/// Smallest truncation order whose Bessel tail keeps every entry of
/// G v(theta) within `tol` of the true manifold. Always >= the minimal
/// bound of [`default_truncation_order`].
pub fn truncation_order_for_tolerance(geometry: &ArrayGeometry, tol: f64) -> usize {
    let z = 2.0 * PI * geometry.aperture() / geometry.wavelength();
    order_for_tail_tolerance(z, tol)
}

/// Build the sampling matrix at the given truncation order:
/// G[n, i + I] = j^i J_i(2 pi r_n / lambda), i = -I..I.
///
/// Orders below the minimal separation bound are accepted (useful for
/// studying the truncation error) but logged as a warning.
pub fn sampling_matrix(geometry: &ArrayGeometry, order: usize) -> Result<SamplingMatrix> {
    if order < 1 {
        return Err(DoaError::domain("truncation order must be >= 1"));
    }
    if order < default_truncation_order(geometry) {
        log::warn!(
            "truncation order {} is below the separation bound {}; reconstruction will be poor",
            order,
            default_truncation_order(geometry)
        );
    }
    let n = geometry.n_elements();
    let nv = 2 * order + 1;
    let mut g = Array2::<C64>::zeros((n, nv));
    let scale = 2.0 * PI / geometry.wavelength();
    for (row, &r) in geometry.positions().iter().enumerate() {
        let z = scale * r;
        let seq = bessel_j_sequence(order, z);
        for i in 0..=(order as i64) {
            // j^i J_i and the mirrored entry j^{-i} J_{-i} = j^i J_i.
            let w = jpow(i) * seq[i as usize];
            g[(row, (order as i64 + i) as usize)] = w;
            g[(row, (order as i64 - i) as usize)] = w;
        }
    }
    Ok(SamplingMatrix {
        g,
        truncation_order: order,
    })
}

/// j^i for integer i (period 4).
fn jpow(i: i64) -> C64 {
    match i.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// v(theta): entries exp(j theta i), i = -I..I.
pub fn virtual_vandermonde(angle: f64, order: usize) -> Array1<C64> {
    let nv = 2 * order + 1;
    let mut v = Array1::<C64>::zeros(nv);
    for i in 0..nv {
        let k = i as i64 - order as i64;
        v[i] = C64::from_polar(1.0, angle * k as f64);
    }
    v
}
