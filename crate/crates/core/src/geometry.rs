//! Array geometry, steering vectors, and synthetic snapshot generation.

use std::f64::consts::PI;

use ndarray::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{C64, DoaError, Result};

/// Positions of a linear array's elements, in meters, plus the operating
/// wavelength. The first element is the phase reference at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    positions: Vec<f64>,
    wavelength: f64,
}

impl ArrayGeometry {
    pub fn new(positions: Vec<f64>, wavelength: f64) -> Result<Self> {
        if positions.len() < 2 {
            return Err(DoaError::domain("need at least two elements"));
        }
        if !(wavelength > 0.0) || !wavelength.is_finite() {
            return Err(DoaError::domain("wavelength must be positive and finite"));
        }
        if positions[0] != 0.0 {
            return Err(DoaError::domain("first element must sit at the origin"));
        }
        if positions.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(DoaError::domain("positions must be finite and non-negative"));
        }
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DoaError::domain("positions must be strictly increasing"));
        }
        Ok(Self {
            positions,
            wavelength,
        })
    }

    pub fn n_elements(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Aperture D = max(positions).
    pub fn aperture(&self) -> f64 {
        *self.positions.last().unwrap()
    }

    /// Parse a geometry file: one element position (meters) per line,
    /// blank lines and `#` comments ignored.
    pub fn from_text(text: &str, wavelength: f64) -> Result<Self> {
        let mut positions = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let value: f64 = line.parse().map_err(|_| {
                DoaError::domain(format!(
                    "geometry line {}: cannot parse {:?} as a position",
                    lineno + 1,
                    line
                ))
            })?;
            positions.push(value);
        }
        ArrayGeometry::new(positions, wavelength)
    }

    /// Serialize to the geometry file format.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# element positions in meters, one per line\n");
        for p in &self.positions {
            out.push_str(&format!("{:.17e}\n", p));
        }
        out
    }
}

/// Targets as (complex reflectivity, angle) pairs plus the noise level.
#[derive(Debug, Clone)]
pub struct Scene {
    targets: Vec<(C64, f64)>,
    snr_db: Option<f64>,
}

impl Scene {
    /// `snr_db = None` means a noiseless scene.
    pub fn new(targets: Vec<(C64, f64)>, snr_db: Option<f64>) -> Result<Self> {
        if targets.is_empty() {
            return Err(DoaError::domain("scene needs at least one target"));
        }
        for &(_, angle) in &targets {
            if !(angle > 0.0 && angle < PI) {
                return Err(DoaError::domain(format!(
                    "target angle {angle} outside the open interval (0, pi)"
                )));
            }
        }
        for w in 0..targets.len() {
            for v in w + 1..targets.len() {
                if targets[w].1 == targets[v].1 {
                    return Err(DoaError::domain("target angles must be distinct"));
                }
            }
        }
        Ok(Self { targets, snr_db })
    }

    pub fn targets(&self) -> &[(C64, f64)] {
        &self.targets
    }

    pub fn angles(&self) -> Vec<f64> {
        self.targets.iter().map(|t| t.1).collect()
    }

    pub fn k_targets(&self) -> usize {
        self.targets.len()
    }

    pub fn snr_db(&self) -> Option<f64> {
        self.snr_db
    }
}

/// One complex sample per array element.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub samples: Array1<C64>,
    /// Per-element noise standard deviation used during synthesis, when known.
    pub noise_sigma: Option<f64>,
}

impl Snapshot {
    pub fn new(samples: Array1<C64>) -> Self {
        Self {
            samples,
            noise_sigma: None,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// a(theta): entry n is exp(j 2 pi (r_n / lambda) cos(theta)).
pub fn steering_vector(geometry: &ArrayGeometry, angle: f64) -> Result<Array1<C64>> {
    if !(angle > 0.0 && angle < PI) {
        return Err(DoaError::domain(format!(
            "steering angle {angle} outside (0, pi)"
        )));
    }
    Ok(steering_vector_unchecked(geometry, angle))
}

pub(crate) fn steering_vector_unchecked(geometry: &ArrayGeometry, angle: f64) -> Array1<C64> {
    let cos = angle.cos();
    let scale = 2.0 * PI / geometry.wavelength;
    Array1::from_iter(
        geometry
            .positions
            .iter()
            .map(|&r| C64::from_polar(1.0, scale * r * cos)),
    )
}

/// Noise-free array response of a scene: sum_k c_k a(theta_k).
pub fn clean_response(geometry: &ArrayGeometry, scene: &Scene) -> Array1<C64> {
    let mut x = Array1::<C64>::zeros(geometry.n_elements());
    for &(c, angle) in scene.targets() {
        x = x + steering_vector_unchecked(geometry, angle).mapv(|a| a * c);
    }
    x
}

/// x = sum_k c_k a(theta_k) + n, with circularly-symmetric complex Gaussian
/// noise scaled so that 10 log10(||signal||^2 / E||n||^2) equals the scene
/// SNR. Deterministic for a given seed.
pub fn synthesize_snapshot(geometry: &ArrayGeometry, scene: &Scene, seed: u64) -> Snapshot {
    let clean = clean_response(geometry, scene);
    match scene.snr_db() {
        None => Snapshot {
            samples: clean,
            noise_sigma: Some(0.0),
        },
        Some(snr_db) => {
            let n = geometry.n_elements();
            let signal_power: f64 = clean.iter().map(|c| c.norm_sqr()).sum();
            let noise_power = signal_power * 10f64.powf(-snr_db / 10.0);
            let sigma = (noise_power / n as f64).sqrt();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let per_part = sigma / 2f64.sqrt();
            let noise = Array1::from_iter(
                (0..n).map(|_| C64::new(gauss(&mut rng) * per_part, gauss(&mut rng) * per_part)),
            );
            Snapshot {
                samples: clean + noise,
                noise_sigma: Some(sigma),
            }
        }
    }
}

/// Standard normal via Box-Muller, driven by the seeded stream.
fn gauss<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u1: f64 = rng.gen::<f64>();
        let u2: f64 = rng.gen::<f64>();
        if u1 > f64::MIN_POSITIVE {
            return (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos();
        }
    }
}

/// Uniform array: positions [0, d, ..., (N-1) d].
pub fn make_ula(n_elements: usize, spacing: f64, wavelength: f64) -> Result<ArrayGeometry> {
    if n_elements < 2 {
        return Err(DoaError::domain("ULA needs at least two elements"));
    }
    if !(spacing > 0.0) {
        return Err(DoaError::domain("ULA spacing must be positive"));
    }
    ArrayGeometry::new(
        (0..n_elements).map(|i| i as f64 * spacing).collect(),
        wavelength,
    )
}

/// Random non-uniform array with both endpoints pinned at 0 and `aperture`,
/// interior elements displaced from the uniform grid by uniform offsets
/// rescaled so the location deviation hits `target_ld` exactly. Draws are
/// rejected until the positions are strictly increasing.
pub fn make_perturbed_nla(
    n_elements: usize,
    aperture: f64,
    target_ld: f64,
    wavelength: f64,
    seed: u64,
) -> Result<ArrayGeometry> {
    if n_elements < 2 {
        return Err(DoaError::domain("need at least two elements"));
    }
    if !(aperture > 0.0) {
        return Err(DoaError::domain("aperture must be positive"));
    }
    if !(target_ld >= 0.0) {
        return Err(DoaError::domain("location deviation must be >= 0"));
    }
    let spacing = aperture / (n_elements - 1) as f64;
    let ula: Vec<f64> = (0..n_elements).map(|i| i as f64 * spacing).collect();
    if target_ld == 0.0 || n_elements == 2 {
        if target_ld > 0.0 {
            return Err(DoaError::Construction(
                "a two-element array with pinned endpoints cannot deviate".into(),
            ));
        }
        return ArrayGeometry::new(ula, wavelength);
    }

    const MAX_TRIES: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let interior = n_elements - 2;
    for _ in 0..MAX_TRIES {
        let draws: Vec<f64> = (0..interior).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm: f64 = draws.iter().map(|w| w * w).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let beta = target_ld * spacing * (n_elements as f64).sqrt() / norm;
        let mut positions = ula.clone();
        for (i, w) in draws.iter().enumerate() {
            positions[i + 1] += beta * w;
        }
        if positions.windows(2).all(|w| w[1] > w[0]) {
            return ArrayGeometry::new(positions, wavelength);
        }
    }
    Err(DoaError::Construction(format!(
        "no strictly increasing draw for LD={target_ld} after {MAX_TRIES} attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::location_deviation;
    use approx::assert_abs_diff_eq;

    const LAMBDA: f64 = 3.868e-3;

    #[test]
    fn broadside_steering_is_all_ones() {
        let g = make_ula(8, LAMBDA / 2.0, LAMBDA).unwrap();
        let a = steering_vector(&g, PI / 2.0).unwrap();
        for v in a.iter() {
            assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_element_analytic_value() {
        // positions [0, lambda/2], angle pi/3 -> [1, exp(j pi/2)] = [1, j]
        let g = make_ula(2, LAMBDA / 2.0, LAMBDA).unwrap();
        let a = steering_vector(&g, PI / 3.0).unwrap();
        assert_abs_diff_eq!(a[0].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(a[1].re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(a[1].im, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn steering_matches_elementwise_oracle() {
        // Brute-force elementwise exponential on a random LD=0.3 NLA.
        let g = make_perturbed_nla(16, 29.0e-3, 0.3, LAMBDA, 5).unwrap();
        let angle = 1.234;
        let a = steering_vector(&g, angle).unwrap();
        for (n, &r) in g.positions().iter().enumerate() {
            let phase = 2.0 * PI * r / LAMBDA * angle.cos();
            let want = C64::new(phase.cos(), phase.sin());
            assert!((a[n] - want).norm() < 1e-12);
        }
        assert_abs_diff_eq!(a[0].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn steering_rejects_boundary_angles() {
        let g = make_ula(4, 1e-3, LAMBDA).unwrap();
        assert!(steering_vector(&g, 0.0).is_err());
        assert!(steering_vector(&g, PI).is_err());
        assert!(steering_vector(&g, -0.3).is_err());
    }

    #[test]
    fn noiseless_single_target_equals_steering() {
        let g = make_ula(16, LAMBDA / 2.0, LAMBDA).unwrap();
        let scene = Scene::new(vec![(C64::new(1.0, 0.0), 1.0)], None).unwrap();
        let snap = synthesize_snapshot(&g, &scene, 0);
        let a = steering_vector(&g, 1.0).unwrap();
        for (s, w) in snap.samples.iter().zip(a.iter()) {
            assert!((s - w).norm() == 0.0);
        }
    }

    #[test]
    fn noiseless_two_targets_linear() {
        let g = make_ula(16, LAMBDA / 2.0, LAMBDA).unwrap();
        let c1 = C64::new(0.7, -0.2);
        let c2 = C64::new(-1.1, 0.4);
        let scene = Scene::new(vec![(c1, 1.0), (c2, 2.0)], None).unwrap();
        let snap = synthesize_snapshot(&g, &scene, 0);
        let want = steering_vector(&g, 1.0).unwrap().mapv(|a| a * c1)
            + steering_vector(&g, 2.0).unwrap().mapv(|a| a * c2);
        for (s, w) in snap.samples.iter().zip(want.iter()) {
            assert!((s - w).norm() < 1e-14);
        }
    }

    #[test]
    fn snapshot_reproducible_from_seed() {
        let g = make_ula(16, LAMBDA / 2.0, LAMBDA).unwrap();
        let scene = Scene::new(vec![(C64::new(1.0, 0.0), 1.3)], Some(20.0)).unwrap();
        let a = synthesize_snapshot(&g, &scene, 42);
        let b = synthesize_snapshot(&g, &scene, 42);
        assert_eq!(a.samples, b.samples);
        let c = synthesize_snapshot(&g, &scene, 43);
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn empirical_snr_matches_requested() {
        // Monte-Carlo noise-power estimate over many seeds.
        let g = make_ula(16, LAMBDA / 2.0, LAMBDA).unwrap();
        let scene = Scene::new(vec![(C64::new(1.0, 0.0), 1.3)], Some(30.0)).unwrap();
        let clean = clean_response(&g, &scene);
        let ps: f64 = clean.iter().map(|c| c.norm_sqr()).sum();
        let mut pn = 0.0;
        let trials = 1000;
        for seed in 0..trials {
            let snap = synthesize_snapshot(&g, &scene, seed);
            pn += (&snap.samples - &clean)
                .iter()
                .map(|c| c.norm_sqr())
                .sum::<f64>();
        }
        let snr = 10.0 * (ps / (pn / trials as f64)).log10();
        assert!((snr - 30.0).abs() < 0.5, "empirical SNR {snr} dB");
    }

    #[test]
    fn ula_aperture() {
        let g = make_ula(16, LAMBDA / 2.0, LAMBDA).unwrap();
        assert_abs_diff_eq!(g.aperture(), 7.5 * LAMBDA, epsilon = 1e-15);
        let g2 = make_ula(2, 0.01, LAMBDA).unwrap();
        assert_eq!(g2.positions(), &[0.0, 0.01]);
        assert!(make_ula(1, 0.01, LAMBDA).is_err());
        assert!(make_ula(4, 0.0, LAMBDA).is_err());
    }

    #[test]
    fn perturbed_nla_hits_requested_ld() {
        let d = 29.0e-3 / 15.0;
        let ula = make_ula(16, d, LAMBDA).unwrap();
        for seed in 0..20 {
            let g = make_perturbed_nla(16, 29.0e-3, 0.3, LAMBDA, seed).unwrap();
            let ld = location_deviation(&g, &ula).unwrap();
            assert_abs_diff_eq!(ld, 0.3, epsilon = 1e-9);
            assert_abs_diff_eq!(g.aperture(), 29.0e-3, epsilon = 1e-15);
        }
    }

    #[test]
    fn perturbed_nla_zero_ld_is_ula() {
        let g = make_perturbed_nla(16, 29.0e-3, 0.0, LAMBDA, 7).unwrap();
        let ula = make_ula(16, 29.0e-3 / 15.0, LAMBDA).unwrap();
        assert_eq!(g.positions(), ula.positions());
    }

    #[test]
    fn perturbed_nla_strictly_increasing_many_seeds() {
        for seed in 0..1000 {
            let g = make_perturbed_nla(16, 29.0e-3, 0.3, LAMBDA, seed).unwrap();
            assert!(g.positions().windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn geometry_text_roundtrip() {
        let g = make_perturbed_nla(12, 0.02, 0.2, LAMBDA, 3).unwrap();
        let text = g.to_text();
        let g2 = ArrayGeometry::from_text(&text, LAMBDA).unwrap();
        assert_eq!(g.positions(), g2.positions());
        assert!(ArrayGeometry::from_text("0.0\nnot_a_number\n", LAMBDA).is_err());
    }

    #[test]
    fn scene_validation() {
        assert!(Scene::new(vec![], None).is_err());
        assert!(Scene::new(vec![(C64::new(1.0, 0.0), 0.0)], None).is_err());
        assert!(Scene::new(vec![(C64::new(1.0, 0.0), PI)], None).is_err());
        assert!(
            Scene::new(vec![(C64::new(1.0, 0.0), 1.0), (C64::new(1.0, 0.0), 1.0)], None).is_err()
        );
    }
}
