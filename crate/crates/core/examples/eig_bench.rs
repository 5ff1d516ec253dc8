use doa_core::linalg::{adjoint, eigh_ascending};
use doa_core::C64;
use ndarray::Array2;
use std::time::Instant;

fn main() {
    for &n in &[97usize, 121, 129, 139, 161] {
        let mut m = Array2::<C64>::zeros((n, n));
        let mut seed = 999u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = C64::new(next(), next());
            }
        }
        let m = &m + &adjoint(&m);
        // warmup
        let _ = eigh_ascending(&m).unwrap();
        let reps = 30;
        let t0 = Instant::now();
        for _ in 0..reps {
            let _ = eigh_ascending(&m).unwrap();
        }
        let dt = t0.elapsed().as_secs_f64() / reps as f64;
        println!("eigh({n}) = {:.2} ms", dt * 1e3);
    }
}
