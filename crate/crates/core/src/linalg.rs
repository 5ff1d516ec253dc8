//! Thin wrappers over the LAPACK-backed routines the pipeline needs.
//!
//! The hot path of the solver calls LAPACK's divide-and-conquer and MRRR
//! Hermitian eigensolvers directly (zheevd / zheevr); the backend crate only
//! exposes the slower QR driver. Both wrappers are cross-checked against the
//! backend in tests.

use ndarray::prelude::*;
use ndarray_linalg::{Eig, Eigh, LeastSquaresSvd, Norm, UPLO};

use crate::{C64, DoaError, Result};

extern "C" {
    fn zheevd_(
        jobz: *const u8,
        uplo: *const u8,
        n: *const i32,
        a: *mut C64,
        lda: *const i32,
        w: *mut f64,
        work: *mut C64,
        lwork: *const i32,
        rwork: *mut f64,
        lrwork: *const i32,
        iwork: *mut i32,
        liwork: *const i32,
        info: *mut i32,
    );
    #[allow(clippy::too_many_arguments)]
    fn zheevr_(
        jobz: *const u8,
        range: *const u8,
        uplo: *const u8,
        n: *const i32,
        a: *mut C64,
        lda: *const i32,
        vl: *const f64,
        vu: *const f64,
        il: *const i32,
        iu: *const i32,
        abstol: *const f64,
        m: *mut i32,
        w: *mut f64,
        z: *mut C64,
        ldz: *const i32,
        isuppz: *mut i32,
        work: *mut C64,
        lwork: *const i32,
        rwork: *mut f64,
        lrwork: *const i32,
        iwork: *mut i32,
        liwork: *const i32,
        info: *mut i32,
    );
}

/// Full Hermitian eigendecomposition via the divide-and-conquer driver,
/// eigenvalues ascending, eigenvectors as columns.
///
/// The row-major buffer looks like conj(A) to LAPACK's column-major view;
/// conjugating the returned vectors restores the eigenvectors of A (the
/// spectrum is real either way).
pub fn eigh_dc(m: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(DoaError::domain("eigh_dc needs a square matrix"));
    }
    let ni = n as i32;
    let mut a: Vec<C64> = m.iter().cloned().collect();
    let mut w = vec![0.0f64; n];
    let (jobz, uplo) = (b'V', b'L');
    let mut info = 0i32;
    let (mut wkopt, mut rwkopt, mut iwkopt) = (C64::new(0.0, 0.0), 0.0f64, 0i32);
    let query = -1i32;
    unsafe {
        zheevd_(
            &jobz, &uplo, &ni, a.as_mut_ptr(), &ni, w.as_mut_ptr(),
            &mut wkopt, &query, &mut rwkopt, &query, &mut iwkopt, &query, &mut info,
        );
    }
    if info != 0 {
        return Err(DoaError::Linalg(format!("zheevd workspace query failed: info={info}")));
    }
    let lwork = wkopt.re as i32;
    let lrwork = rwkopt as i32;
    let liwork = iwkopt;
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    let mut rwork = vec![0.0f64; lrwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        zheevd_(
            &jobz, &uplo, &ni, a.as_mut_ptr(), &ni, w.as_mut_ptr(),
            work.as_mut_ptr(), &lwork, rwork.as_mut_ptr(), &lrwork,
            iwork.as_mut_ptr(), &liwork, &mut info,
        );
    }
    if info != 0 {
        return Err(DoaError::Linalg(format!("zheevd failed: info={info}")));
    }
    // Buffer rows now hold conj(v_k); conjugate and transpose to get columns.
    let buf = Array2::from_shape_vec((n, n), a).expect("shape");
    let vecs = buf.mapv(|c| c.conj()).reversed_axes().as_standard_layout().to_owned();
    Ok((Array1::from(w), vecs))
}

/// Eigenpairs of a Hermitian matrix with eigenvalues strictly above `lower`,
/// ascending, eigenvectors as columns. Uses the MRRR driver so the cost is
/// dominated by the tridiagonal reduction when few pairs qualify.
pub fn eigh_above(m: &Array2<C64>, lower: f64) -> Result<(Vec<f64>, Array2<C64>)> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(DoaError::domain("eigh_above needs a square matrix"));
    }
    let ni = n as i32;
    let mut a: Vec<C64> = m.iter().cloned().collect();
    let mut w = vec![0.0f64; n];
    let mut z = vec![C64::new(0.0, 0.0); n * n];
    let mut isuppz = vec![0i32; 2 * n];
    let (jobz, range, uplo) = (b'V', b'V', b'L');
    let vu = f64::MAX / 4.0;
    let (il, iu) = (0i32, 0i32);
    let abstol = 0.0f64;
    let mut found = 0i32;
    let mut info = 0i32;
    let (mut wkopt, mut rwkopt, mut iwkopt) = (C64::new(0.0, 0.0), 0.0f64, 0i32);
    let query = -1i32;
    unsafe {
        zheevr_(
            &jobz, &range, &uplo, &ni, a.as_mut_ptr(), &ni, &lower, &vu, &il, &iu,
            &abstol, &mut found, w.as_mut_ptr(), z.as_mut_ptr(), &ni, isuppz.as_mut_ptr(),
            &mut wkopt, &query, &mut rwkopt, &query, &mut iwkopt, &query, &mut info,
        );
    }
    if info != 0 {
        return Err(DoaError::Linalg(format!("zheevr workspace query failed: info={info}")));
    }
    let lwork = wkopt.re as i32;
    let lrwork = rwkopt as i32;
    let liwork = iwkopt;
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    let mut rwork = vec![0.0f64; lrwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        zheevr_(
            &jobz, &range, &uplo, &ni, a.as_mut_ptr(), &ni, &lower, &vu, &il, &iu,
            &abstol, &mut found, w.as_mut_ptr(), z.as_mut_ptr(), &ni, isuppz.as_mut_ptr(),
            work.as_mut_ptr(), &lwork, rwork.as_mut_ptr(), &lrwork,
            iwork.as_mut_ptr(), &liwork, &mut info,
        );
    }
    if info != 0 {
        return Err(DoaError::Linalg(format!("zheevr failed: info={info}")));
    }
    let m_found = found as usize;
    w.truncate(m_found);
    // z is column-major n x m_found: Fortran column k = eigenvector of conj(A).
    let mut vecs = Array2::<C64>::zeros((n, m_found));
    for k in 0..m_found {
        for i in 0..n {
            vecs[(i, k)] = z[k * n + i].conj();
        }
    }
    Ok((w, vecs))
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending,
/// eigenvectors as columns (M = V diag(w) V^H).
///
/// The backend hands back the LAPACK output in row-major order without
/// conjugating, so the columns come out conjugated; undo that here.
pub fn eigh_ascending(m: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let (vals, vecs) = m.eigh(UPLO::Lower)?;
    Ok((vals, vecs.mapv(|v| v.conj())))
}

/// Eigenvalues only of a Hermitian matrix, ascending.
pub fn eigvalsh(m: &Array2<C64>) -> Result<Array1<f64>> {
    use ndarray_linalg::EigValsh;
    Ok(m.eigvalsh(UPLO::Lower)?)
}

/// All eigenvalues of a general complex matrix.
pub fn eig_general(m: &Array2<C64>) -> Result<Array1<C64>> {
    let (vals, _) = m.eig()?;
    Ok(vals)
}

/// Minimum-norm least squares solution of A c = b.
pub fn least_squares(a: &Array2<C64>, b: &Array1<C64>) -> Result<Array1<C64>> {
    let sol = a.least_squares(b)?;
    Ok(sol.solution)
}

/// Largest singular value, via the largest eigenvalue of A^H A.
pub fn spectral_norm(a: &Array2<C64>) -> Result<f64> {
    let gram = a.t().mapv(|v| v.conj()).dot(a);
    let vals = eigvalsh(&gram)?;
    let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(max.max(0.0).sqrt())
}

/// 2-norm condition number from the singular values of A.
pub fn condition_number(a: &Array2<C64>) -> Result<f64> {
    use ndarray_linalg::SVD;
    let (_, s, _) = a.svd(false, false)?;
    let max = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(max / min)
}

/// Frobenius norm of a complex matrix.
pub fn fro_norm(m: &Array2<C64>) -> f64 {
    m.norm_l2()
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &Array1<C64>) -> f64 {
    v.norm_l2()
}

/// Conjugate transpose.
pub fn adjoint(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|v| v.conj())
}

/// Fails when any entry is non-finite.
pub fn ensure_finite_vec(v: &Array1<C64>, what: &str) -> Result<()> {
    if v.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(DoaError::Divergence(format!("{what} contains non-finite values")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    #[test]
    fn hermitian_eig_roundtrip() {
        let m = array![
            [Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)],
            [Complex64::new(0.0, -1.0), Complex64::new(3.0, 0.0)],
        ];
        let (vals, vecs) = eigh_ascending(&m).unwrap();
        let recon = vecs.dot(&Array2::from_diag(
            &vals.mapv(|v| Complex64::new(v, 0.0)),
        ))
        .dot(&adjoint(&vecs));
        assert_abs_diff_eq!(fro_norm(&(&recon - &m)), 0.0, epsilon = 1e-12);
        assert!(vals[0] <= vals[1]);
    }


    #[test]
    fn eigh_columns_are_eigenvectors() {
        // pseudo-random Hermitian 4x4
        let mut m = Array2::<Complex64>::zeros((4, 4));
        let mut seed = 1234567u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = Complex64::new(next(), next());
            }
        }
        let m = &m + &adjoint(&m);
        let (vals, vecs) = eigh_ascending(&m).unwrap();
        for k in 0..4 {
            let v = vecs.column(k).to_owned();
            let mv = m.dot(&v);
            let lv = v.mapv(|x| x * Complex64::new(vals[k], 0.0));
            assert_abs_diff_eq!(vec_norm(&(&mv - &lv)), 0.0, epsilon = 1e-10);
        }
    }

    fn random_hermitian(n: usize, seed: u64) -> Array2<Complex64> {
        let mut m = Array2::<Complex64>::zeros((n, n));
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = Complex64::new(next(), next());
            }
        }
        let m = &m + &adjoint(&m);
        m
    }

    #[test]
    fn divide_and_conquer_matches_reference_driver() {
        let m = random_hermitian(23, 77);
        let (w1, v1) = eigh_ascending(&m).unwrap();
        let (w2, v2) = eigh_dc(&m).unwrap();
        for (a, b) in w1.iter().zip(w2.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-11);
        }
        // columns agree up to phase: |<v1_k, v2_k>| = 1
        for k in 0..23 {
            let ip: Complex64 = v1
                .column(k)
                .iter()
                .zip(v2.column(k).iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            assert_abs_diff_eq!(ip.norm(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn partial_driver_matches_full_above_threshold() {
        let m = random_hermitian(31, 5);
        let (wf, vf) = eigh_dc(&m).unwrap();
        let lower = wf[20] + 1e-12;
        let (wp, vp) = eigh_above(&m, lower).unwrap();
        assert_eq!(wp.len(), 10);
        for (i, w) in wp.iter().enumerate() {
            assert_abs_diff_eq!(*w, wf[21 + i], epsilon = 1e-10);
            let ip: Complex64 = vf
                .column(21 + i)
                .iter()
                .zip(vp.column(i).iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            assert_abs_diff_eq!(ip.norm(), 1.0, epsilon = 1e-8);
        }
        // reconstruction of the shrunk matrix agrees between drivers
        let shrink_full = {
            let mut acc = Array2::<Complex64>::zeros((31, 31));
            for k in 0..31 {
                if wf[k] > lower {
                    let v = vf.column(k);
                    for i in 0..31 {
                        for j in 0..31 {
                            acc[(i, j)] += v[i] * v[j].conj() * (wf[k] - lower);
                        }
                    }
                }
            }
            acc
        };
        let shrink_part = {
            let mut acc = Array2::<Complex64>::zeros((31, 31));
            for (k, w) in wp.iter().enumerate() {
                let v = vp.column(k);
                for i in 0..31 {
                    for j in 0..31 {
                        acc[(i, j)] += v[i] * v[j].conj() * (w - lower);
                    }
                }
            }
            acc
        };
        assert_abs_diff_eq!(fro_norm(&(&shrink_full - &shrink_part)), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn partial_driver_empty_range() {
        let m = random_hermitian(9, 13);
        let (wf, _) = eigh_dc(&m).unwrap();
        let top = wf[8] + 1.0;
        let (wp, vp) = eigh_above(&m, top).unwrap();
        assert!(wp.is_empty());
        assert_eq!(vp.ncols(), 0);
    }

    #[test]
    fn spectral_norm_matches_svd() {
        let a = array![
            [Complex64::new(1.0, 2.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.5, 0.0), Complex64::new(3.0, -1.0)],
            [Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)],
        ];
        use ndarray_linalg::SVD;
        let (_, s, _) = a.svd(false, false).unwrap();
        let smax = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_abs_diff_eq!(spectral_norm(&a).unwrap(), smax, epsilon = 1e-10);
    }
}
