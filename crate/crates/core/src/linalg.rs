// Copyright 2026 The phasecov Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! Small dense complex linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Hermitian deviation `max |A - A†|` entrywise.
pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    let adj = a.adjoint();
    (a - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Number of eigenvalues above `rel_tol * lambda_max` (Hermitian PSD input).
pub fn numerical_rank(a: &CMatrix, rel_tol: f64) -> usize {
    let ev = hermitian_eigenvalues(a);
    let lam_max = ev.last().copied().unwrap_or(0.0).max(0.0);
    if lam_max == 0.0 {
        return 0;
    }
    ev.iter().filter(|&&l| l > rel_tol * lam_max).count()
}

/// Projection of a Hermitian matrix onto the PSD cone (negative eigenvalues
/// clipped to zero).
pub fn psd_project(a: &CMatrix) -> CMatrix {
    let se = a.clone().symmetric_eigen();
    let n = a.nrows();
    let mut out = CMatrix::zeros(n, n);
    for k in 0..n {
        let lam = se.eigenvalues[k];
        if lam > 0.0 {
            let v = se.eigenvectors.column(k);
            for r in 0..n {
                for c in 0..n {
                    out[(r, c)] += v[r] * v[c].conj() * Complex64::from(lam);
                }
            }
        }
    }
    out
}

/// Frobenius norm.
pub fn fro_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Extend `cols` orthonormal columns to a full orthonormal basis by running
/// modified Gram-Schmidt over the canonical basis vectors in order, skipping
/// candidates whose residual falls below `threshold`. Deterministic given the
/// basis order.
pub fn gram_schmidt_complete(cols: &CMatrix, threshold: f64) -> CMatrix {
    let dim = cols.nrows();
    let mut basis: Vec<CVector> = (0..cols.ncols()).map(|j| cols.column(j).into_owned()).collect();
    let mut e = 0usize;
    while basis.len() < dim && e < dim {
        let mut v = CVector::zeros(dim);
        v[e] = Complex64::new(1.0, 0.0);
        // two MGS passes keep orthogonality at machine precision
        for _ in 0..2 {
            for b in &basis {
                let coeff = b.dotc(&v);
                v -= b * coeff;
            }
        }
        let norm = v.norm();
        if norm > threshold {
            v /= Complex64::from(norm);
            basis.push(v);
        }
        e += 1;
    }
    assert_eq!(basis.len(), dim, "Gram-Schmidt completion failed to span");
    CMatrix::from_columns(&basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hermitian_probe() -> CMatrix {
        let i = Complex64::new(0.0, 1.0);
        CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, 0.0) + i,
                -i,
                Complex64::new(2.0, 0.0),
            ],
        )
    }

    #[test]
    fn eigenvalues_of_known_matrix() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let ev = hermitian_eigenvalues(&hermitian_probe());
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!((ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rank_counts_dominant_spectrum() {
        let m = hermitian_probe();
        assert_eq!(numerical_rank(&m, 1e-9), 2);
        let v = CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]);
        let outer = &v * v.adjoint();
        assert_eq!(numerical_rank(&outer, 1e-9), 1);
    }

    #[test]
    fn psd_projection_clips_negative_part() {
        let mut m = hermitian_probe();
        m[(0, 0)] = Complex64::new(-2.0, 0.0);
        m[(1, 1)] = Complex64::new(-2.0, 0.0);
        let p = psd_project(&m);
        let ev = hermitian_eigenvalues(&p);
        assert!(ev.iter().all(|&l| l > -1e-12));
    }

    #[test]
    fn completion_is_unitary_and_preserves_prefix() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let col = CMatrix::from_row_slice(
            3,
            1,
            &[
                Complex64::new(s, 0.0),
                Complex64::new(0.0, s),
                Complex64::new(0.0, 0.0),
            ],
        );
        let u = gram_schmidt_complete(&col, 1e-8);
        let id = CMatrix::identity(3, 3);
        assert!(fro_norm(&(u.adjoint() * &u - id)) < 1e-12);
        assert!(fro_norm(&(u.columns(0, 1).into_owned() - col)) < 1e-15);
    }
}
