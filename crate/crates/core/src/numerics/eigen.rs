//! Cyclic Jacobi eigensolver for Hermitian matrices and the matching
//! one-sided (Hestenes) Jacobi singular value routine.

use num_complex::Complex64 as C64;

use super::matrix::{ComplexMatrix, ComplexVector};
use crate::error::{Error, Result};

/// Relative Hermiticity tolerance accepted by [`hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `A = V diag(values) V^dagger`, values ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, `vectors[k]` pairs with `values[k]`.
    pub vectors: Vec<ComplexVector>,
}

impl HermitianEigen {
    /// Eigenvectors as the columns of a unitary matrix.
    pub fn vector_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_columns(&self.vectors)
    }

    /// `V diag(f(values)) V^dagger`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            let w = f(*lambda);
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..n {
                let vi = v[i] * w;
                for j in 0..n {
                    out[(i, j)] += vi * v[j].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| C64::new(x, 0.0))
    }
}

/// Unitary 2x2 rotation zeroing the (p,q) entry of a Hermitian pair
/// `[[app, apq], [conj(apq), aqq]]`. Returns `(c, s, phase)` where the
/// rotation has columns `p' = c e_p - s conj(phase) e_q` and
/// `q' = s e_p + c conj(phase) e_q`, `phase = apq / |apq|`.
#[inline]
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> (f64, f64, C64) {
    let mag = apq.norm();
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, phase)
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", a.rows(), a.cols()),
        });
    }
    let scale = a.max_abs().max(1.0);
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { asymmetry: defect });
    }
    let n = a.rows();
    let mut m = a.hermitian_part();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let fro = m.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * fro || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.norm() <= 1e-300 {
                    continue;
                }
                let (app, aqq) = (m[(p, p)].re, m[(q, q)].re);
                let (c, s, phase) = jacobi_rotation(app, aqq, apq);
                let ph_c = phase.conj();
                // columns: M <- M U
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * c - mkq * ph_c * s;
                    m[(k, q)] = mkp * s + mkq * ph_c * c;
                }
                // rows: M <- U^dagger M
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = mpk * c - mqk * phase * s;
                    m[(q, k)] = mpk * s + mqk * phase * c;
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * ph_c * s;
                    v[(k, q)] = vkp * s + vkq * ph_c * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    Ok(HermitianEigen {
        values: order.iter().map(|&i| m[(i, i)].re).collect(),
        vectors: order.iter().map(|&i| v.column(i)).collect(),
    })
}

/// Singular values (descending) by one-sided Jacobi on the columns.
///
/// Small singular values come out with absolute accuracy of order
/// `eps * ||A||`, unlike square roots of Gram-matrix eigenvalues.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let (rows, cols) = (a.rows(), a.cols());
    let mut cs: Vec<Vec<C64>> = (0..cols).map(|j| (0..rows).map(|i| a[(i, j)]).collect()).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha: f64 = cs[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cs[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cs[p].iter().zip(&cs[q]).map(|(x, y)| x.conj() * y).sum();
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() || gamma.norm() <= 1e-300 {
                    continue;
                }
                rotated = true;
                let (c, s, phase) = jacobi_rotation(alpha, beta, gamma);
                let ph_c = phase.conj();
                let (left, right) = cs.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = xp * c - yq * ph_c * s;
                    *y = xp * s + yq * ph_c * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> =
        cs.iter().map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &ComplexMatrix, e: &HermitianEigen) -> f64 {
        e.values
            .iter()
            .zip(&e.vectors)
            .map(|(&l, v)| {
                let av = a.mul_vec(v);
                (&av - &v.scale(C64::new(l, 0.0))).norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn diagonal_spectrum() {
        let a = ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]);
        let e = hermitian_eig(&a).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn pauli_y_spectrum() {
        let sy = ComplexMatrix::from_row_major(
            2,
            2,
            vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        )
        .unwrap();
        let e = hermitian_eig(&sy).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        assert!(residual(&sy, &e) < 1e-14);
    }

    #[test]
    fn tavis_cummings_block_resonant() {
        // single-excitation block, g1 = g2 = 1, zero detuning
        let h = ComplexMatrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 1.0], &[0.0, 1.0, 0.0]]);
        let e = hermitian_eig(&h).unwrap();
        let s2 = 2f64.sqrt();
        assert!((e.values[0] + s2).abs() < 1e-14);
        assert!(e.values[1].abs() < 1e-14);
        assert!((e.values[2] - s2).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(hermitian_eig(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn complex_hermitian_residual_and_orthonormality() {
        let a = ComplexMatrix::from_fn(5, 5, |i, j| {
            let x = (i as f64 + 1.0) * 0.37 + (j as f64) * 0.11;
            let y = (i as f64 - j as f64) * 0.29;
            if i == j {
                C64::new(x, 0.0)
            } else if i < j {
                C64::new(x.sin(), y.cos())
            } else {
                C64::new(((j as f64 + 1.0) * 0.37 + (i as f64) * 0.11).sin(), -((j as f64 - i as f64) * 0.29).cos())
            }
        });
        assert!(a.is_hermitian(1e-15));
        let e = hermitian_eig(&a).unwrap();
        assert!(residual(&a, &e) < 1e-12);
        assert!(e.vector_matrix().is_unitary(1e-12));
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn singular_values_of_diag_and_rank_one() {
        let a = ComplexMatrix::from_real_diagonal(&[-3.0, 1.0, 2.0]);
        assert_eq!(singular_values(&a), vec![3.0, 2.0, 1.0]);
        let u = ComplexVector::from_real(&[1.0, 2.0, 2.0]);
        let r1 = u.outer(&u);
        let sv = singular_values(&r1);
        assert!((sv[0] - 9.0).abs() < 1e-13);
        assert!(sv[1].abs() < 1e-15 && sv[2].abs() < 1e-15);
    }
}
