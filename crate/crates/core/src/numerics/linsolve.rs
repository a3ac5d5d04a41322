use num_complex::Complex64 as C64;

use super::matrix::{ComplexMatrix, ComplexVector};
use crate::error::{Error, Result};

/// Default relative pivot threshold below which a system is reported singular.
pub const DEFAULT_PIVOT_TOL: f64 = 1e-13;

/// LU factorisation with partial pivoting, `P A = L U`, stored in place.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Factorises `a`; fails with [`Error::Singular`] when a pivot falls below
    /// `pivot_tol * max|a_ij|`.
    pub fn factor(a: &ComplexMatrix, pivot_tol: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square matrix".into(),
                found: format!("{}x{}", a.rows(), a.cols()),
            });
        }
        let n = a.rows();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let threshold = pivot_tol * a.max_abs();

        for k in 0..n {
            let (pivot_row, pivot_mag) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_mag <= threshold || pivot_mag == 0.0 {
                return Err(Error::Singular { column: k, pivot: pivot_mag });
            }
            if pivot_row != k {
                for j in 0..n {
                    lu.swap(k * n + j, pivot_row * n + j);
                }
                perm.swap(k, pivot_row);
            }
            let inv_pivot = 1.0 / lu[k * n + k];
            let (head, tail) = lu.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..(k + 1) * n];
            for row in tail.chunks_exact_mut(n) {
                let factor = row[k] * inv_pivot;
                if factor == C64::new(0.0, 0.0) {
                    continue;
                }
                row[k] = factor;
                for (x, &p) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                    *x -= factor * p;
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn solve(&self, b: &ComplexVector) -> Result<ComplexVector> {
        let n = self.n;
        if b.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: format!("rhs of length {n}"),
                found: format!("length {}", b.dim()),
            });
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: C64 = row.iter().zip(&x[..i]).map(|(l, y)| l * y).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let s: C64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(u, y)| u * y).sum();
            x[i] = (x[i] - s) / row[i];
        }
        Ok(ComplexVector::from_vec(x))
    }
}

/// Solves `a x = b` by LU with partial pivoting.
pub fn solve_linear(a: &ComplexMatrix, b: &ComplexVector) -> Result<ComplexVector> {
    solve_linear_with_tol(a, b, DEFAULT_PIVOT_TOL)
}

pub fn solve_linear_with_tol(a: &ComplexMatrix, b: &ComplexVector, pivot_tol: f64) -> Result<ComplexVector> {
    if b.dim() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: format!("rhs of length {}", a.rows()),
            found: format!("length {}", b.dim()),
        });
    }
    Lu::factor(a, pivot_tol)?.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system() {
        let x = solve_linear(&ComplexMatrix::identity(3), &ComplexVector::from_real(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(x, ComplexVector::from_real(&[1.0, 2.0, 3.0]));
    }

    #[test]
    fn diagonal_system() {
        let a = ComplexMatrix::from_real_diagonal(&[2.0, 4.0]);
        let x = solve_linear(&a, &ComplexVector::from_real(&[2.0, 4.0])).unwrap();
        assert!(x.max_abs_diff(&ComplexVector::from_real(&[1.0, 1.0])) < 1e-15);
    }

    #[test]
    fn needs_pivoting() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let x = solve_linear(&a, &ComplexVector::from_real(&[5.0, 7.0])).unwrap();
        assert!(x.max_abs_diff(&ComplexVector::from_real(&[7.0, 5.0])) < 1e-15);
    }

    #[test]
    fn singular_is_reported() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let err = solve_linear(&a, &ComplexVector::from_real(&[1.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::Singular { column: 1, .. }));
    }

    #[test]
    fn rhs_length_checked() {
        let err = solve_linear(&ComplexMatrix::identity(2), &ComplexVector::zeros(3)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }
}
