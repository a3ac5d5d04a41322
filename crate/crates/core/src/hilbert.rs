//! Composite space `qubit 1 ⊗ cavity ⊗ qubit 2`.
//!
//! Basis index of `|q1, n, q2>` is `q1 * (n_max + 1) * 2 + n * 2 + q2`, where a
//! qubit index of 1 means excited. The two-qubit space uses `|q1 q2>` with
//! index `2 * q1 + q2`, i.e. the order `|00>, |01>, |10>, |11>`.

use num_complex::Complex64 as C64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::numerics::{kron, ComplexMatrix, ComplexVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Qubit {
    One,
    Two,
}

impl Qubit {
    pub fn index(self) -> usize {
        match self {
            Qubit::One => 0,
            Qubit::Two => 1,
        }
    }

    pub fn from_number(k: usize) -> Result<Self> {
        match k {
            1 => Ok(Qubit::One),
            2 => Ok(Qubit::Two),
            _ => Err(Error::InvalidArgument(format!("qubit index must be 1 or 2, got {k}"))),
        }
    }
}

/// Full-space dimension for a Fock cutoff.
pub fn full_dim(n_max: usize) -> usize {
    2 * (n_max + 1) * 2
}

pub fn basis_index(n_max: usize, q1: usize, photons: usize, q2: usize) -> usize {
    debug_assert!(q1 < 2 && q2 < 2 && photons <= n_max);
    q1 * (n_max + 1) * 2 + photons * 2 + q2
}

/// Fock cutoff implied by a full-space dimension.
pub fn n_max_from_dim(dim: usize) -> Result<usize> {
    if dim < 8 || dim % 4 != 0 {
        return Err(Error::DimensionMismatch {
            expected: "2*(n_max+1)*2 with n_max >= 1".into(),
            found: format!("dimension {dim}"),
        });
    }
    Ok(dim / 4 - 1)
}

/// Ladder and spin operators on the truncated composite space.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    pub n_max: usize,
    pub dim: usize,
    pub a: ComplexMatrix,
    pub a_dag: ComplexMatrix,
    /// `a^dagger a`.
    pub number: ComplexMatrix,
    pub s_plus: [ComplexMatrix; 2],
    pub s_minus: [ComplexMatrix; 2],
    pub s_z: [ComplexMatrix; 2],
    pub identity: ComplexMatrix,
}

fn qubit_lowering() -> ComplexMatrix {
    // |g><e| with index 0 = ground, 1 = excited
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])
}

fn qubit_sz() -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(&[-0.5, 0.5])
}

fn cavity_lowering(n_max: usize) -> ComplexMatrix {
    let n = n_max + 1;
    let mut a = ComplexMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    a
}

/// Builds every operator for cutoff `n_max` (`n_max >= 1`).
pub fn build_operator_set(n_max: usize) -> Result<OperatorSet> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let i2 = ComplexMatrix::identity(2);
    let ic = ComplexMatrix::identity(n_max + 1);
    let on_q1 = |op: &ComplexMatrix| kron(op, &kron(&ic, &i2));
    let on_cav = |op: &ComplexMatrix| kron(&i2, &kron(op, &i2));
    let on_q2 = |op: &ComplexMatrix| kron(&i2, &kron(&ic, op));

    let a = on_cav(&cavity_lowering(n_max));
    let a_dag = a.adjoint();
    let number = a_dag.matmul(&a);
    let sm = qubit_lowering();
    let sp = sm.adjoint();
    let sz = qubit_sz();
    let dim = full_dim(n_max);
    Ok(OperatorSet {
        n_max,
        dim,
        a,
        a_dag,
        number,
        s_plus: [on_q1(&sp), on_q2(&sp)],
        s_minus: [on_q1(&sm), on_q2(&sm)],
        s_z: [on_q1(&sz), on_q2(&sz)],
        identity: ComplexMatrix::identity(dim),
    })
}

impl OperatorSet {
    pub fn s_plus(&self, q: Qubit) -> &ComplexMatrix {
        &self.s_plus[q.index()]
    }

    pub fn s_minus(&self, q: Qubit) -> &ComplexMatrix {
        &self.s_minus[q.index()]
    }

    pub fn s_z(&self, q: Qubit) -> &ComplexMatrix {
        &self.s_z[q.index()]
    }

    /// Total excitation `a^dagger a + S1^z + S2^z`.
    pub fn excitation_number(&self) -> ComplexMatrix {
        &(&self.number + &self.s_z[0]) + &self.s_z[1]
    }
}

/// Amplitudes on `{|100>, |010>, |001>}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubspaceState {
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
}

impl SubspaceState {
    pub fn new(alpha: C64, beta: C64, gamma: C64) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn from_real(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self::new(C64::new(alpha, 0.0), C64::new(beta, 0.0), C64::new(gamma, 0.0))
    }

    /// `|100>`
    pub fn qubit1_excited() -> Self {
        Self::from_real(1.0, 0.0, 0.0)
    }

    /// `|010>`
    pub fn photon() -> Self {
        Self::from_real(0.0, 1.0, 0.0)
    }

    /// `|001>`
    pub fn qubit2_excited() -> Self {
        Self::from_real(0.0, 0.0, 1.0)
    }

    pub fn from_vector(v: &ComplexVector) -> Result<Self> {
        if v.dim() != 3 {
            return Err(Error::DimensionMismatch { expected: "3 amplitudes".into(), found: format!("{}", v.dim()) });
        }
        Ok(Self::new(v[0], v[1], v[2]))
    }

    pub fn to_vector(&self) -> ComplexVector {
        ComplexVector::from_vec(vec![self.alpha, self.beta, self.gamma])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr() + self.gamma.norm_sqr()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self::new(self.alpha / n, self.beta / n, self.gamma / n)
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// Two-qubit reduced state after tracing out the cavity.
    ///
    /// The photon amplitude leaves both qubits down, so it lands on `|00>`.
    pub fn reduced_qubit_state(&self) -> DensityMatrix {
        let mut m = ComplexMatrix::zeros(4, 4);
        // |01> <- gamma, |10> <- alpha, |00> <- beta
        m[(0, 0)] = C64::new(self.beta.norm_sqr(), 0.0);
        m[(1, 1)] = C64::new(self.gamma.norm_sqr(), 0.0);
        m[(2, 2)] = C64::new(self.alpha.norm_sqr(), 0.0);
        m[(1, 2)] = self.gamma * self.alpha.conj();
        m[(2, 1)] = self.alpha * self.gamma.conj();
        DensityMatrix::new_unchecked(m)
    }
}

/// Places a subspace state into the full space with cutoff `n_max`.
pub fn embed_single_excitation(s: &SubspaceState, n_max: usize) -> Result<ComplexVector> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let mut v = ComplexVector::zeros(full_dim(n_max));
    v[basis_index(n_max, 1, 0, 0)] = s.alpha;
    v[basis_index(n_max, 0, 1, 0)] = s.beta;
    v[basis_index(n_max, 0, 0, 1)] = s.gamma;
    Ok(v)
}

/// Subspace amplitudes plus the norm of everything outside the subspace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extracted {
    pub state: SubspaceState,
    pub leaked_norm: f64,
}

pub fn extract_single_excitation(v: &ComplexVector) -> Result<Extracted> {
    let n_max = n_max_from_dim(v.dim())?;
    let idx = [basis_index(n_max, 1, 0, 0), basis_index(n_max, 0, 1, 0), basis_index(n_max, 0, 0, 1)];
    let leaked: f64 = (0..v.dim()).filter(|i| !idx.contains(i)).map(|i| v[i].norm_sqr()).sum();
    Ok(Extracted { state: SubspaceState::new(v[idx[0]], v[idx[1]], v[idx[2]]), leaked_norm: leaked.sqrt() })
}

/// Traces the cavity out of a full-space density matrix.
pub fn partial_trace_cavity(rho_full: &DensityMatrix, n_max: usize) -> Result<DensityMatrix> {
    let dim = full_dim(n_max);
    if rho_full.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: format!("{dim}x{dim} for n_max = {n_max}"),
            found: format!("{0}x{0}", rho_full.dim()),
        });
    }
    Ok(DensityMatrix::new_unchecked(partial_trace_cavity_matrix(rho_full.matrix(), n_max)))
}

/// Same sum as [`partial_trace_cavity`] on a raw matrix; no validation.
pub fn partial_trace_cavity_matrix(m: &ComplexMatrix, n_max: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(4, 4);
    for i1 in 0..2 {
        for i2 in 0..2 {
            for j1 in 0..2 {
                for j2 in 0..2 {
                    let mut s = C64::new(0.0, 0.0);
                    for n in 0..=n_max {
                        s += m[(basis_index(n_max, i1, n, i2), basis_index(n_max, j1, n, j2))];
                    }
                    out[(2 * i1 + i2, 2 * j1 + j2)] = s;
                }
            }
        }
    }
    out
}
