//! Two qubits coupled to one cavity mode.
//!
//! Units: hbar = 1 and g1 = 1, so energies are multiples of g1 and times are
//! multiples of 1/g1. The qubit energy term uses spin-1/2 `S^z` with
//! eigenvalues ±1/2.

use crate::error::{Error, Result};
use crate::hilbert::{build_operator_set, OperatorSet, SubspaceState};
use crate::numerics::{kron, ComplexMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub g1: f64,
    pub g2: f64,
    /// Cavity frequency.
    pub omega: f64,
    pub eps1: f64,
    pub eps2: f64,
    /// Cavity decay rate.
    pub kappa: f64,
    /// Qubit decay rate (both qubits).
    pub gamma: f64,
    /// Drive amplitude on qubit 2.
    pub d: f64,
    /// Drive frequency; the driven Hamiltonian lives in the frame rotating at it.
    pub drive_omega: f64,
    pub n_max: usize,
}

impl Default for ModelParams {
    /// Dispersive closed-system point: omega = 50, eps = 10, g2 = g1.
    fn default() -> Self {
        Self::dispersive(1.0)
    }
}

impl ModelParams {
    /// omega = 50 g1, eps1 = eps2 = 10 g1, no dissipation, single-excitation cutoff.
    pub fn dispersive(ratio: f64) -> Self {
        Self {
            g1: 1.0,
            g2: ratio,
            omega: 50.0,
            eps1: 10.0,
            eps2: 10.0,
            kappa: 0.0,
            gamma: 0.0,
            d: 0.0,
            drive_omega: 0.0,
            n_max: 1,
        }
    }

    /// omega = eps1 = eps2 = 10 g1, no dissipation.
    pub fn resonant(ratio: f64) -> Self {
        Self { omega: 10.0, ..Self::dispersive(ratio) }
    }

    /// Resonant, drive frame at the common frequency, kappa = g1, gamma = 0.005 g1.
    pub fn open_resonant(ratio: f64, d: f64) -> Self {
        Self { kappa: 1.0, gamma: 0.005, d, drive_omega: 10.0, n_max: 4, ..Self::resonant(ratio) }
    }

    pub fn with_ratio(mut self, ratio: f64) -> Self {
        self.g2 = ratio * self.g1;
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    /// `g2 / g1`.
    pub fn ratio(&self) -> f64 {
        self.g2 / self.g1
    }

    /// Signed detuning `eps1 - omega`.
    pub fn delta(&self) -> f64 {
        self.eps1 - self.omega
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("g1", self.g1),
            ("g2", self.g2),
            ("omega", self.omega),
            ("eps1", self.eps1),
            ("eps2", self.eps2),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("d", self.d),
            ("drive_omega", self.drive_omega),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("{name} is not finite")));
        }
        if self.g1 <= 0.0 {
            return Err(Error::InvalidParams("g1 must be positive".into()));
        }
        for (name, v) in [("g2", self.g2), ("kappa", self.kappa), ("gamma", self.gamma), ("d", self.d)] {
            if v < 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be non-negative")));
            }
        }
        if self.n_max < 1 {
            return Err(Error::InvalidParams("n_max must be at least 1".into()));
        }
        Ok(())
    }

    fn equal_epsilons(&self) -> bool {
        (self.eps1 - self.eps2).abs() <= 1e-12 * self.eps1.abs().max(1.0)
    }

    fn nonzero_delta(&self) -> Result<f64> {
        let delta = self.delta();
        if delta == 0.0 {
            Err(Error::ZeroDetuning)
        } else {
            Ok(delta)
        }
    }
}

/// `sum_i g_i (a^dagger S_i^- + a S_i^+)`.
fn coupling(p: &ModelParams, ops: &OperatorSet) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(ops.dim, ops.dim);
    for (i, g) in [p.g1, p.g2].into_iter().enumerate() {
        let term = &ops.a_dag.matmul(&ops.s_minus[i]) + &ops.a.matmul(&ops.s_plus[i]);
        h = &h + &term.scale_real(g);
    }
    h
}

/// `omega a^dagger a + sum eps_i S_i^z + sum g_i (a^dagger S_i^- + h.c.)`.
pub fn hamiltonian_full(p: &ModelParams) -> Result<ComplexMatrix> {
    p.validate()?;
    let ops = build_operator_set(p.n_max)?;
    let free = &(&ops.number.scale_real(p.omega) + &ops.s_z[0].scale_real(p.eps1)) + &ops.s_z[1].scale_real(p.eps2);
    Ok(&free + &coupling(p, &ops))
}

/// Hamiltonian in the frame rotating at `drive_omega`, with drive `d` on qubit 2.
pub fn hamiltonian_driven(p: &ModelParams) -> Result<ComplexMatrix> {
    p.validate()?;
    let ops = build_operator_set(p.n_max)?;
    Ok(hamiltonian_driven_with(p, &ops))
}

pub(crate) fn hamiltonian_driven_with(p: &ModelParams, ops: &OperatorSet) -> ComplexMatrix {
    let w = p.drive_omega;
    let free = &(&ops.number.scale_real(p.omega - w) + &ops.s_z[0].scale_real(p.eps1 - w))
        + &ops.s_z[1].scale_real(p.eps2 - w);
    let drive = (&ops.s_plus[1] + &ops.s_minus[1]).scale_real(p.d);
    &(&free + &coupling(p, ops)) + &drive
}

/// Second-order dispersive Hamiltonian with photon-dependent Stark shifts and
/// the cavity-mediated flip-flop `sum_{i != j} g_i g_j / (2 delta) S_i^+ S_j^-`.
pub fn hamiltonian_effective(p: &ModelParams) -> Result<ComplexMatrix> {
    p.validate()?;
    let delta = p.nonzero_delta()?;
    let ops = build_operator_set(p.n_max)?;
    let free = &(&ops.number.scale_real(p.omega) + &ops.s_z[0].scale_real(p.eps1)) + &ops.s_z[1].scale_real(p.eps2);
    let a_adag = ops.a.matmul(&ops.a_dag);
    let photon_sum = &ops.number + &a_adag;
    let mut h = free;
    for (i, g) in [p.g1, p.g2].into_iter().enumerate() {
        h = &h + &photon_sum.matmul(&ops.s_z[i]).scale_real(g * g / delta);
    }
    let flip_flop = &ops.s_plus[0].matmul(&ops.s_minus[1]) + &ops.s_minus[0].matmul(&ops.s_plus[1]);
    // both orderings (i, j) = (1, 2) and (2, 1) contribute g1 g2 / (2 delta)
    Ok(&h + &flip_flop.scale_real(p.g1 * p.g2 / delta))
}

/// Two-qubit reduction of [`hamiltonian_effective`] at zero photons, on
/// `|q1 q2>` ordered `|00>, |01>, |10>, |11>`.
pub fn hamiltonian_effective_qubits(p: &ModelParams) -> Result<ComplexMatrix> {
    p.validate()?;
    let delta = p.nonzero_delta()?;
    if !p.equal_epsilons() {
        return Err(Error::UnequalEpsilons { eps1: p.eps1, eps2: p.eps2 });
    }
    let i2 = ComplexMatrix::identity(2);
    let sz = ComplexMatrix::from_real_diagonal(&[-0.5, 0.5]);
    let sm = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let sp = sm.adjoint();
    let stark = &kron(&sz, &i2).scale_real(p.g1 * p.g1 / delta) + &kron(&i2, &sz).scale_real(p.g2 * p.g2 / delta);
    let flip_flop = &kron(&sp, &sm) + &kron(&sm, &sp);
    Ok(&stark + &flip_flop.scale_real(p.g1 * p.g2 / delta))
}

/// Hamiltonian restricted to `{|100>, |010>, |001>}`.
pub fn single_excitation_block(p: &ModelParams) -> ComplexMatrix {
    let e100 = 0.5 * (p.eps1 - p.eps2);
    let e010 = p.omega - 0.5 * (p.eps1 + p.eps2);
    let e001 = 0.5 * (p.eps2 - p.eps1);
    ComplexMatrix::from_real_rows(&[&[e100, p.g1, 0.0], &[p.g1, e010, p.g2], &[0.0, p.g2, e001]])
}

/// Closed-form single-excitation eigenpairs; vectors are normalised.
///
/// `e1 = 0` belongs to the dark state with no photon component; `e2 < 0 < e3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenSystem {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub v1: SubspaceState,
    pub v2: SubspaceState,
    pub v3: SubspaceState,
}

impl EigenSystem {
    pub fn energies(&self) -> [f64; 3] {
        [self.e1, self.e2, self.e3]
    }

    pub fn vectors(&self) -> [SubspaceState; 3] {
        [self.v1, self.v2, self.v3]
    }
}

pub fn analytic_eigensystem(p: &ModelParams) -> Result<EigenSystem> {
    p.validate()?;
    if p.g2 == 0.0 {
        return Err(Error::DegenerateRatio);
    }
    if !p.equal_epsilons() {
        return Err(Error::UnequalEpsilons { eps1: p.eps1, eps2: p.eps2 });
    }
    let (g1, g2, eps, w) = (p.g1, p.g2, p.eps1, p.omega);
    let root = (eps * eps + 4.0 * (g1 * g1 + g2 * g2) - 2.0 * eps * w + w * w).sqrt();
    let e2 = 0.5 * (-eps + w - root);
    let e3 = 0.5 * (-eps + w + root);
    let v1 = SubspaceState::from_real(-g2 / g1, 0.0, 1.0).normalized();
    let v2 = SubspaceState::from_real(g1 / g2, -(eps - w + root) / (2.0 * g2), 1.0).normalized();
    let v3 = SubspaceState::from_real(g1 / g2, -(eps - w - root) / (2.0 * g2), 1.0).normalized();
    Ok(EigenSystem { e1: 0.0, e2, e3, v1, v2, v3 })
}
