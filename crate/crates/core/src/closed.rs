//! Unitary evolution, the dispersive effective solution, and MES analytics.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::hilbert::{Qubit, SubspaceState};
use crate::measures::concurrence_x_entries;
use crate::model::{single_excitation_block, ModelParams};
use crate::numerics::{hermitian_eig, ComplexMatrix, ComplexVector, HermitianEigen};

const NORM_TOL: f64 = 1e-10;

fn phase(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

/// `exp(-i H t)` applied through the spectral decomposition of `H`.
#[derive(Clone, Debug)]
pub struct SpectralPropagator {
    eig: HermitianEigen,
}

impl SpectralPropagator {
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        Ok(Self { eig: hermitian_eig(h)? })
    }

    pub fn dim(&self) -> usize {
        self.eig.values.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.eig.values
    }

    /// Eigen-decomposition of `psi0`, reusable for many times.
    pub fn coefficients(&self, psi0: &ComplexVector) -> Result<Vec<C64>> {
        if psi0.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("state of dimension {}", self.dim()),
                found: format!("{}", psi0.dim()),
            });
        }
        Ok(self.eig.vectors.iter().map(|v| v.dot(psi0)).collect())
    }

    pub fn evolve_coefficients(&self, coeffs: &[C64], t: f64) -> ComplexVector {
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for ((c, v), e) in coeffs.iter().zip(&self.eig.vectors).zip(&self.eig.values) {
            let a = c * phase(-e * t);
            for (o, x) in out.iter_mut().zip(v.as_slice()) {
                *o += a * x;
            }
        }
        ComplexVector::from_vec(out)
    }

    pub fn evolve(&self, psi0: &ComplexVector, t: f64) -> Result<ComplexVector> {
        Ok(self.evolve_coefficients(&self.coefficients(psi0)?, t))
    }
}

/// `psi(t) = V exp(-i E t) V^dagger psi0` at each of `times`.
pub fn propagate_spectral(h: &ComplexMatrix, psi0: &ComplexVector, times: &[f64]) -> Result<Vec<ComplexVector>> {
    let norm = psi0.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let prop = SpectralPropagator::new(h)?;
    let coeffs = prop.coefficients(psi0)?;
    Ok(times.iter().map(|&t| prop.evolve_coefficients(&coeffs, t)).collect())
}

/// Exact evolution inside the single-excitation block `{|100>, |010>, |001>}`.
///
/// Total excitation is conserved, so this is the full dynamics for any
/// initial state in the block, at a 3x3 cost per time point.
#[derive(Clone, Debug)]
pub struct ClosedDynamics {
    energies: [f64; 3],
    vectors: [[C64; 3]; 3],
    coeffs: [C64; 3],
}

impl ClosedDynamics {
    pub fn new(p: &ModelParams, initial: SubspaceState) -> Result<Self> {
        p.validate()?;
        if !initial.is_normalized(NORM_TOL) {
            return Err(Error::NotNormalized(initial.norm_sqr().sqrt()));
        }
        let eig = hermitian_eig(&single_excitation_block(p))?;
        let psi0 = initial.to_vector();
        let mut energies = [0.0; 3];
        let mut vectors = [[C64::new(0.0, 0.0); 3]; 3];
        let mut coeffs = [C64::new(0.0, 0.0); 3];
        for k in 0..3 {
            energies[k] = eig.values[k];
            vectors[k].copy_from_slice(eig.vectors[k].as_slice());
            coeffs[k] = eig.vectors[k].dot(&psi0);
        }
        Ok(Self { energies, vectors, coeffs })
    }

    /// Starts from `|001>`.
    pub fn from_qubit2_excited(p: &ModelParams) -> Result<Self> {
        Self::new(p, SubspaceState::qubit2_excited())
    }

    pub fn state_at(&self, t: f64) -> SubspaceState {
        let mut out = [C64::new(0.0, 0.0); 3];
        for k in 0..3 {
            let a = self.coeffs[k] * phase(-self.energies[k] * t);
            for (o, x) in out.iter_mut().zip(&self.vectors[k]) {
                *o += a * x;
            }
        }
        SubspaceState::new(out[0], out[1], out[2])
    }

    pub fn reduced_state_at(&self, t: f64) -> DensityMatrix {
        self.state_at(t).reduced_qubit_state()
    }

    pub fn concurrence_at(&self, t: f64) -> f64 {
        let s = self.state_at(t);
        // reduced state: |00> <- |beta|^2, |01>/|10> block from (gamma, alpha), |11> empty
        concurrence_x_entries(
            [s.beta.norm_sqr(), s.gamma.norm_sqr(), s.alpha.norm_sqr(), 0.0],
            (s.gamma * s.alpha.conj()).norm(),
            0.0,
        )
    }

    /// Largest off-diagonal modulus of the reduced state; only the
    /// `(01, 10)` entry can be nonzero here.
    pub fn coherence_at(&self, t: f64) -> f64 {
        let s = self.state_at(t);
        (s.gamma * s.alpha.conj()).norm()
    }

    pub fn sz_at(&self, t: f64, which: Qubit) -> f64 {
        let s = self.state_at(t);
        let excited = match which {
            Qubit::One => s.alpha.norm_sqr(),
            Qubit::Two => s.gamma.norm_sqr(),
        };
        excited - 0.5
    }

    /// Largest minus smallest block energy; sets the fastest oscillation.
    pub fn spectral_spread(&self) -> f64 {
        self.energies[2] - self.energies[0]
    }

    /// Sampling step for metric extraction over a horizon `t_max`:
    /// a hundredth of the fastest period, and at least 2000 samples.
    pub fn sampling_step(&self, t_max: f64) -> f64 {
        let spread = self.spectral_spread();
        let fast = if spread > 0.0 { 0.01 * 2.0 * PI / spread } else { f64::INFINITY };
        fast.min(t_max / 2000.0)
    }

    /// Uniform grid on `[0, t_max]` at [`Self::sampling_step`].
    pub fn sampling_grid(&self, t_max: f64) -> Vec<f64> {
        let dt = self.sampling_step(t_max);
        let n = (t_max / dt).ceil() as usize;
        (0..=n).map(|k| t_max * k as f64 / n as f64).collect()
    }
}

/// Two-qubit state `amp01 |01> + amp10 |10>` under the effective Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveEvolution {
    pub t: f64,
    pub amp01: C64,
    pub amp10: C64,
}

impl EffectiveEvolution {
    pub fn concurrence(&self) -> f64 {
        (2.0 * (self.amp01 * self.amp10).norm()).min(1.0)
    }

    /// Reduced state on `|00>, |01>, |10>, |11>`.
    pub fn reduced_state(&self) -> DensityMatrix {
        SubspaceState::new(self.amp10, C64::new(0.0, 0.0), self.amp01).reduced_qubit_state()
    }
}

/// Flip-flop phase `Theta_t = t (g1^2 + g2^2) / delta`.
fn effective_phase(p: &ModelParams, t: f64) -> f64 {
    t * (p.g1 * p.g1 + p.g2 * p.g2) / p.delta()
}

/// Effective evolution of `|01>` (qubit 2 excited), global phase dropped.
pub fn effective_evolution(p: &ModelParams, t: f64) -> Result<EffectiveEvolution> {
    p.validate()?;
    if p.delta() == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    let g2sum = p.g1 * p.g1 + p.g2 * p.g2;
    let z = phase(-effective_phase(p, t)) - 1.0;
    Ok(EffectiveEvolution {
        t,
        amp01: 1.0 + z * (p.g2 * p.g2 / g2sum),
        amp10: z * (p.g1 * p.g2 / g2sum),
    })
}

/// Smallest `g2/g1 <= 1` for which an MES can form: `sqrt(3 - 2 sqrt 2)`.
pub fn mes_threshold_ratio() -> f64 {
    (3.0 - 2.0 * 2f64.sqrt()).sqrt()
}

/// `n`-th MES time for equal couplings, `(2n + 1) pi |delta| / (4 g^2)`.
pub fn mes_times_uniform(p: &ModelParams, n: usize) -> Result<f64> {
    p.validate()?;
    if (p.g1 - p.g2).abs() > 1e-12 * p.g1 {
        return Err(Error::NonUniformCoupling { g1: p.g1, g2: p.g2 });
    }
    if p.delta() == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    Ok((2 * n + 1) as f64 * PI * p.delta().abs() / (4.0 * p.g1 * p.g1))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MesAnalytics {
    pub ratio: f64,
    /// `(g1^2 - g2^2)^2 / (4 g1^2 g2^2)`; infinite when `g2 = 0`.
    pub cos_theta: f64,
    /// `arccos(cos_theta)` in `[0, pi/2]`, when `threshold_ok`.
    pub theta: Option<f64>,
    /// Time for `Theta_t` to advance by `2 pi`.
    pub period: f64,
    /// Minimum time between consecutive MES.
    pub lapse: Option<f64>,
    pub threshold_ok: bool,
}

impl MesAnalytics {
    /// MES times inside the first period, at `Theta_t = pi -+ theta`.
    pub fn mes_times_first_period(&self) -> Option<(f64, f64)> {
        let theta = self.theta?;
        let scale = self.period / (2.0 * PI);
        Some(((PI - theta) * scale, (PI + theta) * scale))
    }
}

pub fn mes_lapse_analytic(p: &ModelParams) -> Result<MesAnalytics> {
    p.validate()?;
    if p.delta() == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    let (g1s, g2s) = (p.g1 * p.g1, p.g2 * p.g2);
    let raw = (g1s - g2s).powi(2) / (4.0 * g1s * g2s);
    let period = 2.0 * PI * p.delta().abs() / (g1s + g2s);
    // rounding at the threshold ratio itself must not flip the verdict
    let threshold_ok = raw <= 1.0 + 1e-12;
    let cos_theta = if threshold_ok { raw.min(1.0) } else { raw };
    let theta = threshold_ok.then(|| cos_theta.acos());
    let lapse = theta.map(|th| 2.0 * th * p.delta().abs() / (g1s + g2s));
    Ok(MesAnalytics { ratio: p.ratio(), cos_theta, theta, period, lapse, threshold_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{embed_single_excitation, extract_single_excitation};
    use crate::model::{analytic_eigensystem, hamiltonian_full};

    #[test]
    fn identity_at_time_zero() {
        let p = ModelParams { n_max: 2, ..ModelParams::dispersive(0.6) };
        let h = hamiltonian_full(&p).unwrap();
        let psi0 = embed_single_excitation(&SubspaceState::qubit2_excited(), 2).unwrap();
        let out = propagate_spectral(&h, &psi0, &[0.0]).unwrap();
        assert!(out[0].max_abs_diff(&psi0) < 1e-13);
    }

    #[test]
    fn eigenstate_only_rotates() {
        let p = ModelParams::resonant(0.5);
        let es = analytic_eigensystem(&p).unwrap();
        let dyn3 = ClosedDynamics::new(&p, es.v3).unwrap();
        for t in [0.0, 1.3, 17.0] {
            let s = dyn3.state_at(t);
            let expected = es.v3.to_vector().scale(phase(-es.e3 * t));
            assert!(s.to_vector().max_abs_diff(&expected) < 1e-12);
        }
    }

    #[test]
    fn block_matches_full_space() {
        let p = ModelParams { n_max: 2, ..ModelParams::dispersive(0.7) };
        let h = hamiltonian_full(&p).unwrap();
        let psi0 = embed_single_excitation(&SubspaceState::qubit2_excited(), 2).unwrap();
        let times = [0.5, 10.0, 123.4];
        let full = propagate_spectral(&h, &psi0, &times).unwrap();
        let block = ClosedDynamics::from_qubit2_excited(&p).unwrap();
        for (t, v) in times.iter().zip(&full) {
            let ex = extract_single_excitation(v).unwrap();
            assert!(ex.leaked_norm < 1e-10);
            assert!(ex.state.to_vector().max_abs_diff(&block.state_at(*t).to_vector()) < 1e-10);
            let rho = block.reduced_state_at(*t);
            assert!((block.coherence_at(*t) - crate::measures::coherence_offdiag(&rho).unwrap()).abs() < 1e-15);
            assert!((block.concurrence_at(*t) - crate::measures::concurrence_x(rho.matrix())).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_unnormalised_start() {
        let h = ComplexMatrix::identity(8);
        assert!(matches!(propagate_spectral(&h, &ComplexVector::zeros(8), &[1.0]), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn effective_start_and_mes() {
        let p = ModelParams::dispersive(1.0);
        let e = effective_evolution(&p, 0.0).unwrap();
        assert_eq!((e.amp01, e.amp10), (C64::new(1.0, 0.0), C64::new(0.0, 0.0)));
        let t = mes_times_uniform(&p, 0).unwrap();
        assert!((t - 10.0 * PI).abs() < 1e-12);
        let e = effective_evolution(&p, t).unwrap();
        assert!((e.amp01.norm() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((e.amp10.norm() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((e.concurrence() - 1.0).abs() < 1e-12);
        assert!((mes_times_uniform(&p, 1).unwrap() - 3.0 * t).abs() < 1e-12);
    }

    #[test]
    fn uniform_requires_equal_couplings() {
        assert!(matches!(mes_times_uniform(&ModelParams::dispersive(0.9), 0), Err(Error::NonUniformCoupling { .. })));
        assert_eq!(mes_times_uniform(&ModelParams::resonant(1.0), 0).unwrap_err(), Error::ZeroDetuning);
        assert_eq!(effective_evolution(&ModelParams::resonant(1.0), 1.0).unwrap_err(), Error::ZeroDetuning);
    }

    #[test]
    fn threshold_value() {
        let r = mes_threshold_ratio();
        assert!((r - 0.414_213_562_373_095).abs() < 1e-14);
        assert!((r * r + 1.0 / (r * r) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn analytic_lapse_values() {
        let a = mes_lapse_analytic(&ModelParams::dispersive(1.0)).unwrap();
        assert_eq!(a.cos_theta, 0.0);
        assert!((a.theta.unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((a.lapse.unwrap() - 20.0 * PI).abs() < 1e-12);
        let uniform_gap = mes_times_uniform(&ModelParams::dispersive(1.0), 1).unwrap()
            - mes_times_uniform(&ModelParams::dispersive(1.0), 0).unwrap();
        assert!((a.lapse.unwrap() - uniform_gap).abs() < 1e-12);

        let a = mes_lapse_analytic(&ModelParams::dispersive(0.8)).unwrap();
        assert!((a.cos_theta - 0.050625).abs() < 1e-12);
        assert!((a.theta.unwrap() - 1.5201).abs() < 1e-3);
        assert!((a.lapse.unwrap() - 74.15).abs() < 0.05);

        let a = mes_lapse_analytic(&ModelParams::dispersive(mes_threshold_ratio())).unwrap();
        assert!(a.threshold_ok);
        assert!(a.lapse.unwrap() < 1e-4);

        let a = mes_lapse_analytic(&ModelParams::dispersive(0.3)).unwrap();
        assert!(!a.threshold_ok && a.lapse.is_none() && a.theta.is_none());
    }

    #[test]
    fn mes_times_inside_period() {
        let a = mes_lapse_analytic(&ModelParams::dispersive(0.6)).unwrap();
        let (t1, t2) = a.mes_times_first_period().unwrap();
        assert!((t2 - t1 - a.lapse.unwrap()).abs() < 1e-12);
        let p = ModelParams::dispersive(0.6);
        for t in [t1, t2] {
            assert!((effective_evolution(&p, t).unwrap().concurrence() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_step_rule() {
        let d = ClosedDynamics::from_qubit2_excited(&ModelParams::dispersive(1.0)).unwrap();
        assert!((d.spectral_spread() - 1608f64.sqrt()).abs() < 1e-10);
        assert!((d.sampling_step(400.0) - 0.02 * PI / 1608f64.sqrt()).abs() < 1e-15);
        assert_eq!(d.sampling_step(1.0), 1.0 / 2000.0);
        let g = d.sampling_grid(1.0);
        assert_eq!(g.len(), 2001);
        assert_eq!(*g.last().unwrap(), 1.0);
    }
}
