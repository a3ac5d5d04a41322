//! Driven-dissipative dynamics under the Lindblad equation
//! `d rho/dt = -i[H, rho] + sum_k rate_k (2 A rho A^dagger - A^dagger A rho - rho A^dagger A) / 2`.
//!
//! Vectorisation is column-stacking: `vec(rho)[i + j * dim] = rho[i][j]`, so
//! `vec(A X B) = (B^T kron A) vec(X)`.

use num_complex::Complex64 as C64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::hilbert::{basis_index, build_operator_set, full_dim, partial_trace_cavity};
use crate::measures::concurrence;
use crate::model::{hamiltonian_driven_with, ModelParams};
use crate::numerics::{integrate_adaptive, ComplexMatrix, ComplexVector, Lu, OdeOptions};

/// Outputs with an eigenvalue below this are rejected as unphysical.
pub const POSITIVITY_FAIL: f64 = -1e-6;
/// Maximum `|L rho_ss|` accepted from the steady-state solve.
pub const STEADY_RESIDUAL_TOL: f64 = 1e-9;
/// Relative pivot size below which the constrained Liouvillian counts as singular.
pub const NULL_SPACE_TOL: f64 = 1e-10;
/// Steady-state concurrence change that counts as converged in the Fock cutoff.
pub const TRUNCATION_TOL: f64 = 1e-6;
/// Largest cutoff tried by [`check_truncation_convergence`].
pub const MAX_N_MAX: usize = 16;

/// Nonzero entries of a square matrix.
#[derive(Clone, Debug)]
struct Sparse {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl Sparse {
    fn from_dense(m: &ComplexMatrix) -> Self {
        let mut entries = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if m[(i, j)] != C64::new(0.0, 0.0) {
                    entries.push((i, j, m[(i, j)]));
                }
            }
        }
        Self { dim: m.rows(), entries }
    }

    /// `out += s * A x` for row-major `x`.
    fn left_acc(&self, x: &[C64], s: C64, out: &mut [C64]) {
        let d = self.dim;
        for &(i, k, v) in &self.entries {
            let f = s * v;
            let (dst, src) = (&mut out[i * d..(i + 1) * d], &x[k * d..(k + 1) * d]);
            for (o, a) in dst.iter_mut().zip(src) {
                *o += f * a;
            }
        }
    }

    /// `out += s * x A^dagger` for row-major `x`.
    fn right_adj_acc(&self, x: &[C64], s: C64, out: &mut [C64]) {
        let d = self.dim;
        for &(j, k, v) in &self.entries {
            let f = s * v.conj();
            for i in 0..d {
                out[i * d + j] += f * x[i * d + k];
            }
        }
    }
}

/// Hamiltonian plus `(rate, operator)` collapse channels.
#[derive(Clone, Debug)]
pub struct LindbladSpec {
    hamiltonian: ComplexMatrix,
    collapse: Vec<(f64, ComplexMatrix)>,
    heff: Sparse,
    jumps: Vec<Sparse>,
}

impl LindbladSpec {
    pub fn new(hamiltonian: ComplexMatrix, collapse: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        let dim = hamiltonian.rows();
        if !hamiltonian.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square Hamiltonian".into(),
                found: format!("{}x{}", hamiltonian.rows(), hamiltonian.cols()),
            });
        }
        let mut heff = hamiltonian.clone();
        let mut jumps = Vec::new();
        for (rate, a) in &collapse {
            if !(rate.is_finite() && *rate >= 0.0) {
                return Err(Error::InvalidParams(format!("collapse rate {rate} must be finite and non-negative")));
            }
            if a.rows() != dim || a.cols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: format!("{dim}x{dim} collapse operator"),
                    found: format!("{}x{}", a.rows(), a.cols()),
                });
            }
            if *rate == 0.0 {
                continue;
            }
            heff = &heff - &a.adjoint().matmul(a).scale(C64::new(0.0, 0.5 * rate));
            jumps.push(Sparse::from_dense(&a.scale_real(rate.sqrt())));
        }
        Ok(Self { heff: Sparse::from_dense(&heff), jumps, hamiltonian, collapse })
    }

    /// Driven Hamiltonian with `(kappa, a)`, `(gamma, S1^-)`, `(gamma, S2^-)`.
    pub fn from_params(p: &ModelParams) -> Result<Self> {
        p.validate()?;
        let ops = build_operator_set(p.n_max)?;
        let h = hamiltonian_driven_with(p, &ops);
        let [s1, s2] = ops.s_minus;
        Self::new(h, vec![(p.kappa, ops.a), (p.gamma, s1), (p.gamma, s2)])
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.rows()
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn collapse(&self) -> &[(f64, ComplexMatrix)] {
        &self.collapse
    }

    pub fn has_dissipation(&self) -> bool {
        !self.jumps.is_empty()
    }

    /// Row-major `rho` to row-major derivative; `out` is overwritten.
    ///
    /// Uses `-i (Heff rho - rho Heff^dagger) + sum L rho L^dagger` with
    /// `Heff = H - (i/2) sum rate A^dagger A` and `L = sqrt(rate) A`.
    pub fn rhs_into(&self, rho: &[C64], out: &mut [C64], scratch: &mut Vec<C64>) {
        let minus_i = C64::new(0.0, -1.0);
        out.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
        self.heff.left_acc(rho, minus_i, out);
        self.heff.right_adj_acc(rho, -minus_i, out);
        let one = C64::new(1.0, 0.0);
        for l in &self.jumps {
            scratch.clear();
            scratch.resize(rho.len(), C64::new(0.0, 0.0));
            l.left_acc(rho, one, scratch);
            l.right_adj_acc(scratch, one, out);
        }
    }
}

fn check_dim(spec: &LindbladSpec, m: &ComplexMatrix) -> Result<()> {
    let d = spec.dim();
    if m.rows() != d || m.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: format!("{d}x{d} density matrix"),
            found: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    Ok(())
}

/// `d rho / dt` for any square matrix of the right size.
pub fn lindblad_rhs(spec: &LindbladSpec, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dim(spec, rho)?;
    let d = spec.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    spec.rhs_into(rho.as_slice(), out.as_mut_slice(), &mut Vec::new());
    Ok(out)
}

/// Dense superoperator acting on column-stacked `vec(rho)`.
pub fn liouvillian(spec: &LindbladSpec) -> ComplexMatrix {
    let d = spec.dim();
    let n = d * d;
    let mut l = ComplexMatrix::zeros(n, n);
    let i = C64::new(0.0, 1.0);
    // -i Heff rho: (I kron Heff)
    for &(r, k, v) in &spec.heff.entries {
        for j in 0..d {
            l[(r + j * d, k + j * d)] += -i * v;
        }
    }
    // +i rho Heff^dagger: (conj(Heff) kron I)
    for &(c, k, v) in &spec.heff.entries {
        for r in 0..d {
            l[(r + c * d, r + k * d)] += i * v.conj();
        }
    }
    // L rho L^dagger: (conj(L) kron L)
    for jump in &spec.jumps {
        for &(r, k, a) in &jump.entries {
            for &(c, m, b) in &jump.entries {
                l[(r + c * d, k + m * d)] += a * b.conj();
            }
        }
    }
    l
}

fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    m.hermitian_part()
}

/// Unique `rho` with `L rho = 0` and unit trace.
///
/// The last row of `L` is replaced by the trace functional and `L' x = e_last`
/// is solved directly; the residual is then checked against the original `L`.
pub fn steady_state(p: &ModelParams) -> Result<DensityMatrix> {
    let spec = LindbladSpec::from_params(p)?;
    steady_state_of(&spec)
}

pub fn steady_state_of(spec: &LindbladSpec) -> Result<DensityMatrix> {
    if !spec.has_dissipation() {
        return Err(Error::NoDissipation);
    }
    let d = spec.dim();
    let n = d * d;
    let l = liouvillian(spec);
    let mut constrained = l.clone();
    for c in 0..n {
        constrained[(n - 1, c)] = C64::new(0.0, 0.0);
    }
    for k in 0..d {
        constrained[(n - 1, k + k * d)] = C64::new(1.0, 0.0);
    }
    let lu = match Lu::factor(&constrained, NULL_SPACE_TOL) {
        Ok(lu) => lu,
        Err(Error::Singular { .. }) => return Err(Error::NonUniqueSteadyState),
        Err(e) => return Err(e),
    };
    let x = lu.solve(&ComplexVector::basis(n, n - 1))?;
    let residual = l.mul_vec(&x).as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if residual > STEADY_RESIDUAL_TOL {
        return Err(Error::SteadyStateResidual(residual));
    }
    let rho = ComplexMatrix::from_fn(d, d, |i, j| x[i + j * d]);
    DensityMatrix::new(hermitize(&rho))
}

/// Concurrence of the two-qubit reduced steady state.
pub fn steady_state_concurrence(p: &ModelParams) -> Result<f64> {
    let rho = steady_state(p)?;
    concurrence(&partial_trace_cavity(&rho, p.n_max)?)
}

/// `|q1 n q2><q1 n q2|` on the full space of `p`.
pub fn basis_density(p: &ModelParams, q1: usize, photons: usize, q2: usize) -> Result<DensityMatrix> {
    if photons > p.n_max || q1 > 1 || q2 > 1 {
        return Err(Error::InvalidArgument(format!("|{q1} {photons} {q2}> outside cutoff {}", p.n_max)));
    }
    let v = ComplexVector::basis(full_dim(p.n_max), basis_index(p.n_max, q1, photons, q2));
    DensityMatrix::from_pure(&v)
}

/// Default integrator tolerances for density-matrix trajectories.
pub fn default_open_options() -> OdeOptions {
    OdeOptions::with_tolerances(1e-10, 1e-12)
}

pub fn evolve_open(p: &ModelParams, rho0: &DensityMatrix, times: &[f64]) -> Result<Vec<DensityMatrix>> {
    evolve_open_with(p, rho0, times, &default_open_options())
}

/// Integrates the master equation from `rho0`, sampling at `times`.
///
/// Samples are returned as produced by the integrator (no re-projection), so
/// trace and Hermiticity drift stay observable.
pub fn evolve_open_with(
    p: &ModelParams,
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<DensityMatrix>> {
    let spec = LindbladSpec::from_params(p)?;
    evolve_spec(&spec, rho0, times, opts)
}

pub fn evolve_spec(
    spec: &LindbladSpec,
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<DensityMatrix>> {
    check_dim(spec, rho0.matrix())?;
    rho0.validate()?;
    let d = spec.dim();
    let mut scratch = Vec::with_capacity(d * d);
    let traj = integrate_adaptive(
        |_t, y, dy| spec.rhs_into(y, dy, &mut scratch),
        rho0.matrix().as_slice(),
        times,
        opts,
    )?;
    traj.into_iter()
        .zip(times)
        .map(|(y, &t)| {
            let m = ComplexMatrix::from_row_major(d, d, y)?;
            let min_eigenvalue = crate::numerics::hermitian_eig(&hermitize(&m))?.values[0];
            if min_eigenvalue < POSITIVITY_FAIL {
                return Err(Error::PositivityViolation { t, min_eigenvalue });
            }
            Ok(DensityMatrix::new_unchecked(m))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationCheck {
    pub converged: bool,
    pub n_max_used: usize,
    /// `|E(n) - E(n + 2)|` at the accepted cutoff.
    pub delta: f64,
}

/// Compares steady-state concurrence at `n` and `n + 2`, starting at
/// `p.n_max` and doubling `n` until the change drops below [`TRUNCATION_TOL`].
pub fn check_truncation_convergence(p: &ModelParams) -> Result<TruncationCheck> {
    p.validate()?;
    let mut n = p.n_max;
    let mut delta = f64::NAN;
    while n <= MAX_N_MAX {
        let e_lo = steady_state_concurrence(&p.with_n_max(n))?;
        let e_hi = steady_state_concurrence(&p.with_n_max(n + 2))?;
        delta = (e_lo - e_hi).abs();
        if delta < TRUNCATION_TOL {
            return Ok(TruncationCheck { converged: true, n_max_used: n, delta });
        }
        n *= 2;
    }
    Err(Error::NotConverged { n_max: MAX_N_MAX, delta })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_density(dim: usize, seed: u64) -> DensityMatrix {
        // deterministic pseudo-random positive matrix B B^dagger / tr
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let b = ComplexMatrix::from_fn(dim, dim, |_, _| C64::new(next(), next()));
        let m = b.matmul(&b.adjoint());
        let tr = m.trace().re;
        DensityMatrix::new(m.scale_real(1.0 / tr)).unwrap()
    }

    #[test]
    fn rhs_is_traceless_and_hermitian() {
        let p = ModelParams { n_max: 2, ..ModelParams::open_resonant(0.7, 0.3) };
        let spec = LindbladSpec::from_params(&p).unwrap();
        let rho = random_density(spec.dim(), 7);
        let r = lindblad_rhs(&spec, rho.matrix()).unwrap();
        assert!(r.trace().norm() < 1e-14);
        assert!(r.hermitian_defect() < 1e-14);
    }

    #[test]
    fn rhs_matches_textbook_form() {
        let p = ModelParams { n_max: 2, ..ModelParams::open_resonant(0.4, 0.2) };
        let spec = LindbladSpec::from_params(&p).unwrap();
        let rho = random_density(spec.dim(), 3);
        let m = rho.matrix();
        let h = spec.hamiltonian();
        let mut expected = h.commutator(m).scale(C64::new(0.0, -1.0));
        for (rate, a) in spec.collapse() {
            let ad = a.adjoint();
            let ada = ad.matmul(a);
            let term = &(&a.matmul(m).matmul(&ad).scale_real(2.0) - &ada.matmul(m)) - &m.matmul(&ada);
            expected = &expected + &term.scale_real(rate / 2.0);
        }
        assert!(lindblad_rhs(&spec, m).unwrap().max_abs_diff(&expected) < 1e-13);
    }

    #[test]
    fn vacuum_is_dark() {
        let p = ModelParams { d: 0.0, ..ModelParams::open_resonant(0.8, 0.0) };
        let spec = LindbladSpec::from_params(&p).unwrap();
        let vac = basis_density(&p, 0, 0, 0).unwrap();
        assert_eq!(lindblad_rhs(&spec, vac.matrix()).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn liouvillian_matches_rhs() {
        let p = ModelParams { n_max: 1, ..ModelParams::open_resonant(0.6, 0.1) };
        let spec = LindbladSpec::from_params(&p).unwrap();
        let d = spec.dim();
        let rho = random_density(d, 11);
        let vec_rho = ComplexVector::from_vec((0..d * d).map(|k| rho.matrix()[(k % d, k / d)]).collect());
        let lv = liouvillian(&spec).mul_vec(&vec_rho);
        let r = lindblad_rhs(&spec, rho.matrix()).unwrap();
        for k in 0..d * d {
            assert!((lv[k] - r[(k % d, k / d)]).norm() < 1e-13);
        }
    }

    #[test]
    fn undriven_steady_state_is_vacuum() {
        let p = ModelParams::open_resonant(1.0, 0.0);
        let rho = steady_state(&p).unwrap();
        let k = basis_index(p.n_max, 0, 0, 0);
        assert!(rho.matrix()[(k, k)].re > 1.0 - 1e-6);
    }

    #[test]
    fn steady_state_errors() {
        let closed = ModelParams { kappa: 0.0, gamma: 0.0, ..ModelParams::open_resonant(1.0, 0.05) };
        assert_eq!(steady_state(&closed).unwrap_err(), Error::NoDissipation);
        // without qubit decay the undriven dark state survives next to the vacuum
        let dark = ModelParams { gamma: 0.0, n_max: 1, ..ModelParams::open_resonant(1.0, 0.0) };
        assert_eq!(steady_state(&dark).unwrap_err(), Error::NonUniqueSteadyState);
    }

    #[test]
    fn closed_limit_matches_unitary() {
        let p = ModelParams { kappa: 0.0, gamma: 0.0, n_max: 1, ..ModelParams::open_resonant(0.7, 0.0) };
        let rho0 = basis_density(&p, 0, 0, 1).unwrap();
        let times = [0.0, 1.0, 5.0];
        let out = evolve_open(&p, &rho0, &times).unwrap();
        let h = crate::model::hamiltonian_driven(&p).unwrap();
        let psi0 = ComplexVector::basis(full_dim(1), basis_index(1, 0, 0, 1));
        let psi = crate::closed::propagate_spectral(&h, &psi0, &times).unwrap();
        for (rho, v) in out.iter().zip(&psi) {
            assert!(rho.fidelity_pure(v) > 1.0 - 1e-8);
        }
    }

    #[test]
    fn evolve_rejects_wrong_dimension() {
        let p = ModelParams::open_resonant(1.0, 0.0);
        let rho = basis_density(&p.with_n_max(1), 0, 0, 0).unwrap();
        assert!(matches!(evolve_open(&p, &rho, &[0.0, 1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn undriven_truncation_converges_immediately() {
        let p = ModelParams { n_max: 1, ..ModelParams::open_resonant(1.0, 0.0) };
        let c = check_truncation_convergence(&p).unwrap();
        assert!(c.converged);
        assert_eq!(c.n_max_used, 1);
    }
}
