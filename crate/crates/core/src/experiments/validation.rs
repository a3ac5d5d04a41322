//! Quick invariant suite behind `cavent validate`.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closed::{effective_evolution, propagate_spectral, ClosedDynamics};
use crate::density::DensityMatrix;
use crate::error::Result;
use crate::hilbert::{embed_single_excitation, extract_single_excitation, partial_trace_cavity, SubspaceState};
use crate::measures::{concurrence, linspace};
use crate::model::{analytic_eigensystem, hamiltonian_full, single_excitation_block, ModelParams};
use crate::numerics::hermitian_eig;
use crate::open::{basis_density, evolve_open, liouvillian, steady_state, LindbladSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, worst: f64, tol: f64) -> Check {
    Check { name, passed: worst <= tol, detail: format!("worst {worst:.3e} (tolerance {tol:.0e})") }
}

fn random_state(rng: &mut ChaCha8Rng) -> SubspaceState {
    let mut c = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    SubspaceState::new(c(), c(), c()).normalized()
}

fn eigensystem(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let p = ModelParams {
            g2: rng.gen_range(0.05..2.0),
            omega: rng.gen_range(0.0..60.0),
            eps1: 0.0,
            ..ModelParams::default()
        };
        let p = ModelParams { eps2: p.eps1, ..p };
        let es = analytic_eigensystem(&p)?;
        let num = hermitian_eig(&single_excitation_block(&p))?;
        let mut analytic = es.energies().to_vec();
        analytic.sort_by(f64::total_cmp);
        for (a, b) in analytic.iter().zip(&num.values) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(check("analytic eigenvalues match the numeric block", worst, 1e-9))
}

fn wootters(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let s = random_state(rng);
        let c = concurrence(&s.reduced_qubit_state())?;
        worst = worst.max((c - 2.0 * (s.alpha * s.gamma).norm()).abs());
    }
    Ok(check("Wootters concurrence equals 2|alpha gamma| on pure states", worst, 1e-10))
}

fn unitary_norm(rng: &mut ChaCha8Rng) -> Result<Check> {
    let p = ModelParams { g2: rng.gen_range(0.1..1.0), n_max: 2, ..ModelParams::default() };
    let psi0 = embed_single_excitation(&random_state(rng), 2)?;
    let states = propagate_spectral(&hamiltonian_full(&p)?, &psi0, &linspace(0.0, 1e4, 11))?;
    let mut worst: f64 = 0.0;
    for s in &states {
        worst = worst.max((s.norm() - 1.0).abs());
        worst = worst.max(extract_single_excitation(s)?.leaked_norm);
    }
    Ok(check("unitary evolution keeps norm and excitation number", worst, 1e-10))
}

fn effective_vs_exact() -> Result<Check> {
    let p = ModelParams::dispersive(1.0);
    let d = ClosedDynamics::from_qubit2_excited(&p)?;
    let mut worst: f64 = 0.0;
    for t in linspace(0.0, 40.0 * std::f64::consts::PI, 2001) {
        worst = worst.max((d.concurrence_at(t) - effective_evolution(&p, t)?.concurrence()).abs());
    }
    Ok(check("effective and exact concurrence agree (g2 = g1)", worst, 0.02))
}

fn lindblad_hygiene() -> Result<Check> {
    let p = ModelParams { n_max: 3, ..ModelParams::open_resonant(0.7, 0.1) };
    let rho0 = basis_density(&p, 0, 0, 1)?;
    let traj = evolve_open(&p, &rho0, &linspace(0.0, 50.0, 26))?;
    let mut worst: f64 = 0.0;
    for rho in &traj {
        worst = worst.max((rho.trace() - 1.0).abs());
        worst = worst.max(rho.matrix().hermitian_defect());
        worst = worst.max(-hermitian_eig(&rho.matrix().hermitian_part())?.values[0]);
    }
    Ok(check("master equation keeps trace, Hermiticity and positivity", worst, 1e-8))
}

fn steady() -> Result<Check> {
    let p = ModelParams { n_max: 3, ..ModelParams::open_resonant(1.0, 0.05) };
    let rho = steady_state(&p)?;
    let spec = LindbladSpec::from_params(&p)?;
    let d = rho.dim();
    let vec_rho = crate::numerics::ComplexVector::from_vec((0..d * d).map(|k| rho.matrix()[(k % d, k / d)]).collect());
    let residual = liouvillian(&spec).mul_vec(&vec_rho).as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let reduced: DensityMatrix = partial_trace_cavity(&rho, p.n_max)?;
    concurrence(&reduced)?;
    Ok(check("steady state is annihilated by the Liouvillian", residual, 1e-9))
}

/// Runs every check; the seed only drives the random parameter draws.
pub fn run_validation(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(vec![
        eigensystem(&mut rng)?,
        wootters(&mut rng)?,
        unitary_norm(&mut rng)?,
        effective_vs_exact()?,
        lindblad_hygiene()?,
        steady()?,
    ])
}
