//! Named, reproducible numerical experiments that write CSV datasets.
//!
//! Each scenario starts from its own defaults, applies `key=value` overrides
//! in order, and writes one or more CSV files whose header records the tool
//! version, the fully resolved configuration, and the overrides verbatim.
//! Sweep points are evaluated on a rayon pool and gathered by grid index, so
//! the output does not depend on the thread count.

mod config;
mod csv;
pub mod validation;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use config::{grid, read_config_file, split_pair, Config, KEYS};
pub use csv::{format_value, render_csv, write_atomic, Dataset};

use crate::closed::{mes_lapse_analytic, ClosedDynamics};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::hilbert::{basis_index, partial_trace_cavity, Qubit};
use crate::measures::{concurrence, eigenstate_overlaps, linspace, mes_lapse_numeric, peak_value, TimeSeries};
use crate::model::{analytic_eigensystem, ModelParams};
use crate::numerics::OdeOptions;
use crate::open::{basis_density, evolve_open_with, steady_state};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable consulted when no output directory is configured.
pub const OUT_DIR_ENV: &str = "CAVENT_OUT_DIR";

/// Receives the resolved config and the stem of the first output dataset.
type Compute = fn(&Config, &'static str) -> Result<Vec<Dataset>>;

pub struct ScenarioInfo {
    pub name: &'static str,
    pub description: &'static str,
    /// `(file stem, columns)` for every dataset the scenario writes.
    pub outputs: &'static [(&'static str, &'static [&'static str])],
    defaults: fn(&mut Config),
    compute: Compute,
}

const PEAK_COLUMNS: &[&str] = &["r", "E_p", "t_peak", "C_p"];
const OPEN_DYNAMICS_COLUMNS: &[&str] = &["r", "t", "E", "ground_population", "photon_number"];
const EIG_COLUMNS: &[&str] = &[
    "r", "e1", "e2", "e3", "v1_alpha", "v1_beta", "v1_gamma", "v2_alpha", "v2_beta", "v2_gamma", "v3_alpha",
    "v3_beta", "v3_gamma",
];

/// Sorted by name.
static REGISTRY: &[ScenarioInfo] = &[
    ScenarioInfo {
        name: "coherence-dynamics",
        description: "dispersive E(t) and off-diagonal coherence C(t) at g2/g1 = 0.9",
        outputs: &[("coherence-dynamics", &["t", "E", "C"])],
        defaults: |c| c.g2_over_g1 = 0.9,
        compute: coherence_dynamics,
    },
    ScenarioInfo {
        name: "dispersive-dynamics",
        description: "dispersive E(t), C(t) from |001> for g2/g1 in {1, 0.2, 0.1}",
        outputs: &[("dispersive-dynamics", &["r", "t", "E", "C"])],
        defaults: |c| c.ratios = vec![1.0, 0.2, 0.1],
        compute: ratio_dynamics,
    },
    ScenarioInfo {
        name: "dispersive-peak-sweep",
        description: "dispersive peak entanglement E_p and coherence C_p versus g2/g1",
        outputs: &[("dispersive-peak-sweep", PEAK_COLUMNS)],
        defaults: |_| {},
        compute: peak_sweep,
    },
    ScenarioInfo {
        name: "dissipative-dynamics",
        description: "undriven lossy E(t) from |001> for g2/g1 in {1, 0.4, 0.3}",
        outputs: &[("dissipative-dynamics", OPEN_DYNAMICS_COLUMNS)],
        defaults: |c| {
            open_defaults(c);
            c.d = 0.0;
            c.ratios = vec![1.0, 0.4, 0.3];
        },
        compute: open_dynamics,
    },
    ScenarioInfo {
        name: "driven-dynamics",
        description: "driven lossy E(t) from |001> at d = 0.05 for g2/g1 in {1, 0.84, 0.4}",
        outputs: &[("driven-dynamics", OPEN_DYNAMICS_COLUMNS)],
        defaults: |c| {
            open_defaults(c);
            c.ratios = vec![1.0, 0.84, 0.4];
        },
        compute: open_dynamics,
    },
    ScenarioInfo {
        name: "eigvec-coeff-sweep",
        description: "single-excitation energies and eigenvector coefficient magnitudes versus g2/g1",
        outputs: &[("eigvec-coeff-sweep", EIG_COLUMNS)],
        defaults: |_| {},
        compute: eigvec_coeff_sweep,
    },
    ScenarioInfo {
        name: "mes-lapse",
        description: "minimum time between maximally entangled states: analytic and numeric P(g2/g1), plus E(t)",
        outputs: &[
            ("mes-lapse", &["r", "cos_theta", "threshold_ok", "P_analytic", "P_numeric"]),
            ("mes-lapse-dynamics", &["r", "t", "E"]),
        ],
        defaults: |c| c.ratios = vec![0.8, 0.6],
        compute: mes_lapse,
    },
    ScenarioInfo {
        name: "overlap-dynamics",
        description: "overlap of the evolving state with the three eigenstates, dispersive and resonant",
        outputs: &[("overlap-dynamics", &["omega", "t", "overlap_e1", "overlap_e2", "overlap_e3"])],
        defaults: |_| {},
        compute: overlap_dynamics,
    },
    ScenarioInfo {
        name: "resonant-peak-sweep",
        description: "resonant peak entanglement E_p and coherence C_p versus g2/g1",
        outputs: &[("resonant-peak-sweep", PEAK_COLUMNS)],
        defaults: |c| c.omega = 10.0,
        compute: peak_sweep,
    },
    ScenarioInfo {
        name: "steady-vs-drive",
        description: "steady-state concurrence versus drive amplitude at g2/g1 = 1",
        outputs: &[("steady-vs-drive", &["d", "E_ss", "photon_number"])],
        defaults: open_defaults,
        compute: steady_vs_drive,
    },
    ScenarioInfo {
        name: "steady-vs-ratio",
        description: "steady-state concurrence versus g2/g1 for d in {0.05, 0.06}",
        outputs: &[("steady-vs-ratio", &["d", "r", "E_ss", "photon_number"])],
        defaults: |c| {
            open_defaults(c);
            c.drives = vec![0.05, 0.06];
        },
        compute: steady_vs_ratio,
    },
    ScenarioInfo {
        name: "sz-dynamics",
        description: "resonant <S1^z>(t), <S2^z>(t) and E(t) for g2/g1 in {1, 0.5, 0.3}",
        outputs: &[("sz-dynamics", &["r", "t", "sz1", "sz2", "E"])],
        defaults: |c| {
            c.omega = 10.0;
            c.ratios = vec![1.0, 0.5, 0.3];
        },
        compute: sz_dynamics,
    },
];

/// Resonant, lossy defaults: omega = eps = 10, kappa = 1, gamma = 0.005, d = 0.05, n_max = 4.
pub fn open_defaults(c: &mut Config) {
    c.omega = 10.0;
    c.eps1 = 10.0;
    c.eps2 = 10.0;
    c.kappa = 1.0;
    c.gamma = 0.005;
    c.d = 0.05;
    c.n_max = 4;
}

/// `(name, description)` pairs, sorted by name.
pub fn list_scenarios() -> Vec<(&'static str, &'static str)> {
    REGISTRY.iter().map(|s| (s.name, s.description)).collect()
}

pub fn scenario(name: &str) -> Result<&'static ScenarioInfo> {
    REGISTRY.iter().find(|s| s.name == name).ok_or_else(|| Error::UnknownScenario(name.to_string()))
}

/// Scenario defaults with `overrides` (each `key=value`) applied in order.
pub fn resolve_config(name: &str, overrides: &[String]) -> Result<Config> {
    let info = scenario(name)?;
    let mut cfg = Config::default();
    (info.defaults)(&mut cfg);
    for o in overrides {
        cfg.set_pair(o)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Evaluates `f` on every item, on the current rayon pool, in index order.
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> Result<R> + Sync) -> Result<Vec<R>> {
    #[allow(clippy::redundant_closure)] // passing `f` directly would require `F: Send`
    let results: Vec<Result<R>> = items.par_iter().map(|x| f(x)).collect();
    results.into_iter().collect()
}

fn with_pool<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Computes every dataset of a scenario and renders it to CSV text.
/// Returns `(file name, contents)` pairs; nothing is written.
pub fn render_scenario(name: &str, overrides: &[String], threads: Option<usize>) -> Result<Vec<(String, String)>> {
    let info = scenario(name)?;
    let cfg = resolve_config(name, overrides)?;
    let datasets = with_pool(threads, || (info.compute)(&cfg, info.outputs[0].0))??;
    if datasets.len() != info.outputs.len() {
        return Err(Error::Schema(format!("{name}: produced {} datasets", datasets.len())));
    }
    let mut out = Vec::new();
    for (ds, (stem, columns)) in datasets.iter().zip(info.outputs) {
        if ds.name != *stem {
            return Err(Error::Schema(format!("{name}: dataset `{}`, expected `{stem}`", ds.name)));
        }
        ds.check_schema(columns)?;
        let mut header = vec![format!("cavent {VERSION}"), format!("scenario={name}"), format!("dataset={stem}")];
        header.extend(cfg.entries().into_iter().map(|(k, v)| format!("{k}={v}")));
        header.extend(overrides.iter().map(|o| format!("set {o}")));
        out.push((format!("{stem}.csv"), render_csv(&header, ds)));
    }
    Ok(out)
}

/// Output directory: explicit argument, then the `out_dir` key, then
/// [`OUT_DIR_ENV`], then the working directory.
pub fn resolve_out_dir(explicit: Option<&Path>, cfg: &Config) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(p) = &cfg.out_dir {
        return PathBuf::from(p);
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(p) if !p.is_empty() => PathBuf::from(p),
        _ => PathBuf::from("."),
    }
}

/// Runs a scenario and writes its CSV files atomically. All datasets are
/// computed before the first file is written.
pub fn run_scenario(
    name: &str,
    overrides: &[String],
    out_dir: Option<&Path>,
    threads: Option<usize>,
) -> Result<Vec<PathBuf>> {
    let cfg = resolve_config(name, overrides)?;
    let rendered = render_scenario(name, overrides, threads)?;
    let dir = resolve_out_dir(out_dir, &cfg);
    rendered.iter().map(|(file, text)| write_atomic(&dir, file, text)).collect()
}

fn dynamics_times(cfg: &Config, default_horizon: f64) -> Vec<f64> {
    linspace(0.0, cfg.t_max.unwrap_or(default_horizon), cfg.sample_count)
}

/// Horizon for peak extraction: three flip-flop periods when detuned, 60 on resonance.
fn peak_horizon(cfg: &Config, p: &ModelParams) -> f64 {
    cfg.t_max.unwrap_or_else(|| {
        let delta = p.delta().abs();
        if delta > 0.0 {
            3.0 * 2.0 * PI * delta / (p.g1 * p.g1 + p.g2 * p.g2)
        } else {
            60.0
        }
    })
}

fn eigvec_coeff_sweep(cfg: &Config, stem: &str) -> Result<Vec<Dataset>> {
    let base = cfg.params();
    let rows = par_map(&cfg.ratio_grid()?, |&r| {
        let es = analytic_eigensystem(&base.with_ratio(r))?;
        let mut row = vec![r, es.e1, es.e2, es.e3];
        for v in es.vectors() {
            row.extend([v.alpha.norm(), v.beta.norm(), v.gamma.norm()]);
        }
        Ok(row)
    })?;
    Ok(vec![Dataset { name: stem.into(), columns: EIG_COLUMNS.to_vec(), rows }])
}

fn overlap_dynamics(cfg: &Config, stem: &str) -> Result<Vec<Dataset>> {
    let mut omegas = vec![cfg.omega];
    if cfg.eps1 != cfg.omega {
        omegas.push(cfg.eps1);
    }
    let times = dynamics_times(cfg, 100.0);
    let blocks = par_map(&omegas, |&omega| {
        let p = ModelParams { omega, ..cfg.params() };
        let es = analytic_eigensystem(&p)?;
        let dynamics = ClosedDynamics::from_qubit2_excited(&p)?;
        times
            .iter()
            .map(|&t| {
                let o = eigenstate_overlaps(&dynamics.state_at(t).to_vector(), &es)?;
                Ok(vec![omega, t, o[0], o[1], o[2]])
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut ds = Dataset::new(stem, &["omega", "t", "overlap_e1", "overlap_e2", "overlap_e3"]);
    ds.rows = blocks.concat();
    Ok(vec![ds])
}

fn ratio_dynamics(cfg: &Config, stem: &str) -> Result<Vec<Dataset>> {
    let times = dynamics_times(cfg, 400.0);
    let blocks = par_map(&cfg.ratios, |&r| {
        let d = ClosedDynamics::from_qubit2_excited(&cfg.params().with_ratio(r))?;
        Ok(times.iter().map(|&t| vec![r, t, d.concurrence_at(t), d.coherence_at(t)]).collect::<Vec<_>>())
    })?;
    let mut ds = Dataset::new(stem, &["r", "t", "E", "C"]);
    ds.rows = blocks.concat();
    Ok(vec![ds])
}

fn coherence_dynamics(cfg: &Config, stem: &str) -> Result<Vec<Dataset>> {
    let d = ClosedDynamics::from_qubit2_excited(&cfg.params())?;
    let mut ds = Dataset::new(stem, &["t", "E", "C"]);
    ds.rows = dynamics_times(cfg, 400.0).iter().map(|&t| vec![t, d.concurrence_at(t), d.coherence_at(t)]).collect();
    Ok(vec![ds])
}

/// Peak concurrence and coherence over the scenario horizon, from a
/// fine-sampled series refined by golden-section search.
pub fn closed_peaks(cfg: &Config, p: &ModelParams) -> Result<[f64; 4]> {
    let d = ClosedDynamics::from_qubit2_excited(p)?;
    let grid = d.sampling_grid(peak_horizon(cfg, p));
    let fe = |t: f64| d.concurrence_at(t);
    let fc = |t: f64| d.coherence_at(t);
    let (e_p, t_peak) = peak_value(&TimeSeries::from_fn("E", grid.clone(), fe)?, Some(&fe))?;
    let (c_p, _) = peak_value(&TimeSeries::from_fn("C", grid, fc)?, Some(&fc))?;
    Ok([p.ratio(), e_p, t_peak, c_p])
}

fn peak_sweep(cfg: &Config, stem: &str) -> Result<Vec<Dataset>> {
    let base = cfg.params();
    let rows = par_map(&cfg.ratio_grid()?, |&r| Ok(closed_peaks(cfg, &base.with_ratio(r))?.to_vec()))?;
    Ok(vec![Dataset { name: stem.into(), columns: PEAK_COLUMNS.to_vec(), rows }])
}

/// Numeric MES lapse from the exact dynamics over three flip-flop periods.
pub fn numeric_lapse(cfg: &Config, p: &ModelParams) -> Result<Option<f64>> {
    let d = ClosedDynamics::from_qubit2_excited(p)?;
    let f = |t: f64| d.concurrence_at(t);
    let series = TimeSeries::from_fn("E", d.sampling_grid(peak_horizon(cfg, p)), f)?;
    mes_lapse_numeric(&series, cfg.mes_tol, Some(&f))
}

fn mes_lapse(cfg: &Config, stem: &str) -> Result<Vec<Dataset>> {
    let base = cfg.params();
    let rows = par_map(&cfg.ratio_grid()?, |&r| {
        let p = base.with_ratio(r);
        let a = mes_lapse_analytic(&p)?;
        let numeric = numeric_lapse(cfg, &p)?;
        Ok(vec![
            r,
            if a.cos_theta.is_finite() { a.cos_theta } else { f64::NAN },
            if a.threshold_ok { 1.0 } else { 0.0 },
            a.lapse.unwrap_or(f64::NAN),
            numeric.unwrap_or(f64::NAN),
        ])
    })?;
    let mut sweep = Dataset::new(stem, &["r", "cos_theta", "threshold_ok", "P_analytic", "P_numeric"]);
    sweep.rows = rows;

    let times = dynamics_times(cfg, 250.0);
    let blocks = par_map(&cfg.ratios, |&r| {
        let d = ClosedDynamics::from_qubit2_excited(&base.with_ratio(r))?;
        Ok(times.iter().map(|&t| vec![r, t, d.concurrence_at(t)]).collect::<Vec<_>>())
    })?;
    let mut dynamics = Dataset::new(format!("{stem}-dynamics"), &["r", "t", "E"]);
    dynamics.rows = blocks.concat();
    Ok(vec![sweep, dynamics])
}

fn sz_dynamics(cfg: &Config, stem: &str) -> Result<Vec<Dataset>> {
    let times = dynamics_times(cfg, 20.0);
    let blocks = par_map(&cfg.ratios, |&r| {
        let d = ClosedDynamics::from_qubit2_excited(&cfg.params().with_ratio(r))?;
        Ok(times
            .iter()
            .map(|&t| vec![r, t, d.sz_at(t, Qubit::One), d.sz_at(t, Qubit::Two), d.concurrence_at(t)])
            .collect::<Vec<_>>())
    })?;
    let mut ds = Dataset::new(stem, &["r", "t", "sz1", "sz2", "E"]);
    ds.rows = blocks.concat();
    Ok(vec![ds])
}

/// `<a^dagger a>` from the diagonal of a full-space state.
pub fn photon_number(rho: &DensityMatrix, n_max: usize) -> f64 {
    let m = rho.matrix();
    let mut s = 0.0;
    for q1 in 0..2 {
        for n in 0..=n_max {
            for q2 in 0..2 {
                let k = basis_index(n_max, q1, n, q2);
                s += n as f64 * m[(k, k)].re;
            }
        }
    }
    s
}

fn open_dynamics(cfg: &Config, stem: &str) -> Result<Vec<Dataset>> {
    let times = dynamics_times(cfg, 100.0);
    let opts = OdeOptions::with_tolerances(cfg.rtol, cfg.atol);
    let blocks = par_map(&cfg.ratios, |&r| {
        let p = cfg.params().with_ratio(r);
        let rho0 = basis_density(&p, 0, 0, 1)?;
        let traj = evolve_open_with(&p, &rho0, &times, &opts)?;
        let vac = basis_index(p.n_max, 0, 0, 0);
        traj.iter()
            .zip(&times)
            .map(|(rho, &t)| {
                let e = concurrence(&partial_trace_cavity(rho, p.n_max)?)?;
                Ok(vec![r, t, e, rho.matrix()[(vac, vac)].re, photon_number(rho, p.n_max)])
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(vec![Dataset { name: stem.into(), columns: OPEN_DYNAMICS_COLUMNS.to_vec(), rows: blocks.concat() }])
}

fn steady_point(p: &ModelParams) -> Result<(f64, f64)> {
    let rho = steady_state(p)?;
    Ok((concurrence(&partial_trace_cavity(&rho, p.n_max)?)?, photon_number(&rho, p.n_max)))
}

fn steady_vs_ratio(cfg: &Config, stem: &str) -> Result<Vec<Dataset>> {
    let ratios = cfg.ratio_grid()?;
    let points: Vec<(f64, f64)> = cfg.drives.iter().flat_map(|&d| ratios.iter().map(move |&r| (d, r))).collect();
    let rows = par_map(&points, |&(d, r)| {
        let (e, n) = steady_point(&ModelParams { d, ..cfg.params().with_ratio(r) })?;
        Ok(vec![d, r, e, n])
    })?;
    let mut ds = Dataset::new(stem, &["d", "r", "E_ss", "photon_number"]);
    ds.rows = rows;
    Ok(vec![ds])
}

fn steady_vs_drive(cfg: &Config, stem: &str) -> Result<Vec<Dataset>> {
    let rows = par_map(&cfg.drive_grid()?, |&d| {
        let (e, n) = steady_point(&ModelParams { d, ..cfg.params() })?;
        Ok(vec![d, e, n])
    })?;
    let mut ds = Dataset::new(stem, &["d", "E_ss", "photon_number"]);
    ds.rows = rows;
    Ok(vec![ds])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_sorted_and_complete() {
        let names: Vec<_> = list_scenarios().into_iter().map(|(n, _)| n).collect();
        assert_eq!(names.len(), 12);
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(names, sorted);
        assert!(names.contains(&"dispersive-peak-sweep"));
    }

    #[test]
    fn unknown_scenario_and_override() {
        assert_eq!(render_scenario("nope", &[], None).unwrap_err(), Error::UnknownScenario("nope".into()));
        assert!(matches!(
            render_scenario("eigvec-coeff-sweep", &["bogus=1".into()], None),
            Err(Error::InvalidOverride(_))
        ));
    }

    #[test]
    fn header_records_overrides() {
        let out = render_scenario("eigvec-coeff-sweep", &["r_min=0.5".into(), "r_step=0.25".into()], None).unwrap();
        let (file, text) = &out[0];
        assert_eq!(file, "eigvec-coeff-sweep.csv");
        assert!(text.starts_with(&format!("# cavent {VERSION}\n# scenario=eigvec-coeff-sweep\n")));
        assert!(text.contains("# r_min=0.5\n"));
        assert!(text.contains("# set r_min=0.5\n# set r_step=0.25\n"));
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body[0], EIG_COLUMNS.join(","));
        assert_eq!(body.len(), 1 + 3);
    }

    #[test]
    fn out_dir_resolution() {
        let mut cfg = Config::default();
        assert_eq!(resolve_out_dir(Some(Path::new("a")), &cfg), PathBuf::from("a"));
        cfg.out_dir = Some("b".into());
        assert_eq!(resolve_out_dir(None, &cfg), PathBuf::from("b"));
    }
}
