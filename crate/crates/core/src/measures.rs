//! Entanglement and coherence of the two-qubit reduced state, spin
//! expectations, eigenstate overlaps, and peak/lapse extraction from curves.

use num_complex::Complex64 as C64;

use crate::density::{DensityMatrix, HERMITIAN_TOL, POSITIVITY_TOL, TRACE_TOL};
use crate::error::{Error, Result};
use crate::hilbert::{extract_single_excitation, n_max_from_dim, Qubit, SubspaceState};
use crate::model::EigenSystem;
use crate::numerics::{golden_section_max, hermitian_eig, singular_values, ComplexMatrix, ComplexVector};

/// Sampled real-valued curve.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub label: String,
}

impl TimeSeries {
    pub fn new(label: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} values", times.len()),
                found: format!("{}", values.len()),
            });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("times must be strictly increasing".into()));
        }
        Ok(Self { times, values, label: label.into() })
    }

    /// Samples `f` at each of `times`.
    pub fn from_fn(label: impl Into<String>, times: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = times.iter().map(|&t| f(t)).collect();
        Self::new(label, times, values)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `n` equally spaced points covering `[t0, t1]` inclusive.
pub fn linspace(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t0],
        _ => (0..n).map(|k| t0 + (t1 - t0) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn sigma_y_sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[0.0, 0.0, 0.0, -1.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[-1.0, 0.0, 0.0, 0.0],
    ])
}

fn check_two_qubit(m: &ComplexMatrix) -> Result<()> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(Error::InvalidDensityMatrix(format!("expected 4x4, found {}x{}", m.rows(), m.cols())));
    }
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::InvalidDensityMatrix(format!("not Hermitian (defect {defect:.3e})")));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
    }
    Ok(())
}

/// Wootters concurrence `max(0, l1 - l2 - l3 - l4)`.
///
/// The `l_i` are the square roots of the eigenvalues of `rho (sy sy) rho* (sy sy)`.
/// With `rho = W W^dagger` they equal the singular values of the symmetric
/// matrix `W^T (sy sy) W`, which avoids square roots of rounding noise.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    let m = rho.matrix();
    check_two_qubit(m)?;
    let eig = hermitian_eig(&m.hermitian_part())?;
    if eig.values[0] < -POSITIVITY_TOL {
        return Err(Error::InvalidDensityMatrix(format!("min eigenvalue {:.3e}", eig.values[0])));
    }
    let w = ComplexMatrix::from_fn(4, 4, |i, k| eig.vectors[k][i] * eig.values[k].max(0.0).sqrt());
    let tau = w.transpose().matmul(&sigma_y_sigma_y()).matmul(&w);
    let s = singular_values(&tau);
    Ok((s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0))
}

/// Reference route through `R = sqrt(sqrt(rho) rho~ sqrt(rho))`; the
/// eigenvalues of `R^2` are the `l_i^2`. Accurate to roughly `sqrt(eps)`.
pub fn concurrence_sqrt_route(rho: &DensityMatrix) -> Result<f64> {
    let m = rho.matrix();
    check_two_qubit(m)?;
    let sqrt_rho = hermitian_eig(&m.hermitian_part())?.reconstruct_with(|x| C64::new(x.max(0.0).sqrt(), 0.0));
    let yy = sigma_y_sigma_y();
    let tilde = yy.matmul(&m.conj()).matmul(&yy);
    let r2 = sqrt_rho.matmul(&tilde).matmul(&sqrt_rho).hermitian_part();
    let mut l: Vec<f64> = hermitian_eig(&r2)?.values.iter().map(|&x| x.max(0.0).sqrt()).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

/// Closed form for X-shaped states (nonzero entries only on the diagonal and
/// anti-diagonal): `2 max(0, |r_{01,10}| - sqrt(r00 r11), |r_{00,11}| - sqrt(r01 r10))`.
/// The caller guarantees the X shape.
pub fn concurrence_x(m: &ComplexMatrix) -> f64 {
    let p = [0, 1, 2, 3].map(|k| m[(k, k)].re);
    concurrence_x_entries(p, m[(1, 2)].norm(), m[(0, 3)].norm())
}

/// [`concurrence_x`] from the populations of `|00>, |01>, |10>, |11>` and the
/// moduli of the `(01, 10)` and `(00, 11)` coherences.
pub fn concurrence_x_entries(p: [f64; 4], c_01_10: f64, c_00_11: f64) -> f64 {
    let p = p.map(|x| x.max(0.0));
    let a = c_01_10 - (p[0] * p[3]).sqrt();
    let b = c_00_11 - (p[1] * p[2]).sqrt();
    (2.0 * a.max(b)).clamp(0.0, 1.0)
}

/// Largest modulus among the strictly upper-triangular entries.
pub fn coherence_offdiag(rho: &DensityMatrix) -> Result<f64> {
    let m = rho.matrix();
    check_two_qubit(m)?;
    Ok(coherence_offdiag_unchecked(m))
}

fn coherence_offdiag_unchecked(m: &ComplexMatrix) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..m.rows() {
        for j in i + 1..m.cols() {
            best = best.max(m[(i, j)].norm());
        }
    }
    best
}

/// Full-space state, pure or mixed.
#[derive(Clone, Copy, Debug)]
pub enum StateRef<'a> {
    Pure(&'a ComplexVector),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a ComplexVector> for StateRef<'a> {
    fn from(v: &'a ComplexVector) -> Self {
        StateRef::Pure(v)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(rho: &'a DensityMatrix) -> Self {
        StateRef::Mixed(rho)
    }
}

/// `<S^z>` of one qubit. `S^z` is diagonal, so only populations enter.
pub fn expectation_sz<'a>(state: impl Into<StateRef<'a>>, which: Qubit) -> Result<f64> {
    let (dim, pop): (usize, Box<dyn Fn(usize) -> f64 + 'a>) = match state.into() {
        StateRef::Pure(v) => (v.dim(), Box::new(move |k| v[k].norm_sqr())),
        StateRef::Mixed(rho) => (rho.dim(), Box::new(move |k| rho.matrix()[(k, k)].re)),
    };
    let n_max = n_max_from_dim(dim)?;
    let block = 2 * (n_max + 1);
    let mut s = 0.0;
    for k in 0..dim {
        let excited = match which {
            Qubit::One => k / block == 1,
            Qubit::Two => k % 2 == 1,
        };
        s += if excited { 0.5 } else { -0.5 } * pop(k);
    }
    Ok(s)
}

/// Leak tolerance for [`eigenstate_overlaps`].
pub const SUBSPACE_LEAK_TOL: f64 = 1e-8;

/// `|<E_k|psi>|^2` for `k = 1, 2, 3`. `psi` is either a full-space vector or
/// three subspace amplitudes.
pub fn eigenstate_overlaps(psi: &ComplexVector, es: &EigenSystem) -> Result<[f64; 3]> {
    let state = if psi.dim() == 3 {
        SubspaceState::from_vector(psi)?
    } else {
        let ex = extract_single_excitation(psi)?;
        if ex.leaked_norm > SUBSPACE_LEAK_TOL {
            return Err(Error::SubspaceLeak(ex.leaked_norm));
        }
        ex.state
    };
    let v = state.to_vector();
    Ok(es.vectors().map(|e| e.to_vector().dot(&v).norm_sqr()))
}

fn refine_at(series: &TimeSeries, k: usize, eval: &dyn Fn(f64) -> f64) -> (f64, f64) {
    let n = series.len();
    let lo = series.times[k.saturating_sub(1)];
    let hi = series.times[(k + 1).min(n - 1)];
    let (t, v) = golden_section_max(eval, lo, hi, 1e-10 * hi.abs().max(1.0));
    if v >= series.values[k] {
        (t, v)
    } else {
        (series.times[k], series.values[k])
    }
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = k;
        }
    }
    best
}

/// Global maximum of a series as `(value, time)`, optionally refined by a
/// golden-section search of `eval` between the neighbours of the best sample.
pub fn peak_value(series: &TimeSeries, eval: Option<&dyn Fn(f64) -> f64>) -> Result<(f64, f64)> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let k = argmax(&series.values);
    let (t, v) = match eval {
        Some(f) if series.len() > 1 => refine_at(series, k, f),
        _ => (series.times[k], series.values[k]),
    };
    Ok((v, t))
}

/// An MES event stays open until the curve drops below `1 - RELEASE_FACTOR * tol`.
///
/// Exact dynamics carry a small fast ripple on top of the slow envelope, so a
/// single threshold would split one broad maximum into several.
pub const RELEASE_FACTOR: f64 = 5.0;

/// Times of the (refined) maxima of each excursion above `1 - tol`.
pub fn mes_times(series: &TimeSeries, tol: f64, eval: Option<&dyn Fn(f64) -> f64>) -> Result<Vec<f64>> {
    if !(tol > 0.0 && tol <= 0.1) {
        return Err(Error::InvalidArgument(format!("tolerance must lie in (0, 0.1], got {tol}")));
    }
    let enter = 1.0 - tol;
    let release = 1.0 - RELEASE_FACTOR * tol;
    let n = series.len();
    let mut events = Vec::new();
    let mut start: Option<usize> = None;
    for (k, &v) in series.values.iter().enumerate() {
        match start {
            None if v >= enter => start = Some(k),
            Some(s) if v < release => {
                events.push((s, k));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        events.push((s, n));
    }
    let mut times = Vec::new();
    for (s, e) in events {
        let k = s + argmax(&series.values[s..e]);
        // a maximum on the window edge is a truncated excursion, not a peak
        if (k == 0 && n > 1) || (k == n - 1 && n > 1) {
            continue;
        }
        let (t, v) = match eval {
            Some(f) => refine_at(series, k, f),
            None => (series.times[k], series.values[k]),
        };
        if v >= enter {
            times.push(t);
        }
    }
    Ok(times)
}

/// Smallest gap between consecutive MES times; `None` with fewer than two.
pub fn mes_lapse_numeric(series: &TimeSeries, tol: f64, eval: Option<&dyn Fn(f64) -> f64>) -> Result<Option<f64>> {
    let times = mes_times(series, tol, eval)?;
    Ok(times.windows(2).map(|w| w[1] - w[0]).min_by(f64::total_cmp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ComplexVector;

    fn pure(amps: &[f64]) -> DensityMatrix {
        DensityMatrix::from_pure(&ComplexVector::from_real(amps).normalized()).unwrap()
    }

    #[test]
    fn bell_and_product() {
        let s = 0.5f64.sqrt();
        let bell = pure(&[0.0, s, s, 0.0]);
        assert!((concurrence(&bell).unwrap() - 1.0).abs() < 1e-12);
        assert!((coherence_offdiag(&bell).unwrap() - 0.5).abs() < 1e-15);
        let phi = pure(&[s, 0.0, 0.0, s]);
        assert!((concurrence(&phi).unwrap() - 1.0).abs() < 1e-12);
        assert!((concurrence_x(phi.matrix()) - 1.0).abs() < 1e-15);
        let product = pure(&[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(concurrence(&product).unwrap(), 0.0);
        assert_eq!(coherence_offdiag(&product).unwrap(), 0.0);
    }

    #[test]
    fn maximally_mixed_is_separable() {
        let rho = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.25; 4])).unwrap();
        assert_eq!(concurrence(&rho).unwrap(), 0.0);
        assert_eq!(concurrence_x(rho.matrix()), 0.0);
    }

    #[test]
    fn werner_state() {
        // p |Psi-><Psi-| + (1 - p) I / 4 has C = max(0, (3p - 1) / 2)
        for p in [0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
            let s = 0.5f64.sqrt();
            let bell = ComplexVector::from_real(&[0.0, s, -s, 0.0]);
            let m = &bell.outer(&bell).scale_real(p) + &ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0);
            let rho = DensityMatrix::new(m).unwrap();
            let expected = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert!((concurrence(&rho).unwrap() - expected).abs() < 1e-12, "p = {p}");
            assert!((concurrence_x(rho.matrix()) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn single_excitation_example() {
        let s = SubspaceState::from_real(0.5, 0.5f64.sqrt(), 0.5);
        let rho = s.reduced_qubit_state();
        assert!((concurrence(&rho).unwrap() - 0.5).abs() < 1e-12);
        assert!((concurrence_x(rho.matrix()) - 0.5).abs() < 1e-15);
        assert!((coherence_offdiag(&rho).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        let bad = DensityMatrix::new_unchecked(ComplexMatrix::identity(3).scale_real(1.0 / 3.0));
        assert!(matches!(concurrence(&bad), Err(Error::InvalidDensityMatrix(_))));
        let unnormalised = DensityMatrix::new_unchecked(ComplexMatrix::identity(4));
        assert!(matches!(concurrence(&unnormalised), Err(Error::InvalidDensityMatrix(_))));
        assert!(matches!(coherence_offdiag(&unnormalised), Err(Error::InvalidDensityMatrix(_))));
        let negative = DensityMatrix::new_unchecked(ComplexMatrix::from_real_diagonal(&[1.5, -0.5, 0.0, 0.0]));
        assert!(matches!(concurrence(&negative), Err(Error::InvalidDensityMatrix(_))));
    }

    #[test]
    fn sz_expectations() {
        let v = crate::hilbert::embed_single_excitation(&SubspaceState::qubit2_excited(), 2).unwrap();
        assert_eq!(expectation_sz(&v, Qubit::One).unwrap(), -0.5);
        assert_eq!(expectation_sz(&v, Qubit::Two).unwrap(), 0.5);
        let rho = DensityMatrix::from_pure(&v).unwrap();
        assert_eq!(expectation_sz(&rho, Qubit::Two).unwrap(), 0.5);
        let s = 0.5f64.sqrt();
        let mes = crate::hilbert::embed_single_excitation(&SubspaceState::from_real(s, 0.0, s), 1).unwrap();
        assert_eq!(expectation_sz(&mes, Qubit::One).unwrap(), 0.0);
        assert_eq!(expectation_sz(&mes, Qubit::Two).unwrap(), 0.0);
        assert!(matches!(expectation_sz(&ComplexVector::zeros(6), Qubit::One), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn sz_matches_operator() {
        let ops = crate::hilbert::build_operator_set(3).unwrap();
        let v = ComplexVector::from_vec((0..ops.dim).map(|k| C64::new(k as f64, 1.0 - k as f64 * 0.3)).collect())
            .normalized();
        for q in [Qubit::One, Qubit::Two] {
            let direct = v.dot(&ops.s_z(q).mul_vec(&v)).re;
            assert!((expectation_sz(&v, q).unwrap() - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn overlaps_of_eigenvector() {
        let es = crate::model::analytic_eigensystem(&crate::model::ModelParams::dispersive(0.7)).unwrap();
        let o = eigenstate_overlaps(&es.v1.to_vector(), &es).unwrap();
        assert!((o[0] - 1.0).abs() < 1e-14 && o[1] < 1e-14 && o[2] < 1e-14);
        let full = crate::hilbert::embed_single_excitation(&es.v3, 2).unwrap();
        let o = eigenstate_overlaps(&full, &es).unwrap();
        assert!((o[2] - 1.0).abs() < 1e-14);
        let mut leaky = full.clone();
        leaky[0] = C64::new(1e-3, 0.0);
        assert!(matches!(eigenstate_overlaps(&leaky, &es), Err(Error::SubspaceLeak(_))));
    }

    #[test]
    fn peak_of_constant_series() {
        let s = TimeSeries::new("c", vec![0.0, 1.0, 2.0], vec![0.3; 3]).unwrap();
        assert_eq!(peak_value(&s, None).unwrap(), (0.3, 0.0));
        let empty = TimeSeries::new("e", vec![], vec![]).unwrap();
        assert_eq!(peak_value(&empty, None).unwrap_err(), Error::EmptySeries);
    }

    #[test]
    fn peak_refinement() {
        let f = |t: f64| (t - 0.123456789).cos();
        let s = TimeSeries::from_fn("cos", linspace(-1.0, 1.0, 11), f).unwrap();
        let (v, t) = peak_value(&s, Some(&f)).unwrap();
        assert!((t - 0.123456789).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn series_validation() {
        assert!(TimeSeries::new("x", vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(TimeSeries::new("x", vec![0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn lapse_of_squared_sine() {
        // sin^2 hits 1 at pi/2 + k pi
        let f = |t: f64| t.sin().powi(2);
        let s = TimeSeries::from_fn("s", linspace(0.0, 10.0, 2001), f).unwrap();
        let times = mes_times(&s, 1e-3, Some(&f)).unwrap();
        assert_eq!(times.len(), 3);
        let p = mes_lapse_numeric(&s, 1e-3, Some(&f)).unwrap().unwrap();
        assert!((p - std::f64::consts::PI).abs() < 1e-8);
        let low = TimeSeries::from_fn("l", linspace(0.0, 10.0, 101), |t| 0.9 * t.sin().powi(2)).unwrap();
        assert_eq!(mes_lapse_numeric(&low, 1e-3, None).unwrap(), None);
        assert!(mes_lapse_numeric(&s, 0.0, None).is_err());
        assert!(mes_lapse_numeric(&s, 0.5, None).is_err());
    }

    #[test]
    fn ripple_does_not_split_events() {
        let f = |t: f64| (t.sin().powi(2) - 0.002 * (40.0 * t).sin().powi(2)).max(0.0);
        let s = TimeSeries::from_fn("r", linspace(0.0, 10.0, 20001), f).unwrap();
        assert_eq!(mes_times(&s, 1e-3, Some(&f)).unwrap().len(), 3);
    }
}
