//! Dormand–Prince 5(4) integrator with PI step-size control.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Hard cap on attempted steps over the whole grid.
    pub max_steps: usize,
    /// Upper bound on any single step; `None` leaves it to the controller.
    pub max_step: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12, max_steps: 50_000_000, max_step: None }
    }
}

impl OdeOptions {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

// Dormand–Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// PI controller constants (Hairer & Wanner's DOPRI5 defaults).
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

fn weighted_rms(err: &[C64], y0: &[C64], y1: &[C64], rtol: f64, atol: f64) -> f64 {
    let n = err.len().max(1) as f64;
    let s: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = atol + rtol * a.norm().max(b.norm());
            (e.norm() / sc).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

#[inline]
fn combine(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (coef, k) in terms {
            acc += k[i] * *coef;
        }
        *o = y[i] + acc * h;
    }
}

/// Integrates `y' = rhs(t, y)` and returns the state at every grid time.
///
/// `rhs(t, y, dy)` writes the derivative into `dy`. The first grid entry is
/// the initial time; the returned list starts with a copy of `y0`.
pub fn integrate_adaptive<F>(rhs: F, y0: &[C64], t_grid: &[f64], opts: &OdeOptions) -> Result<Vec<Vec<C64>>>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    integrate_adaptive_with_stats(rhs, y0, t_grid, opts).map(|(states, _)| states)
}

pub fn integrate_adaptive_with_stats<F>(
    mut rhs: F,
    y0: &[C64],
    t_grid: &[f64],
    opts: &OdeOptions,
) -> Result<(Vec<Vec<C64>>, OdeStats)>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    if t_grid.is_empty() {
        return Err(Error::InvalidArgument("empty time grid".into()));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("time grid must be finite and strictly increasing".into()));
    }
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::InvalidArgument("rtol and atol must be positive".into()));
    }

    let n = y0.len();
    let mut stats = OdeStats::default();
    let mut out = Vec::with_capacity(t_grid.len());
    out.push(y0.to_vec());
    if t_grid.len() == 1 {
        return Ok((out, stats));
    }

    let t_start = t_grid[0];
    let t_end = *t_grid.last().unwrap();
    let h_min = 1e-14 * (t_end - t_start);
    let h_max = opts.max_step.unwrap_or(t_end - t_start);

    let mut y = y0.to_vec();
    let mut t = t_start;
    let mut k1 = vec![C64::new(0.0, 0.0); n];
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (k1.clone(), k1.clone(), k1.clone(), k1.clone(), k1.clone(), k1.clone());
    let mut ytmp = k1.clone();
    let mut ynew = k1.clone();
    let mut err = k1.clone();

    rhs(t, &y, &mut k1);
    stats.rhs_evals += 1;

    // Initial step guess.
    let mut h = {
        let zero = vec![C64::new(0.0, 0.0); n];
        let d0 = weighted_rms(&y, &y, &zero, opts.rtol, opts.atol);
        let d1 = weighted_rms(&k1, &y, &zero, opts.rtol, opts.atol);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(h_max);
        combine(&mut ytmp, &y, h0, &[(1.0, &k1)]);
        rhs(t + h0, &ytmp, &mut k2);
        stats.rhs_evals += 1;
        for i in 0..n {
            err[i] = k2[i] - k1[i];
        }
        let d2 = weighted_rms(&err, &y, &zero, opts.rtol, opts.atol) / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
        (100.0 * h0).min(h1).min(h_max)
    };
    let mut fac_old = 1e-4f64;
    let mut attempts = 0usize;

    for &target in &t_grid[1..] {
        while t < target {
            attempts += 1;
            if attempts > opts.max_steps {
                return Err(Error::TooManySteps(opts.max_steps));
            }
            if h < h_min {
                return Err(Error::StepUnderflow { t, step: h });
            }
            let remaining = target - t;
            let last = h >= remaining * (1.0 - 1e-12);
            let hs = if last { remaining } else { h };

            combine(&mut ytmp, &y, hs, &[(A21, &k1)]);
            rhs(t + C2 * hs, &ytmp, &mut k2);
            combine(&mut ytmp, &y, hs, &[(A31, &k1), (A32, &k2)]);
            rhs(t + C3 * hs, &ytmp, &mut k3);
            combine(&mut ytmp, &y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            rhs(t + C4 * hs, &ytmp, &mut k4);
            combine(&mut ytmp, &y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            rhs(t + C5 * hs, &ytmp, &mut k5);
            combine(&mut ytmp, &y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
            rhs(t + hs, &ytmp, &mut k6);
            combine(&mut ynew, &y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            rhs(t + hs, &ynew, &mut k7);
            stats.rhs_evals += 6;

            for i in 0..n {
                err[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
            }
            let e = weighted_rms(&err, &y, &ynew, opts.rtol, opts.atol);
            if !e.is_finite() {
                stats.rejected += 1;
                h = hs * FAC_MIN;
                continue;
            }
            let fac11 = e.powf(EXPO1);
            if e <= 1.0 {
                let fac = (fac11 / fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                fac_old = e.max(1e-4);
                stats.accepted += 1;
                t = if last { target } else { t + hs };
                std::mem::swap(&mut y, &mut ynew);
                std::mem::swap(&mut k1, &mut k7);
                // a step clipped to the grid point keeps the controller's proposal
                let proposal = hs / fac;
                h = if last { h.max(proposal) } else { proposal }.min(h_max);
            } else {
                stats.rejected += 1;
                h = hs / (fac11 / SAFETY).min(1.0 / FAC_MIN);
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}
