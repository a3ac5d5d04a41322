//! Scenario configuration: defaults, `key=value` overrides, and the resolved
//! listing written into CSV headers.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Every accepted configuration key. `g1` is the energy unit and not a key.
pub const KEYS: &[&str] = &[
    "omega",
    "eps",
    "eps1",
    "eps2",
    "g2_over_g1",
    "kappa",
    "gamma",
    "d",
    "drive_omega",
    "n_max",
    "rtol",
    "atol",
    "t_max",
    "sample_count",
    "out_dir",
    "seed",
    "mes_tol",
    "r_min",
    "r_max",
    "r_step",
    "d_min",
    "d_max",
    "d_step",
    "ratios",
    "drives",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub omega: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub g2_over_g1: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub d: f64,
    /// Drive frame frequency; `None` follows `omega` (resonant drive).
    pub drive_omega: Option<f64>,
    pub n_max: usize,
    pub rtol: f64,
    pub atol: f64,
    /// Horizon override; `None` lets the scenario derive it.
    pub t_max: Option<f64>,
    pub sample_count: usize,
    /// Not part of the resolved listing: it does not affect results.
    pub out_dir: Option<String>,
    pub seed: u64,
    pub mes_tol: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub r_step: f64,
    pub d_min: f64,
    pub d_max: f64,
    pub d_step: f64,
    pub ratios: Vec<f64>,
    pub drives: Vec<f64>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            omega: 50.0,
            eps1: 10.0,
            eps2: 10.0,
            g2_over_g1: 1.0,
            kappa: 0.0,
            gamma: 0.0,
            d: 0.0,
            drive_omega: None,
            n_max: 1,
            rtol: 1e-10,
            atol: 1e-12,
            t_max: None,
            sample_count: 2001,
            out_dir: None,
            seed: 0,
            mes_tol: 1e-3,
            r_min: 0.05,
            r_max: 1.0,
            r_step: 0.01,
            d_min: 0.005,
            d_max: 0.2,
            d_step: 0.005,
            ratios: vec![1.0],
            drives: vec![0.05],
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    let x: f64 = value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidOverride(format!("{key}: `{value}` is not a number")))?;
    if !x.is_finite() {
        return Err(Error::InvalidOverride(format!("{key}: value must be finite")));
    }
    Ok(x)
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value.trim().parse().map_err(|_| Error::InvalidOverride(format!("{key}: `{value}` is not a non-negative integer")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    let items: Vec<f64> = value.split(',').map(|s| parse_f64(key, s)).collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::InvalidOverride(format!("{key}: empty list")));
    }
    Ok(items)
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Inclusive grid `min, min + step, ...` up to `max`, computed by index so
/// values do not accumulate rounding.
pub fn grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || max < min {
        return Err(Error::InvalidOverride(format!("bad grid: min {min}, max {max}, step {step}")));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    // round to 12 decimals so 0.05 + 37 * 0.01 prints as 0.42
    Ok((0..=n).map(|k| ((min + k as f64 * step) * 1e12).round() / 1e12).collect())
}

impl Config {
    /// Applies one `key=value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        match key {
            "omega" => self.omega = parse_f64(key, value)?,
            "eps" => {
                let e = parse_f64(key, value)?;
                self.eps1 = e;
                self.eps2 = e;
            }
            "eps1" => self.eps1 = parse_f64(key, value)?,
            "eps2" => self.eps2 = parse_f64(key, value)?,
            "g2_over_g1" => self.g2_over_g1 = parse_f64(key, value)?,
            "kappa" => self.kappa = parse_f64(key, value)?,
            "gamma" => self.gamma = parse_f64(key, value)?,
            "d" => self.d = parse_f64(key, value)?,
            "drive_omega" => self.drive_omega = Some(parse_f64(key, value)?),
            "n_max" => self.n_max = parse_usize(key, value)?,
            "rtol" => self.rtol = parse_f64(key, value)?,
            "atol" => self.atol = parse_f64(key, value)?,
            "t_max" => self.t_max = Some(parse_f64(key, value)?),
            "sample_count" => self.sample_count = parse_usize(key, value)?,
            "out_dir" => self.out_dir = Some(value.trim().to_string()),
            "seed" => self.seed = value.trim().parse().map_err(|_| Error::InvalidOverride(format!("seed: `{value}`")))?,
            "mes_tol" => self.mes_tol = parse_f64(key, value)?,
            "r_min" => self.r_min = parse_f64(key, value)?,
            "r_max" => self.r_max = parse_f64(key, value)?,
            "r_step" => self.r_step = parse_f64(key, value)?,
            "d_min" => self.d_min = parse_f64(key, value)?,
            "d_max" => self.d_max = parse_f64(key, value)?,
            "d_step" => self.d_step = parse_f64(key, value)?,
            "ratios" => self.ratios = parse_list(key, value)?,
            "drives" => self.drives = parse_list(key, value)?,
            _ => return Err(Error::InvalidOverride(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a `key=value` string.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = split_pair(pair)?;
        self.set(k, v)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_count < 2 {
            return Err(Error::InvalidOverride("sample_count must be at least 2".into()));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::InvalidOverride("rtol and atol must be positive".into()));
        }
        if let Some(t) = self.t_max {
            if !(t > 0.0) {
                return Err(Error::InvalidOverride("t_max must be positive".into()));
            }
        }
        if !(self.mes_tol > 0.0 && self.mes_tol <= 0.1) {
            return Err(Error::InvalidOverride("mes_tol must lie in (0, 0.1]".into()));
        }
        self.ratio_grid()?;
        self.drive_grid()?;
        self.params().validate().map_err(|e| Error::InvalidOverride(e.to_string()))
    }

    pub fn resolved_drive_omega(&self) -> f64 {
        self.drive_omega.unwrap_or(self.omega)
    }

    /// Model parameters at the configured ratio.
    pub fn params(&self) -> ModelParams {
        ModelParams {
            g1: 1.0,
            g2: self.g2_over_g1,
            omega: self.omega,
            eps1: self.eps1,
            eps2: self.eps2,
            kappa: self.kappa,
            gamma: self.gamma,
            d: self.d,
            drive_omega: self.resolved_drive_omega(),
            n_max: self.n_max,
        }
    }

    pub fn ratio_grid(&self) -> Result<Vec<f64>> {
        grid(self.r_min, self.r_max, self.r_step)
    }

    pub fn drive_grid(&self) -> Result<Vec<f64>> {
        grid(self.d_min, self.d_max, self.d_step)
    }

    /// Resolved `key=value` lines in [`KEYS`] order, without `out_dir`.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let t_max = self.t_max.map_or_else(|| "auto".to_string(), |t| t.to_string());
        vec![
            ("omega", self.omega.to_string()),
            ("eps1", self.eps1.to_string()),
            ("eps2", self.eps2.to_string()),
            ("g2_over_g1", self.g2_over_g1.to_string()),
            ("kappa", self.kappa.to_string()),
            ("gamma", self.gamma.to_string()),
            ("d", self.d.to_string()),
            ("drive_omega", self.resolved_drive_omega().to_string()),
            ("n_max", self.n_max.to_string()),
            ("rtol", self.rtol.to_string()),
            ("atol", self.atol.to_string()),
            ("t_max", t_max),
            ("sample_count", self.sample_count.to_string()),
            ("seed", self.seed.to_string()),
            ("mes_tol", self.mes_tol.to_string()),
            ("r_min", self.r_min.to_string()),
            ("r_max", self.r_max.to_string()),
            ("r_step", self.r_step.to_string()),
            ("d_min", self.d_min.to_string()),
            ("d_max", self.d_max.to_string()),
            ("d_step", self.d_step.to_string()),
            ("ratios", fmt_list(&self.ratios)),
            ("drives", fmt_list(&self.drives)),
        ]
    }

    pub fn describe(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }
}

pub fn split_pair(pair: &str) -> Result<(&str, &str)> {
    match pair.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim(), v.trim())),
        _ => Err(Error::InvalidOverride(format!("expected key=value, got `{pair}`"))),
    }
}

/// Reads a plain `key=value` file; blank lines and `#` comments are skipped.
/// Returns the lines verbatim so they can be recorded.
pub fn read_config_file(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        split_pair(line)?;
        out.push(line.to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_key_is_settable() {
        for key in KEYS {
            let value = match *key {
                "n_max" | "sample_count" | "seed" => "3",
                "out_dir" => "x",
                "ratios" | "drives" => "0.5,1",
                _ => "0.05",
            };
            let mut c = Config::default();
            c.set(key, value).unwrap_or_else(|e| panic!("{key}: {e}"));
        }
    }

    #[test]
    fn rejects_unknown_and_bad_values() {
        let mut c = Config::default();
        assert!(matches!(c.set("g1", "2"), Err(Error::InvalidOverride(_))));
        assert!(matches!(c.set("omega", "abc"), Err(Error::InvalidOverride(_))));
        assert!(matches!(c.set("omega", "inf"), Err(Error::InvalidOverride(_))));
        assert!(matches!(c.set("n_max", "-1"), Err(Error::InvalidOverride(_))));
        assert!(matches!(c.set_pair("omega"), Err(Error::InvalidOverride(_))));
        c.set("kappa", "-1").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn eps_sets_both() {
        let mut c = Config::default();
        c.set_pair("eps=12.5").unwrap();
        assert_eq!((c.eps1, c.eps2), (12.5, 12.5));
    }

    #[test]
    fn drive_frame_follows_omega() {
        let mut c = Config::default();
        c.set("omega", "7").unwrap();
        assert_eq!(c.params().drive_omega, 7.0);
        c.set("drive_omega", "8").unwrap();
        assert_eq!(c.params().drive_omega, 8.0);
    }

    #[test]
    fn grids_are_clean() {
        let g = grid(0.05, 1.0, 0.01).unwrap();
        assert_eq!(g.len(), 96);
        assert_eq!(g[37], 0.42);
        assert_eq!(*g.last().unwrap(), 1.0);
        let d = grid(0.005, 0.2, 0.005).unwrap();
        assert_eq!(d.len(), 40);
        assert!(grid(1.0, 0.0, 0.1).is_err());
        assert!(grid(0.0, 1.0, 0.0).is_err());
    }
}
