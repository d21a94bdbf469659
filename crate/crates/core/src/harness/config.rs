//! `key = value` experiment configuration.
//!
//! One assignment per line; `#` starts a comment. Later assignments win, and
//! command-line flags are applied on top through [`ExperimentConfig::set`].

use std::path::{Path, PathBuf};

use crate::domain::Grid;
use crate::error::{Error, Result};
use crate::lyapunov::PhiProfile;
use crate::model::Params;
use crate::solver::{Scheme, SolverConfig};

/// Every accepted key with a one-line description (used by `--help` and the
/// README).
pub const KEYS: &[(&str, &str)] = &[
    ("d1, d2, d3, d4", "diffusivities"),
    ("k1, k2, k3, k4", "reaction rates"),
    ("rho", "total mass"),
    ("volume", "domain measure for grid-free commands (defaults to the grid volume)"),
    ("dim", "1 or 2"),
    ("cells, cells_y", "cells per axis (cells_y defaults to cells)"),
    ("extent, extent_y", "domain side lengths (extent_y defaults to extent)"),
    ("dt", "time step"),
    ("t_end", "final time (per-command default when unset)"),
    ("scheme", "imex_euler or strang"),
    ("output_every", "log interval (per-command default when unset)"),
    ("steady_tol", "steady-state threshold on ||u_{n+1} - u_n||_2 / dt"),
    ("system", "rgs, reduced or gs (simulate only)"),
    ("preset", "circ, boundary, generic, low-energy, u3-only or mixed"),
    ("seed", "RNG seed for random initial data"),
    ("count", "number of initial conditions for longterm"),
    ("eps_list", "comma-separated, strictly decreasing"),
    ("horizon", "comparison horizon T for eps-limit"),
    ("p_norm", "comparison norm exponent for eps-limit, in (1, 2)"),
    ("eps_k1", "k1 used by eps-limit"),
    ("feed, feed_amp", "feed a(x) = feed + feed_amp cos(pi x / extent)"),
    ("compare_every", "sampling interval for eps-limit errors"),
    ("profile", "power2, power:p, entropy, clip_above:M, clip_below:M"),
    ("s0", "comma-separated initial center coordinates"),
    ("xi_list", "comma-separated xi values for the center coefficient check"),
    ("samples", "envelope samples per s0"),
    ("dense_limit", "largest grid for dense spectra"),
    ("output_dir", "write files here instead of printing to stdout"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Rgs,
    Reduced,
    Gs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: Params,
    pub rho: f64,
    pub volume: Option<f64>,
    pub dim: usize,
    pub cells: usize,
    pub cells_y: Option<usize>,
    pub extent: f64,
    pub extent_y: Option<f64>,
    pub dt: f64,
    pub t_end: Option<f64>,
    pub scheme: Scheme,
    pub output_every: Option<f64>,
    pub steady_tol: f64,
    pub system: SystemKind,
    /// Unset means `generic` for single runs and `mixed` for longterm.
    pub preset: Option<String>,
    pub seed: u64,
    pub count: usize,
    pub eps_list: Vec<f64>,
    pub horizon: f64,
    pub p_norm: f64,
    pub eps_k1: f64,
    pub feed: f64,
    pub feed_amp: f64,
    pub compare_every: f64,
    pub profile: PhiProfile,
    pub s0: Vec<f64>,
    pub xi_list: Vec<f64>,
    pub samples: usize,
    pub dense_limit: usize,
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            params: Params::unit(),
            rho: 1.0,
            volume: None,
            dim: 1,
            cells: 128,
            cells_y: None,
            extent: 1.0,
            extent_y: None,
            dt: 1e-3,
            t_end: None,
            scheme: Scheme::ImexEuler,
            output_every: None,
            steady_tol: 1e-9,
            system: SystemKind::Rgs,
            preset: None,
            seed: 7,
            count: 20,
            eps_list: vec![0.1, 0.05, 0.025, 0.0125],
            horizon: 20.0,
            p_norm: 1.5,
            eps_k1: 0.1,
            feed: 0.3,
            feed_amp: 0.05,
            compare_every: 0.05,
            profile: PhiProfile::Power(2.0),
            s0: vec![0.01],
            xi_list: vec![1e-4, 1e-3, 5e-3, 1e-2, 2e-2, 5e-2],
            samples: 100,
            dense_limit: crate::stability::DENSE_CELL_LIMIT,
            output_dir: None,
        }
    }
}

fn malformed(key: &str, value: &str, reason: impl Into<String>) -> Error {
    Error::MalformedValue {
        key: key.into(),
        value: value.into(),
        reason: reason.into(),
    }
}

fn real(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value.parse().map_err(|_| malformed(key, value, "not a number"))?;
    if !v.is_finite() {
        return Err(malformed(key, value, "must be finite"));
    }
    Ok(v)
}

fn positive(key: &str, value: &str) -> Result<f64> {
    let v = real(key, value)?;
    if v <= 0.0 {
        return Err(malformed(key, value, "must be positive"));
    }
    Ok(v)
}

fn count(key: &str, value: &str) -> Result<usize> {
    value.parse().map_err(|_| malformed(key, value, "not a non-negative integer"))
}

fn list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|s| real(key, s.trim()).map_err(|_| malformed(key, value, format!("`{}` is not a number", s.trim()))))
        .collect()
}

const PRESETS: &[&str] = &["circ", "boundary", "generic", "low-energy", "u3-only", "mixed"];

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.merge_file(path)?;
        Ok(cfg)
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::MissingFile {
            path: path.to_path_buf(),
            source,
        })?;
        self.merge_str(&text)
    }

    pub fn merge_str(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`, found `{line}`", n + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let idx = |c: char| (c as u8 - b'1') as usize;
        match key {
            "d1" | "d2" | "d3" | "d4" => self.params.d[idx(key.chars().nth(1).unwrap())] = positive(key, value)?,
            "k1" | "k2" | "k3" | "k4" => self.params.k[idx(key.chars().nth(1).unwrap())] = positive(key, value)?,
            "rho" => self.rho = positive(key, value)?,
            "volume" => self.volume = Some(positive(key, value)?),
            "dim" => {
                self.dim = match value {
                    "1" => 1,
                    "2" => 2,
                    _ => return Err(malformed(key, value, "must be 1 or 2")),
                }
            }
            "cells" => self.cells = count(key, value)?,
            "cells_y" => self.cells_y = Some(count(key, value)?),
            "extent" => self.extent = positive(key, value)?,
            "extent_y" => self.extent_y = Some(positive(key, value)?),
            "dt" => self.dt = positive(key, value)?,
            "t_end" => self.t_end = Some(positive(key, value)?),
            "scheme" => self.scheme = value.parse()?,
            "output_every" => self.output_every = Some(positive(key, value)?),
            "steady_tol" => self.steady_tol = positive(key, value)?,
            "system" => {
                self.system = match value {
                    "rgs" => SystemKind::Rgs,
                    "reduced" => SystemKind::Reduced,
                    "gs" => SystemKind::Gs,
                    _ => return Err(malformed(key, value, "expected rgs, reduced or gs")),
                }
            }
            "preset" => {
                if !PRESETS.contains(&value) {
                    return Err(malformed(key, value, format!("expected one of {}", PRESETS.join(", "))));
                }
                self.preset = Some(value.into());
            }
            "seed" => self.seed = value.parse().map_err(|_| malformed(key, value, "not an unsigned integer"))?,
            "count" => self.count = count(key, value)?,
            "eps_list" => {
                let eps = list(key, value)?;
                if eps.is_empty() || eps.iter().any(|e| *e <= 0.0) || eps.windows(2).any(|w| w[1] >= w[0]) {
                    return Err(malformed(key, value, "must be positive and strictly decreasing"));
                }
                self.eps_list = eps;
            }
            "horizon" => self.horizon = positive(key, value)?,
            "p_norm" => {
                let p = real(key, value)?;
                if !(p > 1.0 && p < 2.0) {
                    return Err(malformed(key, value, "must lie in (1, 2)"));
                }
                self.p_norm = p;
            }
            "eps_k1" => self.eps_k1 = positive(key, value)?,
            "feed" => {
                self.feed = real(key, value)?;
                if self.feed < 0.0 {
                    return Err(malformed(key, value, "must be non-negative"));
                }
            }
            "feed_amp" => self.feed_amp = real(key, value)?,
            "compare_every" => self.compare_every = positive(key, value)?,
            "profile" => {
                self.profile = PhiProfile::parse(value).map_err(|_| malformed(key, value, "unknown profile"))?
            }
            "s0" => {
                let s0 = list(key, value)?;
                if s0.iter().any(|s| *s < 0.0) {
                    return Err(malformed(key, value, "must be non-negative"));
                }
                self.s0 = s0;
            }
            "xi_list" => self.xi_list = list(key, value)?,
            "samples" => self.samples = count(key, value)?,
            "dense_limit" => self.dense_limit = count(key, value)?,
            "output_dir" => self.output_dir = Some(PathBuf::from(value)),
            _ => return Err(Error::UnknownKey { key: key.into() }),
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        match self.dim {
            1 => Grid::line(self.extent, self.cells),
            _ => Grid::rect(
                [self.extent, self.extent_y.unwrap_or(self.extent)],
                [self.cells, self.cells_y.unwrap_or(self.cells)],
            ),
        }
    }

    /// Domain measure used by grid-free commands.
    pub fn volume(&self) -> f64 {
        self.volume.unwrap_or_else(|| match self.dim {
            1 => self.extent,
            _ => self.extent * self.extent_y.unwrap_or(self.extent),
        })
    }

    pub fn solver(&self, default_t_end: f64, default_output: f64) -> SolverConfig {
        SolverConfig {
            dt: self.dt,
            t_end: self.t_end.unwrap_or(default_t_end),
            scheme: self.scheme,
            output_every: self.output_every.unwrap_or(default_output).max(self.dt),
            steady_tol: self.steady_tol,
            ..SolverConfig::default()
        }
    }
}
