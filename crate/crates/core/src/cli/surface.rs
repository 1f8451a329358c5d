//! Distance surfaces over a (μ, κ) grid, as plot-ready CSV.
//!
//! The file has the header `mu,kappa,height`, then `grid_mu * grid_kappa`
//! grid rows (μ outer, κ inner), then one row per scatter point if any were
//! supplied. Scatter rows carry the height of the surface at that point.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gamma::{self, GammaParams};

#[derive(Debug, Error)]
pub enum SurfaceError {
    #[error("invalid surface grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceKind {
    /// |ψ'(κ) - ψ'(κ₀)| + |log(μ₀/μ)|
    #[default]
    Eq5,
    /// Length of the coordinate path, κ leg then μ leg.
    Arclength,
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Eq5 => "eq5",
            Self::Arclength => "arclength",
        })
    }
}

impl FromStr for SurfaceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eq5" | "bound" => Ok(Self::Eq5),
            "arclength" | "arc-length" => Ok(Self::Arclength),
            _ => Err(format!(
                "unknown surface kind `{s}` (expected eq5 or arclength)"
            )),
        }
    }
}

impl SurfaceKind {
    pub fn height(&self, reference: &GammaParams, point: &GammaParams) -> f64 {
        match self {
            Self::Eq5 => gamma::distance_bound(reference, point),
            Self::Arclength => gamma::arc_length_distance(reference, point),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSpec {
    pub reference: GammaParams,
    pub mu_range: (f64, f64),
    pub kappa_range: (f64, f64),
    pub grid_mu: usize,
    pub grid_kappa: usize,
    pub which: SurfaceKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub mu: f64,
    pub kappa: f64,
    pub height: f64,
}

/// `n` evenly spaced nodes from `lo` to `hi` inclusive.
pub fn grid_nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / last
            }
        })
        .collect()
}

impl SurfaceSpec {
    fn validate(&self) -> Result<(), SurfaceError> {
        for (name, (lo, hi)) in [("mu", self.mu_range), ("kappa", self.kappa_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
                return Err(SurfaceError::InvalidGrid(format!(
                    "{name} range must satisfy 0 < lo < hi, got [{lo}, {hi}]"
                )));
            }
        }
        if self.grid_mu < 2 || self.grid_kappa < 2 {
            return Err(SurfaceError::InvalidGrid(format!(
                "grid needs at least 2 nodes per axis, got {} x {}",
                self.grid_mu, self.grid_kappa
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Result<Vec<SurfacePoint>, SurfaceError> {
        self.validate()?;
        let mus = grid_nodes(self.mu_range.0, self.mu_range.1, self.grid_mu);
        let kappas = grid_nodes(self.kappa_range.0, self.kappa_range.1, self.grid_kappa);
        let mut points = Vec::with_capacity(mus.len() * kappas.len());
        for &mu in &mus {
            for &kappa in &kappas {
                let at = GammaParams::new(mu, kappa).expect("validated positive grid");
                points.push(SurfacePoint {
                    mu,
                    kappa,
                    height: self.which.height(&self.reference, &at),
                });
            }
        }
        Ok(points)
    }
}

/// Writes the surface CSV and returns the number of data rows written.
pub fn emit_surface<W: Write>(
    mut out: W,
    spec: &SurfaceSpec,
    scatter: &[GammaParams],
) -> Result<usize, SurfaceError> {
    let grid = spec.points()?;
    writeln!(out, "mu,kappa,height")?;
    let scatter_rows = scatter.iter().map(|p| SurfacePoint {
        mu: p.mu(),
        kappa: p.kappa(),
        height: spec.which.height(&spec.reference, p),
    });
    let mut rows = 0;
    for point in grid.into_iter().chain(scatter_rows) {
        writeln!(out, "{:?},{:?},{:?}", point.mu, point.kappa, point.height)?;
        rows += 1;
    }
    out.flush()?;
    Ok(rows)
}
