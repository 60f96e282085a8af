//! Tabulated laws and their CSV/JSON serialization.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Exec;

/// Which law a curve tabulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawId {
    MarchenkoPastur,
    GeneralizedMp,
    TailAsymptote,
    SmallXAsymptote,
    MicroDensity,
    FirstEigenvalue,
    GapProbability,
    Spacing,
    RescaledSpacing,
    FiniteDensity,
    FiniteMacroTheta,
    Histogram,
}

impl LawId {
    pub fn as_str(&self) -> &'static str {
        match self {
            LawId::MarchenkoPastur => "marchenko-pastur",
            LawId::GeneralizedMp => "generalized-mp",
            LawId::TailAsymptote => "tail-asymptote",
            LawId::SmallXAsymptote => "small-x-asymptote",
            LawId::MicroDensity => "micro-density",
            LawId::FirstEigenvalue => "first-eigenvalue",
            LawId::GapProbability => "gap-probability",
            LawId::Spacing => "spacing",
            LawId::RescaledSpacing => "rescaled-spacing",
            LawId::FiniteDensity => "finite-density",
            LawId::FiniteMacroTheta => "finite-macro-theta",
            LawId::Histogram => "histogram",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridScale {
    Linear,
    Log,
}

/// Evaluation grid `min:max:points:scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub scale: GridScale,
}

impl Grid {
    pub fn new(min: f64, max: f64, points: usize, scale: GridScale) -> Result<Self> {
        let g = Self { min, max, points, scale };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.max > self.min) {
            return Err(Error::Domain(format!("grid needs min < max, got {}..{}", self.min, self.max)));
        }
        if self.points < 2 {
            return Err(Error::Domain(format!("grid needs at least 2 points, got {}", self.points)));
        }
        if self.scale == GridScale::Log && !(self.min > 0.0) {
            return Err(Error::Domain("log grid needs min > 0".into()));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let m = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / m;
                let v = match self.scale {
                    GridScale::Linear => self.min + t * (self.max - self.min),
                    GridScale::Log => (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp(),
                };
                // pin the end points exactly
                if i == 0 {
                    self.min
                } else if i == self.points - 1 {
                    self.max
                } else {
                    v
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 && parts.len() != 4 {
            return Err(Error::Parse(format!("grid must be min:max:points[:linear|log], got {s:?}")));
        }
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("bad grid number {t:?}: {e}")));
        let points = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("bad grid point count {:?}: {e}", parts[2])))?;
        let scale = match parts.get(3).map(|t| t.trim()) {
            None | Some("lin") | Some("linear") => GridScale::Linear,
            Some("log") => GridScale::Log,
            Some(other) => return Err(Error::Parse(format!("unknown grid scale {other:?}"))),
        };
        Grid::new(num(parts[0])?, num(parts[1])?, points, scale)
    }
}

/// A law tabulated on a grid together with the parameters that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub law: LawId,
    pub params: serde_json::Value,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl DensityCurve {
    pub fn new(law: LawId, params: serde_json::Value, grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let c = Self { law, params, grid, values };
        c.validate()?;
        Ok(c)
    }

    /// Evaluates `f` on every grid point; the order of the output never
    /// depends on `exec`.
    pub fn tabulate<F>(law: LawId, params: serde_json::Value, grid: &[f64], exec: Exec, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync + Send,
    {
        let values: Result<Vec<f64>> = exec.map(grid, |&x| f(x)).into_iter().collect();
        Self::new(law, params, grid.to_vec(), values?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.len() != self.values.len() {
            return Err(Error::InternalConsistency(format!(
                "grid has {} points but there are {} values",
                self.grid.len(),
                self.values.len()
            )));
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InternalConsistency("curve grid is not strictly increasing".into()));
        }
        if let Some(v) = self.values.iter().find(|v| v.is_nan()) {
            return Err(Error::Numerical(format!("curve contains a non-number value {v}")));
        }
        Ok(())
    }

    /// Trapezoidal integral of the values over the grid.
    pub fn trapezoid_mass(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }

    /// CSV with `#`-prefixed metadata lines, then `x,value` rows in
    /// 17-significant-digit scientific notation.
    pub fn to_csv(&self, extra: &[(&str, String)]) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# powerwl {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "# law: {}", self.law.as_str());
        let _ = writeln!(out, "# params: {}", self.params);
        for (k, v) in extra {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str("x,value\n");
        for (x, y) in self.grid.iter().zip(&self.values) {
            let _ = writeln!(out, "{x:.16e},{y:.16e}");
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }
}
