//! Experiment configuration and degree schedules.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::data::BoundaryData;
use crate::error::{Error, Result};
use crate::geometry::ParametricCurve;
use crate::ratsolver::PoleSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Poly,
    Rational,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Poly => "poly",
            Method::Rational => "rational",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "poly" | "polynomial" => Ok(Method::Poly),
            "rational" | "rat" => Ok(Method::Rational),
            other => Err(Error::Config(format!("unknown method '{other}'"))),
        }
    }
}

/// Strictly increasing list of degrees, written either as a comma list
/// (`20,40,80`) or as `start:stop:step` with `stop` inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DegreeSchedule {
    spec: String,
    degrees: Vec<usize>,
}

impl DegreeSchedule {
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn from_list(degrees: &[usize]) -> Result<Self> {
        let spec = degrees.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",");
        spec.parse()
    }
}

impl FromStr for DegreeSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let spec = s.trim().to_string();
        let bad = |why: &str| Error::Config(format!("degree schedule '{spec}': {why}"));
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| bad("expected non-negative integers"));
        let degrees: Vec<usize> = if spec.contains(':') {
            let parts: Vec<&str> = spec.split(':').collect();
            if parts.len() != 3 {
                return Err(bad("range form is start:stop:step"));
            }
            let (start, stop, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
            if step == 0 {
                return Err(bad("step must be positive"));
            }
            (start..=stop).step_by(step).collect()
        } else {
            spec.split(',').map(parse).collect::<Result<_>>()?
        };
        if degrees.is_empty() {
            return Err(bad("empty"));
        }
        if degrees.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("degrees must be strictly increasing"));
        }
        Ok(Self { spec, degrees })
    }
}

impl TryFrom<String> for DegreeSchedule {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DegreeSchedule> for String {
    fn from(d: DegreeSchedule) -> String {
        d.spec
    }
}

impl fmt::Display for DegreeSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec)
    }
}

/// Everything needed to reproduce one convergence sweep.
///
/// For the rational method each schedule entry is a pole budget: the
/// maximal AAA degree for the data-driven pole sources, or the number of
/// poles per side for the branch-cut law. The recorded degree is always
/// `npoly + #poles`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub curve: String,
    pub data: String,
    pub method: Method,
    #[serde(default = "default_pole_source")]
    pub pole_source: PoleSource,
    /// Boundary samples `M` (a floor; see `oversampling`).
    #[serde(default = "default_points")]
    pub points: usize,
    pub degrees: DegreeSchedule,
    /// Relative AAA tolerance used when selecting poles.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Fits at total degree `n` use `max(points, oversampling · n)` samples.
    #[serde(default = "default_oversampling")]
    pub oversampling: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_pole_source() -> PoleSource {
    PoleSource::FromSchwarz
}

fn default_points() -> usize {
    1500
}

fn default_tol() -> f64 {
    1e-14
}

fn default_oversampling() -> usize {
    16
}

impl ExperimentConfig {
    pub fn new(curve: &str, data: &str, method: Method, degrees: DegreeSchedule) -> Self {
        Self {
            curve: curve.to_string(),
            data: data.to_string(),
            method,
            pole_source: default_pole_source(),
            points: default_points(),
            degrees,
            tol: default_tol(),
            oversampling: default_oversampling(),
            out: None,
        }
    }

    pub fn parse_curve(&self) -> Result<ParametricCurve> {
        self.curve.parse()
    }

    pub fn parse_data(&self) -> Result<BoundaryData> {
        self.data.parse()
    }

    pub fn validate(&self) -> Result<()> {
        self.parse_curve()?;
        self.parse_data()?;
        if self.points < 8 {
            return Err(Error::Config(format!("points must be at least 8, got {}", self.points)));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Config(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        if self.oversampling < 2 {
            return Err(Error::Config("oversampling must be at least 2".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }
}
