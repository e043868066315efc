//! Boundary data `h` by name.
//!
//! Grammar: `yplus1sq` (also written `(y+1)^2`), `const:C`, `re-pow:K`
//! (`Re zᴷ`), `re-pole:A+Bi` (`Re 1/(z − c)`), `re-exp` (`Re eᶻ`).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{format_complex, parse_complex};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryData {
    /// `(y + 1)²`.
    YPlusOneSquared,
    Constant(f64),
    RePower(u32),
    RePole(Complex64),
    ReExp,
}

impl BoundaryData {
    pub fn eval(&self, z: Complex64) -> f64 {
        match *self {
            BoundaryData::YPlusOneSquared => (z.im + 1.0) * (z.im + 1.0),
            BoundaryData::Constant(c) => c,
            BoundaryData::RePower(k) => z.powu(k).re,
            BoundaryData::RePole(c) => (z - c).inv().re,
            BoundaryData::ReExp => z.exp().re,
        }
    }
}

impl fmt::Display for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryData::YPlusOneSquared => f.write_str("yplus1sq"),
            BoundaryData::Constant(c) => write!(f, "const:{c:?}"),
            BoundaryData::RePower(k) => write!(f, "re-pow:{k}"),
            BoundaryData::RePole(c) => write!(f, "re-pole:{}", format_complex(*c)),
            BoundaryData::ReExp => f.write_str("re-exp"),
        }
    }
}

impl FromStr for BoundaryData {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |why: &str| Error::Config(format!("boundary data '{s}': {why}"));
        match s {
            "yplus1sq" | "(y+1)^2" => return Ok(BoundaryData::YPlusOneSquared),
            "re-exp" => return Ok(BoundaryData::ReExp),
            _ => {}
        }
        let (head, arg) = s.split_once(':').ok_or_else(|| bad("unknown form"))?;
        match head {
            "const" => {
                let c: f64 = arg.trim().parse().map_err(|_| bad("expected a real constant"))?;
                if !c.is_finite() {
                    return Err(bad("constant must be finite"));
                }
                Ok(BoundaryData::Constant(c))
            }
            "re-pow" => arg.trim().parse().map(BoundaryData::RePower).map_err(|_| bad("expected a power")),
            "re-pole" => {
                let c = parse_complex(arg).map_err(|_| bad("expected a complex pole"))?;
                Ok(BoundaryData::RePole(c))
            }
            _ => Err(bad("unknown form")),
        }
    }
}
