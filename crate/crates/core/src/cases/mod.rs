//! The verification experiments: a manufactured solution, the
//! Rayleigh–Taylor instability and a viscoplastic falling droplet.

use std::fmt;
use std::str::FromStr;

pub mod decay;
pub mod droplet;
pub mod mms;
pub mod rayleigh_taylor;

pub use decay::DecayConfig;
pub use droplet::DropletConfig;
pub use mms::{MmsLadder, MmsSolution};
pub use rayleigh_taylor::{BubbleHeight, RayleighTaylorConfig};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseKind {
    Mms,
    RayleighTaylor,
    Droplet,
}

impl CaseKind {
    pub fn name(self) -> &'static str {
        match self {
            CaseKind::Mms => "mms",
            CaseKind::RayleighTaylor => "rayleigh-taylor",
            CaseKind::Droplet => "droplet",
        }
    }
}

impl fmt::Display for CaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mms" => Ok(CaseKind::Mms),
            "rayleigh-taylor" | "rt" => Ok(CaseKind::RayleighTaylor),
            "droplet" => Ok(CaseKind::Droplet),
            _ => Err(Error::config("case", format!("unknown case `{s}` (mms, rayleigh-taylor, droplet)"))),
        }
    }
}
