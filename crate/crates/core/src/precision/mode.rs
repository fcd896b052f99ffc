use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error};

/// Arithmetic used by operator evaluation and preconditioning.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecisionMode {
    #[default]
    Fp64,
    Fp32,
    Fp16,
    Fp16Ec,
}

/// Precision of the accumulator in a contraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Accumulator {
    Fp64,
    Fp32,
}

impl PrecisionMode {
    pub const ALL: [PrecisionMode; 4] = [Self::Fp64, Self::Fp32, Self::Fp16, Self::Fp16Ec];

    pub fn accumulate(self) -> Accumulator {
        match self {
            Self::Fp64 => Accumulator::Fp64,
            _ => Accumulator::Fp32,
        }
    }

    /// True when vectors are stored in fp32.
    pub fn is_low(self) -> bool {
        self != Self::Fp64
    }

    /// True when operands are demoted to binary16.
    pub fn uses_half(self) -> bool {
        matches!(self, Self::Fp16 | Self::Fp16Ec)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Fp64 => "fp64",
            Self::Fp32 => "fp32",
            Self::Fp16 => "fp16",
            Self::Fp16Ec => "fp16_ec",
        }
    }
}

impl fmt::Display for PrecisionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PrecisionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fp64" | "f64" | "double" => Ok(Self::Fp64),
            "fp32" | "f32" | "single" => Ok(Self::Fp32),
            "fp16" | "f16" | "half" => Ok(Self::Fp16),
            "fp16_ec" | "fp16ec" | "fp16-ec" | "ec" => Ok(Self::Fp16Ec),
            other => Err(invalid(format!("unknown precision mode '{other}'"))),
        }
    }
}
