use std::fmt;

use serde::{Deserialize, Serialize};

/// IEEE-754 binary16 value: 1 sign bit, 5 exponent bits, 10 mantissa bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Binary16(u16);

const SIGN: u16 = 0x8000;
const EXP_MASK: u16 = 0x7C00;
const MAN_MASK: u16 = 0x03FF;
/// Canonical quiet NaN produced for every NaN input.
const QNAN: u16 = 0x7E00;

impl Binary16 {
    pub const ZERO: Self = Self(0);
    pub const ONE: Self = Self(0x3C00);
    pub const MAX: Self = Self(0x7BFF);
    pub const INFINITY: Self = Self(0x7C00);
    pub const NAN: Self = Self(QNAN);

    pub const fn from_bits(bits: u16) -> Self {
        Self(bits)
    }

    pub const fn to_bits(self) -> u16 {
        self.0
    }

    /// Round-to-nearest-even conversion from fp32, subnormal-correct.
    pub fn from_f32(x: f32) -> Self {
        let bits = x.to_bits();
        let sign = ((bits >> 16) as u16) & SIGN;
        let exp = ((bits >> 23) & 0xFF) as i32;
        let man = bits & 0x007F_FFFF;

        if exp == 0xFF {
            return if man == 0 { Self(sign | EXP_MASK) } else { Self(QNAN) };
        }
        // biased half exponent
        let e = exp - 127 + 15;
        if e >= 0x1F {
            return Self(sign | EXP_MASK);
        }
        if e <= 0 {
            // subnormal half (or zero); fp32 subnormals are far below 2^-25
            let shift = (14 - e) as u32;
            if shift > 24 || exp == 0 {
                return Self(sign);
            }
            let m = man | 0x0080_0000;
            let mut half = (m >> shift) as u16;
            let round = (m >> (shift - 1)) & 1 == 1;
            let sticky = m & ((1 << (shift - 1)) - 1) != 0;
            if round && (sticky || half & 1 == 1) {
                half += 1;
            }
            return Self(sign | half);
        }
        let mut half = ((e as u16) << 10) | (man >> 13) as u16;
        let round = (man >> 12) & 1 == 1;
        let sticky = man & 0x0FFF != 0;
        if round && (sticky || half & 1 == 1) {
            // a carry out of the mantissa bumps the exponent, up to infinity
            half += 1;
        }
        Self(sign | half)
    }

    /// Exact widening to fp32.
    pub fn to_f32(self) -> f32 {
        let sign = ((self.0 & SIGN) as u32) << 16;
        let exp = ((self.0 & EXP_MASK) >> 10) as u32;
        let man = (self.0 & MAN_MASK) as u32;
        let bits = match exp {
            0 if man == 0 => sign,
            0 => {
                // normalize the subnormal
                let lead = man.leading_zeros() - 21;
                let m = (man << lead) & 0x3FF;
                let e = 127 - 15 + 1 - lead;
                sign | (e << 23) | (m << 13)
            }
            0x1F if man == 0 => sign | 0x7F80_0000,
            0x1F => sign | 0x7FC0_0000 | (man << 13),
            _ => sign | ((exp + 127 - 15) << 23) | (man << 13),
        };
        f32::from_bits(bits)
    }

    pub fn is_nan(self) -> bool {
        self.0 & EXP_MASK == EXP_MASK && self.0 & MAN_MASK != 0
    }

    pub fn is_infinite(self) -> bool {
        self.0 & 0x7FFF == EXP_MASK
    }

    pub fn is_finite(self) -> bool {
        self.0 & EXP_MASK != EXP_MASK
    }

    pub fn is_subnormal(self) -> bool {
        self.0 & EXP_MASK == 0 && self.0 & MAN_MASK != 0
    }
}

impl fmt::Debug for Binary16 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Binary16({:#06x} = {})", self.0, self.to_f32())
    }
}

impl fmt::Display for Binary16 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f32(), f)
    }
}

/// `float2half`.
pub fn to_half(x: f32) -> Binary16 {
    Binary16::from_f32(x)
}

/// `half2float`.
pub fn from_half(h: Binary16) -> f32 {
    h.to_f32()
}

/// Rounds an fp32 value to the nearest binary16 value, returned widened.
#[inline]
pub(crate) fn round_to_half(x: f32) -> f32 {
    let bits = x.to_bits();
    let abs = bits & 0x7FFF_FFFF;
    // normal half range [2^-14, 65520): drop 13 mantissa bits with ties to even
    if (0x3880_0000..0x477F_F000).contains(&abs) {
        let rounded = bits + 0x0FFF + ((bits >> 13) & 1);
        return f32::from_bits(rounded & !0x1FFF);
    }
    Binary16::from_f32(x).to_f32()
}
