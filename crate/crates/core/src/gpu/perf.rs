use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Shared-memory bandwidth `SMs · banks · word bytes · clock` in TB/s.
pub fn shared_bandwidth(sms: usize, banks: usize, word_bytes: usize, clock_ghz: f64) -> f64 {
    sms as f64 * banks as f64 * word_bytes as f64 * clock_ghz * 1e9 / 1e12
}

/// A100 shared-memory bandwidth as commonly quoted for 108 SMs, 32 banks, 4 bytes, 1.27 GHz.
pub const QUOTED_A100_SHARED_TBS: f64 = 17.145;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandwidthReport {
    pub tb_per_s: f64,
    pub note: Option<String>,
}

/// [`shared_bandwidth`] with a note when the inputs match the A100 configuration,
/// whose quoted figure differs from the product.
pub fn shared_bandwidth_report(sms: usize, banks: usize, word_bytes: usize, clock_ghz: f64) -> BandwidthReport {
    let tb_per_s = shared_bandwidth(sms, banks, word_bytes, clock_ghz);
    let note = ((sms, banks, word_bytes) == (108, 32, 4) && (clock_ghz - 1.27).abs() < 1e-12).then(|| {
        format!(
            "the direct product is {tb_per_s:.3} TB/s; the commonly quoted figure for these inputs is \
             {QUOTED_A100_SHARED_TBS} TB/s, which does not equal the product"
        )
    });
    BandwidthReport { tb_per_s, note }
}

/// Shared-memory roofline `B·F/(d_r + d_w)` in flops/s.
pub fn roofline(bandwidth: f64, flops: f64, bytes_read: f64, bytes_written: f64) -> Result<f64> {
    let traffic = bytes_read + bytes_written;
    if !(traffic > 0.0) {
        return Err(Error::Undefined("roofline needs positive memory traffic".into()));
    }
    Ok(bandwidth * flops / traffic)
}

/// `min(peak, AI · bandwidth)`.
pub fn vram_roofline(peak_flops: f64, mem_bandwidth: f64, arithmetic_intensity: f64) -> f64 {
    peak_flops.min(arithmetic_intensity * mem_bandwidth)
}

/// Smallest supported size `>= n` and the operation ratio `(padded/n)^{d+1}`.
pub fn padding_cost(n: usize, supported: &[usize], dim: usize) -> Result<(usize, f64)> {
    if n == 0 {
        return Err(invalid("requested size must be positive"));
    }
    if supported.is_empty() {
        return Err(invalid("no supported sizes given"));
    }
    let padded = supported
        .iter()
        .copied()
        .filter(|&s| s >= n)
        .min()
        .ok_or_else(|| Error::Range(format!("size {n} exceeds the largest supported size")))?;
    Ok((padded, (padded as f64 / n as f64).powi(dim as i32 + 1)))
}
