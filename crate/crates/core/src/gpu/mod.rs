//! Analytical GPU models: shared-memory bank conflicts under XOR-swizzled
//! layouts, MMA operand access patterns, rooflines and padding cost.

mod bank;
mod layout;
mod pattern;
mod perf;

pub use bank::{bank_trace, search_conflict_free_swizzle, BankReport, BANKS, BANK_BYTES};
pub use layout::{xor_swizzle_layout, LayoutFn, Swizzle};
pub use pattern::{mma_fragment_pattern, AccessPattern, FragmentPrecision, MmaShape, Role, WARP_SIZE};
pub use perf::{
    padding_cost, roofline, shared_bandwidth, shared_bandwidth_report, vram_roofline, BandwidthReport,
    QUOTED_A100_SHARED_TBS,
};
