//! Transfer-method recommendation from a size estimate.
//!
//! Small histories move fastest with `QUERY`; large ones with
//! `TRANSPORTTABLESPACE`. The crossover is a policy value, not a measured
//! constant. `LOADER` is only suggested when the policy opts into a
//! mid-size band.

use alloc::format;
use alloc::string::String;

use crate::semantics::Method;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SizeEstimate {
    pub row_count: u64,
    pub bytes: Option<u64>,
}

impl SizeEstimate {
    pub fn rows(row_count: u64) -> Self {
        SizeEstimate {
            row_count,
            bytes: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct AdvisorPolicy {
    pub small_threshold_rows: u64,
    pub prefer_loader_mid_band: bool,
}

pub const DEFAULT_THRESHOLD_ROWS: u64 = 1_000_000;

impl Default for AdvisorPolicy {
    fn default() -> Self {
        AdvisorPolicy {
            small_threshold_rows: DEFAULT_THRESHOLD_ROWS,
            prefer_loader_mid_band: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvalidPolicy;

impl AdvisorPolicy {
    pub fn new(small_threshold_rows: u64, prefer_loader_mid_band: bool) -> Result<Self, InvalidPolicy> {
        if small_threshold_rows == 0 {
            return Err(InvalidPolicy);
        }
        Ok(AdvisorPolicy {
            small_threshold_rows,
            prefer_loader_mid_band,
        })
    }

    /// Lower edge of the `LOADER` band, `[threshold / 2, threshold)`.
    pub fn loader_band_start(&self) -> u64 {
        self.small_threshold_rows / 2
    }
}

pub fn recommend(est: SizeEstimate, policy: &AdvisorPolicy) -> Method {
    let threshold = policy.small_threshold_rows.max(1);
    if est.row_count >= threshold {
        Method::TransportTablespace
    } else if policy.prefer_loader_mid_band && est.row_count >= policy.loader_band_start() {
        Method::Loader
    } else {
        Method::Query
    }
}

pub fn explain(est: SizeEstimate, policy: &AdvisorPolicy) -> String {
    let threshold = policy.small_threshold_rows.max(1);
    let rows = est.row_count;
    let size = match est.bytes {
        Some(b) => format!(" ({b} bytes)"),
        None => String::new(),
    };
    match recommend(est, policy) {
        Method::TransportTablespace => format!(
            "{rows} rows{size} >= threshold {threshold}: TRANSPORTTABLESPACE, per-row cost dominates and tablespace transport moves rows cheapest"
        ),
        Method::Loader => format!(
            "{rows} rows{size} in loader band [{}, {threshold}): LOADER, bulk load preferred by policy",
            policy.loader_band_start()
        ),
        Method::Query => format!(
            "{rows} rows{size} < threshold {threshold}: QUERY, setup cost dominates and insert-select needs no preparation"
        ),
    }
}
