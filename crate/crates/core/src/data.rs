//! Bundled Covid-19 death-rate data set (India, March 16 - May 13, 2020),
//! 90 daily values. The file ships with the crate and is checksum-verified
//! at load because the original web source is volatile.

use crate::error::{Error, Result};
use sha2::{Digest, Sha256};

const RAW: &str = include_str!("../data/covid19_india_death_rates.txt");

/// SHA-256 of the bundled data file.
pub const COVID19_SHA256: &str = "b02a840173449d91c3d8f0921e0c1ea5205050b9ab14f1964202031bde6478f2";

/// The 90 death rates, in published order.
pub fn covid19_death_rates() -> Result<Vec<f64>> {
    let digest = Sha256::digest(RAW.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    if hex != COVID19_SHA256 {
        return Err(Error::Evaluation(format!("bundled data checksum mismatch: {hex}")));
    }
    RAW.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse::<f64>()
                .map_err(|e| Error::Evaluation(format!("bundled data parse failure: {e}")))
        })
        .collect()
}
