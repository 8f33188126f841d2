use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const DEFAULT_DIM_CAP: usize = 4096;
pub const DIM_CAP_ENV: &str = "DIPESIM_DIM_CAP";

/// Largest operator dimension the library will materialize. Read once from
/// `DIPESIM_DIM_CAP`, falling back to 4096.
pub fn dim_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(DIM_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&c| c > 0)
            .unwrap_or(DEFAULT_DIM_CAP)
    })
}

pub fn check_dim(dim: usize) -> Result<()> {
    let cap = dim_cap();
    if dim > cap {
        Err(Error::CapExceeded { dim, cap })
    } else {
        Ok(())
    }
}

/// `base^exp`, or `None` on overflow.
pub fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    (0..exp).try_fold(1usize, |acc, _| acc.checked_mul(base))
}

pub fn check_power(base: usize, exp: usize) -> Result<usize> {
    let dim = checked_pow(base, exp).ok_or(Error::CapExceeded { dim: usize::MAX, cap: dim_cap() })?;
    check_dim(dim)?;
    Ok(dim)
}
