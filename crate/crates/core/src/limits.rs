//! Process-wide sizing limits.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, ErrorKind, Result};

pub const DEFAULT_DIM_CAP: usize = 4096;
pub const DIM_CAP_ENV: &str = "STEINLAB_DIM_CAP";

// 0 means "not yet resolved from the environment".
static DIM_CAP: AtomicUsize = AtomicUsize::new(0);

/// Largest Hilbert-space dimension any tensor power may reach.
pub fn dim_cap() -> usize {
    match DIM_CAP.load(Ordering::Relaxed) {
        0 => {
            let cap = std::env::var(DIM_CAP_ENV)
                .ok()
                .and_then(|v| v.trim().parse::<usize>().ok())
                .filter(|&v| v > 0)
                .unwrap_or(DEFAULT_DIM_CAP);
            DIM_CAP.store(cap, Ordering::Relaxed);
            cap
        }
        cap => cap,
    }
}

pub fn set_dim_cap(cap: usize) {
    DIM_CAP.store(cap.max(1), Ordering::Relaxed);
}

/// `k^n`, or a sizing error when it exceeds the cap.
pub fn checked_power_dim(k: usize, n: usize, module: &'static str, op: &'static str) -> Result<usize> {
    let cap = dim_cap();
    let mut dim: u128 = 1;
    for _ in 0..n {
        dim = dim.saturating_mul(k as u128);
        if dim > cap as u128 {
            let requested = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
            return Err(Error::new(module, op, ErrorKind::DimensionCap { requested, cap }));
        }
    }
    Ok(dim as usize)
}
