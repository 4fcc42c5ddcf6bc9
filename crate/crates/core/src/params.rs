use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n` GPUs, each with one in/out port on each of `k` optical switches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NetworkParams {
    pub n: usize,
    pub k: usize,
}

impl NetworkParams {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("n must be at least 2, got {n}")));
        }
        if k < 1 || k >= n {
            return Err(Error::InvalidParams(format!("k must satisfy 1 <= k < n, got k={k}, n={n}")));
        }
        Ok(NetworkParams { n, k })
    }

    /// Largest useful number of reconfigurations: each topology can give a
    /// node at most `k` fresh direct destinations.
    pub fn max_reconfigurations(&self) -> usize {
        (self.n - 1).div_ceil(self.k)
    }
}

/// Alpha-beta link model plus the per-reconfiguration delay.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CostModel {
    /// Single-hop latency, seconds.
    pub alpha: f64,
    /// Inverse bandwidth, seconds per byte.
    pub beta: f64,
    pub chunk_bytes: f64,
    /// Per-reconfiguration delay `R`, seconds.
    pub reconfig_delay: f64,
}

/// 800 Gb/s links.
pub const DEFAULT_LINK_BANDWIDTH_BPS: f64 = 800e9;
/// 500 ns per hop.
pub const DEFAULT_LINK_LATENCY_S: f64 = 500e-9;
/// 4 MiB chunks.
pub const DEFAULT_CHUNK_BYTES: f64 = 4.0 * 1024.0 * 1024.0;

impl CostModel {
    pub fn new(alpha: f64, beta: f64, chunk_bytes: f64, reconfig_delay: f64) -> Result<Self> {
        let cm = CostModel { alpha, beta, chunk_bytes, reconfig_delay };
        cm.validate()?;
        Ok(cm)
    }

    /// Reference link parameters with the given reconfiguration delay.
    pub fn reference(reconfig_delay: f64) -> Self {
        CostModel {
            alpha: DEFAULT_LINK_LATENCY_S,
            beta: 8.0 / DEFAULT_LINK_BANDWIDTH_BPS,
            chunk_bytes: DEFAULT_CHUNK_BYTES,
            reconfig_delay,
        }
    }

    /// A model where one chunk-hop costs exactly `t` seconds.
    pub fn from_t(t: f64, reconfig_delay: f64) -> Self {
        CostModel { alpha: t, beta: 0.0, chunk_bytes: 1.0, reconfig_delay }
    }

    /// Per-chunk per-hop time `T = alpha + beta * chunkBytes`.
    pub fn t(&self) -> f64 {
        self.alpha + self.beta * self.chunk_bytes
    }

    pub fn with_reconfig_delay(self, reconfig_delay: f64) -> Self {
        CostModel { reconfig_delay, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.alpha, self.beta, self.chunk_bytes, self.reconfig_delay].iter().all(|v| v.is_finite());
        // R = 0 is allowed so sweeps can include the zero-delay corner.
        if !finite || self.alpha < 0.0 || self.beta < 0.0 || self.chunk_bytes <= 0.0 || self.reconfig_delay < 0.0 {
            return Err(Error::InvalidCostModel(format!("{self:?}")));
        }
        if self.t() <= 0.0 {
            return Err(Error::InvalidCostModel("per-hop time T must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_bounds() {
        assert!(NetworkParams::new(1, 1).is_err());
        assert!(NetworkParams::new(8, 0).is_err());
        assert!(NetworkParams::new(8, 8).is_err());
        assert_eq!(NetworkParams::new(8, 2).unwrap().max_reconfigurations(), 4);
        assert_eq!(NetworkParams::new(8, 1).unwrap().max_reconfigurations(), 7);
    }

    #[test]
    fn reference_t() {
        let cm = CostModel::reference(1e-6);
        let expected = 500e-9 + 4.0 * 1048576.0 * 8.0 / 800e9;
        assert!((cm.t() - expected).abs() < 1e-18);
        assert!(CostModel::new(1e-6, 1e-11, 0.0, 1.0).is_err());
    }
}
