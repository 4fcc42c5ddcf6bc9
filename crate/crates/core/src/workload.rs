//! Synthetic demand matrices.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::traffic::TrafficMatrix;

pub const DEFAULT_ZIPF_FACTOR: f64 = 0.4;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WorkloadKind {
    Uniform,
    Random,
    Zipf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WorkloadSpec {
    pub kind: WorkloadKind,
    pub n: usize,
    pub mean_chunks: u64,
    #[serde(default = "default_zipf")]
    pub zipf_factor: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_zipf() -> f64 {
    DEFAULT_ZIPF_FACTOR
}

impl WorkloadSpec {
    pub fn new(kind: WorkloadKind, n: usize, mean_chunks: u64) -> Self {
        WorkloadSpec { kind, n, mean_chunks, zipf_factor: DEFAULT_ZIPF_FACTOR, seed: DEFAULT_SEED }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        WorkloadSpec { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParams(format!("n must be at least 2, got {}", self.n)));
        }
        if self.mean_chunks < 1 {
            return Err(Error::InvalidParams("meanChunks must be at least 1".into()));
        }
        if self.kind == WorkloadKind::Zipf && !(self.zipf_factor > 0.0 && self.zipf_factor.is_finite()) {
            return Err(Error::InvalidParams(format!("zipf factor must be positive, got {}", self.zipf_factor)));
        }
        Ok(())
    }
}

/// Off-diagonal demand drawn per `spec`; identical seeds give identical
/// matrices.
///
/// * uniform: every pair gets `meanChunks`.
/// * random: i.i.d. uniform on `[1, 2*meanChunks - 1]`.
/// * zipf: pairs are shuffled into a rank order, rank `r` gets weight
///   `r^-factor`, and weights are scaled so the mean is `meanChunks`
///   (rounded, at least 1).
pub fn gen_traffic(spec: &WorkloadSpec) -> Result<TrafficMatrix> {
    spec.validate()?;
    let n = spec.n;
    let m = spec.mean_chunks;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut a = TrafficMatrix::zeros(n);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|s| (0..n).filter(move |&d| d != s).map(move |d| (s, d))).collect();
    match spec.kind {
        WorkloadKind::Uniform => return Ok(TrafficMatrix::uniform(n, m)),
        WorkloadKind::Random => {
            for &(s, d) in &pairs {
                a.set(s, d, rng.gen_range(1..=2 * m - 1))?;
            }
        }
        WorkloadKind::Zipf => {
            let mut ranked = pairs.clone();
            ranked.shuffle(&mut rng);
            let weights: Vec<f64> = (1..=ranked.len()).map(|r| (r as f64).powf(-spec.zipf_factor)).collect();
            let scale = m as f64 * ranked.len() as f64 / weights.iter().sum::<f64>();
            for (&(s, d), w) in ranked.iter().zip(&weights) {
                a.set(s, d, ((w * scale).round() as u64).max(1))?;
            }
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn off_diagonal(a: &TrafficMatrix) -> Vec<u64> {
        a.flows().map(|(_, _, c)| c).collect()
    }

    #[test]
    fn uniform_entries() {
        let a = gen_traffic(&WorkloadSpec::new(WorkloadKind::Uniform, 8, 8)).unwrap();
        assert!(a.is_uniform());
        assert_eq!(a.get(3, 5), 8);
        assert_eq!(a.get(3, 3), 0);
    }

    #[test]
    fn random_mean_and_support() {
        let a = gen_traffic(&WorkloadSpec::new(WorkloadKind::Random, 64, 8).with_seed(7)).unwrap();
        let v = off_diagonal(&a);
        assert_eq!(v.len(), 64 * 63);
        assert!(v.iter().all(|&c| (1..=15).contains(&c)));
        let mean = v.iter().sum::<u64>() as f64 / v.len() as f64;
        assert!((mean - 8.0).abs() / 8.0 < 0.05, "mean {mean}");
    }

    #[test]
    fn zipf_is_skewed() {
        let a = gen_traffic(&WorkloadSpec::new(WorkloadKind::Zipf, 16, 8).with_seed(3)).unwrap();
        let mut v = off_diagonal(&a);
        v.sort();
        assert!(v[v.len() - 1] > v[v.len() / 2]);
        assert!(v[0] >= 1);
        let mean = v.iter().sum::<u64>() as f64 / v.len() as f64;
        assert!((mean - 8.0).abs() < 1.0, "mean {mean}");
    }

    #[test]
    fn seeded() {
        let spec = WorkloadSpec::new(WorkloadKind::Zipf, 8, 4).with_seed(11);
        assert_eq!(gen_traffic(&spec).unwrap(), gen_traffic(&spec).unwrap());
        assert_ne!(gen_traffic(&spec).unwrap(), gen_traffic(&spec.clone().with_seed(12)).unwrap());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(gen_traffic(&WorkloadSpec::new(WorkloadKind::Uniform, 8, 0)).is_err());
        let spec = WorkloadSpec { zipf_factor: 0.0, ..WorkloadSpec::new(WorkloadKind::Zipf, 8, 1) };
        assert!(gen_traffic(&spec).is_err());
    }
}
