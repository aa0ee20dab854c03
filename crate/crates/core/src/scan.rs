//! Truncated versus full ansatz energies under the sampled noise model.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::QubitHamiltonian;
use crate::opt::{minimize, OptimizerConfig, VQEResult};
use crate::pauli::PauliSum;
use crate::sim::{sample_circuit_expectation, Ansatz, NoiseModel};

/// An ansatz with its noiselessly optimized angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanVariant {
    pub name: String,
    pub ansatz: Ansatz,
    pub theta: Vec<f64>,
}

impl ScanVariant {
    /// Optimizes `ansatz` on the statevector path, starting from zero angles.
    pub fn optimized(
        name: impl Into<String>,
        ansatz: Ansatz,
        h: &QubitHamiltonian,
        opt: &OptimizerConfig,
    ) -> Result<(Self, VQEResult)> {
        let objective = |t: &[f64]| ansatz.energy(h, t).unwrap_or(f64::NAN);
        let result = minimize(objective, &vec![0.0; ansatz.n_params()], opt)?;
        Ok((
            ScanVariant {
                name: name.into(),
                theta: result.theta_opt.clone(),
                ansatz,
            },
            result,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseScanConfig {
    pub p2_grid: Vec<f64>,
    /// One-qubit depolarizing probability held fixed across the grid.
    pub p1: f64,
    pub r01: f64,
    pub r10: f64,
    pub shots: usize,
    pub seeds: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseScanRow {
    pub p2: f64,
    pub ansatz_variant: String,
    /// `|mean sampled energy - exact ground energy|` over the seeds.
    pub mean_energy_error: f64,
    pub mean_energy: f64,
    /// Standard error of the mean over seeds.
    pub stderr: f64,
    pub n_gates: usize,
    pub seeds: usize,
}

fn trial_seed(seed: u64, grid: usize, trial: usize) -> u64 {
    seed.wrapping_mul(0x2545_F491_4F6C_DD1D) ^ ((grid as u64) << 32) ^ trial as u64
}

pub fn noise_scan(
    sum: &PauliSum,
    e_exact: f64,
    variants: &[ScanVariant],
    cfg: &NoiseScanConfig,
) -> Result<Vec<NoiseScanRow>> {
    if cfg.p2_grid.is_empty() {
        return Err(Error::InvalidConfig("p2 grid is empty".into()));
    }
    if cfg.seeds == 0 {
        return Err(Error::InvalidConfig("seeds must be >= 1".into()));
    }
    if cfg.shots == 0 {
        return Err(Error::ZeroShots);
    }
    let mut rows = Vec::with_capacity(cfg.p2_grid.len() * variants.len());
    for (gi, &p2) in cfg.p2_grid.iter().enumerate() {
        let noise = NoiseModel::new(cfg.p1, p2, cfg.r01, cfg.r10)?;
        for v in variants {
            let energies = (0..cfg.seeds)
                .into_par_iter()
                .map(|s| {
                    sample_circuit_expectation(
                        &v.ansatz,
                        &v.theta,
                        sum,
                        cfg.shots,
                        &noise,
                        trial_seed(cfg.seed, gi, s),
                    )
                    .map(|e| e.estimate)
                })
                .collect::<Result<Vec<f64>>>()?;
            let n = energies.len() as f64;
            let mean = energies.iter().sum::<f64>() / n;
            let var = if energies.len() > 1 {
                energies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            rows.push(NoiseScanRow {
                p2,
                ansatz_variant: v.name.clone(),
                mean_energy_error: (mean - e_exact).abs(),
                mean_energy: mean,
                stderr: (var / n).sqrt(),
                n_gates: v.ansatz.n_params(),
                seeds: cfg.seeds,
            });
        }
    }
    Ok(rows)
}

/// Smallest grid value at which `challenger` is no worse than `baseline`.
pub fn crossover(rows: &[NoiseScanRow], baseline: &str, challenger: &str) -> Option<f64> {
    let mut grid: Vec<f64> = rows.iter().map(|r| r.p2).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid.into_iter().find(|&p2| {
        let err = |name: &str| {
            rows.iter()
                .find(|r| r.p2 == p2 && r.ansatz_variant == name)
                .map(|r| r.mean_energy_error)
        };
        matches!((err(baseline), err(challenger)), (Some(b), Some(c)) if c <= b)
    })
}
