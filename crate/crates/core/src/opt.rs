//! Derivative-free minimization with random restarts, plus gradient oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::QubitHamiltonian;
use crate::sim::{Ansatz, GateKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Objective evaluations allowed per restart.
    pub max_evals: usize,
    /// Absolute spread of simplex values at which a restart stops.
    pub f_tol: f64,
    pub restarts: usize,
    /// Fresh restarts draw every parameter uniformly from `[-init_range, init_range]`.
    pub init_range: f64,
    /// Edge length of the initial simplex.
    pub simplex_step: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_evals: 2000,
            f_tol: 1e-8,
            restarts: 100,
            init_range: std::f64::consts::PI,
            simplex_step: 0.3,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_evals == 0 {
            return Err(Error::InvalidConfig("max_evals must be >= 1".into()));
        }
        if !(self.f_tol.is_finite() && self.f_tol > 0.0) {
            return Err(Error::InvalidConfig("f_tol must be > 0".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be >= 1".into()));
        }
        if !(self.init_range.is_finite() && self.init_range >= 0.0) {
            return Err(Error::InvalidConfig("init_range must be >= 0".into()));
        }
        if !(self.simplex_step.is_finite() && self.simplex_step > 0.0) {
            return Err(Error::InvalidConfig("simplex_step must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbortedRestart {
    pub restart: usize,
    /// Evaluation that produced the non-finite value.
    pub eval: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VQEResult {
    pub theta_opt: Vec<f64>,
    pub energy: f64,
    /// Evaluations used by the winning restart.
    pub evals: usize,
    pub total_evals: usize,
    pub restart_index: usize,
    /// `(eval, energy)` for every evaluation of the winning restart.
    pub history: Vec<(usize, f64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aborted: Vec<AbortedRestart>,
}

impl VQEResult {
    /// Objective value at the winning restart's starting point.
    pub fn initial_energy(&self) -> Option<f64> {
        self.history.first().map(|&(_, e)| e)
    }

    /// Running minimum of the winning restart's history.
    pub fn best_so_far(&self) -> Vec<f64> {
        self.history
            .iter()
            .scan(f64::INFINITY, |best, &(_, e)| {
                *best = best.min(e);
                Some(*best)
            })
            .collect()
    }
}

struct LocalRun {
    x: Vec<f64>,
    fx: f64,
    evals: usize,
    history: Vec<(usize, f64)>,
}

enum Stop {
    Budget,
    /// Evaluation number that returned a non-finite value.
    NonFinite(usize),
}

struct Counted<'a, F> {
    f: &'a F,
    evals: usize,
    max_evals: usize,
    history: Vec<(usize, f64)>,
    best_x: Vec<f64>,
    best_f: f64,
}

impl<F: Fn(&[f64]) -> f64> Counted<'_, F> {
    fn call(&mut self, x: &[f64]) -> std::result::Result<f64, Stop> {
        if self.evals >= self.max_evals {
            return Err(Stop::Budget);
        }
        self.evals += 1;
        let v = (self.f)(x);
        if !v.is_finite() {
            return Err(Stop::NonFinite(self.evals));
        }
        self.history.push((self.evals, v));
        if v < self.best_f {
            self.best_f = v;
            self.best_x = x.to_vec();
        }
        Ok(v)
    }
}

/// Adaptive Nelder-Mead (dimension-dependent coefficients). Once the simplex
/// values agree to `f_tol` it is rebuilt around the best vertex, and the run
/// stops when a rebuilt simplex fails to improve by more than `f_tol`.
fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: &[f64],
    step: f64,
    max_evals: usize,
    f_tol: f64,
) -> std::result::Result<LocalRun, usize> {
    let mut ctr = Counted {
        f,
        evals: 0,
        max_evals,
        history: Vec::new(),
        best_x: x0.to_vec(),
        best_f: f64::INFINITY,
    };
    match simplex_search(&mut ctr, x0, step, f_tol) {
        Ok(()) | Err(Stop::Budget) => Ok(LocalRun {
            x: ctr.best_x,
            fx: ctr.best_f,
            evals: ctr.evals,
            history: ctr.history,
        }),
        Err(Stop::NonFinite(eval)) => Err(eval),
    }
}

fn simplex_search<F: Fn(&[f64]) -> f64>(
    ctr: &mut Counted<'_, F>,
    x0: &[f64],
    step: f64,
    f_tol: f64,
) -> std::result::Result<(), Stop> {
    let n = x0.len();
    ctr.call(x0)?;
    if n == 0 {
        return Ok(());
    }
    let nf = n as f64;
    let (alpha, gamma) = (1.0, 1.0 + 2.0 / nf);
    let rho = 0.75 - 1.0 / (2.0 * nf);
    let sigma = 1.0 - 1.0 / nf;

    let mut first = true;
    loop {
        let start_f = ctr.best_f;
        let base = ctr.best_x.clone();
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(base.clone(), start_f)];
        for i in 0..n {
            let mut v = base.clone();
            v[i] += step;
            let fv = ctr.call(&v)?;
            simplex.push((v, fv));
        }

        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if simplex[n].1 - simplex[0].1 <= f_tol {
                break;
            }
            let mut centroid = vec![0.0; n];
            for (v, _) in &simplex[..n] {
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x / nf;
                }
            }
            let along = |t: f64, worst: &[f64]| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(worst)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let worst = simplex[n].0.clone();
            let xr = along(alpha, &worst);
            let fr = ctr.call(&xr)?;
            if fr < simplex[0].1 {
                let xe = along(alpha * gamma, &worst);
                let fe = ctr.call(&xe)?;
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                let t = if fr < simplex[n].1 { alpha * rho } else { -rho };
                let xc = along(t, &worst);
                let fc = ctr.call(&xc)?;
                if fc < fr.min(simplex[n].1) {
                    simplex[n] = (xc, fc);
                } else {
                    let x_best = simplex[0].0.clone();
                    for vertex in simplex.iter_mut().skip(1) {
                        let shrunk: Vec<f64> = x_best
                            .iter()
                            .zip(&vertex.0)
                            .map(|(b, v)| b + sigma * (v - b))
                            .collect();
                        let fs = ctr.call(&shrunk)?;
                        *vertex = (shrunk, fs);
                    }
                }
            }
        }
        if !first && start_f - ctr.best_f <= f_tol {
            return Ok(());
        }
        first = false;
    }
}

/// Seed for restart `r` of the run identified by `seed`.
pub(crate) fn restart_seed(seed: u64, r: usize) -> u64 {
    seed ^ (r as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Best local minimum over `config.restarts` starts. Restart 0 starts at
/// `theta0`; the others draw fresh parameters. Ties go to the lower restart.
pub fn minimize<F>(objective: F, theta0: &[f64], config: &OptimizerConfig) -> Result<VQEResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    let n = theta0.len();
    let runs: Vec<(usize, std::result::Result<LocalRun, usize>)> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                theta0.to_vec()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(config.seed, r));
                (0..n)
                    .map(|_| rng.gen_range(-config.init_range..=config.init_range))
                    .collect()
            };
            let run = nelder_mead(
                &objective,
                &start,
                config.simplex_step,
                config.max_evals,
                config.f_tol,
            );
            (r, run)
        })
        .collect();

    let mut aborted = Vec::new();
    let mut total_evals = 0;
    let mut best: Option<(usize, LocalRun)> = None;
    for (r, run) in runs {
        match run {
            Ok(run) => {
                total_evals += run.evals;
                if best.as_ref().is_none_or(|(_, b)| run.fx < b.fx) {
                    best = Some((r, run));
                }
            }
            Err(eval) => {
                total_evals += eval;
                aborted.push(AbortedRestart { restart: r, eval });
            }
        }
    }
    let (restart_index, run) = best.ok_or(Error::NonFiniteEnergy { step: 0 })?;
    Ok(VQEResult {
        theta_opt: run.x,
        energy: run.fx,
        evals: run.evals,
        total_evals,
        restart_index,
        history: run.history,
        aborted,
    })
}

/// Finite-difference step for gates whose generator has three eigenvalues.
const CRY_FD_STEP: f64 = 1e-5;

/// `dE/dθ_k` for every parameter: the two-term shift rule for `RY`/`RZ`
/// (generator spectrum `±1/2`) and a central difference for `CRY`.
pub fn shift_gradient(ansatz: &Ansatz, h: &QubitHamiltonian, theta: &[f64]) -> Result<Vec<f64>> {
    if theta.len() != ansatz.n_params() {
        return Err(Error::DimensionMismatch {
            expected: ansatz.n_params(),
            actual: theta.len(),
        });
    }
    let mut shifted = theta.to_vec();
    let mut energy_at = |k: usize, delta: f64| -> Result<f64> {
        shifted[k] = theta[k] + delta;
        let e = ansatz.energy(h, &shifted);
        shifted[k] = theta[k];
        e
    };
    ansatz
        .gates
        .iter()
        .enumerate()
        .map(|(k, g)| match g.kind {
            GateKind::RY | GateKind::RZ => {
                let s = std::f64::consts::FRAC_PI_2;
                Ok((energy_at(k, s)? - energy_at(k, -s)?) / 2.0)
            }
            GateKind::CRY => Ok(
                (energy_at(k, CRY_FD_STEP)? - energy_at(k, -CRY_FD_STEP)?) / (2.0 * CRY_FD_STEP)
            ),
        })
        .collect()
}
