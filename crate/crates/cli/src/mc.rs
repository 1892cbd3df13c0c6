//! Replicated fitting study.
//!
//! Every replication draws its data from the stream
//! `(master_seed, [alpha index, n index, replication index])`, and results are
//! merged by index, so the table is the same for any worker count.

use bn_core::fit::{mle_newton, FitConfig};
use bn_core::{rng, BnParams};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::format::fmt17;

pub const MC_HEADER: &str = "alpha_true,n,bias_mu,bias_sigma,bias_alpha,rmse_mu,rmse_sigma,rmse_alpha,n_converged";

#[derive(Debug, Clone, PartialEq)]
pub struct McStudyConfig {
    pub n_values: Vec<usize>,
    pub mu: f64,
    pub sigma: f64,
    pub alpha_values: Vec<f64>,
    pub replications: usize,
    pub master_seed: u64,
    pub workers: usize,
}

impl Default for McStudyConfig {
    fn default() -> Self {
        Self {
            n_values: vec![10, 75, 250, 600],
            mu: 0.5,
            sigma: 1.0,
            alpha_values: vec![-2.0, -0.5, 0.8, 3.0],
            replications: 1000,
            master_seed: 1,
            workers: 1,
        }
    }
}

impl McStudyConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.n_values.is_empty() || self.alpha_values.is_empty() {
            return Err(CliError::Usage("n-values and alpha-values must be nonempty".into()));
        }
        if self.n_values.contains(&0) || self.replications == 0 || self.workers == 0 {
            return Err(CliError::Usage("counts must be at least 1".into()));
        }
        BnParams::new(self.mu, self.sigma, 0.0)?;
        if self.alpha_values.iter().any(|a| !a.is_finite()) {
            return Err(CliError::Usage("alpha values must be finite".into()));
        }
        Ok(())
    }
}

/// Bias and RMSE over the replications whose fit converged. `alpha_hat >= 0`
/// is compared with `|alpha_true|`.
#[derive(Debug, Clone, PartialEq)]
pub struct McStudyRow {
    pub alpha_true: f64,
    pub n: usize,
    pub bias_mu: f64,
    pub bias_sigma: f64,
    pub bias_alpha: f64,
    pub rmse_mu: f64,
    pub rmse_sigma: f64,
    pub rmse_alpha: f64,
    pub n_converged: usize,
}

impl McStudyRow {
    pub fn to_csv_line(&self) -> String {
        [
            fmt17(self.alpha_true),
            self.n.to_string(),
            fmt17(self.bias_mu),
            fmt17(self.bias_sigma),
            fmt17(self.bias_alpha),
            fmt17(self.rmse_mu),
            fmt17(self.rmse_sigma),
            fmt17(self.rmse_alpha),
            self.n_converged.to_string(),
        ]
        .join(",")
    }
}

fn one_replication(truth: &BnParams, n: usize, seed_path: [u64; 3], master_seed: u64) -> Option<[f64; 3]> {
    let mut r = rng::stream(master_seed, &seed_path);
    let data = truth.sample(&mut r, n);
    match mle_newton(&data, &FitConfig::default()) {
        Ok(fit) if fit.converged => Some([fit.theta_hat.mu, fit.theta_hat.sigma, fit.theta_hat.alpha]),
        _ => None,
    }
}

pub fn run_mc_study(config: &McStudyConfig) -> CliResult<Vec<McStudyRow>> {
    config.validate()?;
    let cells: Vec<(usize, usize)> = (0..config.alpha_values.len())
        .flat_map(|i| (0..config.n_values.len()).map(move |j| (i, j)))
        .collect();
    let reps = config.replications;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", config.workers)))?;
    let estimates: Vec<Option<[f64; 3]>> = pool.install(|| {
        (0..cells.len() * reps)
            .into_par_iter()
            .map(|task| {
                let (i, j) = cells[task / reps];
                let k = task % reps;
                let truth = BnParams { mu: config.mu, sigma: config.sigma, alpha: config.alpha_values[i] };
                one_replication(&truth, config.n_values[j], [i as u64, j as u64, k as u64], config.master_seed)
            })
            .collect()
    });

    let mut rows: Vec<McStudyRow> = cells
        .iter()
        .enumerate()
        .map(|(c, &(i, j))| {
            let alpha_true = config.alpha_values[i];
            let truth = [config.mu, config.sigma, alpha_true.abs()];
            let mut sum = [0.0; 3];
            let mut sum_sq = [0.0; 3];
            let mut count = 0usize;
            for est in estimates[c * reps..(c + 1) * reps].iter().flatten() {
                count += 1;
                for p in 0..3 {
                    let d = est[p] - truth[p];
                    sum[p] += d;
                    sum_sq[p] += d * d;
                }
            }
            let m = count as f64;
            let bias = sum.map(|s| s / m);
            let rmse = sum_sq.map(|s| (s / m).sqrt());
            McStudyRow {
                alpha_true,
                n: config.n_values[j],
                bias_mu: bias[0],
                bias_sigma: bias[1],
                bias_alpha: bias[2],
                rmse_mu: rmse[0],
                rmse_sigma: rmse[1],
                rmse_alpha: rmse[2],
                n_converged: count,
            }
        })
        .collect();
    rows.sort_by(|a, b| a.alpha_true.total_cmp(&b.alpha_true).then(a.n.cmp(&b.n)));
    Ok(rows)
}

pub fn rows_to_csv(rows: &[McStudyRow]) -> String {
    let mut out = String::from(MC_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    out
}
