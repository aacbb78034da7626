//! Likelihood evaluation: exact enumeration for small models, annealed
//! importance sampling (AIS) for everything else, plus gradient checking and
//! `P(z|v)` inspection tools.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data_io::Dataset;
use crate::energy::{exact_log_partition_small, free_energy, log_geometric_tail, p_z_given_v, ZDistribution};
use crate::error::{Error, Result};
use crate::gradients::{free_energy_grads, GradientSet};
use crate::model::{ModelParams, Variant};
use crate::numeric::{dot, log_sum_exp_nonempty, sigmoid, softplus};
use crate::rng::RngStream;

/// Mean negative log-likelihood with `ln Z` computed by enumeration.
pub fn exact_nll(params: &ModelParams, dataset: &Dataset) -> Result<f64> {
    let log_z = exact_log_partition_small(params)?;
    Ok(estimate_nll(params, dataset, log_z)?.0)
}

/// Mean of `F(v) + ln Z` over the dataset and its 95% half-width
/// `1.96·std/√N`, treating `ln Z` as exact. `std` is the population
/// standard deviation.
pub fn estimate_nll(params: &ModelParams, dataset: &Dataset, log_z: f64) -> Result<(f64, f64)> {
    if dataset.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut values = Vec::with_capacity(dataset.len());
    for v in dataset.rows_f64() {
        values.push(free_energy(params, &v)? + log_z);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Ok((mean, 1.96 * var.sqrt() / n.sqrt()))
}

/// Visible biases of the distribution AIS starts from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AisBase {
    /// `b_v = 0`: the uniform distribution over `v`.
    Zero,
    /// The target's own visible biases, held fixed along the path.
    Target,
    /// Explicit biases, e.g. from [`AisBase::from_data_marginals`].
    Biases(Vec<f64>),
}

impl AisBase {
    /// Logits of the (clipped) per-pixel data means.
    pub fn from_data_marginals(dataset: &Dataset) -> Self {
        let biases = dataset
            .marginals()
            .into_iter()
            .map(|p| {
                let p = p.clamp(1e-4, 1.0 - 1e-4);
                (p / (1.0 - p)).ln()
            })
            .collect();
        AisBase::Biases(biases)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AisConfig {
    pub num_intermediate: usize,
    pub num_chains: usize,
    pub seed: u64,
    pub base: AisBase,
}

impl Default for AisConfig {
    fn default() -> Self {
        Self { num_intermediate: 100_000, num_chains: 5000, seed: 0, base: AisBase::Zero }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AisResult {
    pub ln_z_hat: f64,
    pub ln_z_lo3sigma: f64,
    pub ln_z_hi3sigma: f64,
    /// Effective sample size `(Σw)² / Σw²` of the importance weights.
    pub ess: f64,
    pub ln_z_base: f64,
}

/// The family of models along the annealing path: hidden weights and biases
/// scaled by `t`, visible biases interpolated from the base to the target.
struct AnnealPath<'a> {
    params: &'a ModelParams,
    base_bias: Vec<f64>,
    log_tail: f64,
}

impl<'a> AnnealPath<'a> {
    fn new(params: &'a ModelParams, base: &AisBase) -> Result<Self> {
        let base_bias = match base {
            AisBase::Zero => vec![0.0; params.num_visible()],
            AisBase::Target => params.visible_bias.clone(),
            AisBase::Biases(b) => {
                params.check_visible(b)?;
                b.clone()
            }
        };
        let log_tail = if params.variant == Variant::Irbm { log_geometric_tail(params.beta)? } else { 0.0 };
        Ok(Self { params, base_bias, log_tail })
    }

    /// `[-F_t(v,0), …, -F_t(v,K)]` for ordered models; for the RBM the last
    /// entry is `-F_t(v)`. `a` holds the unscaled pre-activations.
    fn prefix(&self, t: f64, v: &[f64], a: &[f64], out: &mut Vec<f64>) {
        let p = self.params;
        out.clear();
        let mut acc = (1.0 - t) * dot(v, &self.base_bias) + t * dot(v, &p.visible_bias);
        out.push(acc);
        let ordered = p.variant.is_ordered();
        for (i, &ai) in a.iter().enumerate() {
            acc += softplus(t * ai);
            if ordered {
                acc -= p.beta * softplus(t * p.hidden_bias[i]);
            }
            out.push(acc);
        }
    }

    /// `ln p*_t(v) = -F_t(v)` from a prefix.
    fn log_unnormalized(&self, prefix: &[f64], scratch: &mut Vec<f64>) -> f64 {
        let k = prefix.len() - 1;
        match self.params.variant {
            Variant::Rbm => prefix[k],
            Variant::Orbm => log_sum_exp_nonempty(&prefix[1..]),
            Variant::Irbm => {
                scratch.clear();
                scratch.extend_from_slice(&prefix[1..]);
                scratch.push(prefix[k] + self.log_tail);
                log_sum_exp_nonempty(scratch)
            }
        }
    }

    fn log_base_partition(&self) -> f64 {
        let d = self.params.num_visible();
        let zeros = vec![0.0; d];
        let a = vec![0.0; self.params.num_hidden()];
        let mut prefix = Vec::new();
        let mut scratch = Vec::new();
        self.prefix(0.0, &zeros, &a, &mut prefix);
        let hidden_part = self.log_unnormalized(&prefix, &mut scratch);
        hidden_part + self.base_bias.iter().map(|&b| softplus(b)).sum::<f64>()
    }

    fn run_chain(&self, num_intermediate: usize, rng: &mut RngStream) -> f64 {
        let p = self.params;
        let k = p.num_hidden();
        let mut v: Vec<f64> = self.base_bias.iter().map(|&b| rng.bernoulli(sigmoid(b))).collect();
        let mut a = vec![0.0; k];
        let mut h = vec![0.0; k];
        let mut prefix = Vec::with_capacity(k + 1);
        let mut scratch = Vec::with_capacity(k + 2);
        let mut vis = vec![0.0; v.len()];
        let mut log_w = 0.0;
        let m = num_intermediate as f64;

        for step in 1..=num_intermediate {
            let t_prev = (step - 1) as f64 / m;
            let t = step as f64 / m;
            for (i, ai) in a.iter_mut().enumerate() {
                *ai = dot(p.weights.row(i), &v) + p.hidden_bias[i];
            }
            self.prefix(t_prev, &v, &a, &mut prefix);
            let before = self.log_unnormalized(&prefix, &mut scratch);
            self.prefix(t, &v, &a, &mut prefix);
            let after = self.log_unnormalized(&prefix, &mut scratch);
            log_w += after - before;
            if step == num_intermediate {
                break;
            }

            // Gibbs transition leaving p_t invariant
            let active = match p.variant {
                Variant::Rbm => k,
                Variant::Orbm | Variant::Irbm => {
                    let log_norm = after;
                    let u = rng.uniform();
                    let mut cum = 0.0;
                    let mut z = k + 1;
                    for (i, &s) in prefix[1..].iter().enumerate() {
                        cum += (s - log_norm).exp();
                        if u < cum {
                            z = i + 1;
                            break;
                        }
                    }
                    z.min(k)
                }
            };
            for i in 0..k {
                h[i] = if i < active { rng.bernoulli(sigmoid(t * a[i])) } else { 0.0 };
            }
            for (j, x) in vis.iter_mut().enumerate() {
                *x = (1.0 - t) * self.base_bias[j] + t * p.visible_bias[j];
            }
            for (i, &hi) in h.iter().enumerate().take(active) {
                if hi != 0.0 {
                    for (x, &w) in vis.iter_mut().zip(p.weights.row(i)) {
                        *x += t * w;
                    }
                }
            }
            for (vj, &x) in v.iter_mut().zip(&vis) {
                *vj = rng.bernoulli(sigmoid(x));
            }
        }
        log_w
    }
}

/// Estimates `ln Z` by annealing from a hidden-free base model to `params`
/// along `t_k = k / num_intermediate`, one Gibbs transition per step.
pub fn ais_log_partition(params: &ModelParams, config: &AisConfig) -> Result<AisResult> {
    params.validate()?;
    if config.num_intermediate == 0 {
        return Err(Error::InvalidConfig("AIS needs at least one intermediate distribution".into()));
    }
    if config.num_chains < 2 {
        return Err(Error::InvalidConfig("AIS needs at least two chains".into()));
    }
    let path = AnnealPath::new(params, &config.base)?;
    let ln_z_base = path.log_base_partition();
    let run = |chain: usize| path.run_chain(config.num_intermediate, &mut RngStream::new(config.seed, chain as u64));

    #[cfg(feature = "parallel")]
    let log_weights: Vec<f64> = (0..config.num_chains).into_par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let log_weights: Vec<f64> = (0..config.num_chains).map(run).collect();

    if let Some(chain) = log_weights.iter().position(|w| !w.is_finite()) {
        return Err(Error::AisDiverged { chain });
    }
    Ok(summarize_log_weights(&log_weights, ln_z_base))
}

fn summarize_log_weights(log_weights: &[f64], ln_z_base: f64) -> AisResult {
    let n = log_weights.len() as f64;
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = log_weights.iter().map(|w| (w - max).exp()).collect();
    let sum: f64 = scaled.iter().sum();
    let sum_sq: f64 = scaled.iter().map(|w| w * w).sum();
    let mean = sum / n;
    let var = scaled.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let ln_z_hat = ln_z_base + max + mean.ln();
    // delta method: sd(ln Ẑ) ≈ sd(w̄) / w̄
    let sd_log = var.sqrt() / (n.sqrt() * mean);
    AisResult {
        ln_z_hat,
        ln_z_lo3sigma: ln_z_hat - 3.0 * sd_log,
        ln_z_hi3sigma: ln_z_hat + 3.0 * sd_log,
        ess: sum * sum / sum_sq,
        ln_z_base,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub name: String,
    pub max_abs_err: f64,
    pub max_rel_err: f64,
    /// Flat index (row-major for `W`) of the worst entry.
    pub worst_index: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradCheckReport {
    pub blocks: Vec<BlockReport>,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.blocks.iter().all(|b| b.passed)
    }
}

/// Absolute tolerance floor used by [`gradcheck`].
pub const GRADCHECK_ABS_FLOOR: f64 = 1e-8;

/// Central finite differences of `F(v)` for every parameter.
pub fn finite_difference_grads(params: &ModelParams, v: &[f64], h: f64) -> Result<GradientSet> {
    let mut out = GradientSet::zeros_like(params);
    let mut probe = params.clone();
    let diff = |probe: &mut ModelParams, get: &dyn Fn(&mut ModelParams) -> &mut f64| -> Result<f64> {
        let orig = *get(probe);
        *get(probe) = orig + h;
        let plus = free_energy(probe, v)?;
        *get(probe) = orig - h;
        let minus = free_energy(probe, v)?;
        *get(probe) = orig;
        Ok((plus - minus) / (2.0 * h))
    };
    let (k, d) = (params.num_hidden(), params.num_visible());
    for i in 0..k {
        for j in 0..d {
            let g = diff(&mut probe, &|p| &mut p.weights.as_mut_slice()[i * d + j])?;
            out.weights.set(i, j, g);
        }
    }
    for j in 0..d {
        out.visible_bias[j] = diff(&mut probe, &|p| &mut p.visible_bias[j])?;
    }
    for i in 0..k {
        out.hidden_bias[i] = diff(&mut probe, &|p| &mut p.hidden_bias[i])?;
    }
    Ok(out)
}

/// Compares `analytic` to `numeric` block by block. An entry passes when
/// `|a - n| ≤ max(rel_tol · max(|a|, |n|), 1e-8)`.
pub fn compare_gradients(analytic: &GradientSet, numeric: &GradientSet, rel_tol: f64) -> GradCheckReport {
    let block = |name: &str, a: &[f64], n: &[f64]| {
        let mut report =
            BlockReport { name: name.to_string(), max_abs_err: 0.0, max_rel_err: 0.0, worst_index: 0, passed: true };
        let mut worst_ratio = -1.0;
        for (idx, (&x, &y)) in a.iter().zip(n).enumerate() {
            let err = (x - y).abs();
            let scale = x.abs().max(y.abs());
            let rel = if scale > 0.0 { err / scale } else { 0.0 };
            let allowed = (rel_tol * scale).max(GRADCHECK_ABS_FLOOR);
            report.max_abs_err = report.max_abs_err.max(err);
            if scale >= GRADCHECK_ABS_FLOOR {
                report.max_rel_err = report.max_rel_err.max(rel);
            }
            if err / allowed > worst_ratio {
                worst_ratio = err / allowed;
                report.worst_index = idx;
            }
            if !(err <= allowed) {
                report.passed = false;
            }
        }
        report
    };
    GradCheckReport {
        blocks: vec![
            block("W", analytic.weights.as_slice(), numeric.weights.as_slice()),
            block("b_v", &analytic.visible_bias, &numeric.visible_bias),
            block("b_h", &analytic.hidden_bias, &numeric.hidden_bias),
        ],
    }
}

/// Checks the analytic free-energy gradient against central differences.
pub fn gradcheck(params: &ModelParams, v: &[f64], rel_tol: f64, h: f64) -> Result<GradCheckReport> {
    let analytic = free_energy_grads(params, v)?;
    let numeric = finite_difference_grads(params, v, h)?;
    Ok(compare_gradients(&analytic, &numeric, rel_tol))
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalRanking {
    /// Half-open interval `[a, b)` over 1-based `z`.
    pub a: usize,
    pub b: usize,
    /// `(example index, P(a ≤ z < b | v))`, best first.
    pub top: Vec<(usize, f64)>,
}

impl IntervalRanking {
    pub fn mean_top_mass(&self) -> f64 {
        if self.top.is_empty() {
            return 0.0;
        }
        self.top.iter().map(|(_, p)| p).sum::<f64>() / self.top.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZInspection {
    pub distributions: Vec<ZDistribution>,
    pub rankings: Vec<IntervalRanking>,
}

/// `P(z|v)` for every example and, per interval, the `top_k` examples with
/// the largest `P(a ≤ z < b | v)`. Ties keep dataset order.
pub fn inspect_z(
    params: &ModelParams,
    examples: &Dataset,
    intervals: &[(usize, usize)],
    top_k: usize,
) -> Result<ZInspection> {
    params.require_ordered()?;
    let distributions = examples.rows_f64().map(|v| p_z_given_v(params, &v)).collect::<Result<Vec<_>>>()?;
    let rankings = intervals
        .iter()
        .map(|&(a, b)| {
            let mut scored: Vec<(usize, f64)> =
                distributions.iter().enumerate().map(|(i, d)| (i, d.interval_mass(a, b))).collect();
            scored.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
            scored.truncate(top_k);
            IntervalRanking { a, b, top: scored }
        })
        .collect();
    Ok(ZInspection { distributions, rankings })
}
