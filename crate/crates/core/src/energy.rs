//! Energies, free energies and the distribution of `z` given `v`.
//!
//! Conventions used throughout:
//!
//! * `a_i = W_i·v + b_h_i` is the pre-activation of hidden unit `i`.
//! * For the ordered variants `F(v,z) = -vᵀb_v - Σ_{i≤z} (soft+(a_i) - β_i)`
//!   with `β_i = β·soft+(b_h_i)`, and `F(v,0) = -vᵀb_v`.
//! * The infinite variant keeps `l` explicit units; every unit beyond them
//!   has zero parameters, so the tail of `Σ_z e^{-F(v,z)}` is
//!   `e^{-F(v,l)}·r/(1-r)` with `r = 2^{1-β}`.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::model::{ModelParams, Variant};
use crate::numeric::{dot, log_sum_exp_nonempty, softplus};

/// Largest visible dimension for which `Z` is computed by enumeration.
pub const ENUMERATION_BUDGET: usize = 20;

/// `P(z | v)` over the explicit units, plus the aggregated tail `P(z > l | v)`
/// for the infinite variant.
#[derive(Debug, Clone, PartialEq)]
pub struct ZDistribution {
    /// `probs[i]` is `P(z = i + 1 | v)`.
    pub probs: Vec<f64>,
    /// Zero for the finite ordered variant.
    pub tail_mass: f64,
    /// `ln Σ_z e^{-F(v,z)}`, i.e. `-F(v)`.
    pub log_normalizer: f64,
}

impl ZDistribution {
    /// Number of explicit values of `z` (K, or `l`).
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Largest `z` a sampler can return: `K`, or `l + 1` for the tail bucket.
    pub fn support_max(&self, variant: Variant) -> usize {
        match variant {
            Variant::Irbm => self.probs.len() + 1,
            _ => self.probs.len(),
        }
    }

    /// `cdf[i] = P(z < i + 1 | v)`; the first entry is exactly zero.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.probs
            .iter()
            .map(|&p| {
                let below = acc;
                acc += p;
                below
            })
            .collect()
    }

    /// `m[i] = P(z ≥ i + 1 | v) = 1 - cdf[i]`, the per-unit gradient multiplier.
    pub fn survival(&self) -> Vec<f64> {
        self.cdf().into_iter().map(|c| (1.0 - c).max(0.0)).collect()
    }

    /// `P(a ≤ z < b | v)` for 1-based `a`, with the tail counted as `z = l + 1`.
    pub fn interval_mass(&self, a: usize, b: usize) -> f64 {
        let mut mass = 0.0;
        for z in a.max(1)..b {
            if z <= self.probs.len() {
                mass += self.probs[z - 1];
            } else if z == self.probs.len() + 1 {
                mass += self.tail_mass;
            }
        }
        mass
    }
}

/// `a = W v + b_h`.
pub fn hidden_preactivations(params: &ModelParams, v: &[f64]) -> Vec<f64> {
    (0..params.num_hidden())
        .map(|i| dot(params.weights.row(i), v) + params.hidden_bias[i])
        .collect()
}

/// Natural log of the geometric tail sum `Σ_{z≥1} r^z = r / (1 - r)`, `r = 2^{1-β}`.
pub fn log_geometric_tail(beta: f64) -> Result<f64> {
    if !(beta > 1.0) {
        return Err(Error::DivergentTail(beta));
    }
    let log_r = (1.0 - beta) * LN_2;
    Ok(log_r - (-log_r.exp_m1()).ln())
}

/// `E(v,h) = -hᵀWv - vᵀb_v - hᵀb_h`.
pub fn rbm_energy(params: &ModelParams, v: &[f64], h: &[f64]) -> Result<f64> {
    params.require(Variant::Rbm)?;
    params.check_visible(v)?;
    check_hidden(params, h)?;
    let a = hidden_preactivations(params, v);
    Ok(-dot(v, &params.visible_bias) - dot(h, &a))
}

/// `F(v) = -vᵀb_v - Σ_i soft+(a_i)`.
pub fn rbm_free_energy(params: &ModelParams, v: &[f64]) -> Result<f64> {
    params.require(Variant::Rbm)?;
    params.check_visible(v)?;
    Ok(rbm_free_energy_unchecked(params, v))
}

fn rbm_free_energy_unchecked(params: &ModelParams, v: &[f64]) -> f64 {
    let mut f = -dot(v, &params.visible_bias);
    for i in 0..params.num_hidden() {
        f -= softplus(dot(params.weights.row(i), v) + params.hidden_bias[i]);
    }
    f
}

/// `E(v,h,z) = -vᵀb_v - Σ_{i≤z} (h_i a_i - β_i)`.
pub fn orbm_energy(params: &ModelParams, v: &[f64], h: &[f64], z: usize) -> Result<f64> {
    params.require_ordered()?;
    params.check_visible(v)?;
    check_hidden(params, h)?;
    check_z(params, z)?;
    if h[z..].iter().any(|&x| x != 0.0) {
        return Err(Error::IllegalHiddenState { z });
    }
    let mut e = -dot(v, &params.visible_bias);
    for (i, &hi) in h.iter().enumerate().take(z) {
        let a = dot(params.weights.row(i), v) + params.hidden_bias[i];
        e -= hi * a - params.penalty(i);
    }
    Ok(e)
}

/// `[-F(v,0), -F(v,1), …, -F(v,K)]`, built by a running sum over units.
pub(crate) fn neg_free_energy_prefix(params: &ModelParams, v: &[f64], a: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + 1);
    let mut acc = dot(v, &params.visible_bias);
    out.push(acc);
    for (i, &ai) in a.iter().enumerate() {
        acc += softplus(ai) - params.penalty(i);
        out.push(acc);
    }
    out
}

/// `F(v,z)` for `1 ≤ z ≤ K`.
pub fn orbm_free_energy_vz(params: &ModelParams, v: &[f64], z: usize) -> Result<f64> {
    params.require_ordered()?;
    params.check_visible(v)?;
    check_z(params, z)?;
    let a = hidden_preactivations(params, v);
    Ok(-neg_free_energy_prefix(params, v, &a)[z])
}

/// `F(v) = -ln Σ_{z=1}^{K} e^{-F(v,z)}` for the finite ordered model.
pub fn orbm_free_energy(params: &ModelParams, v: &[f64]) -> Result<f64> {
    params.require(Variant::Orbm)?;
    params.check_visible(v)?;
    let a = hidden_preactivations(params, v);
    let terms = neg_free_energy_prefix(params, v, &a);
    Ok(-log_sum_exp_nonempty(&terms[1..]))
}

/// `ln Z(v) = ln(Σ_{z≤l} e^{-F(v,z)} + e^{-F(v,l)}·r/(1-r))` for the infinite model.
pub fn irbm_zv_log_partition(params: &ModelParams, v: &[f64]) -> Result<f64> {
    params.require(Variant::Irbm)?;
    params.check_visible(v)?;
    let log_tail = log_geometric_tail(params.beta)?;
    let a = hidden_preactivations(params, v);
    Ok(irbm_log_partition_from_terms(&neg_free_energy_prefix(params, v, &a), log_tail))
}

fn irbm_log_partition_from_terms(prefix: &[f64], log_tail: f64) -> f64 {
    let l = prefix.len() - 1;
    let tail = prefix[l] + log_tail;
    if l == 0 {
        return tail;
    }
    let mut terms = Vec::with_capacity(l + 1);
    terms.extend_from_slice(&prefix[1..]);
    terms.push(tail);
    log_sum_exp_nonempty(&terms)
}

/// `F(v)` for any variant.
pub fn free_energy(params: &ModelParams, v: &[f64]) -> Result<f64> {
    match params.variant {
        Variant::Rbm => rbm_free_energy(params, v),
        Variant::Orbm => orbm_free_energy(params, v),
        Variant::Irbm => irbm_zv_log_partition(params, v).map(|lz| -lz),
    }
}

/// `P(z | v)` from max-shifted exponentials of `-F(v,z)`.
pub fn p_z_given_v(params: &ModelParams, v: &[f64]) -> Result<ZDistribution> {
    params.require_ordered()?;
    params.check_visible(v)?;
    let a = hidden_preactivations(params, v);
    z_distribution_from_preactivations(params, v, &a)
}

pub(crate) fn z_distribution_from_preactivations(params: &ModelParams, v: &[f64], a: &[f64]) -> Result<ZDistribution> {
    let prefix = neg_free_energy_prefix(params, v, a);
    let explicit = &prefix[1..];
    match params.variant {
        Variant::Orbm => {
            let log_normalizer = log_sum_exp_nonempty(explicit);
            let probs = explicit.iter().map(|&t| (t - log_normalizer).exp()).collect();
            Ok(ZDistribution { probs, tail_mass: 0.0, log_normalizer })
        }
        Variant::Irbm => {
            let log_tail = log_geometric_tail(params.beta)?;
            let log_normalizer = irbm_log_partition_from_terms(&prefix, log_tail);
            let probs = explicit.iter().map(|&t| (t - log_normalizer).exp()).collect();
            let tail_mass = (prefix[prefix.len() - 1] + log_tail - log_normalizer).exp();
            Ok(ZDistribution { probs, tail_mass, log_normalizer })
        }
        Variant::Rbm => unreachable!("checked by require_ordered"),
    }
}

/// Calls `f` with every binary vector of length `dims`, in index order
/// (bit `j` of the index is `v_j`).
pub fn for_each_binary(dims: usize, mut f: impl FnMut(&[f64])) {
    let mut v = vec![0.0; dims];
    for idx in 0u64..(1u64 << dims) {
        for (j, x) in v.iter_mut().enumerate() {
            *x = ((idx >> j) & 1) as f64;
        }
        f(&v);
    }
}

/// `ln Z` by summing `e^{-F(v)}` over all `2^D` visible vectors.
pub fn exact_log_partition_small(params: &ModelParams) -> Result<f64> {
    let d = params.num_visible();
    if d > ENUMERATION_BUDGET {
        return Err(Error::EnumerationTooLarge { dims: d, budget: ENUMERATION_BUDGET });
    }
    params.validate()?;
    let mut terms = Vec::with_capacity(1 << d);
    let mut err = None;
    for_each_binary(d, |v| match free_energy(params, v) {
        Ok(f) => terms.push(-f),
        Err(e) => err = Some(e),
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(log_sum_exp_nonempty(&terms))
}

fn check_hidden(params: &ModelParams, h: &[f64]) -> Result<()> {
    if h.len() != params.num_hidden() {
        return Err(Error::shape(format!("hidden vector of length {}", params.num_hidden()), h.len()));
    }
    Ok(())
}

pub(crate) fn check_z(params: &ModelParams, z: usize) -> Result<()> {
    if z == 0 || z > params.num_hidden() {
        return Err(Error::ZOutOfRange { z, max: params.num_hidden() });
    }
    Ok(())
}
