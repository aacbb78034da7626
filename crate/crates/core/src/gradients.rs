//! Analytic free-energy gradients.
//!
//! With `ĥ = σ(W v + b_h)`:
//!
//! * RBM: `∇_W F = -ĥ vᵀ`, `∇_{b_h} F = -ĥ`, `∇_{b_v} F = -v`.
//! * Ordered: the hidden terms of unit `i` are scaled by `m_i = P(z ≥ i | v)`
//!   and the bias gradient picks up the penalty term `β σ(b_h_i)`.
//! * Infinite: the ordered rule over the `l` explicit units, where `m_i`
//!   includes the tail mass; units past `l` get no gradient.

use serde::{Deserialize, Serialize};

use crate::energy::{check_z, hidden_preactivations, z_distribution_from_preactivations};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Variant};
use crate::numeric::{sigmoid, Matrix};

/// Per-parameter gradients, shaped like the owning [`ModelParams`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientSet {
    pub weights: Matrix,
    pub visible_bias: Vec<f64>,
    pub hidden_bias: Vec<f64>,
}

impl GradientSet {
    pub fn zeros_like(params: &ModelParams) -> Self {
        Self {
            weights: Matrix::zeros(params.num_hidden(), params.num_visible()),
            visible_bias: vec![0.0; params.num_visible()],
            hidden_bias: vec![0.0; params.num_hidden()],
        }
    }

    pub fn num_hidden(&self) -> usize {
        self.hidden_bias.len()
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &GradientSet, scale: f64) {
        for (a, b) in self.weights.as_mut_slice().iter_mut().zip(other.weights.as_slice()) {
            *a += scale * b;
        }
        for (a, b) in self.visible_bias.iter_mut().zip(&other.visible_bias) {
            *a += scale * b;
        }
        for (a, b) in self.hidden_bias.iter_mut().zip(&other.hidden_bias) {
            *a += scale * b;
        }
    }

    /// Every entry, in the order W, b_v, b_h.
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.weights.as_slice().iter().chain(&self.visible_bias).chain(&self.hidden_bias).copied()
    }

    pub fn max_abs_diff(&self, other: &GradientSet) -> f64 {
        self.iter().zip(other.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Adds `scale * ∇F(v)` into `out`, where the hidden part of unit `i` is
/// multiplied by `mask[i]` (all ones for the RBM).
fn accumulate(params: &ModelParams, v: &[f64], hidden_hat: &[f64], mask: Option<&[f64]>, scale: f64, out: &mut GradientSet) {
    let ordered = params.variant.is_ordered();
    for (o, &x) in out.visible_bias.iter_mut().zip(v) {
        *o -= scale * x;
    }
    for (i, &hi) in hidden_hat.iter().enumerate() {
        let m = mask.map_or(1.0, |m| m[i]);
        if m == 0.0 {
            continue;
        }
        let coef = scale * m;
        let penalty_slope = if ordered { params.beta * sigmoid(params.hidden_bias[i]) } else { 0.0 };
        out.hidden_bias[i] -= coef * (hi - penalty_slope);
        let wcoef = coef * hi;
        for (o, &x) in out.weights.row_mut(i).iter_mut().zip(v) {
            *o -= wcoef * x;
        }
    }
}

/// Adds `scale * ∇F(v)` for the model's own variant into `out`.
pub fn accumulate_free_energy_grads(params: &ModelParams, v: &[f64], scale: f64, out: &mut GradientSet) -> Result<()> {
    params.check_visible(v)?;
    let a = hidden_preactivations(params, v);
    let hidden_hat: Vec<f64> = a.iter().map(|&x| sigmoid(x)).collect();
    match params.variant {
        Variant::Rbm => accumulate(params, v, &hidden_hat, None, scale, out),
        Variant::Orbm | Variant::Irbm => {
            let dist = z_distribution_from_preactivations(params, v, &a)?;
            let m = dist.survival();
            accumulate(params, v, &hidden_hat, Some(&m), scale, out);
        }
    }
    Ok(())
}

pub fn rbm_free_energy_grads(params: &ModelParams, v: &[f64]) -> Result<GradientSet> {
    params.require(Variant::Rbm)?;
    free_energy_grads(params, v)
}

/// `∇F(v)` for the finite ordered model, using `m = 1 - cdf(z|v)`.
pub fn orbm_free_energy_grads(params: &ModelParams, v: &[f64]) -> Result<GradientSet> {
    params.require(Variant::Orbm)?;
    free_energy_grads(params, v)
}

/// Expected-gradient form of the hybrid rule for the infinite model.
pub fn irbm_hybrid_grads(params: &ModelParams, v: &[f64]) -> Result<GradientSet> {
    params.require(Variant::Irbm)?;
    free_energy_grads(params, v)
}

/// `∇F(v)` for any variant.
pub fn free_energy_grads(params: &ModelParams, v: &[f64]) -> Result<GradientSet> {
    let mut out = GradientSet::zeros_like(params);
    accumulate_free_energy_grads(params, v, 1.0, &mut out)?;
    Ok(out)
}

/// `∇F(v,z)`: the Heaviside-masked gradient where only units `i ≤ z` move.
pub fn orbm_free_energy_vz_grads(params: &ModelParams, v: &[f64], z: usize) -> Result<GradientSet> {
    params.require_ordered()?;
    params.check_visible(v)?;
    check_z(params, z)?;
    let hidden_hat: Vec<f64> = hidden_preactivations(params, v).into_iter().map(sigmoid).collect();
    let mask: Vec<f64> = (0..params.num_hidden()).map(|i| if i < z { 1.0 } else { 0.0 }).collect();
    let mut out = GradientSet::zeros_like(params);
    accumulate(params, v, &hidden_hat, Some(&mask), 1.0, &mut out);
    Ok(out)
}

/// Mean free-energy gradient over `positive` minus the mean over `negative`.
pub fn nll_gradient_estimate<P, N>(params: &ModelParams, positive: &[P], negative: &[N]) -> Result<GradientSet>
where
    P: AsRef<[f64]>,
    N: AsRef<[f64]>,
{
    if positive.is_empty() || negative.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut out = GradientSet::zeros_like(params);
    let pos_scale = 1.0 / positive.len() as f64;
    for v in positive {
        accumulate_free_energy_grads(params, v.as_ref(), pos_scale, &mut out)?;
    }
    let neg_scale = -1.0 / negative.len() as f64;
    for v in negative {
        accumulate_free_energy_grads(params, v.as_ref(), neg_scale, &mut out)?;
    }
    Ok(out)
}
