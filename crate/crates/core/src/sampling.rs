//! Block Gibbs sampling for all three variants.
//!
//! RBM steps alternate `h ~ P(h|v)` and `v ~ P(v|h)`. The ordered variants
//! draw `(h, z) ~ P(h, z | v)` as `z ~ P(z|v)` then `h ~ P(h|v,z)`, followed by
//! `v ~ P(v|h,z)`. For the infinite variant a `z` drawn from the tail is
//! reported as `l + 1`; that unit has zero parameters so it does not change
//! the visible conditional.

use crate::energy::{check_z, hidden_preactivations, z_distribution_from_preactivations, ZDistribution};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Variant};
use crate::numeric::sigmoid;
use crate::rng::RngStream;

/// One persistent or transient Gibbs chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub v: Vec<f64>,
    /// Last `z` used by the chain; `None` for the RBM.
    pub z: Option<usize>,
    /// Set when the most recent step drew `z` from the infinite tail.
    pub grew: bool,
    /// When set, the next step reuses `z` instead of drawing it.
    pub hold_z: bool,
}

impl ChainState {
    pub fn from_visible(v: Vec<f64>) -> Self {
        Self { v, z: None, grew: false, hold_z: false }
    }
}

/// How a chain's first state is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum InitMode {
    /// Start at a given visible vector (CD).
    FromExample(Vec<f64>),
    /// Uniform random visible vector.
    RandomUniform,
    /// Uniform random visible vector with `z = K` held for the first step.
    ZEqualsK,
}

/// Independent Bernoulli draws with `P(h_i = 1 | v) = σ(W_i·v + b_h_i)`.
pub fn sample_h_given_v(params: &ModelParams, v: &[f64], rng: &mut RngStream) -> Result<Vec<f64>> {
    params.require(Variant::Rbm)?;
    params.check_visible(v)?;
    Ok(hidden_preactivations(params, v).into_iter().map(|a| rng.bernoulli(sigmoid(a))).collect())
}

/// Independent Bernoulli draws with `P(v_j = 1 | h) = σ(hᵀW_j + b_v_j)`.
pub fn sample_v_given_h(params: &ModelParams, h: &[f64], rng: &mut RngStream) -> Result<Vec<f64>> {
    if h.len() != params.num_hidden() {
        return Err(Error::shape(params.num_hidden(), h.len()));
    }
    Ok(sample_visible(params, h, params.num_hidden(), rng))
}

/// Like [`sample_v_given_h`] but only the first `z` hidden units take part.
///
/// `z` may be `K + 1` for the infinite variant; the extra unit is zero.
pub fn sample_v_given_hz(params: &ModelParams, h: &[f64], z: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    params.require_ordered()?;
    if h.len() != params.num_hidden() {
        return Err(Error::shape(params.num_hidden(), h.len()));
    }
    let max_z = if params.variant == Variant::Irbm { params.num_hidden() + 1 } else { params.num_hidden() };
    if z == 0 || z > max_z {
        return Err(Error::ZOutOfRange { z, max: max_z });
    }
    if h.iter().skip(z).any(|&x| x != 0.0) {
        return Err(Error::IllegalHiddenState { z });
    }
    Ok(sample_visible(params, h, z.min(params.num_hidden()), rng))
}

fn visible_probabilities(params: &ModelParams, h: &[f64], active: usize) -> Vec<f64> {
    let mut acc = params.visible_bias.clone();
    for (i, &hi) in h.iter().enumerate().take(active) {
        if hi != 0.0 {
            for (a, &w) in acc.iter_mut().zip(params.weights.row(i)) {
                *a += hi * w;
            }
        }
    }
    acc.into_iter().map(sigmoid).collect()
}

fn sample_visible(params: &ModelParams, h: &[f64], active: usize, rng: &mut RngStream) -> Vec<f64> {
    visible_probabilities(params, h, active).into_iter().map(|p| rng.bernoulli(p)).collect()
}

/// Inverse-cdf draw from a [`ZDistribution`] using a single uniform.
pub fn draw_z(dist: &ZDistribution, variant: Variant, rng: &mut RngStream) -> usize {
    let u = rng.uniform();
    let mut acc = 0.0;
    for (i, &p) in dist.probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i + 1;
        }
    }
    match variant {
        Variant::Irbm => dist.probs.len() + 1,
        _ => dist.probs.len(),
    }
}

/// `z ~ P(z | v)`; for the infinite variant a tail draw returns `l + 1`.
pub fn sample_z_given_v(params: &ModelParams, v: &[f64], rng: &mut RngStream) -> Result<usize> {
    params.require_ordered()?;
    params.check_visible(v)?;
    let a = hidden_preactivations(params, v);
    let dist = z_distribution_from_preactivations(params, v, &a)?;
    Ok(draw_z(&dist, params.variant, rng))
}

/// `h ~ P(h | v, z)`: units `≤ z` as in the RBM, the rest exactly zero.
pub fn sample_h_given_vz(params: &ModelParams, v: &[f64], z: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    params.require_ordered()?;
    params.check_visible(v)?;
    check_z(params, z)?;
    let a = hidden_preactivations(params, v);
    Ok(hidden_given_z(&a, z, rng))
}

fn hidden_given_z(a: &[f64], z: usize, rng: &mut RngStream) -> Vec<f64> {
    a.iter()
        .enumerate()
        .map(|(i, &ai)| if i < z { rng.bernoulli(sigmoid(ai)) } else { 0.0 })
        .collect()
}

/// One full block Gibbs transition.
pub fn gibbs_step(params: &ModelParams, state: &ChainState, rng: &mut RngStream) -> Result<ChainState> {
    let mut next = state.clone();
    gibbs_step_in_place(params, &mut next, rng)?;
    Ok(next)
}

/// [`gibbs_step`] updating `state` in place.
pub fn gibbs_step_in_place(params: &ModelParams, state: &mut ChainState, rng: &mut RngStream) -> Result<()> {
    params.check_visible(&state.v)?;
    let a = hidden_preactivations(params, &state.v);
    let k = params.num_hidden();
    match params.variant {
        Variant::Rbm => {
            let h: Vec<f64> = a.iter().map(|&x| rng.bernoulli(sigmoid(x))).collect();
            state.v = sample_visible(params, &h, k, rng);
            state.z = None;
            state.grew = false;
        }
        Variant::Orbm | Variant::Irbm => {
            let z = match (state.hold_z, state.z) {
                (true, Some(z)) => z.clamp(1, k.max(1)),
                _ => {
                    let dist = z_distribution_from_preactivations(params, &state.v, &a)?;
                    draw_z(&dist, params.variant, rng)
                }
            };
            let h = hidden_given_z(&a, z, rng);
            state.v = sample_visible(params, &h, z.min(k), rng);
            state.grew = params.variant == Variant::Irbm && z > k;
            state.z = Some(z);
            state.hold_z = false;
        }
    }
    Ok(())
}

/// Starting state for a chain.
pub fn init_chain(params: &ModelParams, mode: &InitMode, rng: &mut RngStream) -> Result<ChainState> {
    let d = params.num_visible();
    match mode {
        InitMode::FromExample(v) => {
            params.check_visible(v)?;
            Ok(ChainState::from_visible(v.clone()))
        }
        InitMode::RandomUniform => Ok(ChainState::from_visible((0..d).map(|_| rng.bernoulli(0.5)).collect())),
        InitMode::ZEqualsK => {
            let v = (0..d).map(|_| rng.bernoulli(0.5)).collect();
            if params.variant.is_ordered() {
                Ok(ChainState { v, z: Some(params.num_hidden().max(1)), grew: false, hold_z: true })
            } else {
                Ok(ChainState::from_visible(v))
            }
        }
    }
}

/// Runs `steps` Gibbs transitions from `init`.
pub fn run_chain(params: &ModelParams, init: ChainState, steps: usize, rng: &mut RngStream) -> Result<ChainState> {
    let mut state = init;
    for _ in 0..steps {
        gibbs_step_in_place(params, &mut state, rng)?;
    }
    Ok(state)
}
