//! Parameter containers for the three model families and hidden-layer
//! growth/shrinkage for the infinite variant.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Matrix;
use crate::rng::RngStream;

/// Default hidden-unit penalty scale.
pub const DEFAULT_BETA: f64 = 1.01;

/// Default half-width of the uniform weight initialization.
pub const DEFAULT_INIT_SCALE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Rbm,
    Orbm,
    Irbm,
}

impl Variant {
    /// True for the variants with an ordered hidden layer and a `z` variable.
    pub fn is_ordered(self) -> bool {
        !matches!(self, Variant::Rbm)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Rbm => "rbm",
            Variant::Orbm => "orbm",
            Variant::Irbm => "irbm",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rbm" => Ok(Variant::Rbm),
            "orbm" => Ok(Variant::Orbm),
            "irbm" => Ok(Variant::Irbm),
            other => Err(Error::InvalidConfig(format!("unknown model variant {other:?}"))),
        }
    }
}

/// Weights `W` (K×D), visible biases, hidden biases and penalty scale.
///
/// For [`Variant::Irbm`] the hidden count is `l`, the number of units with
/// (possibly) non-zero parameters; every unit past `l` is implicitly zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub variant: Variant,
    pub weights: Matrix,
    pub visible_bias: Vec<f64>,
    pub hidden_bias: Vec<f64>,
    pub beta: f64,
}

impl ModelParams {
    /// Builds a model from explicit parts, checking shapes and `beta`.
    pub fn from_parts(
        variant: Variant,
        weights: Matrix,
        visible_bias: Vec<f64>,
        hidden_bias: Vec<f64>,
        beta: f64,
    ) -> Result<Self> {
        let params = Self { variant, weights, visible_bias, hidden_bias, beta };
        params.validate()?;
        Ok(params)
    }

    /// All-zero parameters.
    pub fn zeros(variant: Variant, num_visible: usize, num_hidden: usize, beta: f64) -> Result<Self> {
        Self::from_parts(
            variant,
            Matrix::zeros(num_hidden, num_visible),
            vec![0.0; num_visible],
            vec![0.0; num_hidden],
            beta,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.visible_bias.len();
        let k = self.hidden_bias.len();
        if d == 0 {
            return Err(Error::InvalidDimensions("at least one visible unit is required".into()));
        }
        if k == 0 && self.variant != Variant::Irbm {
            return Err(Error::InvalidDimensions(format!("{} needs at least one hidden unit", self.variant)));
        }
        if self.weights.rows() != k || (k > 0 && self.weights.cols() != d) {
            return Err(Error::shape(
                format!("{k}x{d} weights"),
                format!("{}x{}", self.weights.rows(), self.weights.cols()),
            ));
        }
        if self.variant.is_ordered() && !(self.beta > 1.0) {
            return Err(Error::BetaTooSmall(self.beta));
        }
        Ok(())
    }

    /// Number of visible units `D`.
    #[inline]
    pub fn num_visible(&self) -> usize {
        self.visible_bias.len()
    }

    /// Number of hidden units `K` (or `l` for the infinite variant).
    #[inline]
    pub fn num_hidden(&self) -> usize {
        self.hidden_bias.len()
    }

    /// Per-unit energy penalty `beta * softplus(b_h_i)`.
    #[inline]
    pub fn penalty(&self, unit: usize) -> f64 {
        self.beta * crate::numeric::softplus(self.hidden_bias[unit])
    }

    pub(crate) fn check_visible(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.num_visible() {
            return Err(Error::shape(format!("visible vector of length {}", self.num_visible()), v.len()));
        }
        Ok(())
    }

    pub(crate) fn require(&self, variant: Variant) -> Result<()> {
        if self.variant != variant {
            return Err(Error::WrongVariant { expected: variant.name(), actual: self.variant.name() });
        }
        Ok(())
    }

    pub(crate) fn require_ordered(&self) -> Result<()> {
        if !self.variant.is_ordered() {
            return Err(Error::WrongVariant { expected: "orbm or irbm", actual: self.variant.name() });
        }
        Ok(())
    }

    /// Appends a hidden unit whose weights and bias are exactly zero.
    pub fn grow_hidden_unit(&mut self) -> Result<()> {
        self.require(Variant::Irbm)?;
        if self.weights.rows() == 0 && self.weights.cols() == 0 {
            self.weights = Matrix::zeros(0, self.num_visible());
        }
        self.weights.push_zero_row();
        self.hidden_bias.push(0.0);
        Ok(())
    }

    /// Drops the maximal trailing block of units whose weight row and bias
    /// are exactly zero. Returns how many units were removed.
    pub fn shrink_trailing_zero_units(&mut self) -> Result<usize> {
        self.require(Variant::Irbm)?;
        let mut keep = self.num_hidden();
        while keep > 0 && self.hidden_bias[keep - 1] == 0.0 && self.weights.row(keep - 1).iter().all(|&w| w == 0.0) {
            keep -= 1;
        }
        let removed = self.num_hidden() - keep;
        self.weights.truncate_rows(keep);
        self.hidden_bias.truncate(keep);
        Ok(removed)
    }
}

/// A hidden configuration, with `z` for the ordered variants.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenState {
    pub h: Vec<f64>,
    pub z: Option<usize>,
}

impl HiddenState {
    /// True when `h_k = 0` for every `k > z`.
    pub fn is_legal(&self) -> bool {
        match self.z {
            None => true,
            Some(z) => self.h.iter().skip(z).all(|&x| x == 0.0),
        }
    }
}

/// Creates a model with zero biases and `W ~ U[-init_scale, init_scale]`.
///
/// Infinite-variant units start at exactly zero, matching how grown units
/// are initialized.
pub fn init_model(
    variant: Variant,
    num_visible: usize,
    num_hidden: usize,
    beta: f64,
    init_scale: f64,
    seed: u64,
) -> Result<ModelParams> {
    if variant.is_ordered() && !(beta > 1.0) {
        return Err(Error::BetaTooSmall(beta));
    }
    if !(init_scale >= 0.0) || !init_scale.is_finite() {
        return Err(Error::InvalidConfig(format!("init_scale must be finite and non-negative, got {init_scale}")));
    }
    let mut params = ModelParams::zeros(variant, num_visible, num_hidden, beta)?;
    if variant != Variant::Irbm && init_scale > 0.0 {
        let mut rng = RngStream::new(seed, 0);
        for w in params.weights.as_mut_slice() {
            *w = rng.range(-init_scale, init_scale);
        }
    }
    Ok(params)
}
