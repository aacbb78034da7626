//! WebAssembly bindings for the static demo page in `www/`.
//!
//! The page trains a small infinite RBM on synthetic square patterns and
//! offers three operations: stepping training while watching `l` grow,
//! plotting `P(z|v)` with its tail mass for a clicked example or a drawn
//! pattern, and rendering a grid of Gibbs samples.

use irbm::data_io::{synthetic_patterns, Dataset};
use irbm::energy::p_z_given_v;
use irbm::model::{init_model, ModelParams, Variant, DEFAULT_BETA};
use irbm::sampling::{init_chain, run_chain, InitMode};
use irbm::training::{train_epoch, Method, RegKind, TrainConfig, TrainState};
use irbm::RngStream;
use wasm_bindgen::prelude::*;

/// Demo state without any JavaScript types, so it runs natively too.
pub struct DemoCore {
    params: ModelParams,
    dataset: Dataset,
    config: TrainConfig,
    state: TrainState,
    side: usize,
    last_free_energy: f64,
}

impl DemoCore {
    pub fn new(side: usize, patterns: usize, noise: f64, lr: f64, lambda: f64, seed: u64) -> irbm::Result<Self> {
        let dims = side * side;
        let dataset = synthetic_patterns(dims, patterns, noise, 500, seed)?;
        let config = TrainConfig {
            lr,
            reg: RegKind::L1,
            lambda,
            batch_size: 25,
            gibbs_steps: 10,
            epochs: 1,
            method: Method::Pcd,
            seed,
            beta: DEFAULT_BETA,
            max_hidden_cap: Some(10 * dims),
            ..TrainConfig::default()
        };
        config.validate(Variant::Irbm)?;
        let params = init_model(Variant::Irbm, dims, 1, DEFAULT_BETA, 0.0, seed)?;
        let state = TrainState::new(&params, &config);
        Ok(Self { params, dataset, config, state, side, last_free_energy: f64::NAN })
    }

    pub fn train_epochs(&mut self, epochs: usize) -> irbm::Result<f64> {
        for _ in 0..epochs {
            let record = train_epoch(&mut self.params, &self.dataset, &mut self.state, &self.config)?;
            self.last_free_energy = record.mean_free_energy;
        }
        Ok(self.last_free_energy)
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn epoch(&self) -> usize {
        self.state.epoch
    }

    pub fn example(&self, index: usize) -> Vec<u8> {
        self.dataset.row(index % self.dataset.len()).to_vec()
    }

    /// `P(z = 1..l | v)` followed by the tail mass `P(z > l | v)`.
    pub fn z_distribution(&self, v: &[u8]) -> irbm::Result<Vec<f64>> {
        let v: Vec<f64> = v.iter().map(|&b| f64::from(b != 0)).collect();
        let dist = p_z_given_v(&self.params, &v)?;
        let mut out = dist.probs;
        out.push(dist.tail_mass);
        Ok(out)
    }

    /// `count` independent chains from random images, concatenated.
    pub fn samples(&self, count: usize, steps: usize, seed: u64) -> irbm::Result<Vec<u8>> {
        let mut out = Vec::with_capacity(count * self.side * self.side);
        for chain in 0..count {
            let mut rng = RngStream::new(seed, chain as u64);
            let init = init_chain(&self.params, &InitMode::RandomUniform, &mut rng)?;
            let state = run_chain(&self.params, init, steps, &mut rng)?;
            out.extend(state.v.iter().map(|&x| x as u8));
        }
        Ok(out)
    }
}

fn js_err(e: irbm::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Demo(DemoCore);

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(side: usize, patterns: usize, noise: f64, lr: f64, lambda: f64, seed: u32) -> Result<Demo, JsError> {
        DemoCore::new(side, patterns, noise, lr, lambda, u64::from(seed)).map(Demo).map_err(js_err)
    }

    /// Runs `epochs` passes over the data; returns the last mean free energy.
    pub fn train(&mut self, epochs: usize) -> Result<f64, JsError> {
        self.0.train_epochs(epochs).map_err(js_err)
    }

    #[wasm_bindgen(getter)]
    pub fn hidden(&self) -> usize {
        self.0.params.num_hidden()
    }

    #[wasm_bindgen(getter)]
    pub fn epoch(&self) -> usize {
        self.0.epoch()
    }

    #[wasm_bindgen(getter)]
    pub fn side(&self) -> usize {
        self.0.side
    }

    pub fn example(&self, index: usize) -> Vec<u8> {
        self.0.example(index)
    }

    #[wasm_bindgen(js_name = zDistribution)]
    pub fn z_distribution(&self, v: &[u8]) -> Result<Vec<f64>, JsError> {
        self.0.z_distribution(v).map_err(js_err)
    }

    pub fn samples(&self, count: usize, steps: usize, seed: u32) -> Result<Vec<u8>, JsError> {
        self.0.samples(count, steps, u64::from(seed)).map_err(js_err)
    }
}
