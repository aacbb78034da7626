//! On-disk checkpoint directories: `meta.json`, raw little-endian `f64`
//! parameter and ADAGRAD arrays, persistent chain state and `history.csv`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, Variant};
use crate::numeric::Matrix;
use crate::sampling::ChainState;
use crate::training::{AdagradState, EpochRecord, PcdState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub variant: Variant,
    #[serde(rename = "D")]
    pub num_visible: usize,
    #[serde(rename = "K")]
    pub num_hidden: usize,
    pub beta: f64,
    pub seed: u64,
    pub epoch: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub params: ModelParams,
    pub seed: u64,
    pub epoch: usize,
    pub adagrad: Option<AdagradState>,
    pub pcd: Option<PcdState>,
    pub history: Vec<EpochRecord>,
}

impl Checkpoint {
    pub fn from_params(params: ModelParams, seed: u64) -> Self {
        Self { params, seed, epoch: 0, adagrad: None, pcd: None, history: Vec::new() }
    }

    pub fn meta(&self) -> CheckpointMeta {
        CheckpointMeta {
            variant: self.params.variant,
            num_visible: self.params.num_visible(),
            num_hidden: self.params.num_hidden(),
            beta: self.params.beta,
            seed: self.seed,
            epoch: self.epoch,
        }
    }
}

pub fn encode_f64(values: &[f64]) -> Vec<u8> {
    values.iter().flat_map(|x| x.to_le_bytes()).collect()
}

pub fn decode_f64(bytes: &[u8]) -> Result<Vec<f64>> {
    if !bytes.len().is_multiple_of(8) {
        return Err(Error::Parse { offset: bytes.len() - bytes.len() % 8, msg: "truncated f64 array".into() });
    }
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| Error::io(&path, e))
}

fn read(dir: &Path, name: &str) -> Result<Vec<u8>> {
    let path = dir.join(name);
    fs::read(&path).map_err(|e| Error::io(&path, e))
}

fn read_f64(dir: &Path, name: &str, expected: usize) -> Result<Vec<f64>> {
    let values = decode_f64(&read(dir, name)?)?;
    if values.len() != expected {
        return Err(Error::shape(format!("{expected} values in {name}"), values.len()));
    }
    Ok(values)
}

pub fn history_csv(history: &[EpochRecord]) -> String {
    let mut out = String::from("epoch,mean_free_energy,K,wall_seconds\n");
    for r in history {
        out.push_str(&format!("{},{},{},{}\n", r.epoch, r.mean_free_energy, r.num_hidden, r.wall_seconds));
    }
    out
}

pub fn parse_history_csv(text: &str) -> Result<Vec<EpochRecord>> {
    let mut offset = 0;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let here = offset;
        offset += line.len() + 1;
        if n == 0 || line.trim().is_empty() {
            continue;
        }
        let bad = |msg: &str| Error::Parse { offset: here, msg: format!("history line {}: {msg}", n + 1) };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(bad("expected 4 fields"));
        }
        out.push(EpochRecord {
            epoch: fields[0].parse().map_err(|_| bad("bad epoch"))?,
            mean_free_energy: fields[1].parse().map_err(|_| bad("bad free energy"))?,
            num_hidden: fields[2].parse().map_err(|_| bad("bad K"))?,
            wall_seconds: fields[3].parse().map_err(|_| bad("bad wall time"))?,
        });
    }
    Ok(out)
}

/// Writes `ckpt` into `dir`, creating it if needed. Optimizer and chain
/// files are only written when present.
pub fn save_checkpoint(dir: &Path, ckpt: &Checkpoint) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let p = &ckpt.params;
    let mut meta = serde_json::to_string_pretty(&ckpt.meta())?;
    meta.push('\n');
    write(dir, "meta.json", meta.as_bytes())?;
    write(dir, "W.f64", &encode_f64(p.weights.as_slice()))?;
    write(dir, "bv.f64", &encode_f64(&p.visible_bias))?;
    write(dir, "bh.f64", &encode_f64(&p.hidden_bias))?;
    if let Some(a) = &ckpt.adagrad {
        write(dir, "adagrad_W.f64", &encode_f64(a.weights.as_slice()))?;
        write(dir, "adagrad_bv.f64", &encode_f64(&a.visible_bias))?;
        write(dir, "adagrad_bh.f64", &encode_f64(&a.hidden_bias))?;
    }
    if let Some(pcd) = &ckpt.pcd {
        let v: Vec<u8> = pcd.chains.iter().flat_map(|c| c.v.iter().map(|&x| (x != 0.0) as u8)).collect();
        let z: Vec<u8> = pcd.chains.iter().flat_map(|c| c.z.map_or(-1, |z| z as i64).to_le_bytes()).collect();
        write(dir, "pcd_v.u8", &v)?;
        write(dir, "pcd_z.i64", &z)?;
    }
    write(dir, "history.csv", history_csv(&ckpt.history).as_bytes())
}

/// Reads a checkpoint directory written by [`save_checkpoint`].
pub fn load_checkpoint(dir: &Path) -> Result<Checkpoint> {
    let meta: CheckpointMeta = serde_json::from_slice(&read(dir, "meta.json")?)?;
    let (d, k) = (meta.num_visible, meta.num_hidden);
    let weights = Matrix::from_vec(k, d, read_f64(dir, "W.f64", k * d)?)?;
    let params = ModelParams::from_parts(
        meta.variant,
        weights,
        read_f64(dir, "bv.f64", d)?,
        read_f64(dir, "bh.f64", k)?,
        meta.beta,
    )?;

    let adagrad = if dir.join("adagrad_W.f64").exists() {
        Some(AdagradState {
            weights: Matrix::from_vec(k, d, read_f64(dir, "adagrad_W.f64", k * d)?)?,
            visible_bias: read_f64(dir, "adagrad_bv.f64", d)?,
            hidden_bias: read_f64(dir, "adagrad_bh.f64", k)?,
        })
    } else {
        None
    };

    let pcd = if dir.join("pcd_v.u8").exists() {
        let v = read(dir, "pcd_v.u8")?;
        let z = read(dir, "pcd_z.i64")?;
        if d == 0 || v.len() % d != 0 || z.len() != 8 * (v.len() / d) {
            return Err(Error::InvalidDimensions("persistent chain files disagree".into()));
        }
        let chains = v
            .chunks_exact(d)
            .zip(z.chunks_exact(8))
            .map(|(vb, zb)| {
                let zi = i64::from_le_bytes(zb.try_into().unwrap());
                let mut chain = ChainState::from_visible(vb.iter().map(|&b| b as f64).collect());
                chain.z = (zi >= 0).then_some(zi as usize);
                chain
            })
            .collect();
        Some(PcdState { chains })
    } else {
        None
    };

    let history = match fs::read_to_string(dir.join("history.csv")) {
        Ok(text) => parse_history_csv(&text)?,
        Err(_) => Vec::new(),
    };
    Ok(Checkpoint { params, seed: meta.seed, epoch: meta.epoch, adagrad, pcd, history })
}
