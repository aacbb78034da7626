//! Brute-force oracles written directly from the energy function, sharing
//! no code with the library's closed forms.

#![allow(dead_code)]

use irbm::model::{ModelParams, Variant};
use irbm::{Matrix, RngStream};

pub fn softplus_naive(x: f64) -> f64 {
    (1.0 + x.exp()).ln()
}

/// All binary vectors of length `n`, bit `j` of the index is entry `j`.
pub fn binary_vectors(n: usize) -> Vec<Vec<f64>> {
    (0..1usize << n).map(|idx| (0..n).map(|j| ((idx >> j) & 1) as f64).collect()).collect()
}

fn dotp(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `E(v, h)` of the standard RBM.
pub fn rbm_energy(p: &ModelParams, v: &[f64], h: &[f64]) -> f64 {
    let mut e = -dotp(v, &p.visible_bias) - dotp(h, &p.hidden_bias);
    for (i, &hi) in h.iter().enumerate() {
        e -= hi * dotp(p.weights.row(i), v);
    }
    e
}

/// `E(v, h, z)` with units beyond `z` forced off and the per-unit penalty.
pub fn ordered_energy(p: &ModelParams, v: &[f64], h: &[f64], z: usize) -> f64 {
    let mut e = -dotp(v, &p.visible_bias);
    for (i, &hi) in h.iter().enumerate().take(z) {
        let pen = p.beta * softplus_naive(p.hidden_bias[i]);
        e += -hi * (dotp(p.weights.row(i), v) + p.hidden_bias[i]) + pen;
    }
    e
}

/// `ln Σ_{h ∈ H_z} e^{-E(v,h,z)}` by enumerating the first `z` hidden units.
pub fn brute_neg_free_energy_vz(p: &ModelParams, v: &[f64], z: usize) -> f64 {
    let mut total = 0.0;
    for hz in binary_vectors(z) {
        let mut h = hz.clone();
        h.resize(p.num_hidden().max(z), 0.0);
        total += (-ordered_energy(p, v, &h, z)).exp();
    }
    total.ln()
}

/// `ln Σ_h e^{-E(v,h)}` (RBM) or `ln Σ_z Σ_{h ∈ H_z} e^{-E(v,h,z)}` (oRBM),
/// by enumeration.
pub fn brute_neg_free_energy(p: &ModelParams, v: &[f64]) -> f64 {
    let k = p.num_hidden();
    match p.variant {
        Variant::Rbm => binary_vectors(k).iter().map(|h| (-rbm_energy(p, v, h)).exp()).sum::<f64>().ln(),
        Variant::Orbm => (1..=k).map(|z| brute_neg_free_energy_vz(p, v, z).exp()).sum::<f64>().ln(),
        Variant::Irbm => irbm_truncated_neg_free_energy(p, v, 0),
    }
}

/// iRBM `ln Z(v)`: enumerated terms for `z ≤ l`, then `extra` explicit
/// terms for `z > l` (each zero unit doubles the `h` sum and costs
/// `β ln 2`), then the remaining tail by the summed geometric series when
/// `extra == 0`.
pub fn irbm_truncated_neg_free_energy(p: &ModelParams, v: &[f64], extra: usize) -> f64 {
    let l = p.num_hidden();
    let head: Vec<f64> = (1..=l).map(|z| brute_neg_free_energy_vz(p, v, z)).collect();
    let at_l = if l == 0 { dotp(v, &p.visible_bias) } else { head[l - 1] };
    let ratio = 2f64.powf(1.0 - p.beta);
    let mut total: f64 = head.iter().map(|x| x.exp()).sum();
    if extra == 0 {
        total += at_l.exp() * ratio / (1.0 - ratio);
    } else {
        let mut term = at_l.exp();
        for _ in 0..extra {
            term *= ratio;
            total += term;
        }
    }
    total.ln()
}

/// Brute-force `ln Z` over all `(v, h, z)`.
pub fn brute_log_partition(p: &ModelParams) -> f64 {
    binary_vectors(p.num_visible()).iter().map(|v| brute_neg_free_energy(p, v).exp()).sum::<f64>().ln()
}

/// Model with every parameter drawn from `U[-scale, scale]`.
pub fn random_model(variant: Variant, d: usize, k: usize, scale: f64, rng: &mut RngStream) -> ModelParams {
    let mut w = Matrix::zeros(k, d);
    for x in w.as_mut_slice() {
        *x = rng.range(-scale, scale);
    }
    let bv = (0..d).map(|_| rng.range(-scale, scale)).collect();
    let bh = (0..k).map(|_| rng.range(-scale, scale)).collect();
    ModelParams::from_parts(variant, w, bv, bh, 1.01).unwrap()
}

pub fn random_binary(d: usize, rng: &mut RngStream) -> Vec<f64> {
    (0..d).map(|_| rng.bernoulli(0.5)).collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            for &t in &idx[i..=j] {
                r[t] = (i + j) as f64 / 2.0;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
