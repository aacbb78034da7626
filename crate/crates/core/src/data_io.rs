//! Datasets of binary vectors and the file formats used to move them around.
//!
//! * IDX image files (`0x00000803`, big-endian header) as distributed for MNIST.
//! * Packed-bit datasets: `b"GBZD"`, `u32` N, `u32` D (little-endian), then
//!   `ceil(N·D/8)` bytes holding the row-major bits, most significant bit first.
//! * Binary PGM (`P5`) image grids for visualizing samples.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

pub const IDX_IMAGE_MAGIC: u32 = 0x0000_0803;
pub const PACKED_MAGIC: &[u8; 4] = b"GBZD";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    #[default]
    Train,
    Valid,
    Test,
}

/// `N × D` matrix of binary examples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    rows: usize,
    dims: usize,
    bits: Vec<u8>,
    pub split: Split,
}

impl Dataset {
    /// Builds a dataset from row-major `0`/`1` bytes.
    pub fn new(rows: usize, dims: usize, bits: Vec<u8>) -> Result<Self> {
        if rows == 0 || dims == 0 {
            return Err(Error::InvalidDimensions(format!("dataset must be non-empty, got {rows}x{dims}")));
        }
        if bits.len() != rows * dims {
            return Err(Error::shape(rows * dims, bits.len()));
        }
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::OutOfRange { what: "binary dataset entry", value: bits[pos] as f64 });
        }
        Ok(Self { rows, dims, bits, split: Split::Train })
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let dims = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dims) {
            return Err(Error::InvalidDimensions("rows have different lengths".into()));
        }
        Self::new(rows.len(), dims, rows.concat())
    }

    pub fn with_split(mut self, split: Split) -> Self {
        self.split = split;
        self
    }

    /// Number of examples `N`.
    pub fn len(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    /// Number of visible dimensions `D`.
    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bits
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.bits[i * self.dims..(i + 1) * self.dims]
    }

    /// Example `i` as `0.0` / `1.0` values.
    pub fn row_f64(&self, i: usize) -> Vec<f64> {
        self.row(i).iter().map(|&b| b as f64).collect()
    }

    pub fn rows_f64(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.rows).map(|i| self.row_f64(i))
    }

    /// Per-dimension mean of the data.
    pub fn marginals(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.dims];
        for i in 0..self.rows {
            for (s, &b) in sums.iter_mut().zip(self.row(i)) {
                *s += b as f64;
            }
        }
        sums.into_iter().map(|s| s / self.rows as f64).collect()
    }

    /// Rows `range` as a new dataset.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        let end = end.min(self.rows);
        Self::new(end.saturating_sub(start), self.dims, self.bits[start * self.dims..end * self.dims].to_vec())
    }

    /// Splits off consecutive train / valid / test blocks.
    pub fn partition(&self, train: usize, valid: usize) -> Result<(Dataset, Dataset, Dataset)> {
        if train + valid >= self.rows {
            return Err(Error::InvalidDimensions(format!(
                "cannot split {} rows into {train} train + {valid} valid + a non-empty test set",
                self.rows
            )));
        }
        Ok((
            self.slice(0, train)?.with_split(Split::Train),
            self.slice(train, train + valid)?.with_split(Split::Valid),
            self.slice(train + valid, self.rows)?.with_split(Split::Test),
        ))
    }
}

/// Raw 8-bit image intensities, one flattened image per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntensityMatrix {
    pub rows: usize,
    pub cols: usize,
    pub image_rows: usize,
    pub image_cols: usize,
    pub data: Vec<u8>,
}

fn read_be_u32(bytes: &[u8], offset: usize) -> Result<u32> {
    let end = offset + 4;
    if bytes.len() < end {
        return Err(Error::Parse {
            offset: bytes.len(),
            msg: format!("truncated header: need {} more bytes", end - bytes.len()),
        });
    }
    Ok(u32::from_be_bytes(bytes[offset..end].try_into().expect("4 bytes")))
}

/// Parses an IDX image file held in memory.
pub fn parse_idx_images(bytes: &[u8]) -> Result<IntensityMatrix> {
    let magic = read_be_u32(bytes, 0)?;
    if magic != IDX_IMAGE_MAGIC {
        return Err(Error::Parse { offset: 0, msg: format!("bad magic {magic:#010x}, expected {IDX_IMAGE_MAGIC:#010x}") });
    }
    let count = read_be_u32(bytes, 4)? as usize;
    let image_rows = read_be_u32(bytes, 8)? as usize;
    let image_cols = read_be_u32(bytes, 12)? as usize;
    let cols = image_rows * image_cols;
    let needed = count * cols;
    let body = &bytes[16..];
    if body.len() < needed {
        return Err(Error::Parse {
            offset: bytes.len(),
            msg: format!("truncated pixel data: missing {} bytes", needed - body.len()),
        });
    }
    Ok(IntensityMatrix { rows: count, cols, image_rows, image_cols, data: body[..needed].to_vec() })
}

pub fn load_idx_images(path: impl AsRef<Path>) -> Result<IntensityMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_idx_images(&bytes)
}

/// Sets each pixel to 1 with probability `intensity / 255`.
pub fn stochastic_binarize(intensities: &IntensityMatrix, rng: &mut RngStream) -> Result<Dataset> {
    let bits = intensities
        .data
        .iter()
        .map(|&x| (rng.uniform() < x as f64 / 255.0) as u8)
        .collect();
    Dataset::new(intensities.rows, intensities.cols, bits)
}

/// [`stochastic_binarize`] for real-valued intensities in `[0, 255]`.
pub fn binarize_intensities(values: &[f64], cols: usize, rng: &mut RngStream) -> Result<Dataset> {
    if cols == 0 || !values.len().is_multiple_of(cols) {
        return Err(Error::shape(format!("multiple of {cols} values"), values.len()));
    }
    let mut bits = Vec::with_capacity(values.len());
    for &x in values {
        if !(0.0..=255.0).contains(&x) {
            return Err(Error::OutOfRange { what: "pixel intensity", value: x });
        }
        bits.push((rng.uniform() < x / 255.0) as u8);
    }
    Dataset::new(values.len() / cols, cols, bits)
}

/// `n` noisy copies of `num_patterns` distinct random prototypes; each bit is
/// flipped independently with probability `noise`.
pub fn synthetic_patterns(dims: usize, num_patterns: usize, noise: f64, n: usize, seed: u64) -> Result<Dataset> {
    if num_patterns == 0 || (dims < 64 && num_patterns as u128 > 1u128 << dims) {
        return Err(Error::InvalidConfig(format!("cannot draw {num_patterns} distinct patterns of {dims} bits")));
    }
    if !(0.0..=1.0).contains(&noise) {
        return Err(Error::OutOfRange { what: "noise", value: noise });
    }
    let mut rng = RngStream::new(seed, 0);
    let mut seen = HashSet::new();
    let mut prototypes = Vec::with_capacity(num_patterns);
    while prototypes.len() < num_patterns {
        let p: Vec<u8> = (0..dims).map(|_| rng.bernoulli(0.5) as u8).collect();
        if seen.insert(p.clone()) {
            prototypes.push(p);
        }
    }
    let mut bits = Vec::with_capacity(n * dims);
    for _ in 0..n {
        let proto = &prototypes[rng.below(num_patterns)];
        bits.extend(proto.iter().map(|&b| b ^ (rng.uniform() < noise) as u8));
    }
    Dataset::new(n, dims, bits)
}

/// Serializes a dataset in the packed-bit format.
pub fn encode_packed(dataset: &Dataset) -> Vec<u8> {
    let total = dataset.len() * dataset.dims();
    let mut out = Vec::with_capacity(12 + total.div_ceil(8));
    out.extend_from_slice(PACKED_MAGIC);
    out.extend_from_slice(&(dataset.len() as u32).to_le_bytes());
    out.extend_from_slice(&(dataset.dims() as u32).to_le_bytes());
    let mut packed = vec![0u8; total.div_ceil(8)];
    for (k, &bit) in dataset.as_bytes().iter().enumerate() {
        if bit != 0 {
            packed[k / 8] |= 0x80 >> (k % 8);
        }
    }
    out.extend_from_slice(&packed);
    out
}

pub fn decode_packed(bytes: &[u8]) -> Result<Dataset> {
    if bytes.len() < 12 {
        return Err(Error::Parse { offset: bytes.len(), msg: format!("truncated header: need {} more bytes", 12 - bytes.len()) });
    }
    if &bytes[..4] != PACKED_MAGIC {
        return Err(Error::Parse { offset: 0, msg: "bad magic, expected GBZD".into() });
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
    let d = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let total = n * d;
    let body = &bytes[12..];
    if body.len() < total.div_ceil(8) {
        return Err(Error::Parse {
            offset: bytes.len(),
            msg: format!("truncated bit data: missing {} bytes", total.div_ceil(8) - body.len()),
        });
    }
    let bits = (0..total).map(|k| (body[k / 8] >> (7 - k % 8)) & 1).collect();
    Dataset::new(n, d, bits)
}

pub fn write_packed(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_packed(dataset)).map_err(|e| Error::io(path, e))
}

pub fn read_packed(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    decode_packed(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

/// Loads a dataset from either format, detected by its magic bytes. IDX
/// intensities are binarized with `binarize_seed`.
pub fn load_dataset(path: impl AsRef<Path>, binarize_seed: u64) -> Result<Dataset> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(PACKED_MAGIC) {
        decode_packed(&bytes)
    } else {
        let raw = parse_idx_images(&bytes)?;
        stochastic_binarize(&raw, &mut RngStream::new(binarize_seed, 0))
    }
}

/// Lays out binary images as tiles of a `P5` graymap: 1 → white, 0 → black,
/// with a one-pixel gray border between tiles.
pub fn encode_pgm_grid(images: &[Vec<f64>], width: usize, height: usize, columns: usize) -> Result<Vec<u8>> {
    if images.is_empty() || width == 0 || height == 0 || columns == 0 {
        return Err(Error::InvalidDimensions("empty image grid".into()));
    }
    if let Some(bad) = images.iter().find(|im| im.len() != width * height) {
        return Err(Error::shape(width * height, bad.len()));
    }
    let grid_rows = images.len().div_ceil(columns);
    let grid_cols = columns.min(images.len());
    let out_w = grid_cols * (width + 1) + 1;
    let out_h = grid_rows * (height + 1) + 1;
    let mut pixels = vec![128u8; out_w * out_h];
    for (n, image) in images.iter().enumerate() {
        let (gy, gx) = (n / columns, n % columns);
        for y in 0..height {
            for x in 0..width {
                let value = if image[y * width + x] > 0.5 { 255 } else { 0 };
                pixels[(gy * (height + 1) + 1 + y) * out_w + gx * (width + 1) + 1 + x] = value;
            }
        }
    }
    let mut out = format!("P5\n{out_w} {out_h}\n255\n").into_bytes();
    out.write_all(&pixels).expect("write to Vec");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn idx_fixture(count: u32, rows: u32, cols: u32, pixels: &[u8]) -> Vec<u8> {
        let mut bytes = Vec::new();
        for x in [IDX_IMAGE_MAGIC, count, rows, cols] {
            bytes.extend_from_slice(&x.to_be_bytes());
        }
        bytes.extend_from_slice(pixels);
        bytes
    }

    #[test]
    fn idx_two_images() {
        let bytes = idx_fixture(2, 2, 2, &[0, 255, 128, 7, 1, 2, 3, 4]);
        let m = parse_idx_images(&bytes).unwrap();
        assert_eq!((m.rows, m.cols, m.image_rows, m.image_cols), (2, 4, 2, 2));
        assert_eq!(m.data, vec![0, 255, 128, 7, 1, 2, 3, 4]);
    }

    #[test]
    fn idx_truncated() {
        let bytes = idx_fixture(2, 2, 2, &[0, 255, 128]);
        match parse_idx_images(&bytes) {
            Err(Error::Parse { msg, .. }) => assert!(msg.contains("missing 5 bytes"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_idx_images(&bytes[..6]), Err(Error::Parse { .. })));
        let mut bad = bytes.clone();
        bad[3] = 0x01;
        assert!(matches!(parse_idx_images(&bad), Err(Error::Parse { offset: 0, .. })));
    }

    #[test]
    fn idx_empty() {
        let m = parse_idx_images(&idx_fixture(0, 28, 28, &[])).unwrap();
        assert_eq!(m.rows, 0);
        assert!(m.data.is_empty());
    }

    #[test]
    fn binarize_extremes_and_half() {
        let raw = IntensityMatrix { rows: 1, cols: 4, image_rows: 2, image_cols: 2, data: vec![0, 255, 0, 255] };
        let mut rng = RngStream::new(1, 0);
        for _ in 0..100 {
            assert_eq!(stochastic_binarize(&raw, &mut rng).unwrap().as_bytes(), &[0, 1, 0, 1]);
        }
        let half = vec![127.5; 100_000];
        let d = binarize_intensities(&half, 10, &mut rng).unwrap();
        let mean = d.as_bytes().iter().map(|&b| b as f64).sum::<f64>() / 100_000.0;
        assert!((mean - 0.5).abs() < 0.005);
        assert!(binarize_intensities(&[256.0], 1, &mut rng).is_err());
        assert!(binarize_intensities(&[-1.0], 1, &mut rng).is_err());
    }

    #[test]
    fn binarize_is_seeded() {
        let raw = IntensityMatrix { rows: 3, cols: 4, image_rows: 2, image_cols: 2, data: (0..12).map(|i| i * 20).collect() };
        let a = stochastic_binarize(&raw, &mut RngStream::new(9, 0)).unwrap();
        let b = stochastic_binarize(&raw, &mut RngStream::new(9, 0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn synthetic_cases() {
        let d = synthetic_patterns(8, 1, 0.0, 20, 3).unwrap();
        for i in 1..20 {
            assert_eq!(d.row(i), d.row(0));
        }
        let d = synthetic_patterns(8, 4, 0.5, 100_000, 3).unwrap();
        for m in d.marginals() {
            assert!((m - 0.5).abs() < 0.01);
        }
        assert_eq!(synthetic_patterns(16, 4, 0.05, 50, 11).unwrap(), synthetic_patterns(16, 4, 0.05, 50, 11).unwrap());
        assert!(synthetic_patterns(2, 5, 0.0, 10, 0).is_err());
    }

    #[test]
    fn packed_layout_is_msb_first() {
        let d = Dataset::from_rows(&[vec![1, 0, 0], vec![0, 0, 0], vec![1, 1, 1]]).unwrap();
        let bytes = encode_packed(&d);
        assert_eq!(&bytes[..4], b"GBZD");
        assert_eq!(&bytes[4..12], &[3, 0, 0, 0, 3, 0, 0, 0]);
        assert_eq!(&bytes[12..], &[0b1000_0011, 0b1000_0000]);
        assert!(decode_packed(&bytes[..13]).is_err());
    }

    #[test]
    fn rejects_non_binary() {
        assert!(Dataset::new(1, 2, vec![0, 2]).is_err());
        assert!(Dataset::new(0, 2, vec![]).is_err());
    }

    #[test]
    fn pgm_grid_header() {
        let images = vec![vec![1.0, 0.0, 0.0, 1.0]; 3];
        let pgm = encode_pgm_grid(&images, 2, 2, 2).unwrap();
        let header = b"P5\n7 7\n255\n";
        assert_eq!(&pgm[..header.len()], header);
        assert_eq!(pgm.len(), header.len() + 49);
        // first tile, top-left pixel
        assert_eq!(pgm[header.len() + 7 + 1], 255);
        assert_eq!(pgm[header.len() + 7 + 2], 0);
    }

    #[test]
    fn partition_blocks() {
        let d = synthetic_patterns(4, 2, 0.1, 10, 1).unwrap();
        let (tr, va, te) = d.partition(6, 2).unwrap();
        assert_eq!((tr.len(), va.len(), te.len()), (6, 2, 2));
        assert_eq!(te.split, Split::Test);
        assert_eq!(te.row(1), d.row(9));
    }

    proptest! {
        #[test]
        fn packed_round_trip(n in 1usize..20, d in 1usize..20, seed in any::<u64>()) {
            let mut rng = RngStream::new(seed, 0);
            let bits: Vec<u8> = (0..n * d).map(|_| rng.bernoulli(0.5) as u8).collect();
            let ds = Dataset::new(n, d, bits).unwrap();
            prop_assert_eq!(decode_packed(&encode_packed(&ds)).unwrap(), ds);
        }
    }
}
