//! Random-weight GIN-style encoder.
//!
//! Input features are constant ones. Each layer computes
//! `h'_v = relu(((1+ε) h_v + Σ_{u~v} h_u) W1 + b1) W2 + b2` and then divides
//! every row by its root-mean-square. Nothing is ever trained.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::Matrix;
use crate::rng::SplitMix64;

const RMS_EPS: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub width: usize,
    pub layers: usize,
    pub seed: u64,
    pub epsilon: f64,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            width: 64,
            layers: 5,
            seed: 0,
            epsilon: 0.0,
        }
    }
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.layers == 0 {
            return Err(Error::InvalidArgument(
                "encoder width and layer count must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Layer {
    /// `in x d`
    pub w1: Matrix,
    pub b1: Vec<f64>,
    /// `d x d`
    pub w2: Matrix,
    pub b2: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct EncoderWeights {
    pub epsilon: f64,
    pub layers: Vec<Layer>,
}

impl EncoderWeights {
    pub fn width(&self) -> usize {
        self.layers.last().map_or(0, |l| l.w2.cols())
    }
}

pub fn glorot_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

fn glorot(rows: usize, cols: usize, rng: &mut SplitMix64) -> Matrix {
    let a = glorot_bound(rows, cols);
    let data = (0..rows * cols).map(|_| rng.uniform(-a, a)).collect();
    Matrix::from_row_major(rows, cols, data).expect("sizes agree")
}

// Biases need to be non-zero: with zero biases every layer is positively
// homogeneous and the RMS step maps all nodes to the same row.
fn bias(fan_in: usize, len: usize, rng: &mut SplitMix64) -> Vec<f64> {
    let a = 1.0 / (fan_in as f64).sqrt();
    (0..len).map(|_| rng.uniform(-a, a)).collect()
}

/// Draws every layer in order `W1, b1, W2, b2`, matrices row-major.
pub fn init_encoder(cfg: &EncoderConfig) -> Result<EncoderWeights> {
    cfg.validate()?;
    let mut rng = SplitMix64::new(cfg.seed);
    let d = cfg.width;
    let layers = (0..cfg.layers)
        .map(|l| {
            let fan_in = if l == 0 { 1 } else { d };
            let w1 = glorot(fan_in, d, &mut rng);
            let b1 = bias(fan_in, d, &mut rng);
            let w2 = glorot(d, d, &mut rng);
            let b2 = bias(d, d, &mut rng);
            Layer { w1, b1, w2, b2 }
        })
        .collect();
    Ok(EncoderWeights {
        epsilon: cfg.epsilon,
        layers,
    })
}

/// Node embeddings, `n x d`.
pub fn encode(g: &Graph, w: &EncoderWeights) -> Result<Matrix> {
    let n = g.n();
    let mut h = Matrix::filled(n, 1, 1.0);
    for layer in &w.layers {
        if layer.w1.rows() != h.cols() {
            return Err(Error::Dimension(format!(
                "layer expects {} input features, got {}",
                layer.w1.rows(),
                h.cols()
            )));
        }
        let mut agg = h.scale(1.0 + w.epsilon);
        for v in 0..n {
            for &u in g.neighbors(v) {
                let src = h.row(u).to_vec();
                for (a, x) in agg.row_mut(v).iter_mut().zip(src) {
                    *a += x;
                }
            }
        }
        let mut hidden = agg.matmul(&layer.w1)?;
        add_bias_relu(&mut hidden, &layer.b1, true);
        let mut out = hidden.matmul(&layer.w2)?;
        add_bias_relu(&mut out, &layer.b2, false);
        rms_normalize(&mut out);
        h = out;
    }
    Ok(h)
}

fn add_bias_relu(m: &mut Matrix, b: &[f64], relu: bool) {
    for i in 0..m.rows() {
        for (x, bb) in m.row_mut(i).iter_mut().zip(b) {
            *x += bb;
            if relu && *x < 0.0 {
                *x = 0.0;
            }
        }
    }
}

fn rms_normalize(m: &mut Matrix) {
    let d = m.cols() as f64;
    for i in 0..m.rows() {
        let row = m.row_mut(i);
        let rms = (row.iter().map(|x| x * x).sum::<f64>() / d).sqrt();
        row.iter_mut().for_each(|x| *x /= rms + RMS_EPS);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, gen_cycle_pair, path};
    use crate::graph::Permutation;

    fn weights(seed: u64) -> EncoderWeights {
        init_encoder(&EncoderConfig {
            seed,
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let a = weights(3);
        let b = weights(3);
        let c = weights(4);
        assert_eq!(a.layers[2].w2.as_slice(), b.layers[2].w2.as_slice());
        assert_ne!(a.layers[2].w2.as_slice(), c.layers[2].w2.as_slice());
        let first = glorot_bound(1, 64);
        assert!(a.layers[0].w1.max_abs() <= first);
        let inner = glorot_bound(64, 64);
        for l in &a.layers {
            assert!(l.w2.max_abs() <= inner);
        }
        assert!(init_encoder(&EncoderConfig {
            layers: 0,
            ..Default::default()
        })
        .is_err());
    }

    #[test]
    fn vertex_transitive_rows_equal() {
        let z = encode(&cycle(6).unwrap(), &weights(1)).unwrap();
        for i in 1..6 {
            assert_eq!(z.row(i), z.row(0));
        }
    }

    #[test]
    fn distinct_orbits_get_distinct_rows() {
        let z = encode(&path(3), &weights(1)).unwrap();
        let diff: f64 = z
            .row(0)
            .iter()
            .zip(z.row(1))
            .map(|(a, b)| (a - b).abs())
            .sum();
        assert!(diff > 1e-3);
    }

    #[test]
    fn equivariance() {
        let g = path(7);
        let p = Permutation::new(vec![3, 6, 0, 1, 5, 2, 4]).unwrap();
        let w = weights(9);
        let z = encode(&g, &w).unwrap();
        let zp = encode(&g.permute(&p).unwrap(), &w).unwrap();
        let expected = z.permute_rows(&p);
        assert!(zp.sub(&expected).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn wl_pair_rows_match() {
        let (a, b) = gen_cycle_pair(3).unwrap();
        let w = weights(2);
        let za = encode(&a, &w).unwrap();
        let zb = encode(&b, &w).unwrap();
        assert!(za.sub(&zb).unwrap().max_abs() < 1e-12);
    }
}
