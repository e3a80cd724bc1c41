//! Dense Gaussian random projections: a linear map with i.i.d. `N(0, 1/d)`
//! entries, sampled from a pinned, seed-reproducible pipeline.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::PointSet;

/// Identifies the PRNG + Gaussian-transform pipeline used to realize
/// projection entries. Reports carry this string so results stay attributable
/// if the pipeline ever changes.
pub const GAUSSIAN_PIPELINE_VERSION: &str = "chacha12-ziggurat-v1";

/// A realized random projection `G: R^m -> R^d`, entries row-major `d x m`.
///
/// Entries are a deterministic function of `(seed, m, d)`: ChaCha12 seeded
/// with `seed_from_u64`, transformed by `StandardNormal` (ziggurat) and scaled
/// by `1/sqrt(d)`, filled row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianProjection {
    m: usize,
    d: usize,
    entries: Vec<f64>,
    seed: u64,
}

impl GaussianProjection {
    /// Source dimension.
    pub fn source_dim(&self) -> usize {
        self.m
    }

    /// Target dimension.
    pub fn target_dim(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Image of a single coordinate vector. Panics on arity mismatch.
    pub fn apply_vector(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.m, "arity mismatch");
        let mut out = vec![0.0; self.d];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.entries[i * self.m..(i + 1) * self.m];
            let mut s = 0.0;
            for j in 0..self.m {
                s += row[j] * x[j];
            }
            *o = s;
        }
        out
    }
}

/// Samples a `d x m` projection with i.i.d. `N(0, 1/d)` entries.
pub fn sample_projection(m: usize, d: usize, seed: u64) -> Result<GaussianProjection> {
    if m == 0 || d == 0 {
        return Err(Error::InvalidInput("projection dimensions must be at least 1".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let sigma = (1.0 / d as f64).sqrt();
    let entries = (0..d * m)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * sigma
        })
        .collect();
    Ok(GaussianProjection { m, d, entries, seed })
}

/// Applies `g` to every point of `ps`, producing the projected set `GX`.
///
/// Each output coordinate is an exact dot product accumulated in a fixed
/// order, so the result is deterministic under row parallelism.
pub fn apply(g: &GaussianProjection, ps: &PointSet) -> Result<PointSet> {
    if ps.dim() != g.m {
        return Err(Error::DimensionMismatch { expected: g.m, got: ps.dim() });
    }
    let n = ps.len();
    let rows: Vec<Vec<f64>> =
        (0..n).into_par_iter().map(|i| g.apply_vector(ps.point(i))).collect();
    let mut coords = Vec::with_capacity(n * g.d);
    for row in rows {
        coords.extend_from_slice(&row);
    }
    PointSet::from_flat(n, g.d, coords)
}
