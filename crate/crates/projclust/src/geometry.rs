//! Point-set container, distance queries, and a greedy estimator for the
//! doubling constant of a finite Euclidean set.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// An immutable set of `n` points in `R^m`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    n: usize,
    m: usize,
    coords: Vec<f64>,
}

impl PointSet {
    /// Builds a point set from per-point coordinate rows. All rows must have
    /// the same positive arity and every coordinate must be finite.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("point set must contain at least one point".into()));
        }
        let m = rows[0].len();
        if m == 0 {
            return Err(Error::InvalidInput("ambient dimension must be at least 1".into()));
        }
        let mut coords = Vec::with_capacity(rows.len() * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: row.len() });
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::InvalidInput(format!("non-finite coordinate in point {i}")));
                }
                coords.push(v);
            }
        }
        Ok(PointSet { n: rows.len(), m, coords })
    }

    /// Builds a point set from a flat row-major buffer of `n * m` coordinates.
    pub fn from_flat(n: usize, m: usize, coords: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidInput("n and m must be at least 1".into()));
        }
        if coords.len() != n * m {
            return Err(Error::DimensionMismatch { expected: n * m, got: coords.len() });
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        Ok(PointSet { n, m, coords })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 1 by construction
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.m
    }

    /// Coordinates of point `i`. Panics if `i >= n`.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.m..(i + 1) * self.m]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Euclidean distance between points `i` and `j`.
    ///
    /// Out-of-range indices are a contract violation and panic.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let a = self.point(i);
        let b = self.point(j);
        let mut s = 0.0;
        for k in 0..self.m {
            let d = a[k] - b[k];
            s += d * d;
        }
        s.sqrt()
    }

    /// Distance from point `i` to an arbitrary coordinate vector of matching arity.
    pub fn distance_to(&self, i: usize, other: &[f64]) -> f64 {
        assert_eq!(other.len(), self.m, "arity mismatch");
        let a = self.point(i);
        let mut s = 0.0;
        for k in 0..self.m {
            let d = a[k] - other[k];
            s += d * d;
        }
        s.sqrt()
    }
}

/// The pair of distinct points at minimum distance, ties broken by the
/// lexicographically smallest `(i, j)` with `i < j`.
pub fn closest_pair(ps: &PointSet) -> Result<(usize, usize, f64)> {
    let n = ps.len();
    if n < 2 {
        return Err(Error::InvalidInput("closest_pair requires at least 2 points".into()));
    }
    let best = (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let mut local = (f64::INFINITY, usize::MAX, usize::MAX);
            for j in i + 1..n {
                let d = ps.distance(i, j);
                if d < local.0 {
                    local = (d, i, j);
                }
            }
            local
        })
        .reduce(
            || (f64::INFINITY, usize::MAX, usize::MAX),
            |a, b| {
                if b.0 < a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
                    b
                } else {
                    a
                }
            },
        );
    Ok((best.1, best.2, best.0))
}

/// Maximum pairwise distance; 0 for a single point.
pub fn diameter(ps: &PointSet) -> f64 {
    let n = ps.len();
    if n < 2 {
        return 0.0;
    }
    (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let mut local = 0.0f64;
            for j in i + 1..n {
                let d = ps.distance(i, j);
                if d > local {
                    local = d;
                }
            }
            local
        })
        .reduce(|| 0.0, f64::max)
}

/// Smallest positive pairwise distance, or `None` when all points coincide
/// (including `n == 1`).
fn min_positive_distance(ps: &PointSet) -> Option<f64> {
    let n = ps.len();
    let best = (0..n.saturating_sub(1))
        .into_par_iter()
        .map(|i| {
            let mut local = f64::INFINITY;
            for j in i + 1..n {
                let d = ps.distance(i, j);
                if d > 0.0 && d < local {
                    local = d;
                }
            }
            local
        })
        .reduce(|| f64::INFINITY, f64::min);
    if best.is_finite() {
        Some(best)
    } else {
        None
    }
}

/// Result of [`doubling_constant_estimate`].
#[derive(Debug, Clone, PartialEq)]
pub struct DoublingEstimate {
    /// Largest greedy half-radius cover size observed over all probed
    /// (center, scale) pairs. Upper-bounds behaviour of the true doubling
    /// constant only up to the usual greedy slack.
    pub lambda_hat: usize,
    /// `log2(lambda_hat)`.
    pub ddim_hat: f64,
    /// The dyadic scale ladder that was probed, descending from the diameter.
    pub scales_probed: Vec<f64>,
}

/// Greedily covers `B(center, r) ∩ X` with balls of radius `r/2` centered at
/// data points and returns the number of balls used.
///
/// The next center is always the not-yet-covered point farthest from the
/// chosen centers (all points are equally far when none are chosen), ties
/// broken by smallest index.
fn greedy_cover_size(ps: &PointSet, center: usize, r: f64) -> usize {
    let ball: Vec<usize> = (0..ps.len()).filter(|&j| ps.distance(center, j) <= r).collect();
    let half = r / 2.0;
    let mut nearest = vec![f64::INFINITY; ball.len()];
    let mut covered = vec![false; ball.len()];
    let mut count = 0usize;
    loop {
        let mut pick: Option<usize> = None;
        let mut pick_dist = f64::NEG_INFINITY;
        for (pos, cov) in covered.iter().enumerate() {
            if !cov && nearest[pos] > pick_dist {
                pick = Some(pos);
                pick_dist = nearest[pos];
            }
        }
        let Some(pos) = pick else { break };
        let chosen = ball[pos];
        count += 1;
        for (pos2, &j) in ball.iter().enumerate() {
            let d = ps.distance(chosen, j);
            if d < nearest[pos2] {
                nearest[pos2] = d;
            }
            if d <= half {
                covered[pos2] = true;
            }
        }
    }
    count
}

/// Estimates the doubling constant of `ps` by greedy set cover over a dyadic
/// scale ladder rooted at the diameter, with cover centers restricted to data
/// points.
///
/// At most `centers_sampled` ball centers are probed; when `centers_sampled >=
/// n` every point is probed and the result does not depend on `seed`.
/// Deterministic given `(centers_sampled, seed)`.
pub fn doubling_constant_estimate(
    ps: &PointSet,
    centers_sampled: usize,
    seed: u64,
) -> Result<DoublingEstimate> {
    if centers_sampled == 0 {
        return Err(Error::InvalidInput("centers_sampled must be at least 1".into()));
    }
    let n = ps.len();

    let mut scales = Vec::new();
    if let Some(min_pos) = min_positive_distance(ps) {
        let mut r = diameter(ps);
        while r >= min_pos {
            scales.push(r);
            r /= 2.0;
        }
    }

    let centers: Vec<usize> = if centers_sampled >= n {
        (0..n).collect()
    } else {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut idx = rand::seq::index::sample(&mut rng, n, centers_sampled).into_vec();
        idx.sort_unstable();
        idx
    };

    let lambda_hat = centers
        .par_iter()
        .map(|&c| scales.iter().map(|&r| greedy_cover_size(ps, c, r)).max().unwrap_or(1))
        .reduce(|| 1, usize::max);

    Ok(DoublingEstimate {
        lambda_hat,
        ddim_hat: (lambda_hat as f64).log2(),
        scales_probed: scales,
    })
}
