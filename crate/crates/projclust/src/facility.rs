//! Facility location: per-point radii, the greedy ball algorithm, cost
//! evaluation in arbitrary spaces, local optimality, and an exhaustive
//! small-instance oracle.
//!
//! The radius of a point `p` is the unique `r` with
//! `sum_{q in B(p, r)} (r - |p - q|) = c_p` (linear variant) or
//! `sum_{q in B(p, r)} (r^2 - |p - q|^2) = c_p` (squared variant). Balls are
//! closed; points at distance exactly `r` contribute zero, so the solve is
//! insensitive to that choice.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PointSet;

/// Connection-cost variant: plain Euclidean distances or their squares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Linear,
    Squared,
}

/// Facility opening costs: uniform or per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OpeningCost {
    Uniform(f64),
    PerPoint(Vec<f64>),
}

/// Problem configuration: variant plus opening costs (uniform 1.0 by default).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FLConfig {
    pub variant: Variant,
    pub opening: OpeningCost,
}

impl FLConfig {
    pub fn uniform(variant: Variant) -> Self {
        FLConfig { variant, opening: OpeningCost::Uniform(1.0) }
    }

    pub fn with_uniform_cost(variant: Variant, cost: f64) -> Self {
        FLConfig { variant, opening: OpeningCost::Uniform(cost) }
    }

    /// Opening cost of point `i`.
    pub fn opening_cost(&self, i: usize) -> f64 {
        match &self.opening {
            OpeningCost::Uniform(c) => *c,
            OpeningCost::PerPoint(v) => v[i],
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match &self.opening {
            OpeningCost::Uniform(c) => {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(Error::InvalidInput("opening cost must be positive and finite".into()));
                }
            }
            OpeningCost::PerPoint(v) => {
                if v.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: v.len() });
                }
                if v.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
                    return Err(Error::InvalidInput("opening costs must be positive and finite".into()));
                }
            }
        }
        Ok(())
    }
}

/// Per-point radii for one point set under one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusProfile {
    radii: Vec<f64>,
    variant: Variant,
    config: FLConfig,
}

impl RadiusProfile {
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn radius(&self, i: usize) -> f64 {
        self.radii[i]
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn config(&self) -> &FLConfig {
        &self.config
    }
}

/// A facility set with its assignment and cost breakdown, all evaluated in a
/// specific point set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FacilitySolution {
    /// Opened facilities, sorted ascending.
    pub facilities: Vec<usize>,
    /// For each point, the nearest open facility (ties to the smallest index).
    pub assignment: Vec<usize>,
    pub opening_cost_total: f64,
    pub connection_cost_total: f64,
    pub total: f64,
}

/// Exact piecewise-linear radius solve for one point: with sorted (variant-
/// transformed) distances `d_0 <= ... <= d_{n-1}` the defining function is
/// `f(r) = (j+1) r - sum_{i<=j} d_i` on the segment `[d_j, d_{j+1})`, so the
/// candidate `r = (c + prefix_j) / (j+1)` is accepted on the first segment
/// that contains it.
fn solve_radius_sorted(sorted: &[f64], c: f64) -> f64 {
    let n = sorted.len();
    let mut prefix = 0.0;
    for j in 0..n {
        prefix += sorted[j];
        let cand = (c + prefix) / (j + 1) as f64;
        if j + 1 == n || cand <= sorted[j + 1] {
            return cand;
        }
    }
    unreachable!("the last segment always accepts");
}

/// Computes the radius profile of `ps` under `config`.
///
/// The squared variant solves in the variable `s = r^2` over squared
/// distances and reports `r = sqrt(s)`, avoiding square-root cancellation.
pub fn compute_radii(ps: &PointSet, config: &FLConfig) -> Result<RadiusProfile> {
    let n = ps.len();
    config.validate(n)?;
    let variant = config.variant;
    let radii: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|p| {
            let mut dists: Vec<f64> = (0..n)
                .map(|q| {
                    let d = ps.distance(p, q);
                    match variant {
                        Variant::Linear => d,
                        Variant::Squared => d * d,
                    }
                })
                .collect();
            dists.sort_unstable_by(f64::total_cmp);
            let s = solve_radius_sorted(&dists, config.opening_cost(p));
            match variant {
                Variant::Linear => s,
                Variant::Squared => s.sqrt(),
            }
        })
        .collect();
    Ok(RadiusProfile { radii, variant, config: config.clone() })
}

/// `sum r_p` (linear) or `sum r_p^2` (squared): the quantity that sandwiches
/// the optimal cost within [OPT/4, 6 OPT] resp. [OPT/8, 24 OPT].
pub fn radii_cost_estimate(profile: &RadiusProfile) -> f64 {
    match profile.variant {
        Variant::Linear => profile.radii.iter().sum(),
        Variant::Squared => profile.radii.iter().map(|r| r * r).sum(),
    }
}

/// The greedy ball algorithm: visit points in ascending radius order (ties to
/// the smaller index) and open `p_i` whenever no open facility lies in
/// `B(p_i, 2 r_i)`.
pub fn mp_solve(ps: &PointSet, profile: &RadiusProfile) -> Result<FacilitySolution> {
    let n = ps.len();
    if profile.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: profile.len() });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        profile.radii[a].total_cmp(&profile.radii[b]).then(a.cmp(&b))
    });
    let mut facilities: Vec<usize> = Vec::new();
    for &i in &order {
        let reach = 2.0 * profile.radii[i];
        if !facilities.iter().any(|&f| ps.distance(i, f) <= reach) {
            facilities.push(i);
        }
    }
    facilities.sort_unstable();
    evaluate_cost(ps, &facilities, &profile.config)
}

/// Evaluates the cost of a *given* facility set in a *given* space. This is
/// the pullback evaluator: a solution found in the projected space can be
/// priced in the original one.
pub fn evaluate_cost(
    ps: &PointSet,
    facilities: &[usize],
    config: &FLConfig,
) -> Result<FacilitySolution> {
    let n = ps.len();
    config.validate(n)?;
    if facilities.is_empty() {
        return Err(Error::InvalidInput("facility set must be nonempty".into()));
    }
    let mut fac: Vec<usize> = facilities.to_vec();
    fac.sort_unstable();
    fac.dedup();
    if let Some(&bad) = fac.iter().find(|&&f| f >= n) {
        return Err(Error::InvalidInput(format!("facility index {bad} out of range for {n} points")));
    }

    let mut assignment = Vec::with_capacity(n);
    let mut connection = 0.0;
    for x in 0..n {
        let mut best = f64::INFINITY;
        let mut who = fac[0];
        for &f in &fac {
            let d = ps.distance(x, f);
            if d < best {
                best = d;
                who = f;
            }
        }
        assignment.push(who);
        connection += match config.variant {
            Variant::Linear => best,
            Variant::Squared => best * best,
        };
    }
    let opening: f64 = fac.iter().map(|&f| config.opening_cost(f)).sum();
    Ok(FacilitySolution {
        facilities: fac,
        assignment,
        opening_cost_total: opening,
        connection_cost_total: connection,
        total: opening + connection,
    })
}

/// Checks the local-optimality criterion: every point must have an open
/// facility within `3 r_p`. On failure returns the smallest violating index.
pub fn is_locally_optimal(
    ps: &PointSet,
    profile: &RadiusProfile,
    facilities: &[usize],
) -> Result<(bool, Option<usize>)> {
    let n = ps.len();
    if profile.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: profile.len() });
    }
    if let Some(&bad) = facilities.iter().find(|&&f| f >= n) {
        return Err(Error::InvalidInput(format!("facility index {bad} out of range for {n} points")));
    }
    for p in 0..n {
        let reach = 3.0 * profile.radii[p];
        let ok = facilities.iter().any(|&f| ps.distance(p, f) <= reach);
        if !ok {
            return Ok((false, Some(p)));
        }
    }
    Ok((true, None))
}

/// One improvement step: if some point violates local optimality, open a
/// facility there (the smallest violating index). Adding the violator
/// strictly decreases the total cost, so repeated application terminates.
pub fn improve_if_violated(
    ps: &PointSet,
    profile: &RadiusProfile,
    facilities: &[usize],
) -> Result<Vec<usize>> {
    let (ok, witness) = is_locally_optimal(ps, profile, facilities)?;
    let mut out = facilities.to_vec();
    out.sort_unstable();
    out.dedup();
    if !ok {
        let p = witness.expect("violation carries a witness");
        if let Err(pos) = out.binary_search(&p) {
            out.insert(pos, p);
        }
    }
    Ok(out)
}

/// Exhaustive minimum over all nonempty facility subsets; ties go to the
/// lexicographically smallest subset. Refuses instances larger than `max_n`.
pub fn brute_force_optimum(
    ps: &PointSet,
    config: &FLConfig,
    max_n: usize,
) -> Result<FacilitySolution> {
    let n = ps.len();
    config.validate(n)?;
    // The subset mask lives in a u64, so 63 points is a hard ceiling no
    // matter how generous the caller's guard is.
    if n > max_n.min(63) {
        return Err(Error::SizeGuard { n, max_n: max_n.min(63) });
    }
    let mut best_total = f64::INFINITY;
    let mut best_subset: Vec<usize> = Vec::new();
    let mut subset = Vec::with_capacity(n);
    for mask in 1u64..(1u64 << n) {
        subset.clear();
        for i in 0..n {
            if mask & (1 << i) != 0 {
                subset.push(i);
            }
        }
        let mut total: f64 = subset.iter().map(|&f| config.opening_cost(f)).sum();
        for x in 0..n {
            let mut best = f64::INFINITY;
            for &f in &subset {
                let d = ps.distance(x, f);
                if d < best {
                    best = d;
                }
            }
            total += match config.variant {
                Variant::Linear => best,
                Variant::Squared => best * best,
            };
        }
        if total < best_total || (total == best_total && subset < best_subset) {
            best_total = total;
            best_subset = subset.clone();
        }
    }
    evaluate_cost(ps, &best_subset, config)
}
