//! Synthetic instance generators and CSV ingestion.
//!
//! Each generator realizes one of the structured constructions used to probe
//! the projection behaviour: prefix/axis Gaussian sets with very different
//! doubling dimensions, scaled identity vectors, a star, an axis grid, a
//! basis walk, a comb, and a paired-points gadget. All are deterministic in
//! their parameters and seed.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PointSet;

/// Shared standard-Gaussian draws: the prefix and axis generators reuse the
/// same vector for the same seed.
fn standard_gaussians(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Prefix sums of Gaussian axis steps: point `i` is `g_1 e_1 + ... + g_(i+1) e_(i+1)`
/// in `R^n`. Doubling dimension stays O(1) as `n` grows.
pub fn gen_prefix_gauss(n: usize, seed: u64) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let g = standard_gaussians(n, seed);
    let mut coords = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            coords[i * n + j] = g[j];
        }
    }
    PointSet::from_flat(n, n, coords)
}

/// One Gaussian per axis: point `i` is `g_(i+1) e_(i+1)` in `R^n`. Shares its
/// `g` draws with [`gen_prefix_gauss`] for equal seeds. Doubling dimension
/// grows like `log n`.
pub fn gen_axis_gauss(n: usize, seed: u64) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let g = standard_gaussians(n, seed);
    let mut coords = vec![0.0; n * n];
    for i in 0..n {
        coords[i * n + i] = g[i];
    }
    PointSet::from_flat(n, n, coords)
}

/// The `m` identity vectors in `R^m` scaled by `scale_r`. All pairwise
/// distances equal `scale_r * sqrt(2)`; the facility location optimum opens
/// everything at cost `m` when `scale_r * sqrt(2) > 1`.
pub fn gen_scaled_identity(m: usize, scale_r: f64) -> Result<PointSet> {
    if m < 2 {
        return Err(Error::InvalidInput("m must be at least 2".into()));
    }
    if !(scale_r.is_finite() && scale_r > 0.0) {
        return Err(Error::InvalidInput("scale_r must be positive and finite".into()));
    }
    let mut coords = vec![0.0; m * m];
    for i in 0..m {
        coords[i * m + i] = scale_r;
    }
    PointSet::from_flat(m, m, coords)
}

/// The origin plus the `m` identity vectors; the MST is the star at the
/// origin with cost exactly `m`.
pub fn gen_star_identity(m: usize) -> Result<PointSet> {
    if m == 0 {
        return Err(Error::InvalidInput("m must be at least 1".into()));
    }
    let n = m + 1;
    let mut coords = vec![0.0; n * m];
    for i in 0..m {
        coords[(i + 1) * m + i] = 1.0;
    }
    PointSet::from_flat(n, m, coords)
}

/// The origin plus `c` evenly spaced points along each of `m` axes:
/// `e_i * k/c` for `1 <= k <= c`. MST cost is `m`, in steps of length `1/c`.
pub fn gen_axis_grid(m: usize, c: usize) -> Result<PointSet> {
    if m == 0 || c == 0 {
        return Err(Error::InvalidInput("m and c must be at least 1".into()));
    }
    let n = m * c + 1;
    let mut coords = vec![0.0; n * m];
    let cf = c as f64;
    for i in 0..m {
        for k in 1..=c {
            let row = 1 + i * c + (k - 1);
            coords[row * m + i] = k as f64 / cf;
        }
    }
    PointSet::from_flat(n, m, coords)
}

/// The basis walk `{e_1, e_1 + e_2, ...}` scaled by `scale`: consecutive
/// points differ by one axis step of length `scale`, so
/// `dist(i, j) = scale * sqrt(|i - j|)`.
pub fn gen_walk(m: usize, scale: f64) -> Result<PointSet> {
    if m < 2 {
        return Err(Error::InvalidInput("m must be at least 2".into()));
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidInput("scale must be positive and finite".into()));
    }
    let mut coords = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..=i {
            coords[i * m + j] = scale;
        }
    }
    PointSet::from_flat(m, m, coords)
}

/// The comb: a spine of `k^2` points spaced `1/k` apart on the first axis,
/// plus `k` teeth of `k` points each, lifted by one unit along their own
/// axis. `n = 2 k^2` points in `R^(k+1)`; MST cost is `3k - 1 - 1/k`.
pub fn gen_comb(k: usize) -> Result<PointSet> {
    if k < 2 {
        return Err(Error::InvalidInput("k must be at least 2".into()));
    }
    let m = k + 1;
    let n = 2 * k * k;
    let kf = k as f64;
    let mut rows = Vec::with_capacity(n);
    for j in 0..k * k {
        let mut row = vec![0.0; m];
        row[0] = j as f64 / kf;
        rows.push(row);
    }
    for i in 0..k {
        for j in 0..k {
            let mut row = vec![0.0; m];
            // Same expression as the spine coordinate so tooth-to-spine
            // distances are exactly 1.
            row[0] = (i * k + j) as f64 / kf;
            row[1 + i] = 1.0;
            rows.push(row);
        }
    }
    PointSet::from_rows(&rows)
}

/// The gadget scale `R = sqrt(t^(1/d) / 10)` tied to a projection dimension.
pub fn pair_gadget_r(t: usize, d_for_r: usize) -> f64 {
    ((t as f64).powf(1.0 / d_for_r as f64) / 10.0).sqrt()
}

/// `t` point pairs along the first axis: `a_i = (2i, 0, ...)` and
/// `b_i = a_i + e_(i+1)` at unit separation, except the last pair which is
/// squeezed to separation `1/R` with `R` from [`pair_gadget_r`]. Points are
/// interleaved `a_1, b_1, a_2, b_2, ...`; when `R > 1` the closest pair is
/// the final one, at distance `1/R`.
pub fn gen_pair_gadget(t: usize, d_for_r: usize) -> Result<PointSet> {
    if t < 2 {
        return Err(Error::InvalidInput("t must be at least 2".into()));
    }
    if d_for_r == 0 {
        return Err(Error::InvalidInput("d_for_r must be at least 1".into()));
    }
    let m = t + 1;
    let r = pair_gadget_r(t, d_for_r);
    let mut rows = Vec::with_capacity(2 * t);
    for i in 1..=t {
        let mut a = vec![0.0; m];
        a[0] = 2.0 * i as f64;
        let mut b = a.clone();
        b[i] = if i == t { 1.0 / r } else { 1.0 };
        rows.push(a);
        rows.push(b);
    }
    PointSet::from_rows(&rows)
}

/// Generator names as used by the CLI and instance specs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    PrefixGauss,
    AxisGauss,
    ScaledIdentity,
    StarIdentity,
    AxisGrid,
    Walk,
    Comb,
    PairGadget,
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GeneratorKind::PrefixGauss => "prefix-gauss",
            GeneratorKind::AxisGauss => "axis-gauss",
            GeneratorKind::ScaledIdentity => "scaled-identity",
            GeneratorKind::StarIdentity => "star-identity",
            GeneratorKind::AxisGrid => "axis-grid",
            GeneratorKind::Walk => "walk",
            GeneratorKind::Comb => "comb",
            GeneratorKind::PairGadget => "pair-gadget",
        };
        f.write_str(s)
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "prefix-gauss" => GeneratorKind::PrefixGauss,
            "axis-gauss" => GeneratorKind::AxisGauss,
            "scaled-identity" => GeneratorKind::ScaledIdentity,
            "star-identity" => GeneratorKind::StarIdentity,
            "axis-grid" => GeneratorKind::AxisGrid,
            "walk" => GeneratorKind::Walk,
            "comb" => GeneratorKind::Comb,
            "pair-gadget" => GeneratorKind::PairGadget,
            other => return Err(Error::InvalidInput(format!("unknown generator kind: {other}"))),
        })
    }
}

/// A fully parameterized generator invocation. `size` is the generator's
/// primary count (`n`, `m`, `k`, or `t` depending on the kind); remaining
/// scale parameters live in `params`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub kind: GeneratorKind,
    pub size: usize,
    pub seed: u64,
    pub params: BTreeMap<String, f64>,
}

impl InstanceSpec {
    pub fn new(kind: GeneratorKind, size: usize, seed: u64) -> Self {
        InstanceSpec { kind, size, seed, params: BTreeMap::new() }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn param(&self, key: &str) -> Result<f64> {
        self.params
            .get(key)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("{} requires param `{key}`", self.kind)))
    }

    pub fn generate(&self) -> Result<PointSet> {
        match self.kind {
            GeneratorKind::PrefixGauss => gen_prefix_gauss(self.size, self.seed),
            GeneratorKind::AxisGauss => gen_axis_gauss(self.size, self.seed),
            GeneratorKind::ScaledIdentity => gen_scaled_identity(self.size, self.param("scale")?),
            GeneratorKind::StarIdentity => gen_star_identity(self.size),
            GeneratorKind::AxisGrid => {
                let c = self.param("grid-c")?;
                if c < 1.0 || c.fract() != 0.0 {
                    return Err(Error::InvalidInput("grid-c must be a positive integer".into()));
                }
                gen_axis_grid(self.size, c as usize)
            }
            GeneratorKind::Walk => gen_walk(self.size, self.param("scale")?),
            GeneratorKind::Comb => gen_comb(self.size),
            GeneratorKind::PairGadget => {
                let d = self.param("d-for-r")?;
                if d < 1.0 || d.fract() != 0.0 {
                    return Err(Error::InvalidInput("d-for-r must be a positive integer".into()));
                }
                gen_pair_gadget(self.size, d as usize)
            }
        }
    }

    /// Short human-readable descriptor used in report config echoes.
    pub fn label(&self) -> String {
        let mut s = format!("{}:size={}:seed={}", self.kind, self.size, self.seed);
        for (k, v) in &self.params {
            s.push_str(&format!(":{k}={v}"));
        }
        s
    }
}

/// Parses a point set from CSV: one point per row, comma-separated finite
/// decimals of equal arity. Leading lines starting with `#` are skipped.
/// Errors carry 1-based line numbers.
pub fn parse_csv<R: Read>(reader: R) -> Result<PointSet> {
    let buf = BufReader::new(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut arity: Option<usize> = None;
    for (idx, line) in buf.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() && rows.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in trimmed.split(',') {
            let field = field.trim();
            let v: f64 = field.parse().map_err(|_| Error::Csv {
                line: lineno,
                message: format!("non-numeric field `{field}`"),
            })?;
            if !v.is_finite() {
                return Err(Error::Csv {
                    line: lineno,
                    message: format!("non-finite value `{field}`"),
                });
            }
            row.push(v);
        }
        if let Some(a) = arity {
            if row.len() != a {
                return Err(Error::Csv {
                    line: lineno,
                    message: format!("ragged row: expected {a} fields, got {}", row.len()),
                });
            }
        } else {
            arity = Some(row.len());
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Csv { line: 1, message: "empty file".into() });
    }
    PointSet::from_rows(&rows)
}

/// Writes a point set as CSV with 17 significant digits per coordinate, which
/// round-trips `f64` exactly.
pub fn write_csv<W: Write>(ps: &PointSet, writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    for i in 0..ps.len() {
        let row = ps.point(i);
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                w.write_all(b",")?;
            }
            write!(w, "{v:.16e}")?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_csv<P: AsRef<Path>>(path: P) -> Result<PointSet> {
    parse_csv(std::fs::File::open(path)?)
}

pub fn save_csv<P: AsRef<Path>>(ps: &PointSet, path: P) -> Result<()> {
    write_csv(ps, std::fs::File::create(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::facility::{brute_force_optimum, FLConfig, Variant};
    use crate::geometry::{closest_pair, doubling_constant_estimate};
    use crate::mst::{brute_force_mst, mst_exact, tree_cost_in};
    use proptest::prelude::*;

    #[test]
    fn prefix_gauss_shape_and_structure() {
        let ps = gen_prefix_gauss(12, 3).unwrap();
        assert_eq!((ps.len(), ps.dim()), (12, 12));
        for i in 1..12 {
            let a = ps.point(i - 1);
            let b = ps.point(i);
            for j in 0..12 {
                if j == i {
                    assert_ne!(a[j], b[j]);
                } else {
                    assert_eq!(a[j], b[j]);
                }
            }
        }
    }

    #[test]
    fn axis_gauss_shares_draws_with_prefix() {
        let n = 10;
        let seed = 77;
        let prefix = gen_prefix_gauss(n, seed).unwrap();
        let axis = gen_axis_gauss(n, seed).unwrap();
        for i in 0..n {
            let nonzero: Vec<usize> =
                (0..n).filter(|&j| axis.point(i)[j] != 0.0).collect();
            assert!(nonzero.len() <= 1, "more than one nonzero in axis point {i}");
            // g_i appears as the i-th step of the prefix walk.
            assert_eq!(axis.point(i)[i], prefix.point(i)[i]);
        }
        for i in 0..n {
            for j in i + 1..n {
                let gi = axis.point(i)[i];
                let gj = axis.point(j)[j];
                let expect = (gi * gi + gj * gj).sqrt();
                assert!((axis.distance(i, j) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn scaled_identity_properties() {
        let ps = gen_scaled_identity(6, 10.0).unwrap();
        let expect = 10.0 * 2.0f64.sqrt();
        for i in 0..6 {
            for j in i + 1..6 {
                assert!((ps.distance(i, j) - expect).abs() < 1e-12);
            }
        }
        let opt = brute_force_optimum(&ps, &FLConfig::uniform(Variant::Linear), 15).unwrap();
        assert_eq!(opt.facilities, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(opt.total, 6.0);
        let est = doubling_constant_estimate(&ps, 6, 0).unwrap();
        assert_eq!(est.lambda_hat, 6);
    }

    #[test]
    fn star_identity_mst() {
        for m in [1usize, 5, 20, 50] {
            let ps = gen_star_identity(m).unwrap();
            assert_eq!(ps.len(), m + 1);
            let tree = mst_exact(&ps);
            assert_eq!(tree_cost_in(&tree, &ps).unwrap(), m as f64);
        }
        // Small cases: the oracle confirms every edge touches the origin.
        for m in 2..=5 {
            let ps = gen_star_identity(m).unwrap();
            let (tree, cost) = brute_force_mst(&ps, 7).unwrap();
            assert_eq!(cost, m as f64);
            assert!(tree.edges().iter().all(|&(a, _)| a == 0));
            assert_eq!(mst_exact(&ps), tree);
        }
    }

    #[test]
    fn axis_grid_counts_and_cost() {
        let ps = gen_axis_grid(10, 5).unwrap();
        assert_eq!(ps.len(), 51);
        let tree = mst_exact(&ps);
        assert!((tree_cost_in(&tree, &ps).unwrap() - 10.0).abs() < 1e-9);
        let (_, _, min_d) = closest_pair(&ps).unwrap();
        assert!((min_d - 0.2).abs() < 1e-12);
    }

    #[test]
    fn walk_distances() {
        let scale = 3.0;
        let ps = gen_walk(50, scale).unwrap();
        for i in 1..50 {
            assert!((ps.distance(i - 1, i) - scale).abs() < 1e-12);
        }
        for (i, j) in [(0usize, 9usize), (3, 40), (10, 11)] {
            let expect = scale * ((j - i) as f64).sqrt();
            assert!((ps.distance(i, j) - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn walk_doubling_is_small() {
        let ps = gen_walk(200, 1.0).unwrap();
        let est = doubling_constant_estimate(&ps, 40, 4).unwrap();
        assert!(est.ddim_hat <= 4.0, "ddim_hat = {}", est.ddim_hat);
    }

    #[test]
    fn comb_structure() {
        let k = 5;
        let ps = gen_comb(k).unwrap();
        assert_eq!(ps.len(), 2 * k * k);
        let tree = mst_exact(&ps);
        let expect = 3.0 * k as f64 - 1.0 - 1.0 / k as f64;
        assert!((tree_cost_in(&tree, &ps).unwrap() - expect).abs() < 1e-9);

        // Every tooth point sits at distance exactly 1 from the spine.
        let spine = k * k;
        for t in spine..2 * k * k {
            let mut best = f64::INFINITY;
            for s in 0..spine {
                best = best.min(ps.distance(t, s));
            }
            assert_eq!(best, 1.0);
        }
    }

    #[test]
    fn pair_gadget_closest_pair() {
        // Parameters with R > 1 so the squeezed pair is the closest one.
        let (t, d) = (2048, 2);
        let r = pair_gadget_r(t, d);
        assert!(r > 1.0);
        let ps = gen_pair_gadget(t, d).unwrap();
        assert_eq!(ps.len(), 2 * t);
        let (i, j, dist) = closest_pair(&ps).unwrap();
        assert_eq!((i, j), (2 * t - 2, 2 * t - 1));
        assert!((dist - 1.0 / r).abs() < 1e-12);
        // All other within-pair distances are exactly 1.
        for p in 0..t - 1 {
            assert_eq!(ps.distance(2 * p, 2 * p + 1), 1.0);
        }
    }

    #[test]
    fn generators_deterministic() {
        assert_eq!(gen_prefix_gauss(20, 9).unwrap(), gen_prefix_gauss(20, 9).unwrap());
        assert_eq!(gen_axis_gauss(20, 9).unwrap(), gen_axis_gauss(20, 9).unwrap());
        assert_ne!(
            gen_axis_gauss(20, 9).unwrap().coords(),
            gen_axis_gauss(20, 10).unwrap().coords()
        );
    }

    #[test]
    fn instance_spec_roundtrip() {
        let spec = InstanceSpec::new(GeneratorKind::AxisGrid, 4, 0).with_param("grid-c", 3.0);
        let ps = spec.generate().unwrap();
        assert_eq!(ps.len(), 13);
        assert!(InstanceSpec::new(GeneratorKind::Walk, 5, 0).generate().is_err());
        assert_eq!("axis-grid".parse::<GeneratorKind>().unwrap(), GeneratorKind::AxisGrid);
        assert!("nope".parse::<GeneratorKind>().is_err());
    }

    #[test]
    fn csv_parse_basics() {
        let ps = parse_csv("0,0\n1,0\n".as_bytes()).unwrap();
        assert_eq!((ps.len(), ps.dim()), (2, 2));

        let with_header = parse_csv("# x,y\n0,0\n1,0\n".as_bytes()).unwrap();
        assert_eq!(with_header, ps);

        match parse_csv("0,0\n1\n".as_bytes()) {
            Err(Error::Csv { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected csv error, got {other:?}"),
        }
        match parse_csv("0,abc\n".as_bytes()) {
            Err(Error::Csv { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected csv error, got {other:?}"),
        }
        assert!(parse_csv("".as_bytes()).is_err());
        assert!(parse_csv("inf,0\n".as_bytes()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn csv_roundtrip_is_bit_exact(rows in proptest::collection::vec(
            proptest::collection::vec(-1e12f64..1e12, 10), 1..50
        )) {
            let ps = PointSet::from_rows(&rows).unwrap();
            let mut buf = Vec::new();
            write_csv(&ps, &mut buf).unwrap();
            let back = parse_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(ps, back);
        }
    }
}
