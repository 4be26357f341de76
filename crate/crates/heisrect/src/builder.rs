//! The iterative bilipschitz map over a fat Cantor set, driven by a
//! family of correspondence maps, together with its audits.
//!
//! A correspondence oracle supplies, for every scale n, cube center x and
//! base point p ∈ ℍⁿ, a map i^n_{x→p} from a neighborhood of x in the
//! model group G into ℍⁿ that fixes the base pair (i(x) ≈ p when p sits
//! over x), is an approximate isometry up to an additive error
//! A·2^{−n(1+α)}, and is compatible across consecutive scales with the
//! same additive decay. Under those hypotheses the scale-by-scale
//! composition
//!
//! ```text
//! F_{n₀−1} ≡ p₀,    F_n(v) = i^n_{c_Q → F_{n−1}(c_Q)}(v),   v ∈ Q, level n,
//! ```
//!
//! converges geometrically and is bilipschitz on a separated fat Cantor
//! set. [`build_map`] evaluates the recursion (memoizing the base-point
//! chain per cube), [`audit_bilip`] checks distance ratios and increment
//! decay on the result, and [`verify_iso`]/[`verify_comp`] measure the
//! oracle's own approximate-isometry and compatibility decay rates.

use std::collections::HashMap;

use crate::cubes::{CantorRealization, KeptPoint};
use crate::error::{Error, Result};
use crate::fit::{envelope_fit, loglog_slope};
use crate::group::{dist, model_dist, model_mul, GPoint, HPoint};
use crate::sampling::{random_gpoint_in_ball, rng};

/// Declared quantitative constants of a correspondence oracle.
#[derive(Debug, Clone, Copy)]
pub struct OracleConstants {
    /// Multiplicative isometry constant L ≥ 1.
    pub l: f64,
    /// Additive error constant A (errors decay like A·2^{−n(1+α)}).
    pub a: f64,
    /// Hölder exponent α ∈ (0, 1].
    pub alpha: f64,
}

/// A scale-indexed family of correspondence maps i^n_{x→p}.
pub trait CorrespondenceOracle {
    /// Arity of the ambient group ℍⁿ.
    fn n(&self) -> usize;

    fn constants(&self) -> OracleConstants;

    /// Canonical base point over the model point x (a point of the
    /// underlying surface); used by the self-verification sweeps.
    fn base_point(&self, x: &GPoint) -> Result<HPoint>;

    /// Evaluate i^n_{x→p}(v): `level` is the scale n, `x` the cube
    /// center, `p` the base point carried by the recursion, `v` a model
    /// point near x.
    fn eval(&self, level: i32, x: &GPoint, p: &HPoint, v: &GPoint) -> Result<HPoint>;
}

/// Smallest starting scale n₀ at which the declared constants make the
/// scale-by-scale composition contract against the separation
/// τ·2^{−n(1+ε)}, ε = α/2:
///
/// ```text
/// (1)  A·2^{−n(1+α)}            ≤ τ·2^{−(n+1)(1+ε)} / (4L)
/// (2)  A·c·2^{−n(1+α)}          ≤ τ·2^{−(n+1)(1+ε)} / (8L),  c = 1/(1−2^{−(1+α)})
/// (3)  (L + A + c·A)·2^{−n}     ≤ 1/2
/// (4)  2^{−n}                   ≤ 1/(4L)
/// ```
pub fn compute_n0(l: f64, a: f64, alpha: f64, tau: f64) -> Result<i32> {
    if !(l >= 1.0) || !(a >= 0.0) || !(alpha > 0.0 && alpha <= 1.0) || !(tau > 0.0) {
        return Err(Error::Usage("need L >= 1, A >= 0, alpha in (0,1], tau > 0".into()));
    }
    let eps = alpha / 2.0;
    let c = 1.0 / (1.0 - 2f64.powf(-(1.0 + alpha)));
    for n in 0..10_000 {
        let nf = n as f64;
        let dec_a = 2f64.powf(-nf * (1.0 + alpha));
        let sep = tau * 2f64.powf(-(nf + 1.0) * (1.0 + eps));
        let i1 = a * dec_a <= sep / (4.0 * l);
        let i2 = a * c * dec_a <= sep / (8.0 * l);
        let i3 = (l + a + c * a) * 2f64.powf(-nf) <= 0.5;
        let i4 = 2f64.powf(-nf) <= 1.0 / (4.0 * l);
        if i1 && i2 && i3 && i4 {
            return Ok(n);
        }
    }
    Err(Error::Numerical("no feasible starting scale below 10000".into()))
}

/// One audited orbit of the recursion: the kept representative and the
/// values F_n(g) for n = n₀,…,n_max.
#[derive(Debug, Clone)]
pub struct MapEntry {
    pub kept: KeptPoint,
    pub g: GPoint,
    /// values[k] = F_{n₀+k}(g).
    pub values: Vec<HPoint>,
    /// increments[k] = d(F_{n₀+k}(g), F_{n₀+k+1}(g)).
    pub increments: Vec<f64>,
}

impl MapEntry {
    /// The limit proxy F_{n_max}(g).
    pub fn image(&self) -> &HPoint {
        self.values.last().unwrap()
    }
}

#[derive(Debug, Clone)]
pub struct MapTable {
    pub n0: i32,
    pub n_max: i32,
    pub constants: OracleConstants,
    pub entries: Vec<MapEntry>,
}

/// Evaluate the recursion on a sample of kept points of the realization.
///
/// The base-point chain m(l) = F_{l−1}(c_l) along each cube chain is
/// memoized on the per-axis interval ids, so shared ancestors are
/// evaluated once.
pub fn build_map<O: CorrespondenceOracle>(
    oracle: &O,
    cantor: &CantorRealization,
    p0: &HPoint,
    count: usize,
    seed: u64,
) -> Result<MapTable> {
    if oracle.n() != cantor.geom.n {
        return Err(Error::Usage("oracle and realization arity mismatch".into()));
    }
    let kept = cantor.sample_kept(count, seed);
    if kept.is_empty() {
        return Err(Error::Usage("realization yielded no kept points".into()));
    }
    let mut memo: HashMap<(i32, Vec<usize>), HPoint> = HashMap::new();
    let mut entries = Vec::with_capacity(kept.len());
    for kp in kept {
        let g = cantor.kept_g(&kp);
        let mut values = Vec::with_capacity(cantor.depth() + 1);
        let mut m_prev = p0.clone();
        for l in cantor.n0..=cantor.n_max {
            let ids = cantor.chain_ids(&kp, l);
            let m_l = if l == cantor.n0 {
                p0.clone()
            } else if let Some(v) = memo.get(&(l, ids.clone())) {
                v.clone()
            } else {
                let ids_prev = cantor.chain_ids(&kp, l - 1);
                let c_prev = cantor.core_center(&ids_prev, l - 1);
                let c_l = cantor.core_center(&ids, l);
                let v = oracle.eval(l - 1, &c_prev, &m_prev, &c_l)?;
                memo.insert((l, ids.clone()), v.clone());
                v
            };
            let c_l = cantor.core_center(&ids, l);
            values.push(oracle.eval(l, &c_l, &m_l, &g)?);
            m_prev = m_l;
        }
        let increments = values.windows(2).map(|w| dist(&w[1], &w[0])).collect();
        entries.push(MapEntry { kept: kp, g, values, increments });
    }
    Ok(MapTable { n0: cantor.n0, n_max: cantor.n_max, constants: oracle.constants(), entries })
}

/// Quantitative audit of a built map table.
#[derive(Debug, Clone)]
pub struct BilipAudit {
    /// Number of distinct pairs audited.
    pub pairs: usize,
    /// Extremes of d_ℍ(F(g), F(g′)) / d_G(g, g′) over the pairs.
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Max over orbits/levels of increment / (A·2^{−n(1+α)}).
    pub max_increment_ratio: f64,
    /// Max over orbits of Σ increments, and the geometric-series bound
    /// A·2^{−n₀(1+α)} / (1 − 2^{−(1+α)}) it must respect.
    pub max_increment_sum: f64,
    pub increment_sum_bound: f64,
}

pub fn audit_bilip(table: &MapTable) -> Result<BilipAudit> {
    let c = &table.constants;
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    let mut pairs = 0usize;
    for (i, a) in table.entries.iter().enumerate() {
        for b in table.entries.iter().skip(i + 1) {
            let dg = model_dist(&a.g, &b.g);
            if dg == 0.0 {
                return Err(Error::Invariant("coincident kept representatives".into()));
            }
            let r = dist(a.image(), b.image()) / dg;
            min_ratio = min_ratio.min(r);
            max_ratio = max_ratio.max(r);
            pairs += 1;
        }
    }
    let mut max_increment_ratio: f64 = 0.0;
    let mut max_increment_sum: f64 = 0.0;
    for e in &table.entries {
        let mut sum = 0.0;
        for (k, &inc) in e.increments.iter().enumerate() {
            let n = (table.n0 + k as i32) as f64;
            let bound = c.a * 2f64.powf(-n * (1.0 + c.alpha));
            if bound > 0.0 {
                max_increment_ratio = max_increment_ratio.max(inc / bound);
            }
            sum += inc;
        }
        max_increment_sum = max_increment_sum.max(sum);
    }
    let increment_sum_bound = c.a * 2f64.powf(-(table.n0 as f64) * (1.0 + c.alpha))
        / (1.0 - 2f64.powf(-(1.0 + c.alpha)));
    Ok(BilipAudit {
        pairs,
        min_ratio,
        max_ratio,
        max_increment_ratio,
        max_increment_sum,
        increment_sum_bound,
    })
}

/// Per-scale envelope fit of an oracle's approximate-isometry property.
#[derive(Debug, Clone)]
pub struct ScaleFit {
    pub level: i32,
    /// Fitted multiplicative constant.
    pub l_hat: f64,
    /// Raw additive slack (not normalized by the expected decay).
    pub a_raw: f64,
    /// Max deviation |d(image pair) − d(domain pair)| from exact
    /// isometry, i.e. the additive slack with the multiplicative
    /// constant pinned to 1.
    pub iso_dev: f64,
}

#[derive(Debug, Clone)]
pub struct IsoReport {
    pub scales: Vec<ScaleFit>,
    /// Decay exponent of a_raw against 2^{−n} (a_raw ~ 2^{−n·decay});
    /// `None` when the slack vanishes identically (exact oracle).
    pub decay: Option<f64>,
    /// Decay exponent of iso_dev against 2^{−n}; `None` for exact.
    pub iso_decay: Option<f64>,
    pub l_hat_max: f64,
}

/// Sample pairs in the scale-n ball around x, map them through the
/// oracle, and fit the two-sided envelope at each scale.
pub fn verify_iso<O: CorrespondenceOracle>(
    oracle: &O,
    x: &GPoint,
    n_lo: i32,
    n_hi: i32,
    samples: usize,
    seed: u64,
) -> Result<IsoReport> {
    if n_hi < n_lo {
        return Err(Error::Usage("need n_hi >= n_lo".into()));
    }
    let p = oracle.base_point(x)?;
    let c = oracle.constants();
    let l_max = (4.0 * c.l).max(4.0);
    let mut r = rng(seed);
    let mut scales = Vec::new();
    for n in n_lo..=n_hi {
        let radius = 2f64.powi(-n);
        let scale = 2f64.powf(-(n as f64) * (1.0 + c.alpha));
        let mut pairs = Vec::with_capacity(samples);
        for _ in 0..samples {
            let v1 = model_mul(x, &random_gpoint_in_ball(&mut r, oracle.n(), radius));
            let v2 = model_mul(x, &random_gpoint_in_ball(&mut r, oracle.n(), radius));
            let i1 = oracle.eval(n, x, &p, &v1)?;
            let i2 = oracle.eval(n, x, &p, &v2)?;
            pairs.push((model_dist(&v1, &v2), dist(&i1, &i2)));
        }
        let (l_hat, a_norm) = envelope_fit(&pairs, scale, l_max);
        let iso_dev = pairs.iter().map(|&(dg, dm)| (dm - dg).abs()).fold(0.0, f64::max);
        scales.push(ScaleFit { level: n, l_hat, a_raw: a_norm * scale, iso_dev });
    }
    let xs: Vec<f64> = scales.iter().map(|s| 2f64.powi(-s.level)).collect();
    let ys: Vec<f64> = scales.iter().map(|s| s.a_raw).collect();
    let devs: Vec<f64> = scales.iter().map(|s| s.iso_dev).collect();
    let l_hat_max = scales.iter().map(|s| s.l_hat).fold(0.0, f64::max);
    Ok(IsoReport {
        scales,
        decay: loglog_slope(&xs, &ys),
        iso_decay: loglog_slope(&xs, &devs),
        l_hat_max,
    })
}

#[derive(Debug, Clone)]
pub struct CompReport {
    /// (level n, max deviation between scale-n and scale-(n+1) maps).
    pub scales: Vec<(i32, f64)>,
    /// Decay exponent of the deviation against 2^{−n}; `None` for exact.
    pub decay: Option<f64>,
}

/// Compatibility across consecutive scales: hand the scale-(n+1) map the
/// base pair produced by the scale-n map at a child center w, then
/// compare both maps on points near w.
pub fn verify_comp<O: CorrespondenceOracle>(
    oracle: &O,
    x: &GPoint,
    n_lo: i32,
    n_hi: i32,
    samples: usize,
    seed: u64,
) -> Result<CompReport> {
    if n_hi < n_lo {
        return Err(Error::Usage("need n_hi >= n_lo".into()));
    }
    let p = oracle.base_point(x)?;
    let mut r = rng(seed);
    let mut scales = Vec::new();
    for n in n_lo..=n_hi {
        let child_radius = 2f64.powi(-n - 1);
        let mut max_dev: f64 = 0.0;
        for _ in 0..samples {
            let w = model_mul(x, &random_gpoint_in_ball(&mut r, oracle.n(), child_radius));
            let q = oracle.eval(n, x, &p, &w)?;
            let z = model_mul(&w, &random_gpoint_in_ball(&mut r, oracle.n(), child_radius));
            let via_n = oracle.eval(n, x, &p, &z)?;
            let via_n1 = oracle.eval(n + 1, &w, &q, &z)?;
            max_dev = max_dev.max(dist(&via_n, &via_n1));
        }
        scales.push((n, max_dev));
    }
    let xs: Vec<f64> = scales.iter().map(|&(n, _)| 2f64.powi(-n)).collect();
    let ys: Vec<f64> = scales.iter().map(|&(_, d)| d).collect();
    Ok(CompReport { scales, decay: loglog_slope(&xs, &ys) })
}
