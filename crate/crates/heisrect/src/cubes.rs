//! Anisotropic dyadic cubes in the model group G and fat Cantor sets.
//!
//! Cubes at level n are coordinate boxes with horizontal sides σ·2^{−n}
//! and vertical (t) side σ²·4^{−n}; children split each horizontal axis
//! in two and the t axis in four, so they partition the parent exactly.
//! The shrink factor σ is chosen so that the certified diameter bound
//! diam_G(Q) < 2^{−n} holds at every level of the realization (for the
//! abelian plane model σ = 1/4 works at all depths; the twisted model
//! needs a smaller σ that depends on the deepest level, because the group
//! twist contributes ~√(|z|·side) to the diameter of a coordinate box).
//!
//! The fat Cantor set prunes a boundary layer from every cube at every
//! level: the surviving core of Q is the set of points whose *certified*
//! distance to the complement of Q is at least τ·2^{−n(1+ε)}, intersected
//! with the parent core. Margins are uniform per level/axis, so the whole
//! surviving family is a product of per-axis interval Cantor sets; measure
//! and separation bookkeeping are exact interval arithmetic and cube
//! populations are never enumerated pointwise.

use std::collections::HashSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::group::GPoint;

/// Dyadic index of a cube: per-horizontal-axis cells plus a t cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CubeIndex {
    pub level: i32,
    pub h: Vec<i64>,
    pub t: i64,
}

impl CubeIndex {
    /// Parent index: floor-halving horizontally, floor-quartering in t.
    pub fn parent(&self) -> CubeIndex {
        CubeIndex {
            level: self.level - 1,
            h: self.h.iter().map(|c| c.div_euclid(2)).collect(),
            t: self.t.div_euclid(4),
        }
    }
}

/// Geometry of the cube family: group arity and shrink factor.
#[derive(Debug, Clone, Copy)]
pub struct CubeGeometry {
    /// Arity of the ambient Heisenberg group whose model G we decompose.
    pub n: usize,
    pub sigma: f64,
}

impl CubeGeometry {
    /// Number of horizontal axes of G (z₁,…,z_{2n−2}, s).
    pub fn horizontal_dims(&self) -> usize {
        2 * self.n - 1
    }

    /// Whether the model group has a nonabelian twist (n ≥ 2).
    pub fn twisted(&self) -> bool {
        self.n >= 2
    }

    pub fn h_side(&self, level: i32) -> f64 {
        self.sigma * 2f64.powi(-level)
    }

    pub fn t_side(&self, level: i32) -> f64 {
        self.sigma * self.sigma * 4f64.powi(-level)
    }

    /// Dyadic index of the cube containing g at the given level
    /// (half-open boxes, closed on lower faces).
    pub fn cube_of_point(&self, g: &GPoint, level: i32) -> CubeIndex {
        assert_eq!(g.n, self.n, "arity mismatch");
        let hw = self.h_side(level);
        let tw = self.t_side(level);
        let h = g.horizontal().iter().map(|&c| (c / hw).floor() as i64).collect();
        CubeIndex { level, h, t: (g.t / tw).floor() as i64 }
    }

    /// Closed coordinate box of a cube: per-axis (lo, hi) with t last.
    pub fn cube_box(&self, idx: &CubeIndex) -> (Vec<f64>, Vec<f64>) {
        let hw = self.h_side(idx.level);
        let tw = self.t_side(idx.level);
        let mut lo: Vec<f64> = idx.h.iter().map(|&c| c as f64 * hw).collect();
        let mut hi: Vec<f64> = idx.h.iter().map(|&c| (c + 1) as f64 * hw).collect();
        lo.push(idx.t as f64 * tw);
        hi.push((idx.t + 1) as f64 * tw);
        (lo, hi)
    }

    pub fn cube_center(&self, idx: &CubeIndex) -> GPoint {
        let (lo, hi) = self.cube_box(idx);
        let d = self.horizontal_dims();
        let h: Vec<f64> = (0..d).map(|a| 0.5 * (lo[a] + hi[a])).collect();
        GPoint::from_horizontal(self.n, &h, 0.5 * (lo[d] + hi[d]))
    }

    /// Certified upper bound on diam_G of any level-`level` cube whose
    /// z-coordinates stay within |z| ≤ z_bound.
    pub fn diam_bound(&self, level: i32, z_bound: f64) -> f64 {
        let d = self.horizontal_dims() as f64;
        let hw = self.h_side(level);
        let h2 = d * hw * hw; // |Δ horizontal|² over the box
        let mut t_eff = self.t_side(level);
        if self.twisted() {
            // Twist of the product: |½ω(z', Δz)| ≤ ½|z'||Δz|.
            let dz = ((2 * self.n - 2) as f64).sqrt() * hw;
            t_eff += 0.5 * z_bound * dz;
        }
        (h2 * h2 + 16.0 * t_eff * t_eff).sqrt().sqrt()
    }
}

/// Certified lower bound for d(q', t-face at coordinate gap g_t): solve
/// d²/4 + (z + d)·d/2 = g_t in the twisted model; 2√g_t in the abelian one.
pub fn phi_t_lower(g_t: f64, z_abs: f64, twisted: bool) -> f64 {
    if g_t <= 0.0 {
        return 0.0;
    }
    if twisted {
        ((z_abs * z_abs + 12.0 * g_t).sqrt() - z_abs) / 3.0
    } else {
        2.0 * g_t.sqrt()
    }
}

/// Coordinate t-gap needed so that [`phi_t_lower`] certifies distance ≥ d.
pub fn t_margin_for(d: f64, z_abs: f64, twisted: bool) -> f64 {
    if twisted {
        0.75 * d * d + 0.5 * z_abs * d
    } else {
        0.25 * d * d
    }
}

/// Certified lower bound on the metric distance from q to the complement
/// of the cube with the given box: the least horizontal face gap, or the
/// twist-aware bound from the least t-face gap, whichever is smaller.
pub fn dist_lower_bound_to_complement(
    geom: &CubeGeometry,
    q: &GPoint,
    lo: &[f64],
    hi: &[f64],
) -> Result<f64> {
    let d = geom.horizontal_dims();
    let h = q.horizontal();
    let mut g_h = f64::INFINITY;
    for a in 0..d {
        if h[a] < lo[a] || h[a] > hi[a] {
            return Err(Error::Usage("point outside cube".into()));
        }
        g_h = g_h.min(h[a] - lo[a]).min(hi[a] - h[a]);
    }
    if q.t < lo[d] || q.t > hi[d] {
        return Err(Error::Usage("point outside cube".into()));
    }
    let g_t = (q.t - lo[d]).min(hi[d] - q.t);
    let z_abs = q.z.iter().map(|c| c * c).sum::<f64>().sqrt();
    Ok(g_h.min(phi_t_lower(g_t, z_abs, geom.twisted())))
}

/// One surviving interval of a per-axis Cantor family.
#[derive(Debug, Clone)]
pub struct AxisInterval {
    /// Dyadic cell index at this level (global grid).
    pub cell: i64,
    pub lo: f64,
    pub hi: f64,
    /// Index of the parent interval in the previous level's list.
    pub parent: usize,
}

impl AxisInterval {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Per-level summary of a realization.
#[derive(Debug, Clone)]
pub struct LevelStats {
    pub level: i32,
    /// Number of surviving cores (product over axes; kept as f64).
    pub cores: f64,
    /// Total Lebesgue measure of the surviving cores.
    pub measure: f64,
    /// Certified minimal distance between distinct cores.
    pub min_separation: f64,
    /// The separation the construction must guarantee: τ·2^{−n(1+ε)}.
    pub required_separation: f64,
    /// Certified diameter bound for cubes at this level.
    pub diam_bound: f64,
}

/// A kept representative: per-axis interval indices at depth n_max
/// (horizontal axes in order, then the t axis).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KeptPoint {
    pub axis_ids: Vec<usize>,
}

/// A finite fat Cantor realization: nested, pruned cube cores from level
/// n₀ down to n_max, stored as per-axis interval families.
#[derive(Debug, Clone)]
pub struct CantorRealization {
    pub geom: CubeGeometry,
    pub n0: i32,
    pub n_max: i32,
    pub alpha: f64,
    pub epsilon: f64,
    pub tau: f64,
    /// Max |z| over the root box (twist bound used for conservative margins).
    pub z_bound: f64,
    pub root: CubeIndex,
    /// axes[a][k] = surviving intervals of axis a at level n₀+k; the last
    /// axis is the t axis, the others are horizontal.
    pub axes: Vec<Vec<Vec<AxisInterval>>>,
    pub measure_root: f64,
    pub measure_kept: f64,
    pub levels: Vec<LevelStats>,
}

impl CantorRealization {
    pub fn depth(&self) -> usize {
        (self.n_max - self.n0) as usize
    }

    fn num_axes(&self) -> usize {
        self.geom.horizontal_dims() + 1
    }

    /// Per-axis interval indices of a kept point's ancestor core at `level`.
    pub fn chain_ids(&self, kp: &KeptPoint, level: i32) -> Vec<usize> {
        assert!(level >= self.n0 && level <= self.n_max);
        let mut ids = kp.axis_ids.clone();
        let mut k = self.depth();
        while (self.n0 + k as i32) > level {
            for a in 0..self.num_axes() {
                ids[a] = self.axes[a][k][ids[a]].parent;
            }
            k -= 1;
        }
        ids
    }

    /// Center of the core identified by per-axis interval ids at `level`.
    pub fn core_center(&self, ids: &[usize], level: i32) -> GPoint {
        let k = (level - self.n0) as usize;
        let d = self.geom.horizontal_dims();
        let h: Vec<f64> = (0..d).map(|a| self.axes[a][k][ids[a]].mid()).collect();
        GPoint::from_horizontal(self.geom.n, &h, self.axes[d][k][ids[d]].mid())
    }

    /// The representative point of a kept index (deepest core center).
    pub fn kept_g(&self, kp: &KeptPoint) -> GPoint {
        self.core_center(&kp.axis_ids, self.n_max)
    }

    /// Deterministic sample (without replacement) of kept representatives.
    pub fn sample_kept(&self, count: usize, seed: u64) -> Vec<KeptPoint> {
        let k = self.depth();
        let sizes: Vec<usize> = (0..self.num_axes()).map(|a| self.axes[a][k].len()).collect();
        let total: f64 = sizes.iter().map(|&s| s as f64).product();
        let mut rng = crate::sampling::rng(seed);
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let budget = (count * 50).max(1000);
        for _ in 0..budget {
            if out.len() >= count || (out.len() as f64) >= total {
                break;
            }
            let ids: Vec<usize> = sizes.iter().map(|&s| rng.gen_range(0..s)).collect();
            let kp = KeptPoint { axis_ids: ids };
            if seen.insert(kp.clone()) {
                out.push(kp);
            }
        }
        out
    }

    /// Re-verify the structural invariants from interval arithmetic:
    /// nesting, disjointness, diameter, and separation at every level.
    pub fn verify(&self) -> Result<()> {
        for (a, axis) in self.axes.iter().enumerate() {
            for (k, ivals) in axis.iter().enumerate() {
                let mut prev_hi = f64::NEG_INFINITY;
                for iv in ivals {
                    if iv.len() <= 0.0 {
                        return Err(Error::Invariant(format!("empty interval axis {a} level {k}")));
                    }
                    if iv.lo < prev_hi {
                        return Err(Error::Invariant(format!(
                            "overlapping intervals on axis {a} level {k}"
                        )));
                    }
                    prev_hi = iv.hi;
                    if k > 0 {
                        let par = &axis[k - 1][iv.parent];
                        if iv.lo < par.lo - 1e-15 || iv.hi > par.hi + 1e-15 {
                            return Err(Error::Invariant(format!(
                                "child interval escapes parent on axis {a} level {k}"
                            )));
                        }
                    }
                }
            }
        }
        for st in &self.levels {
            if st.diam_bound >= 2f64.powi(-st.level) {
                return Err(Error::Invariant(format!(
                    "diameter bound {} not below 2^-{} ",
                    st.diam_bound, st.level
                )));
            }
            if st.min_separation < st.required_separation * (1.0 - 1e-9) {
                return Err(Error::Invariant(format!(
                    "separation {} below required {} at level {}",
                    st.min_separation, st.required_separation, st.level
                )));
            }
        }
        Ok(())
    }
}

fn build_axis(
    root_cell: i64,
    n0: i32,
    n_max: i32,
    factor: i64,
    width: impl Fn(i32) -> f64,
    margin: impl Fn(i32) -> f64,
) -> Vec<Vec<AxisInterval>> {
    let mut levels: Vec<Vec<AxisInterval>> = Vec::new();
    // Root level: the root cell pruned by the level-n₀ margin.
    let w0 = width(n0);
    let m0 = margin(n0);
    let root = AxisInterval {
        cell: root_cell,
        lo: root_cell as f64 * w0 + m0,
        hi: (root_cell + 1) as f64 * w0 - m0,
        parent: usize::MAX,
    };
    levels.push(if root.len() > 0.0 { vec![root] } else { vec![] });
    for n in (n0 + 1)..=n_max {
        let w = width(n);
        let m = margin(n);
        let mut out = Vec::new();
        for (ip, par) in levels.last().unwrap().iter().enumerate() {
            for c in 0..factor {
                let cell = par.cell * factor + c;
                let lo = (cell as f64 * w + m).max(par.lo);
                let hi = ((cell + 1) as f64 * w - m).min(par.hi);
                if hi - lo > 0.0 {
                    out.push(AxisInterval { cell, lo, hi, parent: ip });
                }
            }
        }
        levels.push(out);
    }
    levels
}

/// Max |z| over the root box (0 for the abelian model).
fn root_z_bound(geom: &CubeGeometry, root: &CubeIndex) -> f64 {
    if !geom.twisted() {
        return 0.0;
    }
    let (lo, hi) = geom.cube_box(root);
    let z_axes = 2 * geom.n - 2;
    (0..z_axes)
        .map(|a| lo[a].abs().max(hi[a].abs()).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Union-bound estimate of the relative measure lost to pruning.
fn loss_series(geom: &CubeGeometry, z_bound: f64, n0: i32, n_max: i32, eps: f64, tau: f64) -> f64 {
    let d = geom.horizontal_dims() as f64;
    let mut loss = 0.0;
    for n in n0..=n_max {
        let rho = tau * 2f64.powf(-(n as f64) * (1.0 + eps));
        let mh = rho;
        let mt = t_margin_for(rho, z_bound, geom.twisted());
        loss += d * 2.0 * mh / geom.h_side(n) + 2.0 * mt / geom.t_side(n);
    }
    loss
}

fn build_with_tau(
    geom: &CubeGeometry,
    root: &CubeIndex,
    z_bound: f64,
    n0: i32,
    n_max: i32,
    alpha: f64,
    tau: f64,
) -> Result<CantorRealization> {
    let eps = alpha / 2.0;
    let d = geom.horizontal_dims();
    let margin_h = |n: i32| tau * 2f64.powf(-(n as f64) * (1.0 + eps));
    let margin_t =
        |n: i32| t_margin_for(tau * 2f64.powf(-(n as f64) * (1.0 + eps)), z_bound, geom.twisted());

    let mut axes = Vec::with_capacity(d + 1);
    for a in 0..d {
        axes.push(build_axis(root.h[a], n0, n_max, 2, |n| geom.h_side(n), margin_h));
    }
    axes.push(build_axis(root.t, n0, n_max, 4, |n| geom.t_side(n), margin_t));

    let measure_root = geom.h_side(n0).powi(d as i32) * geom.t_side(n0);

    let mut levels = Vec::new();
    for k in 0..=(n_max - n0) as usize {
        let n = n0 + k as i32;
        if axes.iter().any(|ax| ax[k].is_empty()) {
            return Err(Error::Invariant(format!("realization empty at level {n}")));
        }
        let cores: f64 = axes.iter().map(|ax| ax[k].len() as f64).product();
        let measure: f64 =
            axes.iter().map(|ax| ax[k].iter().map(AxisInterval::len).sum::<f64>()).product();
        // Certified separation: distinct cores differ along some axis; the
        // smallest certified gap over axes bounds their distance below.
        let mut min_sep = f64::INFINITY;
        for (a, ax) in axes.iter().enumerate() {
            let mut gap = f64::INFINITY;
            for pair in ax[k].windows(2) {
                gap = gap.min(pair[1].lo - pair[0].hi);
            }
            if gap.is_finite() {
                let metric = if a == d {
                    phi_t_lower(gap, z_bound, geom.twisted())
                } else {
                    gap
                };
                min_sep = min_sep.min(metric);
            }
        }
        levels.push(LevelStats {
            level: n,
            cores,
            measure,
            min_separation: min_sep,
            required_separation: tau * 2f64.powf(-(n as f64) * (1.0 + eps)),
            diam_bound: geom.diam_bound(n, z_bound),
        });
    }

    let measure_kept = levels.last().unwrap().measure;
    Ok(CantorRealization {
        geom: *geom,
        n0,
        n_max,
        alpha,
        epsilon: eps,
        tau,
        z_bound,
        root: root.clone(),
        axes,
        measure_root,
        measure_kept,
        levels,
    })
}

/// Build a fat Cantor realization rooted at the level-n₀ cube containing
/// `center`, pruned down to level n_max with ε = α/2.
///
/// `tau`: None selects the largest τ (by bisection on the loss series,
/// then exact verification) keeping at least half the root measure.
/// `sigma`: None selects 1/4 for the abelian model and the largest power
/// of two making the certified diameter bound hold at every level for the
/// twisted model.
pub fn build_fat_cantor(
    n: usize,
    center: &GPoint,
    n0: i32,
    n_max: i32,
    alpha: f64,
    tau: Option<f64>,
    sigma: Option<f64>,
) -> Result<CantorRealization> {
    if n_max <= n0 || n0 < 0 {
        return Err(Error::Usage("need n_max > n0 >= 0".into()));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Usage("alpha must lie in (0, 1]".into()));
    }
    let eps = alpha / 2.0;

    // Choose sigma.
    let sigma = match sigma {
        Some(s) => s,
        None => {
            let mut s = 0.25;
            loop {
                let geom = CubeGeometry { n, sigma: s };
                let root = geom.cube_of_point(center, n0);
                let zb = root_z_bound(&geom, &root);
                let ok = (n0..=n_max).all(|lvl| geom.diam_bound(lvl, zb) < 2f64.powi(-lvl));
                if ok {
                    break s;
                }
                s *= 0.5;
                if s < 2f64.powi(-40) {
                    return Err(Error::Numerical(
                        "no shrink factor satisfies the diameter bound".into(),
                    ));
                }
            }
        }
    };
    let geom = CubeGeometry { n, sigma };
    let root = geom.cube_of_point(center, n0);
    let z_bound = root_z_bound(&geom, &root);

    match tau {
        Some(t) => build_with_tau(&geom, &root, z_bound, n0, n_max, alpha, t),
        None => {
            // Largest τ with union-bound loss ≤ 0.35, then verify exactly.
            let mut t = 1.0;
            let mut guard = 0;
            while loss_series(&geom, z_bound, n0, n_max, eps, t) > 0.35 {
                t *= 0.5;
                guard += 1;
                if guard > 200 {
                    return Err(Error::Numerical("tau bisection failed".into()));
                }
            }
            for _ in 0..60 {
                let real = build_with_tau(&geom, &root, z_bound, n0, n_max, alpha, t)?;
                if real.measure_kept >= 0.5 * real.measure_root {
                    return Ok(real);
                }
                t *= 0.5;
            }
            Err(Error::Invariant("auto tau failed to keep half the root measure".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_of_point_plane_example() {
        // Abelian model, σ=1/4, level 1: (0.3, 0.05) lands in cells (2, 3).
        let geom = CubeGeometry { n: 1, sigma: 0.25 };
        let idx = geom.cube_of_point(&GPoint::plane(0.3, 0.05), 1);
        assert_eq!(idx.h, vec![2]);
        assert_eq!(idx.t, 3);
    }

    #[test]
    fn origin_maps_to_zero_index_and_nesting() {
        let geom = CubeGeometry { n: 2, sigma: 0.25 };
        let g = GPoint::new(2, vec![0.01, 0.02], 0.0001, 0.015);
        for lvl in 0..6 {
            let idx = geom.cube_of_point(&GPoint::origin(2), lvl);
            assert!(idx.h.iter().all(|&c| c == 0) && idx.t == 0);
            // Parent consistency.
            let child = geom.cube_of_point(&g, lvl + 1);
            assert_eq!(child.parent(), geom.cube_of_point(&g, lvl));
        }
    }

    #[test]
    fn phi_t_plane_example() {
        // Abelian: gap 0.01 certifies distance 2√0.01 = 0.2.
        assert!((phi_t_lower(0.01, 0.0, false) - 0.2).abs() < 1e-15);
        // Inversion round-trip in the twisted model.
        let d = 0.037;
        let z = 0.8;
        let g = t_margin_for(d, z, true);
        assert!((phi_t_lower(g, z, true) - d).abs() < 1e-12);
    }

    #[test]
    fn dist_bound_on_face_is_zero() {
        let geom = CubeGeometry { n: 1, sigma: 0.25 };
        let idx = geom.cube_of_point(&GPoint::plane(0.01, 0.001), 2);
        let (lo, hi) = geom.cube_box(&idx);
        let q = GPoint::plane(lo[0], 0.001);
        let b = dist_lower_bound_to_complement(&geom, &q, &lo, &hi).unwrap();
        assert_eq!(b, 0.0);
    }

    #[test]
    fn dist_bound_sound_vs_face_sampling() {
        // The certified bound never exceeds the true distance to the
        // complement, estimated by dense sampling of the faces.
        let geom = CubeGeometry { n: 2, sigma: 0.25 };
        let mut rng = crate::sampling::rng(11);
        for _ in 0..60 {
            let g = GPoint::new(
                2,
                vec![crate::sampling::uniform(&mut rng, -0.5, 0.5),
                     crate::sampling::uniform(&mut rng, -0.5, 0.5)],
                crate::sampling::uniform(&mut rng, -0.01, 0.01),
                crate::sampling::uniform(&mut rng, -0.5, 0.5),
            );
            let idx = geom.cube_of_point(&g, 3);
            let (lo, hi) = geom.cube_box(&idx);
            let bound = dist_lower_bound_to_complement(&geom, &g, &lo, &hi).unwrap();
            // Sample points on each face and compare.
            let d = geom.horizontal_dims();
            let mut min_face = f64::INFINITY;
            for axis in 0..=d {
                for side in 0..2 {
                    for _ in 0..40 {
                        let mut h: Vec<f64> = (0..d)
                            .map(|a| crate::sampling::uniform(&mut rng, lo[a], hi[a]))
                            .collect();
                        let mut t = crate::sampling::uniform(&mut rng, lo[d], hi[d]);
                        let v = if side == 0 { lo[axis] } else { hi[axis] };
                        if axis == d {
                            t = v;
                        } else {
                            h[axis] = v;
                        }
                        let q = GPoint::from_horizontal(2, &h, t);
                        min_face = min_face.min(crate::group::model_dist(&g, &q));
                    }
                }
            }
            assert!(
                bound <= min_face + 1e-12,
                "bound {bound} exceeds sampled face distance {min_face}"
            );
        }
    }

    #[test]
    fn fat_cantor_plane_keeps_half() {
        let real =
            build_fat_cantor(1, &GPoint::plane(0.0, 0.0), 2, 8, 0.5, None, None).unwrap();
        assert!(real.measure_kept >= 0.5 * real.measure_root);
        real.verify().unwrap();
    }

    #[test]
    fn tau_zero_keeps_everything() {
        let real =
            build_fat_cantor(1, &GPoint::plane(0.0, 0.0), 2, 5, 0.5, Some(0.0), None).unwrap();
        assert!((real.measure_kept - real.measure_root).abs() < 1e-15 * real.measure_root.max(1.0));
    }

    #[test]
    fn kept_points_lie_in_all_ancestor_cores() {
        let real =
            build_fat_cantor(2, &GPoint::origin(2), 2, 6, 0.5, None, None).unwrap();
        real.verify().unwrap();
        for kp in real.sample_kept(20, 3) {
            let g = real.kept_g(&kp);
            for level in real.n0..=real.n_max {
                let ids = real.chain_ids(&kp, level);
                let k = (level - real.n0) as usize;
                let h = g.horizontal();
                for a in 0..real.geom.horizontal_dims() {
                    let iv = &real.axes[a][k][ids[a]];
                    assert!(h[a] >= iv.lo && h[a] <= iv.hi);
                }
                let d = real.geom.horizontal_dims();
                let iv = &real.axes[d][k][ids[d]];
                assert!(g.t >= iv.lo && g.t <= iv.hi);
            }
        }
    }
}
