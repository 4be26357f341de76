//! Intrinsic graphs over the vertical subgroup 𝕎.
//!
//! A surface is the intrinsic graph S = {Φ(w) := w·φ(w) : w ∈ 𝕎} of a
//! function φ: 𝕎 → 𝕍 ≅ ℝ. This module provides the graph map, the
//! left-translated function φ^(p⁻¹), numerical intrinsic gradients along
//! the vector fields
//!
//! ```text
//! D^φ_j = X_j (j ≠ n+1),    D^φ_{n+1} = ∂_{x_{n+1}} + φ ∂_t,
//! X_i = ∂_{x_i} − (x_{n+i}/2) ∂_t,   X_{n+i} = ∂_{x_{n+i}} + (x_i/2) ∂_t,
//! ```
//!
//! regularity estimators (intrinsic Lipschitz quotient, Hölder gradient,
//! extra vertical Hölder), anisotropic rescaling, and nearest-point
//! projection onto the graph.

use crate::error::{Error, Result};
use crate::group::{dist, group_mul, split, v_point, HPoint, WPoint};
use crate::minimize::grid_minimize;

/// A 1-D piecewise-linear profile with compact support (used by flag
/// surfaces): value 0 outside the breakpoint range, exact integrals.
#[derive(Debug, Clone)]
pub struct PiecewiseLinear {
    /// Strictly increasing x's; first and last value must be 0 so the
    /// profile extends by 0 continuously.
    pub breakpoints: Vec<(f64, f64)>,
    /// Cumulative exact integral from breakpoints[0].x to breakpoints[k].x.
    cumulative: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::Usage("profile needs at least two breakpoints".into()));
        }
        for w in breakpoints.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Usage("profile breakpoints must be strictly increasing".into()));
            }
        }
        let first = breakpoints.first().unwrap().1;
        let last = breakpoints.last().unwrap().1;
        if first != 0.0 || last != 0.0 {
            return Err(Error::Usage(
                "profile must start and end at value 0 (compact support)".into(),
            ));
        }
        let mut cumulative = vec![0.0];
        for w in breakpoints.windows(2) {
            let area = 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0);
            cumulative.push(cumulative.last().unwrap() + area);
        }
        Ok(PiecewiseLinear { breakpoints, cumulative })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let bp = &self.breakpoints;
        if x <= bp[0].0 || x >= bp[bp.len() - 1].0 {
            return 0.0;
        }
        let k = bp.partition_point(|b| b.0 <= x) - 1;
        let (x0, v0) = bp[k];
        let (x1, v1) = bp[k + 1];
        v0 + (v1 - v0) * (x - x0) / (x1 - x0)
    }

    /// Exact ∫₀^x of the profile.
    pub fn integral_from_zero(&self, x: f64) -> f64 {
        self.integral_from_start(x) - self.integral_from_start(0.0)
    }

    fn integral_from_start(&self, x: f64) -> f64 {
        let bp = &self.breakpoints;
        if x <= bp[0].0 {
            return 0.0;
        }
        if x >= bp[bp.len() - 1].0 {
            return *self.cumulative.last().unwrap();
        }
        let k = bp.partition_point(|b| b.0 <= x) - 1;
        let (x0, v0) = bp[k];
        let v = self.eval(x);
        self.cumulative[k] + 0.5 * (v0 + v) * (x - x0)
    }

    /// Lipschitz constant (max absolute slope).
    pub fn lipschitz(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
            .fold(0.0, f64::max)
    }
}

/// The built-in surface families.
#[derive(Debug, Clone)]
pub enum SurfaceKind {
    /// φ ≡ c (graph is the vertical plane {x₁ = c}).
    Constant(f64),
    /// φ(y,t) = −t^α/(1−α) for t ≥ 0, 0 for t < 0 (½ < α < 1), times a C²
    /// cutoff: 1 inside `support_radius/2`, 0 outside `support_radius`.
    BigolinVittone { alpha: f64 },
    /// t-independent profile φ(y,t) = ψ(y) — a Lipschitz flag (n = 1).
    Flag(PiecewiseLinear),
    /// Smooth compactly supported bump a·(1 − (ρ/s)²)³, ρ = |(y,t)|₂.
    Bump { amplitude: f64, radius: f64 },
    /// Bilinear interpolation on a regular (y,t) grid (n = 1); 0 outside.
    Tabulated { y0: f64, t0: f64, dy: f64, dt: f64, values: Vec<Vec<f64>> },
}

/// An intrinsic-graph datum: the function φ with declared regularity
/// constants and an anisotropic zoom factor (see [`rescale`]).
#[derive(Debug, Clone)]
pub struct SurfaceFn {
    pub n: usize,
    pub kind: SurfaceKind,
    /// Hölder exponent of the intrinsic gradient (C^{1,α} scale).
    pub declared_alpha: f64,
    /// Hölder constant for the declared exponent.
    pub declared_h: f64,
    /// Intrinsic Lipschitz constant.
    pub declared_l: f64,
    /// The function is identically 0 (or the declared constant) outside
    /// this radius in the parameter (y,t).
    pub support_radius: f64,
    /// Zoom r: this surface evaluates as (1/r)·φ_base(δ_r w).
    pub zoom: f64,
}

impl SurfaceFn {
    pub fn constant(n: usize, c: f64) -> Self {
        SurfaceFn {
            n,
            kind: SurfaceKind::Constant(c),
            declared_alpha: 1.0,
            declared_h: 1e-12,
            declared_l: 1e-12,
            support_radius: f64::INFINITY,
            zoom: 1.0,
        }
    }

    /// The standard non-smooth example: intrinsic gradient c_α·t^{2α−1}
    /// with c_α = α/(1−α)², so the graph is C^{1,α'} with α' = 2α−1.
    pub fn bigolin_vittone(alpha: f64) -> Self {
        assert!(alpha > 0.5 && alpha < 1.0, "exponent must lie in (1/2, 1)");
        let c_alpha = alpha / ((1.0 - alpha) * (1.0 - alpha));
        SurfaceFn {
            n: 1,
            kind: SurfaceKind::BigolinVittone { alpha },
            declared_alpha: 2.0 * alpha - 1.0,
            declared_h: c_alpha / 2.0, // |t^β − s^β| ≤ |t−s|^β slope heuristic, β=2α−1
            declared_l: c_alpha,       // sup |∇^φφ| on the unit window
            support_radius: 16.0,
            zoom: 1.0,
        }
    }

    pub fn flag(profile: PiecewiseLinear) -> Self {
        let l = profile.lipschitz();
        SurfaceFn {
            n: 1,
            kind: SurfaceKind::Flag(profile),
            declared_alpha: 1.0,
            declared_h: 1e-9,
            declared_l: l.max(1e-12),
            support_radius: f64::INFINITY,
            zoom: 1.0,
        }
    }

    pub fn bump(n: usize, amplitude: f64, radius: f64) -> Self {
        assert!(radius > 0.0);
        // Slope scale of the bump: |∇ bump| ≲ 6|a|/s.
        let slope = 6.0 * amplitude.abs() / radius;
        SurfaceFn {
            n,
            kind: SurfaceKind::Bump { amplitude, radius },
            declared_alpha: 1.0,
            declared_h: (6.0 * amplitude.abs() / (radius * radius)).max(1e-12),
            declared_l: slope.max(1e-12),
            support_radius: radius,
            zoom: 1.0,
        }
    }

    pub fn tabulated(
        y0: f64,
        t0: f64,
        dy: f64,
        dt: f64,
        values: Vec<Vec<f64>>,
        declared_alpha: f64,
        declared_h: f64,
        declared_l: f64,
    ) -> Self {
        assert!(dy > 0.0 && dt > 0.0 && !values.is_empty());
        let extent = (values.len() as f64 * dy).max(values[0].len() as f64 * dt);
        SurfaceFn {
            n: 1,
            kind: SurfaceKind::Tabulated { y0, t0, dy, dt, values },
            declared_alpha,
            declared_h,
            declared_l,
            support_radius: extent + y0.abs().max(t0.abs()),
            zoom: 1.0,
        }
    }

    /// Evaluate φ at a parameter point of 𝕎.
    pub fn eval(&self, w: &WPoint) -> f64 {
        assert_eq!(w.n, self.n, "arity mismatch");
        if self.zoom == 1.0 {
            self.eval_base(&w.y, w.t)
        } else {
            let r = self.zoom;
            let y: Vec<f64> = w.y.iter().map(|c| r * c).collect();
            self.eval_base(&y, r * r * w.t) / r
        }
    }

    fn eval_base(&self, y: &[f64], t: f64) -> f64 {
        match &self.kind {
            SurfaceKind::Constant(c) => *c,
            SurfaceKind::BigolinVittone { alpha } => {
                if t <= 0.0 {
                    return 0.0;
                }
                let rho2: f64 = y.iter().map(|c| c * c).sum::<f64>() + t * t;
                let cut = cutoff_c2(rho2.sqrt(), 0.5 * self.support_radius, self.support_radius);
                if cut == 0.0 {
                    return 0.0;
                }
                -t.powf(*alpha) / (1.0 - alpha) * cut
            }
            SurfaceKind::Flag(profile) => profile.eval(y[0]),
            SurfaceKind::Bump { amplitude, radius } => {
                let rho2: f64 = y.iter().map(|c| c * c).sum::<f64>() + t * t;
                let u2 = rho2 / (radius * radius);
                if u2 >= 1.0 {
                    0.0
                } else {
                    amplitude * (1.0 - u2).powi(3)
                }
            }
            SurfaceKind::Tabulated { y0, t0, dy, dt, values } => {
                let fy = (y[0] - y0) / dy;
                let ft = (t - t0) / dt;
                let ny = values.len();
                let nt = values[0].len();
                if fy < 0.0 || ft < 0.0 || fy > (ny - 1) as f64 || ft > (nt - 1) as f64 {
                    return 0.0;
                }
                let i = (fy.floor() as usize).min(ny - 2);
                let j = (ft.floor() as usize).min(nt - 2);
                let (a, b) = (fy - i as f64, ft - j as f64);
                values[i][j] * (1.0 - a) * (1.0 - b)
                    + values[i + 1][j] * a * (1.0 - b)
                    + values[i][j + 1] * (1.0 - a) * b
                    + values[i + 1][j + 1] * a * b
            }
        }
    }

    /// Half of the support radius: regularity checks for cutoff surfaces
    /// are restricted to this inner window where the cutoff is identically 1.
    pub fn inner_window(&self) -> f64 {
        match self.kind {
            SurfaceKind::BigolinVittone { .. } => 0.5 * self.support_radius / self.zoom,
            _ => self.support_radius / self.zoom,
        }
    }
}

/// C² cutoff: 1 on [0, r_in], 0 on [r_out, ∞), quintic smoothstep between.
fn cutoff_c2(rho: f64, r_in: f64, r_out: f64) -> f64 {
    if rho <= r_in {
        1.0
    } else if rho >= r_out {
        0.0
    } else {
        let u = (rho - r_in) / (r_out - r_in);
        1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
    }
}

/// A parameter w together with its graph value Φ(w) = w·φ(w).
#[derive(Debug, Clone)]
pub struct GraphPoint {
    pub w: WPoint,
    pub p: HPoint,
}

/// Graph map Φ(w) = w·(φ(w), 0, …, 0).
pub fn graph_map(phi: &SurfaceFn, w: &WPoint) -> Result<GraphPoint> {
    let v = phi.eval(w);
    if !v.is_finite() {
        return Err(Error::Numerical(format!("non-finite surface value at {w:?}")));
    }
    let p = group_mul(&w.embed(), &v_point(w.n, v));
    Ok(GraphPoint { w: w.clone(), p })
}

/// Left-translated function φ^(p⁻¹)(w) = φ(π_𝕎(p·w)) − x₁(p); its
/// intrinsic graph is p⁻¹·Φ(𝕎).
pub fn translate_fn(phi: &SurfaceFn, p: &HPoint, w: &WPoint) -> f64 {
    let (pw, _) = split(&group_mul(p, &w.embed()));
    phi.eval(&pw) - p.x[0]
}

/// Intrinsic gradient of an arbitrary evaluator f: 𝕎 → ℝ at w, step h.
///
/// Components are ordered j = 2,…,2n. For j ≠ n+1 the flow of X_j is the
/// straight group line w·(h e_j); for j = n+1 the characteristic
/// (ẏ_{n+1} = 1, ṫ = f) is advanced one classical fourth-order step.
pub fn intrinsic_gradient_of<F: Fn(&WPoint) -> f64>(
    f: &F,
    n: usize,
    w: &WPoint,
    h: f64,
) -> Result<Vec<f64>> {
    assert!(h > 0.0);
    let mut grad = Vec::with_capacity(2 * n - 1);
    for j in 2..=2 * n {
        let d = if j == n + 1 {
            // One RK4 step of the characteristic in each direction.
            let fwd = characteristic_step(f, w, j, h);
            let bwd = characteristic_step(f, w, j, -h);
            (f(&fwd) - f(&bwd)) / (2.0 * h)
        } else {
            let mut e = vec![0.0; 2 * n];
            e[j - 1] = h;
            let plus = split(&group_mul(&w.embed(), &HPoint::new(n, e.clone(), 0.0))).0;
            e[j - 1] = -h;
            let minus = split(&group_mul(&w.embed(), &HPoint::new(n, e, 0.0))).0;
            (f(&plus) - f(&minus)) / (2.0 * h)
        };
        if !d.is_finite() {
            return Err(Error::Numerical(format!("non-finite gradient component j={j} at {w:?}")));
        }
        grad.push(d);
    }
    Ok(grad)
}

/// Advance the nonlinear characteristic (x_{n+1}' = 1, t' = f) one RK4 step
/// of signed size h from w.
fn characteristic_step<F: Fn(&WPoint) -> f64>(f: &F, w: &WPoint, j: usize, h: f64) -> WPoint {
    let slot = j - 2; // index of x_{n+1} within the y-vector
    let at = |sigma: f64, t: f64| -> WPoint {
        let mut y = w.y.clone();
        y[slot] += sigma;
        WPoint { n: w.n, y, t }
    };
    let k1 = f(&at(0.0, w.t));
    let k2 = f(&at(0.5 * h, w.t + 0.5 * h * k1));
    let k3 = f(&at(0.5 * h, w.t + 0.5 * h * k2));
    let k4 = f(&at(h, w.t + h * k3));
    at(h, w.t + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

/// Intrinsic gradient ∇^φφ(w) (length 2n−1).
pub fn intrinsic_gradient(phi: &SurfaceFn, w: &WPoint, h: f64) -> Result<Vec<f64>> {
    let f = |u: &WPoint| phi.eval(u);
    intrinsic_gradient_of(&f, phi.n, w, h)
}

/// Horizontal unit normal ν(Φ(w)) = (−1, ∇^φφ(w)) / √(1+|∇^φφ(w)|²).
pub fn normal(phi: &SurfaceFn, w: &WPoint, h: f64) -> Result<Vec<f64>> {
    let g = intrinsic_gradient(phi, w, h)?;
    let norm = (1.0 + g.iter().map(|c| c * c).sum::<f64>()).sqrt();
    let mut v = Vec::with_capacity(2 * phi.n);
    v.push(-1.0 / norm);
    v.extend(g.iter().map(|c| c / norm));
    Ok(v)
}

/// Sampled intrinsic Lipschitz quotient: sup over pairs of
/// ‖π_𝕍(Φ(w)⁻¹·Φ(w'))‖ / ‖π_𝕎(Φ(w)⁻¹·Φ(w'))‖. Degenerate pairs
/// (vanishing 𝕎-part, nonvanishing 𝕍-part) report +∞.
pub fn lip_estimate(phi: &SurfaceFn, pairs: &[(WPoint, WPoint)]) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for (w, w2) in pairs {
        let a = graph_map(phi, w)?.p;
        let b = graph_map(phi, w2)?.p;
        let d = group_mul(&crate::group::group_inv(&a), &b);
        let (wpart, vpart) = split(&d);
        let wn = wpart.norm();
        if wn == 0.0 {
            if vpart.abs() > 0.0 {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        sup = sup.max(vpart.abs() / wn);
    }
    Ok(sup)
}

/// Sampled Hölder-gradient constant: sup over (base w₀, offset w) of
/// |∇φ(π_𝕎(p·w)) − ∇φ(π_𝕎(p))| / ‖w‖^α with p = Φ(w₀) (the translated
/// gradient at w equals the ambient gradient at π_𝕎(p·w)).
pub fn check_holder_gradient(
    phi: &SurfaceFn,
    alpha: f64,
    h: f64,
    samples: &[(WPoint, WPoint)],
) -> Result<f64> {
    assert!(alpha > 0.0 && alpha <= 1.0);
    let mut sup: f64 = 0.0;
    for (w0, w) in samples {
        let p = graph_map(phi, w0)?.p;
        let there = split(&group_mul(&p, &w.embed())).0;
        let g1 = intrinsic_gradient(phi, &there, h)?;
        let g0 = intrinsic_gradient(phi, w0, h)?;
        let diff = g1
            .iter()
            .zip(&g0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let wn = w.norm();
        if wn > 0.0 {
            sup = sup.max(diff / wn.powf(alpha));
        }
    }
    Ok(sup)
}

/// Sampled extra-vertical-Hölder constant:
/// sup |φ(y,t) − φ(y,t')| / |t−t'|^e with e = (1+α)/2; in two-regime mode
/// the exponent switches to (1−α)/2 for gaps > 1.
pub fn check_vertical_holder(
    phi: &SurfaceFn,
    alpha: f64,
    samples: &[(WPoint, f64)],
    two_regime: bool,
) -> f64 {
    let mut sup: f64 = 0.0;
    for (w, t2) in samples {
        let gap = (w.t - t2).abs();
        if gap == 0.0 {
            continue;
        }
        let mut w2 = w.clone();
        w2.t = *t2;
        let num = (phi.eval(w) - phi.eval(&w2)).abs();
        let e = if two_regime && gap > 1.0 { (1.0 - alpha) / 2.0 } else { (1.0 + alpha) / 2.0 };
        sup = sup.max(num / gap.powf(e));
    }
    sup
}

/// Anisotropic zoom φ_r(w) = (1/r)·φ(δ_r w): the graph of the result is
/// δ_{1/r} of the original graph, and the Hölder constant scales by r^α.
pub fn rescale(phi: &SurfaceFn, r: f64) -> SurfaceFn {
    assert!(r > 0.0);
    let mut out = phi.clone();
    out.zoom = phi.zoom * r;
    out.declared_h = phi.declared_h * r.powf(phi.declared_alpha);
    out.support_radius = phi.support_radius; // base-coordinates radius; inner_window rescales
    out
}

/// Search controls for [`nearest_point`].
#[derive(Debug, Clone, Copy)]
pub struct NearestParams {
    /// Grid points per parameter axis in the coarse scan.
    pub coarse: usize,
    /// Dyadic refinement levels (step halves each level).
    pub refine_levels: usize,
    /// Requested distance accuracy; used for the convergence certificate.
    pub tol: f64,
}

impl Default for NearestParams {
    fn default() -> Self {
        NearestParams { coarse: 33, refine_levels: 30, tol: 1e-6 }
    }
}

/// Nearest point on the graph: minimize w ↦ d(z, Φ(w)) over the box
/// `seed ± window` in the parameters (y, t).
///
/// Deterministic: coarse scan plus dyadic pattern-search refinement with a
/// lexicographic tie-break.
pub fn nearest_point(
    phi: &SurfaceFn,
    z: &HPoint,
    seed: &WPoint,
    window: f64,
    params: &NearestParams,
) -> Result<(WPoint, f64)> {
    assert!(window > 0.0, "window must be positive");
    let n = phi.n;
    let d = 2 * n;
    let mut center = seed.y.clone();
    center.push(seed.t);
    let half = vec![window; d];
    let objective = |u: &[f64]| {
        let w = WPoint { n, y: u[..d - 1].to_vec(), t: u[d - 1] };
        match graph_map(phi, &w) {
            Ok(gp) => dist(z, &gp.p),
            Err(_) => f64::INFINITY,
        }
    };
    let m = grid_minimize(objective, &center, &half, params.coarse, params.refine_levels);
    if !m.value.is_finite() {
        return Err(Error::Numerical("nearest-point search found no finite value".into()));
    }
    // Convergence certificate: the final parameter resolution must be able
    // to resolve distances at the requested tolerance.
    let step_max = m.final_step.iter().cloned().fold(0.0, f64::max);
    if step_max > params.tol.max(1e-12) * 16.0 && step_max > 1e-9 {
        return Err(Error::Numerical(format!(
            "nearest-point refinement stopped at step {step_max:.3e} above tolerance {:.3e}",
            params.tol
        )));
    }
    let w = WPoint { n, y: m.point[..d - 1].to_vec(), t: m.point[d - 1] };
    Ok((w, m.value))
}

/// Exhaustive grid oracle for nearest-point searches (test/audit use):
/// scan the window with a fixed step.
pub fn brute_force_nearest(
    phi: &SurfaceFn,
    z: &HPoint,
    seed: &WPoint,
    window: f64,
    step: f64,
) -> Result<(WPoint, f64)> {
    let n = phi.n;
    let d = 2 * n;
    let mut center = seed.y.clone();
    center.push(seed.t);
    let pts_per_axis = (2.0 * window / step).ceil() as usize + 1;
    let objective = |u: &[f64]| {
        let w = WPoint { n, y: u[..d - 1].to_vec(), t: u[d - 1] };
        match graph_map(phi, &w) {
            Ok(gp) => dist(z, &gp.p),
            Err(_) => f64::INFINITY,
        }
    };
    let m = grid_minimize(objective, &center, &vec![window; d], pts_per_axis, 0);
    let w = WPoint { n, y: m.point[..d - 1].to_vec(), t: m.point[d - 1] };
    Ok((w, m.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{dilate, group_inv, koranyi_norm};

    #[test]
    fn constant_graph_is_vertical_plane() {
        let phi = SurfaceFn::constant(1, 1.0);
        let w = WPoint::new(1, vec![3.0], 2.0);
        let gp = graph_map(&phi, &w).unwrap();
        // (0,x₂,t)·(1,0,0) = (1, x₂, t − x₂/2)
        assert_eq!(gp.p, HPoint::new(1, vec![1.0, 3.0], 0.5));
    }

    #[test]
    fn constant_zero_graph_embeds_w() {
        let phi = SurfaceFn::constant(1, 0.0);
        let w = WPoint::new(1, vec![-0.7], 0.4);
        assert_eq!(graph_map(&phi, &w).unwrap().p, w.embed());
    }

    #[test]
    fn bv_value_at_t1() {
        // φ(0,1) = −1^{0.75}/0.25 = −4; Φ(0,0,1) = (−4, 0, 1).
        let phi = SurfaceFn::bigolin_vittone(0.75);
        let w = WPoint::new(1, vec![0.0], 1.0);
        assert!((phi.eval(&w) + 4.0).abs() < 1e-12);
        let gp = graph_map(&phi, &w).unwrap();
        assert!(gp.p.coord_distance(&HPoint::new(1, vec![-4.0, 0.0], 1.0)) < 1e-12);
    }

    #[test]
    fn translated_constant_vanishes() {
        let phi = SurfaceFn::constant(1, 2.5);
        let p = HPoint::new(1, vec![2.5, 0.0], 0.0);
        for (y, t) in [(0.0, 0.0), (1.0, -2.0), (-0.3, 0.7)] {
            let w = WPoint::new(1, vec![y], t);
            assert!(translate_fn(&phi, &p, &w).abs() < 1e-12);
        }
    }

    #[test]
    fn translated_vanishes_at_origin_for_base_point() {
        let phi = SurfaceFn::bigolin_vittone(0.75);
        let w0 = WPoint::new(1, vec![0.4], 0.9);
        let p = graph_map(&phi, &w0).unwrap().p;
        assert!(translate_fn(&phi, &p, &WPoint::origin(1)).abs() < 1e-12);
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let phi = SurfaceFn::constant(2, 3.0);
        let w = WPoint::new(2, vec![0.1, -0.2, 0.3], 0.4);
        let g = intrinsic_gradient(&phi, &w, 1e-5).unwrap();
        assert!(g.iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn bv_gradient_matches_power_law() {
        // ∇^φφ(y,t) = c_α t^{2α−1} = 12·√t at α = 0.75.
        let phi = SurfaceFn::bigolin_vittone(0.75);
        for t in [0.1, 0.25, 0.5, 1.0] {
            let w = WPoint::new(1, vec![0.0], t);
            let g = intrinsic_gradient(&phi, &w, 1e-5).unwrap();
            let want = 12.0 * t.sqrt();
            assert!(
                (g[0] - want).abs() <= 1e-4 * want,
                "t={t}: got {} want {want}",
                g[0]
            );
        }
    }

    #[test]
    fn linear_flag_gradient_is_slope() {
        let profile =
            PiecewiseLinear::new(vec![(-8.0, 0.0), (-4.0, -2.0), (4.0, 2.0), (8.0, 0.0)]).unwrap();
        let phi = SurfaceFn::flag(profile);
        // Slope 0.5 region around the origin.
        let w = WPoint::new(1, vec![0.3], 5.0);
        let g = intrinsic_gradient(&phi, &w, 1e-5).unwrap();
        assert!((g[0] - 0.5).abs() < 1e-9, "got {}", g[0]);
    }

    #[test]
    fn normal_unit_and_value() {
        let phi = SurfaceFn::bigolin_vittone(0.75);
        let w = WPoint::new(1, vec![0.0], 1.0);
        let nu = normal(&phi, &w, 1e-5).unwrap();
        let norm: f64 = nu.iter().map(|c| c * c).sum::<f64>();
        assert!((norm - 1.0).abs() < 1e-12);
        let scale = (145.0f64).sqrt();
        assert!((nu[0] + 1.0 / scale).abs() < 1e-4);
        assert!((nu[1] - 12.0 / scale).abs() < 1e-4);
    }

    #[test]
    fn lip_estimate_zero_for_constant() {
        let phi = SurfaceFn::constant(1, 4.0);
        let pairs = vec![
            (WPoint::new(1, vec![0.0], 0.0), WPoint::new(1, vec![1.0], 0.5)),
            (WPoint::new(1, vec![-1.0], 0.2), WPoint::new(1, vec![2.0], -0.4)),
        ];
        assert!(lip_estimate(&phi, &pairs).unwrap() < 1e-12);
    }

    #[test]
    fn rescale_constant_and_holder_scaling() {
        let phi = SurfaceFn::constant(1, 3.0);
        let r = 4.0;
        let phir = rescale(&phi, r);
        let w = WPoint::new(1, vec![0.5], 0.25);
        assert!((phir.eval(&w) - 3.0 / r).abs() < 1e-12);
        // Declared Hölder constant scales by r^α.
        let bv = SurfaceFn::bigolin_vittone(0.75);
        let bvr = rescale(&bv, 0.25);
        assert!((bvr.declared_h - bv.declared_h * 0.25f64.powf(bv.declared_alpha)).abs() < 1e-12);
    }

    #[test]
    fn rescaled_graph_is_dilated_graph() {
        // Φ_r(δ_{1/r} w) should equal δ_{1/r}(Φ(w)).
        let phi = SurfaceFn::bigolin_vittone(0.75);
        let r = 0.5;
        let phir = rescale(&phi, r);
        let w = WPoint::new(1, vec![0.3], 0.8);
        let p = graph_map(&phi, &w).unwrap().p;
        let w_scaled = split(&dilate(&w.embed(), 1.0 / r)).0;
        let pr = graph_map(&phir, &w_scaled).unwrap().p;
        assert!(pr.coord_distance(&dilate(&p, 1.0 / r)) < 1e-12);
    }

    #[test]
    fn nearest_point_recovers_on_graph_query() {
        let phi = SurfaceFn::bigolin_vittone(0.75);
        let w = WPoint::new(1, vec![0.2], 0.7);
        let z = graph_map(&phi, &w).unwrap().p;
        let (w_hat, d) = nearest_point(&phi, &z, &w, 0.3, &NearestParams::default()).unwrap();
        assert!(d < 1e-6, "distance {d}");
        assert!((w_hat.y[0] - 0.2).abs() < 1e-3 && (w_hat.t - 0.7).abs() < 1e-2);
    }

    #[test]
    fn nearest_point_horizontal_offset() {
        // z = (d, 0, 0): distance to the plane {x₁=0} is |d|.
        let phi = SurfaceFn::constant(1, 0.0);
        let z = HPoint::new(1, vec![0.35, 0.0], 0.0);
        let (_, d) = nearest_point(&phi, &z, &WPoint::origin(1), 1.0, &NearestParams::default())
            .unwrap();
        assert!((d - 0.35).abs() < 1e-5, "distance {d}");
    }

    #[test]
    fn translation_identity_on_random_pairs() {
        // Φ(π_𝕎(p·w)) = p·Φ^(p⁻¹)(w).
        let phi = SurfaceFn::bigolin_vittone(0.75);
        let mut rng = crate::sampling::rng(7);
        for _ in 0..200 {
            let w0 = crate::sampling::random_wpoint(&mut rng, 1, 1.0);
            let p = graph_map(&phi, &w0).unwrap().p;
            let w = crate::sampling::random_wpoint(&mut rng, 1, 1.0);
            let lhs = graph_map(&phi, &split(&group_mul(&p, &w.embed())).0).unwrap().p;
            let tv = translate_fn(&phi, &p, &w);
            let rhs = group_mul(&p, &group_mul(&w.embed(), &v_point(1, tv)));
            assert!(
                lhs.coord_distance(&rhs) < 1e-9,
                "residual {}",
                lhs.coord_distance(&rhs)
            );
        }
    }

    #[test]
    fn translated_graph_is_left_translate() {
        // Graph of φ^(p⁻¹) = p⁻¹·Φ(𝕎): check a sample of points.
        let phi = SurfaceFn::bigolin_vittone(0.75);
        let w0 = WPoint::new(1, vec![0.1], 0.6);
        let p = graph_map(&phi, &w0).unwrap().p;
        let w = WPoint::new(1, vec![-0.4], 0.8);
        let tv = translate_fn(&phi, &p, &w);
        let cand = group_mul(&w.embed(), &v_point(1, tv));
        // cand should lie on p⁻¹·S: p·cand on S.
        let on_s = group_mul(&p, &cand);
        let (wpart, vpart) = split(&on_s);
        assert!((vpart - phi.eval(&wpart)).abs() < 1e-9);
        let _ = koranyi_norm(&group_inv(&p));
    }
}
