//! Vertical tangent planes and the plane correspondence oracle in ℍⁿ,
//! n ≥ 2.
//!
//! A coefficient vector D = (D₂,…,D_{2n}) (ordered like the intrinsic
//! gradient: D_j multiplies x_j) determines the linear function
//! ψ_D(x) = Σⱼ D_j x_j on 𝕎 and the vertical plane {x₁ = ψ_D(x)}. With
//! a_i = D_i, c = D_{n+1}, b_i = D_{n+i} (i = 2,…,n), the map
//!
//! ```text
//! Ψ_D(0, x₂,…,x_{2n}, t) =
//!   (ψ_D(x), x₂+b₂x_{n+1},…, x_n+b_n x_{n+1}, x_{n+1},
//!    x_{n+2}−a₂x_{n+1},…, x_{2n}−a_n x_{n+1}, t)
//! ```
//!
//! is a group homomorphism 𝕎 → ℍⁿ onto that plane — the reason
//! C^{1,α} surfaces in higher Heisenberg groups can be matched scale by
//! scale with plane pieces. The correspondence oracle reads the intrinsic
//! gradient at the base point, parametrizes the tangent plane by Ψ_D,
//! and projects onto the surface.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::builder::{CorrespondenceOracle, OracleConstants};
use crate::error::{Error, Result};
use crate::graph::{graph_map, intrinsic_gradient, nearest_point, NearestParams, SurfaceFn};
use crate::group::{
    dist, group_mul, model_embed, model_inv, model_mul, split, v_point, GPoint, HPoint, WPoint,
};

/// ψ_D(x) = Σ_{j=2}^{2n} D_j x_j on the 𝕎-coordinates y = (x₂,…,x_{2n}).
pub fn psi_d(d: &[f64], y: &[f64]) -> f64 {
    assert_eq!(d.len(), y.len(), "coefficient/coordinate length mismatch");
    d.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// The homomorphic parametrization Ψ_D: 𝕎 → ℍⁿ of the vertical plane
/// {x₁ = ψ_D(x)}.
pub fn plane_map(d: &[f64], w: &WPoint) -> HPoint {
    let n = w.n;
    assert!(n >= 2, "plane parametrizations require n >= 2");
    assert_eq!(d.len(), 2 * n - 1);
    // y[j-2] holds x_j; a_i = d[i-2] (i=2..n), b_i = d[n+i-2].
    let y = &w.y;
    let xn1 = y[n - 1]; // x_{n+1}
    let mut x = Vec::with_capacity(2 * n);
    x.push(psi_d(d, y));
    for i in 2..=n {
        x.push(y[i - 2] + d[n + i - 2] * xn1);
    }
    x.push(xn1);
    for i in 2..=n {
        x.push(y[n + i - 2] - d[i - 2] * xn1);
    }
    HPoint::new(n, x, w.t)
}

/// Graph-style parametrization of the same plane:
/// L_D(w) = w·(ψ_D(w), 0, …, 0).
pub fn l_map(d: &[f64], w: &WPoint) -> HPoint {
    group_mul(&w.embed(), &v_point(w.n, psi_d(d, &w.y)))
}

/// Distance between the two plane parametrizations at the same parameter:
/// d(Ψ_D(w), Ψ_{D′}(w)) — scales like |D−D′|^{1/2}·‖w‖ for small tilts
/// (the discrepancy is carried by the central twist).
pub fn plane_drift(d1: &[f64], d2: &[f64], w: &WPoint) -> f64 {
    dist(&plane_map(d1, w), &plane_map(d2, w))
}

/// Correspondence oracle for C^{1,α} graphs in ℍⁿ, n ≥ 2: read
/// D(p) = ∇^φφ(π_𝕎(p)), parametrize the tangent plane at p by Ψ_{D(p)},
/// and project the result onto the surface.
pub struct PlaneOracle {
    pub phi: SurfaceFn,
    pub constants: OracleConstants,
    /// Step of the numerical intrinsic gradient.
    pub grad_step: f64,
    /// Parameter window of the nearest-point search.
    pub window: f64,
    pub nearest: NearestParams,
    /// Gradient per base point, keyed by coordinates quantized at 1e−15
    /// (the f64 roundoff floor; see the flag oracle's cache note).
    cache: RefCell<HashMap<Vec<i64>, Rc<Vec<f64>>>>,
}

fn quantize_point(p: &HPoint) -> Vec<i64> {
    let mut k: Vec<i64> = p.x.iter().map(|&c| (c / 1e-15).round() as i64).collect();
    k.push((p.t / 1e-15).round() as i64);
    k
}

impl PlaneOracle {
    pub fn new(phi: SurfaceFn) -> Self {
        assert!(phi.n >= 2, "plane oracle requires n >= 2");
        let l0 = phi.declared_l;
        let constants = OracleConstants {
            l: (1.0 + l0 * l0).sqrt() + l0,
            a: phi.declared_h.max(1e-9),
            alpha: phi.declared_alpha,
        };
        PlaneOracle {
            phi,
            constants,
            grad_step: 1e-5,
            window: 0.5,
            nearest: NearestParams { coarse: 17, refine_levels: 45, tol: 1e-6 },
            cache: RefCell::new(HashMap::new()),
        }
    }

    /// D(p) = ∇^φφ(π_𝕎(p)) (cached).
    pub fn gradient_at(&self, p: &HPoint) -> Result<Rc<Vec<f64>>> {
        let key = quantize_point(p);
        if let Some(g) = self.cache.borrow().get(&key) {
            return Ok(g.clone());
        }
        let w = split(p).0;
        let g = Rc::new(intrinsic_gradient(&self.phi, &w, self.grad_step)?);
        self.cache.borrow_mut().insert(key, g.clone());
        Ok(g)
    }

    /// p·Ψ_{D(p)}(F(u)) for a model offset u (the pre-projection target).
    pub fn target(&self, p: &HPoint, u: &GPoint) -> Result<HPoint> {
        let d = self.gradient_at(p)?;
        Ok(group_mul(p, &plane_map(&d, &model_embed(u))))
    }
}

impl CorrespondenceOracle for PlaneOracle {
    fn n(&self) -> usize {
        self.phi.n
    }

    fn constants(&self) -> OracleConstants {
        self.constants
    }

    fn base_point(&self, x: &GPoint) -> Result<HPoint> {
        Ok(graph_map(&self.phi, &model_embed(x))?.p)
    }

    fn eval(&self, level: i32, x: &GPoint, p: &HPoint, v: &GPoint) -> Result<HPoint> {
        let u = model_mul(&model_inv(x), v);
        let target = self.target(p, &u)?;
        let seed = split(&target).0;
        // Scale-matched window: see the flag oracle for the rationale.
        let window = (4.0 * 2f64.powi(-level)).clamp(1e-3, self.window);
        let (w, _) = nearest_point(&self.phi, &target, &seed, window, &self.nearest)?;
        Ok(graph_map(&self.phi, &w)?.p)
    }
}

/// How far the tangent plane at p strays from the surface: for each
/// radius r, the max over sampled model offsets u in the r-ball of
/// d(p·Ψ_{D(p)}(F(u)), S). For a C^{1,α} surface this decays like
/// r^{1+α}.
pub fn plane_approx_error(
    phi: &SurfaceFn,
    w0: &WPoint,
    radii: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    let oracle = PlaneOracle::new(phi.clone());
    let p = graph_map(phi, w0)?.p;
    let mut rng = crate::sampling::rng(seed);
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r > 0.0) {
            return Err(Error::Usage("radii must be positive".into()));
        }
        let window = (4.0 * r).clamp(1e-3, 1.0);
        let params = NearestParams { coarse: 17, refine_levels: 30, tol: 1e-6 };
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let u = crate::sampling::random_gpoint_in_ball(&mut rng, phi.n, r);
            let target = oracle.target(&p, &u)?;
            let sp = split(&target).0;
            let (_, d) = nearest_point(phi, &target, &sp, window, &params)?;
            worst = worst.max(d);
        }
        out.push((r, worst));
    }
    Ok(out)
}
