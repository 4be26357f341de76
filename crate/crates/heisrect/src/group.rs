//! Arithmetic in the Heisenberg group ℍⁿ and its model groups.
//!
//! ℍⁿ is ℝ^{2n+1} with coordinates (x₁,…,x_{2n}, t) and product
//!
//! ```text
//! (x,t)·(x',t') = (x + x', t + t' + ½ Σᵢ (xᵢ x'_{n+i} − x_{n+i} x'ᵢ)),
//! ```
//!
//! the gauge norm ‖(x,t)‖ = (|x|⁴ + 16 t²)^{1/4}, the left-invariant
//! distance d(p,q) = ‖q⁻¹·p‖, and dilations δ_r(x,t) = (r x, r² t).
//!
//! The vertical subgroup 𝕎 = {x₁ = 0} carries the graphs; 𝕍 is the
//! x₁-axis. Every p factors as p = π_𝕎(p)·π_𝕍(p). 𝕎 is isometrically
//! isomorphic to a lower-dimensional model group G: the parabolic plane
//! (ℝ², +) with norm (y⁴+16t²)^{1/4} when n = 1, and ℍ^{n−1}×ℝ when
//! n ≥ 2. [`model_embed`] realizes that isomorphism.

/// A point of ℍⁿ: horizontal coordinates `x` (length 2n) and vertical `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPoint {
    pub n: usize,
    pub x: Vec<f64>,
    pub t: f64,
}

impl HPoint {
    pub fn new(n: usize, x: Vec<f64>, t: f64) -> Self {
        assert!(n >= 1, "group index must be >= 1");
        assert_eq!(x.len(), 2 * n, "horizontal coordinate vector must have length 2n");
        HPoint { n, x, t }
    }

    /// Group identity (the origin).
    pub fn origin(n: usize) -> Self {
        HPoint::new(n, vec![0.0; 2 * n], 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().all(|c| c.is_finite())
    }

    /// Max-abs difference of coordinates, as a residual measure.
    pub fn coord_distance(&self, other: &HPoint) -> f64 {
        assert_eq!(self.n, other.n, "arity mismatch");
        let mut d: f64 = (self.t - other.t).abs();
        for i in 0..2 * self.n {
            d = d.max((self.x[i] - other.x[i]).abs());
        }
        d
    }
}

/// Symplectic form ω(a, b) = Σ_{i=1}^{n} (aᵢ b_{n+i} − bᵢ a_{n+i}) on the
/// horizontal coordinates; the group twist is ½ω and the commutator of two
/// elements is the vertical element (0,…,0, ω(x_a, x_b)).
pub fn omega(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "arity mismatch");
    assert_eq!(a.len() % 2, 0, "horizontal vectors have even length");
    let n = a.len() / 2;
    let mut s = 0.0;
    for i in 0..n {
        s += a[i] * b[n + i] - b[i] * a[n + i];
    }
    s
}

/// Group product p·q.
pub fn group_mul(p: &HPoint, q: &HPoint) -> HPoint {
    assert_eq!(p.n, q.n, "arity mismatch");
    let x: Vec<f64> = p.x.iter().zip(&q.x).map(|(a, b)| a + b).collect();
    let t = p.t + q.t + 0.5 * omega(&p.x, &q.x);
    HPoint { n: p.n, x, t }
}

/// Group inverse p⁻¹ = (−x, −t).
pub fn group_inv(p: &HPoint) -> HPoint {
    HPoint {
        n: p.n,
        x: p.x.iter().map(|c| -c).collect(),
        t: -p.t,
    }
}

/// Gauge norm ‖(x,t)‖ = (|x|⁴ + 16 t²)^{1/4}.
pub fn koranyi_norm(p: &HPoint) -> f64 {
    let h2: f64 = p.x.iter().map(|c| c * c).sum();
    (h2 * h2 + 16.0 * p.t * p.t).sqrt().sqrt()
}

/// Left-invariant distance d(p,q) = ‖q⁻¹·p‖.
pub fn dist(p: &HPoint, q: &HPoint) -> f64 {
    koranyi_norm(&group_mul(&group_inv(q), p))
}

/// Dilation δ_r(x,t) = (r x, r² t); a group automorphism scaling d by r.
pub fn dilate(p: &HPoint, r: f64) -> HPoint {
    assert!(r > 0.0, "dilation factor must be positive");
    HPoint {
        n: p.n,
        x: p.x.iter().map(|c| r * c).collect(),
        t: r * r * p.t,
    }
}

/// A point of the vertical subgroup 𝕎 = {x₁ = 0}: coordinates
/// y = (x₂,…,x_{2n}) and t.
#[derive(Debug, Clone, PartialEq)]
pub struct WPoint {
    pub n: usize,
    pub y: Vec<f64>,
    pub t: f64,
}

impl WPoint {
    pub fn new(n: usize, y: Vec<f64>, t: f64) -> Self {
        assert!(n >= 1);
        assert_eq!(y.len(), 2 * n - 1, "w-coordinates must have length 2n-1");
        WPoint { n, y, t }
    }

    pub fn origin(n: usize) -> Self {
        WPoint::new(n, vec![0.0; 2 * n - 1], 0.0)
    }

    /// Lossless embedding into ℍⁿ with x₁ = 0.
    pub fn embed(&self) -> HPoint {
        let mut x = Vec::with_capacity(2 * self.n);
        x.push(0.0);
        x.extend_from_slice(&self.y);
        HPoint { n: self.n, x, t: self.t }
    }

    /// Product inside the subgroup 𝕎.
    pub fn mul(&self, other: &WPoint) -> WPoint {
        let (w, v) = split(&group_mul(&self.embed(), &other.embed()));
        debug_assert!(v.abs() < 1e-14);
        w
    }

    pub fn norm(&self) -> f64 {
        koranyi_norm(&self.embed())
    }
}

/// Splitting p = π_𝕎(p)·π_𝕍(p): returns
/// π_𝕎(p) = (0, x₂,…,x_{2n}, t + ½ x₁ x_{n+1}) and π_𝕍(p) = x₁.
pub fn split(p: &HPoint) -> (WPoint, f64) {
    let n = p.n;
    let y = p.x[1..].to_vec();
    let t = p.t + 0.5 * p.x[0] * p.x[n];
    (WPoint { n, y, t }, p.x[0])
}

/// A horizontal element (v, 0, …, 0) of 𝕍.
pub fn v_point(n: usize, v: f64) -> HPoint {
    let mut x = vec![0.0; 2 * n];
    x[0] = v;
    HPoint { n, x, t: 0.0 }
}

/// A point of the model group G:
/// for n = 1 the parabolic plane (coordinates (s, t), z empty, abelian);
/// for n ≥ 2 the group ℍ^{n−1}×ℝ with coordinates ((z, t), s),
/// z ∈ ℝ^{2n−2}, product twisting t by ½ω(z, z'), and norm
/// (|(z,s)|⁴ + 16 t²)^{1/4}.
#[derive(Debug, Clone, PartialEq)]
pub struct GPoint {
    pub n: usize,
    pub z: Vec<f64>,
    pub t: f64,
    pub s: f64,
}

impl GPoint {
    pub fn new(n: usize, z: Vec<f64>, t: f64, s: f64) -> Self {
        assert!(n >= 1);
        assert_eq!(z.len(), 2 * (n - 1), "z must have length 2(n-1)");
        GPoint { n, z, t, s }
    }

    pub fn origin(n: usize) -> Self {
        GPoint::new(n, vec![0.0; 2 * (n - 1)], 0.0, 0.0)
    }

    /// Parabolic-plane point (n = 1).
    pub fn plane(s: f64, t: f64) -> Self {
        GPoint { n: 1, z: vec![], t, s }
    }

    /// Horizontal coordinates in a fixed axis order (z₁,…,z_{2n−2}, s);
    /// the order used by the cube decomposition.
    pub fn horizontal(&self) -> Vec<f64> {
        let mut h = self.z.clone();
        h.push(self.s);
        h
    }

    pub fn from_horizontal(n: usize, h: &[f64], t: f64) -> Self {
        assert_eq!(h.len(), 2 * n - 1);
        GPoint { n, z: h[..2 * n - 2].to_vec(), t, s: h[2 * n - 2] }
    }
}

/// Model-group product.
pub fn model_mul(g: &GPoint, h: &GPoint) -> GPoint {
    assert_eq!(g.n, h.n, "arity mismatch");
    let z: Vec<f64> = g.z.iter().zip(&h.z).map(|(a, b)| a + b).collect();
    let twist = if g.n >= 2 { 0.5 * omega(&g.z, &h.z) } else { 0.0 };
    GPoint { n: g.n, z, t: g.t + h.t + twist, s: g.s + h.s }
}

/// Model-group inverse.
pub fn model_inv(g: &GPoint) -> GPoint {
    GPoint {
        n: g.n,
        z: g.z.iter().map(|c| -c).collect(),
        t: -g.t,
        s: -g.s,
    }
}

/// Model-group norm (|(z,s)|⁴ + 16 t²)^{1/4}.
pub fn model_norm(g: &GPoint) -> f64 {
    let h2: f64 = g.z.iter().map(|c| c * c).sum::<f64>() + g.s * g.s;
    (h2 * h2 + 16.0 * g.t * g.t).sqrt().sqrt()
}

/// Model-group distance d_G(g, h) = ‖h⁻¹·g‖.
pub fn model_dist(g: &GPoint, h: &GPoint) -> f64 {
    model_norm(&model_mul(&model_inv(h), g))
}

/// Model-group dilation (r z, r² t, r s).
pub fn model_dilate(g: &GPoint, r: f64) -> GPoint {
    assert!(r > 0.0);
    GPoint {
        n: g.n,
        z: g.z.iter().map(|c| r * c).collect(),
        t: r * r * g.t,
        s: r * g.s,
    }
}

/// The isometric isomorphism F: G → 𝕎.
///
/// For n ≥ 2: ((z₁,…,z_{2n−2}, t), s) ↦ (0, z₁,…,z_{n−1}, s, z_n,…,z_{2n−2}, t),
/// i.e. s lands in the x_{n+1} slot. For n = 1: (s, t) ↦ (0, s, t).
pub fn model_embed(g: &GPoint) -> WPoint {
    let n = g.n;
    let mut y = Vec::with_capacity(2 * n - 1);
    y.extend_from_slice(&g.z[..n - 1]);
    y.push(g.s);
    y.extend_from_slice(&g.z[n - 1..]);
    WPoint { n, y, t: g.t }
}

/// Inverse of [`model_embed`].
pub fn model_unembed(w: &WPoint) -> GPoint {
    let n = w.n;
    let mut z = Vec::with_capacity(2 * (n - 1));
    z.extend_from_slice(&w.y[..n - 1]);
    z.extend_from_slice(&w.y[n..]);
    GPoint { n, z, t: w.t, s: w.y[n - 1] }
}
