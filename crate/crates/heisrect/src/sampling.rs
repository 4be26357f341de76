//! Seeded, reproducible random sampling of group elements.
//!
//! All randomized sweeps in the crate draw from a ChaCha8 stream seeded
//! from configuration, so identical configs reproduce identical samples.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::group::{model_norm, GPoint, HPoint, WPoint};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

/// Random point of ℍⁿ with coordinates in [−c, c] (t included).
pub fn random_hpoint(rng: &mut ChaCha8Rng, n: usize, c: f64) -> HPoint {
    let x = (0..2 * n).map(|_| uniform(rng, -c, c)).collect();
    HPoint::new(n, x, uniform(rng, -c, c))
}

/// Random point of 𝕎 with coordinates in [−c, c].
pub fn random_wpoint(rng: &mut ChaCha8Rng, n: usize, c: f64) -> WPoint {
    let y = (0..2 * n - 1).map(|_| uniform(rng, -c, c)).collect();
    WPoint::new(n, y, uniform(rng, -c, c))
}

/// Random model-group point in the metric ball of radius `r` about the
/// identity (rejection sampling from the natural anisotropic box).
pub fn random_gpoint_in_ball(rng: &mut ChaCha8Rng, n: usize, r: f64) -> GPoint {
    loop {
        let z = (0..2 * (n - 1)).map(|_| uniform(rng, -r, r)).collect();
        let t = uniform(rng, -r * r / 4.0, r * r / 4.0);
        let s = uniform(rng, -r, r);
        let g = GPoint::new(n, z, t, s);
        if model_norm(&g) <= r {
            return g;
        }
    }
}
