//! Exponent and envelope fitting: log–log regression slopes and the
//! two-parameter (L, A) envelope fit for approximate-isometry audits.

/// Ordinary least-squares slope of log₂(y) against log₂(x).
///
/// Pairs with non-positive or non-finite entries are skipped. Returns
/// `None` if fewer than two usable pairs remain.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(&x, &y)| (x.log2(), y.log2()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx: f64 = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my: f64 = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Fit the smallest additive constant Â, over a 64-point log grid of
/// multiplicative constants L̂ ∈ [1, l_max], such that
///
/// ```text
/// L̂⁻¹·d_G − Â·scale ≤ d_M ≤ L̂·d_G + Â·scale
/// ```
///
/// holds for every sampled pair (d_G, d_M). Returns the (L̂, Â) pair
/// minimizing Â (ties resolved toward smaller L̂).
pub fn envelope_fit(pairs: &[(f64, f64)], scale: f64, l_max: f64) -> (f64, f64) {
    assert!(scale > 0.0 && l_max >= 1.0);
    let mut best = (1.0, f64::INFINITY);
    let grid = 64usize;
    for k in 0..grid {
        let l = if grid == 1 {
            1.0
        } else {
            (l_max.ln() * k as f64 / (grid as f64 - 1.0)).exp()
        };
        let mut a: f64 = 0.0;
        for &(dg, dm) in pairs {
            let need = (dm - l * dg).max(dg / l - dm).max(0.0);
            a = a.max(need / scale);
        }
        if a < best.1 {
            best = (l, a);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let xs: Vec<f64> = (1..8).map(|k| 2f64.powi(-k)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(1.5)).collect();
        let s = loglog_slope(&xs, &ys).unwrap();
        assert!((s - 1.5).abs() < 1e-10);
    }

    #[test]
    fn envelope_recovers_pure_scaling() {
        // d_M = 2·d_G exactly: the fit should find L̂ ≈ 2 with Â ≈ 0.
        let pairs: Vec<(f64, f64)> = (1..50).map(|k| (k as f64 * 0.01, k as f64 * 0.02)).collect();
        let (l, a) = envelope_fit(&pairs, 1.0, 8.0);
        assert!((l - 2.0).abs() < 0.1, "l = {l}");
        assert!(a < 0.02, "a = {a}");
    }
}
