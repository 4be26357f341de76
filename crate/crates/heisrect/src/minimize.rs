//! Deterministic derivative-free minimization on a coordinate box:
//! a coarse grid scan followed by dyadic pattern-search refinement.
//!
//! Used for nearest-point projection onto graphs and for set-distance
//! estimates. Ties are broken toward the lexicographically smallest
//! point so results are reproducible bit-for-bit.

/// Outcome of a grid minimization.
#[derive(Debug, Clone)]
pub struct GridMin {
    pub point: Vec<f64>,
    pub value: f64,
    /// Final per-axis step of the refinement (resolution certificate).
    pub final_step: Vec<f64>,
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Replace the current best by (value, point) if strictly better, or equal
/// with a lexicographically smaller point.
fn consider(best: &mut (f64, Vec<f64>), value: f64, point: &[f64]) {
    if value < best.0 || (value == best.0 && lex_less(point, &best.1)) {
        best.0 = value;
        best.1 = point.to_vec();
    }
}

/// Minimize `f` over the box `center ± half_width` (per axis).
///
/// `coarse` grid points per axis (>= 2), then `refine_levels` rounds of
/// pattern search: at each round the step halves and the search walks to
/// the best point of the 3^d stencil, up to `moves_per_level` moves.
pub fn grid_minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    center: &[f64],
    half_width: &[f64],
    coarse: usize,
    refine_levels: usize,
) -> GridMin {
    let d = center.len();
    assert_eq!(half_width.len(), d);
    assert!(coarse >= 2);
    let moves_per_level = 40usize;

    // Coarse scan (inclusive endpoints).
    let spacing: Vec<f64> = half_width.iter().map(|h| 2.0 * h / (coarse as f64 - 1.0)).collect();
    let mut idx = vec![0usize; d];
    let mut point = vec![0.0f64; d];
    let mut best = (f64::INFINITY, vec![f64::INFINITY; d]);
    loop {
        for a in 0..d {
            point[a] = center[a] - half_width[a] + spacing[a] * idx[a] as f64;
        }
        let v = f(&point);
        if v.is_finite() {
            consider(&mut best, v, &point);
        }
        // Odometer increment.
        let mut a = 0;
        loop {
            if a == d {
                // Full sweep done.
                idx.clear();
                break;
            }
            idx[a] += 1;
            if idx[a] < coarse {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
        if idx.is_empty() {
            break;
        }
    }

    // Pattern-search refinement from the coarse best.
    let mut step: Vec<f64> = spacing.clone();
    for _ in 0..refine_levels {
        for s in step.iter_mut() {
            *s *= 0.5;
        }
        let mut moves = 0;
        loop {
            let mut improved = false;
            let mut local = best.clone();
            let mut offs = vec![-1i32; d];
            // 3^d stencil around the current best.
            'stencil: loop {
                if offs.iter().any(|&o| o != 0) {
                    for a in 0..d {
                        let lo = center[a] - half_width[a];
                        let hi = center[a] + half_width[a];
                        point[a] = (best.1[a] + offs[a] as f64 * step[a]).clamp(lo, hi);
                    }
                    let v = f(&point);
                    if v.is_finite() {
                        let before = local.0;
                        consider(&mut local, v, &point);
                        if local.0 < before {
                            improved = true;
                        }
                    }
                }
                let mut a = 0;
                loop {
                    if a == d {
                        break 'stencil;
                    }
                    offs[a] += 1;
                    if offs[a] <= 1 {
                        break;
                    }
                    offs[a] = -1;
                    a += 1;
                }
            }
            best = local;
            moves += 1;
            if !improved || moves >= moves_per_level {
                break;
            }
        }
    }

    GridMin { point: best.1, value: best.0, final_step: step }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let f = |p: &[f64]| (p[0] - 0.3).powi(2) + (p[1] + 0.4).powi(2);
        let m = grid_minimize(f, &[0.0, 0.0], &[1.0, 1.0], 9, 30);
        assert!((m.point[0] - 0.3).abs() < 1e-7);
        assert!((m.point[1] + 0.4).abs() < 1e-7);
        assert!(m.value < 1e-12);
    }

    #[test]
    fn deterministic_tie_break() {
        // Flat function: must return the lexicographically smallest grid point.
        let m = grid_minimize(|_| 1.0, &[0.0], &[1.0], 5, 3);
        assert_eq!(m.point[0], -1.0);
    }
}
