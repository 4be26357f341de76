//! Property tests: algebraic laws of the group layer, the splitting, the
//! model isomorphism, and the cube decomposition.

use proptest::prelude::*;

use heisrect::cubes::{phi_t_lower, t_margin_for, CubeGeometry};
use heisrect::group::{
    dilate, dist, group_inv, group_mul, koranyi_norm, model_dist, model_embed, model_inv,
    model_mul, model_norm, model_unembed, omega, split, v_point, HPoint,
};

fn any_n() -> impl Strategy<Value = usize> {
    1usize..=3
}

/// Residuals are compared relative to the size of what produced them.
fn rel(residual: f64, scale: f64) -> f64 {
    residual / scale.max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn product_is_associative(n in any_n(), seed in any::<u64>()) {
        let mut rng = heisrect::sampling::rng(seed);
        let a = heisrect::sampling::random_hpoint(&mut rng, n, 10.0);
        let b = heisrect::sampling::random_hpoint(&mut rng, n, 10.0);
        let c = heisrect::sampling::random_hpoint(&mut rng, n, 10.0);
        let lhs = group_mul(&group_mul(&a, &b), &c);
        let rhs = group_mul(&a, &group_mul(&b, &c));
        prop_assert!(rel(lhs.coord_distance(&rhs), koranyi_norm(&lhs)) < 1e-12);
    }

    #[test]
    fn inverse_and_identity(n in any_n(), seed in any::<u64>()) {
        let mut rng = heisrect::sampling::rng(seed);
        let p = heisrect::sampling::random_hpoint(&mut rng, n, 10.0);
        let e = group_mul(&p, &group_inv(&p));
        prop_assert!(koranyi_norm(&e) < 1e-9);
        let back = group_mul(&HPoint::origin(n), &p);
        prop_assert!(back.coord_distance(&p) == 0.0);
    }

    #[test]
    fn distance_is_left_invariant(n in any_n(), seed in any::<u64>()) {
        let mut rng = heisrect::sampling::rng(seed);
        let g = heisrect::sampling::random_hpoint(&mut rng, n, 10.0);
        let p = heisrect::sampling::random_hpoint(&mut rng, n, 10.0);
        let q = heisrect::sampling::random_hpoint(&mut rng, n, 10.0);
        let d0 = dist(&p, &q);
        let d1 = dist(&group_mul(&g, &p), &group_mul(&g, &q));
        prop_assert!(rel((d0 - d1).abs(), d0) < 1e-9, "d0={d0} d1={d1}");
    }

    #[test]
    fn dilation_scales_distance(n in any_n(), r in 0.1..10.0f64, seed in any::<u64>()) {
        let mut rng = heisrect::sampling::rng(seed);
        let p = heisrect::sampling::random_hpoint(&mut rng, n, 10.0);
        let q = heisrect::sampling::random_hpoint(&mut rng, n, 10.0);
        let lhs = dist(&dilate(&p, r), &dilate(&q, r));
        let rhs = r * dist(&p, &q);
        prop_assert!(rel((lhs - rhs).abs(), rhs) < 1e-9);
    }

    #[test]
    fn dilation_is_a_homomorphism(n in any_n(), r in 0.1..10.0f64, seed in any::<u64>()) {
        let mut rng = heisrect::sampling::rng(seed);
        let p = heisrect::sampling::random_hpoint(&mut rng, n, 10.0);
        let q = heisrect::sampling::random_hpoint(&mut rng, n, 10.0);
        let lhs = dilate(&group_mul(&p, &q), r);
        let rhs = group_mul(&dilate(&p, r), &dilate(&q, r));
        prop_assert!(rel(lhs.coord_distance(&rhs), koranyi_norm(&lhs)) < 1e-9);
    }

    #[test]
    fn splitting_recomposes(n in any_n(), seed in any::<u64>()) {
        let mut rng = heisrect::sampling::rng(seed);
        let p = heisrect::sampling::random_hpoint(&mut rng, n, 10.0);
        let (w, v) = split(&p);
        let back = group_mul(&w.embed(), &v_point(n, v));
        prop_assert!(rel(back.coord_distance(&p), koranyi_norm(&p)) < 1e-12);
        // The w-part has no x1 component and splitting is idempotent.
        prop_assert!(split(&w.embed()).1 == 0.0);
    }

    #[test]
    fn commutator_is_central_with_omega_charge(n in any_n(), seed in any::<u64>()) {
        let mut rng = heisrect::sampling::rng(seed);
        let a = heisrect::sampling::random_hpoint(&mut rng, n, 10.0);
        let b = heisrect::sampling::random_hpoint(&mut rng, n, 10.0);
        let lhs = group_mul(&group_mul(&group_inv(&b), &a), &b);
        let mut rhs = a.clone();
        rhs.t += omega(&a.x, &b.x);
        prop_assert!(rel(lhs.coord_distance(&rhs), koranyi_norm(&lhs)) < 1e-9);
    }

    #[test]
    fn model_embedding_is_an_isometric_homomorphism(n in any_n(), seed in any::<u64>()) {
        let mut rng = heisrect::sampling::rng(seed);
        let draw = |rng: &mut _| {
            let g = heisrect::sampling::random_gpoint_in_ball(rng, n, 2.0);
            g
        };
        let g = draw(&mut rng);
        let h = draw(&mut rng);
        // Isometry: model norm/distance match the ambient ones.
        prop_assert!(rel((model_norm(&g) - model_embed(&g).norm()).abs(), model_norm(&g)) < 1e-12);
        let d_model = model_dist(&g, &h);
        let d_ambient = dist(&model_embed(&g).embed(), &model_embed(&h).embed());
        prop_assert!(rel((d_model - d_ambient).abs(), d_model) < 1e-9);
        // Homomorphism and round-trip.
        let lhs = model_embed(&model_mul(&g, &h));
        let rhs = model_embed(&g).mul(&model_embed(&h));
        prop_assert!(rel(lhs.embed().coord_distance(&rhs.embed()), 1.0) < 1e-9);
        prop_assert!(model_unembed(&model_embed(&g)) == g);
        let e = model_mul(&g, &model_inv(&g));
        prop_assert!(model_norm(&e) < 1e-9);
    }

    #[test]
    fn cubes_nest_and_contain_their_points(n in any_n(), seed in any::<u64>(), level in 0i32..8) {
        let mut rng = heisrect::sampling::rng(seed);
        let geom = CubeGeometry { n, sigma: 0.25 };
        let g = heisrect::sampling::random_gpoint_in_ball(&mut rng, n, 2.0);
        let idx = geom.cube_of_point(&g, level);
        let (lo, hi) = geom.cube_box(&idx);
        let h = g.horizontal();
        for a in 0..geom.horizontal_dims() {
            prop_assert!(lo[a] <= h[a] && h[a] < hi[a]);
        }
        prop_assert!(lo[geom.horizontal_dims()] <= g.t && g.t < hi[geom.horizontal_dims()]);
        // The parent of the child index is the index at the coarser level.
        let child = geom.cube_of_point(&g, level + 1);
        prop_assert!(child.parent() == idx);
    }

    #[test]
    fn certified_face_gap_round_trips(g_t in 1e-9..1.0f64, z in 0.0..4.0f64) {
        // Abelian closed form and twisted inversion agree with t_margin_for.
        prop_assert!((phi_t_lower(g_t, 0.0, false) - 2.0 * g_t.sqrt()).abs() < 1e-12);
        let d = phi_t_lower(g_t, z, true);
        let back = t_margin_for(d, z, true);
        prop_assert!(rel((back - g_t).abs(), g_t) < 1e-9);
    }

    #[test]
    fn wpoint_product_stays_in_subgroup(n in any_n(), seed in any::<u64>()) {
        let mut rng = heisrect::sampling::rng(seed);
        let w1 = heisrect::sampling::random_wpoint(&mut rng, n, 10.0);
        let w2 = heisrect::sampling::random_wpoint(&mut rng, n, 10.0);
        let prod = w1.mul(&w2);
        let direct = group_mul(&w1.embed(), &w2.embed());
        prop_assert!(rel(prod.embed().coord_distance(&direct), koranyi_norm(&direct)) < 1e-12);
    }
}
