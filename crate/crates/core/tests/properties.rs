use std::f64::consts::TAU;

use num_complex::Complex64 as C;
use proptest::prelude::*;

use corrlab::algebra::{cov0_equation, cross_ratio, MobiusMap, Polynomial, RationalMap, SpherePoint};
use corrlab::check::{random_correspondence, random_kappa};
use corrlab::correspondence::{critical_points, membership_residual, Correspondence, JCovCorrespondence};
use corrlab::dynamics::{escape_radius, green_function, in_connectedness_locus, FamilySpec};
use corrlab::hecke::{
    cross_ratio_of_rep, limit_set_sample, limit_set_sample_with_chi, normalized_parameter,
    rep_from_cross_ratio, HeckeParams,
};
use corrlab::render::GridSpec;
use corrlab::sampling::{disk_point, keyed_rng, random_mobius, random_monic};

fn complex(radius: f64) -> impl Strategy<Value = C> {
    (-radius..radius, -radius..radius).prop_map(|(re, im)| C::new(re, im))
}

fn mobius() -> impl Strategy<Value = MobiusMap> {
    any::<u64>().prop_map(|s| random_mobius(&mut keyed_rng(s, 0)))
}

fn sphere_point() -> impl Strategy<Value = SpherePoint> {
    prop_oneof![
        9 => complex(4.0).prop_map(SpherePoint::finite),
        1 => Just(SpherePoint::Infinity),
    ]
}

fn hausdorff(a: &[SpherePoint], b: &[SpherePoint]) -> f64 {
    let one_way = |x: &[SpherePoint], y: &[SpherePoint]| {
        x.iter()
            .map(|p| y.iter().map(|q| p.chordal(q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mobius_inverse_composes_to_identity(m in mobius()) {
        prop_assert!(m.compose(&m.inverse()).identity_residual() < 1e-10);
    }

    #[test]
    fn elliptic_rotation_has_finite_order(
        p in complex(3.0),
        q in complex(3.0),
        n in 2u32..9,
    ) {
        prop_assume!((p - q).norm() > 0.1);
        let m = MobiusMap::elliptic_about(p.into(), q.into(), TAU / n as f64).unwrap();
        prop_assert!(m.pow(n as i32).identity_residual() < 1e-9);
    }

    #[test]
    fn cross_ratio_is_mobius_invariant(
        m in mobius(),
        pts in prop::array::uniform4(sphere_point()),
    ) {
        for a in 0..4 {
            for b in a + 1..4 {
                prop_assume!(pts[a].chordal(&pts[b]) > 0.05);
            }
        }
        let cr = SpherePoint::finite(cross_ratio(pts[0], pts[1], pts[2], pts[3]).unwrap());
        let moved = cross_ratio(m.apply(pts[0]), m.apply(pts[1]), m.apply(pts[2]), m.apply(pts[3])).unwrap();
        prop_assert!(cr.chordal(&SpherePoint::finite(moved)) < 1e-10);
    }

    #[test]
    fn roots_satisfy_vieta(seed in any::<u64>(), degree in 2usize..9) {
        let mut rng = keyed_rng(seed, 1);
        let mut coeffs: Vec<C> = (0..=degree).map(|_| disk_point(&mut rng, 2.0)).collect();
        coeffs[degree] += C::new(1.0, 0.0);
        let p = Polynomial::new(coeffs.clone());
        let roots = p.roots(1e-12).unwrap();
        prop_assert_eq!(roots.len(), degree);
        let lead = coeffs[degree];
        let sum: C = roots.iter().sum();
        let prod: C = roots.iter().product();
        let expect_sum = -coeffs[degree - 1] / lead;
        let sign = if degree % 2 == 0 { 1.0 } else { -1.0 };
        let expect_prod = sign * coeffs[0] / lead;
        prop_assert!((sum - expect_sum).norm() <= 1e-8 * (1.0 + expect_sum.norm()));
        prop_assert!((prod - expect_prod).norm() <= 1e-8 * (1.0 + expect_prod.norm()));
    }

    #[test]
    fn cov0_equation_roots_share_the_value(seed in any::<u64>(), degree in 2usize..7, z in complex(2.0)) {
        let q = RationalMap::polynomial(random_monic(&mut keyed_rng(seed, 2), degree)).unwrap();
        let eq = cov0_equation(&q, z.into()).unwrap();
        let qz = q.num().eval(z);
        let scale = 1.0 + q.num().eval_scale(z);
        let crit = critical_points(&q).unwrap();
        let near_critical = crit.iter().any(|(c, _)| c.chordal(&z.into()) < 1e-3);
        for w in eq.roots(1e-12).unwrap() {
            prop_assert!((q.num().eval(w) - qz).norm() < 1e-8 * scale.max(q.num().eval_scale(w)));
            if !near_critical {
                prop_assert!((w - z).norm() > 1e-6);
            }
        }
    }

    #[test]
    fn forward_backward_duality(index in 0u64..10_000, z in complex(2.5)) {
        let f = random_correspondence(77, index).unwrap();
        let z = SpherePoint::finite(z);
        for w in f.forward_image(z).unwrap() {
            let back = f.backward_image(w).unwrap();
            let dist = back.iter().map(|p| p.chordal(&z)).fold(2.0, f64::min);
            prop_assert!(dist < 1e-8);
        }
    }

    #[test]
    fn forward_image_has_d_points(index in 0u64..10_000, z in complex(2.5)) {
        let f = random_correspondence(78, index).unwrap();
        let z = SpherePoint::finite(z);
        let img = f.forward_image(z).unwrap();
        prop_assert_eq!(img.len(), f.d());
    }

    #[test]
    fn fixed_points_of_cov0_are_critical(index in 0u64..10_000) {
        let f = random_correspondence(79, index).unwrap();
        let cov = JCovCorrespondence::deleted_covering(f.q().clone()).unwrap();
        for (c, _) in critical_points(f.q()).unwrap() {
            prop_assert!(membership_residual(&cov, c, c).unwrap() < 1e-8);
        }
    }

    #[test]
    fn conjugation_covariance(index in 0u64..10_000, phi in mobius(), z in complex(2.0)) {
        let f = random_correspondence(80, index).unwrap();
        let g = f.conjugate(&phi).unwrap();
        let z = SpherePoint::finite(z);
        let direct = g.forward_image(z).unwrap();
        let inv = phi.inverse();
        let through: Vec<SpherePoint> = f
            .forward_image(phi.apply(z))
            .unwrap()
            .into_iter()
            .map(|w| inv.apply(w))
            .collect();
        prop_assert_eq!(direct.len(), through.len());
        // Errors on the route through f are stretched by φ⁻¹, whose chordal
        // Lipschitz constant is at most the squared norm of its matrix.
        let stretch = phi.a.norm_sqr() + phi.b.norm_sqr() + phi.c.norm_sqr() + phi.d.norm_sqr();
        let h = hausdorff(&direct, &through);
        prop_assert!(h < 1e-8 * stretch, "hausdorff {h:e}, stretch {stretch}");
    }

    #[test]
    fn escape_radius_is_expanding(seed in any::<u64>(), degree in 2usize..6, t in 0.0..TAU, s in 1.0001f64..3.0) {
        let mut rng = keyed_rng(seed, 3);
        let f = random_monic(&mut rng, degree).scale(disk_point(&mut rng, 1.0) + C::new(1.5, 0.0));
        let r = escape_radius(&f);
        let z = C::from_polar(r * s, t);
        prop_assert!(f.eval(z).norm() > z.norm());
    }

    #[test]
    fn green_functional_equation(seed in any::<u64>(), degree in 2usize..4, z in complex(4.0)) {
        let f = random_monic(&mut keyed_rng(seed, 4), degree);
        let g = green_function(&f, z, 1000, None).unwrap();
        prop_assume!(g > 0.0);
        let gf = green_function(&f, f.eval(z), 1000, None).unwrap();
        prop_assert!((gf - degree as f64 * g).abs() < 1e-8);
    }

    #[test]
    fn multibrot_rotational_symmetry(d in 2usize..6, c in complex(1.5)) {
        let family = FamilySpec::Unicritical { d };
        let rotated = c * C::from_polar(1.0, TAU / (d as f64 - 1.0));
        let a = in_connectedness_locus(&family, c, 300, None).unwrap();
        let b = in_connectedness_locus(&family, rotated, 300, None).unwrap();
        prop_assert_eq!(a, b, "c = {}, d = {}", c, d);
    }

    #[test]
    fn parabolic_family_fixes_zero_with_unit_multiplier(a in complex(10.0)) {
        let f = FamilySpec::ParabolicCubic.polynomial(a).unwrap();
        let (v, dv) = f.eval_with_derivative(C::new(0.0, 0.0));
        prop_assert_eq!(v, C::new(0.0, 0.0));
        prop_assert_eq!(dv, C::new(1.0, 0.0));
    }

    #[test]
    fn hecke_relations_hold(seed in any::<u64>(), d in 2usize..7) {
        let kappa = random_kappa(&mut keyed_rng(seed, 5));
        let rep = rep_from_cross_ratio(&HeckeParams { d, kappa }).unwrap();
        prop_assert!(rep.relation_residual() < 1e-9);
    }

    #[test]
    fn normalized_parameter_round_trip(seed in any::<u64>(), d in 2usize..7) {
        let mut rng = keyed_rng(seed, 6);
        let kappa = random_kappa(&mut rng);
        let g = random_mobius(&mut rng);
        let x = normalized_parameter(kappa).unwrap();
        let rep = rep_from_cross_ratio(&HeckeParams { d, kappa }).unwrap();
        let tol = 1e-9 * (1.0 + x.norm());
        prop_assert!((normalized_parameter(kappa.inv()).unwrap() - x).norm() < tol);
        prop_assert!((normalized_parameter(cross_ratio_of_rep(&rep).unwrap()).unwrap() - x).norm() < tol);
        let conj = rep.conjugate(&g).unwrap();
        prop_assert!((normalized_parameter(cross_ratio_of_rep(&conj).unwrap()).unwrap() - x).norm() < tol);
    }

    #[test]
    fn grid_round_trip(
        center in complex(5.0),
        width in 0.01f64..20.0,
        nx in 1usize..300,
        ny in 1usize..300,
        i in 0usize..300,
        j in 0usize..300,
    ) {
        let grid = GridSpec::new(center, width, nx, ny).unwrap();
        let (i, j) = (i % nx, j % ny);
        prop_assert_eq!(grid.pixel_of(grid.point(i, j)), Some((i, j)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Adding `χ`-images does not change the sampled limit set beyond the
    /// sampling resolution, since `χ` normalizes the group.
    #[test]
    fn chi_extension_keeps_the_limit_set(x_re in 2.0f64..6.8, x_im in -0.5f64..0.5) {
        let kappa = corrlab::hecke::kappa_from_normalized(C::new(x_re, x_im));
        let rep = rep_from_cross_ratio(&HeckeParams { d: 2, kappa }).unwrap();
        let plain = limit_set_sample(&rep, 4000, 60, 1).unwrap();
        let with_chi = limit_set_sample_with_chi(&rep, 4000, 60, 2).unwrap();
        let h = hausdorff(&plain, &with_chi);
        prop_assert!(h < 0.05, "hausdorff {h}");
    }
}
