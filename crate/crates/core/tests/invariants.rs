use boundary_growth::ball::{ball_kernel, BallPoint};
use boundary_growth::halfspace::{extend, lower_bound_check};
use boundary_growth::harness::{growth_order_estimate, verify_nt1, NT_APERTURES, verify_theorem1_converse, verify_theorem1_forward, VerificationCase};
use boundary_growth::measures::{dilate, m_profile};
use boundary_growth::mellin::{k_hat_closed, log_convolve, squeeze_g, weighted_moment, LogLineFunction, Side};
use boundary_growth::quad::log_grid;
use boundary_growth::specfun::{gamma, sphere_area};
use boundary_growth::{
    ball_mass, kappa_n, normal_trace_convolution, normal_trace_direct, power_law_measure, tauberian_constant,
    BoundaryMeasure, Dimension, HalfSpacePoint,
};
use proptest::prelude::*;

fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Power law plus atom plus off-center patch in `R^3`, `R^2` boundary.
fn mixture(alpha: f64, b: f64, r_max: f64, atom: f64, density: f64) -> BoundaryMeasure {
    let n = dim(3);
    power_law_measure(alpha, b, n, r_max)
        .unwrap()
        .combine(&BoundaryMeasure::atom_at_origin(n, atom).unwrap())
        .unwrap()
        .combine(&BoundaryMeasure::patch(n, vec![-0.3, 0.1], vec![0.4, 0.9], density).unwrap())
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gamma_recursion(x in 0.5f64..20.0) {
        prop_assert!(rel(gamma(x + 1.0).unwrap(), x * gamma(x).unwrap()) < 1e-12);
    }

    #[test]
    fn dilation_consistency(r in 1e-3f64..1e3, rho in 1e-3f64..10.0, alpha in -0.9f64..1.9) {
        let mu = mixture(alpha, 1.0, 2.0, 0.5, 3.0);
        let origin = [0.0, 0.0];
        let lhs = ball_mass(&dilate(&mu, r).unwrap(), &origin, rho).unwrap();
        let rhs = ball_mass(&mu, &origin, r * rho).unwrap() / (r * r);
        prop_assert!(rel(lhs, rhs) < 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn power_law_exactness(alpha in -0.9f64..1.9, b in 0.1f64..10.0, frac in 1e-6f64..1.0) {
        let mu = power_law_measure(alpha, b, dim(3), 2.0).unwrap();
        let r = 2.0 * frac;
        prop_assert!(rel(m_profile(&mu, r).unwrap() * r.powf(alpha), b) < 1e-13);
    }

    #[test]
    fn cumulative_is_monotone(alpha in -0.9f64..1.9, t1 in 1e-4f64..1.0, step in 1.0f64..3.0) {
        let mu = mixture(alpha, 1.0, 1.0, 0.2, 1.0);
        let origin = [0.0, 0.0];
        prop_assert!(ball_mass(&mu, &origin, t1).unwrap() <= ball_mass(&mu, &origin, t1 * step).unwrap());
    }

    #[test]
    fn additivity(alpha in -0.9f64..1.9, r in 1e-3f64..3.0, cx in -0.5f64..0.5) {
        let parts = [
            power_law_measure(alpha, 1.0, dim(3), 1.0).unwrap(),
            BoundaryMeasure::atom(dim(3), vec![0.2, -0.1], 0.7).unwrap(),
            BoundaryMeasure::patch(dim(3), vec![-0.3, 0.1], vec![0.4, 0.9], 2.0).unwrap(),
        ];
        let whole = parts[0].combine(&parts[1]).unwrap().combine(&parts[2]).unwrap();
        let center = [cx, 0.0];
        let sum: f64 = parts.iter().map(|p| ball_mass(p, &center, r).unwrap()).sum();
        prop_assert!(rel(ball_mass(&whole, &center, r).unwrap(), sum) < 1e-15);
    }

    #[test]
    fn trace_equivalence(alpha in -0.9f64..1.9, atom in 0.0f64..2.0, lt in -4.0f64..0.0) {
        let n = dim(3);
        let mut mu = power_law_measure(alpha, 1.0, n, 1.0).unwrap();
        if atom > 0.0 {
            mu = mu.combine(&BoundaryMeasure::atom_at_origin(n, atom).unwrap()).unwrap();
        }
        let t = 10f64.powf(lt);
        let a = normal_trace_direct(&mu, t).unwrap();
        let b = normal_trace_convolution(&mu, t).unwrap();
        prop_assert!(rel(a, b) < 1e-9);
    }

    #[test]
    fn positivity_and_lower_bound(alpha in -0.9f64..1.9, x in -2.0f64..2.0, lt in -4.0f64..1.0) {
        let mu = mixture(alpha, 1.0, 1.0, 0.1, 1.0);
        let t = 10f64.powf(lt);
        prop_assert!(extend(&mu, &HalfSpacePoint::new(vec![x, 0.3], t).unwrap()).unwrap() > 0.0);
        prop_assert!(lower_bound_check(&mu, t).unwrap().ok);
    }

    #[test]
    fn character_eigen_identity(a in 0.1f64..5.0, w in 1.05f64..10.0, alpha in -0.5f64..1.0, lt in -3.0f64..3.0) {
        let g = LogLineFunction::indicator(a, a * w).unwrap();
        let f = LogLineFunction::character(alpha);
        let t = 10f64.powf(lt);
        let moment = weighted_moment(&g, -alpha).unwrap();
        prop_assert!(rel(log_convolve(&f, &g, t).unwrap() / t.powf(alpha), moment) < 1e-9);
    }

    #[test]
    fn young_bound(alpha in -0.5f64..1.0, c in 0.1f64..3.0, a in 0.2f64..2.0, lt in -3.0f64..3.0) {
        // f = c t^alpha min(1, t), so sup |f / F_alpha| = c
        let f = LogLineFunction::new("f", boundary_growth::mellin::Integrability::LinfLogWeighted(alpha), (0.0, f64::INFINITY), vec![1.0], move |t: f64| c * t.powf(alpha) * t.min(1.0)).unwrap();
        let g = LogLineFunction::boxcar(a, 2.0 * a, 1.5).unwrap();
        let t = 10f64.powf(lt);
        let bound = c * weighted_moment(&g, -alpha).unwrap();
        prop_assert!(log_convolve(&f, &g, t).unwrap().abs() / t.powf(alpha) <= bound * (1.0 + 1e-9));
    }

    #[test]
    fn k_hat_conjugate_symmetry(y in 0.0f64..20.0, alpha in -0.9f64..2.0, n in 3u32..6) {
        let p = k_hat_closed(y, alpha, dim(n)).unwrap();
        let m = k_hat_closed(-y, alpha, dim(n)).unwrap();
        prop_assert!((p - m.conj()).norm() <= 1e-14 * p.norm().max(1e-300));
    }

    #[test]
    fn ball_kernel_shape(r in 0.0f64..0.999, th in 0.0f64..3.14, ph in 0.0f64..6.28) {
        let y = BallPoint::new(vec![r * ph.cos() * th.sin(), r * ph.sin() * th.sin(), r * th.cos()]).unwrap();
        let n = dim(3);
        for zeta in [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, -0.6, 0.8]] {
            let k = ball_kernel(&zeta, &y, n);
            prop_assert!(k > 0.0);
            let dist = zeta.iter().zip(&y.y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let ratio = k / (kappa_n(n) * y.boundary_distance() / dist.powi(3));
            prop_assert!(rel(ratio, 0.5 * (1.0 + r)) < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn growth_order_stays_in_range(alpha in -0.9f64..1.9, atom in 0.0f64..1.0) {
        let n = dim(3);
        let mut mu = power_law_measure(alpha, 1.0, n, 1.0).unwrap();
        if atom > 0.5 {
            mu = mu.combine(&BoundaryMeasure::atom_at_origin(n, atom).unwrap()).unwrap();
        }
        let samples: Vec<(f64, f64)> = log_grid(1e-1, 1e-5, 13)
            .into_iter()
            .map(|t| (t, normal_trace_convolution(&mu, t).unwrap()))
            .collect();
        let g = growth_order_estimate(&samples, n).unwrap();
        prop_assert!((-1.0..=2.0).contains(&g.order));
    }

    #[test]
    fn limit_transport(alpha in -0.5f64..1.5, a in 0.5f64..2.0) {
        // f = u(0, t) of a power law, f t^alpha -> 1 / C_alpha
        let n = dim(3);
        let mu = power_law_measure(alpha, 1.0, n, 1.0).unwrap();
        let f = LogLineFunction::new("u", boundary_growth::mellin::Integrability::LinfLogWeighted(-alpha), (0.0, f64::INFINITY), vec![1.0], move |t: f64| normal_trace_convolution(&mu, t).unwrap_or(f64::NAN)).unwrap();
        let g = LogLineFunction::indicator(a, 2.0 * a).unwrap();
        let t = 1e-7;
        let limit = weighted_moment(&g, alpha).unwrap() / tauberian_constant(alpha, n).unwrap();
        prop_assert!(rel(log_convolve(&f, &g, t).unwrap() * t.powf(alpha), limit) < 2e-3);
    }

    #[test]
    fn nontangential_implies_normal(density in 0.1f64..5.0, offset in -0.5f64..0.5, atom in 0.0f64..1.0) {
        let n = dim(3);
        let mut mu = BoundaryMeasure::patch(n, vec![-1.0, -1.0 + offset], vec![1.0, 1.5], density).unwrap();
        if atom > 0.5 {
            mu = mu.combine(&BoundaryMeasure::atom(n, vec![0.0, 0.0], atom).unwrap()).unwrap();
        }
        let r = verify_nt1(&mu, &NT_APERTURES, &[2.0], &log_grid(1e-2, 1e-5, 10)).unwrap();
        prop_assert!(!r.nt_exists || r.normal_exists);
        prop_assert!(r.agree, "{}", r.diagnostics);
        prop_assert_eq!(r.nt_exists, atom <= 0.5);
    }
}

#[test]
fn kappa_and_sphere_area() {
    for n in 2..=8 {
        assert!((kappa_n(dim(n)) * sphere_area(n - 1) - 2.0).abs() < 1e-12);
    }
}

#[test]
fn squeeze_moments_tend_to_one() {
    for alpha in [-0.5, 0.0, 1.0] {
        for j in 1..=10 {
            let eps = 2f64.powi(-j);
            for side in [Side::Minus, Side::Plus] {
                let err = (weighted_moment(&squeeze_g(eps, side).unwrap(), alpha).unwrap() - 1.0).abs();
                // first order in eps, exact when alpha = 1
                assert!(err <= (alpha - 1.0f64).abs() * eps + 1e-12, "alpha={alpha} eps={eps}: {err}");
            }
        }
    }
}

#[test]
fn harmonicity_smoke() {
    let n = dim(3);
    let measures = [
        BoundaryMeasure::atom(n, vec![0.1, -0.2], 1.0).unwrap(),
        BoundaryMeasure::patch(n, vec![-0.5, -0.5], vec![0.5, 0.7], 1.0).unwrap(),
    ];
    for mu in &measures {
        for (x, y, t) in [(0.3, 0.2, 0.5), (-0.4, 0.1, 0.3), (1.0, 1.0, 1.0)] {
            let mut prev = f64::INFINITY;
            for h in [1e-1, 5e-2, 2.5e-2] {
                let u = |dx: f64, dy: f64, dt: f64| extend(mu, &HalfSpacePoint::new(vec![x + dx, y + dy], t + dt).unwrap()).unwrap();
                let lap = (u(h, 0.0, 0.0) + u(-h, 0.0, 0.0) + u(0.0, h, 0.0) + u(0.0, -h, 0.0) + u(0.0, 0.0, h) + u(0.0, 0.0, -h)
                    - 6.0 * u(0.0, 0.0, 0.0))
                    / (h * h);
                // the stencil error is O(h^2)
                assert!(lap.abs() < 0.7 * prev.max(1e-6) || lap.abs() < 1e-6, "{lap} at h = {h}");
                prev = lap.abs();
            }
        }
    }
}

#[test]
fn forward_converse_consistency() {
    for n in [2u32, 3, 4] {
        for frac in [0.25, 0.5, 0.75] {
            let alpha = -1.0 + frac * n as f64;
            let t_min = if alpha < 0.0 { 1e-5 } else { 1e-3 };
            let case = VerificationCase::new(n, alpha, 1.0, t_min);
            let forward = verify_theorem1_forward(&case).unwrap();
            assert!(forward.passed, "n={n} alpha={alpha}: {}", forward.diagnostics);
            let converse = verify_theorem1_converse(&case).unwrap();
            assert!(converse.passed, "n={n} alpha={alpha}: {}", converse.diagnostics);
            // a / b recovers 1 / C_alpha
            let a = forward.deviations[2].value / forward.c_alpha;
            assert!(rel(a, 1.0 / tauberian_constant(alpha, dim(n)).unwrap()) < case.tolerance);
        }
    }
}
