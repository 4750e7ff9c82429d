use num_complex::Complex64;
use proptest::prelude::*;
use unicrit::rays::{
    from_binary, landing_estimate_window, parameter_sample_defect, to_binary, trace_dynamical_ray, trace_parameter_ray, TraceConfig,
};
use unicrit::{AngleRational, MapParams};

fn rational() -> impl Strategy<Value = AngleRational> {
    (1u64..64, 0u64..64).prop_filter_map("proper fraction", |(q, p)| {
        (p < q).then(|| {
            let g = gcd(p, q);
            AngleRational::from_u64(p / g, q / g).unwrap()
        })
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn complementary_rays_are_conjugate(c in -2.0f64..0.25, angle in rational()) {
        let p = MapParams::new(2, Complex64::new(c, 0.0)).unwrap();
        let cfg = TraceConfig::new(4.0, 2f64.powi(-8), 4);
        let (Ok(a), Ok(b)) = (trace_dynamical_ray(&p, &angle, &cfg), trace_dynamical_ray(&p, &angle.conjugate(), &cfg)) else {
            return Ok(());
        };
        prop_assert_eq!(a.len(), b.len());
        for i in 0..a.len() {
            let (za, zb) = (a.point(i), b.point(i).conj());
            prop_assert!((za - zb).norm() <= 1e-10 * za.norm().max(1.0), "{za} vs {zb}");
        }
    }

    #[test]
    fn complementary_parameter_rays_are_conjugate(angle in rational()) {
        let cfg = TraceConfig::new(4.0, 2f64.powi(-6), 4);
        let (Ok(a), Ok(b)) = (trace_parameter_ray(2, &angle, &cfg), trace_parameter_ray(2, &angle.conjugate(), &cfg)) else {
            return Ok(());
        };
        for i in 0..a.len().min(b.len()) {
            let (za, zb) = (a.point(i), b.point(i).conj());
            prop_assert!((za - zb).norm() <= 1e-10 * za.norm().max(1.0));
        }
    }

    #[test]
    fn halving_the_step_keeps_common_samples(c in -2.0f64..0.25, angle in rational()) {
        let p = MapParams::new(2, Complex64::new(c, 0.0)).unwrap();
        let coarse_cfg = TraceConfig::new(4.0, 2f64.powi(-8), 4);
        let fine_cfg = TraceConfig::new(4.0, 2f64.powi(-8), 8);
        let (Ok(coarse), Ok(fine)) = (trace_dynamical_ray(&p, &angle, &coarse_cfg), trace_dynamical_ray(&p, &angle, &fine_cfg)) else {
            return Ok(());
        };
        let tol = 10.0 * coarse_cfg.ray_tol;
        for (i, s) in coarse.samples.iter().enumerate() {
            let j = fine.samples.iter().position(|f| f.t == s.t).expect("aligned schedules share potentials");
            let (a, b) = (coarse.point(i), fine.point(j));
            prop_assert!((a - b).norm() <= tol * a.norm().max(1.0), "t {}: {a} vs {b}", s.t);
        }
    }

    #[test]
    fn parameter_samples_satisfy_the_defining_relation(angle in rational()) {
        let Ok(ray) = trace_parameter_ray(2, &angle, &TraceConfig::new(3.0, 2f64.powi(-5), 2)) else { return Ok(()) };
        for i in 0..ray.len() {
            let (dth, dt) = parameter_sample_defect(&ray, i, 1e-12).unwrap();
            prop_assert!(dth <= 1e-9 && dt <= 1e-9, "sample {i}: {dth:e} {dt:e}");
        }
    }

    #[test]
    fn binary_records_round_trip(c in -2.0f64..0.25, angle in rational()) {
        let p = MapParams::new(2, Complex64::new(c, 0.0)).unwrap();
        let Ok(ray) = trace_dynamical_ray(&p, &angle, &TraceConfig::new(2.0, 2f64.powi(-4), 2)) else { return Ok(()) };
        prop_assert_eq!(from_binary(&to_binary(&ray)).unwrap(), ray);
    }
}

/// Misiurewicz landing points where power-law extrapolation applies.
#[test]
fn landing_windows_agree_within_reported_bound() {
    let cases: [(&str, Option<Complex64>); 4] = [
        ("1/2", Some(Complex64::new(-2.0, 0.0))),
        ("1/6", None),
        ("5/6", None),
        ("1/4", None),
    ];
    for (angle, anchor) in cases {
        let mut cfg = TraceConfig::new(4.0, 2f64.powi(-20), 2);
        cfg.anchor = anchor;
        let ray = trace_parameter_ray(2, &angle.parse().unwrap(), &cfg).unwrap();
        let a = landing_estimate_window(&ray, 8).unwrap();
        let b = landing_estimate_window(&ray, 16).unwrap();
        let gap = (a.point - b.point).norm();
        assert!(gap < b.error_bound.max(a.error_bound), "{angle}: gap {gap:e}, bounds {:e} {:e}", a.error_bound, b.error_bound);
    }
}

#[test]
fn samples_are_ordered_and_arc_is_cumulative() {
    let ray = trace_parameter_ray(2, &"1/3".parse().unwrap(), &TraceConfig::new(4.0, 2f64.powi(-10), 8)).unwrap();
    assert!(ray.samples.windows(2).all(|w| w[0].t > w[1].t));
    assert!(ray.arc_prefix.windows(2).all(|w| w[0] <= w[1]));
}
