use num_complex::Complex64;
use proptest::prelude::*;
use unicrit::dynamics::{iterate, iterate_jet, orbit_derivative};
use unicrit::probes::{membership_grid, Cell, Region};
use unicrit::{AngleRational, Error, Jet, MapParams, Plane, Variable};

fn disk(r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(m, a)| Complex64::from_polar(m, a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn orbit_derivative_factors_along_the_orbit(d in 2u32..5, c in disk(2.0), n in 0usize..8, m in 0usize..8) {
        let p = MapParams::new(d, c).unwrap();
        let (Ok(whole), Ok(head)) = (orbit_derivative(&p, n + m), orbit_derivative(&p, n)) else {
            return Ok(());
        };
        // c = z_0, so the orbit shifted by n starts at f^n(c)
        let zn = iterate(&p, c, n).unwrap();
        let Ok(tail) = iterate_jet(&p, Jet::variable(zn), m, Variable::Z) else { return Ok(()) };
        let product = tail.der * head.value;
        prop_assume!(whole.value.is_normal() && product.is_normal());
        prop_assert!((whole.value - product).norm() <= 1e-12 * whole.value.norm(),
            "{} vs {}", whole.value, product);
    }

    #[test]
    fn z_jet_matches_central_differences(c in disk(2.0), z0 in disk(2.0), n in 1usize..=10) {
        let p = MapParams::new(2, c).unwrap();
        let Ok(jet) = iterate_jet(&p, Jet::variable(z0), n, Variable::Z) else { return Ok(()) };
        let h = 1e-6 * z0.norm().max(1.0);
        let (Ok(fp), Ok(fm)) = (iterate(&p, z0 + h, n), iterate(&p, z0 - h, n)) else { return Ok(()) };
        let fd = (fp - fm) / (2.0 * h);
        // skip where roundoff in f itself swamps the difference quotient
        prop_assume!(jet.der.norm() > 1e-6 * jet.val.norm().max(1.0) && jet.val.norm() < 1e12);
        prop_assert!((jet.der - fd).norm() <= 1e-5 * jet.der.norm(), "n {n}: {} vs {fd}", jet.der);
    }

    #[test]
    fn c_jet_matches_central_differences(c in disk(2.0), n in 1usize..=10) {
        let h = 1e-6 * c.norm().max(1.0);
        let f = |cc: Complex64| iterate(&MapParams::new(2, cc).unwrap(), Complex64::new(0.0, 0.0), n);
        let p = MapParams::new(2, c).unwrap();
        let Ok(jet) = iterate_jet(&p, Jet::constant(Complex64::new(0.0, 0.0)), n, Variable::C) else { return Ok(()) };
        let (Ok(fp), Ok(fm)) = (f(c + h), f(c - h)) else { return Ok(()) };
        let fd = (fp - fm) / (2.0 * h);
        prop_assume!(jet.der.norm() > 1e-6 * jet.val.norm().max(1.0) && jet.val.norm() < 1e12);
        prop_assert!((jet.der - fd).norm() <= 1e-5 * jet.der.norm());
    }

    #[test]
    fn undecided_set_shrinks_with_budget(
        center in disk(1.5),
        half in 0.01f64..1.0,
        maxit in 1usize..200,
        dynamical in any::<bool>(),
        c in disk(1.0),
    ) {
        let plane = if dynamical { Plane::Dynamical { c } } else { Plane::Parameter };
        let region = Region::square(center, half);
        let a = membership_grid(plane, 2, region, 24, 24, maxit, None).unwrap();
        let b = membership_grid(plane, 2, region, 24, 24, 2 * maxit, None).unwrap();
        for (x, y) in a.cells.iter().zip(&b.cells) {
            if *y == Cell::Undecided {
                prop_assert_eq!(*x, Cell::Undecided);
            }
            if let Cell::Outside { n } = x {
                prop_assert_eq!(*y, Cell::Outside { n: *n });
            }
        }
    }

    #[test]
    fn angle_multiplication_is_exact(num in 0u64..1000, den in 1u64..1000, d in 2u32..5, n in 0u64..40) {
        prop_assume!(num < den);
        let a = AngleRational::from_u64(num, den).unwrap();
        let img = a.multiply_mod1(d, n);
        // d^n num mod den, in exact integer arithmetic
        let mut k = num as u128;
        for _ in 0..n {
            k = k * d as u128 % den as u128;
        }
        let g = gcd(k as u64, den);
        prop_assert_eq!(img, AngleRational::from_u64(k as u64 / g, den / g).unwrap());
        prop_assert_eq!(a.conjugate().conjugate(), a);
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a.max(1) } else { gcd(b, a % b) }
}

#[test]
fn hand_computed_orbits() {
    let p = MapParams::new(2, Complex64::new(-2.0, 0.0)).unwrap();
    let j = iterate_jet(&p, Jet::constant(Complex64::new(0.0, 0.0)), 2, Variable::C).unwrap();
    assert_eq!(j, Jet::new(Complex64::new(2.0, 0.0), Complex64::new(-3.0, 0.0)));
    let p = MapParams::new(2, Complex64::new(0.0, 1.0)).unwrap();
    let j = iterate_jet(&p, Jet::variable(Complex64::new(0.0, 1.0)), 1, Variable::Z).unwrap();
    assert_eq!(j, Jet::new(Complex64::new(-1.0, 1.0), Complex64::new(0.0, 2.0)));
    // D f^n(-2) = -4^n
    let p = MapParams::new(2, Complex64::new(-2.0, 0.0)).unwrap();
    for n in 0..20 {
        let expect = if n == 0 { 1.0 } else { -(4f64.powi(n)) };
        assert_eq!(orbit_derivative(&p, n as usize).unwrap().value.re, expect);
    }
    let p = MapParams::new(2, Complex64::new(10.0, 0.0)).unwrap();
    assert!(matches!(iterate(&p, Complex64::new(0.0, 0.0), 20), Err(Error::Overflow { .. })));
}
