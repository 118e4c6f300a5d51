use super::*;
use crate::geometry::Moebius;
use approx::assert_relative_eq;
use std::f64::consts::{PI, TAU};

fn c(re: f64, im: f64) -> Point<f64> {
    Complex::new(re, im)
}

fn domains() -> Vec<(DomainSpec<f64>, Point<f64>)> {
    vec![
        (DomainSpec::unit_disc(), c(0.5, 0.0)),
        (DomainSpec::disc(c(1.0, -1.0), 2.0).unwrap(), c(0.2, -0.5)),
        (DomainSpec::annulus(0.5).unwrap(), c(0.7, 0.0)),
        (DomainSpec::annulus(0.3).unwrap(), Complex::from_polar(0.65, 1.0)),
        (DomainSpec::annulus(0.8).unwrap(), c(0.0, 0.95)),
        ("moebius:2,1,0.2,1;base=disc:0,0,1".parse().unwrap(), c(1.5, 0.1)),
        ("moebius:1,-0.2,-0.2,1;base=annulus:0.4".parse().unwrap(), c(0.0, 0.6)),
    ]
}

#[test]
fn disc_examples() {
    let d = DomainSpec::unit_disc();
    let v = green_eval(&d, c(0.0, 0.0), c(0.5, 0.0)).unwrap();
    assert_relative_eq!(v.value, 0.5f64.ln(), max_relative = 1e-15);
    assert_relative_eq!(v.grad_x, 2.0, max_relative = 1e-14);
    assert!(v.grad_y.abs() < 1e-15);
    let v = green_eval(&d, c(0.5, 0.0), c(0.0, 0.0)).unwrap();
    assert_relative_eq!(v.value, 0.5f64.ln(), max_relative = 1e-15);
    assert!(matches!(green_eval(&d, c(0.5, 0.0), c(0.5, 0.0)), Err(Error::CoincidentPoints)));
    assert!(matches!(green_eval(&d, c(0.5, 0.0), c(1.5, 0.0)), Err(Error::PointOutsideDomain(_))));
    let square: DomainSpec<f64> = "polygon:0,0;1,0;1,1;0,1".parse().unwrap();
    assert!(matches!(green_eval(&square, c(0.5, 0.5), c(0.2, 0.2)), Err(Error::UnsupportedDomain(_))));
}

#[test]
fn symmetric_in_its_arguments() {
    for (d, w) in domains() {
        let (lo, hi) = d.bounding_box().unwrap();
        let mut k = 0;
        let mut tried = 0;
        while k < 40 && tried < 4000 {
            tried += 1;
            let s = tried as f64;
            let z = c(lo.re + (hi.re - lo.re) * (s * 0.618034).fract(), lo.im + (hi.im - lo.im) * (s * 0.414214).fract());
            if !d.contains(z) || (z - w).norm() < 1e-3 {
                continue;
            }
            k += 1;
            let a = green_eval(&d, w, z).unwrap().value;
            let b = green_eval(&d, z, w).unwrap().value;
            assert!((a - b).abs() <= 1e-10, "{d}: {a} vs {b}");
        }
        assert_eq!(k, 40);
    }
}

#[test]
fn vanishes_on_the_boundary() {
    for (d, w) in domains() {
        let g = GreenFunction::new(&d, w).unwrap();
        for node in d.boundary_sample(256).unwrap() {
            let v = g.value(node.point);
            assert!(v.abs() < 1e-12, "{d} at {}: {v}", node.point);
            let inner = node.point - node.normal * 1e-6;
            let slope = g.gradient_norm(inner);
            assert!(g.value(inner).abs() <= 1e-6 * slope * 1.01 + 1e-12);
        }
    }
}

#[test]
fn gradient_matches_finite_differences() {
    for (d, w) in domains() {
        let g = GreenFunction::new(&d, w).unwrap();
        let delta = d.boundary_distance(w).unwrap().delta;
        for k in 0..12 {
            let z = w + Complex::from_polar(delta * (0.3 + 0.05 * k as f64), 0.5 * k as f64);
            let h = 1e-5;
            let gx = (g.value(z + h) - g.value(z - h)) / (2.0 * h);
            let gy = (g.value(z + c(0.0, h)) - g.value(z - c(0.0, h))) / (2.0 * h);
            let v = g.eval(z);
            let scale = v.grad_x.hypot(v.grad_y);
            assert!((gx - v.grad_x).hypot(gy - v.grad_y) <= 1e-6 * scale, "{d} at {z}");
            let f = g.complex_gradient(z);
            let fd = (g.complex_gradient(z + h) - g.complex_gradient(z - h)) / (2.0 * h);
            assert!((fd - g.gradient_derivative(z)).norm() <= 1e-6 * (1.0 + fd.norm()), "{d} {f}");
        }
    }
}

#[test]
fn discrete_laplacian_vanishes() {
    for (d, w) in domains() {
        let g = GreenFunction::new(&d, w).unwrap();
        let (lo, hi) = d.bounding_box().unwrap();
        let h = 1e-3;
        let mut checked = 0;
        for k in 0..400 {
            let s = k as f64;
            let z = c(lo.re + (hi.re - lo.re) * (s * 0.618034).fract(), lo.im + (hi.im - lo.im) * (s * 0.414214).fract());
            // five-point truncation error is h²/r⁴ for a unit log singularity at distance r
            if !d.contains(z) || (z - w).norm() < 0.3 || d.boundary_distance(z).unwrap().delta < 0.05 {
                continue;
            }
            checked += 1;
            let lap = (g.value(z + h) + g.value(z - h) + g.value(z + c(0.0, h)) + g.value(z - c(0.0, h)) - 4.0 * g.value(z)) / (h * h);
            assert!(lap.abs() <= 1e-3, "{d}: {lap}");
        }
        assert!(checked > 5, "{d}");
    }
}

#[test]
fn domain_monotonicity() {
    let small = DomainSpec::unit_disc();
    let large = DomainSpec::disc(c(0.0, 0.0), 2.0).unwrap();
    for k in 1..20 {
        let z = Complex::from_polar(0.049 * k as f64, k as f64);
        let a = green_eval(&small, c(0.0, 0.0), z).unwrap().value;
        let b = green_eval(&large, c(0.0, 0.0), z).unwrap().value;
        assert!(a >= b);
    }
}

#[test]
fn capacity_examples() {
    let r = robin_capacity(&DomainSpec::disc(c(0.0, 0.0), 2.0).unwrap(), c(0.0, 0.0)).unwrap();
    assert_relative_eq!(r.capacity, 0.5, max_relative = 1e-15);
    let r = robin_capacity(&DomainSpec::unit_disc(), c(0.5, 0.0)).unwrap();
    assert_relative_eq!(r.capacity, 4.0 / 3.0, max_relative = 1e-15);
    assert_relative_eq!(r.robin_constant, r.capacity.ln(), max_relative = 1e-15);
    let r = robin_capacity(&DomainSpec::<f64>::PolarComplement, c(1.0, 0.0)).unwrap();
    assert_eq!(r.capacity, 0.0);
    assert!(matches!(robin_capacity(&DomainSpec::unit_disc(), c(2.0, 0.0)), Err(Error::PointOutsideDomain(_))));
}

#[test]
fn capacity_is_the_regular_part_at_the_pole() {
    for (d, w) in domains() {
        let g = GreenFunction::new(&d, w).unwrap();
        let cap = robin_capacity(&d, w).unwrap();
        // average of G − log r over a small circle, corrected to second order in r
        let mean = |r: f64| (0..64).map(|k| g.value(w + Complex::from_polar(r, TAU * k as f64 / 64.0)) - r.ln()).sum::<f64>() / 64.0;
        let (r1, r2) = (1e-3, 2e-3);
        let extrapolated = (4.0 * mean(r1) - mean(r2)) / 3.0;
        assert!((extrapolated - cap.robin_constant).abs() < 1e-9, "{d}: {extrapolated} vs {}", cap.robin_constant);
        let delta = d.boundary_distance(w).unwrap().delta;
        assert!(cap.capacity * delta <= 1.0 + 1e-9);
    }
}

#[test]
fn capacity_transports_through_moebius_maps() {
    let base = DomainSpec::annulus(0.4).unwrap();
    let m = Moebius::new(c(1.0, 0.0), c(-0.2, 0.0), c(-0.2, 0.0), c(1.0, 0.0));
    let image = DomainSpec::moebius(base.clone(), m).unwrap();
    let zeta = c(0.1, 0.55);
    let w = m.apply(zeta).unwrap();
    let cb = robin_capacity(&base, zeta).unwrap().capacity;
    let ci = robin_capacity(&image, w).unwrap().capacity;
    assert_relative_eq!(ci, cb / m.derivative(zeta).unwrap().norm(), max_relative = 1e-13);
}

#[test]
fn disc_maxima() {
    let d = DomainSpec::unit_disc();
    let m = disc_max_green(&d, c(0.0, 0.0), 0.6).unwrap();
    assert!((m - 0.6f64.ln()).abs() < 1e-8 && m >= 0.6f64.ln());
    let m = disc_max_green(&d, c(0.5, 0.0), 0.5).unwrap();
    assert!(m <= 0.0 && m > -1e-3);
    let a = DomainSpec::annulus(0.5).unwrap();
    // the full radius is tangent to the inner circle
    let m = disc_max_green(&a, c(0.7, 0.0), 0.2).unwrap();
    assert!(m <= 0.0 && m > -1e-6);
    assert!(disc_max_green(&a, c(0.7, 0.0), 0.15).unwrap() < 0.0);
    let g = GreenFunction::new(&a, c(0.7, 0.0)).unwrap();
    let dense = (0..100_000).map(|k| g.value(c(0.7, 0.0) + Complex::from_polar(0.1, TAU * k as f64 / 1e5))).fold(f64::MIN, f64::max);
    let m = disc_max_green(&a, c(0.7, 0.0), 0.1).unwrap();
    assert!(m >= dense && m - dense < 1e-8);
    assert!(matches!(disc_max_green(&a, c(0.7, 0.0), 0.25), Err(Error::RadiusTooLarge { .. })));
}

#[test]
fn flux_is_two_pi() {
    let d = DomainSpec::unit_disc();
    assert!((boundary_flux(&d, c(0.0, 0.0), 256).unwrap() - TAU).abs() < 1e-6);
    assert!((boundary_flux(&d, c(0.5, 0.0), 256).unwrap() - TAU).abs() < 1e-6);
    let a = DomainSpec::annulus(0.5).unwrap();
    let parts = boundary_flux_components(&a, c(0.7, 0.0), 1024).unwrap();
    assert!(parts.iter().all(|&p| p > 0.0));
    assert!((parts.iter().sum::<f64>() - TAU).abs() < 1e-4, "{parts:?}");
    assert!(matches!(boundary_flux(&d, c(0.0, 0.0), 16), Err(Error::InvalidArgument(_))));
}

#[test]
fn annulus_critical_point() {
    let a = DomainSpec::annulus(0.5).unwrap();
    let w = c(0.7, 0.0);
    let cps = critical_points(&a, w).unwrap();
    assert_eq!(cps.len(), 1);
    let cp = cps[0];
    assert!(cp.location.re < 0.0 && cp.location.im.abs() < 1e-12, "{:?}", cp);
    assert_eq!(cp.order, 2);
    assert!(cp.gradient_residual <= 1e-9 && cp.level < 0.0);
    let g = GreenFunction::new(&a, w).unwrap();
    // diameter through the pole; on its own ray the saddle is the minimum
    let section: Vec<f64> = (1..100)
        .flat_map(|k| [-1.0, 1.0].map(|s| s * (0.5 + 0.005 * k as f64)))
        .filter(|&x| (x - 0.7f64).abs() > 1e-9)
        .map(|x| g.value(c(x, 0.0)))
        .collect();
    let lo = section.iter().copied().fold(f64::MAX, f64::min);
    let hi = section.iter().copied().fold(f64::MIN, f64::max);
    assert!(lo < cp.level && cp.level < hi);
    assert!(critical_points(&DomainSpec::unit_disc(), c(0.3, 0.0)).unwrap().is_empty());
}

#[test]
fn thin_annulus_keeps_relative_precision() {
    let a = DomainSpec::annulus(0.8).unwrap();
    let cps = critical_points(&a, c(0.9, 0.0)).unwrap();
    assert_eq!(cps.len(), 1);
    let t0 = cps[0].level;
    assert!(t0 < 0.0 && t0 > -1e-15, "{t0}");
    assert_eq!(cps[0].order, 2);
    let _ = PI;
}

#[test]
fn image_critical_points_map_forward() {
    let base = DomainSpec::annulus(0.4).unwrap();
    let m = Moebius::new(c(1.0, 0.0), c(-0.2, 0.0), c(-0.2, 0.0), c(1.0, 0.0));
    let image = DomainSpec::moebius(base.clone(), m).unwrap();
    let zeta = c(0.1, 0.55);
    let a = critical_points(&base, zeta).unwrap();
    let b = critical_points(&image, m.apply(zeta).unwrap()).unwrap();
    assert_eq!(a.len(), 1);
    assert_eq!(b.len(), 1);
    assert!((m.apply(a[0].location).unwrap() - b[0].location).norm() < 1e-8);
    assert!((a[0].level - b[0].level).abs() < 1e-12);
}

#[test]
fn single_precision_green() {
    let d = DomainSpec::<f32>::annulus(0.5).unwrap();
    let v = green_eval(&d, Complex::new(0.7f32, 0.0), Complex::new(-0.7f32, 0.0)).unwrap();
    let w = green_eval(&DomainSpec::<f64>::annulus(0.5).unwrap(), c(0.7, 0.0), c(-0.7, 0.0)).unwrap();
    assert!((v.value as f64 - w.value).abs() < 1e-5);
}
