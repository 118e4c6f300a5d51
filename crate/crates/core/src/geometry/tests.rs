use super::*;
use approx::assert_relative_eq;

fn c(re: f64, im: f64) -> Point<f64> {
    Complex::new(re, im)
}

fn shifted_disc() -> DomainSpec<f64> {
    "moebius:2,1,0.2,1;base=disc:0,0,1".parse().unwrap()
}

#[test]
fn literals_round_trip() {
    for lit in [
        "disc:0,0,1",
        "disc:0.5,-1,2",
        "annulus:0.3",
        "moebius:2,1,0.2,1;base=disc:0,0,1",
        "moebius:1,-0.2-0.1i,-0.2,1;base=annulus:0.4",
        "polygon:0,0;1,0;1,1;0,1",
        "polar-complement",
    ] {
        let d: DomainSpec<f64> = lit.parse().unwrap();
        let again: DomainSpec<f64> = d.to_string().parse().unwrap();
        assert_eq!(d, again, "{lit}");
    }
}

#[test]
fn complex_literals() {
    assert_eq!(parse_complex::<f64>("1.5").unwrap(), c(1.5, 0.0));
    assert_eq!(parse_complex::<f64>("-2i").unwrap(), c(0.0, -2.0));
    assert_eq!(parse_complex::<f64>("0.3+0.1i").unwrap(), c(0.3, 0.1));
    assert_eq!(parse_complex::<f64>("1e-3-2e-1i").unwrap(), c(1e-3, -0.2));
    assert_eq!(parse_complex::<f64>("i").unwrap(), c(0.0, 1.0));
    assert!(parse_complex::<f64>("abc").is_err());
}

#[test]
fn rejects_malformed_domains() {
    assert!(matches!("annulus:1.2".parse::<DomainSpec<f64>>(), Err(Error::InvalidDomain(_))));
    assert!(matches!("disc:0,0,-1".parse::<DomainSpec<f64>>(), Err(Error::InvalidDomain(_))));
    assert!(matches!("polygon:0,0;1,1;1,0;0,1".parse::<DomainSpec<f64>>(), Err(Error::InvalidDomain(_))));
    // pole of the map at ζ = −0.5 inside the unit disc
    assert!(matches!("moebius:1,0,2,1;base=disc:0,0,1".parse::<DomainSpec<f64>>(), Err(Error::InvalidDomain(_))));
    assert!(matches!("moebius:1,1,1,1;base=disc:0,0,1".parse::<DomainSpec<f64>>(), Err(Error::InvalidDomain(_))));
    assert!("ellipse:1".parse::<DomainSpec<f64>>().is_err());
}

#[test]
fn membership() {
    let a = DomainSpec::annulus(0.5).unwrap();
    assert!(a.contains(c(0.7, 0.0)));
    assert!(!a.contains(c(0.3, 0.0)));
    assert!(!a.contains(c(1.0, 0.0)));
    assert!(!a.contains(c(0.5, 0.0)));
    let p: DomainSpec<f64> = "polygon:0,0;1,0;1,1;0,1".parse().unwrap();
    assert!(p.contains(c(0.5, 0.5)));
    assert!(!p.contains(c(1.5, 0.5)));
    assert!(DomainSpec::<f64>::PolarComplement.contains(c(1.0, 0.0)));
    assert!(!DomainSpec::<f64>::PolarComplement.contains(c(0.0, 0.0)));
}

#[test]
fn exact_distances() {
    let d = DomainSpec::disc(c(0.0, 0.0), 2.0).unwrap();
    assert_relative_eq!(d.boundary_distance(c(0.5, 0.0)).unwrap().delta, 1.5);
    let a = DomainSpec::annulus(0.5).unwrap();
    assert_relative_eq!(a.boundary_distance(c(0.7, 0.0)).unwrap().delta, 0.2, epsilon = 1e-15);
    assert_relative_eq!(a.boundary_distance(c(0.0, 0.8)).unwrap().delta, 0.2, epsilon = 1e-15);
    let p: DomainSpec<f64> = "polygon:0,0;1,0;1,1;0,1".parse().unwrap();
    assert_relative_eq!(p.boundary_distance(c(0.5, 0.25)).unwrap().delta, 0.25);
    assert!(DomainSpec::<f64>::PolarComplement.boundary_distance(c(3.0, 0.0)).unwrap().is_infinite());
    assert!(matches!(a.boundary_distance(c(0.1, 0.0)), Err(Error::PointOutsideDomain(_))));
}

#[test]
fn moebius_distance_matches_circle_geometry() {
    let d = shifted_disc();
    let chart = d.chart().unwrap();
    let (center, radius, outward) = chart.image_circles()[0];
    assert!(outward);
    for &w in &[c(1.5, 0.1), c(1.2, -0.3), c(2.0, 0.5)] {
        assert!(d.contains(w));
        let exact = radius - (w - center).norm();
        let got = d.boundary_distance(w).unwrap().delta;
        assert!(got <= exact + 1e-12, "{got} > {exact}");
        assert!(exact - got < 1e-9, "{got} vs {exact}");
    }
}

#[test]
fn moebius_annulus_circles_are_oriented() {
    let d: DomainSpec<f64> = "moebius:1,-0.2,-0.2,1;base=annulus:0.4".parse().unwrap();
    let circles = d.chart().unwrap().image_circles();
    assert_eq!(circles.len(), 2);
    let outer = circles.iter().find(|c| c.2).unwrap();
    let inner = circles.iter().find(|c| !c.2).unwrap();
    assert!(outer.1 > inner.1);
    // the image of the inner circle lies inside the outer one
    assert!((inner.0 - outer.0).norm() + inner.1 < outer.1);
    let w = c(0.0, 0.6);
    assert!(d.contains(w));
    let exact = (outer.1 - (w - outer.0).norm()).min((w - inner.0).norm() - inner.1);
    let got = d.boundary_distance(w).unwrap().delta;
    assert!(got <= exact + 1e-12 && exact - got < 1e-9, "{got} vs {exact}");
}

#[test]
fn nested_moebius_flattens() {
    let inner = shifted_disc();
    let outer = DomainSpec::moebius(inner.clone(), Moebius::affine(c(0.0, 1.0), c(1.0, 0.0))).unwrap();
    let w = c(1.5, 0.1);
    let image = c(1.0, 0.0) + c(0.0, 1.0) * w;
    assert!(outer.contains(image));
    let d1 = inner.boundary_distance(w).unwrap().delta;
    let d2 = outer.boundary_distance(image).unwrap().delta;
    assert!((d1 - d2).abs() < 1e-9);
}

#[test]
fn samples_lie_on_the_boundary() {
    let a = DomainSpec::annulus(0.5).unwrap();
    let nodes: Vec<BoundaryNode<f64>> = a.boundary_sample(96).unwrap();
    assert_eq!(nodes.len(), 96);
    let outer = nodes.iter().filter(|n| (n.point.norm() - 1.0).abs() < 1e-14).count();
    assert_eq!(outer, 64);
    for n in &nodes {
        let inward = n.point - n.normal * 1e-6;
        assert!(a.contains(inward));
        assert!(!a.contains(n.point + n.normal * 1e-6));
    }
    let p: DomainSpec<f64> = "polygon:0,0;1,0;1,1;0,1".parse().unwrap();
    let nodes = p.boundary_sample(4).unwrap();
    assert_eq!(nodes.len(), 4);
    for n in &nodes {
        assert!(p.contains(n.point - n.normal * 1e-6));
    }
    assert!(matches!(a.boundary_sample(3), Err(Error::InvalidArgument(_))));
    assert!(DomainSpec::<f64>::PolarComplement.boundary_sample(8).is_err());
}

#[test]
fn moebius_transport_of_the_derivative() {
    let d = shifted_disc();
    let w = c(1.5, 0.1);
    let (zeta, modulus) = d.moebius_transport(w).unwrap();
    let m = Moebius::new(c(2.0, 0.0), c(1.0, 0.0), c(0.2, 0.0), c(1.0, 0.0));
    assert!((m.apply(zeta).unwrap() - w).norm() < 1e-14);
    assert_relative_eq!(modulus, m.derivative(zeta).unwrap().norm(), max_relative = 1e-14);
}

#[test]
fn moebius_algebra() {
    let m = Moebius::new(c(2.0, 0.5), c(1.0, 0.0), c(0.2, -0.1), c(1.0, 0.3));
    let z = c(0.3, -0.4);
    let back = m.inverse().apply(m.apply(z).unwrap()).unwrap();
    assert!((back - z).norm() < 1e-14);
    let h = 1e-5;
    let fd = (m.apply(z + h).unwrap() - m.apply(z - h).unwrap()) / (2.0 * h);
    assert!((fd - m.derivative(z).unwrap()).norm() < 1e-8);
    let fd2 = (m.derivative(z + h).unwrap() - m.derivative(z - h).unwrap()) / (2.0 * h);
    assert!((fd2 - m.second_derivative(z).unwrap()).norm() < 1e-7);
    let t = m.taylor(z, 4).unwrap();
    let dz = c(1e-2, 5e-3);
    let series = t.iter().rev().fold(c(0.0, 0.0), |acc, &a| acc * dz + a);
    assert!((series - m.apply(z + dz).unwrap()).norm() < 1e-10);
}

#[test]
fn areas_and_boxes() {
    let a = DomainSpec::annulus(0.5).unwrap();
    assert_relative_eq!(a.area().unwrap(), std::f64::consts::PI * 0.75, max_relative = 1e-14);
    let p: DomainSpec<f64> = "polygon:0,0;2,0;2,1;0,1".parse().unwrap();
    assert_relative_eq!(p.area().unwrap(), 2.0);
    let (lo, hi) = shifted_disc().bounding_box().unwrap();
    assert!(lo.re < 1.0 && hi.re > 2.0);
}

#[test]
fn single_precision_geometry() {
    let a = DomainSpec::<f32>::annulus(0.5).unwrap();
    assert!(a.contains(Complex::new(0.7f32, 0.0)));
    assert!((a.boundary_distance(Complex::new(0.7f32, 0.0)).unwrap().delta - 0.2).abs() < 1e-6);
}
