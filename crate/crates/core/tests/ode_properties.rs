use std::f64::consts::PI;

use monodromy_core::ode::{subdominant, PoleRecord};
use monodromy_core::{
    build_framed, coordinates, cross_ratio, Complex, CoordinateTuple, IntegratorConfig, ProjectivePoint,
    RationalPotential, Realization, Signing,
};
use proptest::prelude::*;

fn unit_disc(floor: f64) -> impl Strategy<Value = Complex> {
    (floor..1.0f64, 0.0..2.0 * PI).prop_map(|(r, a)| Complex::from_polar(r, a))
}

/// Polynomials of degree 2 to 6 with coefficients in the unit disc.
fn polynomial() -> impl Strategy<Value = RationalPotential> {
    polynomial_with_lead(0.1)
}

/// As `polynomial`, with the leading modulus at least `floor`.
fn polynomial_with_lead(floor: f64) -> impl Strategy<Value = RationalPotential> {
    (2usize..=6).prop_flat_map(move |d| (proptest::collection::vec(unit_disc(0.0), d), unit_disc(floor))).prop_map(
        |(mut c, lead)| {
            c.push(lead);
            RationalPotential::polynomial(c).unwrap()
        },
    )
}

fn monomial(d: usize) -> RationalPotential {
    let mut c = vec![Complex::new(0.0, 0.0); d + 1];
    c[d] = Complex::new(1.0, 0.0);
    RationalPotential::polynomial(c).unwrap()
}

fn lines_at_origin(phi: &RationalPotential, pole: &PoleRecord, cfg: &IntegratorConfig) -> Vec<ProjectivePoint> {
    (0..pole.stokes_angles.len())
        .map(|k| subdominant(phi, pole, k, Complex::new(0.0, 0.0), cfg).unwrap().line)
        .collect()
}

fn auto_coordinates(phi: &RationalPotential, cfg: &IntegratorConfig) -> CoordinateTuple {
    let b = build_framed(phi, &Signing::default(), &Realization::Auto, cfg).unwrap();
    coordinates(&b.framed, &b.triangulation).unwrap()
}

#[test]
fn quadratic_is_equivariant_under_quarter_turns() {
    let phi = monomial(2);
    let cfg = IntegratorConfig::default();
    let pole = &phi.analyze().unwrap()[0];
    let l = lines_at_origin(&phi, pole, &cfg);
    assert_eq!(l.len(), 4);
    let x = cross_ratio(&l[0], &l[1], &l[2], &l[3]).value().unwrap();
    let shifted = cross_ratio(&l[1], &l[2], &l[3], &l[0]).value().unwrap();
    assert!((x - shifted).norm() < 1e-9, "{x} vs {shifted}");
    let quarter = Complex::new(0.0, 1.0);
    for k in 0..4 {
        let turned = ProjectivePoint::new(l[k].a(), l[k].b() / quarter).unwrap();
        assert!(turned.approx_eq(&l[(k + 1) % 4], 1e-9), "sector {k}");
    }
    let b = build_framed(&phi, &Signing::default(), &Realization::Auto, &cfg).unwrap();
    let before = coordinates(&b.framed, &b.triangulation).unwrap();
    let flipped = b.framed.flip(0).unwrap();
    let after = coordinates(&flipped, flipped.base()).unwrap();
    assert!(after.max_rel_diff(&before) < 1e-9, "{before:?} vs {after:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn stokes_and_anti_stokes_interleave(phi in polynomial()) {
        let pole = &phi.analyze().unwrap()[0];
        let n = pole.order - 2;
        prop_assert_eq!(pole.stokes_angles.len(), n);
        prop_assert_eq!(pole.anti_stokes_angles.len(), n);
        let step = PI / n as f64;
        let mut all: Vec<(f64, bool)> = pole.stokes_angles.iter().map(|&a| (a, true)).collect();
        all.extend(pole.anti_stokes_angles.iter().map(|&a| (a, false)));
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        for i in 0..all.len() {
            let (a, b) = (all[i], all[(i + 1) % all.len()]);
            prop_assert!(a.1 != b.1, "directions {} and {} have the same type", i, i + 1);
            let gap = (b.0 - a.0).rem_euclid(2.0 * PI);
            prop_assert!((gap - step).abs() < 1e-9, "gap {} after direction {}", gap, i);
        }
    }

    // Far turning points make adjacent lines at the origin exponentially close.
    #[test]
    fn adjacent_subdominant_lines_are_opposed(phi in polynomial_with_lead(0.5)) {
        let cfg = IntegratorConfig::default();
        let pole = &phi.analyze().unwrap()[0];
        let l = lines_at_origin(&phi, pole, &cfg);
        for k in 0..l.len() {
            let d = l[k].distance(&l[(k + 1) % l.len()]);
            prop_assert!(d > 1e-6, "sectors {} and {}: {:e}", k, k + 1, d);
        }
    }

    #[test]
    fn built_systems_conserve_the_wronskian(phi in polynomial()) {
        let cfg = IntegratorConfig::default();
        let b = build_framed(&phi, &Signing::default(), &Realization::Auto, &cfg).unwrap();
        prop_assert!(b.max_drift <= 100.0 * cfg.rel_tol, "{:e}", b.max_drift);
    }

    #[test]
    fn coordinates_are_stable_under_tolerance_and_seeding(phi in polynomial()) {
        let cfg = IntegratorConfig::default();
        let x = auto_coordinates(&phi, &cfg);
        let tighter = IntegratorConfig { rel_tol: cfg.rel_tol / 2.0, ..cfg.clone() };
        let farther = IntegratorConfig { wkb_decay_target: cfg.wkb_decay_target * 1.2, ..cfg.clone() };
        let nearer = IntegratorConfig { wkb_decay_target: cfg.wkb_decay_target * 0.8, ..cfg.clone() };
        for (name, c) in [("rel_tol/2", tighter), ("decay +20%", farther), ("decay -20%", nearer)] {
            let y = auto_coordinates(&phi, &c);
            prop_assert!(y.max_rel_diff(&x) <= 1e-6, "{}: {:e}", name, y.max_rel_diff(&x));
        }
    }
}
