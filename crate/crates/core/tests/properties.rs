use std::f64::consts::PI;

use monodromy_core::checks::{catalog, degeneracy_witnesses};
use monodromy_core::framed::DevelopedFramedLocalSystem;
use monodromy_core::{
    coordinates, cross_ratio, default_triangulation, degeneracy, map_from_triples, mutate, reconstruct, Complex,
    CoordinateTuple, Error, IdealTriangulation, MapClass, ProjectiveMap, ProjectivePoint, Sign, Signing,
    TaggedTriangulation,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn complex(r: f64) -> impl Strategy<Value = Complex> {
    (-r..r, -r..r).prop_map(|(re, im)| Complex::new(re, im))
}

/// Maps with `|det| ≥ 0.1` and entries in the unit box.
fn map() -> impl Strategy<Value = ProjectiveMap> {
    [complex(1.0), complex(1.0), complex(1.0), complex(1.0)]
        .prop_filter("well conditioned", |[a, b, c, d]| (a * d - b * c).norm() >= 0.1)
        .prop_map(|[a, b, c, d]| ProjectiveMap::from_entries(a, b, c, d).unwrap())
}

fn separated(points: &[Complex], gap: f64) -> bool {
    points.iter().enumerate().all(|(i, p)| points[i + 1..].iter().all(|q| (p - q).norm() >= gap))
}

fn rel(a: Complex, b: Complex) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

fn tuple(t: &IdealTriangulation, rng: &mut ChaCha8Rng, spread: f64) -> CoordinateTuple {
    let l = spread.ln();
    CoordinateTuple::from_values(
        t.arcs().map(|e| (e, Complex::from_polar(rng.random_range(-l..=l).exp(), rng.random_range(0.0..2.0 * PI)))),
    )
}

fn flippable(t: &IdealTriangulation) -> Vec<usize> {
    t.arcs().filter(|&e| !t.is_self_folded_interior(e)).collect()
}

fn random_walk(t: &IdealTriangulation, steps: usize, rng: &mut ChaCha8Rng) -> IdealTriangulation {
    let mut t = t.clone();
    for _ in 0..steps {
        let arcs = flippable(&t);
        if arcs.is_empty() {
            break;
        }
        t = t.flip(arcs[rng.random_range(0..arcs.len())]).unwrap();
    }
    t
}

fn surface_count() -> usize {
    catalog().len()
}

fn system(surface: usize, seed: u64) -> DevelopedFramedLocalSystem {
    let t = default_triangulation(&catalog()[surface]).unwrap().0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    reconstruct(&t, &tuple(&t, &mut rng, 2.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cross_ratio_is_invariant(z in [complex(2.0), complex(2.0), complex(2.0), complex(2.0)], g in map()) {
        prop_assume!(separated(&z, 0.05));
        let p = z.map(ProjectivePoint::affine);
        let before = cross_ratio(&p[0], &p[1], &p[2], &p[3]).value().unwrap();
        let q = p.map(|x| g.apply(&x));
        let after = cross_ratio(&q[0], &q[1], &q[2], &q[3]).value().unwrap();
        prop_assert!(rel(after, before) <= 1e-9, "{before} vs {after}");
    }

    #[test]
    fn map_from_triples_hits_its_targets(s in [complex(2.0), complex(2.0), complex(2.0)], d in [complex(2.0), complex(2.0), complex(2.0)]) {
        prop_assume!(separated(&s, 0.05) && separated(&d, 0.05));
        let (src, dst) = (s.map(ProjectivePoint::affine), d.map(ProjectivePoint::affine));
        let g = map_from_triples(&src, &dst).unwrap();
        for i in 0..3 {
            prop_assert!(g.apply(&src[i]).approx_eq(&dst[i], 1e-9));
        }
    }

    #[test]
    fn classify_ignores_conjugation_and_scale(
        m in map(),
        t in complex(2.0),
        kind in 0usize..3,
        g in map(),
        lambda in complex(3.0),
    ) {
        prop_assume!(lambda.norm() > 0.1 && t.norm() > 0.1);
        let one = Complex::new(1.0, 0.0);
        let m = match kind {
            0 => m,
            1 => ProjectiveMap::from_entries(one, t, 0.0.into(), one).unwrap().conjugate_by(&g),
            _ => ProjectiveMap::from_entries(lambda, 0.0.into(), 0.0.into(), lambda).unwrap(),
        };
        let scaled = ProjectiveMap::new(m.matrix().map(|r| r.map(|x| x * lambda))).unwrap();
        let c = m.classify();
        prop_assert_eq!(m.conjugate_by(&g).classify(), c);
        prop_assert_eq!(scaled.classify(), c);
    }

    #[test]
    fn normal_forms_are_idempotent(z in [complex(5.0), complex(5.0)], g in map()) {
        prop_assume!(z[0].norm() + z[1].norm() > 1e-3);
        let p = ProjectivePoint::new(z[0], z[1]).unwrap().normalized();
        let q = p.normalized();
        prop_assert_eq!((q.a(), q.b()), (p.a(), p.b()));
        let n = g.normalized();
        prop_assert_eq!(n.normalized().matrix(), n.matrix());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn flips_keep_the_rank_and_are_involutions(s in 0..surface_count(), seed in any::<u64>(), steps in 0usize..200) {
        let surface = &catalog()[s];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_walk(&default_triangulation(surface).unwrap().0, steps, &mut rng);
        prop_assert_eq!(t.arc_count() as i64, surface.rank());
        prop_assert!(t.validate().is_ok());
        for k in flippable(&t) {
            let back = t.flip(k).unwrap().flip(k).unwrap();
            prop_assert!(back.same_as(&t), "arc {}", k);
        }
    }

    #[test]
    fn exchange_matrix_mutates_with_flips(s in 0..surface_count(), seed in any::<u64>(), steps in 0usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_walk(&default_triangulation(&catalog()[s]).unwrap().0, steps, &mut rng);
        let no_folds = |t: &IdealTriangulation| (0..t.triangles().len()).all(|i| !t.is_self_folded_triangle(i));
        for k in flippable(&t) {
            let f = t.flip(k).unwrap();
            if no_folds(&t) && no_folds(&f) {
                prop_assert_eq!(f.exchange_matrix(), t.exchange_matrix().mutate(k), "arc {}", k);
            }
        }
    }

    #[test]
    fn tagged_canonical_form_is_idempotent(s in 0..surface_count(), seed in any::<u64>(), steps in 0usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_walk(&default_triangulation(&catalog()[s]).unwrap().0, steps, &mut rng);
        let mut signing = Signing::trivial(&t);
        for p in t.punctures().collect::<Vec<_>>() {
            if rng.random_bool(0.5) {
                signing.set(p, Sign::Minus);
            }
        }
        let once = match TaggedTriangulation::new(t, signing) {
            Ok(x) => x,
            Err(Error::SelfFoldedInterior(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(once.is_canonical());
        let (t1, s1) = once.clone().into_parts();
        let twice = TaggedTriangulation::new(t1, s1).unwrap();
        prop_assert_eq!(twice.triangulation(), once.triangulation());
        prop_assert_eq!(twice.signing(), once.signing());
    }

    #[test]
    fn roundtrip_recovers_the_tuple(s in 0..surface_count(), seed in any::<u64>(), steps in 0usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_walk(&default_triangulation(&catalog()[s]).unwrap().0, steps, &mut rng);
        let x = tuple(&t, &mut rng, 2.0);
        let f = reconstruct(&t, &x).unwrap();
        prop_assert!(f.validate().is_ok());
        let y = coordinates(&f, &t).unwrap();
        prop_assert!(y.max_rel_diff(&x) <= 1e-12, "{}", y.max_rel_diff(&x));
    }

    #[test]
    fn mutation_is_an_involution(s in 0..surface_count(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = default_triangulation(&catalog()[s]).unwrap().0;
        let x = tuple(&t, &mut rng, 2.0);
        let eps = t.exchange_matrix();
        for k in t.arcs() {
            let once = match mutate(&x, &eps, k) {
                Ok(y) => y,
                Err(Error::MutationPole { .. }) => continue,
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            };
            let twice = mutate(&once, &eps.mutate(k), k).unwrap();
            prop_assert!(twice.max_rel_diff(&x) <= 1e-12, "arc {}: {}", k, twice.max_rel_diff(&x));
        }
    }

    #[test]
    fn conjugation_preserves_consistency_holonomy_and_verdict(s in 0..surface_count(), seed in any::<u64>(), g in map()) {
        let f = system(s, seed);
        let h = f.conjugate(&g);
        prop_assert!(h.validate().is_ok());
        prop_assert_eq!(degeneracy(&h).kind(), degeneracy(&f).kind());
        for p in f.base().punctures() {
            let tr = |m: ProjectiveMap| {
                let m = m.normalized();
                (m.trace() * m.trace() / m.det()).norm()
            };
            let (a, b) = (tr(f.puncture_holonomy(p).unwrap().0), tr(h.puncture_holonomy(p).unwrap().0));
            prop_assert!((a - b).abs() <= 1e-8 * a.max(1.0), "puncture {}: {} vs {}", p, a, b);
        }
    }

    #[test]
    fn sign_flips_preserve_consistency_and_verdict(s in 0..surface_count(), seed in any::<u64>()) {
        let f = system(s, seed);
        for p in f.base().punctures() {
            if f.puncture_holonomy(p).unwrap().0.classify() != MapClass::Semisimple {
                continue;
            }
            let h = f.sign_flip(p).unwrap();
            prop_assert!(h.validate().is_ok());
            prop_assert_eq!(degeneracy(&h).kind(), degeneracy(&f).kind());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn witness_verdicts_survive_conjugation(g in map()) {
        for (name, f, kind) in degeneracy_witnesses() {
            let h = f.conjugate(&g);
            prop_assert!(h.validate().is_ok(), "{}", name);
            prop_assert_eq!(degeneracy(&h).kind(), kind, "{}", name);
        }
    }
}
