//! Deterministic acceptance checks, shared by the integration tests and the
//! `selftest` command.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cluster::{
    coordinates, find_good, flip_consistency, mutate, raw_cross_ratios, reconstruct, CoordinateTuple,
};
use crate::error::Result;
use crate::framed::{degeneracy, DegeneracyKind, DevelopedFramedLocalSystem};
use crate::ode::{
    build_framed, default_loop, frame_regular, integrate, subdominant, BuiltSystem, IntegratorConfig, PoleRecord,
    RationalPotential, Realization,
};
use crate::projective::{Complex, MapClass, ProjectiveMap, ProjectivePoint};
use crate::surface::{default_triangulation, IdealTriangulation, Incidence, MarkedBorderedSurface, Sign, Signing};

/// Sample counts for a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Full,
    Quick,
}

impl Scale {
    fn pick(self, full: usize, quick: usize) -> usize {
        match self {
            Scale::Full => full,
            Scale::Quick => quick,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    /// Non-finite values are written as null.
    pub metrics: BTreeMap<&'static str, Option<f64>>,
    pub failures: Vec<String>,
}

impl Check {
    fn new(id: u32, name: &'static str) -> Self {
        Self { id, name, passed: true, metrics: BTreeMap::new(), failures: Vec::new() }
    }

    fn metric(&mut self, key: &'static str, v: f64) {
        self.metrics.insert(key, v.is_finite().then_some(v));
    }

    /// Records the largest value seen under `key`.
    fn worst(&mut self, key: &'static str, v: f64) {
        let slot = self.metrics.entry(key).or_insert(Some(0.0));
        *slot = match *slot {
            Some(old) if v.is_finite() => Some(old.max(v)),
            _ => None,
        };
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.passed = false;
            if self.failures.len() < 20 {
                self.failures.push(what());
            }
        }
    }

    fn outcome<T>(&mut self, r: Result<T>, what: &str) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.require(false, || format!("{what}: {e}"));
                None
            }
        }
    }
}

/// Wall-clock budget in seconds for each check.
pub fn time_limit(id: u32) -> f64 {
    match id {
        1 | 4 | 6 => 5.0,
        7 => 10.0,
        2 | 8 => 30.0,
        5 | 10 => 60.0,
        9 => 120.0,
        _ => f64::INFINITY,
    }
}

pub const IDS: [u32; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

pub fn run(id: u32, scale: Scale) -> Check {
    match id {
        1 => rank_law(scale),
        2 => cluster_identities(scale),
        3 => tag_rule(scale),
        4 => degeneracy_classifier(scale),
        5 => good_search(scale),
        6 => eigenvalue_law(),
        7 => stokes_geometry(),
        8 => weber(),
        9 => non_degeneracy(scale),
        10 => wkb_slope(),
        _ => {
            let mut c = Check::new(id, "unknown");
            c.require(false, || format!("no check {id}"));
            c
        }
    }
}

pub fn run_all(scale: Scale) -> Vec<Check> {
    IDS.iter().map(|&id| run(id, scale)).collect()
}

/// Surfaces exercised by the combinatorial checks.
pub fn catalog() -> Vec<MarkedBorderedSurface> {
    let mut v: Vec<_> = (3..=8).map(MarkedBorderedSurface::disc).collect();
    v.extend((1..=5).map(MarkedBorderedSurface::punctured_polygon));
    v.push(MarkedBorderedSurface::annulus(1, 1));
    v.push(MarkedBorderedSurface::annulus(2, 1));
    v.push(MarkedBorderedSurface::punctured_torus());
    v.push(MarkedBorderedSurface::sphere(4));
    v
}

fn triangulation(s: &MarkedBorderedSurface) -> IdealTriangulation {
    default_triangulation(s).expect("catalog surface").0
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Coordinates with log-uniform moduli in `[1/spread, spread]` and uniform phases.
fn random_tuple(t: &IdealTriangulation, spread: f64, rng: &mut ChaCha8Rng) -> CoordinateTuple {
    let l = spread.ln();
    CoordinateTuple::from_values(
        t.arcs().map(|e| (e, Complex::from_polar((rng.random_range(-l..=l)).exp(), rng.random_range(0.0..2.0 * PI)))),
    )
}

fn random_map(rng: &mut ChaCha8Rng) -> ProjectiveMap {
    loop {
        let mut z = || Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if let Ok(g) = ProjectiveMap::from_entries(z(), z(), z(), z()) {
            return g;
        }
    }
}

fn flippable(t: &IdealTriangulation) -> Vec<usize> {
    t.arcs().filter(|&e| !t.is_self_folded_interior(e)).collect()
}

fn c(re: f64) -> Complex {
    Complex::new(re, 0.0)
}

fn rel(a: Complex, b: Complex) -> f64 {
    (a - b).norm() / b.norm()
}

fn rank_law(scale: Scale) -> Check {
    let mut chk = Check::new(1, "rank law under random flips");
    let mut rng = rng(1);
    let steps = scale.pick(1000, 200);
    let mut visited = 0usize;
    for s in catalog() {
        let mut t = triangulation(&s);
        let n = s.rank();
        for step in 0..=steps {
            visited += 1;
            let ok = t.arc_count() as i64 == n && t.validate().is_ok();
            chk.require(ok, || format!("{} after {step} flips: {} arcs, rank {n}", s.signature(), t.arc_count()));
            let arcs = flippable(&t);
            if !ok || step == steps || arcs.is_empty() {
                break;
            }
            let e = arcs[rng.random_range(0..arcs.len())];
            match t.flip(e) {
                Ok(next) => t = next,
                Err(err) => chk.require(false, || format!("{}: flip of {e} failed: {err}", s.signature())),
            }
        }
    }
    chk.metric("triangulations", visited as f64);
    chk
}

fn cluster_identities(scale: Scale) -> Check {
    let mut chk = Check::new(2, "cluster identities");
    let mut rng = rng(2);
    let tuples = scale.pick(100, 10);
    for s in catalog() {
        let t = triangulation(&s);
        for i in 0..tuples {
            // alternate well-conditioned moduli in [1/2, 2] with moduli in [1e−3, 1e3]
            let (spread, tol, key) =
                if i % 2 == 0 { (2.0, 1e-12, "roundtrip_well") } else { (1e3, 1e-9, "roundtrip_wide") };
            let x = random_tuple(&t, spread, &mut rng);
            let Some(f) = chk.outcome(reconstruct(&t, &x), "reconstruct") else { continue };
            let Some(y) = chk.outcome(coordinates(&f, &t), "coordinates") else { continue };
            let d = y.max_rel_diff(&x);
            chk.worst(key, d);
            chk.require(d <= tol, || format!("{} roundtrip {d:e}", s.signature()));
        }
    }
    let sequences = scale.pick(4, 1);
    for s in catalog() {
        let t = triangulation(&s);
        for _ in 0..sequences {
            let x = random_tuple(&t, 2.0, &mut rng);
            let Some(mut f) = chk.outcome(reconstruct(&t, &x), "reconstruct") else { continue };
            for _ in 0..50 {
                // flips leaving moduli in [1e−3, 1e3] keep the developed points apart
                let base = f.base().clone();
                let Some(now) = chk.outcome(coordinates(&f, &base), "coordinates") else { break };
                let eps = base.exchange_matrix();
                let arcs: Vec<usize> = flippable(&base)
                    .into_iter()
                    .filter(|&k| {
                        mutate(&now, &eps, k).is_ok_and(|y| {
                            y.iter().all(|(_, v)| v.value().is_some_and(|z| z.norm().ln().abs() <= 3.0 * 10f64.ln()))
                        })
                    })
                    .collect();
                if arcs.is_empty() {
                    break;
                }
                let k = arcs[rng.random_range(0..arcs.len())];
                let Some(d) = chk.outcome(flip_consistency(&f, &base, k), "flip consistency") else { break };
                chk.worst("mutation_vs_flip", d);
                chk.require(d <= 1e-10, || format!("{} mutation at {k}: {d:e}", s.signature()));
                let Some(g) = chk.outcome(f.flip(k), "flip") else { break };
                f = g;
            }
        }
    }
    let t = triangulation(&MarkedBorderedSurface::disc(5));
    for _ in 0..scale.pick(20, 5) {
        let x0 = random_tuple(&t, 2.0, &mut rng);
        let mut x = x0.clone();
        let mut eps = t.exchange_matrix();
        for i in 0..5 {
            match mutate(&x, &eps, i % 2) {
                Ok(next) => x = next,
                Err(e) => chk.require(false, || format!("pentagon mutation: {e}")),
            }
            eps = eps.mutate(i % 2);
        }
        x.swap(0, 1);
        let d = x.max_rel_diff(&x0);
        chk.worst("pentagon", d);
        chk.require(d <= 1e-12, || format!("pentagon returns with {d:e}"));
    }
    chk
}

/// Flips arcs at `p` until its valency is one.
fn isolate(mut t: IdealTriangulation, p: usize) -> Option<IdealTriangulation> {
    for _ in 0..64 {
        let v = t.valency(p).ok()?;
        if v == 1 {
            return Some(t);
        }
        let next = flippable(&t).into_iter().find_map(|e| {
            let (a, b) = t.endpoints(e);
            if a != p && b != p {
                return None;
            }
            let g = t.flip(e).ok()?;
            (g.valency(p).ok()? < v).then_some(g)
        })?;
        t = next;
    }
    None
}

fn tag_rule(scale: Scale) -> Check {
    let mut chk = Check::new(3, "tag rule at valency-1 punctures");
    let mut rng = rng(3);
    let mut cases = 0usize;
    for k in 1..=5 {
        let s = MarkedBorderedSurface::punctured_polygon(k);
        let t0 = triangulation(&s);
        let p = t0.punctures().next().expect("one puncture");
        let Some(t) = isolate(t0, p) else {
            chk.require(false, || format!("{}: no valency-1 triangulation found", s.signature()));
            continue;
        };
        let j = t.arcs().find(|&e| t.self_folded(e).is_some_and(|(_, q, _)| q == p)).expect("self-folded interior");
        let (_, _, loop_arc) = t.self_folded(j).expect("self-folded");
        for _ in 0..scale.pick(20, 4) {
            let x = random_tuple(&t, 2.0, &mut rng);
            let Some(f) = chk.outcome(reconstruct(&t, &x), "reconstruct") else { continue };
            let Some(g) = chk.outcome(f.sign_flip(p), "sign flip") else { continue };
            cases += 1;
            let (y, y2) = (raw_cross_ratios(&f), raw_cross_ratios(&g));
            // a boundary loop carries Y_k = 1
            let encircled = t.is_arc(loop_arc);
            let yk = if encircled { y[&loop_arc].value() } else { Some(c(1.0)) };
            let (Some(yj), Some(yk)) = (y[&j].value(), yk) else {
                chk.require(false, || "irregular raw cross ratio".into());
                continue;
            };
            let mut want = vec![(j, c(1.0) / yj)];
            if encircled {
                want.push((loop_arc, yj * yk));
            }
            for (e, w) in want {
                let d = y2[&e].value().map_or(f64::INFINITY, |v| rel(v, w));
                chk.worst("tag_rule", d);
                chk.require(d <= 1e-10, || format!("{}: arc {e} after sign flip off by {d:e}", s.signature()));
            }
            for e in t.arcs().filter(|&e| e != j && e != loop_arc) {
                let d = match (y[&e].value(), y2[&e].value()) {
                    (Some(a), Some(b)) => rel(b, a),
                    _ => f64::INFINITY,
                };
                chk.worst("other_arcs", d);
                chk.require(d <= 1e-10, || format!("{}: arc {e} moved under a sign flip", s.signature()));
            }
            if !encircled {
                continue;
            }
            // the representative with −1 at p against the relabelled one with +1
            let Some(minus) = chk.outcome(coordinates(&g, &t), "coordinates") else { continue };
            let mut swapped = f.clone();
            swapped.swap_labels(j, loop_arc);
            let Some(plus) = chk.outcome(coordinates(&swapped, swapped.base()), "coordinates") else { continue };
            let d = minus.max_rel_diff(&plus);
            chk.worst("representatives", d);
            chk.require(d <= 1e-10, || format!("{}: representatives differ by {d:e}", s.signature()));
        }
    }
    chk.metric("cases", cases as f64);
    chk
}

/// Seeds one framing per marked point at its first corner in table order.
fn seeds(t: &IdealTriangulation, value: impl Fn(usize) -> ProjectivePoint) -> Vec<(Incidence, ProjectivePoint)> {
    (0..t.marked().len())
        .filter_map(|p| {
            t.triangles()
                .iter()
                .enumerate()
                .find_map(|(i, tri)| tri.corners.iter().position(|&q| q == p).map(|s| Incidence::new(i, s)))
                .map(|inc| (inc, value(p)))
        })
        .collect()
}

fn gluings_by(t: &IdealTriangulation, g: impl Fn(usize) -> ProjectiveMap) -> Vec<Option<ProjectiveMap>> {
    (0..t.edges().len()).map(|e| t.is_arc(e).then(|| g(e))).collect()
}

/// Moves the framing at one end of a boundary segment onto the other end.
fn merge_boundary_neighbours(f: &DevelopedFramedLocalSystem) -> Result<DevelopedFramedLocalSystem> {
    let t = f.base();
    let e = t
        .boundary_segments()
        .find(|&e| {
            let (a, b) = t.endpoints(e);
            a != b
        })
        .expect("a boundary segment with distinct ends");
    let inc = t.edge(e).incidences[0];
    f.reframe(Incidence::new(inc.triangle, (inc.side + 1) % 3), f.corner(inc))
}

/// Twelve constructed systems with their expected verdicts.
pub fn degeneracy_witnesses() -> Vec<(String, DevelopedFramedLocalSystem, DegeneracyKind)> {
    let mut rng = rng(44);
    let mut out = Vec::new();
    let zero = ProjectivePoint::affine(c(0.0));
    let inf = ProjectivePoint::infinity();
    for s in [
        MarkedBorderedSurface::disc(5),
        MarkedBorderedSurface::disc(6),
        MarkedBorderedSurface::punctured_polygon(3),
        MarkedBorderedSurface::annulus(2, 1),
    ] {
        let t = triangulation(&s);
        let f = reconstruct(&t, &random_tuple(&t, 2.0, &mut rng)).expect("regular tuple");
        out.push((
            format!("D1 {}", s.signature()),
            merge_boundary_neighbours(&f).expect("boundary point"),
            DegeneracyKind::D1,
        ));
    }
    let diagonal =
        |e: usize| ProjectiveMap::from_entries(c(2.0 + e as f64), c(0.0), c(0.0), c(1.0)).expect("invertible");
    for (s, values) in [
        (MarkedBorderedSurface::sphere(4), vec![zero, zero, inf, inf]),
        (MarkedBorderedSurface::punctured_torus(), vec![zero]),
        (MarkedBorderedSurface::disc(4), vec![zero, inf, zero, inf]),
    ] {
        let t = triangulation(&s);
        let glue = if s.is_closed() { gluings_by(&t, diagonal) } else { gluings_by(&t, |_| ProjectiveMap::identity()) };
        let sd = seeds(&t, |p| values[p]);
        let f = DevelopedFramedLocalSystem::develop(t, glue, &sd).expect("consistent witness");
        out.push((format!("D2 {}", s.signature()), f, DegeneracyKind::D2));
    }
    // an involution swapping 2 and 1/2 around the core of the annulus
    let s = MarkedBorderedSurface::annulus(1, 1);
    let t = triangulation(&s);
    let swap = ProjectiveMap::from_entries(c(0.0), c(1.0), c(1.0), c(0.0)).expect("invertible");
    let arcs: Vec<usize> = t.arcs().collect();
    let glue = gluings_by(&t, |e| if e == arcs[1] { swap } else { ProjectiveMap::identity() });
    let sd = seeds(&t, |_| ProjectivePoint::affine(c(2.0)));
    let f = DevelopedFramedLocalSystem::develop(t, glue, &sd).expect("consistent witness");
    out.push((format!("D2 swap {}", s.signature()), f, DegeneracyKind::D2));
    let shifts = [c(1.0), Complex::new(0.0, 1.0), Complex::new(2.0, 1.0), Complex::new(-0.5, 0.3)];
    for (i, s) in [
        MarkedBorderedSurface::punctured_torus(),
        MarkedBorderedSurface::sphere(4),
        MarkedBorderedSurface::sphere(5),
        MarkedBorderedSurface::punctured_torus(),
    ]
    .into_iter()
    .enumerate()
    {
        let t = triangulation(&s);
        let glue = gluings_by(&t, |e| {
            ProjectiveMap::from_entries(c(1.0), shifts[(e + i) % 4] * (1.0 + e as f64), c(0.0), c(1.0))
                .expect("invertible")
        });
        let sd = seeds(&t, |_| inf);
        let f = DevelopedFramedLocalSystem::develop(t, glue, &sd).expect("consistent witness");
        let f = if i % 2 == 1 { f.conjugate(&random_map(&mut rng)) } else { f };
        out.push((format!("D3 {}", s.signature()), f, DegeneracyKind::D3));
    }
    out
}

fn degeneracy_classifier(scale: Scale) -> Check {
    let mut chk = Check::new(4, "degeneracy classifier");
    let witnesses = degeneracy_witnesses();
    for (name, f, want) in &witnesses {
        let v = degeneracy(f);
        chk.require(v.kind() == *want, || format!("{name}: got {:?}", v.kind()));
        chk.require(v.verify(f), || format!("{name}: witness does not verify"));
    }
    chk.metric("witnesses", witnesses.len() as f64);
    let mut rng = rng(4);
    let surfaces = catalog();
    let samples = scale.pick(100, 20);
    for i in 0..samples {
        let t = triangulation(&surfaces[i % surfaces.len()]);
        let Some(f) = chk.outcome(reconstruct(&t, &random_tuple(&t, 1e2, &mut rng)), "reconstruct") else { continue };
        let v = degeneracy(&f);
        chk.require(v.is_none(), || format!("{}: random system classified {:?}", t.surface().signature(), v.kind()));
    }
    chk.metric("random", samples as f64);
    chk
}

/// Moves the framing of a boundary end of a random arc onto its other end,
/// keeping the system non-degenerate. Returns `None` when no end qualifies.
fn adversarial_merge(f: &DevelopedFramedLocalSystem, rng: &mut ChaCha8Rng) -> Option<DevelopedFramedLocalSystem> {
    let t = f.base();
    let arcs: Vec<usize> = t.arcs().collect();
    if arcs.is_empty() {
        return None;
    }
    let start = rng.random_range(0..arcs.len());
    for i in 0..arcs.len() {
        let e = arcs[(start + i) % arcs.len()];
        if f.edge_is_bad(e) {
            continue;
        }
        let inc = t.edge(e).incidences[0];
        let ends = [inc, Incidence::new(inc.triangle, (inc.side + 1) % 3)];
        for (k, at) in ends.into_iter().enumerate() {
            let p = t.triangle(at.triangle).corners[at.side];
            if t.marked()[p].is_puncture() {
                continue;
            }
            let Ok(g) = f.reframe(at, f.corner(ends[1 - k])) else { continue };
            if degeneracy(&g).is_none() {
                return Some(g);
            }
        }
    }
    None
}

fn good_search(scale: Scale) -> Check {
    let mut chk = Check::new(5, "good triangulation search");
    let mut rng = rng(5);
    let surfaces = catalog();
    let samples = scale.pick(200, 28);
    let (mut merges, mut worst_moves, mut worst_ratio) = (0usize, 0usize, 0.0f64);
    for i in 0..samples {
        let s = &surfaces[i % surfaces.len()];
        let t = triangulation(s);
        let Some(mut f) = chk.outcome(reconstruct(&t, &random_tuple(&t, 1e2, &mut rng)), "reconstruct") else {
            continue;
        };
        for _ in 0..rng.random_range(0..=3) {
            if let Some(g) = adversarial_merge(&f, &mut rng) {
                f = g;
                merges += 1;
            }
        }
        let Some(r) = chk.outcome(find_good(&f, &t), &format!("find_good on {}", s.signature())) else { continue };
        let n = t.arc_count();
        worst_moves = worst_moves.max(r.moves);
        worst_ratio = worst_ratio.max(r.moves as f64 / (n * n) as f64);
        chk.require(r.moves <= 20 * n * n, || format!("{}: {} moves", s.signature(), r.moves));
        chk.require(r.coordinates.len() == n && r.coordinates.is_regular(), || {
            format!("{}: irregular output coordinates", s.signature())
        });
        chk.require(r.framed.base().arcs().all(|e| !r.framed.edge_is_bad(e)) || !r.sign_flips.is_empty(), || {
            format!("{}: bad arc left", s.signature())
        });
        if !s.is_closed() {
            chk.require(r.tagged.signing().is_trivial(), || format!("{}: nontrivial signing", s.signature()));
        }
    }
    chk.metric("samples", samples as f64);
    chk.metric("merges", merges as f64);
    chk.metric("max_moves", worst_moves as f64);
    chk.metric("max_moves_over_n2", worst_ratio);
    chk
}

fn inverse_square(a: Complex) -> RationalPotential {
    RationalPotential::new(vec![a], vec![c(0.0), c(0.0), c(1.0)]).expect("valid potential")
}

fn eigenvalue_law() -> Check {
    let mut chk = Check::new(6, "eigenvalue law for c/z²");
    let cfg = IntegratorConfig { rel_tol: 1e-10, ..Default::default() };
    for a in [c(1.0), Complex::new(2.0, 1.0), c(-0.3)] {
        let phi = inverse_square(a);
        let Some(poles) = chk.outcome(phi.analyze(), "analyze") else { continue };
        let pole = &poles[0];
        let plus = chk.outcome(frame_regular(&phi, pole, Sign::Plus, &cfg), "frame +");
        let minus = chk.outcome(frame_regular(&phi, pole, Sign::Minus, &cfg), "frame −");
        if let (Some(p), Some(m)) = (plus, minus) {
            let want = (Complex::new(0.0, 2.0 * PI) * (c(1.0) + 4.0 * a).sqrt()).exp();
            let d = rel(p.eigenvalue / m.eigenvalue, want);
            chk.worst("ratio_rel_err", d);
            chk.require(d <= 1e-6, || format!("c = {a}: ratio off by {d:e}"));
        }
    }
    let phi = inverse_square(c(-0.25));
    if let Some(poles) = chk.outcome(phi.analyze(), "analyze") {
        let lp = default_loop(&phi, &poles[0]);
        let id = [[c(1.0), c(0.0)], [c(0.0), c(1.0)]];
        if let Some(t) = chk.outcome(integrate(&phi, &lp, &id, &cfg), "integrate") {
            let m = t.matrix();
            let trace = m[0][0] + m[1][1];
            let d = (trace / 2.0 - c(-1.0)).norm();
            chk.metric("critical_eigenvalue_err", d);
            chk.require(d <= 1e-6, || format!("critical eigenvalue {}", trace / 2.0));
            if let Some(pm) = chk.outcome(ProjectiveMap::new(m), "monodromy") {
                chk.require(pm.classify() == MapClass::Parabolic, || format!("critical class {:?}", pm.classify()));
            }
        }
    }
    chk
}

fn stokes_geometry() -> Check {
    let mut chk = Check::new(7, "Stokes geometry");
    let cfg = IntegratorConfig::default();
    for d in [1usize, 2] {
        let mut coeffs = vec![c(0.0); d + 1];
        coeffs[d] = c(1.0);
        let phi = RationalPotential::polynomial(coeffs).expect("valid potential");
        let Some(poles) = chk.outcome(phi.analyze(), "analyze") else { continue };
        let pole = &poles[0];
        let m = d + 4;
        chk.require(pole.order == m && pole.stokes_angles.len() == m - 2, || {
            format!("z^{d}: order {} with {} Stokes directions", pole.order, pole.stokes_angles.len())
        });
        for (k, th) in pole.stokes_angles.iter().enumerate() {
            let want = 2.0 * PI * k as f64 / (m - 2) as f64;
            chk.worst("angle_err", (th - want).abs());
            chk.require((th - want).abs() < 1e-12, || format!("z^{d}: angle {k} is {th}"));
        }
        let lines = subdominants(&mut chk, &phi, pole, &cfg);
        if d == 1 {
            for i in 0..lines.len() {
                for j in 0..i {
                    let sep = lines[i].distance(&lines[j]);
                    chk.require(sep > 1e-3, || format!("Airy lines {i} and {j} coincide"));
                }
            }
            chk.require(lines.len() == 3, || "Airy lines missing".into());
        }
        if let Some(b) = chk.outcome(build_framed(&phi, &Signing::default(), &Realization::Auto, &cfg), "build") {
            chk.worst("wronskian_drift", b.max_drift);
            chk.require(b.max_drift <= 1e-8, || format!("z^{d}: build drift {:e}", b.max_drift));
        }
    }
    chk
}

fn subdominants(
    chk: &mut Check,
    phi: &RationalPotential,
    pole: &PoleRecord,
    cfg: &IntegratorConfig,
) -> Vec<ProjectivePoint> {
    let mut out = Vec::new();
    for k in 0..pole.stokes_angles.len() {
        if let Some(s) = chk.outcome(subdominant(phi, pole, k, c(0.0), cfg), "subdominant") {
            let drift = s.wronskian_drift.unwrap_or(f64::INFINITY);
            chk.worst("wronskian_drift", drift);
            chk.require(drift <= 1e-8, || format!("sector {k}: drift {drift:e}"));
            out.push(s.line);
        }
    }
    out
}

/// Recessive solution of `y″ = z²y` on the positive axis, from its Taylor series at 0.
pub mod weber_oracle {
    /// Coefficients of the even and odd solutions `1 + …` and `z + …`.
    fn series(len: usize) -> (Vec<f64>, Vec<f64>) {
        let mut even = vec![0.0; len];
        let mut odd = vec![0.0; len];
        even[0] = 1.0;
        odd[1] = 1.0;
        for n in 0..len - 2 {
            let d = ((n + 2) * (n + 1)) as f64;
            if n >= 2 {
                even[n + 2] = even[n - 2] / d;
                odd[n + 2] = odd[n - 2] / d;
            }
        }
        (even, odd)
    }

    fn eval(c: &[f64], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, a| acc * x + a)
    }

    /// `−y′(0)/y(0)` of the recessive solution, from the ratio of the even and odd
    /// solutions at `x`: both grow like `e^{x²/2}` while the recessive one decays.
    pub fn log_derivative_at(x: f64) -> f64 {
        let (even, odd) = series(400);
        eval(&even, x) / eval(&odd, x)
    }

    /// Closed form `2Γ(3/4)/Γ(1/4)`.
    pub fn closed_form() -> f64 {
        2.0 * 1.225_416_702_465_178 / 3.625_609_908_221_908
    }
}

fn weber() -> Check {
    let mut chk = Check::new(8, "Weber oracle for z²");
    let k5 = weber_oracle::log_derivative_at(5.0);
    let k6 = weber_oracle::log_derivative_at(6.0);
    let kc = weber_oracle::closed_form();
    chk.metric("oracle_self_consistency", (k5 - k6).abs());
    chk.metric("oracle_vs_closed_form", (k6 - kc).abs());
    chk.require((k5 - k6).abs() < 1e-9 && (k6 - kc).abs() < 1e-9, || format!("oracle {k5} {k6} {kc}"));
    let phi = RationalPotential::polynomial(vec![c(0.0), c(0.0), c(1.0)]).expect("valid potential");
    let mut values = Vec::new();
    let mut finest: Option<BuiltSystem> = None;
    for tol in [1e-8, 1e-9, 1e-10, 1e-11] {
        let cfg = IntegratorConfig { rel_tol: tol, ..Default::default() };
        let Some(b) = chk.outcome(build_framed(&phi, &Signing::default(), &Realization::Auto, &cfg), "build") else {
            return chk;
        };
        let Some(x) = chk.outcome(coordinates(&b.framed, &b.triangulation), "coordinates") else { return chk };
        values.push(x.value(0).unwrap_or(Complex::new(f64::NAN, f64::NAN)));
        finest = Some(b);
    }
    let last = values[values.len() - 1];
    let spread = values.iter().map(|v| (v - last).norm()).fold(0.0, f64::max);
    chk.metric("tolerance_spread", spread);
    chk.require(spread < 1e-6, || format!("coordinate moves by {spread:e} across tolerances"));
    let b = finest.expect("built");
    // sector k decays along i^k: its line at 0 is (1, i^{−k}κ)
    let line = |p: usize| ProjectivePoint::new(c(1.0), Complex::new(0.0, -1.0).powi(p as i32) * k6).expect("nonzero");
    let mut line_err: f64 = 0.0;
    for (t, tri) in b.framed.corners().iter().enumerate() {
        for s in 0..3 {
            let p = b.triangulation.triangle(t).corners[s];
            line_err = line_err.max(tri[s].distance(&line(p)));
        }
    }
    chk.metric("line_err", line_err);
    chk.require(line_err < 1e-6, || format!("framing lines off the oracle by {line_err:e}"));
    let t = b.triangulation.clone();
    let sd = seeds(&t, line);
    let glue = gluings_by(&t, |_| ProjectiveMap::identity());
    let oracle = DevelopedFramedLocalSystem::develop(t.clone(), glue, &sd).and_then(|f| coordinates(&f, &t));
    if let Some(xo) = chk.outcome(oracle, "oracle coordinates") {
        let xo = xo.value(0).unwrap_or(Complex::new(f64::NAN, f64::NAN));
        let d = (last - xo).norm();
        chk.metric("coordinate", last.re);
        chk.metric("coordinate_err", d);
        chk.require(d < 1e-6, || format!("coordinate {last} against oracle {xo}"));
    }
    chk
}

fn random_polynomial(rng: &mut ChaCha8Rng) -> RationalPotential {
    let d = rng.random_range(2..=6usize);
    let mut disc = |floor: f64| loop {
        let z = Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if z.norm() <= 1.0 && z.norm() >= floor {
            return z;
        }
    };
    let mut coeffs: Vec<Complex> = (0..d).map(|_| disc(0.0)).collect();
    coeffs.push(disc(0.1));
    RationalPotential::polynomial(coeffs).expect("valid potential")
}

fn non_degeneracy(scale: Scale) -> Check {
    let mut chk = Check::new(9, "non-degeneracy of random polynomial systems");
    let mut rng = rng(9);
    let cfg = IntegratorConfig::default();
    let samples = scale.pick(50, 8);
    let (mut moved, mut drift) = (0usize, 0.0f64);
    for _ in 0..samples {
        let phi = random_polynomial(&mut rng);
        let Some(b) = chk.outcome(build_framed(&phi, &Signing::default(), &Realization::Auto, &cfg), "build") else {
            continue;
        };
        drift = drift.max(b.max_drift);
        let v = degeneracy(&b.framed);
        chk.require(v.is_none(), || format!("degree {:?}: verdict {:?}", phi.numerator().degree(), v.kind()));
        if let Some(r) = chk.outcome(find_good(&b.framed, &b.triangulation), "find_good") {
            moved += usize::from(r.moves > 0);
            chk.require(r.coordinates.is_regular(), || "irregular coordinates".into());
        }
    }
    chk.metric("samples", samples as f64);
    chk.metric("needed_moves", moved as f64);
    chk.metric("max_drift", drift);
    chk
}

/// `∮ √(z² − 1) dz` over `|z| = 2` counterclockwise, with the root continued along the circle.
pub fn wkb_period_oracle(points: usize) -> Complex {
    let mut sum = Complex::new(0.0, 0.0);
    let mut prev: Option<Complex> = None;
    for k in 0..points {
        let th = 2.0 * PI * k as f64 / points as f64;
        let z = Complex::from_polar(2.0, th);
        let mut r = (z * z - 1.0).sqrt();
        if let Some(p) = prev {
            if (r - p).norm() > (r + p).norm() {
                r = -r;
            }
        }
        prev = Some(r);
        sum += r * Complex::new(0.0, 1.0) * z;
    }
    sum * (2.0 * PI / points as f64)
}

fn wkb_slope() -> Check {
    let mut chk = Check::new(10, "WKB slope for z² − 1");
    let i_coarse = wkb_period_oracle(256);
    let oracle = wkb_period_oracle(1024);
    chk.metric("oracle_self_consistency", (i_coarse - oracle).norm());
    chk.require((i_coarse - oracle).norm() < 1e-10, || "period quadrature did not converge".into());
    let phi = RationalPotential::polynomial(vec![c(-1.0), c(0.0), c(1.0)]).expect("valid potential");
    let Some(table) = chk.outcome(crate::ode::wkb_sweep(&phi, &[], &[0.2, 0.1, 0.05], &Default::default()), "sweep")
    else {
        return chk;
    };
    for &a in &table.arcs {
        let Some(slope) = table.slope(a) else {
            chk.require(false, || format!("arc {a}: no slope"));
            continue;
        };
        // the orientation of the period is a convention
        let d = (slope - oracle).norm().min((slope + oracle).norm()) / oracle.norm();
        chk.worst("slope_rel_err", d);
        chk.metric("slope_im", slope.im);
        chk.require(d <= 0.02, || format!("arc {a}: slope {slope} against {oracle}"));
    }
    chk
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weber_oracle_converges() {
        let k = weber_oracle::log_derivative_at(6.0);
        assert!((k - weber_oracle::closed_form()).abs() < 1e-10, "{k}");
    }

    #[test]
    fn period_oracle_is_pi() {
        assert!((wkb_period_oracle(512).norm() - PI).abs() < 1e-12);
    }

    #[test]
    fn witnesses_validate() {
        for (name, f, _) in degeneracy_witnesses() {
            assert!(f.validate().is_ok(), "{name}: {:?}", f.validate());
        }
    }
}
