use super::integrate::{loop_transport, transport_with_companion, Column, IntegratorConfig};
use super::path::PlanarPath;
use super::potential::{Charts, PoleLocation, PoleRecord, RationalPotential};
use crate::error::{Error, Result};
use crate::projective::{Complex, FixedLines, MapClass, ProjectiveMap, ProjectivePoint};
use crate::surface::Sign;

/// Eigenvalue matching tolerance for the regular framings.
pub const TAU_MATCH: f64 = 1e-6;

/// Gauss–Legendre nodes and weights on `[0, 1]`.
const GAUSS: [(f64, f64); 3] =
    [(0.112_701_665_379_258_31, 5.0 / 18.0), (0.5, 8.0 / 18.0), (0.887_298_334_620_741_7, 5.0 / 18.0)];

#[derive(Clone, Debug)]
pub struct Subdominant {
    pub line: ProjectivePoint,
    /// Solution column at the base point, up to scale.
    pub vector: Column,
    pub base: Complex,
    pub seed: Complex,
    /// `|Re ∫√φ|` accumulated from the base to the seed.
    pub decay: f64,
    pub wronskian_drift: Option<f64>,
}

/// Point on the central ray of a sector at distance `r` from `base`.
struct Ray {
    origin: Complex,
    dir: Complex,
    /// Largest admissible `r`.
    limit: f64,
    /// Distance from the origin to the pole for finite poles.
    to_pole: Option<f64>,
}

impl Ray {
    fn at(&self, r: f64) -> Complex {
        self.origin + self.dir * r
    }

    fn step(&self, r: f64, root: Complex) -> f64 {
        let geometric = match self.to_pole {
            Some(d) => 0.1 * (d - r),
            None => 0.1 * (1.0 + r + self.origin.norm()),
        };
        geometric.min(0.2 / root.norm().max(1e-300))
    }
}

fn sector_ray(pole: &PoleRecord, sector: usize, base: Complex, cfg: &IntegratorConfig) -> Result<Ray> {
    let theta =
        *pole.stokes_angles.get(sector).ok_or_else(|| Error::Invalid(format!("sector {sector} out of range")))?;
    let dir = Complex::from_polar(1.0, theta);
    match pole.location {
        PoleLocation::Infinity => Ok(Ray { origin: base, dir, limit: cfg.seed_radius_max, to_pole: None }),
        PoleLocation::Finite(p) => {
            let rel = base - p;
            if (rel - dir * rel.norm()).norm() > 1e-9 * rel.norm().max(1.0) || rel.norm() == 0.0 {
                return Err(Error::Invalid(format!("base point is not on the central ray of sector {sector}")));
            }
            let d = rel.norm();
            Ok(Ray { origin: base, dir: -dir, limit: d * (1.0 - 1.0 / cfg.seed_radius_max), to_pole: Some(d) })
        }
    }
}

/// The solution decaying toward the pole inside `sector`, as a line at `base`.
pub(crate) fn subdominant_in(
    phi: &RationalPotential,
    charts: &Charts,
    pole: &PoleRecord,
    sector: usize,
    base: Complex,
    cfg: &IntegratorConfig,
) -> Result<Subdominant> {
    if !pole.is_irregular() {
        return Err(Error::Invalid("subdominant solutions need a pole of order above two".into()));
    }
    let ray = sector_ray(pole, sector, base, cfg)?;
    let mut r = 0.0;
    let mut root = phi.eval(base).sqrt();
    let mut integral = Complex::new(0.0, 0.0);
    while integral.re.abs() < cfg.wkb_decay_target {
        let h = ray.step(r, root);
        if r + h > ray.limit || !h.is_finite() || h <= 0.0 {
            return Err(Error::SeedNotFound { sector });
        }
        for (x, w) in GAUSS {
            let mut s = phi.eval(ray.at(r + x * h)).sqrt();
            if (s - root).norm() > (s + root).norm() {
                s = -s;
            }
            root = s;
            integral += s * ray.dir * (w * h);
        }
        r += h;
    }
    let seed = ray.at(r);
    let p = phi.eval(seed);
    let mut s = p.sqrt();
    if s.norm() == 0.0 {
        return Err(Error::SeedNotFound { sector });
    }
    if (s * ray.dir).re < 0.0 {
        s = -s;
    }
    let log_derivative = phi.derivative_at(seed) / (4.0 * p);
    let sub = [Complex::new(1.0, 0.0), s + log_derivative];
    let dom = [Complex::new(1.0, 0.0), -s + log_derivative];
    let t = transport_with_companion(charts, &PlanarPath::line(seed, base), [sub, dom], cfg)?;
    let v = t.columns[0];
    let line = ProjectivePoint::new(v[0], v[1])?.normalized();
    Ok(Subdominant { line, vector: v, base, seed, decay: integral.re.abs(), wronskian_drift: t.wronskian_drift })
}

/// Subdominant line of `sector` at `pole`, transported to `base`.
pub fn subdominant(
    phi: &RationalPotential,
    pole: &PoleRecord,
    sector: usize,
    base: Complex,
    cfg: &IntegratorConfig,
) -> Result<Subdominant> {
    cfg.validate()?;
    subdominant_in(phi, &phi.charts(), pole, sector, base, cfg)
}

#[derive(Clone, Debug)]
pub struct RegularFrame {
    pub line: ProjectivePoint,
    pub base: Complex,
    /// Eigenvalue of the det-1 monodromy on `line`.
    pub eigenvalue: Complex,
    pub monodromy: ProjectiveMap,
    pub wronskian_drift: Option<f64>,
}

/// Counterclockwise circle around a regular pole with radius half the distance
/// to the nearest other finite pole; around ∞ the circle `|z| = R_∞` run clockwise.
pub fn default_loop(phi: &RationalPotential, pole: &PoleRecord) -> PlanarPath {
    let charts = phi.charts();
    match pole.location {
        PoleLocation::Finite(p) => {
            let nearest =
                charts.finite_poles.iter().filter(|q| **q != p).map(|q| (q - p).norm()).fold(f64::INFINITY, f64::min);
            let radius = if nearest.is_finite() { 0.5 * nearest } else { 1.0 };
            PlanarPath::circle(p, radius, 0.0)
        }
        PoleLocation::Infinity => {
            PlanarPath::arc(Complex::new(0.0, 0.0), charts.r_inf, 0.0, -2.0 * std::f64::consts::PI)
        }
    }
}

pub(crate) fn frame_regular_on(
    charts: &Charts,
    pole: &PoleRecord,
    index: usize,
    sign: Sign,
    lp: &PlanarPath,
    cfg: &IntegratorConfig,
) -> Result<RegularFrame> {
    let r = pole.exponent.ok_or_else(|| Error::Invalid("regular framings need a pole of order at most two".into()))?;
    let t = loop_transport(charts, lp, cfg)?;
    let m = ProjectiveMap::new(t.matrix())?;
    if m.classify() != MapClass::Semisimple {
        return Err(Error::ResonantOrApparent(index));
    }
    let FixedLines::Semisimple { points, eigenvalues } = m.fixed_lines()? else {
        return Err(Error::ResonantOrApparent(index));
    };
    let target = (r * sign.as_i32() as f64).exp();
    let hits: Vec<usize> = (0..2)
        .filter(|&i| (eigenvalues[i] / eigenvalues[1 - i] - target).norm() <= TAU_MATCH * target.norm())
        .collect();
    match hits.as_slice() {
        [i] => Ok(RegularFrame {
            line: points[*i],
            base: lp.start(),
            eigenvalue: eigenvalues[*i],
            monodromy: m.normalized(),
            wronskian_drift: t.wronskian_drift,
        }),
        [] => {
            let z = lp.start();
            Err(Error::StepFailure { re: z.re, im: z.im, reason: "monodromy eigenvalues miss the exponent".into() })
        }
        _ => Err(Error::AmbiguousMatch(index)),
    }
}

/// Eigenline at the loop base whose eigenvalue ratio is `exp(sign·r)`.
pub fn frame_regular(
    phi: &RationalPotential,
    pole: &PoleRecord,
    sign: Sign,
    cfg: &IntegratorConfig,
) -> Result<RegularFrame> {
    cfg.validate()?;
    let index = phi
        .analyze()?
        .iter()
        .position(|p| p.location == pole.location)
        .ok_or_else(|| Error::Invalid("pole does not belong to the potential".into()))?;
    frame_regular_on(&phi.charts(), pole, index, sign, &default_loop(phi, pole), cfg)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    fn inverse_square(a: Complex) -> RationalPotential {
        RationalPotential::new(vec![a], vec![c(0.0), c(0.0), c(1.0)]).unwrap()
    }

    #[test]
    fn airy_lines_are_distinct() {
        let phi = RationalPotential::polynomial(vec![c(0.0), c(1.0)]).unwrap();
        let pole = &phi.analyze().unwrap()[0];
        let cfg = IntegratorConfig::default();
        let lines: Vec<Subdominant> = (0..3).map(|k| subdominant(&phi, pole, k, c(0.0), &cfg).unwrap()).collect();
        for i in 0..3 {
            assert!(lines[i].decay >= 25.0);
            assert!(lines[i].wronskian_drift.unwrap() < 1e-8);
            for j in 0..i {
                assert!(lines[i].line.distance(&lines[j].line) > 1e-3);
            }
        }
        // sector 0 is the positive real axis, where Ai decays: Ai′(0)/Ai(0) = −3^{1/3}Γ(2/3)/Γ(1/3)
        let ratio = -lines[0].vector[1] / lines[0].vector[0];
        let want = -3f64.cbrt() * 1.354_117_939_426_400_4 / 2.678_938_534_707_747_6;
        assert!((ratio - want).norm() < 1e-8, "{ratio}");
    }

    #[test]
    fn decay_target_is_stable() {
        let phi = RationalPotential::polynomial(vec![c(0.5), c(0.0), c(1.0)]).unwrap();
        let pole = &phi.analyze().unwrap()[0];
        let cfg = IntegratorConfig::default();
        let deep = IntegratorConfig { wkb_decay_target: 50.0, ..cfg.clone() };
        for k in 0..4 {
            let a = subdominant(&phi, pole, k, c(0.0), &cfg).unwrap();
            let b = subdominant(&phi, pole, k, c(0.0), &deep).unwrap();
            assert!(a.line.distance(&b.line) < 1e-8);
        }
    }

    #[test]
    fn eigenvalue_law_and_signs() {
        let phi = inverse_square(c(1.0));
        let pole = &phi.analyze().unwrap()[0];
        let cfg = IntegratorConfig::default();
        let plus = frame_regular(&phi, pole, Sign::Plus, &cfg).unwrap();
        let minus = frame_regular(&phi, pole, Sign::Minus, &cfg).unwrap();
        assert!(plus.line.distance(&minus.line) > 1e-3);
        let r = Complex::new(0.0, 2.0 * PI * 5f64.sqrt());
        assert!((plus.eigenvalue / minus.eigenvalue - r.exp()).norm() < 1e-6);
        // the det-1 eigenvalue is −exp(r/2) up to the overall sign
        let want = -(r / 2.0).exp();
        assert!((plus.eigenvalue - want).norm().min((plus.eigenvalue + want).norm()) < 1e-6);
    }

    #[test]
    fn critical_exponent_is_resonant() {
        let phi = inverse_square(c(-0.25));
        let pole = &phi.analyze().unwrap()[0];
        assert!(matches!(
            frame_regular(&phi, pole, Sign::Plus, &Default::default()),
            Err(Error::ResonantOrApparent(0))
        ));
    }

    #[test]
    fn pole_at_infinity_is_framed() {
        let phi = inverse_square(c(1.3));
        let poles = phi.analyze().unwrap();
        assert_eq!(poles[1].location, PoleLocation::Infinity);
        let f = frame_regular(&phi, &poles[1], Sign::Plus, &Default::default()).unwrap();
        let r = poles[1].exponent.unwrap();
        assert!((f.eigenvalue * f.eigenvalue - r.exp()).norm() < 1e-6 * r.exp().norm());
    }
}
