use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::integrate::{transport, Column, IntegratorConfig};
use super::path::PlanarPath;
use super::potential::{Charts, PoleLocation, PoleRecord, PotentialSurface, RationalPotential};
use super::stokes::{frame_regular_on, subdominant_in};
use crate::error::{Error, Result};
use crate::framed::DevelopedFramedLocalSystem;
use crate::projective::{Complex, ProjectiveMap, ProjectivePoint};
use crate::surface::{default_triangulation, IdealTriangulation, MarkedPoint, Signing};

/// Pole behind a marked point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Anchor {
    Puncture { pole: usize },
    Stokes { pole: usize, sector: usize },
}

/// A triangulation drawn in the plane: a base point per triangle, a path from it
/// to each corner, and a path across each arc between the two base points.
#[derive(Clone, Debug)]
pub struct PlanarRealization {
    pub triangulation: IdealTriangulation,
    /// One anchor per marked point.
    pub anchors: Vec<Anchor>,
    pub base_points: Vec<Complex>,
    /// Path from the base point to the anchor point of each corner. A Stokes corner
    /// ends on the central ray of its sector, a puncture corner anywhere on a
    /// circle around the pole enclosing no other pole.
    pub corner_paths: Vec<[PlanarPath; 3]>,
    /// Per edge: for arcs, a path from the base of the first incidence to the base of the second.
    pub crossings: Vec<Option<PlanarPath>>,
}

#[derive(Clone, Debug)]
pub enum Realization {
    /// Polynomial potentials: fan triangulation with every corner at the origin.
    Auto,
    UserPlanar(PlanarRealization),
}

#[derive(Clone, Debug)]
pub struct BuiltSystem {
    pub surface: PotentialSurface,
    pub triangulation: IdealTriangulation,
    pub framed: DevelopedFramedLocalSystem,
    pub poles: Vec<PoleRecord>,
    /// Largest Wronskian drift over all transports with two columns.
    pub max_drift: f64,
}

fn column_of(p: &ProjectivePoint) -> Column {
    [p.a(), p.b()]
}

struct Builder<'a> {
    phi: &'a RationalPotential,
    charts: Charts,
    poles: Vec<PoleRecord>,
    cfg: &'a IntegratorConfig,
    drift: f64,
}

impl Builder<'_> {
    fn note(&mut self, d: Option<f64>) {
        if let Some(d) = d {
            self.drift = self.drift.max(d);
        }
    }

    fn stokes_line(&mut self, pole: usize, sector: usize, at: Complex) -> Result<ProjectivePoint> {
        let s = subdominant_in(self.phi, &self.charts, &self.poles[pole], sector, at, self.cfg)?;
        self.note(s.wronskian_drift);
        Ok(s.line)
    }

    fn regular_line(&mut self, pole: usize, sign: crate::surface::Sign, at: Complex) -> Result<ProjectivePoint> {
        let lp = match self.poles[pole].location {
            PoleLocation::Finite(p) => {
                let rel = at - p;
                let enclosed = self.charts.finite_poles.iter().any(|q| *q != p && (q - p).norm() <= rel.norm());
                if enclosed || rel.norm() == 0.0 {
                    return Err(Error::Invalid(format!("puncture loop at pole {pole} encloses another pole")));
                }
                PlanarPath::circle(p, rel.norm(), rel.arg())
            }
            PoleLocation::Infinity => {
                if self.charts.finite_poles.iter().any(|q| q.norm() >= at.norm()) {
                    return Err(Error::Invalid("loop around ∞ must enclose every finite pole".into()));
                }
                PlanarPath::arc(Complex::new(0.0, 0.0), at.norm(), at.arg(), -2.0 * PI)
            }
        };
        let f = frame_regular_on(&self.charts, &self.poles[pole], pole, sign, &lp, self.cfg)?;
        self.note(f.wronskian_drift);
        Ok(f.line)
    }

    fn carry(&mut self, p: &ProjectivePoint, path: &PlanarPath) -> Result<ProjectivePoint> {
        let t = transport(&self.charts, path, &[column_of(p)], self.cfg)?;
        let v = t.columns[0];
        Ok(ProjectivePoint::new(v[0], v[1])?.normalized())
    }

    fn holonomy(&mut self, path: &PlanarPath) -> Result<ProjectiveMap> {
        let id = [[Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)], [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)]];
        let t = transport(&self.charts, path, &id, self.cfg)?;
        self.note(t.wronskian_drift);
        Ok(ProjectiveMap::new(t.matrix())?.normalized())
    }

    fn auto(&mut self, surface: &PotentialSurface) -> Result<(IdealTriangulation, DevelopedFramedLocalSystem)> {
        let (t, _) = default_triangulation(&surface.surface)?;
        let pole = surface.circles[0];
        let origin = Complex::new(0.0, 0.0);
        let mut lines = Vec::new();
        for m in t.marked() {
            let MarkedPoint::Boundary { position, .. } = m else { unreachable!("discs have no punctures") };
            lines.push(self.stokes_line(pole, *position, origin)?);
        }
        let corners = t.triangles().iter().map(|tri| tri.corners.map(|c| lines[c])).collect();
        let gluings = (0..t.edges().len()).map(|e| t.is_arc(e).then(ProjectiveMap::identity)).collect();
        let f = DevelopedFramedLocalSystem::new(t.clone(), corners, gluings)?;
        Ok((t, f))
    }

    fn planar(
        &mut self,
        surface: &PotentialSurface,
        r: &PlanarRealization,
        signing: &Signing,
    ) -> Result<(IdealTriangulation, DevelopedFramedLocalSystem)> {
        let t = &r.triangulation;
        if t.surface() != &surface.surface {
            return Err(Error::Invalid(format!(
                "triangulation of {} given for a potential on {}",
                t.surface().signature(),
                surface.surface.signature()
            )));
        }
        t.validate().into_result()?;
        let ntri = t.triangles().len();
        if r.anchors.len() != t.marked().len()
            || r.base_points.len() != ntri
            || r.corner_paths.len() != ntri
            || r.crossings.len() != t.edges().len()
        {
            return Err(Error::Invalid("realization tables do not match the triangulation".into()));
        }
        for (id, (m, a)) in t.marked().iter().zip(&r.anchors).enumerate() {
            let ok = match (m, a) {
                (MarkedPoint::Puncture, Anchor::Puncture { pole }) => {
                    self.poles.get(*pole).is_some_and(|p| !p.is_irregular())
                }
                (MarkedPoint::Boundary { .. }, Anchor::Stokes { pole, sector }) => {
                    self.poles.get(*pole).is_some_and(|p| p.is_irregular() && *sector < p.order - 2)
                }
                _ => false,
            };
            if !ok {
                return Err(Error::Invalid(format!("marked point {id} has an incompatible anchor")));
            }
        }
        let mut cache: BTreeMap<(usize, [u64; 2]), ProjectivePoint> = BTreeMap::new();
        let mut corners = Vec::with_capacity(ntri);
        for (ti, tri) in t.triangles().iter().enumerate() {
            let mut pts = [ProjectivePoint::infinity(); 3];
            for i in 0..3 {
                let path = &r.corner_paths[ti][i];
                if (path.start() - r.base_points[ti]).norm() > 1e-9 * (1.0 + path.start().norm()) {
                    return Err(Error::Invalid(format!("corner path {i} of triangle {ti} does not start at its base")));
                }
                let id = tri.corners[i];
                let q = path.end();
                let key = (id, [q.re.to_bits(), q.im.to_bits()]);
                let line = match cache.get(&key) {
                    Some(l) => *l,
                    None => {
                        let l = match r.anchors[id] {
                            Anchor::Stokes { pole, sector } => self.stokes_line(pole, sector, q)?,
                            Anchor::Puncture { pole } => self.regular_line(pole, signing.get(id), q)?,
                        };
                        cache.insert(key, l);
                        l
                    }
                };
                pts[i] = self.carry(&line, &path.reversed())?;
            }
            corners.push(pts);
        }
        let mut gluings = Vec::with_capacity(t.edges().len());
        for (e, edge) in t.edges().iter().enumerate() {
            if !t.is_arc(e) {
                gluings.push(None);
                continue;
            }
            let path =
                r.crossings[e].as_ref().ok_or_else(|| Error::Invalid(format!("arc {e} has no crossing path")))?;
            let (x, y) = (edge.incidences[0].triangle, edge.incidences[1].triangle);
            let tol = |a: Complex, b: Complex| (a - b).norm() <= 1e-9 * (1.0 + a.norm());
            if !tol(path.start(), r.base_points[x]) || !tol(path.end(), r.base_points[y]) {
                return Err(Error::Invalid(format!("crossing path of arc {e} does not join its base points")));
            }
            gluings.push(Some(self.holonomy(path)?));
        }
        let f = DevelopedFramedLocalSystem::new(t.clone(), corners, gluings)?;
        let report = f.validate();
        if !report.is_ok() {
            return Err(Error::Invalid(format!(
                "realization paths are inconsistent: {}",
                report.violations.join("; ")
            )));
        }
        Ok((t.clone(), f))
    }
}

/// Framed monodromy system of `φ` on a triangulation of its surface.
pub fn build_framed(
    phi: &RationalPotential,
    signing: &Signing,
    realization: &Realization,
    cfg: &IntegratorConfig,
) -> Result<BuiltSystem> {
    cfg.validate()?;
    let surface = phi.surface_of()?;
    if surface.degenerate {
        return Err(Error::DegenerateSurface);
    }
    let mut b = Builder { phi, charts: phi.charts(), poles: phi.analyze()?, cfg, drift: 0.0 };
    let (triangulation, framed) = match realization {
        Realization::Auto => {
            if !phi.is_polynomial() {
                return Err(Error::RealizationRequired);
            }
            b.auto(&surface)?
        }
        Realization::UserPlanar(r) => b.planar(&surface, r, signing)?,
    };
    Ok(BuiltSystem { surface, triangulation, framed, poles: b.poles, max_drift: b.drift })
}

impl PlanarRealization {
    /// Wedge realization for an irregular pole at ∞ and one regular pole at `center`:
    /// arc `i` follows the Stokes ray `θ_i`, triangle `i` has its base at radius
    /// `radius` between `θ_i` and `θ_{i+1}`, puncture corners meet the pole's loop
    /// at half that radius.
    pub fn punctured_polygon(phi: &RationalPotential, radius: f64) -> Result<Self> {
        let surface = phi.surface_of()?;
        let poles = phi.analyze()?;
        let (&[inf], &[reg]) = (surface.circles.as_slice(), surface.punctures.as_slice()) else {
            return Err(Error::UnsupportedSurface(surface.surface.signature()));
        };
        let PoleLocation::Finite(center) = poles[reg].location else {
            return Err(Error::UnsupportedSurface("regular pole at ∞".into()));
        };
        if poles[inf].location != PoleLocation::Infinity {
            return Err(Error::UnsupportedSurface("irregular pole away from ∞".into()));
        }
        let (t, _) = default_triangulation(&surface.surface)?;
        let k = poles[inf].order - 2;
        let theta = |i: usize| poles[inf].stokes_angles[i % k] + 2.0 * PI * (i / k) as f64;
        let mid = |i: usize| 0.5 * (theta(i) + theta(i + 1));
        let at = |rho: f64, a: f64| center + Complex::from_polar(rho, a);
        let mut anchors: Vec<Anchor> = (0..k).map(|s| Anchor::Stokes { pole: inf, sector: s }).collect();
        anchors.push(Anchor::Puncture { pole: reg });
        let base_points = (0..k).map(|i| at(radius, mid(i))).collect();
        let corner_paths = (0..k)
            .map(|i| {
                [
                    PlanarPath::arc(center, radius, mid(i), theta(i) - mid(i)),
                    PlanarPath::arc(center, radius, mid(i), theta(i + 1) - mid(i)),
                    PlanarPath::line(at(radius, mid(i)), at(0.5 * radius, mid(i))),
                ]
            })
            .collect();
        let mut crossings = vec![None; t.edges().len()];
        for a in 0..k {
            // counterclockwise from the triangle having arc a as side 1 to the one having it as side 2
            let prev = (a + k - 1) % k;
            let start = mid(prev);
            let ccw = PlanarPath::arc(center, radius, start, mid(prev + 1) - start);
            let first = t.edge(a).incidences[0];
            crossings[a] = Some(if first.triangle == prev && first.side == 1 { ccw } else { ccw.reversed() });
        }
        Ok(Self { triangulation: t, anchors, base_points, corner_paths, crossings })
    }
}
