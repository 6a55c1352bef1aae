//! Developed presentations of framed PGL2 local systems.
//!
//! Each triangle carries its own chart of the projective line holding the three
//! corner framing points. Each arc carries the gluing map from the chart of its
//! first incidence to the chart of its second one.

mod degeneracy;

pub use degeneracy::{degeneracy, DegeneracyKind, DegeneracyVerdict, Generator, PairAction};

use crate::error::{Error, Result};
use crate::projective::{map_from_triples, MapClass, ProjectiveMap, ProjectivePoint, TAU_EQ};
use crate::surface::{IdealTriangulation, Incidence, ValidationReport};

#[derive(Clone, Debug)]
pub struct DevelopedFramedLocalSystem {
    base: IdealTriangulation,
    corners: Vec<[ProjectivePoint; 3]>,
    gluings: Vec<Option<ProjectiveMap>>,
}

impl DevelopedFramedLocalSystem {
    /// Checks shapes only; consistency is reported by [`validate`](Self::validate).
    pub fn new(
        base: IdealTriangulation,
        corners: Vec<[ProjectivePoint; 3]>,
        gluings: Vec<Option<ProjectiveMap>>,
    ) -> Result<Self> {
        if corners.len() != base.triangles().len() {
            return Err(Error::Invalid(format!(
                "{} corner triples for {} triangles",
                corners.len(),
                base.triangles().len()
            )));
        }
        if gluings.len() != base.edges().len() {
            return Err(Error::Invalid(format!("{} gluings for {} edges", gluings.len(), base.edges().len())));
        }
        for (e, g) in gluings.iter().enumerate() {
            if base.is_arc(e) != g.is_some() {
                return Err(Error::Invalid(format!("edge {e}: gluings are required on arcs and only there")));
            }
        }
        Ok(Self { base, corners, gluings })
    }

    pub fn base(&self) -> &IdealTriangulation {
        &self.base
    }

    pub fn corners(&self) -> &[[ProjectivePoint; 3]] {
        &self.corners
    }

    pub fn corner(&self, inc: Incidence) -> ProjectivePoint {
        self.corners[inc.triangle][inc.side]
    }

    pub fn gluings(&self) -> &[Option<ProjectiveMap>] {
        &self.gluings
    }

    pub fn gluing(&self, arc: usize) -> Option<&ProjectiveMap> {
        self.gluings.get(arc).and_then(|g| g.as_ref())
    }

    /// Chart change from the triangle of `inc` to the triangle across that side.
    pub fn transition(&self, inc: Incidence) -> Option<ProjectiveMap> {
        let e = self.base.triangle(inc.triangle).sides[inc.side];
        let g = self.gluing(e)?;
        if self.base.edge(e).incidences[0] == inc {
            Some(*g)
        } else {
            Some(g.inverse())
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = self.base.validate();
        for e in self.base.arcs() {
            let edge = self.base.edge(e);
            if edge.incidences.len() != 2 {
                continue;
            }
            let [x, y] = [edge.incidences[0], edge.incidences[1]];
            let g = self.gluings[e].expect("arc gluing");
            let px = &self.corners[x.triangle];
            let py = &self.corners[y.triangle];
            if !g.apply(&px[x.side]).same(&py[(y.side + 1) % 3]) || !g.apply(&px[(x.side + 1) % 3]).same(&py[y.side]) {
                r.push(format!("gluing of arc {e} does not match the corner points"));
            }
        }
        r
    }

    /// Applies `g` to every chart.
    pub fn conjugate(&self, g: &ProjectiveMap) -> Self {
        let mut out = self.clone();
        for tri in out.corners.iter_mut() {
            *tri = tri.map(|p| g.apply(&p).normalized());
        }
        for h in out.gluings.iter_mut().flatten() {
            *h = h.conjugate_by(g);
        }
        out
    }

    /// Holonomy around a puncture, counterclockwise, in the chart of the anchor corner.
    pub fn puncture_holonomy(&self, p: usize) -> Result<(ProjectiveMap, Incidence)> {
        let star = self.base.corners_at(p)?;
        let mut h = ProjectiveMap::identity();
        for c in &star {
            let exit = Incidence::new(c.triangle, (c.side + 2) % 3);
            let step = self.transition(exit).ok_or(Error::NotAPuncture(p))?;
            h = step.compose(&h);
        }
        Ok((h.normalized(), star[0]))
    }

    /// Replaces the framing at `p` by the other eigenline of its holonomy.
    pub fn sign_flip(&self, p: usize) -> Result<Self> {
        let (h, anchor) = self.puncture_holonomy(p)?;
        if h.classify() != MapClass::Semisimple {
            return Err(Error::NonSemisimpleHolonomy(p));
        }
        let lines = h.fixed_lines()?.points();
        let current = self.corner(anchor);
        let other = if lines[0].distance(&current) <= lines[1].distance(&current) { lines[1] } else { lines[0] };
        let mut out = self.clone();
        let mut cur = other;
        for c in self.base.corners_at(p)? {
            out.corners[c.triangle][c.side] = cur.normalized();
            let exit = Incidence::new(c.triangle, (c.side + 2) % 3);
            cur = self.transition(exit).expect("interior star").apply(&cur);
        }
        Ok(out)
    }

    /// Builds the corners by carrying one seed framing per marked point, given in
    /// the chart of the seed corner, around the star of that point.
    pub fn develop(
        base: IdealTriangulation,
        gluings: Vec<Option<ProjectiveMap>>,
        seeds: &[(Incidence, ProjectivePoint)],
    ) -> Result<Self> {
        let corners = vec![[ProjectivePoint::infinity(); 3]; base.triangles().len()];
        let mut out = Self::new(base, corners, gluings)?;
        let mut covered = vec![[false; 3]; out.corners.len()];
        for &(at, value) in seeds {
            if at.triangle >= out.corners.len() || at.side > 2 {
                return Err(Error::Invalid(format!("seed corner {at:?} out of range")));
            }
            for (c, d) in covered.iter_mut().zip(out.spread(at, value)) {
                for i in 0..3 {
                    c[i] |= d[i];
                }
            }
        }
        if let Some(t) = covered.iter().position(|c| c.contains(&false)) {
            return Err(Error::Invalid(format!("triangle {t} has a corner without a seed")));
        }
        out.validate().into_result()?;
        Ok(out)
    }

    fn spread(&mut self, at: Incidence, value: ProjectivePoint) -> Vec<[bool; 3]> {
        let mut done = vec![[false; 3]; self.corners.len()];
        let mut queue = std::collections::VecDeque::from([(at, value.normalized())]);
        done[at.triangle][at.side] = true;
        while let Some((c, v)) = queue.pop_front() {
            self.corners[c.triangle][c.side] = v;
            for s in [c.side, (c.side + 2) % 3] {
                let inc = Incidence::new(c.triangle, s);
                let (Some(nb), Some(g)) = (self.base.neighbor(inc), self.transition(inc)) else { continue };
                let corner = if s == c.side { (nb.side + 1) % 3 } else { nb.side };
                if !done[nb.triangle][corner] {
                    done[nb.triangle][corner] = true;
                    queue.push_back((Incidence::new(nb.triangle, corner), g.apply(&v).normalized()));
                }
            }
        }
        done
    }

    /// Moves the framing of the marked point at corner `at` to `value`, given in
    /// the chart of that triangle, and carries it to every other corner of the point.
    pub fn reframe(&self, at: Incidence, value: ProjectivePoint) -> Result<Self> {
        let p = self.base.triangle(at.triangle).corners[at.side];
        let mut out = self.clone();
        out.spread(at, value);
        if !out.validate().is_ok() {
            return Err(Error::Invalid(format!("framing at {p} is not invariant under its holonomy")));
        }
        Ok(out)
    }

    /// Corners of a triangle in its normalized chart.
    pub const STANDARD: [ProjectivePoint; 3] =
        [ProjectivePoint::INFINITY, ProjectivePoint::MINUS_ONE, ProjectivePoint::ZERO];

    /// Moves triangle `t` into the chart where its corners are [`STANDARD`](Self::STANDARD).
    /// Triangles with repeated corners keep their chart.
    pub(crate) fn normalize_chart(&mut self, t: usize) {
        let Ok(h) = map_from_triples(&self.corners[t], &Self::STANDARD) else { return };
        let h_inv = h.inverse();
        self.corners[t] = Self::STANDARD;
        let mut sides = self.base.triangle(t).sides.to_vec();
        sides.sort_unstable();
        sides.dedup();
        for e in sides {
            let Some(g) = self.gluings[e] else { continue };
            let inc = &self.base.edge(e).incidences;
            let mut g2 = g;
            if inc[0].triangle == t {
                g2 = g2.compose(&h_inv);
            }
            if inc[1].triangle == t {
                g2 = h.compose(&g2);
            }
            self.gluings[e] = Some(g2.normalized());
        }
    }

    /// The same system presented on `flip(base, arc)`; both new triangles get
    /// normalized charts when their corners are distinct.
    pub fn flip(&self, arc: usize) -> Result<Self> {
        let (next, map) = self.base.flip_with_map(arc)?;
        let old = self.base.edge(arc).incidences.clone();
        let (i1, i2) = (old[0], old[1]);
        let g = self.transition(i1).expect("arc gluing");
        let g_inv = g.inverse();
        let p1 = self.corners[i1.triangle];
        let p2 = self.corners[i2.triangle];
        let (s1, s2) = (i1.side, i2.side);
        let (a, b, c) = (p1[s1], p1[(s1 + 1) % 3], p1[(s1 + 2) % 3]);
        let d = g_inv.apply(&p2[(s2 + 2) % 3]).normalized();
        let mut corners = self.corners.clone();
        corners[map.t1] = [c, a, d];
        corners[map.t2] = [d, b, c];
        // chart of a relocated side, expressed as new chart → old chart
        let phi = |new: Incidence| if map.came_from_second(new) { g } else { ProjectiveMap::identity() };
        let mut gluings = self.gluings.clone();
        for e in self.base.arcs() {
            if e == arc {
                gluings[e] = Some(ProjectiveMap::identity());
                continue;
            }
            let [x, y] = [self.base.edge(e).incidences[0], self.base.edge(e).incidences[1]];
            let (nx, ny) = (map.apply(x), map.apply(y));
            if nx.is_none() && ny.is_none() {
                continue;
            }
            let (nx, ny) = (nx.unwrap_or(x), ny.unwrap_or(y));
            let old_g = self.gluings[e].expect("arc gluing");
            let fx = if map.apply(x).is_some() { phi(nx) } else { ProjectiveMap::identity() };
            let fy = if map.apply(y).is_some() { phi(ny) } else { ProjectiveMap::identity() };
            let new_g = fy.inverse().compose(&old_g).compose(&fx).normalized();
            gluings[e] = Some(if next.edge(e).incidences[0] == nx { new_g } else { new_g.inverse() });
        }
        let mut out = Self { base: next, corners, gluings };
        out.normalize_chart(map.t1);
        out.normalize_chart(map.t2);
        Ok(out)
    }

    /// Chart maps from each triangle into the chart of triangle 0 along a dual
    /// spanning tree, with the arcs left out of the tree.
    pub fn root_charts(&self) -> (Vec<ProjectiveMap>, Vec<usize>) {
        let n = self.base.triangles().len();
        let mut charts: Vec<Option<ProjectiveMap>> = vec![None; n];
        let mut tree = vec![false; self.base.edges().len()];
        charts[0] = Some(ProjectiveMap::identity());
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(t) = queue.pop_front() {
            let rt = charts[t].expect("visited");
            for s in 0..3 {
                let inc = Incidence::new(t, s);
                let Some(nb) = self.base.neighbor(inc) else { continue };
                if charts[nb.triangle].is_some() {
                    continue;
                }
                let step = self.transition(inc).expect("arc gluing");
                charts[nb.triangle] = Some(rt.compose(&step.inverse()).normalized());
                tree[self.base.triangle(t).sides[s]] = true;
                queue.push_back(nb.triangle);
            }
        }
        let charts: Vec<ProjectiveMap> =
            charts.into_iter().map(|c| c.unwrap_or_else(ProjectiveMap::identity)).collect();
        let cycles = self.base.arcs().filter(|&e| !tree[e]).collect();
        (charts, cycles)
    }

    /// Holonomy of the dual cycle closed by a non-tree arc, in the root chart.
    pub(crate) fn cycle_holonomy(&self, charts: &[ProjectiveMap], arc: usize) -> ProjectiveMap {
        let x = self.base.edge(arc).incidences[0];
        let y = self.base.edge(arc).incidences[1];
        let g = self.gluings[arc].expect("arc gluing");
        charts[y.triangle].compose(&g).compose(&charts[x.triangle].inverse()).normalized()
    }

    /// Swaps the ids of two edges in the base and the gluing table.
    pub(crate) fn swap_labels(&mut self, x: usize, y: usize) {
        self.base.swap_labels(x, y);
        self.gluings.swap(x, y);
    }

    /// Whether the two endpoint framings of an edge agree in an adjacent chart.
    pub fn edge_is_bad(&self, e: usize) -> bool {
        let inc = self.base.edge(e).incidences[0];
        let tri = &self.corners[inc.triangle];
        tri[inc.side].approx_eq(&tri[(inc.side + 1) % 3], TAU_EQ)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::Complex;
    use crate::surface::{default_triangulation, MarkedBorderedSurface};

    fn pt(re: f64, im: f64) -> ProjectivePoint {
        ProjectivePoint::affine(Complex::new(re, im))
    }

    /// Disc-5 fan with all charts equal to one pentagon of points.
    fn pentagon() -> DevelopedFramedLocalSystem {
        let t = default_triangulation(&MarkedBorderedSurface::disc(5)).unwrap().0;
        let z = [pt(0.0, 0.0), pt(1.0, 0.0), pt(2.0, 1.0), pt(1.0, 3.0), pt(-1.0, 2.0)];
        let corners = t.triangles().iter().map(|tri| tri.corners.map(|c| z[c])).collect();
        let gluings = (0..t.edges().len()).map(|e| t.is_arc(e).then(ProjectiveMap::identity)).collect();
        DevelopedFramedLocalSystem::new(t, corners, gluings).unwrap()
    }

    #[test]
    fn identity_gluings_validate() {
        let f = pentagon();
        assert!(f.validate().is_ok(), "{:?}", f.validate());
        let mut broken = f.clone();
        let m = ProjectiveMap::from_entries(
            Complex::new(1.0, 0.0),
            Complex::new(0.5, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
        )
        .unwrap();
        broken.gluings[0] = Some(m);
        assert!(!broken.validate().is_ok());
    }

    #[test]
    fn flip_keeps_consistency() {
        let f = pentagon();
        for arc in 0..2 {
            let g = f.flip(arc).unwrap();
            assert!(g.validate().is_ok());
            assert!(g.flip(arc).unwrap().validate().is_ok());
        }
    }

    fn punctured(k: u32, values: &[Complex]) -> DevelopedFramedLocalSystem {
        let t = default_triangulation(&MarkedBorderedSurface::punctured_polygon(k)).unwrap().0;
        let x = crate::cluster::CoordinateTuple::from_values(values.iter().copied().enumerate());
        crate::cluster::reconstruct(&t, &x).unwrap()
    }

    #[test]
    fn holonomy_eigenvalues_are_the_coordinate_product() {
        let x = [Complex::new(2.0, 0.5), Complex::new(-0.3, 1.1), Complex::new(0.7, -0.2)];
        let f = punctured(3, &x);
        let (h, anchor) = f.puncture_holonomy(3).unwrap();
        assert!(h.apply(&f.corner(anchor)).same(&f.corner(anchor)));
        let crate::projective::FixedLines::Semisimple { eigenvalues: [l1, l2], .. } = h.fixed_lines().unwrap() else {
            panic!("semisimple expected");
        };
        let product: Complex = x.iter().product();
        let ratio = l1 / l2;
        let rel = |a: Complex, b: Complex| (a - b).norm() / b.norm();
        assert!(rel(ratio, product).min(rel(ratio.inv(), product)) < 1e-10, "{ratio} vs {product}");
    }

    #[test]
    fn sign_flip_is_an_involution_and_checks_holonomy() {
        let f = punctured(2, &[Complex::new(1.5, 0.2), Complex::new(0.4, -0.9)]);
        let g = f.sign_flip(2).unwrap();
        assert!(g.validate().is_ok());
        let back = g.sign_flip(2).unwrap();
        for (a, b) in f.corners().iter().zip(back.corners()) {
            assert!(a.iter().zip(b).all(|(x, y)| x.approx_eq(y, 1e-10)));
        }
        // coordinates with product 1 give a parabolic or trivial loop
        let p = punctured(2, &[Complex::new(2.0, 0.0), Complex::new(0.5, 0.0)]);
        assert_eq!(p.sign_flip(2).unwrap_err(), Error::NonSemisimpleHolonomy(2));
    }

    #[test]
    fn conjugation_by_identity() {
        let f = pentagon();
        let g = f.conjugate(&ProjectiveMap::identity());
        for (a, b) in f.corners().iter().zip(g.corners()) {
            assert!(a.iter().zip(b).all(|(x, y)| x.same(y)));
        }
    }

    #[test]
    fn reframe_carries_the_point_and_checks_punctures() {
        let f = punctured(3, &[Complex::new(2.0, 0.5), Complex::new(-0.3, 1.1), Complex::new(0.7, -0.2)]);
        let at = Incidence::new(0, 0);
        let p = f.base().triangle(0).corners[0];
        assert!(!f.base().marked()[p].is_puncture());
        let g = f.reframe(at, pt(5.0, -1.0)).unwrap();
        assert!(g.corner(at).same(&pt(5.0, -1.0)));
        assert!(g.validate().is_ok());
        let (_, anchor) = f.puncture_holonomy(3).unwrap();
        assert!(f.reframe(anchor, pt(5.0, -1.0)).is_err());
        let other = f.sign_flip(3).unwrap().corner(anchor);
        assert!(f.reframe(anchor, other).is_ok());
    }
}
