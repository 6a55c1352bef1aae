//! Marked bordered surfaces and their ideal triangulations.
//!
//! Triangles list corners counterclockwise; side `i` runs from corner `i` to
//! corner `i + 1`. Two sides glued along an arc are traversed in opposite
//! directions. Arcs occupy edge ids `0..n`, boundary segments the ids after.

mod catalog;
mod tagged;

use std::collections::BTreeMap;

pub use catalog::{default_triangulation, CatalogWarning};
pub use tagged::{Sign, Signing, TaggedTriangulation};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkedBorderedSurface {
    pub genus: u32,
    pub boundary: Vec<u32>,
    pub punctures: u32,
}

impl MarkedBorderedSurface {
    pub fn new(genus: u32, boundary: Vec<u32>, punctures: u32) -> Result<Self> {
        if boundary.contains(&0) {
            return Err(Error::Invalid("boundary circle without marked points".into()));
        }
        let s = Self { genus, boundary, punctures };
        if s.marked_count() == 0 {
            return Err(Error::Invalid("surface without marked points".into()));
        }
        Ok(s)
    }

    pub fn disc(k: u32) -> Self {
        Self { genus: 0, boundary: vec![k], punctures: 0 }
    }

    pub fn punctured_polygon(k: u32) -> Self {
        Self { genus: 0, boundary: vec![k], punctures: 1 }
    }

    pub fn annulus(k1: u32, k2: u32) -> Self {
        Self { genus: 0, boundary: vec![k1, k2], punctures: 0 }
    }

    pub fn punctured_torus() -> Self {
        Self { genus: 1, boundary: vec![], punctures: 1 }
    }

    pub fn sphere(punctures: u32) -> Self {
        Self { genus: 0, boundary: vec![], punctures }
    }

    pub fn marked_count(&self) -> u32 {
        self.boundary.iter().sum::<u32>() + self.punctures
    }

    /// `6g − 6 + Σ (k + 3)` over boundary circles and punctures (k = 0).
    pub fn rank(&self) -> i64 {
        let circles: i64 = self.boundary.iter().map(|&k| k as i64 + 3).sum();
        6 * self.genus as i64 - 6 + circles + 3 * self.punctures as i64
    }

    pub fn is_closed(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn is_degenerate(&self) -> bool {
        self.genus == 0 && self.marked_count() < 3
    }

    pub fn signature(&self) -> String {
        format!("g={} boundary={:?} punctures={}", self.genus, self.boundary, self.punctures)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarkedPoint {
    Puncture,
    Boundary { circle: usize, position: usize },
}

impl MarkedPoint {
    pub fn is_puncture(&self) -> bool {
        matches!(self, MarkedPoint::Puncture)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Arc,
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Incidence {
    pub triangle: usize,
    pub side: usize,
}

impl Incidence {
    pub fn new(triangle: usize, side: usize) -> Self {
        Self { triangle, side }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub kind: EdgeKind,
    pub incidences: Vec<Incidence>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub sides: [usize; 3],
    pub corners: [usize; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdealTriangulation {
    surface: MarkedBorderedSurface,
    marked: Vec<MarkedPoint>,
    triangles: Vec<Triangle>,
    edges: Vec<Edge>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn push(&mut self, msg: impl Into<String>) {
        self.violations.push(msg.into());
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::Invalid(self.violations.join("; ")))
        }
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl IdealTriangulation {
    /// Assembles a triangulation; incidences are derived from the side table.
    /// Only index ranges are checked here, everything else by [`validate`](Self::validate).
    pub fn from_parts(
        surface: MarkedBorderedSurface,
        marked: Vec<MarkedPoint>,
        triangles: Vec<Triangle>,
        edge_kinds: Vec<EdgeKind>,
    ) -> Result<Self> {
        let mut edges: Vec<Edge> = edge_kinds.into_iter().map(|kind| Edge { kind, incidences: Vec::new() }).collect();
        for (t, tri) in triangles.iter().enumerate() {
            for s in 0..3 {
                let e = tri.sides[s];
                if e >= edges.len() {
                    return Err(Error::Invalid(format!("triangle {t} side {s} references missing edge {e}")));
                }
                if tri.corners[s] >= marked.len() {
                    return Err(Error::Invalid(format!("triangle {t} corner {s} references missing point")));
                }
                edges[e].incidences.push(Incidence::new(t, s));
            }
        }
        Ok(Self { surface, marked, triangles, edges })
    }

    pub fn surface(&self) -> &MarkedBorderedSurface {
        &self.surface
    }

    pub fn marked(&self) -> &[MarkedPoint] {
        &self.marked
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn triangle(&self, t: usize) -> &Triangle {
        &self.triangles[t]
    }

    pub fn arc_count(&self) -> usize {
        self.edges.iter().filter(|e| e.kind == EdgeKind::Arc).count()
    }

    pub fn arcs(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&e| self.edges[e].kind == EdgeKind::Arc)
    }

    pub fn boundary_segments(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&e| self.edges[e].kind == EdgeKind::Boundary)
    }

    pub fn is_arc(&self, e: usize) -> bool {
        self.edges.get(e).is_some_and(|x| x.kind == EdgeKind::Arc)
    }

    pub fn punctures(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.marked.len()).filter(|&p| self.marked[p].is_puncture())
    }

    /// The incidence on the other side of `(t, s)` for an arc, or `None` on the boundary.
    pub fn neighbor(&self, inc: Incidence) -> Option<Incidence> {
        let edge = &self.edges[self.triangles[inc.triangle].sides[inc.side]];
        if edge.kind != EdgeKind::Arc || edge.incidences.len() != 2 {
            return None;
        }
        if edge.incidences[0] == inc {
            Some(edge.incidences[1])
        } else {
            Some(edge.incidences[0])
        }
    }

    /// Endpoint marked points `(start, end)` of an edge as seen from its first incidence.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let inc = self.edges[e].incidences[0];
        let tri = &self.triangles[inc.triangle];
        (tri.corners[inc.side], tri.corners[(inc.side + 1) % 3])
    }

    pub fn is_self_folded_interior(&self, e: usize) -> bool {
        let edge = &self.edges[e];
        edge.kind == EdgeKind::Arc
            && edge.incidences.len() == 2
            && edge.incidences[0].triangle == edge.incidences[1].triangle
    }

    /// For a self-folded interior arc: the triangle, the puncture inside and the encircling edge.
    pub fn self_folded(&self, e: usize) -> Option<(usize, usize, usize)> {
        if !self.is_self_folded_interior(e) {
            return None;
        }
        let [i0, i1] = [self.edges[e].incidences[0], self.edges[e].incidences[1]];
        let tri = &self.triangles[i0.triangle];
        let third = 3 - i0.side - i1.side;
        // the puncture is the corner shared by the two copies of e, opposite the encircling side
        let puncture = tri.corners[(third + 2) % 3];
        Some((i0.triangle, puncture, tri.sides[third]))
    }

    pub fn is_self_folded_triangle(&self, t: usize) -> bool {
        let s = self.triangles[t].sides;
        s[0] == s[1] || s[1] == s[2] || s[0] == s[2]
    }

    /// `π_T`: a self-folded interior arc maps to its encircling edge, others to themselves.
    pub fn pi(&self, e: usize) -> usize {
        self.self_folded(e).map_or(e, |(_, _, k)| k)
    }

    /// Corners at a puncture in counterclockwise order, starting from the first
    /// corner in table order.
    pub fn corners_at(&self, p: usize) -> Result<Vec<Incidence>> {
        if !self.marked.get(p).is_some_and(|m| m.is_puncture()) {
            return Err(Error::NotAPuncture(p));
        }
        let start = self
            .triangles
            .iter()
            .enumerate()
            .find_map(|(t, tri)| tri.corners.iter().position(|&c| c == p).map(|i| Incidence::new(t, i)))
            .ok_or_else(|| Error::Invalid(format!("puncture {p} has no corner")))?;
        let mut out = vec![start];
        let mut cur = start;
        loop {
            let exit = Incidence::new(cur.triangle, (cur.side + 2) % 3);
            let next = self.neighbor(exit).ok_or_else(|| Error::Invalid(format!("puncture {p} star is not closed")))?;
            cur = Incidence::new(next.triangle, next.side);
            if cur == start {
                break;
            }
            if out.len() > 3 * self.triangles.len() {
                return Err(Error::Invalid(format!("puncture {p} star does not close")));
            }
            out.push(cur);
        }
        Ok(out)
    }

    /// Number of arc ends at a puncture.
    pub fn valency(&self, p: usize) -> Result<usize> {
        Ok(self.corners_at(p)?.len())
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        let n = self.surface.rank();
        if n != self.arc_count() as i64 {
            r.push(format!("arc count {} differs from rank {}", self.arc_count(), n));
        }
        let expected_marked = self.surface.marked_count() as usize;
        if self.marked.len() != expected_marked {
            r.push(format!("{} marked points, surface has {}", self.marked.len(), expected_marked));
        }
        let punctures = self.marked.iter().filter(|m| m.is_puncture()).count();
        if punctures != self.surface.punctures as usize {
            r.push(format!("{punctures} punctures in the vertex table, surface has {}", self.surface.punctures));
        }
        let mut per_circle = vec![Vec::new(); self.surface.boundary.len()];
        for (id, m) in self.marked.iter().enumerate() {
            if let MarkedPoint::Boundary { circle, position } = *m {
                match per_circle.get_mut(circle) {
                    Some(v) => v.push((position, id)),
                    None => r.push(format!("marked point {id} on missing boundary circle {circle}")),
                }
            }
        }
        for (c, pts) in per_circle.iter_mut().enumerate() {
            pts.sort();
            let k = self.surface.boundary[c] as usize;
            if pts.len() != k || pts.iter().enumerate().any(|(i, (pos, _))| *pos != i) {
                r.push(format!("boundary circle {c} positions are not 0..{k}"));
            }
        }
        for (i, e) in self.arcs().enumerate() {
            if i != e {
                r.push(format!("arc ids are not contiguous from 0 (edge {e})"));
                break;
            }
        }
        let mut boundary_segments = 0;
        for (e, edge) in self.edges.iter().enumerate() {
            let want = if edge.kind == EdgeKind::Arc { 2 } else { 1 };
            if edge.kind == EdgeKind::Boundary {
                boundary_segments += 1;
            }
            if edge.incidences.len() != want {
                r.push(format!("edge {e} has {} side incidences, expected {want}", edge.incidences.len()));
            }
            for inc in &edge.incidences {
                if self.triangles.get(inc.triangle).is_none_or(|t| t.sides[inc.side] != e) {
                    r.push(format!("edge {e} lists a dangling incidence {inc:?}"));
                }
            }
        }
        if 3 * self.triangles.len() != 2 * self.arc_count() + boundary_segments {
            r.push(format!(
                "Euler count fails: {} triangles, {} arcs, {} boundary segments",
                self.triangles.len(),
                self.arc_count(),
                boundary_segments
            ));
        }
        if !r.is_ok() {
            return r;
        }
        // corner classes under the gluing must match the vertex table
        let corner = |inc: Incidence| 3 * inc.triangle + inc.side;
        let mut uf = UnionFind::new(3 * self.triangles.len());
        for (e, edge) in self.edges.iter().enumerate() {
            if edge.kind != EdgeKind::Arc {
                continue;
            }
            let [x, y] = [edge.incidences[0], edge.incidences[1]];
            let tx = &self.triangles[x.triangle];
            let ty = &self.triangles[y.triangle];
            if tx.corners[x.side] != ty.corners[(y.side + 1) % 3] || tx.corners[(x.side + 1) % 3] != ty.corners[y.side]
            {
                r.push(format!("arc {e} glues corners of different marked points"));
            }
            uf.union(corner(x), corner(Incidence::new(y.triangle, (y.side + 1) % 3)));
            uf.union(corner(Incidence::new(x.triangle, (x.side + 1) % 3)), corner(y));
        }
        let mut class_of_point: BTreeMap<usize, usize> = BTreeMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for i in 0..3 {
                let class = uf.find(corner(Incidence::new(t, i)));
                match class_of_point.get(&tri.corners[i]) {
                    Some(&c) if c != class => {
                        r.push(format!("marked point {} spans several corner classes", tri.corners[i]));
                    }
                    _ => {
                        class_of_point.insert(tri.corners[i], class);
                    }
                }
            }
        }
        for p in 0..self.marked.len() {
            if !class_of_point.contains_key(&p) {
                r.push(format!("marked point {p} has no corner"));
            }
        }
        let mut classes: Vec<usize> = class_of_point.values().copied().collect();
        classes.sort();
        classes.dedup();
        if classes.len() != class_of_point.len() {
            r.push("two marked points share a corner class".to_string());
        }
        // boundary segments run along their circle in cyclic order
        for e in self.boundary_segments() {
            let (u, v) = self.endpoints(e);
            match (self.marked[u], self.marked[v]) {
                (
                    MarkedPoint::Boundary { circle: c1, position: p1 },
                    MarkedPoint::Boundary { circle: c2, position: p2 },
                ) => {
                    let k = self.surface.boundary[c1] as usize;
                    if c1 != c2 || (p1 + 1) % k != p2 {
                        r.push(format!("boundary segment {e} does not join consecutive marked points"));
                    }
                }
                _ => r.push(format!("boundary segment {e} ends at a puncture")),
            }
        }
        for p in self.punctures() {
            if let Err(err) = self.corners_at(p) {
                r.push(err.to_string());
            }
        }
        r
    }

    /// Replaces `arc` by the other diagonal of its quadrilateral; the new arc keeps the id.
    pub fn flip(&self, arc: usize) -> Result<Self> {
        Ok(self.flip_with_map(arc)?.0)
    }

    /// Flip together with the map from old to new incidences of every relocated side.
    pub(crate) fn flip_with_map(&self, arc: usize) -> Result<(Self, FlipMap)> {
        if !self.is_arc(arc) {
            return Err(Error::Invalid(format!("edge {arc} is not an arc")));
        }
        if self.is_self_folded_interior(arc) {
            return Err(Error::SelfFoldedInterior(arc));
        }
        let [i1, i2] = [self.edges[arc].incidences[0], self.edges[arc].incidences[1]];
        let (t1, s1, t2, s2) = (i1.triangle, i1.side, i2.triangle, i2.side);
        let a1 = &self.triangles[t1];
        let a2 = &self.triangles[t2];
        let (a, b, c) = (a1.corners[s1], a1.corners[(s1 + 1) % 3], a1.corners[(s1 + 2) % 3]);
        let d = a2.corners[(s2 + 2) % 3];
        let e_bc = a1.sides[(s1 + 1) % 3];
        let e_ca = a1.sides[(s1 + 2) % 3];
        let e_ad = a2.sides[(s2 + 1) % 3];
        let e_db = a2.sides[(s2 + 2) % 3];
        let mut out = self.clone();
        out.triangles[t1] = Triangle { corners: [c, a, d], sides: [e_ca, e_ad, arc] };
        out.triangles[t2] = Triangle { corners: [d, b, c], sides: [e_db, e_bc, arc] };
        let map = FlipMap {
            t1,
            t2,
            pairs: [
                (Incidence::new(t1, (s1 + 2) % 3), Incidence::new(t1, 0)),
                (Incidence::new(t2, (s2 + 1) % 3), Incidence::new(t1, 1)),
                (Incidence::new(t2, (s2 + 2) % 3), Incidence::new(t2, 0)),
                (Incidence::new(t1, (s1 + 1) % 3), Incidence::new(t2, 1)),
            ],
        };
        for (e, edge) in out.edges.iter_mut().enumerate() {
            if e == arc {
                edge.incidences = vec![Incidence::new(t1, 2), Incidence::new(t2, 2)];
                continue;
            }
            for inc in edge.incidences.iter_mut() {
                if let Some(new) = map.apply(*inc) {
                    *inc = new;
                }
            }
            edge.incidences.sort();
        }
        Ok((out, map))
    }

    /// Swaps the ids of two edges.
    pub(crate) fn swap_labels(&mut self, x: usize, y: usize) {
        if x == y {
            return;
        }
        for tri in self.triangles.iter_mut() {
            for s in tri.sides.iter_mut() {
                if *s == x {
                    *s = y;
                } else if *s == y {
                    *s = x;
                }
            }
        }
        self.edges.swap(x, y);
    }

    /// Exchange matrix from the counterclockwise rule over non-self-folded triangles,
    /// with self-folded interior arcs replaced by their encircling edge.
    pub fn exchange_matrix(&self) -> ExchangeMatrix {
        let n = self.arc_count();
        let mut preimage: Vec<Vec<usize>> = vec![Vec::new(); self.edges.len()];
        for i in self.arcs() {
            preimage[self.pi(i)].push(i);
        }
        let mut eps = vec![vec![0i32; n]; n];
        for t in 0..self.triangles.len() {
            if self.is_self_folded_triangle(t) {
                continue;
            }
            let sides = self.triangles[t].sides;
            for s in 0..3 {
                for &i in &preimage[sides[s]] {
                    for &j in &preimage[sides[(s + 1) % 3]] {
                        eps[i][j] += 1;
                        eps[j][i] -= 1;
                    }
                }
            }
        }
        ExchangeMatrix { entries: eps }
    }

    /// A representation independent of triangle order and corner rotation.
    pub fn canonical_key(&self) -> Vec<[(usize, usize); 3]> {
        let mut key: Vec<[(usize, usize); 3]> = self
            .triangles
            .iter()
            .map(|tri| {
                let rot = |r: usize| [0, 1, 2].map(|i| (tri.sides[(i + r) % 3], tri.corners[(i + r) % 3]));
                (0..3).map(rot).min().unwrap()
            })
            .collect();
        key.sort();
        key
    }

    /// Equality as triangulations with labelled arcs.
    pub fn same_as(&self, other: &Self) -> bool {
        self.surface == other.surface
            && self.marked == other.marked
            && self.edges.len() == other.edges.len()
            && self.edges.iter().zip(&other.edges).all(|(x, y)| x.kind == y.kind)
            && self.canonical_key() == other.canonical_key()
    }
}

/// Old-to-new incidence moves produced by a flip of the arc between `t1` and `t2`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct FlipMap {
    pub t1: usize,
    pub t2: usize,
    pub pairs: [(Incidence, Incidence); 4],
}

impl FlipMap {
    pub fn apply(&self, inc: Incidence) -> Option<Incidence> {
        self.pairs.iter().find(|(old, _)| *old == inc).map(|(_, new)| *new)
    }

    /// Whether the side now at `new` came from the second triangle.
    pub fn came_from_second(&self, new: Incidence) -> bool {
        self.pairs.iter().any(|(old, n)| *n == new && old.triangle == self.t2 && self.t1 != self.t2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangeMatrix {
    entries: Vec<Vec<i32>>,
}

impl ExchangeMatrix {
    pub fn new(entries: Vec<Vec<i32>>) -> Result<Self> {
        let n = entries.len();
        if entries.iter().any(|row| row.len() != n) {
            return Err(Error::Invalid("exchange matrix is not square".into()));
        }
        let m = Self { entries };
        if !m.is_skew() {
            return Err(Error::Invalid("exchange matrix is not skew-symmetric".into()));
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> i32 {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<i32>] {
        &self.entries
    }

    pub fn is_skew(&self) -> bool {
        let n = self.entries.len();
        (0..n).all(|i| (0..n).all(|j| self.entries[i][j] == -self.entries[j][i]))
    }

    /// Matrix mutation at `k`.
    pub fn mutate(&self, k: usize) -> Self {
        let n = self.size();
        let e = &self.entries;
        let mut out = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                out[i][j] =
                    if i == k || j == k { -e[i][j] } else { e[i][j] + e[i][k].signum() * (e[i][k] * e[k][j]).max(0) };
            }
        }
        Self { entries: out }
    }
}
