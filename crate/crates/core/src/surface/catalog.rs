use super::{EdgeKind, IdealTriangulation, MarkedBorderedSurface, MarkedPoint, Triangle};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CatalogWarning {
    /// Three-punctured sphere: allowed, but outside the range where non-degeneracy is guaranteed.
    ThreePuncturedSphere,
}

fn boundary(circle: usize, k: usize) -> impl Iterator<Item = MarkedPoint> {
    (0..k).map(move |position| MarkedPoint::Boundary { circle, position })
}

fn kinds(arcs: usize, segments: usize) -> Vec<EdgeKind> {
    let mut v = vec![EdgeKind::Arc; arcs];
    v.extend(std::iter::repeat_n(EdgeKind::Boundary, segments));
    v
}

/// Fan from vertex 0.
fn polygon(k: usize) -> Result<IdealTriangulation> {
    let n = k - 3;
    let seg = |i: usize| n + i;
    let triangles = (0..k - 2)
        .map(|t| Triangle {
            corners: [0, t + 1, t + 2],
            sides: [if t == 0 { seg(0) } else { t - 1 }, seg(t + 1), if t == k - 3 { seg(k - 1) } else { t }],
        })
        .collect();
    IdealTriangulation::from_parts(
        MarkedBorderedSurface::disc(k as u32),
        boundary(0, k).collect(),
        triangles,
        kinds(n, k),
    )
}

/// Triangles `(v_i, v_{i+1}, P)`; arc `i` joins `v_i` to the puncture.
fn punctured_polygon(k: usize) -> Result<IdealTriangulation> {
    let p = k;
    let triangles = (0..k).map(|i| Triangle { corners: [i, (i + 1) % k, p], sides: [k + i, (i + 1) % k, i] }).collect();
    let mut marked: Vec<MarkedPoint> = boundary(0, k).collect();
    marked.push(MarkedPoint::Puncture);
    IdealTriangulation::from_parts(MarkedBorderedSurface::punctured_polygon(k as u32), marked, triangles, kinds(k, k))
}

/// Cyclic strip: `k1` triangles on the outer circle followed by `k2` on the inner one.
fn annulus(k1: usize, k2: usize) -> Result<IdealTriangulation> {
    let n = k1 + k2;
    let outer = |a: usize| a % k1;
    let inner = |b: usize| k1 + b % k2;
    let arc = |i: usize| i % n;
    let mut triangles = Vec::with_capacity(n);
    for a in 0..k1 {
        triangles.push(Triangle { corners: [outer(a), outer(a + 1), inner(0)], sides: [n + a, arc(a + 1), arc(a)] });
    }
    for b in 0..k2 {
        triangles.push(Triangle {
            corners: [inner(b + 1), inner(b), outer(0)],
            sides: [n + k1 + b, arc(k1 + b), arc(k1 + b + 1)],
        });
    }
    let mut marked: Vec<MarkedPoint> = boundary(0, k1).collect();
    // inner positions run against the triangle sides so that segments go position → position + 1
    marked.extend((0..k2).map(|b| MarkedPoint::Boundary { circle: 1, position: (k2 - b) % k2 }));
    IdealTriangulation::from_parts(MarkedBorderedSurface::annulus(k1 as u32, k2 as u32), marked, triangles, kinds(n, n))
}

fn punctured_torus() -> Result<IdealTriangulation> {
    let triangles =
        vec![Triangle { corners: [0; 3], sides: [0, 1, 2] }, Triangle { corners: [0; 3], sides: [0, 1, 2] }];
    IdealTriangulation::from_parts(
        MarkedBorderedSurface::punctured_torus(),
        vec![MarkedPoint::Puncture],
        triangles,
        kinds(3, 0),
    )
}

/// Doubled polygon: boundary edges `(i, i+1)` first, then the top and bottom fan diagonals.
fn sphere(p: usize) -> Result<IdealTriangulation> {
    let ring = |i: usize| i % p;
    let top = |i: usize| p + i - 2;
    let bottom = |i: usize| p + (p - 3) + i - 2;
    let mut triangles = Vec::new();
    for i in 1..p - 1 {
        triangles.push(Triangle {
            corners: [0, i, i + 1],
            sides: [
                if i == 1 { ring(0) } else { top(i) },
                ring(i),
                if i + 1 == p - 1 { ring(p - 1) } else { top(i + 1) },
            ],
        });
    }
    for i in 1..p - 1 {
        triangles.push(Triangle {
            corners: [0, i + 1, i],
            sides: [
                if i + 1 == p - 1 { ring(p - 1) } else { bottom(i + 1) },
                ring(i),
                if i == 1 { ring(0) } else { bottom(i) },
            ],
        });
    }
    IdealTriangulation::from_parts(
        MarkedBorderedSurface::sphere(p as u32),
        vec![MarkedPoint::Puncture; p],
        triangles,
        kinds(3 * p - 6, 0),
    )
}

/// Standard triangulation of a catalog surface, with an optional warning.
pub fn default_triangulation(s: &MarkedBorderedSurface) -> Result<(IdealTriangulation, Option<CatalogWarning>)> {
    let unsupported = || Error::UnsupportedSurface(s.signature());
    let t = match (s.genus, s.boundary.as_slice(), s.punctures) {
        (0, &[k], 0) if k >= 3 => polygon(k as usize)?,
        (0, &[k], 1) if k >= 1 => punctured_polygon(k as usize)?,
        (0, &[k1, k2], 0) if k1 >= 1 && k2 >= 1 => annulus(k1 as usize, k2 as usize)?,
        (1, &[], 1) => punctured_torus()?,
        (0, &[], p) if p >= 3 => sphere(p as usize)?,
        _ => return Err(unsupported()),
    };
    let warning =
        (s.genus == 0 && s.boundary.is_empty() && s.punctures == 3).then_some(CatalogWarning::ThreePuncturedSphere);
    if let Some(w) = warning {
        log::warn!("{w:?}: rank {} surface outside the supported non-degeneracy range", s.rank());
    }
    debug_assert!(t.validate().is_ok(), "{:?}", t.validate());
    Ok((t, warning))
}
