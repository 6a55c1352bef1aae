//! Fock–Goncharov coordinates of framed local systems.

mod good;

use std::collections::{BTreeMap, VecDeque};

pub use good::{find_good, find_good_within, GoodSearch};

use crate::error::{Error, Result};
use crate::framed::DevelopedFramedLocalSystem;
use crate::projective::{cross_ratio, map_from_triples, Complex, CrossRatio, ProjectiveMap, ProjectivePoint};
use crate::surface::{ExchangeMatrix, IdealTriangulation, Incidence, TaggedTriangulation};

/// Tolerance for vanishing mutation factors.
pub const TAU_NUM: f64 = 1e-12;

/// Coordinate per arc id.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CoordinateTuple(BTreeMap<usize, CrossRatio>);

impl CoordinateTuple {
    pub fn new(values: BTreeMap<usize, CrossRatio>) -> Self {
        Self(values)
    }

    pub fn from_values(values: impl IntoIterator<Item = (usize, Complex)>) -> Self {
        Self(values.into_iter().map(|(k, v)| (k, CrossRatio::from_value(v))).collect())
    }

    pub fn get(&self, arc: usize) -> Option<CrossRatio> {
        self.0.get(&arc).copied()
    }

    pub fn value(&self, arc: usize) -> Option<Complex> {
        self.get(arc).and_then(|x| x.value())
    }

    pub fn insert(&mut self, arc: usize, x: CrossRatio) {
        self.0.insert(arc, x);
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, CrossRatio)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Every value finite and nonzero.
    pub fn is_regular(&self) -> bool {
        self.0.values().all(|x| x.is_regular())
    }

    pub fn swap(&mut self, x: usize, y: usize) {
        if let (Some(a), Some(b)) = (self.0.get(&x).copied(), self.0.get(&y).copied()) {
            self.0.insert(x, b);
            self.0.insert(y, a);
        }
    }

    /// Largest relative difference; infinite on a key or kind mismatch.
    pub fn max_rel_diff(&self, other: &Self) -> f64 {
        if self.0.keys().ne(other.0.keys()) {
            return f64::INFINITY;
        }
        self.0
            .iter()
            .map(|(k, x)| match (x, &other.0[k]) {
                (CrossRatio::Value(a), CrossRatio::Value(b)) => (a - b).norm() / b.norm().max(f64::MIN_POSITIVE),
                (a, b) if a == b => 0.0,
                _ => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }
}

fn check_base(f: &DevelopedFramedLocalSystem, t: &IdealTriangulation) -> Result<()> {
    if f.base().same_as(t) {
        Ok(())
    } else {
        Err(Error::TriangulationMismatch)
    }
}

/// Far corner across an arc, expressed in the chart of its first incidence.
fn quadrilateral(f: &DevelopedFramedLocalSystem, arc: usize) -> [ProjectivePoint; 4] {
    let t = f.base();
    let [x, y] = [t.edge(arc).incidences[0], t.edge(arc).incidences[1]];
    let px = f.corners()[x.triangle];
    let g = f.gluing(arc).expect("arc gluing");
    let d = g.inverse().apply(&f.corners()[y.triangle][(y.side + 2) % 3]);
    let (a, b, c) = (px[x.side], px[(x.side + 1) % 3], px[(x.side + 2) % 3]);
    [a, d, b, c]
}

/// Cross ratio of each arc's quadrilateral, before the self-folded correction.
pub(crate) fn raw_cross_ratios(f: &DevelopedFramedLocalSystem) -> BTreeMap<usize, CrossRatio> {
    f.base()
        .arcs()
        .map(|e| {
            let [z1, z2, z3, z4] = quadrilateral(f, e);
            (e, cross_ratio(&z1, &z2, &z3, &z4))
        })
        .collect()
}

pub fn coordinates(f: &DevelopedFramedLocalSystem, t: &IdealTriangulation) -> Result<CoordinateTuple> {
    check_base(f, t)?;
    let y = raw_cross_ratios(f);
    let mut out = y.clone();
    for e in t.arcs() {
        if let Some((_, _, k)) = t.self_folded(e) {
            let yk = y.get(&k).copied().unwrap_or(CrossRatio::Value(Complex::new(1.0, 0.0)));
            out.insert(e, y[&e] * yk);
        }
    }
    Ok(CoordinateTuple(out))
}

/// Framed system with the given coordinates; every triangle carries `(∞, −1, 0)`.
pub fn reconstruct(t: &IdealTriangulation, x: &CoordinateTuple) -> Result<DevelopedFramedLocalSystem> {
    let arcs: Vec<usize> = t.arcs().collect();
    if x.0.keys().copied().ne(arcs.iter().copied()) {
        return Err(Error::Invalid("coordinate keys differ from the arc set".into()));
    }
    for (&e, v) in &x.0 {
        if !v.is_regular() {
            return Err(Error::NonRegularInput(e));
        }
    }
    let one = Complex::new(1.0, 0.0);
    let y = |e: usize| -> Complex {
        let xe = x.value(e).expect("regular");
        match t.self_folded(e) {
            Some((_, _, k)) if t.is_arc(k) => xe / x.value(k).expect("regular"),
            _ => xe,
        }
    };
    let n_tri = t.triangles().len();
    let mut corners: Vec<Option<[ProjectivePoint; 3]>> = vec![None; n_tri];
    let mut gluings: Vec<Option<ProjectiveMap>> = vec![None; t.edges().len()];
    let mut done = vec![false; t.edges().len()];
    corners[0] = Some([
        ProjectivePoint::infinity(),
        ProjectivePoint::affine(-one),
        ProjectivePoint::affine(Complex::new(0.0, 0.0)),
    ]);
    let std_frame =
        [ProjectivePoint::infinity(), ProjectivePoint::affine(Complex::new(0.0, 0.0)), ProjectivePoint::affine(one)];
    let mut queue = VecDeque::from([0usize]);
    while let Some(tri) = queue.pop_front() {
        let p = corners[tri].expect("visited");
        for s in 0..3 {
            let e = t.triangle(tri).sides[s];
            if !t.is_arc(e) || done[e] {
                continue;
            }
            done[e] = true;
            let inc = Incidence::new(tri, s);
            let nb = t.neighbor(inc).expect("arc neighbour");
            let (a, b, c) = (p[s], p[(s + 1) % 3], p[(s + 2) % 3]);
            // cr(a, d, b, c) = Y has d = N(−1/Y) where N maps (∞, 0, 1) to (a, b, c)
            let frame = map_from_triples(&std_frame, &[a, b, c]).map_err(|_| Error::NonRegularInput(e))?;
            let d = frame.apply(&ProjectivePoint::raw(-one, y(e))).normalized();
            let step = match corners[nb.triangle] {
                None => {
                    // every triangle gets its own chart with corners (∞, −1, 0)
                    let q = DevelopedFramedLocalSystem::STANDARD;
                    corners[nb.triangle] = Some(q);
                    queue.push_back(nb.triangle);
                    let target = [q[(nb.side + 1) % 3], q[nb.side], q[(nb.side + 2) % 3]];
                    map_from_triples(&[a, b, d], &target).map_err(|_| Error::NonRegularInput(e))?
                }
                Some(q) => {
                    let target = [q[(nb.side + 1) % 3], q[nb.side], q[(nb.side + 2) % 3]];
                    map_from_triples(&[a, b, d], &target).map_err(|_| Error::NonRegularInput(e))?
                }
            };
            gluings[e] = Some(if t.edge(e).incidences[0] == inc { step } else { step.inverse() });
        }
    }
    let corners = corners
        .into_iter()
        .map(|c| c.ok_or_else(|| Error::Invalid("triangulation is not connected".into())))
        .collect::<Result<Vec<_>>>()?;
    DevelopedFramedLocalSystem::new(t.clone(), corners, gluings)
}

/// Coordinates after applying the sign flips of the tagged triangulation's signing.
pub fn signed_coordinates(f: &DevelopedFramedLocalSystem, tau: &TaggedTriangulation) -> Result<CoordinateTuple> {
    let mut g = f.clone();
    for p in tau.signing().negative() {
        g = g.sign_flip(p)?;
    }
    coordinates(&g, tau.triangulation())
}

/// Cluster transformation at `k`.
pub fn mutate(x: &CoordinateTuple, eps: &ExchangeMatrix, k: usize) -> Result<CoordinateTuple> {
    let xk = x.value(k).filter(|v| *v != Complex::new(0.0, 0.0)).ok_or(Error::NonRegularInput(k))?;
    if eps.size() != x.len() {
        return Err(Error::Invalid("exchange matrix size differs from the tuple".into()));
    }
    let mut out = BTreeMap::new();
    for (j, xj) in x.iter() {
        if j == k {
            out.insert(j, CrossRatio::from_value(xk.inv()));
            continue;
        }
        let e = eps.get(j, k);
        if e == 0 {
            out.insert(j, xj);
            continue;
        }
        let base = if e > 0 { xk.inv() } else { xk };
        let factor = Complex::new(1.0, 0.0) + base;
        if factor.norm() <= TAU_NUM * (1.0 + base.norm()) {
            return Err(Error::MutationPole { arc: k, entry: j });
        }
        out.insert(j, xj * CrossRatio::from_value(factor.powi(-e)));
    }
    Ok(CoordinateTuple(out))
}

/// Largest relative gap between the mutation formula and direct recomputation after flipping `k`.
pub fn flip_consistency(f: &DevelopedFramedLocalSystem, t: &IdealTriangulation, k: usize) -> Result<f64> {
    let before = coordinates(f, t)?;
    let predicted = mutate(&before, &t.exchange_matrix(), k)?;
    let g = f.flip(k)?;
    let direct = coordinates(&g, g.base())?;
    Ok(predicted.max_rel_diff(&direct))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeClass {
    Good,
    Bad,
}

pub fn edge_class(f: &DevelopedFramedLocalSystem, t: &IdealTriangulation, e: usize) -> Result<EdgeClass> {
    check_base(f, t)?;
    if e >= t.edges().len() {
        return Err(Error::Invalid(format!("no edge {e}")));
    }
    Ok(if f.edge_is_bad(e) { EdgeClass::Bad } else { EdgeClass::Good })
}
