use crate::projective::{MapClass, ProjectiveMap, ProjectivePoint};

use super::DevelopedFramedLocalSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    /// Dual cycle closed by a non-tree arc.
    Cycle(usize),
    /// Loop around a puncture.
    Puncture(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairAction {
    Fix,
    Swap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegeneracyKind {
    None,
    D1,
    D2,
    D3,
}

#[derive(Clone, Debug)]
pub enum DegeneracyVerdict {
    None,
    /// A boundary segment whose endpoint framings agree.
    D1 {
        segment: usize,
    },
    /// An invariant unordered pair containing every framing, in the root chart.
    D2 {
        pair: [ProjectivePoint; 2],
        actions: Vec<(Generator, PairAction)>,
    },
    /// A common fixed framing on a closed surface with non-semisimple puncture loops.
    D3 {
        point: ProjectivePoint,
    },
}

impl DegeneracyVerdict {
    pub fn kind(&self) -> DegeneracyKind {
        match self {
            DegeneracyVerdict::None => DegeneracyKind::None,
            DegeneracyVerdict::D1 { .. } => DegeneracyKind::D1,
            DegeneracyVerdict::D2 { .. } => DegeneracyKind::D2,
            DegeneracyVerdict::D3 { .. } => DegeneracyKind::D3,
        }
    }

    pub fn is_none(&self) -> bool {
        self.kind() == DegeneracyKind::None
    }

    /// Re-checks the witness against `f`.
    pub fn verify(&self, f: &DevelopedFramedLocalSystem) -> bool {
        let data = Data::of(f);
        match self {
            DegeneracyVerdict::None => true,
            DegeneracyVerdict::D1 { segment } => !f.base().is_arc(*segment) && f.edge_is_bad(*segment),
            DegeneracyVerdict::D2 { pair, actions } => data.check_pair(pair).as_deref() == Some(actions.as_slice()),
            DegeneracyVerdict::D3 { point } => f.base().surface().is_closed() && data.check_common(point),
        }
    }
}

struct Data {
    generators: Vec<(Generator, ProjectiveMap)>,
    points: Vec<ProjectivePoint>,
    puncture_classes: Vec<MapClass>,
}

impl Data {
    fn of(f: &DevelopedFramedLocalSystem) -> Self {
        let (charts, cycles) = f.root_charts();
        let mut generators: Vec<(Generator, ProjectiveMap)> =
            cycles.iter().map(|&e| (Generator::Cycle(e), f.cycle_holonomy(&charts, e))).collect();
        let mut puncture_classes = Vec::new();
        for p in f.base().punctures() {
            if let Ok((h, anchor)) = f.puncture_holonomy(p) {
                let root = h.conjugate_by(&charts[anchor.triangle]);
                puncture_classes.push(root.classify());
                generators.push((Generator::Puncture(p), root));
            }
        }
        let points = f
            .corners()
            .iter()
            .enumerate()
            .flat_map(|(t, tri)| tri.iter().map(move |p| (t, *p)))
            .map(|(t, p)| charts[t].apply(&p).normalized())
            .collect();
        Self { generators, points, puncture_classes }
    }

    fn check_pair(&self, pair: &[ProjectivePoint; 2]) -> Option<Vec<(Generator, PairAction)>> {
        let [x, y] = pair;
        if x.same(y) || !self.points.iter().all(|p| p.same(x) || p.same(y)) {
            return None;
        }
        self.generators
            .iter()
            .map(|(id, g)| {
                let (gx, gy) = (g.apply(x), g.apply(y));
                if gx.same(x) && gy.same(y) {
                    Some((*id, PairAction::Fix))
                } else if gx.same(y) && gy.same(x) {
                    Some((*id, PairAction::Swap))
                } else {
                    None
                }
            })
            .collect()
    }

    fn check_common(&self, x: &ProjectivePoint) -> bool {
        self.points.iter().all(|p| p.same(x))
            && self.generators.iter().all(|(_, g)| g.apply(x).same(x))
            && self.puncture_classes.iter().all(|c| *c != MapClass::Semisimple)
    }

    fn distinct_points(&self) -> Vec<ProjectivePoint> {
        let mut out: Vec<ProjectivePoint> = Vec::new();
        for p in &self.points {
            if !out.iter().any(|q| q.same(p)) {
                out.push(*p);
            }
        }
        out
    }

    fn d2(&self) -> Option<DegeneracyVerdict> {
        let classes: Vec<MapClass> = self.generators.iter().map(|(_, g)| g.classify()).collect();
        if classes.contains(&MapClass::Parabolic) {
            return None;
        }
        let distinct = self.distinct_points();
        let mut candidates: Vec<[ProjectivePoint; 2]> = Vec::new();
        match classes.iter().position(|c| *c == MapClass::Semisimple) {
            Some(i) => {
                let h = &self.generators[i].1;
                let lines = h.fixed_lines().ok()?.points();
                candidates.push([lines[0], lines[1]]);
                if h.compose(h).classify() == MapClass::Identity {
                    for q in &distinct {
                        let hq = h.apply(q).normalized();
                        if !hq.same(q) {
                            candidates.push([*q, hq]);
                        }
                    }
                }
            }
            None => match distinct.as_slice() {
                [x] => {
                    let pad = [ProjectivePoint::infinity(), ProjectivePoint::affine(0.0.into())]
                        .into_iter()
                        .find(|q| !q.same(x))
                        .expect("one of 0 and ∞ differs");
                    candidates.push([*x, pad]);
                }
                [x, y] => candidates.push([*x, *y]),
                _ => {}
            },
        }
        candidates
            .into_iter()
            .find_map(|pair| self.check_pair(&pair).map(|actions| DegeneracyVerdict::D2 { pair, actions }))
    }
}

/// First applicable condition in the order D1, D2, D3.
pub fn degeneracy(f: &DevelopedFramedLocalSystem) -> DegeneracyVerdict {
    for e in f.base().boundary_segments() {
        if f.edge_is_bad(e) {
            return DegeneracyVerdict::D1 { segment: e };
        }
    }
    let data = Data::of(f);
    if let Some(v) = data.d2() {
        return v;
    }
    if f.base().surface().is_closed() {
        if let Some(x) = data.points.first() {
            if data.check_common(x) {
                return DegeneracyVerdict::D3 { point: *x };
            }
        }
    }
    DegeneracyVerdict::None
}
