use std::collections::BTreeSet;

use super::{signed_coordinates, CoordinateTuple};
use crate::error::{Error, Result};
use crate::framed::{degeneracy, DevelopedFramedLocalSystem};
use crate::projective::MapClass;
use crate::surface::{IdealTriangulation, Sign, Signing, TaggedTriangulation};

/// Outcome of the search for a triangulation with all arcs good.
#[derive(Clone, Debug)]
pub struct GoodSearch {
    pub tagged: TaggedTriangulation,
    pub coordinates: CoordinateTuple,
    /// The input system re-expressed on the returned triangulation, before sign flips.
    pub framed: DevelopedFramedLocalSystem,
    /// Arc sequence of the accepted flips, in order.
    pub flips: Vec<usize>,
    pub sign_flips: Vec<usize>,
    pub moves: usize,
}

/// Canonical triangulation key with the negative punctures.
type Visited = (Vec<[(usize, usize); 3]>, Vec<usize>);

struct State {
    /// Input system on the current triangulation.
    plain: DevelopedFramedLocalSystem,
    /// Same, with the sign flips applied.
    signed: DevelopedFramedLocalSystem,
}

impl State {
    fn flip(&self, arc: usize) -> Option<State> {
        Some(State { plain: self.plain.flip(arc).ok()?, signed: self.signed.flip(arc).ok()? })
    }
}

fn good_count(f: &DevelopedFramedLocalSystem) -> usize {
    f.base().arcs().filter(|&e| !f.edge_is_bad(e)).count()
}

/// Candidate moves: single flips of bad arcs, then flip pairs of two sides of one triangle.
fn candidates(f: &DevelopedFramedLocalSystem) -> Vec<Vec<usize>> {
    let t = f.base();
    let mut out: Vec<Vec<usize>> =
        t.arcs().filter(|&e| f.edge_is_bad(e) && !t.is_self_folded_interior(e)).map(|e| vec![e]).collect();
    let mut pairs = BTreeSet::new();
    for tri in t.triangles() {
        for i in 0..3 {
            for j in 0..3 {
                let (a, b) = (tri.sides[i], tri.sides[j]);
                if a != b && t.is_arc(a) && t.is_arc(b) && (f.edge_is_bad(a) || f.edge_is_bad(b)) {
                    pairs.insert((a, b));
                }
            }
        }
    }
    out.extend(pairs.into_iter().map(|(a, b)| vec![a, b]));
    out
}

/// Greedy search with single flips and pentagon moves, falling back to a sign
/// flip when every arc is bad. The budget `20·n²` counts accepted moves.
pub fn find_good(f: &DevelopedFramedLocalSystem, t0: &IdealTriangulation) -> Result<GoodSearch> {
    find_good_within(f, t0, None)
}

/// `find_good` with an explicit move budget in place of `20·n²`.
pub fn find_good_within(
    f: &DevelopedFramedLocalSystem,
    t0: &IdealTriangulation,
    budget: Option<usize>,
) -> Result<GoodSearch> {
    if !f.base().same_as(t0) {
        return Err(Error::TriangulationMismatch);
    }
    let verdict = degeneracy(f);
    if !verdict.is_none() {
        return Err(Error::DegenerateInput(format!("{:?}", verdict.kind())));
    }
    let n = t0.arc_count();
    let budget = budget.unwrap_or((20 * n * n).max(20));
    let mut state = State { plain: f.clone(), signed: f.clone() };
    let mut signing = Signing::trivial(t0);
    let mut flips = Vec::new();
    let mut sign_flips = Vec::new();
    let mut moves = 0;
    let mut seen: BTreeSet<Visited> = BTreeSet::new();
    loop {
        let good = good_count(&state.signed);
        if good == n {
            break;
        }
        seen.insert((state.signed.base().canonical_key(), sign_flips.clone()));
        if moves >= budget {
            return Err(Error::BudgetExceeded { budget, good, total: n });
        }
        let mut best: Option<(usize, Vec<usize>, State)> = None;
        let mut sideways: Option<(Vec<usize>, State)> = None;
        for mv in candidates(&state.signed) {
            let next = mv
                .iter()
                .try_fold(None::<State>, |acc, &arc| acc.as_ref().unwrap_or(&state).flip(arc).map(Some))
                .flatten();
            let Some(next) = next else { continue };
            let score = good_count(&next.signed);
            if score > good && best.as_ref().is_none_or(|(s, m, _)| score > *s || (score == *s && mv < *m)) {
                best = Some((score, mv, next));
            } else if score == good
                && sideways.is_none()
                && !seen.contains(&(next.signed.base().canonical_key(), sign_flips.clone()))
            {
                sideways = Some((mv, next));
            }
        }
        match (best, sideways) {
            (Some((_, mv, next)), _) | (None, Some((mv, next))) => {
                log::debug!("find_good: move {mv:?} at {good}/{n} good");
                flips.extend(mv);
                state = next;
            }
            (None, None) => {
                let p = state
                    .signed
                    .base()
                    .punctures()
                    .filter(|p| !sign_flips.contains(p))
                    .find(|&p| {
                        state.signed.puncture_holonomy(p).is_ok_and(|(h, _)| h.classify() == MapClass::Semisimple)
                    })
                    .filter(|_| good == 0)
                    .ok_or(Error::BudgetExceeded { budget, good, total: n })?;
                log::debug!("find_good: sign flip at puncture {p}");
                state.signed = state.signed.sign_flip(p)?;
                signing.set(p, Sign::Minus);
                sign_flips.push(p);
            }
        }
        moves += 1;
    }
    let State { mut plain, .. } = state;
    // canonical form: a −1 at a valency-1 puncture moves onto the loop label
    let tagged = TaggedTriangulation::new(plain.base().clone(), signing.clone())?;
    for p in signing.negative() {
        if plain.base().valency(p)? == 1 {
            let j = plain.base().arcs().find(|&e| plain.base().self_folded(e).is_some_and(|(_, q, _)| q == p));
            if let Some(j) = j {
                let (_, _, k) = plain.base().self_folded(j).expect("self-folded");
                plain.swap_labels(j, k);
            }
        }
    }
    let coordinates = signed_coordinates(&plain, &tagged)?;
    if !coordinates.is_regular() {
        return Err(Error::BudgetExceeded { budget, good: n, total: n });
    }
    Ok(GoodSearch { tagged, coordinates, framed: plain, flips, sign_flips, moves })
}
