use std::collections::BTreeMap;

use super::IdealTriangulation;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn toggled(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i32(v: i32) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::Invalid(format!("sign must be ±1, got {v}"))),
        }
    }
}

/// Sign per puncture, keyed by marked point id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signing {
    signs: BTreeMap<usize, Sign>,
}

impl Signing {
    pub fn trivial(t: &IdealTriangulation) -> Self {
        Self { signs: t.punctures().map(|p| (p, Sign::Plus)).collect() }
    }

    pub fn from_map(t: &IdealTriangulation, signs: BTreeMap<usize, Sign>) -> Result<Self> {
        let punctures: Vec<usize> = t.punctures().collect();
        if signs.keys().copied().collect::<Vec<_>>() != punctures {
            return Err(Error::Invalid("signing must assign every puncture exactly once".into()));
        }
        Ok(Self { signs })
    }

    pub fn get(&self, p: usize) -> Sign {
        self.signs.get(&p).copied().unwrap_or(Sign::Plus)
    }

    pub fn set(&mut self, p: usize, s: Sign) {
        self.signs.insert(p, s);
    }

    pub fn toggle(&mut self, p: usize) {
        let s = self.get(p).toggled();
        self.set(p, s);
    }

    pub fn is_trivial(&self) -> bool {
        self.signs.values().all(|&s| s == Sign::Plus)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Sign)> + '_ {
        self.signs.iter().map(|(&p, &s)| (p, s))
    }

    pub fn negative(&self) -> impl Iterator<Item = usize> + '_ {
        self.iter().filter(|(_, s)| *s == Sign::Minus).map(|(p, _)| p)
    }
}

/// A signed triangulation in canonical form: sign +1 at every valency-1 puncture.
#[derive(Clone, Debug)]
pub struct TaggedTriangulation {
    triangulation: IdealTriangulation,
    signing: Signing,
}

impl TaggedTriangulation {
    pub fn new(triangulation: IdealTriangulation, signing: Signing) -> Result<Self> {
        Self { triangulation, signing }.canonicalized()
    }

    pub fn plain(triangulation: IdealTriangulation) -> Self {
        let signing = Signing::trivial(&triangulation);
        Self { triangulation, signing }
    }

    pub fn triangulation(&self) -> &IdealTriangulation {
        &self.triangulation
    }

    pub fn signing(&self) -> &Signing {
        &self.signing
    }

    pub fn into_parts(self) -> (IdealTriangulation, Signing) {
        (self.triangulation, self.signing)
    }

    /// Moves a −1 at a valency-1 puncture onto the loop by swapping the labels of
    /// the interior arc and its encircling loop.
    fn canonicalized(mut self) -> Result<Self> {
        let negative: Vec<usize> = self.signing.negative().collect();
        for p in negative {
            if self.triangulation.valency(p)? != 1 {
                continue;
            }
            let j = self.interior_at(p)?;
            let (_, _, k) = self.triangulation.self_folded(j).expect("interior arc");
            if !self.triangulation.is_arc(k) {
                return Err(Error::SelfFoldedInterior(j));
            }
            self.triangulation.swap_labels(j, k);
            self.signing.set(p, Sign::Plus);
        }
        Ok(self)
    }

    fn interior_at(&self, p: usize) -> Result<usize> {
        let t = &self.triangulation;
        t.arcs()
            .find(|&e| t.self_folded(e).is_some_and(|(_, q, _)| q == p))
            .ok_or_else(|| Error::Invalid(format!("no self-folded triangle around puncture {p}")))
    }

    pub fn is_canonical(&self) -> bool {
        self.signing.negative().all(|p| !matches!(self.triangulation.valency(p), Ok(1)))
    }

    /// Flip of a tagged arc; interior arcs of self-folded triangles are flipped
    /// in the representative with the opposite sign at their puncture.
    pub fn tagged_flip(&self, arc: usize) -> Result<Self> {
        let t = &self.triangulation;
        match t.self_folded(arc) {
            None => Self::new(t.flip(arc)?, self.signing.clone()),
            Some((_, p, k)) => {
                if !t.is_arc(k) {
                    return Err(Error::SelfFoldedInterior(arc));
                }
                let mut other = t.clone();
                other.swap_labels(arc, k);
                let mut signing = self.signing.clone();
                signing.toggle(p);
                Self::new(other.flip(arc)?, signing)
            }
        }
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.signing == other.signing && self.triangulation.same_as(&other.triangulation)
    }
}
