//! Schrödinger equations `y″ = φ y` with rational `φ`: pole data, transport
//! along planar paths, subdominant solutions, eigenline framings and the framed
//! monodromy system.

mod build;
mod integrate;
mod path;
mod poly;
mod potential;
mod stokes;
mod wkb;

pub use build::{build_framed, Anchor, BuiltSystem, PlanarRealization, Realization};
pub use integrate::{integrate, monodromy, Column, IntegratorConfig, Transport};
pub use path::{PlanarPath, Segment};
pub use poly::Polynomial;
pub use potential::{PoleLocation, PoleRecord, PotentialSurface, RationalPotential};
pub use stokes::{default_loop, frame_regular, subdominant, RegularFrame, Subdominant, TAU_MATCH};
pub use wkb::{wkb_sweep, WkbRow, WkbTable};

use crate::error::Result;

pub fn analyze(phi: &RationalPotential) -> Result<Vec<PoleRecord>> {
    phi.analyze()
}

pub fn surface_of(phi: &RationalPotential) -> Result<PotentialSurface> {
    phi.surface_of()
}

pub fn pullback_power(phi: &RationalPotential, k: usize) -> Result<RationalPotential> {
    phi.pullback_power(k)
}
