//! Framed PGL2 local systems on marked bordered surfaces, their Fock–Goncharov
//! coordinates, and the framed monodromy of Schrödinger equations with rational
//! potentials.

pub mod checks;
pub mod cluster;
pub mod error;
pub mod framed;
pub mod io;
pub mod ode;
pub mod projective;
pub mod surface;

pub use cluster::{coordinates, find_good, mutate, reconstruct, signed_coordinates, CoordinateTuple};
pub use error::{Error, Result};
pub use framed::{degeneracy, DegeneracyVerdict, DevelopedFramedLocalSystem};
pub use ode::{
    analyze, build_framed, frame_regular, integrate, monodromy, subdominant, surface_of, wkb_sweep, IntegratorConfig,
    PlanarPath, PoleRecord, RationalPotential, Realization,
};
pub use projective::{cross_ratio, map_from_triples, Complex, CrossRatio, MapClass, ProjectiveMap, ProjectivePoint};
pub use surface::{
    default_triangulation, ExchangeMatrix, IdealTriangulation, MarkedBorderedSurface, Sign, Signing,
    TaggedTriangulation,
};
