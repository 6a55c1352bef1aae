//! JSON and CSV formats. Floats are written with 17 significant digits.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cluster::{CoordinateTuple, GoodSearch};
use crate::error::{Error, Result};
use crate::framed::{DegeneracyVerdict, DevelopedFramedLocalSystem, Generator, PairAction};
use crate::ode::{Anchor, PlanarPath, PlanarRealization, PoleLocation, PoleRecord, RationalPotential, Segment};
use crate::projective::{Complex, CrossRatio, ProjectiveMap, ProjectivePoint};
use crate::surface::{
    EdgeKind, IdealTriangulation, MarkedBorderedSurface, MarkedPoint, Sign, Signing, TaggedTriangulation, Triangle,
};

/// JSON formatter writing every float as `{:.16e}`.
struct FixedFloats;

impl serde_json::ser::Formatter for FixedFloats {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, w: &mut W, v: f64) -> std::io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + std::io::Write>(&mut self, w: &mut W, v: f32) -> std::io::Result<()> {
        write!(w, "{:.16e}", v as f64)
    }
}

/// Compact JSON with fixed float formatting.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats);
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(out).expect("JSON is UTF-8")
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Invalid(format!("malformed JSON: {e}")))
}

/// Complex number as `{re, im}`; plain numbers are accepted on input.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexDto {
    Pair {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    #[serde(skip_serializing)]
    Real(f64),
}

impl From<Complex> for ComplexDto {
    fn from(z: Complex) -> Self {
        ComplexDto::Pair { re: z.re, im: z.im }
    }
}

impl From<ComplexDto> for Complex {
    fn from(d: ComplexDto) -> Self {
        match d {
            ComplexDto::Pair { re, im } => Complex::new(re, im),
            ComplexDto::Real(re) => Complex::new(re, 0.0),
        }
    }
}

fn cx(v: &[ComplexDto]) -> Vec<Complex> {
    v.iter().map(|&c| c.into()).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialDto {
    pub numerator: Vec<ComplexDto>,
    #[serde(default = "one")]
    pub denominator: Vec<ComplexDto>,
}

fn one() -> Vec<ComplexDto> {
    vec![ComplexDto::Pair { re: 1.0, im: 0.0 }]
}

impl PotentialDto {
    pub fn to_potential(&self) -> Result<RationalPotential> {
        RationalPotential::new(cx(&self.numerator), cx(&self.denominator))
    }
}

impl From<&RationalPotential> for PotentialDto {
    fn from(p: &RationalPotential) -> Self {
        let f = |c: &[Complex]| c.iter().map(|&z| z.into()).collect();
        Self { numerator: f(p.numerator().coeffs()), denominator: f(p.denominator().coeffs()) }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDto {
    #[serde(default)]
    pub genus: u32,
    #[serde(default)]
    pub boundary: Vec<u32>,
    #[serde(default)]
    pub punctures: u32,
}

impl From<&MarkedBorderedSurface> for SurfaceDto {
    fn from(s: &MarkedBorderedSurface) -> Self {
        Self { genus: s.genus, boundary: s.boundary.clone(), punctures: s.punctures }
    }
}

impl SurfaceDto {
    pub fn to_surface(&self) -> Result<MarkedBorderedSurface> {
        MarkedBorderedSurface::new(self.genus, self.boundary.clone(), self.punctures)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VertexDto {
    Puncture,
    Boundary { circle: usize, position: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDto {
    pub id: usize,
    pub kind: String,
}

/// Triangles as side triples, with a parallel table of corner triples.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangulationDto {
    pub surface: SurfaceDto,
    pub vertices: Vec<VertexDto>,
    pub triangles: Vec<[usize; 3]>,
    pub corners: Vec<[usize; 3]>,
    pub edges: Vec<EdgeDto>,
}

impl From<&IdealTriangulation> for TriangulationDto {
    fn from(t: &IdealTriangulation) -> Self {
        Self {
            surface: t.surface().into(),
            vertices: t
                .marked()
                .iter()
                .map(|m| match *m {
                    MarkedPoint::Puncture => VertexDto::Puncture,
                    MarkedPoint::Boundary { circle, position } => VertexDto::Boundary { circle, position },
                })
                .collect(),
            triangles: t.triangles().iter().map(|tri| tri.sides).collect(),
            corners: t.triangles().iter().map(|tri| tri.corners).collect(),
            edges: t
                .edges()
                .iter()
                .enumerate()
                .map(|(id, e)| EdgeDto { id, kind: if e.kind == EdgeKind::Arc { "arc" } else { "boundary" }.into() })
                .collect(),
        }
    }
}

impl TriangulationDto {
    pub fn to_triangulation(&self) -> Result<IdealTriangulation> {
        if self.corners.len() != self.triangles.len() {
            return Err(Error::Invalid("corner table does not match the triangles".into()));
        }
        let mut kinds = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            if e.id != i {
                return Err(Error::Invalid(format!("edge ids must be 0..n in order, found {} at {i}", e.id)));
            }
            kinds.push(match e.kind.as_str() {
                "arc" => EdgeKind::Arc,
                "boundary" => EdgeKind::Boundary,
                k => return Err(Error::Invalid(format!("unknown edge kind {k}"))),
            });
        }
        let marked = self
            .vertices
            .iter()
            .map(|v| match *v {
                VertexDto::Puncture => MarkedPoint::Puncture,
                VertexDto::Boundary { circle, position } => MarkedPoint::Boundary { circle, position },
            })
            .collect();
        let triangles =
            self.triangles.iter().zip(&self.corners).map(|(&sides, &corners)| Triangle { sides, corners }).collect();
        let t = IdealTriangulation::from_parts(self.surface.to_surface()?, marked, triangles, kinds)?;
        t.validate().into_result()?;
        Ok(t)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaggedDto {
    pub triangulation: TriangulationDto,
    /// Sign per puncture id; missing punctures carry +1.
    #[serde(default)]
    pub signing: BTreeMap<usize, i32>,
}

impl From<&TaggedTriangulation> for TaggedDto {
    fn from(t: &TaggedTriangulation) -> Self {
        Self {
            triangulation: t.triangulation().into(),
            signing: t.signing().iter().map(|(p, s)| (p, s.as_i32())).collect(),
        }
    }
}

pub fn signing_from(t: &IdealTriangulation, signs: &BTreeMap<usize, i32>) -> Result<Signing> {
    let mut s = Signing::trivial(t);
    for (&p, &v) in signs {
        if !t.marked().get(p).is_some_and(|m| m.is_puncture()) {
            return Err(Error::NotAPuncture(p));
        }
        s.set(p, Sign::from_i32(v)?);
    }
    Ok(s)
}

impl TaggedDto {
    pub fn to_tagged(&self) -> Result<TaggedTriangulation> {
        let t = self.triangulation.to_triangulation()?;
        let s = signing_from(&t, &self.signing)?;
        TaggedTriangulation::new(t, s)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDto {
    pub a: ComplexDto,
    pub b: ComplexDto,
}

impl From<ProjectivePoint> for PointDto {
    fn from(p: ProjectivePoint) -> Self {
        let n = p.normalized();
        Self { a: n.a().into(), b: n.b().into() }
    }
}

impl PointDto {
    pub fn to_point(&self) -> Result<ProjectivePoint> {
        ProjectivePoint::new(self.a.into(), self.b.into())
    }
}

pub type MatrixDto = [[ComplexDto; 2]; 2];

pub fn matrix_dto(g: &ProjectiveMap) -> MatrixDto {
    g.normalized().matrix().map(|row| row.map(ComplexDto::from))
}

pub fn matrix_from(m: &MatrixDto) -> Result<ProjectiveMap> {
    ProjectiveMap::new(m.map(|row| row.map(Complex::from)))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FramedDto {
    pub triangulation: TriangulationDto,
    pub corners: Vec<[PointDto; 3]>,
    /// Per edge: det-1 gluing matrix on arcs, null on boundary segments.
    pub gluings: Vec<Option<MatrixDto>>,
}

impl From<&DevelopedFramedLocalSystem> for FramedDto {
    fn from(f: &DevelopedFramedLocalSystem) -> Self {
        Self {
            triangulation: f.base().into(),
            corners: f.corners().iter().map(|c| c.map(PointDto::from)).collect(),
            gluings: f.gluings().iter().map(|g| g.as_ref().map(matrix_dto)).collect(),
        }
    }
}

impl FramedDto {
    pub fn to_framed(&self) -> Result<DevelopedFramedLocalSystem> {
        let t = self.triangulation.to_triangulation()?;
        let corners = self
            .corners
            .iter()
            .map(|c| Ok([c[0].to_point()?, c[1].to_point()?, c[2].to_point()?]))
            .collect::<Result<Vec<_>>>()?;
        let gluings =
            self.gluings.iter().map(|g| g.as_ref().map(matrix_from).transpose()).collect::<Result<Vec<_>>>()?;
        let f = DevelopedFramedLocalSystem::new(t, corners, gluings)?;
        f.validate().into_result()?;
        Ok(f)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueDto {
    Value(ComplexDto),
    Symbol(Symbol),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symbol {
    Zero,
    Inf,
    Ind,
}

/// `{arc_id: {re, im} | "zero" | "inf" | "ind"}`.
pub type CoordinatesDto = BTreeMap<usize, ValueDto>;

pub fn coordinates_dto(x: &CoordinateTuple) -> CoordinatesDto {
    x.iter()
        .map(|(a, v)| {
            let d = match v {
                CrossRatio::Value(z) => ValueDto::Value(z.into()),
                CrossRatio::Zero => ValueDto::Symbol(Symbol::Zero),
                CrossRatio::Infinite => ValueDto::Symbol(Symbol::Inf),
                CrossRatio::Indeterminate => ValueDto::Symbol(Symbol::Ind),
            };
            (a, d)
        })
        .collect()
}

pub fn coordinates_from(d: &CoordinatesDto) -> CoordinateTuple {
    CoordinateTuple::new(
        d.iter()
            .map(|(&a, v)| {
                let x = match *v {
                    ValueDto::Value(z) => CrossRatio::from_value(z.into()),
                    ValueDto::Symbol(Symbol::Zero) => CrossRatio::Zero,
                    ValueDto::Symbol(Symbol::Inf) => CrossRatio::Infinite,
                    ValueDto::Symbol(Symbol::Ind) => CrossRatio::Indeterminate,
                };
                (a, x)
            })
            .collect(),
    )
}

/// CSV with columns `arc_id,re,im`; symbolic values are written in the `re` column.
pub fn coordinates_csv(x: &CoordinateTuple) -> String {
    let mut out = String::from("arc_id,re,im\n");
    for (a, v) in x.iter() {
        match v {
            CrossRatio::Value(z) => out.push_str(&format!("{a},{:.16e},{:.16e}\n", z.re, z.im)),
            CrossRatio::Zero => out.push_str(&format!("{a},zero,\n")),
            CrossRatio::Infinite => out.push_str(&format!("{a},inf,\n")),
            CrossRatio::Indeterminate => out.push_str(&format!("{a},ind,\n")),
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict")]
pub enum VerdictDto {
    None,
    D1 { segment: usize },
    D2 { pair: [PointDto; 2], actions: Vec<ActionDto> },
    D3 { point: PointDto },
}

#[derive(Clone, Debug, Serialize)]
pub struct ActionDto {
    pub generator: String,
    pub id: usize,
    pub action: String,
}

impl From<&DegeneracyVerdict> for VerdictDto {
    fn from(v: &DegeneracyVerdict) -> Self {
        match v {
            DegeneracyVerdict::None => VerdictDto::None,
            DegeneracyVerdict::D1 { segment } => VerdictDto::D1 { segment: *segment },
            DegeneracyVerdict::D2 { pair, actions } => VerdictDto::D2 {
                pair: pair.map(PointDto::from),
                actions: actions
                    .iter()
                    .map(|(g, a)| {
                        let (generator, id) = match g {
                            Generator::Cycle(e) => ("cycle", *e),
                            Generator::Puncture(p) => ("puncture", *p),
                        };
                        let action = if *a == PairAction::Fix { "fix" } else { "swap" };
                        ActionDto { generator: generator.into(), id, action: action.into() }
                    })
                    .collect(),
            },
            DegeneracyVerdict::D3 { point } => VerdictDto::D3 { point: (*point).into() },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GoodDto {
    pub tagged: TaggedDto,
    pub coordinates: CoordinatesDto,
    pub flips: Vec<usize>,
    pub sign_flips: Vec<usize>,
    pub moves: usize,
}

impl From<&GoodSearch> for GoodDto {
    fn from(g: &GoodSearch) -> Self {
        Self {
            tagged: (&g.tagged).into(),
            coordinates: coordinates_dto(&g.coordinates),
            flips: g.flips.clone(),
            sign_flips: g.sign_flips.clone(),
            moves: g.moves,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum LocationDto {
    Finite(ComplexDto),
    Infinity(&'static str),
}

#[derive(Clone, Debug, Serialize)]
pub struct PoleDto {
    pub location: LocationDto,
    pub order: usize,
    pub leading: ComplexDto,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<ComplexDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residue: Option<ComplexDto>,
    pub stokes_angles: Vec<f64>,
    pub anti_stokes_angles: Vec<f64>,
}

impl From<&PoleRecord> for PoleDto {
    fn from(p: &PoleRecord) -> Self {
        Self {
            location: match p.location {
                PoleLocation::Finite(z) => LocationDto::Finite(z.into()),
                PoleLocation::Infinity => LocationDto::Infinity("inf"),
            },
            order: p.order,
            leading: p.leading.into(),
            exponent: p.exponent.map(Into::into),
            residue: p.residue.map(Into::into),
            stokes_angles: p.stokes_angles.clone(),
            anti_stokes_angles: p.anti_stokes_angles.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SegmentDto {
    Line { from: ComplexDto, to: ComplexDto },
    Arc { center: ComplexDto, radius: f64, start: f64, sweep: f64 },
}

pub fn path_from(segs: &[SegmentDto]) -> Result<PlanarPath> {
    PlanarPath::new(
        segs.iter()
            .map(|s| match *s {
                SegmentDto::Line { from, to } => Segment::Line { from: from.into(), to: to.into() },
                SegmentDto::Arc { center, radius, start, sweep } => {
                    Segment::Arc { center: center.into(), radius, start, sweep }
                }
            })
            .collect(),
    )
}

pub fn path_dto(p: &PlanarPath) -> Vec<SegmentDto> {
    p.segments()
        .iter()
        .map(|s| match *s {
            Segment::Line { from, to } => SegmentDto::Line { from: from.into(), to: to.into() },
            Segment::Arc { center, radius, start, sweep } => {
                SegmentDto::Arc { center: center.into(), radius, start, sweep }
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnchorDto {
    Puncture { pole: usize },
    Stokes { pole: usize, sector: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealizationDto {
    pub triangulation: TriangulationDto,
    pub anchors: Vec<AnchorDto>,
    pub base_points: Vec<ComplexDto>,
    pub corner_paths: Vec<[Vec<SegmentDto>; 3]>,
    pub crossings: Vec<Option<Vec<SegmentDto>>>,
}

impl From<&PlanarRealization> for RealizationDto {
    fn from(r: &PlanarRealization) -> Self {
        Self {
            triangulation: (&r.triangulation).into(),
            anchors: r
                .anchors
                .iter()
                .map(|a| match *a {
                    Anchor::Puncture { pole } => AnchorDto::Puncture { pole },
                    Anchor::Stokes { pole, sector } => AnchorDto::Stokes { pole, sector },
                })
                .collect(),
            base_points: r.base_points.iter().map(|&z| z.into()).collect(),
            corner_paths: r.corner_paths.iter().map(|c| [path_dto(&c[0]), path_dto(&c[1]), path_dto(&c[2])]).collect(),
            crossings: r.crossings.iter().map(|c| c.as_ref().map(path_dto)).collect(),
        }
    }
}

impl RealizationDto {
    pub fn to_realization(&self) -> Result<PlanarRealization> {
        Ok(PlanarRealization {
            triangulation: self.triangulation.to_triangulation()?,
            anchors: self
                .anchors
                .iter()
                .map(|a| match *a {
                    AnchorDto::Puncture { pole } => Anchor::Puncture { pole },
                    AnchorDto::Stokes { pole, sector } => Anchor::Stokes { pole, sector },
                })
                .collect(),
            base_points: cx(&self.base_points),
            corner_paths: self
                .corner_paths
                .iter()
                .map(|c| Ok([path_from(&c[0])?, path_from(&c[1])?, path_from(&c[2])?]))
                .collect::<Result<Vec<_>>>()?,
            crossings: self
                .crossings
                .iter()
                .map(|c| c.as_deref().map(path_from).transpose())
                .collect::<Result<Vec<_>>>()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::RationalPotential;
    use crate::surface::default_triangulation;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_json(&ComplexDto::from(Complex::new(0.1, -2.0)));
        assert_eq!(s, r#"{"re":1.0000000000000001e-1,"im":-2.0000000000000000e0}"#);
        let back: ComplexDto = from_json(&s).unwrap();
        assert_eq!(Complex::from(back), Complex::new(0.1, -2.0));
    }

    #[test]
    fn triangulation_round_trip() {
        let t = default_triangulation(&MarkedBorderedSurface::annulus(2, 1)).unwrap().0;
        let text = to_json(&TriangulationDto::from(&t));
        let back = from_json::<TriangulationDto>(&text).unwrap().to_triangulation().unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn coordinates_round_trip_and_csv() {
        let mut x = CoordinateTuple::from_values([(0, Complex::new(2.0, 0.5))]);
        x.insert(1, CrossRatio::Zero);
        let text = to_json(&coordinates_dto(&x));
        assert_eq!(text, r#"{"0":{"re":2.0000000000000000e0,"im":5.0000000000000000e-1},"1":"zero"}"#);
        let back = coordinates_from(&from_json(&text).unwrap());
        assert_eq!(back.get(1), Some(CrossRatio::Zero));
        assert_eq!(back.value(0), Some(Complex::new(2.0, 0.5)));
        assert_eq!(coordinates_csv(&x), "arc_id,re,im\n0,2.0000000000000000e0,5.0000000000000000e-1\n1,zero,\n");
    }

    #[test]
    fn potentials_accept_plain_numbers() {
        let d: PotentialDto = from_json(r#"{"numerator":[-1,0,0,{"re":1,"im":0}]}"#).unwrap();
        let p = d.to_potential().unwrap();
        assert_eq!(p, RationalPotential::polynomial(vec![(-1.0).into(), 0.0.into(), 0.0.into(), 1.0.into()]).unwrap());
        assert!(from_json::<PotentialDto>(r#"{"numerator":[1],"extra":2}"#).is_err());
    }
}
