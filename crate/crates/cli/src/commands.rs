//! One function per subcommand: typed input in, serializable artifact out.

use std::collections::BTreeMap;

use monodromy_core::checks::{run_all, Scale};
use monodromy_core::io::{
    coordinates_csv, coordinates_dto, coordinates_from, signing_from, to_json, ComplexDto, CoordinatesDto, FramedDto,
    GoodDto, PoleDto, PotentialDto, RealizationDto, SurfaceDto, TaggedDto, TriangulationDto, VerdictDto,
};
use monodromy_core::ode::{PlanarRealization, WkbTable};
use monodromy_core::{
    build_framed, cluster, coordinates, default_triangulation, degeneracy, mutate, reconstruct, signed_coordinates,
    wkb_sweep, Complex, CoordinateTuple, Error, ExchangeMatrix, Realization, Result, Signing, TaggedTriangulation,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::RunConfig;
use crate::svg::poles_svg;

/// Result of a command in every format it supports.
pub struct Artifact {
    pub json: Value,
    pub csv: Option<String>,
    pub svg: Option<String>,
}

impl Artifact {
    fn json<T: Serialize>(value: &T) -> Self {
        Self { json: serde_json::to_value(value).expect("artifact serializes"), csv: None, svg: None }
    }

    fn with_csv(mut self, x: &CoordinateTuple) -> Self {
        self.csv = Some(coordinates_csv(x));
        self
    }
}

/// Parses command input, unwrapping the `result` of an earlier run's output.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("malformed JSON: {e}")))?;
    if let Value::Object(m) = &mut v {
        if m.contains_key("command") && m.contains_key("result") {
            v = m.remove("result").expect("checked key");
        }
    }
    serde_json::from_value(v).map_err(|e| Error::Invalid(format!("malformed input: {e}")))
}

pub fn analyze(p: &PotentialDto) -> Result<Artifact> {
    let poles = p.to_potential()?.analyze()?;
    let dto: Vec<PoleDto> = poles.iter().map(PoleDto::from).collect();
    let mut a = Artifact::json(&serde_json::json!({ "poles": dto }));
    a.svg = Some(poles_svg(&poles));
    Ok(a)
}

#[derive(Serialize)]
struct SurfaceOut {
    surface: SurfaceDto,
    degenerate: bool,
    rank: i64,
    /// Pole index per boundary circle.
    circles: Vec<usize>,
    /// Pole index per puncture.
    punctures: Vec<usize>,
}

pub fn surface(p: &PotentialDto) -> Result<Artifact> {
    let s = p.to_potential()?.surface_of()?;
    Ok(Artifact::json(&SurfaceOut {
        surface: (&s.surface).into(),
        degenerate: s.degenerate,
        rank: s.surface.rank(),
        circles: s.circles,
        punctures: s.punctures,
    }))
}

#[derive(Serialize)]
struct TriangulateOut {
    triangulation: TriangulationDto,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<String>,
}

pub fn triangulate(s: &SurfaceDto) -> Result<Artifact> {
    let (t, w) = default_triangulation(&s.to_surface()?)?;
    Ok(Artifact::json(&TriangulateOut { triangulation: (&t).into(), warning: w.map(|w| format!("{w:?}")) }))
}

pub fn flip(t: &TriangulationDto, arc: usize) -> Result<Artifact> {
    let t = t.to_triangulation()?.flip(arc)?;
    Ok(Artifact::json(&TriangulationDto::from(&t)))
}

pub fn tagged_flip(t: &TaggedDto, arc: usize) -> Result<Artifact> {
    let t = t.to_tagged()?.tagged_flip(arc)?;
    Ok(Artifact::json(&TaggedDto::from(&t)))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixOut {
    pub rows: Vec<Vec<i32>>,
}

pub fn exchange_matrix(t: &TriangulationDto) -> Result<Artifact> {
    let eps = t.to_triangulation()?.exchange_matrix();
    Ok(Artifact::json(&MatrixOut { rows: eps.rows().to_vec() }))
}

pub fn coords(f: &FramedDto) -> Result<Artifact> {
    let f = f.to_framed()?;
    let x = coordinates(&f, f.base())?;
    Ok(Artifact::json(&coordinates_dto(&x)).with_csv(&x))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignedInput {
    pub framed: FramedDto,
    #[serde(default)]
    pub signing: BTreeMap<usize, i32>,
}

pub fn signed_coords(i: &SignedInput) -> Result<Artifact> {
    let f = i.framed.to_framed()?;
    let s = signing_from(f.base(), &i.signing)?;
    let tau = TaggedTriangulation::new(f.base().clone(), s)?;
    let x = signed_coordinates(&f, &tau)?;
    Ok(Artifact::json(&coordinates_dto(&x)).with_csv(&x))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructInput {
    pub triangulation: TriangulationDto,
    pub coordinates: CoordinatesDto,
}

pub fn reconstruct_cmd(i: &ReconstructInput) -> Result<Artifact> {
    let t = i.triangulation.to_triangulation()?;
    let f = reconstruct(&t, &coordinates_from(&i.coordinates))?;
    Ok(Artifact::json(&FramedDto::from(&f)))
}

/// Coordinates with either an exchange matrix or the triangulation that defines one.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutateInput {
    pub coordinates: CoordinatesDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exchange_matrix: Option<Vec<Vec<i32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triangulation: Option<TriangulationDto>,
}

pub fn mutate_cmd(i: &MutateInput, arc: usize) -> Result<Artifact> {
    let x = coordinates_from(&i.coordinates);
    if !x.iter().any(|(a, _)| a == arc) {
        return Err(Error::Invalid(format!("arc {arc} has no coordinate")));
    }
    let (eps, t) = match (&i.exchange_matrix, &i.triangulation) {
        (Some(rows), None) => (ExchangeMatrix::new(rows.clone())?, None),
        (None, Some(t)) => {
            let t = t.to_triangulation()?;
            (t.exchange_matrix(), Some(t))
        }
        _ => return Err(Error::Invalid("give exactly one of exchange_matrix and triangulation".into())),
    };
    let y = mutate(&x, &eps, arc)?;
    let out = MutateInput {
        coordinates: coordinates_dto(&y),
        exchange_matrix: t.is_none().then(|| eps.mutate(arc).rows().to_vec()),
        triangulation: t.map(|t| t.flip(arc)).transpose()?.as_ref().map(TriangulationDto::from),
    };
    Ok(Artifact::json(&out).with_csv(&y))
}

pub fn degeneracy_cmd(f: &FramedDto) -> Result<Artifact> {
    let f = f.to_framed()?;
    Ok(Artifact::json(&VerdictDto::from(&degeneracy(&f))))
}

pub fn find_good(f: &FramedDto, cfg: &RunConfig) -> Result<Artifact> {
    let f = f.to_framed()?;
    let g = cluster::find_good_within(&f, f.base(), cfg.search.budget)?;
    Ok(Artifact::json(&GoodDto::from(&g)).with_csv(&g.coordinates))
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RealizationChoice {
    #[default]
    Auto,
    PuncturedPolygon {
        radius: f64,
    },
    Planar(Box<RealizationDto>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonodromyInput {
    pub numerator: Vec<ComplexDto>,
    #[serde(default)]
    pub denominator: Option<Vec<ComplexDto>>,
    #[serde(default)]
    pub realization: RealizationChoice,
    /// Sign per puncture of the realization's triangulation.
    #[serde(default)]
    pub signing: BTreeMap<usize, i32>,
}

#[derive(Serialize)]
struct MonodromyOut {
    surface: SurfaceDto,
    rank: i64,
    poles: Vec<PoleDto>,
    triangulation: TriangulationDto,
    framed: FramedDto,
    coordinates: CoordinatesDto,
    verdict: VerdictDto,
    max_drift: f64,
}

fn potential_of(numerator: &[ComplexDto], denominator: &Option<Vec<ComplexDto>>) -> PotentialDto {
    PotentialDto {
        numerator: numerator.to_vec(),
        denominator: denominator.clone().unwrap_or_else(|| vec![Complex::new(1.0, 0.0).into()]),
    }
}

pub fn monodromy(i: &MonodromyInput, cfg: &RunConfig) -> Result<Artifact> {
    let phi = potential_of(&i.numerator, &i.denominator).to_potential()?;
    let planar = match &i.realization {
        RealizationChoice::Auto => None,
        RealizationChoice::PuncturedPolygon { radius } => Some(PlanarRealization::punctured_polygon(&phi, *radius)?),
        RealizationChoice::Planar(r) => Some(r.to_realization()?),
    };
    let (realization, signing) = match planar {
        None if !i.signing.is_empty() => {
            return Err(Error::Invalid("the automatic realization has no punctures to sign".into()))
        }
        None => (Realization::Auto, Signing::default()),
        Some(r) => {
            let s = signing_from(&r.triangulation, &i.signing)?;
            (Realization::UserPlanar(r), s)
        }
    };
    let b = build_framed(&phi, &signing, &realization, &cfg.integrator)?;
    let x = coordinates(&b.framed, &b.triangulation)?;
    let out = MonodromyOut {
        surface: (&b.surface.surface).into(),
        rank: b.surface.surface.rank(),
        poles: b.poles.iter().map(PoleDto::from).collect(),
        triangulation: (&b.triangulation).into(),
        framed: (&b.framed).into(),
        coordinates: coordinates_dto(&x),
        verdict: (&degeneracy(&b.framed)).into(),
        max_drift: b.max_drift,
    };
    Ok(Artifact::json(&out).with_csv(&x))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WkbInput {
    pub numerator: Vec<ComplexDto>,
    #[serde(default)]
    pub denominator: Option<Vec<ComplexDto>>,
}

#[derive(Serialize)]
struct WkbRowOut {
    hbar: f64,
    values: BTreeMap<usize, ComplexDto>,
    logs: BTreeMap<usize, ComplexDto>,
}

#[derive(Serialize)]
struct WkbOut {
    arcs: Vec<usize>,
    rows: Vec<WkbRowOut>,
    /// Slope of `log X` against `1/ħ` per arc.
    slopes: BTreeMap<usize, Option<ComplexDto>>,
}

fn wkb_out(t: &WkbTable) -> WkbOut {
    let cmap = |m: &BTreeMap<usize, Complex>| m.iter().map(|(&a, &z)| (a, z.into())).collect();
    WkbOut {
        arcs: t.arcs.clone(),
        rows: t.rows.iter().map(|r| WkbRowOut { hbar: r.hbar, values: cmap(&r.values), logs: cmap(&r.logs) }).collect(),
        slopes: t.arcs.iter().map(|&a| (a, t.slope(a).map(Into::into))).collect(),
    }
}

fn wkb_csv(t: &WkbTable) -> String {
    let mut out = String::from("hbar,arc_id,re,im,log_re,log_im\n");
    for r in &t.rows {
        for &a in &t.arcs {
            let (v, l) = (r.values[&a], r.logs[&a]);
            out.push_str(&format!("{:.16e},{a},{:.16e},{:.16e},{:.16e},{:.16e}\n", r.hbar, v.re, v.im, l.re, l.im));
        }
    }
    out
}

pub fn wkb(i: &WkbInput, hbars: &[f64], arcs: &[usize], cfg: &RunConfig) -> Result<Artifact> {
    let phi = potential_of(&i.numerator, &i.denominator).to_potential()?;
    if hbars.is_empty() || hbars.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
        return Err(Error::Invalid("hbar values must be positive and finite".into()));
    }
    let arcs = if arcs.is_empty() {
        let s = phi.surface_of()?;
        default_triangulation(&s.surface)?.0.arcs().collect()
    } else {
        arcs.to_vec()
    };
    let table = wkb_sweep(&phi, &arcs, hbars, &cfg.integrator)?;
    let mut a = Artifact::json(&wkb_out(&table));
    a.csv = Some(wkb_csv(&table));
    Ok(a)
}

#[derive(Serialize)]
struct SelftestOut {
    criteria: Vec<monodromy_core::checks::Check>,
    determinism: bool,
    passed: bool,
}

/// Quick-scale acceptance checks plus a byte comparison of two repeated runs.
pub fn selftest() -> (Artifact, bool) {
    let criteria = run_all(Scale::Quick);
    let determinism = to_json(&criteria) == to_json(&run_all(Scale::Quick));
    let passed = determinism && criteria.iter().all(|c| c.passed);
    (Artifact::json(&SelftestOut { criteria, determinism, passed }), passed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use monodromy_core::io::ValueDto;

    fn v(re: f64, im: f64) -> ValueDto {
        ValueDto::Value(Complex::new(re, im).into())
    }

    #[test]
    fn parse_unwraps_previous_output() {
        let d: PotentialDto = parse(r#"{"command":"x","config":{},"result":{"numerator":[1]}}"#).unwrap();
        assert_eq!(d.numerator.len(), 1);
        assert!(parse::<PotentialDto>(r#"{"numerator":[1],"bogus":0}"#).is_err());
    }

    #[test]
    fn mutate_needs_exactly_one_source() {
        let mut coords = CoordinatesDto::new();
        coords.insert(0, v(2.0, 0.0));
        let i = MutateInput { coordinates: coords, exchange_matrix: None, triangulation: None };
        assert!(matches!(mutate_cmd(&i, 0), Err(Error::Invalid(_))));
    }

    #[test]
    fn mutate_on_a_matrix_is_an_involution() {
        let mut coords = CoordinatesDto::new();
        coords.insert(0, v(2.0, 0.5));
        coords.insert(1, v(-0.7, 1.0));
        let i = MutateInput {
            coordinates: coords.clone(),
            exchange_matrix: Some(vec![vec![0, 1], vec![-1, 0]]),
            triangulation: None,
        };
        let once: MutateInput = serde_json::from_value(mutate_cmd(&i, 1).unwrap().json).unwrap();
        let twice: MutateInput = serde_json::from_value(mutate_cmd(&once, 1).unwrap().json).unwrap();
        assert_eq!(twice.exchange_matrix, i.exchange_matrix);
        let (a, b) = (coordinates_from(&twice.coordinates), coordinates_from(&coords));
        for (k, v) in b.iter() {
            let w = a.get(k).unwrap();
            assert!((w.value().unwrap() - v.value().unwrap()).norm() < 1e-14);
        }
    }
}
