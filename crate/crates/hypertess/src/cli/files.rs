//! JSON interchange formats. Rationals travel as `p/q` strings so exact
//! data survives round trips; floating data uses plain JSON numbers.

use serde::{Deserialize, Serialize};

use crate::delaunay::Tessellation;
use crate::models::{Circumsphere, HPoint, Model, ModelPoint};
use crate::orbit::{GroupElement, OrbitSet};
use crate::scalar::{parse_rat, GeomScalar, Rat};

pub const TOOL_VERSION: &str = concat!("hypertess ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PointSetFile {
    pub model: String,
    pub dim: usize,
    pub points: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Provenance {
    pub tool: String,
    pub mode: String,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CircumsphereFile {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_dir: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ideal: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normal: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CellFile {
    pub id: usize,
    pub dim: usize,
    pub vertices: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circumsphere: Option<CircumsphereFile>,
    pub faces: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TessellationFile {
    pub sites: Vec<Vec<String>>,
    pub cells: Vec<CellFile>,
    pub top_dim: usize,
    pub ambient_dim: usize,
    pub mode: String,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GroupFile {
    pub generators: Vec<[[String; 2]; 2]>,
    pub bases: Vec<Vec<String>>,
    pub max_word_length: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VoronoiCellFile {
    pub id: usize,
    pub site_ids: Vec<usize>,
    pub dim: usize,
    pub witness: Vec<String>,
    pub dual_cell: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DualFile {
    pub cells: Vec<VoronoiCellFile>,
    pub pairs: Vec<(usize, usize)>,
    pub ambient_dim: usize,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OrbitReportFile {
    pub point_count: usize,
    pub element_count: usize,
    pub max_word_length: usize,
    pub interior_cells: usize,
    pub orbit_counts: Vec<(usize, usize)>,
    pub equivariance_violations: usize,
    pub stabilized_vs_previous: Option<bool>,
    /// `(L, min |u∘u| over interior top cells)` per word length.
    pub cusp_norms: Vec<(usize, f64)>,
    pub cusp_monotone_decreasing: bool,
    pub cusp_direction: Option<Vec<f64>>,
}

pub fn model_from_tag(tag: &str) -> Result<Model, String> {
    match tag {
        "hyperboloid" => Ok(Model::Hyperboloid),
        "poincare" | "poincare_ball" => Ok(Model::PoincareBall),
        "klein" | "klein_ball" => Ok(Model::KleinBall),
        "halfplane" | "upper_half_space" => Ok(Model::UpperHalfSpace),
        other => Err(format!("unknown model tag {other:?}")),
    }
}

pub fn scalar_to_string<S: GeomScalar>(s: &S) -> String {
    format!("{s}")
}

pub fn parse_scalar_exact(s: &str) -> Result<Rat, String> {
    parse_rat(s)
}

pub fn parse_scalar_float(s: &str) -> Result<f64, String> {
    if let Some((n, d)) = s.split_once('/') {
        let num: f64 = n.trim().parse().map_err(|e| format!("bad numerator: {e}"))?;
        let den: f64 = d.trim().parse().map_err(|e| format!("bad denominator: {e}"))?;
        Ok(num / den)
    } else {
        s.trim().parse().map_err(|e| format!("bad number {s:?}: {e}"))
    }
}

/// Load sites from a point-set file in the requested scalar mode.
pub fn load_sites<S: GeomScalar>(
    file: &PointSetFile,
    parse: impl Fn(&str) -> Result<S, String>,
) -> Result<Vec<HPoint<S>>, String> {
    let model = model_from_tag(&file.model)?;
    let mut out = Vec::with_capacity(file.points.len());
    for (i, coords) in file.points.iter().enumerate() {
        let parsed: Result<Vec<S>, String> = coords.iter().map(|c| parse(c)).collect();
        let p = ModelPoint { model, coords: parsed? };
        let lifted = crate::models::lift(&p).map_err(|e| format!("point {i}: {e}"))?;
        out.push(lifted);
    }
    Ok(out)
}

pub fn sites_to_file<S: GeomScalar>(sites: &[HPoint<S>], model: &str) -> PointSetFile {
    PointSetFile {
        model: "hyperboloid".into(),
        dim: sites.first().map_or(0, |s| s.dim()),
        points: sites
            .iter()
            .map(|s| s.vec().coords.iter().map(scalar_to_string).collect())
            .collect(),
    }
    .tagged(model)
}

impl PointSetFile {
    fn tagged(mut self, _model: &str) -> Self {
        self.model = "hyperboloid".into();
        self
    }
}

fn circumsphere_to_file<S: GeomScalar>(s: &Circumsphere<S>) -> CircumsphereFile {
    let mut f = CircumsphereFile {
        kind: match s.kind() {
            crate::models::SphereKind::Metric => "metric",
            crate::models::SphereKind::Horosphere => "horosphere",
            crate::models::SphereKind::Equidistant => "equidistant",
            crate::models::SphereKind::TotallyGeodesic => "totally_geodesic",
        }
        .into(),
        center: None,
        radius: None,
        center_dir: None,
        ideal: None,
        normal: None,
        distance: None,
        basis: None,
    };
    match s {
        Circumsphere::Metric { center_dir, .. } => {
            f.center = s.center_f64();
            f.radius = s.radius();
            f.center_dir = Some(center_dir.coords.iter().map(scalar_to_string).collect());
        }
        Circumsphere::Horosphere { ideal } => {
            f.ideal = Some(ideal.coords.iter().map(scalar_to_string).collect());
        }
        Circumsphere::Equidistant { normal, .. } => {
            f.normal = Some(normal.coords.iter().map(scalar_to_string).collect());
            f.distance = s.equidistant_distance();
        }
        Circumsphere::TotallyGeodesic { basis } => {
            f.basis = Some(
                basis
                    .iter()
                    .map(|b| b.coords.iter().map(scalar_to_string).collect())
                    .collect(),
            );
        }
    }
    f
}

pub fn tessellation_to_file<S: GeomScalar>(
    tess: &Tessellation<S>,
    seed: u64,
) -> TessellationFile {
    TessellationFile {
        sites: tess
            .sites
            .iter()
            .map(|s| s.vec().coords.iter().map(scalar_to_string).collect())
            .collect(),
        cells: tess
            .cells
            .iter()
            .map(|c| CellFile {
                id: c.id,
                dim: c.dim,
                vertices: c.vertex_ids.clone(),
                circumsphere: c.circumsphere.as_ref().map(circumsphere_to_file),
                faces: c.children.clone(),
            })
            .collect(),
        top_dim: tess.top_dim,
        ambient_dim: tess.ambient_dim,
        mode: if S::EXACT { "exact".into() } else { "float".into() },
        provenance: Provenance {
            tool: TOOL_VERSION.into(),
            mode: if S::EXACT { "exact".into() } else { "float".into() },
            seed,
        },
    }
}

pub fn dual_to_file<S: GeomScalar>(
    dual: &crate::voronoi::VoronoiDiagram<S>,
    seed: u64,
) -> DualFile {
    DualFile {
        cells: dual
            .cells
            .iter()
            .map(|c| VoronoiCellFile {
                id: c.id,
                site_ids: c.site_ids.clone(),
                dim: c.dim,
                witness: c.witness.coords.iter().map(scalar_to_string).collect(),
                dual_cell: c.dual_cell,
            })
            .collect(),
        pairs: dual.pairs.iter().map(|p| (p.voronoi_id, p.delaunay_cell_id)).collect(),
        ambient_dim: dual.ambient_dim,
        provenance: Provenance {
            tool: TOOL_VERSION.into(),
            mode: if S::EXACT { "exact".into() } else { "float".into() },
            seed,
        },
    }
}

pub fn load_group(file: &GroupFile) -> Result<(Vec<GroupElement>, Vec<HPoint<Rat>>), String> {
    let mut gens = Vec::new();
    for (i, g) in file.generators.iter().enumerate() {
        let m = [
            [parse_rat(&g[0][0])?, parse_rat(&g[0][1])?],
            [parse_rat(&g[1][0])?, parse_rat(&g[1][1])?],
        ];
        gens.push(
            crate::orbit::sl2_to_so21(&m).map_err(|e| format!("generator {i}: {e}"))?,
        );
    }
    let mut bases = Vec::new();
    for (i, b) in file.bases.iter().enumerate() {
        let coords: Result<Vec<Rat>, String> = b.iter().map(|c| parse_rat(c)).collect();
        let v = crate::lorentz::LorentzVec::new(coords?);
        bases.push(HPoint::from_vec(v).map_err(|e| format!("base {i}: {e}"))?);
    }
    Ok((gens, bases))
}

pub fn orbit_report_file(
    orbit: &OrbitSet,
    report: &crate::orbit::InvarianceReport,
    stabilized: Option<bool>,
    cusp_norms: Vec<(usize, f64)>,
    cusp_monotone: bool,
    cusp_direction: Option<Vec<f64>>,
) -> OrbitReportFile {
    OrbitReportFile {
        point_count: orbit.points.len(),
        element_count: orbit.elements.len(),
        max_word_length: orbit.max_word_length,
        interior_cells: report.interior_cells,
        orbit_counts: report.orbit_counts.clone(),
        equivariance_violations: report.equivariance_violations,
        stabilized_vs_previous: stabilized,
        cusp_norms,
        cusp_monotone_decreasing: cusp_monotone,
        cusp_direction,
    }
}
