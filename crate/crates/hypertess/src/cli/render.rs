//! SVG rendering of planar tessellations in the Poincare disk or upper
//! half-plane, with geodesic edges as circular arcs orthogonal to the
//! boundary and circumspheres drawn by kind: metric circles solid,
//! horocycles dashed and tangent to the boundary, equidistant arcs
//! dash-dotted with their axis geodesic in red.
//!
//! Rendering math is always floating point, independent of the pipeline
//! mode; output bytes are deterministic for a fixed input.

use std::fmt::Write as _;

use super::files::{parse_scalar_float, TessellationFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderModel {
    Poincare,
    Halfplane,
}

#[derive(Debug)]
pub struct RenderError(pub String);

impl std::fmt::Display for RenderError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "render error: {}", self.0)
    }
}

impl std::error::Error for RenderError {}

/// Overlay data: Voronoi edges drawn as full bisector geodesics plus the
/// Voronoi vertices (circumcenters).
#[derive(Debug, Default, Clone)]
pub struct Overlay {
    /// Site index pairs whose bisector carries a Voronoi edge.
    pub bisector_pairs: Vec<(usize, usize)>,
    /// Hyperboloid coordinates of Voronoi vertices.
    pub vertices: Vec<Vec<f64>>,
}

struct Canvas {
    svg: String,
    scale: f64,
    cx: f64,
    cy: f64,
}

impl Canvas {
    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        // y grows upward in model coordinates, downward in SVG
        (self.cx + self.scale * p[0], self.cy - self.scale * p[1])
    }
}

fn fmt(v: f64) -> String {
    // fixed-point output keeps bytes deterministic
    format!("{v:.4}")
}

fn hyperboloid_to_disk(x: &[f64]) -> [f64; 2] {
    [x[1] / (1.0 + x[0]), x[2] / (1.0 + x[0])]
}

fn disk_to_halfplane(w: [f64; 2]) -> [f64; 2] {
    let d = (1.0 - w[0]) * (1.0 - w[0]) + w[1] * w[1];
    [-2.0 * w[1] / d, (1.0 - w[0] * w[0] - w[1] * w[1]) / d]
}

fn to_model(x: &[f64], model: RenderModel) -> [f64; 2] {
    let w = hyperboloid_to_disk(x);
    match model {
        RenderModel::Poincare => w,
        RenderModel::Halfplane => disk_to_halfplane(w),
    }
}

/// Ideal (light-like) direction to a boundary point of the model.
fn ideal_to_model(u: &[f64], model: RenderModel) -> Option<[f64; 2]> {
    let w = [u[1] / u[0], u[2] / u[0]];
    match model {
        RenderModel::Poincare => Some(w),
        RenderModel::Halfplane => {
            let d = (1.0 - w[0]) * (1.0 - w[0]) + w[1] * w[1];
            if d < 1e-12 {
                None // the point at infinity
            } else {
                Some([-2.0 * w[1] / d, (1.0 - w[0] * w[0] - w[1] * w[1]) / d])
            }
        }
    }
}

/// Circle through three points, or `None` when they are collinear.
fn circle_through(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Option<([f64; 2], f64)> {
    let d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]));
    if d.abs() < 1e-12 {
        return None;
    }
    let a2 = a[0] * a[0] + a[1] * a[1];
    let b2 = b[0] * b[0] + b[1] * b[1];
    let c2 = c[0] * c[0] + c[1] * c[1];
    let ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d;
    let uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d;
    let r = ((a[0] - ux) * (a[0] - ux) + (a[1] - uy) * (a[1] - uy)).sqrt();
    Some(([ux, uy], r))
}

/// Geodesic arc between two model points as an SVG path segment.
fn geodesic_path(canvas: &Canvas, a: [f64; 2], b: [f64; 2], model: RenderModel) -> String {
    let center = match model {
        RenderModel::Poincare => {
            // orthocircle: 2 m·a = 1+|a|², 2 m·b = 1+|b|²
            let det = 4.0 * (a[0] * b[1] - a[1] * b[0]);
            if det.abs() < 1e-9 {
                None
            } else {
                let ra = 1.0 + a[0] * a[0] + a[1] * a[1];
                let rb = 1.0 + b[0] * b[0] + b[1] * b[1];
                let mx = (ra * 2.0 * b[1] - rb * 2.0 * a[1]) / det;
                let my = (rb * 2.0 * a[0] - ra * 2.0 * b[0]) / det;
                Some([mx, my])
            }
        }
        RenderModel::Halfplane => {
            if (a[0] - b[0]).abs() < 1e-9 {
                None
            } else {
                let cx = (b[0] * b[0] + b[1] * b[1] - a[0] * a[0] - a[1] * a[1])
                    / (2.0 * (b[0] - a[0]));
                Some([cx, 0.0])
            }
        }
    };
    let (pa, pb) = (canvas.map(a), canvas.map(b));
    match center {
        None => format!(
            "M {} {} L {} {}",
            fmt(pa.0),
            fmt(pa.1),
            fmt(pb.0),
            fmt(pb.1)
        ),
        Some(m) => {
            let r = ((a[0] - m[0]) * (a[0] - m[0]) + (a[1] - m[1]) * (a[1] - m[1])).sqrt();
            let rs = r * canvas.scale;
            // sweep flag from the orientation of (a - m) x (b - m), flipped
            // by the svg y-axis inversion
            let cross = (a[0] - m[0]) * (b[1] - m[1]) - (a[1] - m[1]) * (b[0] - m[0]);
            let sweep = if cross < 0.0 { 1 } else { 0 };
            format!(
                "M {} {} A {} {} 0 0 {} {} {}",
                fmt(pa.0),
                fmt(pa.1),
                fmt(rs),
                fmt(rs),
                sweep,
                fmt(pb.0),
                fmt(pb.1)
            )
        }
    }
}

fn push_path(canvas: &mut Canvas, d: &str, style: &str) {
    let line = format!("  <path d=\"{d}\" {style}/>\n");
    canvas.svg.push_str(&line);
}

fn push_circle(canvas: &mut Canvas, center: [f64; 2], r_model: f64, style: &str) {
    let (cx, cy) = canvas.map(center);
    let _ = writeln!(
        canvas.svg,
        "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" {}/>",
        fmt(cx),
        fmt(cy),
        fmt(r_model * canvas.scale),
        style
    );
}

fn push_dot(canvas: &mut Canvas, p: [f64; 2], r_px: f64, style: &str) {
    let (cx, cy) = canvas.map(p);
    let _ = writeln!(
        canvas.svg,
        "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" {}/>",
        fmt(cx),
        fmt(cy),
        fmt(r_px),
        style
    );
}

/// Hyperbolic circle as a Euclidean circle of the model.
fn metric_circle_in_model(
    center_h: &[f64],
    radius: f64,
    model: RenderModel,
) -> ([f64; 2], f64) {
    match model {
        RenderModel::Poincare => {
            let p = hyperboloid_to_disk(center_h);
            let t = (radius / 2.0).tanh();
            let p2 = p[0] * p[0] + p[1] * p[1];
            let denom = 1.0 - t * t * p2;
            let scale = (1.0 - t * t) / denom;
            ([p[0] * scale, p[1] * scale], t * (1.0 - p2) / denom)
        }
        RenderModel::Halfplane => {
            let z = to_model(center_h, RenderModel::Halfplane);
            ([z[0], z[1] * radius.cosh()], z[1] * radius.sinh())
        }
    }
}

const STYLE_EDGE: &str = "fill=\"none\" stroke=\"#222222\" stroke-width=\"1.5\"";
const STYLE_BOUNDARY: &str = "fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"";
const STYLE_SITE: &str = "fill=\"#222222\" stroke=\"none\"";
const STYLE_METRIC: &str =
    "fill=\"none\" stroke=\"#1f66d0\" stroke-width=\"1\" class=\"circ-metric\"";
const STYLE_CENTER: &str = "fill=\"#d02020\" stroke=\"none\" class=\"circ-center\"";
const STYLE_HORO: &str =
    "fill=\"none\" stroke=\"#e08020\" stroke-width=\"1\" stroke-dasharray=\"4 3\" class=\"circ-horo\"";
const STYLE_EQUI: &str =
    "fill=\"none\" stroke=\"#20a040\" stroke-width=\"1\" stroke-dasharray=\"6 2 1 2\" class=\"circ-equi\"";
const STYLE_AXIS: &str =
    "fill=\"none\" stroke=\"#d02020\" stroke-width=\"1\" class=\"equi-axis\"";
const STYLE_VORONOI: &str =
    "fill=\"none\" stroke=\"#7030a0\" stroke-width=\"1.2\" class=\"voronoi-edge\"";
const STYLE_VORONOI_VERTEX: &str = "fill=\"#7030a0\" stroke=\"none\" class=\"voronoi-vertex\"";

/// Render a 2-dimensional tessellation file to an SVG document.
pub fn render_svg(
    file: &TessellationFile,
    model: RenderModel,
    overlay: Option<&Overlay>,
) -> Result<String, RenderError> {
    if file.ambient_dim != 2 {
        return Err(RenderError(format!(
            "can only render dimension 2, file has {}",
            file.ambient_dim
        )));
    }
    let sites: Vec<Vec<f64>> = file
        .sites
        .iter()
        .map(|coords| {
            coords
                .iter()
                .map(|c| parse_scalar_float(c).map_err(RenderError))
                .collect::<Result<Vec<f64>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let model_sites: Vec<[f64; 2]> = sites.iter().map(|s| to_model(s, model)).collect();

    // canvas: fixed for the disk, fitted for the half-plane
    let (width, height) = (520.0f64, 520.0f64);
    let mut canvas = match model {
        RenderModel::Poincare => Canvas {
            svg: String::new(),
            scale: 230.0,
            cx: width / 2.0,
            cy: height / 2.0,
        },
        RenderModel::Halfplane => {
            let mut xmin = -1.0f64;
            let mut xmax = 1.0f64;
            let mut ymax = 1.5f64;
            for p in &model_sites {
                xmin = xmin.min(p[0] - 0.5);
                xmax = xmax.max(p[0] + 0.5);
                ymax = ymax.max(p[1] + 0.5);
            }
            let scale = (width - 40.0) / (xmax - xmin).max(ymax);
            Canvas {
                svg: String::new(),
                scale,
                cx: 20.0 - scale * xmin,
                cy: height - 20.0,
            }
        }
    };
    let _ = writeln!(
        canvas.svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );

    // boundary
    match model {
        RenderModel::Poincare => {
            push_circle(&mut canvas, [0.0, 0.0], 1.0, STYLE_BOUNDARY);
        }
        RenderModel::Halfplane => {
            let y = canvas.map([0.0, 0.0]).1;
            let _ = writeln!(
                canvas.svg,
                "  <line x1=\"0\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {}/>",
                fmt(y),
                fmt(width),
                fmt(y),
                STYLE_BOUNDARY
            );
        }
    }

    // circumspheres of top cells
    for cell in &file.cells {
        if cell.dim != file.top_dim {
            continue;
        }
        let Some(ref sphere) = cell.circumsphere else { continue };
        match sphere.kind.as_str() {
            "metric" => {
                if let (Some(center), Some(radius)) = (&sphere.center, sphere.radius) {
                    let (c, r) = metric_circle_in_model(center, radius, model);
                    push_circle(&mut canvas, c, r, STYLE_METRIC);
                    push_dot(&mut canvas, c, 2.5, STYLE_CENTER);
                }
            }
            "horosphere" => {
                if let Some(ideal) = &sphere.ideal {
                    let u: Vec<f64> = ideal
                        .iter()
                        .map(|c| parse_scalar_float(c).unwrap_or(f64::NAN))
                        .collect();
                    let q = to_model(&sites[cell.vertices[0]], model);
                    match (ideal_to_model(&u, model), model) {
                        (Some(z), RenderModel::Poincare) => {
                            let denom = 2.0 * (1.0 - (q[0] * z[0] + q[1] * z[1]));
                            let num = (q[0] - z[0]) * (q[0] - z[0]) + (q[1] - z[1]) * (q[1] - z[1]);
                            let rho = num / denom;
                            push_circle(
                                &mut canvas,
                                [(1.0 - rho) * z[0], (1.0 - rho) * z[1]],
                                rho,
                                STYLE_HORO,
                            );
                        }
                        (Some(z), RenderModel::Halfplane) => {
                            let rho = ((q[0] - z[0]) * (q[0] - z[0]) + q[1] * q[1]) / (2.0 * q[1]);
                            push_circle(&mut canvas, [z[0], rho], rho, STYLE_HORO);
                        }
                        (None, RenderModel::Halfplane) => {
                            // horocycle at infinity: a horizontal line
                            let y = canvas.map(q).1;
                            let _ = writeln!(
                                canvas.svg,
                                "  <line x1=\"0\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {}/>",
                                fmt(y),
                                fmt(width),
                                fmt(y),
                                STYLE_HORO
                            );
                        }
                        _ => {}
                    }
                }
            }
            "equidistant" => {
                if let Some(normal) = &sphere.normal {
                    let u: Vec<f64> = normal
                        .iter()
                        .map(|c| parse_scalar_float(c).unwrap_or(f64::NAN))
                        .collect();
                    // the axis geodesic's ideal endpoints: light-like
                    // directions orthogonal to u
                    if let Some((i1, i2)) = light_like_in_complement(&u) {
                        let (m1, m2) = (ideal_to_model(&i1, model), ideal_to_model(&i2, model));
                        if let (Some(z1), Some(z2)) = (m1, m2) {
                            // axis geodesic
                            let d = geodesic_path(&canvas, z1, z2, model);
                            push_path(&mut canvas, &d, STYLE_AXIS);
                            // equidistant arc: circle through the two ideal
                            // endpoints and one cell vertex
                            let q = to_model(&sites[cell.vertices[0]], model);
                            if let Some((c, r)) = circle_through(z1, z2, q) {
                                push_circle(&mut canvas, c, r, STYLE_EQUI);
                            } else {
                                let d = geodesic_path(&canvas, z1, z2, model);
                                push_path(&mut canvas, &d, STYLE_EQUI);
                            }
                        }
                    }
                }
            }
            _ => {}
        }
    }

    // cell edges as geodesic arcs
    for cell in &file.cells {
        if cell.dim != 1 {
            continue;
        }
        let a = model_sites[cell.vertices[0]];
        let b = model_sites[cell.vertices[1]];
        let d = geodesic_path(&canvas, a, b, model);
        push_path(&mut canvas, &d, STYLE_EDGE);
    }

    // voronoi overlay
    if let Some(ov) = overlay {
        for &(i, j) in &ov.bisector_pairs {
            // the bisector geodesic: ideal endpoints of {x∘(si - sj) = 0}
            let diff: Vec<f64> =
                sites[i].iter().zip(&sites[j]).map(|(a, b)| a - b).collect();
            if let Some((i1, i2)) = light_like_in_complement(&diff) {
                if let (Some(z1), Some(z2)) =
                    (ideal_to_model(&i1, model), ideal_to_model(&i2, model))
                {
                    let d = geodesic_path(&canvas, z1, z2, model);
                    push_path(&mut canvas, &d, STYLE_VORONOI);
                }
            }
        }
        for v in &ov.vertices {
            push_dot(&mut canvas, to_model(v, model), 3.0, STYLE_VORONOI_VERTEX);
        }
    }

    // sites on top
    for p in &model_sites {
        push_dot(&mut canvas, *p, 3.0, STYLE_SITE);
    }

    canvas.svg.push_str("</svg>\n");
    Ok(canvas.svg)
}

/// The two light-like directions (u0 > 0) in the Lorentz-orthogonal
/// complement of a space-like vector of `R^{1,2}`.
fn light_like_in_complement(u: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    // basis of the complement {x : x∘u = 0}: solve via two independent
    // solutions of -x0 u0 + x1 u1 + x2 u2 = 0
    let b = if u[1].abs() > u[2].abs() {
        vec![vec![u[1], u[0], 0.0], vec![0.0, u[2], -u[1]]]
    } else if u[2].abs() > 1e-15 {
        vec![vec![u[2], 0.0, u[0]], vec![0.0, u[2], -u[1]]]
    } else {
        // u along e0: complement is spatial, no light-like directions
        return None;
    };
    // light-like combos: q(t) = (b1 + t b2)∘(b1 + t b2) = 0
    let m = |x: &[f64], y: &[f64]| -x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    let (a, bq, c) = (m(&b[1], &b[1]), m(&b[0], &b[1]), m(&b[0], &b[0]));
    let (t1, t2) = if a.abs() < 1e-12 {
        if bq.abs() < 1e-12 {
            return None;
        }
        // one root from the linear equation, the other "at infinity" = b2
        let t = -c / (2.0 * bq);
        let v1: Vec<f64> = (0..3).map(|k| b[0][k] + t * b[1][k]).collect();
        return orient_pair(v1, b[1].clone());
    } else {
        let disc = bq * bq - a * c;
        if disc < 0.0 {
            return None;
        }
        ((-bq + disc.sqrt()) / a, (-bq - disc.sqrt()) / a)
    };
    let v1: Vec<f64> = (0..3).map(|k| b[0][k] + t1 * b[1][k]).collect();
    let v2: Vec<f64> = (0..3).map(|k| b[0][k] + t2 * b[1][k]).collect();
    orient_pair(v1, v2)
}

fn orient_pair(mut v1: Vec<f64>, mut v2: Vec<f64>) -> Option<(Vec<f64>, Vec<f64>)> {
    for v in [&mut v1, &mut v2] {
        if v[0] < 0.0 {
            for c in v.iter_mut() {
                *c = -*c;
            }
        }
        if v[0].abs() < 1e-15 {
            return None;
        }
    }
    Some((v1, v2))
}
