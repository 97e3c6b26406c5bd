//! Standalone SVG renders of 2-D scenes: labelled points, query markers,
//! hull outlines and zero contours of scalar fields.

use std::fmt::Write as _;
use std::path::Path;

use hullscope::Matrix;

/// Samples per axis for contour tracing.
pub const GRID: usize = 256;
const SIZE: f64 = 512.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("render requires 2-D")]
    NotTwoDimensional,
    #[error("render scene has no points")]
    Empty,
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Field<'a> = Box<dyn Fn(&[f64]) -> f64 + 'a>;

pub struct Contour<'a> {
    pub field: Field<'a>,
    pub stroke: &'static str,
}

impl<'a> Contour<'a> {
    pub fn new(field: impl Fn(&[f64]) -> f64 + 'a, stroke: &'static str) -> Self {
        Self {
            field: Box::new(field),
            stroke,
        }
    }
}

#[derive(Default)]
pub struct Scene<'a> {
    /// Filled circles, colored by label.
    pub points: Option<(&'a Matrix, &'a [usize])>,
    /// Hollow squares.
    pub queries: Option<&'a Matrix>,
    /// Points whose hull outline is drawn.
    pub hull: Option<&'a Matrix>,
    pub contours: Vec<Contour<'a>>,
}

struct View {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl View {
    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (
            (x - self.x0) / (self.x1 - self.x0) * SIZE,
            SIZE - (y - self.y0) / (self.y1 - self.y0) * SIZE,
        )
    }

    fn at(&self, i: usize, j: usize) -> [f64; 2] {
        let t = |k: usize| k as f64 / (GRID - 1) as f64;
        [self.x0 + (self.x1 - self.x0) * t(i), self.y0 + (self.y1 - self.y0) * t(j)]
    }
}

fn matrices<'s>(scene: &'s Scene) -> Vec<&'s Matrix> {
    scene
        .points
        .map(|p| p.0)
        .into_iter()
        .chain(scene.queries)
        .chain(scene.hull)
        .collect()
}

fn view_of(scene: &Scene) -> View {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for m in matrices(scene) {
        for r in m.iter_rows() {
            x0 = x0.min(r[0]);
            x1 = x1.max(r[0]);
            y0 = y0.min(r[1]);
            y1 = y1.max(r[1]);
        }
    }
    // Square view so circles stay round, padded by 15%.
    let side = (x1 - x0).max(y1 - y0).max(1e-9) * 1.3;
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    View {
        x0: cx - side / 2.0,
        y0: cy - side / 2.0,
        x1: cx + side / 2.0,
        y1: cy + side / 2.0,
    }
}

/// Convex hull of 2-D points by the monotone chain, counter-clockwise.
pub fn hull_outline(points: &Matrix) -> Vec<[f64; 2]> {
    let mut p: Vec<[f64; 2]> = points.iter_rows().map(|r| [r[0], r[1]]).collect();
    p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = out.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for &q in iter {
            while out.len() >= start + 2 && cross(out[out.len() - 2], out[out.len() - 1], q) <= 0.0 {
                out.pop();
            }
            out.push(q);
        }
        out.pop();
    }
    out
}

/// Zero-level segments of `field` over the view, by marching squares.
fn contour_segments(field: &dyn Fn(&[f64]) -> f64, view: &View) -> Vec<([f64; 2], [f64; 2])> {
    let mut values = vec![0.0; GRID * GRID];
    for j in 0..GRID {
        for i in 0..GRID {
            values[j * GRID + i] = field(&view.at(i, j));
        }
    }
    let v = |i: usize, j: usize| values[j * GRID + i];
    let lerp = |a: [f64; 2], b: [f64; 2], fa: f64, fb: f64| {
        let t = fa / (fa - fb);
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    };
    let mut segs = Vec::new();
    for j in 0..GRID - 1 {
        for i in 0..GRID - 1 {
            // Corners counter-clockwise from bottom-left.
            let c = [view.at(i, j), view.at(i + 1, j), view.at(i + 1, j + 1), view.at(i, j + 1)];
            let f = [v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)];
            if f.iter().any(|x| !x.is_finite()) {
                continue;
            }
            let inside: Vec<bool> = f.iter().map(|&x| x > 0.0).collect();
            // Crossing point on each edge k (corner k to corner k+1).
            let cuts: Vec<Option<[f64; 2]>> = (0..4)
                .map(|k| {
                    let n = (k + 1) % 4;
                    (inside[k] != inside[n]).then(|| lerp(c[k], c[n], f[k], f[n]))
                })
                .collect();
            let edges: Vec<usize> = (0..4).filter(|&k| cuts[k].is_some()).collect();
            match edges.len() {
                2 => segs.push((cuts[edges[0]].unwrap(), cuts[edges[1]].unwrap())),
                4 => {
                    // Saddle: the center value decides which corners connect.
                    let center = f.iter().sum::<f64>() / 4.0;
                    if (center > 0.0) == inside[0] {
                        segs.push((cuts[0].unwrap(), cuts[1].unwrap()));
                        segs.push((cuts[2].unwrap(), cuts[3].unwrap()));
                    } else {
                        segs.push((cuts[3].unwrap(), cuts[0].unwrap()));
                        segs.push((cuts[1].unwrap(), cuts[2].unwrap()));
                    }
                }
                _ => {}
            }
        }
    }
    segs
}

pub fn render_svg(scene: &Scene) -> Result<String, RenderError> {
    let ms = matrices(scene);
    if ms.iter().all(|m| m.rows() == 0) {
        return Err(RenderError::Empty);
    }
    if ms.iter().any(|m| m.cols() != 2) {
        return Err(RenderError::NotTwoDimensional);
    }
    let view = view_of(scene);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);

    if let Some(h) = scene.hull {
        let outline = hull_outline(h);
        let pts: Vec<String> = outline
            .iter()
            .map(|p| {
                let (x, y) = view.px(p[0], p[1]);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polygon class="hull" points="{}" fill="#eeeeee" stroke="#555555" stroke-width="1"/>"##,
            pts.join(" ")
        );
    }

    for c in &scene.contours {
        let mut d = String::new();
        for (a, b) in contour_segments(&*c.field, &view) {
            let (ax, ay) = view.px(a[0], a[1]);
            let (bx, by) = view.px(b[0], b[1]);
            let _ = write!(d, "M{ax:.3} {ay:.3}L{bx:.3} {by:.3}");
        }
        let _ = writeln!(
            s,
            r#"<path class="contour" d="{d}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            c.stroke
        );
    }

    if let Some((m, labels)) = scene.points {
        for (r, &l) in m.iter_rows().zip(labels) {
            let (x, y) = view.px(r[0], r[1]);
            let _ = writeln!(
                s,
                r#"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="{}"/>"#,
                PALETTE[l % PALETTE.len()]
            );
        }
    }
    if let Some(q) = scene.queries {
        for r in q.iter_rows() {
            let (x, y) = view.px(r[0], r[1]);
            let _ = writeln!(
                s,
                r#"<rect x="{:.3}" y="{:.3}" width="6" height="6" fill="none" stroke="black"/>"#,
                x - 3.0,
                y - 3.0
            );
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write_svg(scene: &Scene, path: &Path) -> Result<(), RenderError> {
    let svg = render_svg(scene)?;
    std::fs::write(path, svg).map_err(|source| RenderError::Io {
        path: path.display().to_string(),
        source,
    })
}
