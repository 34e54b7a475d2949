//! Two-feature SVG view of a partition.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::feature::{Dataset, Domain, FeatureKind};
use crate::geometry::Slice;
use crate::tree::PartitionModel;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 520.0;
const MARGIN: f64 = 70.0;

/// Pixel rectangle `(x, y, w, h)` of one slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

struct Axis<'a> {
    j: usize,
    domain: &'a Domain,
}

impl Axis<'_> {
    fn extent(&self, slice: &Slice) -> (f64, f64) {
        slice
            .subset(self.j)
            .interval()
            .map_or((self.domain.lo, self.domain.hi), |iv| (iv.lo, iv.hi))
    }

    fn label(&self, v: f64) -> String {
        match self.domain.kind {
            FeatureKind::Ordered => self
                .domain
                .levels
                .get((v + 0.5).round().max(0.0) as usize)
                .cloned()
                .unwrap_or_else(|| format!("{v}")),
            _ => format!("{v}"),
        }
    }
}

fn axis<'a>(model: &'a PartitionModel, name: &str) -> Result<Axis<'a>> {
    let j = model
        .space
        .index_of(name)
        .ok_or_else(|| Error::ModelDataMismatch(format!("model has no feature `{name}`")))?;
    let domain = model.space.domain(j);
    if domain.kind == FeatureKind::Nominal {
        return Err(Error::NonRenderableFeature {
            feature: name.to_string(),
        });
    }
    Ok(Axis { j, domain })
}

/// Rank of each value among `values` (0-based, ascending, ties by index).
fn ranks(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut out = vec![0; values.len()];
    for (r, &i) in order.iter().enumerate() {
        out[i] = r;
    }
    out
}

fn opacity(rank: usize, count: usize) -> f64 {
    0.15 + 0.6 * (rank + 1) as f64 / count.max(1) as f64
}

/// Slice rectangles in plot coordinates, in slice order.
pub fn slice_rects(model: &PartitionModel, x: &str, y: &str) -> Result<Vec<Rect>> {
    let (ax, ay) = (axis(model, x)?, axis(model, y)?);
    let sx = (WIDTH - 2.0 * MARGIN) / (ax.domain.hi - ax.domain.lo);
    let sy = (HEIGHT - 2.0 * MARGIN) / (ay.domain.hi - ay.domain.lo);
    Ok(model
        .slices
        .iter()
        .map(|s| {
            let (x0, x1) = ax.extent(s);
            let (y0, y1) = ay.extent(s);
            Rect {
                x: MARGIN + (x0 - ax.domain.lo) * sx,
                y: HEIGHT - MARGIN - (y1 - ay.domain.lo) * sy,
                w: (x1 - x0) * sx,
                h: (y1 - y0) * sy,
            }
        })
        .collect())
}

/// Plot area in pixels: `(x, y, w, h)`.
pub fn plot_area() -> Rect {
    Rect {
        x: MARGIN,
        y: MARGIN,
        w: WIDTH - 2.0 * MARGIN,
        h: HEIGHT - 2.0 * MARGIN,
    }
}

/// Renders slices as shaded rectangles with the rows of `data` on top.
/// Empty slices are red, darker with larger volume; non-empty slices are
/// green, darker with lower mean proxy value (denser).
pub fn render_svg(model: &PartitionModel, data: &Dataset, x: &str, y: &str) -> Result<String> {
    if x == y {
        return Err(Error::InvalidConfig("x and y must be different features".into()));
    }
    let (ax, ay) = (axis(model, x)?, axis(model, y)?);
    let aligned = model.space.align(data)?;
    let rects = slice_rects(model, x, y)?;

    let empties: Vec<usize> = (0..model.k()).filter(|&k| model.slices[k].is_empty).collect();
    let full: Vec<usize> = (0..model.k()).filter(|&k| !model.slices[k].is_empty).collect();
    let vol_rank = ranks(&empties.iter().map(|&k| model.slices[k].volume).collect::<Vec<_>>());
    // Negated mean so that the densest slice ranks last (darkest).
    let dens_rank = ranks(
        &full
            .iter()
            .map(|&k| -model.slices[k].mean_density.unwrap_or(0.0))
            .collect::<Vec<_>>(),
    );

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let mut shade = |k: usize, color: &str, alpha: f64| {
        let r = rects[k];
        let s = &model.slices[k];
        let _ = writeln!(
            svg,
            r#"<rect class="slice" data-id="{}" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{color}" fill-opacity="{alpha:.3}" stroke="black" stroke-width="0.5"/>"#,
            s.id, r.x, r.y, r.w, r.h
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.3}" y="{:.3}" font-size="11" text-anchor="middle">{}</text>"#,
            r.x + r.w / 2.0,
            r.y + r.h / 2.0,
            s.id
        );
    };
    for (r, &k) in full.iter().enumerate() {
        shade(k, "#2ca02c", opacity(dens_rank[r], full.len()));
    }
    for (r, &k) in empties.iter().enumerate() {
        shade(k, "#d62728", opacity(vol_rank[r], empties.len()));
    }

    let area = plot_area();
    let sx = area.w / (ax.domain.hi - ax.domain.lo);
    let sy = area.h / (ay.domain.hi - ay.domain.lo);
    for i in 0..aligned.n_rows() {
        let px = MARGIN + (aligned.value(i, ax.j) - ax.domain.lo) * sx;
        let py = HEIGHT - MARGIN - (aligned.value(i, ay.j) - ay.domain.lo) * sy;
        let _ = writeln!(svg, r#"<circle cx="{px:.3}" cy="{py:.3}" r="2.5" fill="black"/>"#);
    }

    let (x0, y0, x1, y1) = (area.x, area.y + area.h, area.x + area.w, area.y);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.3}" y="{:.3}" font-size="13" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 20.0,
        escape(&ax.domain.name)
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.3}" font-size="13" text-anchor="middle" transform="rotate(-90 20 {:.3})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(&ay.domain.name)
    );
    for (px, py, anchor, text) in [
        (x0, y0 + 16.0, "start", ax.label(ax.domain.lo)),
        (x1, y0 + 16.0, "end", ax.label(ax.domain.hi)),
        (x0 - 6.0, y0, "end", ay.label(ay.domain.lo)),
        (x0 - 6.0, y1 + 10.0, "end", ay.label(ay.domain.hi)),
    ] {
        let _ = writeln!(
            svg,
            r#"<text x="{px:.3}" y="{py:.3}" font-size="10" text-anchor="{anchor}">{}</text>"#,
            escape(&text)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
