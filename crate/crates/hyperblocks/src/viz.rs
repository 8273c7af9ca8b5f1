//! Parallel-coordinates SVG rendering: one vertical axis per attribute,
//! data points as polylines, hyperblocks as shaded bands spanning their
//! intervals on every axis.

use std::fmt::Write as _;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::hyperblock::Hyperblock;

const DEFAULT_PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// What and how to draw.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    /// Attribute indices to display, in display order. `None` means all,
    /// in dataset order.
    pub attributes: Option<Vec<usize>>,
    /// Keep only the first N rows of each class. `None` draws everything.
    pub sample_limit: Option<usize>,
    /// One color per class index; the fixed palette fills in when short.
    pub class_colors: Vec<String>,
    pub band_fill_opacity: f64,
    pub band_outline: bool,
    pub width: u32,
    pub height: u32,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            attributes: None,
            sample_limit: None,
            class_colors: Vec::new(),
            band_fill_opacity: 0.25,
            band_outline: true,
            width: 1200,
            height: 600,
        }
    }
}

impl RenderSpec {
    fn color(&self, class: usize) -> &str {
        self.class_colors
            .get(class)
            .map(String::as_str)
            .unwrap_or(DEFAULT_PALETTE[class % DEFAULT_PALETTE.len()])
    }
}

struct Layout {
    xs: Vec<f64>,
    top: f64,
    bottom: f64,
}

impl Layout {
    fn new(width: f64, height: f64, n_axes: usize) -> Layout {
        let left = 70.0;
        let right = width - 40.0;
        let xs = if n_axes == 1 {
            vec![(left + right) / 2.0]
        } else {
            (0..n_axes)
                .map(|i| left + (right - left) * i as f64 / (n_axes - 1) as f64)
                .collect()
        };
        Layout {
            xs,
            top: 40.0,
            bottom: height - 50.0,
        }
    }

    /// Value 0 sits at the axis bottom, 1 at the top.
    fn y(&self, v: f64) -> f64 {
        self.bottom - (self.bottom - self.top) * v
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Render the dataset (subject to sampling) and blocks as a standalone
/// SVG 1.1 document. Output text is deterministic for fixed inputs.
pub fn render_parallel_coordinates(
    data: &Dataset,
    blocks: &[Hyperblock],
    spec: &RenderSpec,
) -> Result<String> {
    let attrs: Vec<usize> = match &spec.attributes {
        Some(list) => {
            if list.is_empty() {
                return Err(Error::Config("no attributes selected for rendering".into()));
            }
            for &a in list {
                if a >= data.attribute_count() {
                    return Err(Error::Config(format!(
                        "attribute index {a} out of range for {} attributes",
                        data.attribute_count()
                    )));
                }
            }
            list.clone()
        }
        None => (0..data.attribute_count()).collect(),
    };
    if data.attribute_count() == 0 {
        return Err(Error::Config("no attributes selected for rendering".into()));
    }
    for b in blocks {
        if b.constraints.len() != data.attribute_count() {
            return Err(Error::DimensionMismatch {
                expected: data.attribute_count(),
                got: b.constraints.len(),
            });
        }
    }

    let (w, h) = (spec.width as f64, spec.height as f64);
    let layout = Layout::new(w, h, attrs.len());

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg version="1.1" xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        spec.width, spec.height, spec.width, spec.height
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#,
        spec.width, spec.height
    );

    // block bands under everything else
    let _ = writeln!(svg, r#"<g id="blocks">"#);
    for b in blocks {
        let color = spec.color(b.label);
        // connector ribbon between adjacent axes, spanning the envelope
        for pair in attrs.windows(2) {
            let (a0, a1) = (pair[0], pair[1]);
            let (x0, x1) = (
                layout.xs[attrs.iter().position(|&a| a == a0).unwrap()],
                layout.xs[attrs.iter().position(|&a| a == a1).unwrap()],
            );
            let env = |attr: usize| {
                let ivs = b.constraints[attr].intervals();
                (ivs[0].lo, ivs[ivs.len() - 1].hi)
            };
            let (lo0, hi0) = env(a0);
            let (lo1, hi1) = env(a1);
            let _ = writeln!(
                svg,
                r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{}" fill-opacity="{:.3}" stroke="none"/>"#,
                x0,
                layout.y(hi0),
                x1,
                layout.y(hi1),
                x1,
                layout.y(lo1),
                x0,
                layout.y(lo0),
                color,
                spec.band_fill_opacity * 0.6
            );
        }
        // per-axis interval segments; disjunctive constraints get one
        // segment per interval
        for (pos, &attr) in attrs.iter().enumerate() {
            let x = layout.xs[pos];
            for iv in b.constraints[attr].intervals() {
                let y_hi = layout.y(iv.hi);
                let y_lo = layout.y(iv.lo);
                let stroke = if spec.band_outline {
                    format!(r#" stroke="{color}" stroke-width="1""#)
                } else {
                    String::new()
                };
                let _ = writeln!(
                    svg,
                    r#"<rect x="{:.2}" y="{:.2}" width="12" height="{:.2}" fill="{}" fill-opacity="{:.3}"{}/>"#,
                    x - 6.0,
                    y_hi,
                    (y_lo - y_hi).max(1.0),
                    color,
                    spec.band_fill_opacity,
                    stroke
                );
            }
        }
    }
    let _ = writeln!(svg, "</g>");

    // point polylines, first N rows per class
    let _ = writeln!(svg, r#"<g id="points" fill="none" stroke-opacity="0.7">"#);
    let mut taken = vec![0usize; data.class_count()];
    for (p, &label) in data.points.iter().zip(&data.labels) {
        if let Some(limit) = spec.sample_limit {
            if taken[label] >= limit {
                continue;
            }
        }
        taken[label] += 1;
        let color = spec.color(label);
        if attrs.len() == 1 {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{}"/>"#,
                layout.xs[0],
                layout.y(p[attrs[0]]),
                color
            );
        } else {
            let points: Vec<String> = attrs
                .iter()
                .enumerate()
                .map(|(pos, &a)| format!("{:.2},{:.2}", layout.xs[pos], layout.y(p[a])))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" stroke="{}" stroke-width="1"/>"#,
                points.join(" "),
                color
            );
        }
    }
    let _ = writeln!(svg, "</g>");

    // axes on top
    let _ = writeln!(svg, r##"<g id="axes" stroke="#333333" stroke-width="1">"##);
    for (pos, &attr) in attrs.iter().enumerate() {
        let x = layout.xs[pos];
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
            x,
            layout.y(1.0),
            x,
            layout.y(0.0)
        );
        let _ = writeln!(
            svg,
            r##"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="12" stroke="none" fill="#333333">{}</text>"##,
            x,
            layout.y(0.0) + 24.0,
            xml_escape(&data.attribute_names[attr])
        );
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    Ok(svg)
}
