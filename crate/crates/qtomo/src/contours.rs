//! Contour documents: the CSV schema `p,vertex_index,x,y` and an SVG
//! rendering of the same blocks.
//!
//! CSV is the contract surface. Numbers are written with Rust's shortest
//! round-trip formatting, so re-reading a file recovers the computed
//! coordinates bit for bit and two runs over the same input produce
//! byte-identical output. The SVG is a convenience view of the same data.

use std::fmt::Write as _;

use qtomo_core::geom::Point2;

/// Expected first line of a contour CSV.
pub const CONTOUR_HEADER: &str = "p,vertex_index,x,y";

/// One level's contour: a counterclockwise vertex ring, a degenerate one
/// or two vertices, or nothing at all when the region is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourBlock {
    pub p: f64,
    pub vertices: Vec<Point2>,
}

impl ContourBlock {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Writes blocks in order, one row per vertex, with a `p,EMPTY` sentinel
/// row for empty blocks.
pub fn write_contour_csv(blocks: &[ContourBlock]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{CONTOUR_HEADER}");
    for b in blocks {
        if b.is_empty() {
            let _ = writeln!(out, "{},EMPTY", b.p);
            continue;
        }
        for (i, v) in b.vertices.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{}", b.p, i, v.x, v.y);
        }
    }
    out
}

/// Parses text written by [`write_contour_csv`] back into blocks.
///
/// A new block starts at each sentinel row and at each `vertex_index` 0;
/// within a block the indices must count up from 0, which catches
/// truncated or reordered files.
pub fn read_contour_csv(text: &str) -> Result<Vec<ContourBlock>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CONTOUR_HEADER => {}
        Some(h) => return Err(format!("bad header '{h}', expected '{CONTOUR_HEADER}'")),
        None => return Err("empty contour file".to_string()),
    }
    let mut blocks: Vec<ContourBlock> = Vec::new();
    let mut open = false;
    for (ln, line) in lines.enumerate() {
        let line_no = ln + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let p: f64 = fields[0]
            .trim()
            .parse()
            .map_err(|_| format!("line {line_no}: bad level '{}'", fields[0]))?;
        if fields.len() == 2 && fields[1].trim() == "EMPTY" {
            blocks.push(ContourBlock {
                p,
                vertices: Vec::new(),
            });
            open = false;
            continue;
        }
        if fields.len() != 4 {
            return Err(format!("line {line_no}: expected 4 fields, got {}", fields.len()));
        }
        let idx: usize = fields[1]
            .trim()
            .parse()
            .map_err(|_| format!("line {line_no}: bad vertex index '{}'", fields[1]))?;
        let x: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| format!("line {line_no}: bad x '{}'", fields[2]))?;
        let y: f64 = fields[3]
            .trim()
            .parse()
            .map_err(|_| format!("line {line_no}: bad y '{}'", fields[3]))?;
        if idx == 0 || !open {
            if idx != 0 {
                return Err(format!("line {line_no}: block starts at index {idx}, not 0"));
            }
            blocks.push(ContourBlock {
                p,
                vertices: Vec::new(),
            });
            open = true;
        }
        let b = blocks.last_mut().expect("a block is open");
        if idx != b.vertices.len() {
            return Err(format!(
                "line {line_no}: vertex index {idx} out of order, expected {}",
                b.vertices.len()
            ));
        }
        if p != b.p {
            return Err(format!("line {line_no}: level changed mid-block"));
        }
        b.vertices.push(Point2::new(x, y));
    }
    Ok(blocks)
}

const PALETTE: [&str; 8] = [
    "#1b6ca8", "#c0392b", "#1e8449", "#7d3c98", "#b7950b", "#148f77", "#a04000", "#34495e",
];

/// Canvas width in pixels; height follows the data aspect ratio.
const SVG_WIDTH: f64 = 720.0;

/// Renders blocks as one stroked path each, over an optional scatter
/// layer, in a viewBox fit to the data with a 5% margin.
pub fn render_svg(blocks: &[ContourBlock], scatter: Option<&[Point2]>) -> String {
    let mut pts: Vec<Point2> = Vec::new();
    for b in blocks {
        pts.extend_from_slice(&b.vertices);
    }
    if let Some(s) = scatter {
        pts.extend_from_slice(s);
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in &pts {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    if pts.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let pad = |lo: f64, hi: f64| {
        let d = hi - lo;
        if d > 0.0 {
            (lo - 0.05 * d, hi + 0.05 * d)
        } else {
            (lo - 1.0, hi + 1.0)
        }
    };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    let scale = SVG_WIDTH / (x1 - x0);
    let height = (y1 - y0) * scale;
    // Data y grows upward, SVG y downward; flip while mapping.
    let mx = |x: f64| (x - x0) * scale;
    let my = |y: f64| (y1 - y) * scale;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{SVG_WIDTH:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {SVG_WIDTH:.0} {height:.0}\">"
    );
    let _ = writeln!(
        out,
        "  <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>"
    );
    if let Some(s) = scatter {
        let _ = writeln!(out, "  <g fill=\"#9a9a9a\" fill-opacity=\"0.55\">");
        for p in s {
            let _ = writeln!(
                out,
                "    <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\"/>",
                mx(p.x),
                my(p.y)
            );
        }
        let _ = writeln!(out, "  </g>");
    }
    for (i, b) in blocks.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        match b.vertices.len() {
            0 => {}
            1 => {
                let v = b.vertices[0];
                let _ = writeln!(
                    out,
                    "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"{color}\"><title>p={}</title></circle>",
                    mx(v.x),
                    my(v.y),
                    b.p
                );
            }
            k => {
                let mut d = String::new();
                for (j, v) in b.vertices.iter().enumerate() {
                    let cmd = if j == 0 { 'M' } else { 'L' };
                    let _ = write!(d, "{cmd} {:.2} {:.2} ", mx(v.x), my(v.y));
                }
                if k > 2 {
                    d.push('Z');
                }
                let _ = writeln!(
                    out,
                    "  <path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"><title>p={}</title></path>",
                    d.trim_end(),
                    b.p
                );
            }
        }
    }
    let _ = writeln!(out, "</svg>");
    out
}
