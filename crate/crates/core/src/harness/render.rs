//! SVG and ASCII drawings of a snapshot.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::str::FromStr;

use thiserror::Error;

use crate::runtime::Role;
use crate::topology::{extract_boundaries, grey_components, BoundaryKind, EdgeClass};

use super::snapshot::Snapshot;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    Svg,
    Ascii,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown render format {0:?}; expected svg or ascii")]
pub struct FormatError(pub String);

impl FromStr for RenderFormat {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "svg" => Ok(RenderFormat::Svg),
            "ascii" => Ok(RenderFormat::Ascii),
            other => Err(FormatError(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RenderOptions {
    /// Overlay every boundary of every grey component.
    pub boundaries: bool,
}

pub const GREY: &str = "#9a9a9a";
pub const LIGHT_BLUE: &str = "#33c3f0";
pub const DARK_BLUE: &str = "#1537c8";
const LEADER: &str = "#d7301f";
const OUTER: &str = "#f08c00";
const INNER: &str = "#7b3fa0";

const UNIT: f64 = 20.0;
const ROW: f64 = UNIT * 1.732_050_807_568_877_2;
const MARGIN: f64 = 30.0;

pub fn class_colour(class: EdgeClass) -> &'static str {
    match class {
        EdgeClass::Grey => GREY,
        EdgeClass::LightBlue => LIGHT_BLUE,
        EdgeClass::DarkBlue => DARK_BLUE,
    }
}

pub fn render(snap: &Snapshot, format: RenderFormat, options: RenderOptions) -> String {
    match format {
        RenderFormat::Svg => render_svg(snap, options),
        RenderFormat::Ascii => render_ascii(snap),
    }
}

struct Frame {
    min_x: i32,
    max_y: i32,
    width: f64,
    height: f64,
}

impl Frame {
    fn of(snap: &Snapshot) -> Self {
        let xs = snap.nodes.iter().map(|v| v.x);
        let ys = snap.nodes.iter().map(|v| v.y);
        let (min_x, max_x) = (xs.clone().min().unwrap_or(0), xs.max().unwrap_or(0));
        let (min_y, max_y) = (ys.clone().min().unwrap_or(0), ys.max().unwrap_or(0));
        Self {
            min_x,
            max_y,
            width: f64::from(max_x - min_x) * UNIT + 2.0 * MARGIN,
            height: f64::from(max_y - min_y) * ROW + 2.0 * MARGIN,
        }
    }

    fn at(&self, p: [i32; 2]) -> (f64, f64) {
        (
            MARGIN + f64::from(p[0] - self.min_x) * UNIT,
            MARGIN + f64::from(self.max_y - p[1]) * ROW,
        )
    }
}

pub fn render_svg(snap: &Snapshot, options: RenderOptions) -> String {
    let f = Frame::of(snap);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.1}" height="{:.1}" viewBox="0 0 {:.1} {:.1}">"#,
        f.width, f.height, f.width, f.height
    );
    s.push_str(concat!(
        r#"<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="5" markerHeight="5" orient="auto">"#,
        r#"<path d="M0,0 L10,5 L0,10 z" fill="black"/></marker></defs>"#,
        "\n"
    ));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);

    s.push_str("<g id=\"edges\" stroke-width=\"4\" stroke-linecap=\"round\">\n");
    for e in &snap.edges {
        let (x1, y1) = f.at(e.a);
        let (x2, y2) = f.at(e.b);
        let _ = writeln!(
            s,
            r#"<line x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}" stroke="{}"/>"#,
            class_colour(e.class)
        );
    }
    s.push_str("</g>\n");

    if options.boundaries && !snap.nodes.is_empty() {
        let config = snap.configuration();
        s.push_str("<g id=\"boundaries\" fill=\"none\" stroke-width=\"1.5\" stroke-dasharray=\"4 3\">\n");
        for comp in grey_components(&config) {
            for b in extract_boundaries(&config, &comp) {
                let colour = match b.kind {
                    BoundaryKind::Outer => OUTER,
                    BoundaryKind::Inner => INNER,
                };
                let points: Vec<String> = b
                    .agents
                    .iter()
                    .map(|a| {
                        let (x, y) = f.at([a.node.x, a.node.y]);
                        format!("{x:.1},{y:.1}")
                    })
                    .collect();
                let _ = writeln!(s, r#"<polygon points="{}" stroke="{colour}"/>"#, points.join(" "));
            }
        }
        s.push_str("</g>\n");
    }

    s.push_str("<g id=\"tree\" stroke=\"black\" stroke-width=\"1.5\" marker-end=\"url(#arrow)\">\n");
    for v in &snap.nodes {
        let Some(p) = v.parent else { continue };
        let (x1, y1) = f.at([v.x, v.y]);
        let (x2, y2) = f.at(p);
        // stop short of both discs
        let (dx, dy) = (x2 - x1, y2 - y1);
        let len = (dx * dx + dy * dy).sqrt();
        let k = 7.0 / len;
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}"/>"#,
            x1 + dx * k,
            y1 + dy * k,
            x2 - dx * k,
            y2 - dy * k
        );
    }
    s.push_str("</g>\n");

    s.push_str("<g id=\"particles\">\n");
    for v in &snap.nodes {
        let (x, y) = f.at([v.x, v.y]);
        if v.role == Role::Leader {
            let _ = writeln!(
                s,
                r#"<circle cx="{x:.1}" cy="{y:.1}" r="7" fill="{LEADER}" stroke="black" stroke-width="2" class="leader"/>"#
            );
        } else {
            let _ = writeln!(s, r#"<circle cx="{x:.1}" cy="{y:.1}" r="5" fill="black"/>"#);
        }
    }
    s.push_str("</g>\n</svg>\n");
    s
}

/// Rows are lattice rows, top first. `L` marks a leader, `o` any other
/// particle; horizontal edges show as `-` grey, `~` light blue, `=` dark blue.
pub fn render_ascii(snap: &Snapshot) -> String {
    if snap.nodes.is_empty() {
        return String::new();
    }
    let f = Frame::of(snap);
    let max_x = snap.nodes.iter().map(|v| v.x).max().unwrap_or(0);
    let min_y = snap.nodes.iter().map(|v| v.y).min().unwrap_or(0);
    let width = (max_x - f.min_x + 1) as usize;
    let mut rows: BTreeMap<i32, Vec<char>> = (min_y..=f.max_y).map(|y| (y, vec![' '; width])).collect();
    for e in &snap.edges {
        if e.a[1] == e.b[1] {
            let c = match e.class {
                EdgeClass::Grey => '-',
                EdgeClass::LightBlue => '~',
                EdgeClass::DarkBlue => '=',
            };
            let x = (e.a[0].min(e.b[0]) + 1 - f.min_x) as usize;
            rows.get_mut(&e.a[1]).expect("row exists")[x] = c;
        }
    }
    for v in &snap.nodes {
        let c = if v.role == Role::Leader { 'L' } else { 'o' };
        rows.get_mut(&v.y).expect("row exists")[(v.x - f.min_x) as usize] = c;
    }
    let mut out = String::new();
    for (_, row) in rows.iter().rev() {
        out.push_str(row.iter().collect::<String>().trim_end());
        out.push('\n');
    }
    out
}
