//! SVG drawing of a trace: initial and final configurations, motion segments
//! labelled with their start times, and a legend of light colors.

use std::fmt::Write as _;

use swarm_core::geom::Point;
use swarm_core::model::{Color, Configuration};
use swarm_core::trace::{configuration_at, Trace};

const WIDTH: f64 = 640.0;
const MARGIN: f64 = 40.0;
const FILLS: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

struct View {
    min: Point,
    scale: f64,
    height: f64,
}

impl View {
    fn fit(points: &[Point]) -> View {
        let (mut x0, mut y0, mut x1, mut y1) = (-1.0, -1.0, 1.0, 1.0);
        if let Some(first) = points.first() {
            (x0, y0, x1, y1) = (first.x, first.y, first.x, first.y);
            for p in points {
                (x0, y0, x1, y1) = (x0.min(p.x), y0.min(p.y), x1.max(p.x), y1.max(p.y));
            }
        }
        let span = f64::max(x1 - x0, y1 - y0).max(1e-9);
        let scale = (WIDTH - 2.0 * MARGIN) / span;
        let height = (y1 - y0) * scale + 2.0 * MARGIN + 30.0;
        View { min: Point::new(x0, y1), scale, height }
    }

    fn map(&self, p: Point) -> (f64, f64) {
        (MARGIN + (p.x - self.min.x) * self.scale, MARGIN + (self.min.y - p.y) * self.scale)
    }
}

/// Colors in order of first appearance, for a stable legend.
fn palette_of<'a>(configs: impl Iterator<Item = &'a Configuration>) -> Vec<Color> {
    let mut out: Vec<Color> = Vec::new();
    for c in configs {
        for r in &c.robots {
            if !out.contains(&r.color) {
                out.push(r.color);
            }
        }
    }
    out
}

fn fill(palette: &[Color], c: Color) -> &'static str {
    palette.iter().position(|&p| p == c).map_or("#000000", |i| FILLS[i % FILLS.len()])
}

fn robots(svg: &mut String, view: &View, cfg: &Configuration, palette: &[Color], hollow: bool) {
    for (i, r) in cfg.robots.iter().enumerate() {
        let (x, y) = view.map(r.pos);
        if hollow {
            let _ = writeln!(svg, r##"<circle cx="{x:.3}" cy="{y:.3}" r="6" fill="none" stroke="#999999" stroke-width="1.5"/>"##);
        } else {
            let _ = writeln!(svg, r#"<circle cx="{x:.3}" cy="{y:.3}" r="6" fill="{}"/>"#, fill(palette, r.color));
            let _ = writeln!(svg, r#"<text x="{:.3}" y="{:.3}" font-size="11">{i}</text>"#, x + 8.0, y - 8.0);
        }
    }
}

fn legend(svg: &mut String, view: &View, palette: &[Color]) {
    let y = view.height - 14.0;
    for (k, c) in palette.iter().enumerate() {
        let x = MARGIN + 110.0 * k as f64;
        let _ = writeln!(svg, r#"<circle cx="{x:.3}" cy="{y:.3}" r="5" fill="{}"/>"#, fill(palette, *c));
        let _ = writeln!(svg, r#"<text x="{:.3}" y="{:.3}" font-size="11">{}</text>"#, x + 9.0, y + 4.0, c.as_str());
    }
}

fn document(view: &View, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH:.0}\" height=\"{:.0}\" font-family=\"sans-serif\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n",
        view.height
    )
}

/// Initial configuration (hollow), motion segments, final configuration.
pub fn render_trace(trace: &Trace) -> String {
    let initial = trace.initial();
    let moves = trace.moves();
    let mut pts: Vec<Point> = initial.positions();
    pts.extend(trace.final_config.positions());
    for m in &moves {
        pts.push(m.1);
        pts.push(m.2);
    }
    let view = View::fit(&pts);
    let palette = palette_of([&initial, &trace.final_config].into_iter());
    let mut body = String::new();
    for (robot, from, to, t0, _) in &moves {
        let (x1, y1) = view.map(*from);
        let (x2, y2) = view.map(*to);
        let _ = writeln!(
            body,
            r##"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="#555555" stroke-width="1" stroke-dasharray="4 2"><title>robot {robot}</title></line>"##
        );
        let _ = writeln!(
            body,
            r##"<text x="{:.3}" y="{:.3}" font-size="9" fill="#555555">t={t0:.2}</text>"##,
            (x1 + x2) / 2.0 + 3.0,
            (y1 + y2) / 2.0 - 3.0
        );
    }
    robots(&mut body, &view, &initial, &palette, true);
    robots(&mut body, &view, &trace.final_config, &palette, false);
    legend(&mut body, &view, &palette);
    document(&view, &body)
}

/// The configuration at time `t` alone.
pub fn render_at(trace: &Trace, t: f64) -> String {
    let cfg = configuration_at(trace, t);
    let view = View::fit(&cfg.positions());
    let palette = palette_of(std::iter::once(&cfg));
    let mut body = String::new();
    let _ = writeln!(body, r#"<text x="{MARGIN}" y="20" font-size="12">t = {t}</text>"#);
    robots(&mut body, &view, &cfg, &palette, false);
    legend(&mut body, &view, &palette);
    document(&view, &body)
}
