//! Minimal static SVG charts (line, scatter, horizontal bands).
//!
//! Output depends only on the data: coordinates are printed with fixed
//! precision and series keep insertion order.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Points,
}

#[derive(Debug, Clone)]
struct Series {
    name: String,
    points: Vec<(f64, f64)>,
    style: Style,
}

#[derive(Debug, Clone)]
struct HLine {
    y: f64,
    label: String,
}

#[derive(Debug, Clone)]
struct Band {
    lo: f64,
    hi: f64,
    label: String,
}

#[derive(Debug, Clone)]
pub struct Chart {
    title: String,
    x_label: String,
    y_label: String,
    x_ticks: Option<Vec<(f64, String)>>,
    series: Vec<Series>,
    lines: Vec<HLine>,
    bands: Vec<Band>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

impl Chart {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            x_ticks: None,
            series: Vec::new(),
            lines: Vec::new(),
            bands: Vec::new(),
        }
    }

    /// Categorical x axis labels at the given positions.
    pub fn x_ticks(mut self, ticks: Vec<(f64, String)>) -> Self {
        self.x_ticks = Some(ticks);
        self
    }

    pub fn series(mut self, name: &str, points: Vec<(f64, f64)>, style: Style) -> Self {
        self.series.push(Series {
            name: name.into(),
            points,
            style,
        });
        self
    }

    pub fn hline(mut self, y: f64, label: &str) -> Self {
        self.lines.push(HLine { y, label: label.into() });
        self
    }

    pub fn band(mut self, lo: f64, hi: f64, label: &str) -> Self {
        self.bands.push(Band {
            lo: lo.min(hi),
            hi: lo.max(hi),
            label: label.into(),
        });
        self
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut xs: Vec<f64> = self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
        if let Some(t) = &self.x_ticks {
            xs.extend(t.iter().map(|t| t.0));
        }
        let mut ys: Vec<f64> = self.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)).collect();
        ys.extend(self.lines.iter().map(|l| l.y));
        ys.extend(self.bands.iter().flat_map(|b| [b.lo, b.hi]));
        let range = |v: &[f64]| {
            let lo = v
                .iter()
                .copied()
                .filter(|x| x.is_finite())
                .fold(f64::INFINITY, f64::min);
            let hi = v
                .iter()
                .copied()
                .filter(|x| x.is_finite())
                .fold(f64::NEG_INFINITY, f64::max);
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if hi - lo < 1e-12 {
                (lo - 0.5, hi + 0.5)
            } else {
                let pad = 0.05 * (hi - lo);
                (lo - pad, hi + pad)
            }
        };
        let (x0, x1) = range(&xs);
        let (y0, y1) = range(&ys);
        (x0, x1, y0, y1)
    }

    pub fn render(&self) -> String {
        let (x0, x1, y0, y1) = self.bounds();
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let py = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(
            s,
            r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
            LEFT + pw / 2.0,
            esc(&self.title)
        );

        for b in &self.bands {
            let _ = writeln!(
                s,
                r##"<rect x="{:.2}" y="{:.2}" width="{pw:.2}" height="{:.2}" fill="#cccccc" fill-opacity="0.5"><title>{}</title></rect>"##,
                LEFT,
                py(b.hi),
                py(b.lo) - py(b.hi),
                esc(&b.label)
            );
        }

        // Axes and ticks.
        let _ = writeln!(
            s,
            r#"<path d="M{LEFT:.2},{TOP:.2} V{:.2} H{:.2}" stroke="black" fill="none"/>"#,
            TOP + ph,
            LEFT + pw
        );
        for i in 0..=5 {
            let y = y0 + (y1 - y0) * f64::from(i) / 5.0;
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{y:.3}</text>"#,
                LEFT - 6.0,
                py(y) + 4.0
            );
        }
        match &self.x_ticks {
            Some(ticks) => {
                for (x, label) in ticks {
                    let _ = writeln!(
                        s,
                        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                        px(*x),
                        TOP + ph + 16.0,
                        esc(label)
                    );
                }
            }
            None => {
                for i in 0..=5 {
                    let x = x0 + (x1 - x0) * f64::from(i) / 5.0;
                    let _ = writeln!(
                        s,
                        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x:.2}</text>"#,
                        px(x),
                        TOP + ph + 16.0
                    );
                }
            }
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 10.0,
            esc(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            esc(&self.y_label)
        );

        for l in &self.lines {
            let _ = writeln!(
                s,
                r#"<line x1="{LEFT:.2}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="black" stroke-dasharray="6 4"/>"#,
                py(l.y),
                LEFT + pw
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                LEFT + pw + 4.0,
                py(l.y) + 4.0,
                esc(&l.label)
            );
        }

        for (i, series) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<(f64, f64)> = series
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|&(x, y)| (px(x), py(y)))
                .collect();
            if series.style == Style::Line && pts.len() > 1 {
                let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    s,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                    path.join(" ")
                );
            }
            for (x, y) in &pts {
                let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="{color}"/>"#);
            }
            let ly = TOP + 14.0 * i as f64 + 10.0;
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                LEFT + pw + 70.0,
                ly,
                LEFT + pw + 78.0,
                ly + 4.0,
                esc(&series.name)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}
