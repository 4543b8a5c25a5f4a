//! Minimal static SVG plots: line panels and heat maps on a grid layout.

use std::fmt::Write as _;

const PANEL_W: f64 = 440.0;
const PANEL_H: f64 = 300.0;
const LEFT: f64 = 62.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 28.0;
const BOTTOM: f64 = 44.0;
const COLORS: [&str; 6] = [
    "#1b1b1b", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e",
];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub dashed: bool,
    /// Index into the palette; series sharing a color share an index.
    pub color: usize,
}

impl Series {
    pub fn new(label: impl Into<String>, x: Vec<f64>, y: Vec<f64>, color: usize) -> Self {
        Self {
            label: label.into(),
            x,
            y,
            dashed: false,
            color,
        }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

/// Values on a rectangular grid, `z[iy][ix]`.
#[derive(Debug, Clone)]
pub struct Heatmap {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Default)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
    pub vlines: Vec<(f64, String)>,
    pub heatmap: Option<Heatmap>,
}

impl Panel {
    pub fn new(
        title: impl Into<String>,
        x_label: impl Into<String>,
        y_label: impl Into<String>,
    ) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            ..Default::default()
        }
    }
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if log {
            // keep six decades so exact zeros do not flatten the curve
            lo = lo.max(hi - 6.0);
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        Self { lo, hi, log }
    }

    fn frac(&self, v: f64) -> f64 {
        let v = if self.log { v.max(1e-300).log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            let every = ((b - a) / 6 + 1).max(1);
            return (a..=b)
                .step_by(every as usize)
                .map(|e| (10f64.powi(e), format!("1e{e}")))
                .collect();
        }
        let span = self.hi - self.lo;
        let raw = span / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|s| *s >= raw)
            .unwrap_or(10.0 * mag);
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step).floor() as i64;
        (first..=last)
            .map(|k| {
                let v = k as f64 * step;
                (v, trim_number(v, step))
            })
            .collect()
    }
}

fn trim_number(v: f64, step: f64) -> String {
    let digits = if step >= 1.0 {
        0
    } else {
        (-step.log10().floor()) as usize
    };
    let s = format!("{v:.digits$}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Blue to yellow ramp over [0, 1].
fn ramp(t: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let t = if t.is_finite() {
        t.clamp(0.0, 1.0)
    } else {
        0.0
    } * (STOPS.len() - 1) as f64;
    let k = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - k as f64;
    let (a, b) = (STOPS[k], STOPS[k + 1]);
    let mix = |x: f64, y: f64| (x + (y - x) * f).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(a.0, b.0),
        mix(a.1, b.1),
        mix(a.2, b.2)
    )
}

fn render_panel(s: &mut String, p: &Panel, ox: f64, oy: f64) {
    let (w, h) = (PANEL_W - LEFT - RIGHT, PANEL_H - TOP - BOTTOM);
    let (x0, y0) = (ox + LEFT, oy + TOP);

    let (xa, ya) = match &p.heatmap {
        Some(hm) => (
            Axis::fit(hm.x.iter().copied(), p.log_x),
            Axis::fit(hm.y.iter().copied(), p.log_y),
        ),
        None => (
            Axis::fit(p.series.iter().flat_map(|c| c.x.iter().copied()), p.log_x),
            Axis::fit(p.series.iter().flat_map(|c| c.y.iter().copied()), p.log_y),
        ),
    };
    let px = |v: f64| x0 + w * xa.frac(v);
    let py = |v: f64| y0 + h * (1.0 - ya.frac(v).clamp(0.0, 1.0));

    if let Some(hm) = &p.heatmap {
        let zs = hm.z.iter().flatten().copied().filter(|v| v.is_finite());
        let (zlo, zhi) = zs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
        let edges = |g: &[f64], f: &dyn Fn(f64) -> f64| -> Vec<f64> {
            let c: Vec<f64> = g.iter().map(|&v| f(v)).collect();
            let mut e = Vec::with_capacity(c.len() + 1);
            let n = c.len();
            let half = |i: usize| if n > 1 { 0.5 * (c[i + 1] - c[i]) } else { 0.5 };
            e.push(c[0] - half(0));
            for i in 0..n.saturating_sub(1) {
                e.push(0.5 * (c[i] + c[i + 1]));
            }
            e.push(c[n - 1] + half(n.saturating_sub(2)));
            e
        };
        let fx = |v: f64| xa.frac(v);
        let fy = |v: f64| ya.frac(v);
        let ex = edges(&hm.x, &fx);
        let ey = edges(&hm.y, &fy);
        for (iy, row) in hm.z.iter().enumerate() {
            for (ix, &z) in row.iter().enumerate() {
                let t = if zhi > zlo {
                    (z - zlo) / (zhi - zlo)
                } else {
                    0.5
                };
                let (xl, xr) = (
                    x0 + w * ex[ix].clamp(0.0, 1.0),
                    x0 + w * ex[ix + 1].clamp(0.0, 1.0),
                );
                let (yt, yb) = (
                    y0 + h * (1.0 - ey[iy + 1].clamp(0.0, 1.0)),
                    y0 + h * (1.0 - ey[iy].clamp(0.0, 1.0)),
                );
                let _ = writeln!(
                    s,
                    r#"<rect x="{xl:.2}" y="{yt:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                    (xr - xl).abs() + 0.3,
                    (yb - yt).abs() + 0.3,
                    ramp(t)
                );
            }
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">color: {} to {}</text>"#,
            x0 + w,
            oy + TOP - 6.0,
            trim_sig(zlo),
            trim_sig(zhi)
        );
    }

    let _ = writeln!(
        s,
        r##"<rect x="{x0:.2}" y="{y0:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="#444"/>"##
    );
    for (v, label) in xa.ticks() {
        let x = px(v);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#444"/>"##,
            y0 + h,
            y0 + h + 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" font-size="10" text-anchor="middle">{label}</text>"#,
            y0 + h + 15.0
        );
    }
    for (v, label) in ya.ticks() {
        let y = py(v);
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="#444"/>"##,
            x0 - 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{label}</text>"#,
            x0 - 6.0,
            y + 3.5
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
        x0 + 0.5 * w,
        oy + PANEL_H - 8.0,
        escape(&p.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
        ox + 14.0,
        y0 + 0.5 * h,
        ox + 14.0,
        y0 + 0.5 * h,
        escape(&p.y_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="{x0:.2}" y="{:.2}" font-size="12">{}</text>"#,
        oy + TOP - 8.0,
        escape(&p.title)
    );

    for (k, (v, label)) in p.vlines.iter().enumerate() {
        let f = xa.frac(*v);
        if !(0.0..=1.0).contains(&f) {
            continue;
        }
        let x = px(*v);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="#888" stroke-dasharray="2 3"/>"##,
            y0 + h
        );
        let _ = writeln!(
            s,
            r##"<text x="{:.2}" y="{:.2}" font-size="10" fill="#555">{}</text>"##,
            x + 3.0,
            y0 + 12.0 + 12.0 * k as f64,
            escape(label)
        );
    }

    for c in &p.series {
        let pts: Vec<String> = c
            .x
            .iter()
            .zip(&c.y)
            .filter(|(x, y)| {
                x.is_finite() && y.is_finite() && (!p.log_x || **x > 0.0) && (!p.log_y || **y > 0.0)
            })
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let dash = if c.dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.4"{dash} points="{}"/>"#,
            COLORS[c.color % COLORS.len()],
            pts.join(" ")
        );
    }
    let labeled: Vec<&Series> = p.series.iter().filter(|c| !c.label.is_empty()).collect();
    for (k, c) in labeled.iter().enumerate() {
        let y = y0 + 12.0 + 13.0 * k as f64;
        let x = x0 + w - 120.0;
        let dash = if c.dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let color = COLORS[c.color % COLORS.len()];
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.4"{dash}/>"#,
            y - 3.5,
            x + 18.0,
            y - 3.5
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{y:.2}" font-size="10">{}</text>"#,
            x + 22.0,
            escape(&c.label)
        );
    }
}

fn trim_sig(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.3e}")
    } else {
        "n/a".into()
    }
}

/// Lays panels out row by row, `cols` per row.
pub fn render(panels: &[Panel], cols: usize) -> String {
    let cols = cols.max(1).min(panels.len().max(1));
    let rows = panels.len().div_ceil(cols).max(1);
    let (width, height) = (PANEL_W * cols as f64, PANEL_H * rows as f64);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (k, p) in panels.iter().enumerate() {
        render_panel(
            &mut s,
            p,
            PANEL_W * (k % cols) as f64,
            PANEL_H * (k / cols) as f64,
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_panel_is_well_formed() {
        let mut p = Panel::new("t <1>", "x", "y");
        p.series.push(Series::new(
            "a",
            vec![0.0, 1.0, 2.0],
            vec![0.0, 1.0, 0.5],
            0,
        ));
        p.series
            .push(Series::new("b", vec![0.0, 2.0], vec![1.0, 0.0], 1).dashed());
        p.vlines.push((1.0, "mark".into()));
        let s = render(&[p], 1);
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert_eq!(s.matches("<polyline").count(), 2);
        assert!(s.contains("t &lt;1&gt;"));
        assert!(s.contains("stroke-dasharray=\"6 4\""));
        assert!(s.contains(">mark<"));
    }

    #[test]
    fn log_axis_and_heatmap() {
        let mut p = Panel::new("", "p", "r");
        p.log_x = true;
        p.series.push(Series::new(
            "",
            vec![1e-12, 1e-9, 1e-6],
            vec![1.0, 0.5, 0.0],
            2,
        ));
        let s = render(&[p], 1);
        assert!(s.contains(">1e-12<") || s.contains(">1e-11<"));
        let mut h = Panel::new("map", "d", "p");
        h.log_y = true;
        h.heatmap = Some(Heatmap {
            x: vec![0.0, 1.0],
            y: vec![1e-12, 1e-9],
            z: vec![vec![0.0, 1.0], vec![0.5, 0.2]],
        });
        let s = render(&[h.clone(), h], 2);
        assert_eq!(s.matches("<rect x=").count(), 2 * (4 + 1));
    }

    #[test]
    fn ticks_are_round() {
        let a = Axis {
            lo: -75.0,
            hi: 75.0,
            log: false,
        };
        let t: Vec<String> = a.ticks().into_iter().map(|(_, l)| l).collect();
        assert!(
            t.contains(&"0".to_string()) && t.contains(&"-50".to_string()),
            "{t:?}"
        );
        assert_eq!(ramp(0.0), "#440154");
        assert_eq!(ramp(1.0), "#fde725");
    }
}
