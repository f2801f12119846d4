//! Minimal SVG 1.1 charts: stacked panels of line series or grouped bars
//! with optional error bars. Rates are plotted on a fixed 0..100 axis.

use std::fmt::Write;

const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

const WIDTH: f64 = 760.0;
const PANEL_HEIGHT: f64 = 300.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

pub struct BarGroup {
    pub name: String,
    pub values: Vec<f64>,
    /// Symmetric error per bar; drawn clamped to `[0, 100]`.
    pub errors: Option<Vec<f64>>,
}

pub enum Panel {
    Lines {
        title: String,
        x_label: String,
        series: Vec<Series>,
    },
    Bars {
        title: String,
        categories: Vec<String>,
        groups: Vec<BarGroup>,
    },
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Frame {
    y0: f64,
    plot_w: f64,
    plot_h: f64,
}

impl Frame {
    fn y(&self, rate: f64) -> f64 {
        self.y0 + TOP + self.plot_h * (1.0 - rate.clamp(0.0, 100.0) / 100.0)
    }
}

pub fn render(title: &str, panels: &[Panel]) -> String {
    let height = PANEL_HEIGHT * panels.len() as f64 + 30.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg version="1.1" xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="20" text-anchor="middle" font-size="15" font-weight="bold">{}</text>"#,
        WIDTH / 2.0,
        esc(title)
    );
    for (i, panel) in panels.iter().enumerate() {
        let frame = Frame {
            y0: 30.0 + PANEL_HEIGHT * i as f64,
            plot_w: WIDTH - LEFT - RIGHT,
            plot_h: PANEL_HEIGHT - TOP - BOTTOM,
        };
        match panel {
            Panel::Lines {
                title,
                x_label,
                series,
            } => lines(&mut s, &frame, title, x_label, series),
            Panel::Bars {
                title,
                categories,
                groups,
            } => bars(&mut s, &frame, title, categories, groups),
        }
    }
    s.push_str("</svg>\n");
    s
}

fn axes(s: &mut String, f: &Frame, title: &str, x_label: &str) {
    let x1 = LEFT + f.plot_w;
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-weight="bold">{}</text>"#,
        LEFT + f.plot_w / 2.0,
        f.y0 + TOP - 12.0,
        esc(title)
    );
    for tick in (0..=100).step_by(20) {
        let y = f.y(f64::from(tick));
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.1}" x2="{x1:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{}" y="{:.1}" text-anchor="end">{tick}</text>"##,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let bottom = f.y(0.0);
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{:.1}" x2="{LEFT}" y2="{bottom:.1}" stroke="black"/><line x1="{LEFT}" y1="{bottom:.1}" x2="{x1:.1}" y2="{bottom:.1}" stroke="black"/>"#,
        f.y(100.0)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{:.1}" text-anchor="middle">{}</text><text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">rate (%)</text>"#,
        LEFT + f.plot_w / 2.0,
        bottom + 36.0,
        esc(x_label),
        f.y(50.0),
        f.y(50.0)
    );
}

fn legend(s: &mut String, f: &Frame, names: impl Iterator<Item = String>) {
    for (i, name) in names.enumerate() {
        let y = f.y0 + TOP + 18.0 * i as f64;
        let x = LEFT + f.plot_w + 14.0;
        let _ = writeln!(
            s,
            r#"<rect x="{x}" y="{:.1}" width="12" height="12" fill="{}"/><text x="{}" y="{:.1}">{}</text>"#,
            y,
            COLORS[i % COLORS.len()],
            x + 18.0,
            y + 10.0,
            esc(&name)
        );
    }
}

fn lines(s: &mut String, f: &Frame, title: &str, x_label: &str, series: &[Series]) {
    axes(s, f, title, x_label);
    let xs: Vec<f64> = series.iter().flat_map(|se| se.points.iter().map(|p| p.0)).collect();
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 1.0) };
    let span = if hi > lo { hi - lo } else { 1.0 };
    let px = |x: f64| LEFT + 20.0 + (f.plot_w - 40.0) * (x - lo) / span;

    let mut ticks: Vec<f64> = xs.clone();
    ticks.sort_by(f64::total_cmp);
    ticks.dedup();
    for t in ticks {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{t}</text>"#,
            px(t),
            f.y(0.0) + 16.0
        );
    }
    for (i, se) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = se
            .points
            .iter()
            .enumerate()
            .map(|(k, &(x, y))| format!("{}{:.1} {:.1}", if k == 0 { 'M' } else { 'L' }, px(x), f.y(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<path d="{}" stroke="{color}" stroke-width="2" fill="none"/>"#,
            path.join(" ")
        );
        for &(x, y) in &se.points {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                px(x),
                f.y(y)
            );
        }
    }
    legend(s, f, series.iter().map(|se| se.name.clone()));
}

fn bars(s: &mut String, f: &Frame, title: &str, categories: &[String], groups: &[BarGroup]) {
    axes(s, f, title, "");
    let slot = f.plot_w / categories.len().max(1) as f64;
    let bar_w = slot * 0.8 / groups.len().max(1) as f64;
    for (c, cat) in categories.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="10">{}</text>"#,
            LEFT + slot * (c as f64 + 0.5),
            f.y(0.0) + 14.0,
            esc(cat)
        );
    }
    for (g, group) in groups.iter().enumerate() {
        let color = COLORS[g % COLORS.len()];
        for (c, &v) in group.values.iter().enumerate() {
            let x = LEFT + slot * c as f64 + slot * 0.1 + bar_w * g as f64;
            let top = f.y(v);
            let _ = writeln!(
                s,
                r#"<rect x="{x:.1}" y="{top:.1}" width="{bar_w:.1}" height="{:.1}" fill="{color}"/>"#,
                f.y(0.0) - top
            );
            if let Some(err) = group.errors.as_ref().and_then(|e| e.get(c)) {
                let (lo, hi) = nnoracle::harness::error_bar(v, *err);
                let cx = x + bar_w / 2.0;
                let _ = writeln!(
                    s,
                    r#"<path d="M{cx:.1} {:.1} L{cx:.1} {:.1} M{:.1} {:.1} L{:.1} {:.1} M{:.1} {:.1} L{:.1} {:.1}" stroke="black"/>"#,
                    f.y(lo),
                    f.y(hi),
                    cx - 3.0,
                    f.y(lo),
                    cx + 3.0,
                    f.y(lo),
                    cx - 3.0,
                    f.y(hi),
                    cx + 3.0,
                    f.y(hi)
                );
            }
        }
    }
    legend(s, f, groups.iter().map(|g| g.name.clone()));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_both_panel_kinds() {
        let svg = render(
            "demo <1>",
            &[
                Panel::Lines {
                    title: "tp".into(),
                    x_label: "N".into(),
                    series: vec![Series {
                        name: "uni".into(),
                        points: vec![(10.0, 40.0), (20.0, 50.0)],
                    }],
                },
                Panel::Bars {
                    title: "fp".into(),
                    categories: vec!["M1".into(), "M2".into()],
                    groups: vec![BarGroup {
                        name: "lower".into(),
                        values: vec![2.0, 99.0],
                        errors: Some(vec![5.0, 5.0]),
                    }],
                },
            ],
        );
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains(r#"<svg version="1.1""#));
        assert!(svg.contains("demo &lt;1&gt;"));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn empty_panels_do_not_panic() {
        let svg = render(
            "empty",
            &[Panel::Lines {
                title: String::new(),
                x_label: String::new(),
                series: vec![],
            }],
        );
        assert!(svg.contains("</svg>"));
    }
}
