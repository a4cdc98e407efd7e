//! Minimal self-contained SVG charts: scatter plots with line overlays,
//! line charts (optionally log-log), grouped bars and histograms.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

pub const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>, color: &'static str) -> Self {
        Self {
            label: label.into(),
            points,
            color,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Scale {
    Linear,
    Log,
}

impl Scale {
    fn apply(self, v: f64) -> f64 {
        match self {
            Scale::Linear => v,
            Scale::Log => v.log10(),
        }
    }
}

/// A 2-D chart with scatter series, polyline series and a legend.
#[derive(Debug, Clone)]
pub struct Chart {
    title: String,
    x_label: String,
    y_label: String,
    x_scale: Scale,
    y_scale: Scale,
    scatter: Vec<Series>,
    lines: Vec<Series>,
    x_range: Option<(f64, f64)>,
    y_range: Option<(f64, f64)>,
}

impl Chart {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            scatter: Vec::new(),
            lines: Vec::new(),
            x_range: None,
            y_range: None,
        }
    }

    pub fn log_log(mut self) -> Self {
        self.x_scale = Scale::Log;
        self.y_scale = Scale::Log;
        self
    }

    pub fn log_y(mut self) -> Self {
        self.y_scale = Scale::Log;
        self
    }

    pub fn scatter(mut self, series: Series) -> Self {
        self.scatter.push(series);
        self
    }

    pub fn line(mut self, series: Series) -> Self {
        self.lines.push(series);
        self
    }

    /// Fixes the visible x range; otherwise it is fitted to the data.
    pub fn x_range(mut self, lo: f64, hi: f64) -> Self {
        self.x_range = Some((lo, hi));
        self
    }

    pub fn y_range(mut self, lo: f64, hi: f64) -> Self {
        self.y_range = Some((lo, hi));
        self
    }

    fn fitted_range(&self, pick: fn(&(f64, f64)) -> f64, scale: Scale) -> (f64, f64) {
        let values = self
            .scatter
            .iter()
            .chain(&self.lines)
            .flat_map(|s| s.points.iter().map(pick))
            .filter(|v| v.is_finite() && (scale == Scale::Linear || *v > 0.0))
            .map(|v| scale.apply(v));
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if !lo.is_finite() {
            return (0.0, 1.0);
        }
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
        (lo - pad, hi + pad)
    }

    pub fn render(&self) -> String {
        let (x0, x1) = self
            .x_range
            .map(|(a, b)| (self.x_scale.apply(a), self.x_scale.apply(b)))
            .unwrap_or_else(|| self.fitted_range(|p| p.0, self.x_scale));
        let (y0, y1) = self
            .y_range
            .map(|(a, b)| (self.y_scale.apply(a), self.y_scale.apply(b)))
            .unwrap_or_else(|| self.fitted_range(|p| p.1, self.y_scale));
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let px = |x: f64| MARGIN_LEFT + (self.x_scale.apply(x) - x0) / (x1 - x0) * plot_w;
        let py = |y: f64| MARGIN_TOP + (1.0 - (self.y_scale.apply(y) - y0) / (y1 - y0)) * plot_h;
        let visible = |&(x, y): &(f64, f64)| {
            x.is_finite()
                && y.is_finite()
                && (self.x_scale == Scale::Linear || x > 0.0)
                && (self.y_scale == Scale::Linear || y > 0.0)
        };

        let mut out = header(&self.title);
        axes(&mut out, (x0, x1), (y0, y1), self.x_scale, self.y_scale, &self.x_label, &self.y_label);
        let _ = writeln!(
            out,
            r#"<clipPath id="plot"><rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}"/></clipPath><g clip-path="url(#plot)">"#
        );
        for s in &self.scatter {
            for p in s.points.iter().filter(|p| visible(p)) {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}" fill-opacity="0.6"/>"#,
                    px(p.0),
                    py(p.1),
                    s.color
                );
            }
        }
        for s in &self.lines {
            let pts: Vec<String> = s
                .points
                .iter()
                .filter(|p| visible(p))
                .map(|p| format!("{:.2},{:.2}", px(p.0), py(p.1)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
                pts.join(" "),
                s.color
            );
        }
        out.push_str("</g>\n");
        let labels: Vec<(&str, &str)> = self
            .scatter
            .iter()
            .chain(&self.lines)
            .map(|s| (s.label.as_str(), s.color))
            .collect();
        legend(&mut out, &labels);
        out.push_str("</svg>\n");
        out
    }
}

/// Vertical bars grouped by category, one bar per series within a group.
pub fn grouped_bars(title: &str, y_label: &str, groups: &[String], series: &[(String, Vec<f64>)]) -> String {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let top = series
        .iter()
        .flat_map(|(_, v)| v.iter().copied())
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE)
        * 1.1;
    let mut out = header(title);
    axes(&mut out, (0.0, 1.0), (0.0, top), Scale::Linear, Scale::Linear, "", y_label);
    let group_w = plot_w / groups.len().max(1) as f64;
    let bar_w = group_w * 0.8 / series.len().max(1) as f64;
    for (g, name) in groups.iter().enumerate() {
        let gx = MARGIN_LEFT + g as f64 * group_w;
        for (s, (_, values)) in series.iter().enumerate() {
            let v = values.get(g).copied().unwrap_or(0.0);
            if !v.is_finite() {
                continue;
            }
            let h = v / top * plot_h;
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                gx + group_w * 0.1 + s as f64 * bar_w,
                MARGIN_TOP + plot_h - h,
                bar_w,
                h,
                PALETTE[s % PALETTE.len()]
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            gx + group_w / 2.0,
            HEIGHT - MARGIN_BOTTOM + 16.0,
            escape(name)
        );
    }
    let labels: Vec<(&str, &str)> = series
        .iter()
        .enumerate()
        .map(|(i, (l, _))| (l.as_str(), PALETTE[i % PALETTE.len()]))
        .collect();
    legend(&mut out, &labels);
    out.push_str("</svg>\n");
    out
}

/// Histogram of `values` with `bins` equal-width bins.
pub fn histogram(title: &str, x_label: &str, values: &[f64], bins: usize) -> String {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    };
    let bins = bins.max(1);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for v in &finite {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let top = *counts.iter().max().unwrap_or(&1) as f64 * 1.1;
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let mut out = header(title);
    axes(&mut out, (lo, hi), (0.0, top.max(1.0)), Scale::Linear, Scale::Linear, x_label, "count");
    for (b, &c) in counts.iter().enumerate() {
        let h = c as f64 / top.max(1.0) * plot_h;
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}" stroke="white"/>"#,
            MARGIN_LEFT + b as f64 / bins as f64 * plot_w,
            MARGIN_TOP + plot_h - h,
            plot_w / bins as f64,
            h,
            PALETTE[0]
        );
    }
    out.push_str("</svg>\n");
    out
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{:.1}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        (WIDTH - MARGIN_RIGHT + MARGIN_LEFT) / 2.0,
        escape(title)
    )
}

fn axes(out: &mut String, x: (f64, f64), y: (f64, f64), xs: Scale, ys: Scale, x_label: &str, y_label: &str) {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let bottom = MARGIN_TOP + plot_h;
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    if !x_label.is_empty() {
        for i in 0..=4 {
            let t = x.0 + (x.1 - x.0) * i as f64 / 4.0;
            let sx = MARGIN_LEFT + plot_w * i as f64 / 4.0;
            let _ = writeln!(
                out,
                r#"<line x1="{sx:.2}" y1="{bottom}" x2="{sx:.2}" y2="{:.2}" stroke="black"/><text x="{sx:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
                bottom + 5.0,
                bottom + 18.0,
                tick(t, xs)
            );
        }
    }
    for i in 0..=4 {
        let t = y.0 + (y.1 - y.0) * i as f64 / 4.0;
        let sy = bottom - plot_h * i as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{sy:.2}" x2="{MARGIN_LEFT}" y2="{sy:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 5.0,
            MARGIN_LEFT - 8.0,
            sy + 4.0,
            tick(t, ys)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape(y_label)
    );
}

fn legend(out: &mut String, labels: &[(&str, &str)]) {
    let x = WIDTH - MARGIN_RIGHT + 12.0;
    for (i, (label, color)) in labels.iter().enumerate() {
        let y = MARGIN_TOP + 10.0 + 18.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{x}" y="{:.2}" width="10" height="10" fill="{color}"/><text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
            y - 9.0,
            x + 15.0,
            y,
            escape(label)
        );
    }
}

fn tick(v: f64, scale: Scale) -> String {
    match scale {
        Scale::Log => format!("1e{v:.1}"),
        Scale::Linear if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) => format!("{v:.1e}"),
        Scale::Linear => format!("{v:.2}"),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_contains_series() {
        let svg = Chart::new("t <1>", "x", "y")
            .scatter(Series::new("pts", vec![(0.0, 1.0), (1.0, 2.0)], PALETTE[0]))
            .line(Series::new("fit", vec![(0.0, 1.0), (1.0, 3.0)], PALETTE[1]))
            .render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("t &lt;1&gt;"));
    }

    #[test]
    fn log_chart_skips_nonpositive_points() {
        let svg = Chart::new("", "x", "y")
            .log_log()
            .scatter(Series::new("s", vec![(0.0, 1.0), (10.0, 100.0), (1.0, f64::NAN)], PALETTE[0]))
            .render();
        assert_eq!(svg.matches("<circle").count(), 1);
    }

    #[test]
    fn bars_and_histogram() {
        let svg = grouped_bars("b", "acc", &["a".into(), "b".into()], &[("m".into(), vec![0.5, 0.7])]);
        assert_eq!(svg.matches("<rect").count(), 1 + 1 + 2 + 1);
        let h = histogram("h", "v", &[1.0, 2.0, 2.5, 10.0], 3);
        assert!(h.contains("<rect"));
    }
}
