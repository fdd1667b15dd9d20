//! SVG distribution plots: median line, shaded interquartile band and dotted
//! min/max envelope.

use std::fmt::Write;

use crate::aggregate::EnsembleSummary;
use crate::model::SampledFunction;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 360.0;
const LEFT: f64 = 56.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 32.0;
const BOTTOM: f64 = 44.0;

struct Frame {
    t0: f64,
    t1: f64,
}

impl Frame {
    fn x(&self, t: f64) -> f64 {
        LEFT + (t - self.t0) / (self.t1 - self.t0) * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - BOTTOM - v * (HEIGHT - TOP - BOTTOM)
    }

    fn points<'a>(&'a self, f: &'a SampledFunction) -> impl Iterator<Item = (f64, f64)> + 'a {
        f.grid().times().zip(f.values()).map(|(t, &v)| (self.x(t), self.y(v)))
    }
}

fn path(points: impl Iterator<Item = (f64, f64)>) -> String {
    let mut d = String::new();
    for (i, (x, y)) in points.enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        write!(d, "{cmd}{x:.2},{y:.2}").expect("writing to a string");
    }
    d
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders an ensemble summary with time in minutes on the x axis.
///
/// # Panics
///
/// Panics if the summary lacks the 0.25 or 0.75 quantile.
pub fn render_summary(summary: &EnsembleSummary, title: &str) -> String {
    let q25 = summary.quantile(0.25).expect("summary holds the 0.25 quantile");
    let q75 = summary.quantile(0.75).expect("summary holds the 0.75 quantile");
    let grid = summary.median.grid();
    let frame = Frame { t0: grid.start(), t1: grid.last_time().max(grid.start() + grid.period()) };

    let mut band: Vec<(f64, f64)> = frame.points(q75).collect();
    band.extend(frame.points(q25).collect::<Vec<_>>().into_iter().rev());

    let mut s = String::new();
    let mut w = |line: String| {
        s.push_str(&line);
        s.push('\n');
    };
    w(format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    ));
    w(r#"<rect width="100%" height="100%" fill="white"/>"#.into());
    w(format!(
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    ));

    let (x0, x1) = (frame.x(frame.t0), frame.x(frame.t1));
    let (y0, y1) = (frame.y(0.0), frame.y(1.0));
    w(format!(
        r##"<g stroke="#444" stroke-width="1"><line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}"/><line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}"/></g>"##
    ));
    w(r##"<g font-family="sans-serif" font-size="11" fill="#444">"##.into());
    for i in 0..=4 {
        let v = i as f64 / 4.0;
        w(format!(r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"#, LEFT - 6.0, frame.y(v) + 4.0));
    }
    let span_min = (frame.t1 - frame.t0) / 60.0;
    for i in 0..=6 {
        let minute = frame.t0 / 60.0 + span_min * i as f64 / 6.0;
        w(format!(
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{minute:.0}</text>"#,
            frame.x(minute * 60.0),
            y0 + 16.0
        ));
    }
    w(format!(r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">time [min]</text>"#, (x0 + x1) / 2.0, HEIGHT - 6.0));
    w(format!(
        r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">satisfaction</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    ));
    w("</g>".into());

    w(format!(r##"<path d="{}Z" fill="#4a78b0" fill-opacity="0.3" stroke="none"/>"##, path(band.into_iter())));
    for f in [&summary.min, &summary.max] {
        w(format!(
            r##"<path d="{}" fill="none" stroke="#4a78b0" stroke-width="1" stroke-dasharray="2,3"/>"##,
            path(frame.points(f))
        ));
    }
    w(format!(
        r##"<path d="{}" fill="none" stroke="#1d3f6e" stroke-width="2"/>"##,
        path(frame.points(&summary.median))
    ));
    w("</svg>".into());
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregate::{summarize, SatisfactionEnsemble};
    use crate::model::SamplingGrid;

    fn summary() -> EnsembleSummary {
        let grid = SamplingGrid::with_period(0.0, 60.0, 15.0).unwrap();
        let members = [0.0, 0.5, 1.0].iter().map(|&v| SampledFunction::constant(grid.clone(), v).unwrap()).collect();
        summarize(&SatisfactionEnsemble::new("t", members).unwrap(), &[0.25, 0.75], 0.05).unwrap()
    }

    #[test]
    fn layers_present() {
        let svg = render_summary(&summary(), "a < b");
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg.matches("stroke-dasharray").count(), 2);
        assert_eq!(svg.matches("fill-opacity").count(), 1);
        // median 0.5 sits mid-plot
        let mid = HEIGHT - BOTTOM - 0.5 * (HEIGHT - TOP - BOTTOM);
        assert!(svg.contains(&format!("M{LEFT:.2},{mid:.2}")));
    }

    #[test]
    fn deterministic() {
        assert_eq!(render_summary(&summary(), "x"), render_summary(&summary(), "x"));
    }
}
