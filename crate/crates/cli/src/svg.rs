//! Self-contained SVG line plots carrying their data in comments.

use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace("--", "- -")
}

/// Plot of all series on shared axes; `log_y` plots `log10 y` and drops `y <= 0`.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series], log_y: bool, stamp: &str) -> String {
    let tf = |y: f64| if log_y { y.log10() } else { y };
    let pts: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite() && (!log_y || *y > 0.0))
                .map(|&(x, y)| (x, tf(y)))
                .collect()
        })
        .collect();
    let all = pts.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x0 < x1) {
        (x0, x1) = (x0.min(0.0) - 0.5, x1.max(0.0) + 0.5);
    }
    if !(y0 < y1) {
        let c = if y0.is_finite() { y0 } else { 0.0 };
        (y0, y1) = (c - 0.5, c + 0.5);
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(s, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    for line in stamp.lines() {
        let _ = writeln!(s, "<!-- {} -->", escape(line));
    }
    for (ser, p) in series.iter().zip(&pts) {
        let _ = writeln!(s, "<!-- series: {} ({} points, y{}) -->", escape(&ser.label), p.len(), if log_y { " as log10" } else { "" });
        let _ = writeln!(s, "<!-- x,y");
        for (x, y) in &ser.points {
            let _ = writeln!(s, "{x:e},{y:e}");
        }
        let _ = writeln!(s, "-->");
    }
    let _ = writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">");
    let _ = writeln!(s, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{}</text>",
        W / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        "<path d=\"M{m} {t} L{m} {b} L{r} {b}\" stroke=\"black\" fill=\"none\"/>",
        m = MARGIN,
        t = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let ylab = if log_y { format!("1e{yv:.1}") } else { format!("{yv:.3e}") };
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{xv:.3}</text>",
            sx(xv),
            H - MARGIN + 16.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{ylab}</text>",
            MARGIN - 4.0,
            sy(yv) + 4.0
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
        W / 2.0,
        H - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        "<text x=\"14\" y=\"{}\" transform=\"rotate(-90 14 {})\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}{}</text>",
        H / 2.0,
        H / 2.0,
        if log_y { "log10 " } else { "" },
        escape(y_label)
    );
    for (k, (ser, p)) in series.iter().zip(&pts).enumerate() {
        let color = COLORS[k % COLORS.len()];
        if !p.is_empty() {
            let d: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(s, "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>", d.join(" "));
        }
        let ly = MARGIN + 14.0 * k as f64;
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{ly:.1}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{}</text>",
            W - MARGIN - 150.0,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Data lines embedded by [`line_plot`], per series.
pub fn embedded_data(svg: &str) -> Vec<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    let mut cur: Option<Vec<(f64, f64)>> = None;
    for line in svg.lines() {
        if line == "<!-- x,y" {
            cur = Some(Vec::new());
        } else if line == "-->" {
            if let Some(v) = cur.take() {
                out.push(v);
            }
        } else if let Some(v) = cur.as_mut() {
            if let Some((a, b)) = line.split_once(',') {
                if let (Ok(x), Ok(y)) = (a.parse(), b.parse()) {
                    v.push((x, y));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn data_round_trips_through_comments() {
        let a = Series { label: "g".into(), points: vec![(0.0, 1.0), (1.0, 10.0), (2.0, 100.0)] };
        let b = Series { label: "bound".into(), points: vec![(0.0, 0.5), (2.0, -1.0)] };
        let svg = line_plot("t", "x", "y", &[a.clone(), b.clone()], true, "# config_hash: abc");
        assert!(svg.contains("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("<!-- # config_hash: abc -->"));
        assert_eq!(embedded_data(&svg), vec![a.points, b.points]);
    }

    #[test]
    fn degenerate_ranges_still_render() {
        let a = Series { label: "flat".into(), points: vec![(1.0, 3.0)] };
        let svg = line_plot("t", "x", "y", &[a], false, "");
        assert!(!svg.contains("NaN"));
    }
}
