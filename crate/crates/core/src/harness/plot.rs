//! Bare-bones SVG scatter plots (gauge against accuracy).

use std::fmt::Write;

const W: f64 = 480.0;
const H: f64 = 360.0;
const MARGIN: f64 = 56.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn span(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

pub fn scatter_svg(points: &[(f64, f64)], x_label: &str, y_label: &str) -> String {
    let pts: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
    let (x0, x1) = span(pts.iter().map(|p| p.0));
    let (y0, y1) = span(pts.iter().map(|p| p.1));
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 1.5 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 1.5 * MARGIN);
    let mut s = String::new();
    writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">").unwrap();
    writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>").unwrap();
    writeln!(
        s,
        "<path d=\"M{m} {t} V{b} H{r}\" stroke=\"black\" fill=\"none\"/>",
        m = MARGIN,
        t = MARGIN / 2.0,
        b = H - MARGIN,
        r = W - MARGIN / 2.0
    )
    .unwrap();
    for (v, anchor_x, anchor_y) in [(x0, px(x0), H - MARGIN + 16.0), (x1, px(x1), H - MARGIN + 16.0)] {
        writeln!(s, "<text x=\"{anchor_x:.1}\" y=\"{anchor_y:.1}\" font-size=\"11\" text-anchor=\"middle\">{v:.3}</text>").unwrap();
    }
    for v in [y0, y1] {
        writeln!(s, "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{v:.3}</text>", MARGIN - 4.0, py(v) + 4.0).unwrap();
    }
    writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
        (MARGIN + W - MARGIN / 2.0) / 2.0,
        H - 12.0,
        escape(x_label)
    )
    .unwrap();
    writeln!(
        s,
        "<text x=\"16\" y=\"{y:.1}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {y:.1})\">{}</text>",
        escape(y_label),
        y = (MARGIN / 2.0 + H - MARGIN) / 2.0
    )
    .unwrap();
    for &(x, y) in &pts {
        writeln!(s, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"steelblue\" fill-opacity=\"0.6\"/>", px(x), py(y)).unwrap();
    }
    s.push_str("</svg>\n");
    s
}
