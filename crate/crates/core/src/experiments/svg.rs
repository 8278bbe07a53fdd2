//! Minimal line charts. Output depends only on the data, so it is byte-stable.

use std::fmt::Write as _;

use super::csv::fmt_num;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

pub struct Series {
    pub label: String,
    pub y: Vec<f64>,
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

fn nice_range(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = lo.abs().max(1.0) * 0.05;
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

/// Renders `series` against `x`. With `log_x` the axis is log10 and
/// nonpositive x values are dropped.
pub fn line_chart(title: &str, x_label: &str, x: &[f64], series: &[Series], log_x: bool) -> String {
    let tx = |v: f64| if log_x { v.log10() } else { v };
    let mut order: Vec<usize> = (0..x.len()).filter(|&i| !log_x || x[i] > 0.0).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));

    let xs: Vec<f64> = order.iter().map(|&i| tx(x[i])).collect();
    let ys = series
        .iter()
        .flat_map(|s| order.iter().map(move |&i| s.y[i]))
        .filter(|v| v.is_finite());
    let (y_lo, y_hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    let (y0, y1) = nice_range(y_lo, y_hi);
    let (x0, x1) = match (xs.first(), xs.last()) {
        (Some(&a), Some(&b)) if b > a => (a, b),
        (Some(&a), _) => (a - 0.5, a + 0.5),
        _ => (0.0, 1.0),
    };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |v: f64| LEFT + (v - x0) / (x1 - x0) * plot_w;
    let sy = |v: f64| TOP + (y1 - v) / (y1 - y0) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="14" text-anchor="middle" font-size="13">{}</text>"#,
        px(LEFT + plot_w / 2.0),
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        px(LEFT),
        px(TOP),
        px(plot_w),
        px(plot_h)
    );

    // x ticks: decades on a log axis, five even steps otherwise.
    let x_ticks: Vec<(f64, String)> = if log_x {
        (x0.ceil() as i64..=x1.floor() as i64)
            .map(|k| (k as f64, format!("1e{k}")))
            .collect()
    } else {
        (0..=4)
            .map(|k| {
                let v = x0 + (x1 - x0) * k as f64 / 4.0;
                (v, fmt_num((v * 1e6).round() / 1e6))
            })
            .collect()
    };
    for (v, label) in x_ticks {
        let x = px(sx(v));
        let base = TOP + plot_h;
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="black"/><text x="{x}" y="{}" text-anchor="middle">{label}</text>"#,
            px(base),
            px(base + 5.0),
            px(base + 18.0)
        );
    }
    for k in 0..=4 {
        let v = y0 + (y1 - y0) * k as f64 / 4.0;
        let y = px(sy(v));
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="black"/><text x="{}" y="{y}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            px(LEFT - 5.0),
            px(LEFT),
            px(LEFT - 8.0),
            fmt_num((v * 1e4).round() / 1e4)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        px(LEFT + plot_w / 2.0),
        px(HEIGHT - 10.0),
        escape(x_label)
    );

    for (k, ser) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let points: Vec<String> = order
            .iter()
            .zip(&xs)
            .filter(|(&i, _)| ser.y[i].is_finite())
            .map(|(&i, &xv)| format!("{},{}", px(sx(xv)), px(sy(ser.y[i]))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        for p in &points {
            let (cx, cy) = p.split_once(',').expect("point");
            let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="2.5" fill="{color}"/>"#);
        }
        let ly = TOP + 10.0 + 16.0 * k as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{ly}" dominant-baseline="middle">{}</text>"#,
            px(lx),
            px(lx + 18.0),
            px(lx + 24.0),
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_well_formed() {
        let x = [100.0, 10.0, 1000.0];
        let series = [Series {
            label: "xi_b".into(),
            y: vec![2.0, 1.0, 3.0],
        }];
        let a = line_chart("t", "alpha_A_P", &x, &series, true);
        assert_eq!(a, line_chart("t", "alpha_A_P", &x, &series, true));
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        assert_eq!(a.matches("<circle").count(), 3);
        assert!(a.contains(">1e2<"));
        // Points are drawn in increasing x order.
        let poly = a.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let xs: Vec<f64> = poly
            .split("points=\"")
            .nth(1)
            .unwrap()
            .trim_end_matches("\"/>")
            .split(' ')
            .map(|p| p.split(',').next().unwrap().parse().unwrap())
            .collect();
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn constant_series() {
        let svg = line_chart(
            "c",
            "v_B",
            &[0.0, 1.0],
            &[Series {
                label: "gap".into(),
                y: vec![0.0, 0.0],
            }],
            false,
        );
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}
