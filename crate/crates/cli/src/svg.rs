//! Self-contained SVG line plots: axis box, ticks, polylines, legend.
//! No plotting dependency; the output is a convenience view of the CSVs.

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 560.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 28.0;
const MARGIN_B: f64 = 56.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub curves: Vec<Curve>,
}

fn tx(x: f64) -> String {
    // short fixed form keeps files compact and stable
    format!("{x:.2}")
}

fn axis_value(v: f64, log: bool) -> f64 {
    if log {
        v.log10()
    } else {
        v
    }
}

fn nice_linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    if span <= 0.0 {
        return vec![lo];
    }
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm < 1.5 {
        mag
    } else if norm < 3.5 {
        2.0 * mag
    } else if norm < 7.5 {
        5.0 * mag
    } else {
        10.0 * mag
    };
    let first = (lo / step).ceil() * step;
    let mut ticks = Vec::new();
    let mut t = first;
    while t <= hi + 1e-9 * step {
        ticks.push(t);
        t += step;
    }
    ticks
}

fn tick_label(v: f64, log: bool) -> String {
    if log {
        return format!("1e{}", v.round() as i64);
    }
    if v == 0.0 {
        return "0".into();
    }
    if v.abs() >= 0.01 && v.abs() < 10000.0 {
        let s = format!("{v:.3}");
        let trimmed = s.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    } else {
        format!("{v:.1e}")
    }
}

/// Renders one panel with overlaid curves.
pub fn render(panel: &Panel) -> String {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for c in &panel.curves {
        for &(x, y) in &c.points {
            if panel.log_x && x <= 0.0 {
                continue;
            }
            if panel.log_y && y <= 0.0 {
                continue;
            }
            let (ax, ay) = (axis_value(x, panel.log_x), axis_value(y, panel.log_y));
            if ax.is_finite() && ay.is_finite() {
                pts.push((ax, ay));
            }
        }
    }
    let (mut x_lo, mut x_hi) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.0), hi.max(p.0))
        });
    let (mut y_lo, mut y_hi) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.1), hi.max(p.1))
        });
    if !x_lo.is_finite() {
        x_lo = 0.0;
        x_hi = 1.0;
    }
    if !y_lo.is_finite() {
        y_lo = 0.0;
        y_hi = 1.0;
    }
    if x_hi - x_lo < 1e-12 {
        x_hi = x_lo + 1.0;
    }
    if y_hi - y_lo < 1e-12 {
        y_hi = y_lo + 1.0;
    }
    let pad_y = 0.04 * (y_hi - y_lo);
    y_lo -= pad_y;
    y_hi += pad_y;

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = move |ax: f64| MARGIN_L + (ax - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = move |ay: f64| MARGIN_T + (y_hi - ay) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"13\">\n"
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        tx(MARGIN_L),
        tx(MARGIN_T),
        tx(plot_w),
        tx(plot_h)
    ));

    // ticks
    let x_ticks = if panel.log_x {
        (x_lo.ceil() as i64..=x_hi.floor() as i64)
            .map(|k| k as f64)
            .collect()
    } else {
        nice_linear_ticks(x_lo, x_hi)
    };
    for t in &x_ticks {
        let px = sx(*t);
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
            tx(px),
            tx(MARGIN_T + plot_h),
            tx(MARGIN_T + plot_h + 6.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            tx(px),
            tx(MARGIN_T + plot_h + 22.0),
            tick_label(*t, panel.log_x)
        ));
    }
    let y_ticks = if panel.log_y {
        (y_lo.ceil() as i64..=y_hi.floor() as i64)
            .map(|k| k as f64)
            .collect()
    } else {
        nice_linear_ticks(y_lo, y_hi)
    };
    for t in &y_ticks {
        let py = sy(*t);
        svg.push_str(&format!(
            "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"black\"/>\n",
            tx(py),
            tx(MARGIN_L - 6.0),
            tx(MARGIN_L)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" dominant-baseline=\"middle\">{}</text>\n",
            tx(MARGIN_L - 10.0),
            tx(py),
            tick_label(*t, panel.log_y)
        ));
    }

    // axis labels and title
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        tx(MARGIN_L + plot_w / 2.0),
        tx(HEIGHT - 12.0),
        panel.x_label
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        tx(MARGIN_T + plot_h / 2.0),
        tx(MARGIN_T + plot_h / 2.0),
        panel.y_label
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"18\" text-anchor=\"middle\" font-weight=\"bold\">{}</text>\n",
        tx(MARGIN_L + plot_w / 2.0),
        panel.title
    ));

    // curves
    for (i, curve) in panel.curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut path = String::new();
        for &(x, y) in &curve.points {
            if panel.log_x && x <= 0.0 || panel.log_y && y <= 0.0 {
                continue;
            }
            let (ax, ay) = (axis_value(x, panel.log_x), axis_value(y, panel.log_y));
            if !ax.is_finite() || !ay.is_finite() {
                continue;
            }
            if !path.is_empty() {
                path.push(' ');
            }
            path.push_str(&format!("{},{}", tx(sx(ax)), tx(sy(ay))));
        }
        svg.push_str(&format!(
            "<polyline points=\"{path}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n"
        ));
        let ly = MARGIN_T + 18.0 + 18.0 * i as f64;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
            tx(MARGIN_L + plot_w - 150.0),
            tx(ly),
            tx(MARGIN_L + plot_w - 120.0),
            tx(ly),
            color
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" dominant-baseline=\"middle\">{}</text>\n",
            tx(MARGIN_L + plot_w - 112.0),
            tx(ly),
            curve.label
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
