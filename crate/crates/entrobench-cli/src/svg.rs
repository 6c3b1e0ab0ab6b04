//! Small standalone SVG line/errorbar chart writer. No external renderer;
//! the output is a self-contained `<svg>` document.

const WIDTH: f64 = 840.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 160.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineStyle {
    Solid,
    DashDot,
}

impl LineStyle {
    fn dash_attr(&self) -> &'static str {
        match self {
            LineStyle::Solid => "",
            LineStyle::DashDot => " stroke-dasharray=\"9 4 2 4\"",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Half-length of the vertical error bar per point.
    pub errors: Option<Vec<f64>>,
    pub style: LineStyle,
    pub markers: bool,
}

#[derive(Clone, Debug)]
pub struct RefLine {
    pub y: f64,
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub ref_lines: Vec<RefLine>,
}

impl Chart {
    pub fn render(&self) -> String {
        let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &self.series {
            for (i, &(x, y)) in s.points.iter().enumerate() {
                let e = s.errors.as_ref().map(|e| e[i]).unwrap_or(0.0);
                x_min = x_min.min(x);
                x_max = x_max.max(x);
                y_min = y_min.min(y - e);
                y_max = y_max.max(y + e);
            }
        }
        for r in &self.ref_lines {
            y_min = y_min.min(r.y);
            y_max = y_max.max(r.y);
        }
        if !x_min.is_finite() {
            x_min = 0.0;
            x_max = 1.0;
        }
        if x_max == x_min {
            x_max = x_min + 1.0;
        }
        if !y_min.is_finite() {
            y_min = 0.0;
            y_max = 1.0;
        }
        let pad = (y_max - y_min).max(1e-9) * 0.06;
        y_min -= pad;
        y_max += pad;

        let plot_w = WIDTH - MARGIN_L - MARGIN_R;
        let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
        let px = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * plot_w;
        let py = |y: f64| MARGIN_T + (y_max - y) / (y_max - y_min) * plot_h;

        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"13\">\n"
        ));
        out.push_str(&format!(
            "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
            MARGIN_L + plot_w / 2.0,
            escape(&self.title)
        ));

        // Axes box.
        out.push_str(&format!(
            "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w}\" height=\"{plot_h}\" \
             fill=\"none\" stroke=\"black\"/>\n"
        ));

        // Ticks.
        for i in 0..=5 {
            let f = i as f64 / 5.0;
            let xv = x_min + f * (x_max - x_min);
            let yv = y_min + f * (y_max - y_min);
            let xp = px(xv);
            let yp = py(yv);
            out.push_str(&format!(
                "<line x1=\"{xp}\" y1=\"{}\" x2=\"{xp}\" y2=\"{}\" stroke=\"black\"/>\n",
                MARGIN_T + plot_h,
                MARGIN_T + plot_h + 5.0
            ));
            out.push_str(&format!(
                "<text x=\"{xp}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                MARGIN_T + plot_h + 20.0,
                tick(xv)
            ));
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{yp}\" x2=\"{MARGIN_L}\" y2=\"{yp}\" stroke=\"black\"/>\n",
                MARGIN_L - 5.0
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
                MARGIN_L - 9.0,
                yp + 4.0,
                tick(yv)
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            MARGIN_L + plot_w / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        ));
        out.push_str(&format!(
            "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
            MARGIN_T + plot_h / 2.0,
            MARGIN_T + plot_h / 2.0,
            escape(&self.y_label)
        ));

        // Reference lines (dash-dot, black).
        for r in &self.ref_lines {
            let yp = py(r.y);
            out.push_str(&format!(
                "<line x1=\"{MARGIN_L}\" y1=\"{yp}\" x2=\"{}\" y2=\"{yp}\" stroke=\"black\"{}/>\n",
                MARGIN_L + plot_w,
                LineStyle::DashDot.dash_attr()
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>\n",
                MARGIN_L + 6.0,
                yp - 5.0,
                escape(&r.label)
            ));
        }

        // Series.
        for (si, s) in self.series.iter().enumerate() {
            let color = PALETTE[si % PALETTE.len()];
            if s.points.len() > 1 {
                let pts: Vec<String> = s
                    .points
                    .iter()
                    .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                    .collect();
                out.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"{}/>\n",
                    pts.join(" "),
                    s.style.dash_attr()
                ));
            }
            if let Some(errors) = &s.errors {
                for (&(x, y), &e) in s.points.iter().zip(errors) {
                    if e <= 0.0 {
                        continue;
                    }
                    let (xp, y0, y1) = (px(x), py(y - e), py(y + e));
                    out.push_str(&format!(
                        "<line x1=\"{xp}\" y1=\"{y0}\" x2=\"{xp}\" y2=\"{y1}\" stroke=\"{color}\"/>\n"
                    ));
                    for yy in [y0, y1] {
                        out.push_str(&format!(
                            "<line x1=\"{}\" y1=\"{yy}\" x2=\"{}\" y2=\"{yy}\" stroke=\"{color}\"/>\n",
                            xp - 3.0,
                            xp + 3.0
                        ));
                    }
                }
            }
            if s.markers {
                for &(x, y) in &s.points {
                    out.push_str(&format!(
                        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.6\" fill=\"{color}\"/>\n",
                        px(x),
                        py(y)
                    ));
                }
            }
            // Legend entry.
            let ly = MARGIN_T + 12.0 + 20.0 * si as f64;
            let lx = WIDTH - MARGIN_R + 12.0;
            out.push_str(&format!(
                "<line x1=\"{lx}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"1.6\"{}/>\n",
                lx + 22.0,
                s.style.dash_attr()
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\">{}</text>\n",
                lx + 28.0,
                ly + 4.0,
                escape(&s.label)
            ));
        }

        out.push_str("</svg>\n");
        out
    }
}

fn tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if a >= 1000.0 || a < 0.01 {
        format!("{v:.1e}")
    } else if a >= 10.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
