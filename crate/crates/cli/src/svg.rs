//! Minimal self-contained SVG line plots: stacked panels of polylines with
//! optional markers and reference lines. All coordinates are formatted with
//! fixed precision so identical inputs yield identical bytes.

const PANEL_WIDTH: f64 = 880.0;
const PANEL_HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 86.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 64.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineStyle {
    Solid,
    Dashed,
    Markers,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: LineStyle,
    pub color: usize,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub series: Vec<Series>,
    /// Vertical reference lines at the given x positions.
    pub vlines: Vec<(f64, String)>,
    /// Horizontal reference lines at the given y positions.
    pub hlines: Vec<(f64, String)>,
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if !(0.01..10000.0).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

struct Scale {
    min: f64,
    max: f64,
    lo_px: f64,
    hi_px: f64,
    log: bool,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        let frac = (v - self.min) / (self.max - self.min);
        self.lo_px + frac * (self.hi_px - self.lo_px)
    }
}

fn data_range(panel: &Panel) -> ((f64, f64), (f64, f64)) {
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for s in &panel.series {
        for &(x, y) in &s.points {
            if x.is_finite() && y.is_finite() {
                xs.push(x);
                ys.push(y);
            }
        }
    }
    for (x, _) in &panel.vlines {
        xs.push(*x);
    }
    for (y, _) in &panel.hlines {
        ys.push(*y);
    }
    let fold = |v: &[f64]| {
        (
            v.iter().cloned().fold(f64::INFINITY, f64::min),
            v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        )
    };
    (fold(&xs), fold(&ys))
}

fn render_panel(out: &mut String, panel: &Panel, y_offset: f64) {
    let ((x_min, x_max), (y_min, y_max)) = data_range(panel);
    let (x_min, x_max) = if panel.log_x {
        (x_min.log10(), x_max.log10())
    } else {
        (x_min, x_max)
    };
    let x_pad = (x_max - x_min).max(1e-12) * 0.03;
    let y_pad = (y_max - y_min).max(1e-12) * 0.06;
    let x = Scale {
        min: x_min - x_pad,
        max: x_max + x_pad,
        lo_px: MARGIN_LEFT,
        hi_px: PANEL_WIDTH - MARGIN_RIGHT,
        log: false,
    };
    let y = Scale {
        min: y_min - y_pad,
        max: y_max + y_pad,
        lo_px: y_offset + PANEL_HEIGHT - MARGIN_BOTTOM,
        hi_px: y_offset + MARGIN_TOP,
        log: false,
    };
    let map_x = |v: f64| {
        if panel.log_x {
            x.map(v.log10())
        } else {
            x.map(v)
        }
    };

    let plot_top = y_offset + MARGIN_TOP;
    let plot_bottom = y_offset + PANEL_HEIGHT - MARGIN_BOTTOM;
    out.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
        px(MARGIN_LEFT),
        px(plot_top),
        px(PANEL_WIDTH - MARGIN_LEFT - MARGIN_RIGHT),
        px(plot_bottom - plot_top),
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"17\" text-anchor=\"middle\" font-weight=\"bold\">{}</text>\n",
        px(PANEL_WIDTH / 2.0),
        px(y_offset + 26.0),
        panel.title
    ));

    // Axis ticks: decades on a log axis, five even ticks otherwise.
    let x_ticks: Vec<f64> = if panel.log_x {
        let lo = x.min.ceil() as i32;
        let hi = x.max.floor() as i32;
        (lo..=hi).map(|p| 10f64.powi(p)).collect()
    } else {
        (0..5)
            .map(|i| x.min + (x.max - x.min) * i as f64 / 4.0)
            .collect()
    };
    for t in x_ticks {
        let xx = map_x(t);
        out.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#333\"/>\n",
            px(xx),
            px(plot_bottom),
            px(plot_bottom + 6.0)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
            px(xx),
            px(plot_bottom + 22.0),
            tick_label(t)
        ));
    }
    for i in 0..5 {
        let t = y.min + (y.max - y.min) * f64::from(i) / 4.0;
        let yy = y.map(t);
        out.push_str(&format!(
            "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#333\"/>\n",
            px(yy),
            px(MARGIN_LEFT - 6.0),
            px(MARGIN_LEFT)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"end\">{}</text>\n",
            px(MARGIN_LEFT - 10.0),
            px(yy + 4.0),
            tick_label(t)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        px((MARGIN_LEFT + PANEL_WIDTH - MARGIN_RIGHT) / 2.0),
        px(plot_bottom + 46.0),
        panel.x_label
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"15\" text-anchor=\"middle\" transform=\"rotate(-90 {} {})\">{}</text>\n",
        px(24.0),
        px((plot_top + plot_bottom) / 2.0),
        px(24.0),
        px((plot_top + plot_bottom) / 2.0),
        panel.y_label
    ));

    for (v, label) in &panel.vlines {
        let xx = map_x(*v);
        out.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#666\" stroke-dasharray=\"3,3\"/>\n",
            px(xx),
            px(plot_top),
            px(plot_bottom)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"#666\" text-anchor=\"middle\">{}</text>\n",
            px(xx),
            px(plot_top - 4.0),
            label
        ));
    }
    for (v, label) in &panel.hlines {
        let yy = y.map(*v);
        out.push_str(&format!(
            "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#666\" stroke-dasharray=\"3,3\"/>\n",
            px(yy),
            px(MARGIN_LEFT),
            px(PANEL_WIDTH - MARGIN_RIGHT)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"#666\" text-anchor=\"start\">{}</text>\n",
            px(MARGIN_LEFT + 4.0),
            px(yy - 5.0),
            label
        ));
    }

    for s in &panel.series {
        let color = PALETTE[s.color % PALETTE.len()];
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|&(a, b)| (map_x(a), y.map(b)))
            .collect();
        match s.style {
            LineStyle::Markers => {
                for (xx, yy) in &pts {
                    out.push_str(&format!(
                        "<circle cx=\"{}\" cy=\"{}\" r=\"4.5\" fill=\"{}\"/>\n",
                        px(*xx),
                        px(*yy),
                        color
                    ));
                }
            }
            style => {
                let coords: Vec<String> =
                    pts.iter().map(|(xx, yy)| format!("{},{}", px(*xx), px(*yy))).collect();
                let dash = if style == LineStyle::Dashed {
                    " stroke-dasharray=\"7,5\""
                } else {
                    ""
                };
                out.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"{}/>\n",
                    coords.join(" "),
                    color,
                    dash
                ));
            }
        }
    }

    // Legend in the top-right corner of the plot area.
    for (i, s) in panel.series.iter().enumerate() {
        let color = PALETTE[s.color % PALETTE.len()];
        let ly = plot_top + 18.0 + 19.0 * i as f64;
        let lx = PANEL_WIDTH - MARGIN_RIGHT - 220.0;
        match s.style {
            LineStyle::Markers => out.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"4.5\" fill=\"{}\"/>\n",
                px(lx + 14.0),
                px(ly - 4.0),
                color
            )),
            style => {
                let dash = if style == LineStyle::Dashed {
                    " stroke-dasharray=\"7,5\""
                } else {
                    ""
                };
                out.push_str(&format!(
                    "<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"{3}\" stroke-width=\"2\"{4}/>\n",
                    px(lx),
                    px(lx + 28.0),
                    px(ly - 4.0),
                    color,
                    dash
                ));
            }
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"13\">{}</text>\n",
            px(lx + 34.0),
            px(ly),
            s.label
        ));
    }
}

pub fn render(panels: &[Panel]) -> String {
    let height = PANEL_HEIGHT * panels.len() as f64;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" \
         viewBox=\"0 0 {} {}\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        px(PANEL_WIDTH),
        px(height),
        px(PANEL_WIDTH),
        px(height)
    );
    for (i, panel) in panels.iter().enumerate() {
        render_panel(&mut out, panel, PANEL_HEIGHT * i as f64);
    }
    out.push_str("</svg>\n");
    out
}
