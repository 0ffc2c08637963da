//! Self-contained SVG charts for experiment output: no plotting dependency,
//! deterministic text, labeled axes. Three kinds are supported: model
//! success curves against log2(n) (one per beam width), per-run solve
//! traces (truth-prefix rank and normalized mean score), and success
//! against the strand count.

use crate::harness::{success_by_cell, TrialRecord};
use crate::stats::{predict_from_log2, LogisticModel};

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub draw_points: bool,
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Fixed y range; autoscaled when absent.
    pub y_range: Option<(f64, f64)>,
}

impl Chart {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Chart {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            series: Vec::new(),
            y_range: None,
        }
    }

    pub fn render_svg(&self, width: u32, height: u32) -> String {
        let w = width as f64;
        let h = height as f64;
        let margin_left = 64.0;
        let margin_right = 150.0;
        let margin_top = 40.0;
        let margin_bottom = 56.0;
        let plot_w = w - margin_left - margin_right;
        let plot_h = h - margin_top - margin_bottom;

        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for s in &self.series {
            for &(x, y) in &s.points {
                xs.push(x);
                ys.push(y);
            }
        }
        let (x_min, x_max) = span(&xs);
        let (y_min, y_max) = self.y_range.unwrap_or_else(|| span(&ys));
        let x_ticks = nice_ticks(x_min, x_max, 8);
        let y_ticks = nice_ticks(y_min, y_max, 6);
        let (x_min, x_max) = tick_span(&x_ticks, x_min, x_max);
        let (y_min, y_max) = tick_span(&y_ticks, y_min, y_max);

        let px = |x: f64| margin_left + (x - x_min) / (x_max - x_min).max(1e-12) * plot_w;
        let py = |y: f64| margin_top + plot_h - (y - y_min) / (y_max - y_min).max(1e-12) * plot_h;

        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
        ));
        svg.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
            margin_left + plot_w / 2.0,
            escape(&self.title)
        ));

        // Grid, ticks and tick labels.
        for &t in &x_ticks {
            let x = px(t);
            svg.push_str(&format!(
                "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
                margin_top,
                margin_top + plot_h
            ));
            svg.push_str(&format!(
                "<text x=\"{x:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
                margin_top + plot_h + 18.0,
                fmt_tick(t)
            ));
        }
        for &t in &y_ticks {
            let y = py(t);
            svg.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
                margin_left,
                margin_left + plot_w
            ));
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
                margin_left - 8.0,
                y + 4.0,
                fmt_tick(t)
            ));
        }
        // Axes.
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
            margin_left,
            margin_top + plot_h,
            margin_left + plot_w,
            margin_top + plot_h
        ));
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
            margin_left, margin_top, margin_left, margin_top + plot_h
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
            margin_left + plot_w / 2.0,
            h - 14.0,
            escape(&self.x_label)
        ));
        svg.push_str(&format!(
            "<text x=\"18\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">{}</text>\n",
            margin_top + plot_h / 2.0,
            margin_top + plot_h / 2.0,
            escape(&self.y_label)
        ));

        // Series.
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            if s.points.len() > 1 {
                let path: Vec<String> = s
                    .points
                    .iter()
                    .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                    .collect();
                svg.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\"/>\n",
                    path.join(" "),
                    color
                ));
            }
            if s.draw_points || s.points.len() == 1 {
                for &(x, y) in &s.points {
                    svg.push_str(&format!(
                        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{}\"/>\n",
                        px(x),
                        py(y),
                        color
                    ));
                }
            }
            // Legend entry.
            let ly = margin_top + 16.0 * i as f64;
            let lx = margin_left + plot_w + 12.0;
            svg.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\" stroke-width=\"3\"/>\n",
                lx,
                ly,
                lx + 18.0,
                ly,
                color
            ));
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
                lx + 24.0,
                ly + 4.0,
                escape(&s.label)
            ));
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn span(values: &[f64]) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if !min.is_finite() || !max.is_finite() {
        return (0.0, 1.0);
    }
    if (max - min).abs() < 1e-12 {
        (min - 0.5, max + 0.5)
    } else {
        (min, max)
    }
}

/// Round tick positions at a 1-2-5 step.
fn nice_ticks(min: f64, max: f64, target: usize) -> Vec<f64> {
    let raw_step = (max - min) / target.max(1) as f64;
    let mag = 10f64.powf(raw_step.abs().max(1e-12).log10().floor());
    let norm = raw_step / mag;
    let step = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    } * mag;
    let first = (min / step).floor() * step;
    let mut ticks = Vec::new();
    let mut t = first;
    while t <= max + step * 0.51 {
        if t >= min - step * 0.51 {
            ticks.push(t);
        }
        t += step;
    }
    ticks
}

fn tick_span(ticks: &[f64], min: f64, max: f64) -> (f64, f64) {
    match (ticks.first(), ticks.last()) {
        (Some(&a), Some(&b)) => (a.min(min), b.max(max)),
        _ => (min, max),
    }
}

fn fmt_tick(t: f64) -> String {
    if (t - t.round()).abs() < 1e-9 && t.abs() < 1e7 {
        format!("{}", t.round() as i64)
    } else {
        format!("{:.2}", t)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Model success curves against `log2(n)`, one per beam width, at fixed
/// `m` and `k`. Observed per-cell fractions matching `(m, k, M)` are
/// overlaid as points when records are given.
pub fn success_curves_chart(
    model: &LogisticModel,
    m: u32,
    k: u32,
    l: u32,
    beam_widths: &[u32],
    records: &[TrialRecord],
) -> Chart {
    let mut chart = Chart::new(
        &format!("Success probability vs log2(n), m={}, k={}", m, k),
        "log2(n)",
        "success probability",
    );
    chart.y_range = Some((0.0, 1.0));
    let x1 = (m as f64).log2();
    let x3 = (k as f64).log2();
    let x4 = (l as f64).log2();
    for &beam in beam_widths {
        let x5 = (beam as f64).log2();
        let mut points = Vec::new();
        let mut x2 = 1.0f64;
        while x2 <= 8.0 + 1e-9 {
            points.push((x2, predict_from_log2(model, [x1, x2, x3, x4, x5])));
            x2 += 0.25;
        }
        chart.series.push(Series {
            label: format!("M={}", beam),
            points,
            draw_points: false,
        });
    }
    for &beam in beam_widths {
        let observed: Vec<(f64, f64)> = success_by_cell(records)
            .into_iter()
            .filter(|((_, rm, _, rk, _, rmm), _, _)| *rm == m && *rk == k && *rmm == beam)
            .map(|((_, _, n, _, _, _), wins, total)| {
                ((n as f64).log2(), wins as f64 / total as f64)
            })
            .collect();
        if !observed.is_empty() {
            chart.series.push(Series {
                label: format!("observed M={}", beam),
                points: observed,
                draw_points: true,
            });
        }
    }
    chart
}

/// One row of a solve trace file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    pub best: u64,
    pub mean: f64,
    pub worst: u64,
    /// 0 means the truth prefix has dropped out of the beam.
    pub truth_rank: Option<usize>,
}

pub const TRACE_HEADER: &str = "step,best,mean,worst,truth_rank";

pub fn render_trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.3},{},{}\n",
            r.step,
            r.best,
            r.mean,
            r.worst,
            r.truth_rank.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
        ));
    }
    out
}

pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRow>, String> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == TRACE_HEADER {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(format!("line {}: expected 5 fields", lineno + 1));
        }
        let bad = |what: &str| format!("line {}: bad {}", lineno + 1, what);
        rows.push(TraceRow {
            step: fields[0].parse().map_err(|_| bad("step"))?,
            best: fields[1].parse().map_err(|_| bad("best"))?,
            mean: fields[2].parse().map_err(|_| bad("mean"))?,
            worst: fields[3].parse().map_err(|_| bad("worst"))?,
            truth_rank: if fields[4] == "-" {
                None
            } else {
                Some(fields[4].parse().map_err(|_| bad("truth_rank"))?)
            },
        });
    }
    Ok(rows)
}

/// Per-run trace chart: the truth-prefix rank and the mean beam score,
/// normalized onto the rank scale for joint display.
pub fn trace_chart(rows: &[TraceRow]) -> Chart {
    let mut chart = Chart::new(
        "Correct-prefix position and mean score per step",
        "step",
        "rank / normalized score",
    );
    let rank_points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.step as f64, r.truth_rank.unwrap_or(0) as f64))
        .collect();
    let max_rank = rank_points.iter().map(|&(_, y)| y).fold(1.0, f64::max);
    let max_mean = rows.iter().map(|r| r.mean).fold(1e-12, f64::max);
    let mean_points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.step as f64, r.mean / max_mean * max_rank))
        .collect();
    chart.series.push(Series {
        label: "truth prefix rank".into(),
        points: rank_points,
        draw_points: true,
    });
    chart.series.push(Series {
        label: "mean score (scaled)".into(),
        points: mean_points,
        draw_points: false,
    });
    chart
}

/// Success fraction against the strand count, one series per non-N cell.
pub fn strand_sweep_chart(records: &[TrialRecord]) -> Chart {
    let mut chart = Chart::new("Success probability vs strand count", "N", "success fraction");
    chart.y_range = Some((0.0, 1.0));
    let mut groups: Vec<(u32, u32, u32, u32, u32)> = records
        .iter()
        .map(|r| {
            (
                r.generators,
                r.secret_length,
                r.equations,
                r.word_length,
                r.beam_width,
            )
        })
        .collect();
    groups.sort_unstable();
    groups.dedup();
    for group in groups {
        let mut points: Vec<(f64, f64)> = success_by_cell(records)
            .into_iter()
            .filter(|((_, m, n, k, l, beam), _, _)| (*m, *n, *k, *l, *beam) == group)
            .map(|((strands, ..), wins, total)| (strands as f64, wins as f64 / total as f64))
            .collect();
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        chart.series.push(Series {
            label: format!(
                "({},{},{},{},{})",
                group.0, group.1, group.2, group.3, group.4
            ),
            points,
            draw_points: true,
        });
    }
    chart
}
