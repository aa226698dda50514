//! Static SVG plot of a sweep: empirical mean ratios with confidence
//! intervals against the bound curve, one series pair per tau value, over
//! beta on the x axis. Hand-rolled so that identical inputs produce
//! identical bytes.

use std::fmt::Write as _;

use super::PointEstimate;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 160.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

fn c(x: f64) -> String {
    format!("{:.2}", x)
}

/// Renders the plot to an SVG string. Returns `None` when there is nothing
/// finite to draw.
pub fn render_plot(estimates: &[PointEstimate], title: &str) -> Option<String> {
    if estimates.is_empty() {
        return None;
    }
    let mut taus: Vec<f64> = estimates.iter().map(|e| e.tau).collect();
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    let mut betas: Vec<f64> = estimates.iter().map(|e| e.beta).collect();
    betas.sort_by(f64::total_cmp);
    betas.dedup();

    let (x_min, x_max) = (betas[0], *betas.last().unwrap());
    let x_span = if x_max > x_min { x_max - x_min } else { 1.0 };
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for e in estimates {
        for v in [Some(e.mean_ratio), e.ci.map(|c| c.0), e.ci.map(|c| c.1), Some(e.bound)]
            .into_iter()
            .flatten()
        {
            if v.is_finite() {
                y_min = y_min.min(v);
                y_max = y_max.max(v);
            }
        }
    }
    if !y_min.is_finite() {
        return None;
    }
    let pad = 0.08 * (y_max - y_min).max(0.1);
    let (y_min, y_max) = (y_min - pad, y_max + pad);

    let px = |b: f64| MARGIN_L + (b - x_min) / x_span * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |v: f64| HEIGHT - MARGIN_B - (v - y_min) / (y_max - y_min) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"monospace\" font-size=\"12\">\n"
    )
    .unwrap();
    write!(svg, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n").unwrap();
    write!(
        svg,
        "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        c((MARGIN_L + WIDTH - MARGIN_R) / 2.0),
        title
    )
    .unwrap();
    // axes
    write!(
        svg,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        c(MARGIN_L),
        c(MARGIN_T),
        c(WIDTH - MARGIN_L - MARGIN_R),
        c(HEIGHT - MARGIN_T - MARGIN_B)
    )
    .unwrap();
    for i in 0..=4 {
        let frac = i as f64 / 4.0;
        let bx = x_min + frac * x_span;
        let vy = y_min + frac * (y_max - y_min);
        write!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            c(px(bx)),
            c(HEIGHT - MARGIN_B + 18.0),
            super::fmt_sig((bx * 1000.0).round() / 1000.0)
        )
        .unwrap();
        write!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            c(MARGIN_L - 6.0),
            c(py(vy) + 4.0),
            super::fmt_sig((vy * 1000.0).round() / 1000.0)
        )
        .unwrap();
    }
    write!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">beta</text>\n",
        c((MARGIN_L + WIDTH - MARGIN_R) / 2.0),
        c(HEIGHT - 12.0)
    )
    .unwrap();

    let mut legend_y = MARGIN_T + 10.0;
    for (ti, &tau) in taus.iter().enumerate() {
        let color = PALETTE[ti % PALETTE.len()];
        let series: Vec<&PointEstimate> = betas
            .iter()
            .filter_map(|&b| estimates.iter().find(|e| e.beta == b && e.tau == tau))
            .collect();
        let line: Vec<String> =
            series.iter().map(|e| format!("{},{}", c(px(e.beta)), c(py(e.mean_ratio)))).collect();
        write!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
            line.join(" "),
            color
        )
        .unwrap();
        for e in &series {
            if let Some((lo, hi)) = e.ci {
                write!(
                    svg,
                    "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"{3}\"/>\n",
                    c(px(e.beta)),
                    c(py(lo)),
                    c(py(hi)),
                    color
                )
                .unwrap();
            }
            write!(
                svg,
                "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"{}\"/>\n",
                c(px(e.beta)),
                c(py(e.mean_ratio)),
                color
            )
            .unwrap();
        }
        let bound_pts: Vec<String> = series
            .iter()
            .filter(|e| e.bound.is_finite())
            .map(|e| format!("{},{}", c(px(e.beta)), c(py(e.bound))))
            .collect();
        if bound_pts.len() >= 2 {
            write!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1\" \
                 stroke-dasharray=\"5,3\"/>\n",
                bound_pts.join(" "),
                color
            )
            .unwrap();
        }
        write!(
            svg,
            "<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"{3}\" stroke-width=\"1.5\"/>\n",
            c(WIDTH - MARGIN_R + 10.0),
            c(WIDTH - MARGIN_R + 30.0),
            c(legend_y - 4.0),
            color
        )
        .unwrap();
        write!(
            svg,
            "<text x=\"{}\" y=\"{}\">tau={} (dashed: bound)</text>\n",
            c(WIDTH - MARGIN_R + 36.0),
            c(legend_y),
            super::fmt_sig((tau * 1000.0).round() / 1000.0)
        )
        .unwrap();
        legend_y += 18.0;
    }
    svg.push_str("</svg>\n");
    Some(svg)
}

/// Writes the sweep plot to `path`.
pub fn emit_plot(
    estimates: &[PointEstimate],
    title: &str,
    path: &std::path::Path,
) -> std::io::Result<()> {
    let svg = render_plot(estimates, title).unwrap_or_else(|| {
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1\" height=\"1\"/>\n".to_string()
    });
    std::fs::write(path, svg)
}
