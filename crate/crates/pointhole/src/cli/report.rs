//! Dependency-free SVG line plots and the text summary of fitted rates.

use crate::harness::RateFit;

pub struct Series {
    pub label: String,
    /// (x, y) in data coordinates
    pub points: Vec<(f64, f64)>,
}

/// Write a simple line plot with labelled axes. Points are drawn as
/// polylines in a log-log-friendly pre-transformed coordinate system: the
/// caller passes already-transformed coordinates.
pub fn write_svg_plot<W: std::io::Write>(
    w: &mut W,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
) -> std::io::Result<()> {
    let width = 640.0;
    let height = 440.0;
    let ml = 70.0;
    let mr = 160.0;
    let mt = 40.0;
    let mb = 55.0;
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for &(x, y) in &s.points {
            if x.is_finite() && y.is_finite() {
                xmin = xmin.min(x);
                xmax = xmax.max(x);
                ymin = ymin.min(y);
                ymax = ymax.max(y);
            }
        }
    }
    if !xmin.is_finite() {
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    if (xmax - xmin).abs() < 1e-12 {
        xmax = xmin + 1.0;
    }
    if (ymax - ymin).abs() < 1e-12 {
        ymax = ymin + 1.0;
    }
    let sx = |x: f64| ml + (x - xmin) / (xmax - xmin) * (width - ml - mr);
    let sy = |y: f64| height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
    writeln!(
        w,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    )?;
    writeln!(w, "<rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>")?;
    writeln!(
        w,
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>",
        (ml + width - mr) / 2.0,
        title
    )?;
    // axes
    writeln!(
        w,
        "<line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        height - mb,
        width - mr,
        height - mb
    )?;
    writeln!(
        w,
        "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>",
        height - mb
    )?;
    writeln!(
        w,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
        (ml + width - mr) / 2.0,
        height - 14.0,
        x_label
    )?;
    writeln!(
        w,
        "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>",
        (mt + height - mb) / 2.0,
        (mt + height - mb) / 2.0,
        y_label
    )?;
    // tick labels at the corners
    for (x, anchor) in [(xmin, "start"), (xmax, "end")] {
        writeln!(
            w,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"{anchor}\">{:.3}</text>",
            sx(x),
            height - mb + 16.0,
            x
        )?;
    }
    for y in [ymin, ymax] {
        writeln!(
            w,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{:.3}</text>",
            ml - 6.0,
            sy(y) + 4.0,
            y
        )?;
    }
    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    for (i, s) in series.iter().enumerate() {
        let color = palette[i % palette.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        writeln!(
            w,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            pts.join(" ")
        )?;
        for &(x, y) in s.points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
            writeln!(
                w,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{color}\"/>",
                sx(x),
                sy(y)
            )?;
        }
        writeln!(
            w,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{}</text>",
            width - mr + 10.0,
            mt + 18.0 * i as f64 + 10.0,
            s.label
        )?;
    }
    writeln!(w, "</svg>")
}

/// Target bands for the fitted exponents.
pub struct RateBand {
    pub quantity: &'static str,
    pub lo: f64,
    pub hi: f64,
}

pub const RATE_BANDS: &[RateBand] = &[
    RateBand { quantity: "resolvent_l2", lo: 0.9, hi: 1.1 },
    RateBand { quantity: "resolvent_grad", lo: 0.4, hi: 0.6 },
    RateBand { quantity: "resolvent_localized", lo: 0.9, hi: 1.1 },
    RateBand { quantity: "eigen_gap_m0", lo: 0.8, hi: 1.2 },
];

pub fn summarize_fits<W: std::io::Write>(w: &mut W, fits: &[RateFit]) -> std::io::Result<()> {
    writeln!(w, "{:<22} {:>9} {:>10} {:>9} {:>12} {:>8}", "quantity", "p", "C", "residual", "conclusive", "band")?;
    for f in fits {
        let band = RATE_BANDS.iter().find(|b| b.quantity == f.quantity);
        let verdict = match band {
            Some(b) => {
                if f.exponent >= b.lo && f.exponent <= b.hi && f.conclusive {
                    format!("[{:.1},{:.1}] ok", b.lo, b.hi)
                } else {
                    format!("[{:.1},{:.1}] OUT", b.lo, b.hi)
                }
            }
            None => "-".to_string(),
        };
        writeln!(
            w,
            "{:<22} {:>9.4} {:>10.4} {:>9.2e} {:>12} {:>8}",
            f.quantity,
            f.exponent,
            f.constant,
            f.residual,
            if f.conclusive { "yes" } else { "no" },
            verdict
        )?;
    }
    Ok(())
}
