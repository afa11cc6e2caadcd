//! Deterministic SVG scatter plots of 2D and 3D datasets.

use centric_kit::{Dataset, Error, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 40.0;

/// Point colors by label, cycling after ten clusters.
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// Fixed-view orthographic projection for 3D data: the two screen axes are
/// orthonormal and perpendicular to the (1,1,1) viewing direction.
const VIEW_U: [f64; 3] = [0.707_106_781_186_547_6, -0.707_106_781_186_547_6, 0.0];
const VIEW_V: [f64; 3] = [-0.408_248_290_463_863, -0.408_248_290_463_863, 0.816_496_580_927_726];

/// Renders a scatter plot. Labels default to a single class; 3D datasets
/// are projected orthographically from a fixed view.
pub fn render_svg(dataset: &Dataset, labels: Option<&[usize]>) -> Result<String> {
    if let Some(labels) = labels {
        if labels.len() != dataset.len() {
            return Err(Error::InvalidParam(format!(
                "{} labels for {} points",
                labels.len(),
                dataset.len()
            )));
        }
    }
    let projected: Vec<(f64, f64)> = match dataset.dim() {
        2 => dataset.points().map(|p| (p[0], p[1])).collect(),
        3 => dataset
            .points()
            .map(|p| {
                (
                    p[0] * VIEW_U[0] + p[1] * VIEW_U[1] + p[2] * VIEW_U[2],
                    p[0] * VIEW_V[0] + p[1] * VIEW_V[1] + p[2] * VIEW_V[2],
                )
            })
            .collect(),
        d => {
            return Err(Error::InvalidParam(format!(
                "can only plot 2 or 3 dimensions, got {d}; use --columns to pick axes"
            )))
        }
    };

    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &projected {
        min_x = min_x.min(x);
        max_x = max_x.max(x);
        min_y = min_y.min(y);
        max_y = max_y.max(y);
    }
    let pad = |lo: &mut f64, hi: &mut f64| {
        let span = *hi - *lo;
        let pad = if span > 0.0 { 0.05 * span } else { 1.0 };
        *lo -= pad;
        *hi += pad;
    };
    pad(&mut min_x, &mut max_x);
    pad(&mut min_y, &mut max_y);

    let scale_x = (WIDTH - 2.0 * MARGIN) / (max_x - min_x);
    let scale_y = (HEIGHT - 2.0 * MARGIN) / (max_y - min_y);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" \
         stroke=\"#cccccc\"/>\n",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    ));
    for (i, &(x, y)) in projected.iter().enumerate() {
        let label = labels.map_or(0, |l| l[i]);
        let sx = MARGIN + (x - min_x) * scale_x;
        // SVG's y axis points down
        let sy = HEIGHT - MARGIN - (y - min_y) * scale_y;
        svg.push_str(&format!(
            "  <circle cx=\"{sx:.3}\" cy=\"{sy:.3}\" r=\"3\" fill=\"{}\" fill-opacity=\"0.8\"/>\n",
            PALETTE[label % PALETTE.len()]
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
