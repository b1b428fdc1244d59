//! Minimal SVG emitter for the rescaled spectrum: the band as a shaded
//! rectangle and one polyline per eigenvalue column.

use std::fmt::Write;

use super::table::format_number;

/// Columns of a sweep CSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlotData {
    pub alpha: Vec<f64>,
    pub band_top: Vec<f64>,
    /// Per row, `eig_1..eig_K` with `None` for empty cells.
    pub eigenvalues: Vec<Vec<Option<f64>>>,
}

impl PlotData {
    pub fn columns(&self) -> usize {
        self.eigenvalues.first().map_or(0, Vec::len)
    }

    /// Points `(alpha, value)` of column `j` (0-based).
    pub fn curve(&self, j: usize) -> Vec<(f64, f64)> {
        self.alpha
            .iter()
            .zip(&self.eigenvalues)
            .filter_map(|(a, row)| row.get(j).copied().flatten().map(|v| (*a, v)))
            .collect()
    }
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

/// A step from {1, 2, 5} x 10^k giving about `target` intervals over `span`.
fn tick_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

fn ticks(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

/// Renders the figure. Inside the `plot` group the coordinates are data
/// coordinates (`alpha` right, `alpha lambda` up).
pub fn render_svg(data: &PlotData) -> String {
    let (mut x0, mut x1) = data
        .alpha
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| (lo.min(*a), hi.max(*a)));
    if !(x1 > x0) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let band = data.band_top.iter().copied().fold(0.0, f64::max);
    let top_value = data
        .eigenvalues
        .iter()
        .flatten()
        .flatten()
        .copied()
        .fold(band, f64::max);
    let y1 = (1.05 * top_value.max(band + 0.5)).ceil();

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = pw / (x1 - x0);
    let sy = ph / y1;
    let px = |x: f64| LEFT + (x - x0) * sx;
    let py = |y: f64| TOP + ph - y * sy;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<g id="plot" transform="matrix({} 0 0 {} {} {})">"#,
        format_number(sx),
        format_number(-sy),
        format_number(LEFT - x0 * sx),
        format_number(TOP + ph)
    );
    let _ = writeln!(
        s,
        r#"<rect id="band" x="{}" y="0" width="{}" height="{}" fill="silver"/>"#,
        format_number(x0),
        format_number(x1 - x0),
        format_number(band)
    );
    for j in 0..data.columns() {
        let points: Vec<String> = data
            .curve(j)
            .iter()
            .map(|(a, v)| format!("{},{}", format_number(*a), format_number(*v)))
            .collect();
        if points.is_empty() {
            continue;
        }
        let _ = writeln!(
            s,
            r#"<polyline class="eig" data-column="eig_{}" points="{}" fill="none" stroke="black" stroke-width="1.5" vector-effect="non-scaling-stroke"/>"#,
            j + 1,
            points.join(" ")
        );
    }
    let _ = writeln!(s, "</g>");

    // axes
    let _ = writeln!(
        s,
        r#"<path d="M{} {} H{} M{} {} V{}" stroke="black" fill="none"/>"#,
        LEFT,
        TOP + ph,
        LEFT + pw,
        LEFT,
        TOP + ph,
        TOP
    );
    for t in ticks(x0, x1, tick_step(x1 - x0, 10.0)) {
        let x = px(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0,
            format_number(t)
        );
    }
    for t in ticks(0.0, y1, tick_step(y1, 6.0)) {
        let y = py(t);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            format_number(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">α</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">spectrum of α K_α</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    let _ = writeln!(s, "</svg>");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(eigs: Vec<Vec<Option<f64>>>) -> PlotData {
        PlotData {
            alpha: (1..=eigs.len()).map(|i| i as f64).collect(),
            band_top: vec![2.0; eigs.len()],
            eigenvalues: eigs,
        }
    }

    #[test]
    fn band_only() {
        let svg = render_svg(&data(vec![vec![], vec![], vec![]]));
        assert!(svg.contains(r#"<rect id="band" x="1" y="0" width="2" height="2""#));
        assert!(!svg.contains("<polyline"));
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn one_polyline_per_column() {
        let svg = render_svg(&data(vec![vec![None, None], vec![Some(2.5), None], vec![Some(3.0), Some(2.1)]]));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(r#"points="2,2.5 3,3""#));
    }

    #[test]
    fn tick_steps() {
        assert_eq!(tick_step(12.0, 10.0), 2.0);
        assert_eq!(tick_step(1.0, 10.0), 0.1);
        assert_eq!(ticks(0.05, 12.0, 2.0), vec![2.0, 4.0, 6.0, 8.0, 10.0, 12.0]);
    }
}
