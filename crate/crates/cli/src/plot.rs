//! Static SVG scatter plots of a data set and one or more codebooks.

use std::fmt::Write as _;

use breathing_kmeans::{Codebook, DataMatrix};

use crate::error::{CliError, CliResult};

const PALETTE: [&str; 6] = [
    "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotOptions {
    pub x_axis: usize,
    pub y_axis: usize,
    pub width: f64,
    pub height: f64,
    pub margin: f64,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            x_axis: 0,
            y_axis: 1,
            width: 640.0,
            height: 640.0,
            margin: 20.0,
        }
    }
}

/// Renders data points as small grey dots and every codebook's centroids as
/// larger outlined circles, projected onto the two selected axes. Each point
/// and each centroid is exactly one `<circle>` element.
pub fn render_svg(
    data: &DataMatrix<f64>,
    codebooks: &[Codebook<f64>],
    opts: &PlotOptions,
) -> CliResult<String> {
    let d = data.dim();
    if d < 2 {
        return Err(CliError::Data(
            "plotting needs at least two dimensions".into(),
        ));
    }
    for (name, axis) in [("x-axis", opts.x_axis), ("y-axis", opts.y_axis)] {
        if axis >= d {
            return Err(CliError::Usage(format!(
                "{name} {axis} out of range for d = {d}"
            )));
        }
    }
    if opts.x_axis == opts.y_axis {
        return Err(CliError::Usage("x-axis and y-axis must differ".into()));
    }
    if let Some(c) = codebooks.iter().find(|c| c.dim() != d) {
        return Err(CliError::Data(format!(
            "codebook has {} columns, data has {d}",
            c.dim()
        )));
    }

    let project = |r: &[f64]| (r[opts.x_axis], r[opts.y_axis]);
    let all = data
        .rows()
        .chain(codebooks.iter().flat_map(|c| c.rows()))
        .map(project);
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for (x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span_x = if x1 > x0 { x1 - x0 } else { 1.0 };
    let span_y = if y1 > y0 { y1 - y0 } else { 1.0 };
    let inner_w = opts.width - 2.0 * opts.margin;
    let inner_h = opts.height - 2.0 * opts.margin;
    let to_px = |(x, y): (f64, f64)| {
        (
            opts.margin + (x - x0) / span_x * inner_w,
            // SVG y grows downwards
            opts.margin + (y1 - y) / span_y * inner_h,
        )
    };

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" style="background:#ffffff">"#,
        w = opts.width,
        h = opts.height
    )
    .unwrap();
    svg.push_str(r##"<g fill="#888888" fill-opacity="0.6">"##);
    svg.push('\n');
    for row in data.rows() {
        let (px, py) = to_px(project(row));
        writeln!(svg, r#"<circle cx="{px:.2}" cy="{py:.2}" r="1.5"/>"#).unwrap();
    }
    svg.push_str("</g>\n");
    for (i, c) in codebooks.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        writeln!(
            svg,
            r##"<g fill="{color}" fill-opacity="0.85" stroke="#000000" stroke-width="0.8">"##
        )
        .unwrap();
        for row in c.rows() {
            let (px, py) = to_px(project(row));
            writeln!(svg, r#"<circle cx="{px:.2}" cy="{py:.2}" r="4"/>"#).unwrap();
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> DataMatrix<f64> {
        DataMatrix::from_rows(&[[0.0, 0.0, 5.0], [1.0, 1.0, 6.0], [0.5, 0.25, 7.0]]).unwrap()
    }

    #[test]
    fn one_circle_per_point_and_centroid() {
        let c = Codebook::from_rows(&[[0.5, 0.5, 6.0]]).unwrap();
        let svg = render_svg(&square(), &[c.clone(), c], &PlotOptions::default()).unwrap();
        assert_eq!(svg.matches("<circle").count(), 5);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn data_only_and_axis_selection() {
        let svg = render_svg(&square(), &[], &PlotOptions::default()).unwrap();
        assert_eq!(svg.matches("<circle").count(), 3);
        // corners of the projected bounding box land on the margins
        assert!(svg.contains(r#"cx="20.00" cy="620.00""#));
        assert!(svg.contains(r#"cx="620.00" cy="20.00""#));

        let opts = PlotOptions {
            x_axis: 2,
            y_axis: 0,
            ..PlotOptions::default()
        };
        let svg = render_svg(&square(), &[], &opts).unwrap();
        assert!(svg.contains(r#"cx="320.00" cy="20.00""#));
    }

    #[test]
    fn rejects_bad_inputs() {
        let line = DataMatrix::from_rows(&[[0.0], [1.0]]).unwrap();
        assert!(matches!(
            render_svg(&line, &[], &PlotOptions::default()),
            Err(CliError::Data(_))
        ));
        let opts = PlotOptions {
            x_axis: 3,
            ..PlotOptions::default()
        };
        assert!(matches!(
            render_svg(&square(), &[], &opts),
            Err(CliError::Usage(_))
        ));
        let flat = Codebook::from_rows(&[[0.0, 0.0]]).unwrap();
        assert!(render_svg(&square(), &[flat], &PlotOptions::default()).is_err());
    }

    #[test]
    fn output_is_deterministic() {
        let a = render_svg(&square(), &[], &PlotOptions::default()).unwrap();
        let b = render_svg(&square(), &[], &PlotOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}
