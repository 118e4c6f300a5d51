//! Static SVG plots of level curves over the domain outline.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use suita_core::sublevel::level_curves;
use suita_core::{DomainSpec, Error, Point64};

use crate::error::{CliError, Result};

const SIZE: f64 = 600.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Maps the bounding box (with a 5% margin) to a square canvas, `y` up.
struct Frame {
    lo: Point64,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(lo: Point64, hi: Point64) -> Self {
        let span = (hi.re - lo.re).max(hi.im - lo.im);
        let pad = 0.05 * span;
        let lo = Point64::new(lo.re - pad, lo.im - pad);
        let scale = SIZE / (span + 2.0 * pad);
        let height = (hi.im - lo.im + pad) * scale;
        Self { lo, scale, height }
    }

    fn x(&self, z: Point64) -> f64 {
        (z.re - self.lo.re) * self.scale
    }

    fn y(&self, z: Point64) -> f64 {
        self.height - (z.im - self.lo.im) * self.scale
    }
}

/// SVG document with the domain outline and one `<g>` of polylines per level.
pub fn contours_svg(domain: &DomainSpec<f64>, w: Point64, levels: &[f64], grid: usize) -> Result<String> {
    let (lo, hi) = domain.bounding_box().ok_or_else(|| Error::UnsupportedDomain(domain.kind().into()))?;
    let curves = if levels.is_empty() { Vec::new() } else { level_curves(domain, w, levels, grid)? };
    let f = Frame::new(lo, hi);
    let mut s = String::new();
    let width = f.x(hi) + 0.05 * (hi.re - lo.re).max(hi.im - lo.im) * f.scale;
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2}" height="{:.2}" viewBox="0 0 {width:.2} {:.2}">"#, f.height, f.height).unwrap();
    writeln!(s, r#"<g id="outline" fill="none" stroke="black" stroke-width="1.5">"#).unwrap();
    match domain {
        DomainSpec::Polygon { vertices } => {
            let pts: Vec<String> = vertices.iter().map(|&z| format!("{:.3},{:.3}", f.x(z), f.y(z))).collect();
            writeln!(s, r#"<polygon points="{}"/>"#, pts.join(" ")).unwrap();
        }
        _ => {
            let chart = domain.chart().ok_or_else(|| Error::UnsupportedDomain(domain.kind().into()))?;
            for (c, r, _) in chart.image_circles() {
                writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="{:.3}"/>"#, f.x(c), f.y(c), r * f.scale).unwrap();
            }
        }
    }
    writeln!(s, "</g>").unwrap();
    writeln!(s, r#"<circle id="pole" cx="{:.3}" cy="{:.3}" r="2.5" fill="black"/>"#, f.x(w), f.y(w)).unwrap();
    for (k, (t, loops)) in levels.iter().zip(&curves).enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        writeln!(s, r#"<g class="level" data-t="{t}" fill="none" stroke="{colour}" stroke-width="1">"#).unwrap();
        for l in loops {
            let pts: Vec<String> = l.iter().map(|&z| format!("{:.3},{:.3}", f.x(z), f.y(z))).collect();
            writeln!(s, r#"<polyline points="{}"/>"#, pts.join(" ")).unwrap();
        }
        writeln!(s, "</g>").unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_contours(domain: &DomainSpec<f64>, w: Point64, levels: &[f64], grid: usize, path: &Path) -> Result<()> {
    fs::write(path, contours_svg(domain, w, levels, grid)?).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points(polyline: &str) -> Vec<(f64, f64)> {
        let inner = polyline.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        inner
            .split(' ')
            .map(|p| {
                let (x, y) = p.split_once(',').unwrap();
                (x.parse().unwrap(), y.parse().unwrap())
            })
            .collect()
    }

    #[test]
    fn centred_disc_levels_are_circles() {
        let d = DomainSpec::unit_disc();
        let levels = [-2.0, -1.0, -0.5];
        let svg = contours_svg(&d, Point64::new(0.0, 0.0), &levels, 128).unwrap();
        let lines: Vec<&str> = svg.lines().filter(|l| l.starts_with("<polyline")).collect();
        assert_eq!(lines.len(), 3);
        let f = Frame::new(Point64::new(-1.0, -1.0), Point64::new(1.0, 1.0));
        let (cx, cy) = (f.x(Point64::new(0.0, 0.0)), f.y(Point64::new(0.0, 0.0)));
        for (line, t) in lines.iter().zip(levels) {
            let r = f64::exp(t) * f.scale;
            for (x, y) in points(line) {
                assert!(((x - cx).hypot(y - cy) - r).abs() < 2e-3, "t={t}");
            }
        }
    }

    #[test]
    fn empty_level_list_gives_outline_only() {
        let d = DomainSpec::annulus(0.5).unwrap();
        let svg = contours_svg(&d, Point64::new(0.7, 0.0), &[], 64).unwrap();
        assert_eq!(svg.matches("<circle cx").count(), 2);
        assert!(!svg.contains("<polyline"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn polygon_outline_and_determinism() {
        let d: DomainSpec<f64> = "polygon:-1,-1;1,-1;1,1;-1,1".parse().unwrap();
        let a = contours_svg(&d, Point64::new(0.2, 0.1), &[], 64).unwrap();
        assert!(a.contains("<polygon points="));
        assert_eq!(a, contours_svg(&d, Point64::new(0.2, 0.1), &[], 64).unwrap());
        assert!(contours_svg(&DomainSpec::PolarComplement, Point64::new(1.0, 0.0), &[], 64).is_err());
    }
}
