//! SVG scene of a solution: region frame, Voronoi cells, footprints clipped
//! to their cells, nominal and effective locations.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rrfcov::geometry::{AnnularSector, Point2};
use rrfcov::orientation::sensor_diagram;
use rrfcov::voronoi::Roi;

use crate::output::SolutionFile;
use crate::CliError;

fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".to_owned()
    } else {
        s
    }
}

fn pt(p: Point2) -> String {
    format!("{},{}", num(p.x), num(p.y))
}

fn footprint_path(fp: &AnnularSector) -> String {
    let c = fp.apex();
    let (r, big_r) = (fp.r_inner(), fp.r_outer());
    let circle = |rad: f64| {
        let a = c + Point2::new(rad, 0.0);
        let b = c - Point2::new(rad, 0.0);
        format!(
            "M{} A{} {} 0 1 1 {} A{} {} 0 1 1 {} Z",
            pt(a),
            num(rad),
            num(rad),
            pt(b),
            num(rad),
            num(rad),
            pt(a)
        )
    };
    if fp.is_full() {
        let mut d = circle(big_r);
        if fp.has_inner_arc() {
            d.push(' ');
            d.push_str(&circle(r));
        }
        return d;
    }
    let (lo, hi) = (
        fp.orientation() - fp.half_angle(),
        fp.orientation() + fp.half_angle(),
    );
    let large = u8::from(hi - lo > PI);
    let at = |rad: f64, ang: f64| c + Point2::from_angle(ang) * rad;
    let mut d = format!(
        "M{} A{} {} 0 {large} 1 {}",
        pt(at(big_r, lo)),
        num(big_r),
        num(big_r),
        pt(at(big_r, hi))
    );
    if fp.has_inner_arc() {
        let _ = write!(
            d,
            " L{} A{} {} 0 {large} 0 {} Z",
            pt(at(r, hi)),
            num(r),
            num(r),
            pt(at(r, lo))
        );
    } else {
        let _ = write!(d, " L{} Z", pt(c));
    }
    d
}

pub fn render_svg(file: &SolutionFile) -> Result<String, CliError> {
    let roi =
        Roi::new(file.roi.min, file.roi.max).map_err(|e| CliError::Config(format!("roi: {e}")))?;
    let sensors = file
        .sensors
        .iter()
        .map(|r| r.sensor())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Config(format!("sensors: {e}")))?;
    let diagram = sensor_diagram(&sensors, roi)?;
    let (w, h) = (roi.width(), roi.height());
    let stroke = num(w.max(h) / 1000.0);
    let dot = num(w.max(h) / 250.0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="{}">"#,
        num(roi.min.x),
        num(-roi.max.y),
        num(w),
        num(h),
        num(800.0 * h / w)
    );
    s.push_str("<defs>\n");
    for (k, cell) in diagram.cells.iter().enumerate() {
        let pts: Vec<String> = cell.vertices().iter().map(|v| pt(*v)).collect();
        let _ = writeln!(
            s,
            r#"<clipPath id="cell{k}"><polygon points="{}"/></clipPath>"#,
            pts.join(" ")
        );
    }
    s.push_str("</defs>\n<g transform=\"scale(1,-1)\">\n");
    let _ = writeln!(
        s,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#ffffff" stroke="#000000" stroke-width="{stroke}"/>"##,
        num(roi.min.x),
        num(roi.min.y),
        num(w),
        num(h)
    );
    for (k, (rec, sensor)) in file.sensors.iter().zip(&sensors).enumerate() {
        let (Some(dir), Some(loc)) = (rec.direction, rec.effective_location) else {
            continue;
        };
        let fp = sensor.footprint(loc, dir.to_radians())?;
        let _ = writeln!(
            s,
            r##"<path d="{}" fill="#3b7dd8" fill-opacity="0.45" fill-rule="evenodd" stroke="#1f4f99" stroke-width="{stroke}" clip-path="url(#cell{k})"/>"##,
            footprint_path(&fp)
        );
    }
    for cell in &diagram.cells {
        let pts: Vec<String> = cell.vertices().iter().map(|v| pt(*v)).collect();
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="none" stroke="#555555" stroke-width="{stroke}"/>"##,
            pts.join(" ")
        );
    }
    for rec in &file.sensors {
        let opacity = if rec.state == "sleep" { "0.3" } else { "1" };
        let _ = writeln!(
            s,
            r##"<circle cx="{}" cy="{}" r="{dot}" fill="#000000" fill-opacity="{opacity}"><title>sensor {} ({})</title></circle>"##,
            num(rec.nominal.x),
            num(rec.nominal.y),
            rec.id,
            rec.state
        );
        if let Some(p) = rec.effective_location {
            if p.distance(rec.nominal) > 1e-9 {
                let _ = writeln!(
                    s,
                    r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#cc3300" stroke-width="{stroke}"/><circle cx="{}" cy="{}" r="{dot}" fill="none" stroke="#cc3300" stroke-width="{stroke}"/>"##,
                    num(rec.nominal.x),
                    num(rec.nominal.y),
                    num(p.x),
                    num(p.y),
                    num(p.x),
                    num(p.y)
                );
            }
        }
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sector_path_has_both_arcs() {
        let fp = AnnularSector::new(Point2::new(0.0, 0.0), 10.0, 20.0, PI / 2.0, 0.0).unwrap();
        let d = footprint_path(&fp);
        assert_eq!(d.matches('A').count(), 2);
        assert!(d.starts_with("M14.142,-14.142 A20.000 20.000 0 0 1 14.142,14.142"));
        let pie = AnnularSector::new(Point2::new(0.0, 0.0), 0.0, 20.0, PI / 2.0, 0.0).unwrap();
        assert!(footprint_path(&pie).ends_with("L0.000,0.000 Z"));
    }
}
