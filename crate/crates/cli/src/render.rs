//! PPM and SVG emission for zone rasters.

use std::fmt::Write as _;

use brillouin::zones::{Cell, CellKind, ZoneRaster};

pub type Rgb = [u8; 3];

pub const BOUNDARY: Rgb = [0, 0, 0];
pub const OUTSIDE: Rgb = [255, 255, 255];
pub const UNRESOLVED: Rgb = [128, 128, 128];
pub const BEYOND_MAX: Rgb = [220, 220, 220];

const SATURATION: f64 = 0.55;
const VALUE: f64 = 0.95;

/// Colour of zone `n`: hue `palette_seed + n · 137.508°` at fixed
/// saturation and value.
pub fn zone_color(n: u32, palette_seed: u64) -> Rgb {
    let hue = ((palette_seed % 360) as f64 + n as f64 * 137.508).rem_euclid(360.0);
    hsv_to_rgb(hue, SATURATION, VALUE)
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> Rgb {
    let c = v * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp.rem_euclid(2.0) - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let q = |t: f64| ((t + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    [q(r), q(g), q(b)]
}

pub fn cell_color(c: &Cell, palette_seed: u64, max_zone: u32) -> Rgb {
    match c.kind {
        CellKind::Outside => OUTSIDE,
        CellKind::Unresolved => UNRESOLVED,
        CellKind::Zone if c.boundary => BOUNDARY,
        CellKind::Zone if c.zone_index > max_zone => BEYOND_MAX,
        CellKind::Zone => zone_color(c.zone_index, palette_seed),
    }
}

/// Binary PPM (`P6`).
pub fn to_ppm(r: &ZoneRaster, palette_seed: u64, max_zone: u32) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", r.width, r.height).into_bytes();
    out.reserve(r.cells.len() * 3);
    for c in &r.cells {
        out.extend_from_slice(&cell_color(c, palette_seed, max_zone));
    }
    out
}

/// SVG 1.1 with one rect per horizontal run of equal colour.
pub fn to_svg(r: &ZoneRaster, palette_seed: u64, max_zone: u32) -> String {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" shape-rendering=\"crispEdges\">",
        w = r.width,
        h = r.height
    );
    for j in 0..r.height {
        let mut i = 0;
        while i < r.width {
            let color = cell_color(r.cell(i, j), palette_seed, max_zone);
            let mut run = 1;
            while i + run < r.width && cell_color(r.cell(i + run, j), palette_seed, max_zone) == color {
                run += 1;
            }
            let _ = writeln!(
                s,
                "<rect x=\"{i}\" y=\"{j}\" width=\"{run}\" height=\"1\" fill=\"#{:02x}{:02x}{:02x}\"/>",
                color[0], color[1], color[2]
            );
            i += run;
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use brillouin::zones::Window;

    fn one(cell: Cell) -> ZoneRaster {
        ZoneRaster { window: Window::square(1.0), width: 1, height: 1, cells: vec![cell] }
    }

    #[test]
    fn single_pixel_ppm() {
        let c = Cell { kind: CellKind::Zone, zone_index: 1, ell: 1, boundary: false };
        let ppm = to_ppm(&one(c), 0, 10);
        let header = b"P6\n1 1\n255\n";
        assert_eq!(&ppm[..header.len()], header);
        assert_eq!(&ppm[header.len()..], &zone_color(1, 0));
    }

    #[test]
    fn palette_values() {
        assert_eq!(hsv_to_rgb(0.0, 1.0, 1.0), [255, 0, 0]);
        assert_eq!(hsv_to_rgb(120.0, 1.0, 1.0), [0, 255, 0]);
        assert_eq!(hsv_to_rgb(240.0, 1.0, 1.0), [0, 0, 255]);
        assert_ne!(zone_color(1, 0), zone_color(2, 0));
        assert_eq!(zone_color(1, 360), zone_color(1, 0));
    }

    #[test]
    fn svg_runs() {
        let z = |n| Cell { kind: CellKind::Zone, zone_index: n, ell: 1, boundary: false };
        let r = ZoneRaster { window: Window::square(1.0), width: 3, height: 1, cells: vec![z(1), z(1), z(2)] };
        let svg = to_svg(&r, 0, 10);
        assert_eq!(svg.matches("<rect").count(), 2);
        assert!(svg.contains("width=\"2\""));
        assert!(!svg.contains("<script"));
    }
}
