//! Diagnostic SVG of pole positions with Stokes and anti-Stokes rays.

use std::fmt::Write;

use monodromy_core::ode::{PoleLocation, PoleRecord};

const SIZE: f64 = 480.0;

pub fn poles_svg(poles: &[PoleRecord]) -> String {
    let finite: Vec<_> = poles
        .iter()
        .filter_map(|p| match p.location {
            PoleLocation::Finite(z) => Some(z),
            PoleLocation::Infinity => None,
        })
        .collect();
    let extent = finite.iter().map(|z| z.re.abs().max(z.im.abs())).fold(1.0, f64::max) * 1.6;
    let scale = SIZE / (2.0 * extent);
    let px = |x: f64, y: f64| (SIZE / 2.0 + x * scale, SIZE / 2.0 - y * scale);
    let ray = 0.35 * extent;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##).unwrap();
    let (x0, y0) = px(-extent, 0.0);
    let (x1, _) = px(extent, 0.0);
    let (_, ya) = px(0.0, extent);
    let (xc, yb) = px(0.0, -extent);
    writeln!(s, r##"<g stroke="#dddddd"><line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/><line x1="{xc}" y1="{ya}" x2="{xc}" y2="{yb}"/></g>"##).unwrap();
    for p in poles {
        let (cx, cy, len) = match p.location {
            PoleLocation::Finite(z) => (z.re, z.im, ray),
            PoleLocation::Infinity => (0.0, 0.0, extent),
        };
        let (sx, sy) = px(cx, cy);
        for (angles, style) in [
            (&p.stokes_angles, r##"stroke="#1f5fbf""##),
            (&p.anti_stokes_angles, r##"stroke="#bf3f1f" stroke-dasharray="4 3""##),
        ] {
            for &a in angles {
                let (ex, ey) = px(cx + len * a.cos(), cy + len * a.sin());
                writeln!(s, r#"<line x1="{sx:.2}" y1="{sy:.2}" x2="{ex:.2}" y2="{ey:.2}" {style}/>"#).unwrap();
            }
        }
        if let PoleLocation::Finite(_) = p.location {
            writeln!(s, r##"<circle cx="{sx:.2}" cy="{sy:.2}" r="4" fill="#000000"/>"##).unwrap();
            writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#, sx + 6.0, sy - 6.0, p.order).unwrap();
        } else {
            writeln!(s, r#"<text x="6" y="16" font-size="11">order {} at infinity</text>"#, p.order).unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}
