use std::fmt::Write as _;
use std::path::Path;

use super::HolomorphyDomain;
use crate::error::Result;

/// Pixels per unit length.
const SCALE: f64 = 100.0;
const VERTICAL_MARGIN: f64 = 1.3;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_max: f64,
}

impl Frame {
    fn new(dom: &HolomorphyDomain) -> Self {
        Frame {
            x_min: -0.5,
            x_max: (dom.n_max() + 1) as f64 * dom.t(),
            y_max: dom.n_max() as f64 * dom.r() * VERTICAL_MARGIN,
        }
    }

    fn x(&self, x: f64) -> f64 {
        (x - self.x_min) * SCALE
    }

    fn y(&self, y: f64) -> f64 {
        (self.y_max - y) * SCALE
    }

    fn width(&self) -> f64 {
        (self.x_max - self.x_min) * SCALE
    }

    fn height(&self) -> f64 {
        2.0 * self.y_max * SCALE
    }

    /// Exit point of the ray from `(t, 0)` at angle `phi ∈ (0, π/2]` into the upper half.
    fn ray_exit(&self, t: f64, phi: f64) -> (f64, f64) {
        let (sin, cos) = phi.sin_cos();
        let to_right = if cos > 0.0 {
            (self.x_max - t) / cos
        } else {
            f64::INFINITY
        };
        let to_top = self.y_max / sin;
        let len = to_right.min(to_top);
        (t + len * cos, len * sin)
    }
}

fn tick_label(n: usize) -> String {
    if n == 1 {
        "t".to_string()
    } else {
        format!("{n}t")
    }
}

/// SVG drawing of `Ω_t` for `n = 1..n_max` with the sector `S(t, θ_t)`.
pub fn render_svg(dom: &HolomorphyDomain) -> String {
    let fr = Frame::new(dom);
    let (t, r) = (dom.t(), dom.r());
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {:.3} {:.3}" width="{:.3}" height="{:.3}">"#,
        fr.width(),
        fr.height(),
        fr.width(),
        fr.height()
    );

    let (ux, uy) = fr.ray_exit(t, dom.theta());
    let mut poly = vec![(t, 0.0), (ux, -uy)];
    if ux < fr.x_max {
        poly.push((fr.x_max, -fr.y_max));
        poly.push((fr.x_max, fr.y_max));
    }
    poly.push((ux, uy));
    let points: Vec<String> = poly
        .iter()
        .map(|&(x, y)| format!("{:.3},{:.3}", fr.x(x), fr.y(y)))
        .collect();
    let _ = writeln!(
        out,
        r##"  <polygon class="sector" points="{}" fill="#4477aa" fill-opacity="0.2" stroke="none"/>"##,
        points.join(" ")
    );
    for sign in [1.0, -1.0] {
        let _ = writeln!(
            out,
            r##"  <line class="sector-ray" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#4477aa" stroke-dasharray="6 4"/>"##,
            fr.x(t),
            fr.y(0.0),
            fr.x(ux),
            fr.y(sign * uy)
        );
    }

    let _ = writeln!(
        out,
        r#"  <line class="axis" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black"/>"#,
        fr.x(fr.x_min),
        fr.y(0.0),
        fr.x(fr.x_max),
        fr.y(0.0)
    );

    for n in 1..=dom.n_max() {
        let (c, rad) = (n as f64 * t, n as f64 * r);
        let _ = writeln!(
            out,
            r#"  <circle class="ball" cx="{:.3}" cy="{:.3}" r="{:.3}" fill="none" stroke="black"/>"#,
            fr.x(c),
            fr.y(0.0),
            rad * SCALE
        );
        if n < dom.n_max() {
            let next = (n + 1) as f64 * r;
            let end = (n + 1) as f64 * t - (next * next - rad * rad).sqrt();
            if end > c {
                for sign in [1.0, -1.0] {
                    let _ = writeln!(
                        out,
                        r#"  <line class="strip" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black"/>"#,
                        fr.x(c),
                        fr.y(sign * rad),
                        fr.x(end),
                        fr.y(sign * rad)
                    );
                }
            }
        }
        let _ = writeln!(
            out,
            r#"  <circle class="tick" cx="{:.3}" cy="{:.3}" r="2" fill="black"/>"#,
            fr.x(c),
            fr.y(0.0)
        );
        let _ = writeln!(
            out,
            r#"  <text x="{:.3}" y="{:.3}" font-size="12" text-anchor="middle">{}</text>"#,
            fr.x(c),
            fr.y(0.0) + 16.0,
            tick_label(n)
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn domain_svg(dom: &HolomorphyDomain, out: &Path) -> Result<()> {
    std::fs::write(out, render_svg(dom))?;
    Ok(())
}
