//! Static SVG graphs. Coordinates are floats; this is rendering only.

use std::fmt::Write as _;

use noniterate::{CircleMap, ExactScalar, PlMap};

const SIZE: f64 = 400.0;
const PAD: f64 = 30.0;

fn sx(x: f64) -> f64 {
    PAD + x * SIZE
}

fn sy(y: f64) -> f64 {
    PAD + (1.0 - y) * SIZE
}

fn frame(title: &str, x_label: &str, y_label: &str) -> String {
    let total = SIZE + 2.0 * PAD;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, "<title>{title}</title>");
    let _ = writeln!(s, r##"<rect x="{PAD}" y="{PAD}" width="{SIZE}" height="{SIZE}" fill="none" stroke="#888"/>"##);
    let _ = writeln!(
        s,
        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#ccc" stroke-dasharray="4 4"/>"##,
        sx(0.0),
        sy(0.0),
        sx(1.0),
        sy(1.0)
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#, PAD + SIZE / 2.0, total - 8.0);
    let _ = writeln!(
        s,
        r#"<text x="10" y="{}" transform="rotate(-90 10 {})">{y_label}</text>"#,
        PAD + SIZE / 2.0,
        PAD + SIZE / 2.0
    );
    for (v, label) in [(0.0, "0"), (1.0, "1")] {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{label}</text>"#, sx(v), total - PAD + 14.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{label}</text>"#, PAD - 4.0, sy(v) + 4.0);
    }
    s
}

fn segment(s: &mut String, (x0, y0): (f64, f64), (x1, y1): (f64, f64)) {
    let _ = writeln!(
        s,
        r##"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#1f5fa8" stroke-width="2"/>"##,
        sx(x0),
        sy(y0),
        sx(x1),
        sy(y1)
    );
}

fn dot(s: &mut String, (x, y): (f64, f64), filled: bool) {
    let fill = if filled { "#1f5fa8" } else { "white" };
    let _ = writeln!(
        s,
        r##"<circle cx="{:.3}" cy="{:.3}" r="3" fill="{fill}" stroke="#1f5fa8" stroke-width="1.5"/>"##,
        sx(x),
        sy(y)
    );
}

/// Graph of `f` on `[0,1]`, with filled or hollow ends for closed or open pieces.
pub fn interval_svg(f: &PlMap) -> String {
    let mut s = frame("interval map", "x", "f(x)");
    for p in f.pieces() {
        let (lo, hi) = (p.lo.to_f64_lossy(), p.hi.to_f64_lossy());
        let (ylo, yhi) = (p.apply(&p.lo).to_f64_lossy(), p.apply(&p.hi).to_f64_lossy());
        if p.is_point() {
            dot(&mut s, (lo, ylo), true);
            continue;
        }
        segment(&mut s, (lo, ylo), (hi, yhi));
        dot(&mut s, (lo, ylo), p.lo_closed);
        dot(&mut s, (hi, yhi), p.hi_closed);
    }
    s.push_str("</svg>\n");
    s
}

/// Lift plot of a circle map: angle against image angle, each arc's segment
/// cut where the lifted image crosses a whole turn.
pub fn circle_svg(f: &CircleMap) -> String {
    let mut s = frame("circle map", "t", "f(t)");
    for (j, z) in f.partition().points().iter().enumerate() {
        let t0 = z.t().to_f64_lossy();
        let len = f.partition().arc(j).length().to_f64_lossy();
        let w0 = f.images()[j].t().to_f64_lossy();
        let dw = f.delta(j).to_f64_lossy();
        let mut cuts = vec![0.0, 1.0];
        let (lo, hi) = if dw >= 0.0 { (w0, w0 + dw) } else { (w0 + dw, w0) };
        let mut k = lo.floor() + 1.0;
        while k < hi {
            cuts.push((k - w0) / dw);
            k += 1.0;
        }
        cuts.sort_by(f64::total_cmp);
        for pair in cuts.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let mid = w0 + dw * (a + b) / 2.0;
            let turn = mid.floor();
            let x = |u: f64| t0 + u * len;
            let y = |u: f64| w0 + dw * u - turn;
            let (xa, xb) = (x(a), x(b));
            // the last arc wraps past 1; draw its two halves separately
            if xb > 1.0 && xa < 1.0 {
                let u = (1.0 - t0) / len;
                segment(&mut s, (xa, y(a)), (1.0, y(u)));
                segment(&mut s, (0.0, y(u)), (xb - 1.0, y(b)));
            } else if xa >= 1.0 {
                segment(&mut s, (xa - 1.0, y(a)), (xb - 1.0, y(b)));
            } else {
                segment(&mut s, (xa, y(a)), (xb, y(b)));
            }
        }
        dot(&mut s, (t0, w0), true);
    }
    s.push_str("</svg>\n");
    s
}
