//! Minimal SVG writer shared by the plots and the block diagram.

use std::fmt::Write;

pub fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub struct Svg {
    body: String,
    width: f64,
    height: f64,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Self {
            body: String::new(),
            width,
            height,
        }
    }

    pub fn raw(&mut self, element: &str) {
        self.body.push_str(element);
        self.body.push('\n');
    }

    pub fn text(&mut self, x: f64, y: f64, content: &str, anchor: &str, class: &str) {
        let _ = writeln!(
            self.body,
            r#"<text class="{class}" x="{x:.1}" y="{y:.1}" text-anchor="{anchor}">{}</text>"#,
            esc(content)
        );
    }

    pub fn finish(self) -> String {
        let (w, h) = (self.width, self.height);
        format!(
            concat!(
                r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="11">"#,
                "\n",
                r#"<rect width="100%" height="100%" fill="white"/>"#,
                "\n{body}</svg>\n"
            ),
            w = w,
            h = h,
            body = self.body
        )
    }
}

/// Linear map of a data window onto a pixel rectangle.
#[derive(Clone, Copy, Debug)]
pub struct Frame {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

/// Widen degenerate or non-finite ranges so the mapping stays defined.
pub fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
        let d = lo.abs().max(1.0) * 0.5;
        return (lo - d, hi + d);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

pub fn min_max(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

impl Frame {
    pub fn px(&self, v: f64) -> f64 {
        let (a, b) = self.x_range;
        self.x + (v - a) / (b - a) * self.w
    }

    pub fn py(&self, v: f64) -> f64 {
        let (a, b) = self.y_range;
        self.y + self.h - (v - a) / (b - a) * self.h
    }

    /// Axes box with min/max tick labels.
    pub fn draw_axes(&self, svg: &mut Svg, title: &str) {
        svg.raw(&format!(
            r##"<rect class="axes" x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#999"/>"##,
            self.x, self.y, self.w, self.h
        ));
        svg.text(self.x, self.y - 6.0, title, "start", "title");
        let fmt = |v: f64| format!("{v:.4}");
        svg.text(self.x - 4.0, self.y + self.h, &fmt(self.y_range.0), "end", "tick");
        svg.text(self.x - 4.0, self.y + 10.0, &fmt(self.y_range.1), "end", "tick");
        svg.text(self.x, self.y + self.h + 14.0, &fmt(self.x_range.0), "start", "tick");
        svg.text(self.x + self.w, self.y + self.h + 14.0, &fmt(self.x_range.1), "end", "tick");
    }

    pub fn points(&self, xy: impl IntoIterator<Item = (f64, f64)>) -> String {
        let mut out = String::new();
        for (x, y) in xy {
            if !out.is_empty() {
                out.push(' ');
            }
            let _ = write!(out, "{:.2},{:.2}", self.px(x), self.py(y));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_maps_corners() {
        let f = Frame {
            x: 10.0,
            y: 20.0,
            w: 100.0,
            h: 50.0,
            x_range: (0.0, 1.0),
            y_range: (-1.0, 1.0),
        };
        assert_eq!((f.px(0.0), f.px(1.0)), (10.0, 110.0));
        assert_eq!((f.py(-1.0), f.py(1.0)), (70.0, 20.0));
    }

    #[test]
    fn padding_handles_flat_and_bad_ranges() {
        let (lo, hi) = padded(3.0, 3.0);
        assert!(lo < 3.0 && hi > 3.0);
        assert_eq!(padded(f64::NAN, 1.0), (0.0, 1.0));
        assert_eq!(esc("a<b&\"c\""), "a&lt;b&amp;&quot;c&quot;");
    }
}
