//! Standalone SVG bar chart for a [`Histogram`].

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{format_edge, Histogram};
use crate::error::Result;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders `hist` as an SVG document. Same input, same bytes.
pub fn render_svg(hist: &Histogram, title: &str, x_label: &str) -> String {
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let nbins = hist.counts.len().max(1);
    let bar_w = plot_w / nbins as f64;
    let max_count = hist.counts.iter().copied().max().unwrap_or(0).max(1);
    let y0 = TOP + plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="30" text-anchor="middle" font-family="sans-serif" font-size="18">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{LEFT}" y1="{y0}" x2="{:.2}" y2="{y0}" stroke="black"/>"#,
        LEFT + plot_w
    );
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{y0}" stroke="black"/>"#
    );

    for (i, &c) in hist.counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let h = c as f64 / max_count as f64 * plot_h;
        let _ = writeln!(
            s,
            r#"<rect class="bar" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="steelblue"><title>[{}, {}): {c}</title></rect>"#,
            LEFT + i as f64 * bar_w,
            y0 - h,
            (bar_w - 1.0).max(0.5),
            h,
            format_edge(hist.edge(i)),
            format_edge(hist.edge(i + 1)),
        );
    }

    // At most ~10 x tick labels.
    let every = nbins.div_ceil(10).max(1);
    for i in (0..=hist.counts.len()).step_by(every) {
        let x = LEFT + i as f64 * bar_w;
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
            y0 + 16.0,
            format_edge(hist.edge(i))
        );
    }
    for (frac, value) in [(0.0, 0), (0.5, max_count / 2), (1.0, max_count)] {
        let y = y0 - frac * plot_h;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{value}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 {:.2})">count</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    s.push_str("</svg>\n");
    s
}

pub fn emit_svg(hist: &Histogram, title: &str, x_label: &str, out: &Path) -> Result<()> {
    fs::write(out, render_svg(hist, title, x_label))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::histogram;

    fn bars(doc: &roxmltree::Document) -> usize {
        doc.descendants()
            .filter(|n| n.has_tag_name("rect") && n.attribute("class") == Some("bar"))
            .count()
    }

    #[test]
    fn one_rect_per_nonzero_bin() {
        let h = histogram(&[0.81, 0.83, 0.83, 0.95, 1.1], 0.02).unwrap();
        let nonzero = h.counts.iter().filter(|&&c| c > 0).count();
        let text = render_svg(&h, "R <per> block & \"all\"", "R");
        let doc = roxmltree::Document::parse(&text).unwrap();
        assert_eq!(bars(&doc), nonzero);
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        assert_eq!(text, render_svg(&h, "R <per> block & \"all\"", "R"));
    }

    #[test]
    fn empty_bins_draw_axes_only() {
        let mut h = histogram(&[1.0, 2.0], 1.0).unwrap();
        h.counts.iter_mut().for_each(|c| *c = 0);
        let text = render_svg(&h, "empty", "x");
        let doc = roxmltree::Document::parse(&text).unwrap();
        assert_eq!(bars(&doc), 0);
        let axes = doc
            .descendants()
            .filter(|n| n.attribute("class") == Some("axis"))
            .count();
        assert_eq!(axes, 2);
    }
}
