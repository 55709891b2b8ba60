//! Minimal SVG renders for the analysis outputs. Data always ships as
//! JSON/CSV; these vector renders are optional companions.

/// Vertical bar chart; one bar per (label, value).
pub fn bar_chart_svg(title: &str, bars: &[(String, f64)]) -> String {
    let width = 80 + bars.len().max(1) * 60;
    let height = 320;
    let max = bars.iter().map(|(_, v)| *v).fold(f64::MIN, f64::max).max(1e-9);
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\">\n"
    ));
    s.push_str(&format!(
        "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">{title}</text>\n"
    ));
    for (i, (label, value)) in bars.iter().enumerate() {
        let bar_h = (value / max * 220.0).max(1.0);
        let x = 50 + i * 60;
        let y = 260.0 - bar_h;
        s.push_str(&format!(
            "<rect x=\"{x}\" y=\"{y:.1}\" width=\"40\" height=\"{bar_h:.1}\" fill=\"#4878a8\"/>\n"
        ));
        s.push_str(&format!(
            "<text x=\"{tx}\" y=\"{ty:.1}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{value:.1}</text>\n",
            tx = x + 20,
            ty = y - 4.0
        ));
        s.push_str(&format!(
            "<text x=\"{tx}\" y=\"278\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{label}</text>\n",
            tx = x + 20
        ));
    }
    s.push_str("</svg>\n");
    s
}

/// Scatter of 2-d points colored by cluster assignment.
pub fn scatter_svg(title: &str, points: &[(f64, f64, usize)]) -> String {
    const PALETTE: [&str; 8] = [
        "#4878a8", "#e1812c", "#3a923a", "#c03d3e", "#9372b2", "#846c5b", "#d684bd", "#7f7f7f",
    ];
    let (width, height) = (420, 360);
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for (x, y, _) in points {
        xmin = xmin.min(*x);
        xmax = xmax.max(*x);
        ymin = ymin.min(*y);
        ymax = ymax.max(*y);
    }
    let spanx = (xmax - xmin).max(1e-9);
    let spany = (ymax - ymin).max(1e-9);
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\">\n"
    ));
    s.push_str(&format!(
        "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">{title}</text>\n"
    ));
    for (x, y, cluster) in points {
        let px = 30.0 + (x - xmin) / spanx * 360.0;
        let py = 330.0 - (y - ymin) / spany * 290.0;
        let color = PALETTE[cluster % PALETTE.len()];
        s.push_str(&format!(
            "<circle cx=\"{px:.1}\" cy=\"{py:.1}\" r=\"4\" fill=\"{color}\" fill-opacity=\"0.8\"/>\n"
        ));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bar_chart_is_well_formed() {
        let svg = bar_chart_svg("test", &[("a".into(), 1.0), ("b".into(), 2.0)]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<rect").count(), 2);
    }

    #[test]
    fn scatter_handles_degenerate_extents() {
        let svg = scatter_svg("t", &[(1.0, 1.0, 0), (1.0, 1.0, 1)]);
        assert_eq!(svg.matches("<circle").count(), 2);
    }
}
