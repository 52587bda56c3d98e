use std::fmt::Write as _;

use crate::sweep::SweepReport;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 56.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Log-log line chart of the fourth-moment gap and the squared contraction
/// norms against `k`.
pub fn sweep_svg(report: &SweepReport) -> String {
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    let pts = |get: &dyn Fn(&crate::sweep::SweepRow) -> f64| -> Vec<(f64, f64)> {
        report
            .rows
            .iter()
            .map(|r| (r.k as f64, get(r)))
            .filter(|(_, y)| *y > 0.0 && y.is_finite())
            .map(|(x, y)| (x.log10(), y.log10()))
            .collect()
    };
    series.push(("|tau4 - target|".into(), pts(&|r| r.residual.abs())));
    if let Some(first) = report.rows.first() {
        for p in 0..first.contraction_norms_f.len() {
            series.push((format!("|f ⌢{} f|²", p + 1), pts(&|r| r.contraction_norms_f[p].powi(2))));
        }
        for p in 0..first.contraction_norms_g.len() {
            series.push((format!("|g ⌢{} g|²", p + 1), pts(&|r| r.contraction_norms_g[p].powi(2))));
        }
    }
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.1.iter().copied()).collect();
    let (mut x0, mut x1, mut y0, mut y1) = all.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if all.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-9 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-9 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" text-anchor="middle">q = {}, (m, n) = ({}, {}), family {}</text>"#,
        W / 2.0,
        report.config.q,
        report.config.m,
        report.config.n,
        report.config.family.name()
    );
    let _ = writeln!(
        out,
        r#"<polyline points="{PAD},{PAD} {PAD},{b} {r},{b}" fill="none" stroke="black"/>"#,
        b = H - PAD,
        r = W - PAD
    );
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">log10 k</text>"#, W / 2.0, H - 16.0);
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">log10 value</text>"#,
        H / 2.0,
        H / 2.0
    );
    for (label, x, y) in [
        (format!("{x0:.2}"), PAD, H - PAD + 16.0),
        (format!("{x1:.2}"), W - PAD, H - PAD + 16.0),
        (format!("{y0:.2}"), PAD - 6.0, H - PAD),
        (format!("{y1:.2}"), PAD - 6.0, PAD + 4.0),
    ] {
        let anchor = if x < PAD { "end" } else { "middle" };
        let _ = writeln!(out, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{label}</text>"#);
    }
    for (i, (label, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, path.join(" "));
        let ly = PAD + 16.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{a}" y1="{ly}" x2="{b}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{c}" y="{t}">{}</text>"#,
            escape(label),
            a = W - PAD - 150.0,
            b = W - PAD - 130.0,
            c = W - PAD - 124.0,
            t = ly + 4.0
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;
    use crate::sweep::run_convergence_sweep;

    #[test]
    fn renders_one_line_per_series() {
        let cfg = ExperimentConfig { m: 2, n: 3, k_max: 3, moments_up_to: 2, ..Default::default() };
        let svg = sweep_svg(&run_convergence_sweep(&cfg).unwrap());
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        // gap + one f contraction + two g contractions, plus the axes
        assert_eq!(svg.matches("<polyline").count(), 5);
    }
}
