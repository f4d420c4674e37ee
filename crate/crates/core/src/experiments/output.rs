use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::report::ExperimentReport;
use crate::error::Result;
use crate::krylov::IterationTrace;

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Writes `report.json`, one CSV per trace and, with `svg`, one chart per
/// trace. Returns the written paths.
pub fn write_outputs(report: &ExperimentReport, dir: &Path, svg: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let json = dir.join("report.json");
    write_atomic(&json, report.to_json()?.as_bytes())?;
    written.push(json);
    for t in &report.traces {
        let stem = file_stem(&t.label);
        let csv = dir.join(format!("{stem}.csv"));
        write_atomic(&csv, t.trace.to_csv().as_bytes())?;
        written.push(csv);
        if svg {
            let path = dir.join(format!("{stem}.svg"));
            write_atomic(&path, trace_svg(&t.label, &t.trace).as_bytes())?;
            written.push(path);
        }
    }
    Ok(written)
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 56.0;

fn polyline(points: &[(f64, f64)], color: &str) -> String {
    let coords: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    format!(r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, coords.join(" "))
}

type Series<'a> = (&'a str, &'a str, Vec<(f64, f64)>);

/// Line chart of `log10` residual and distance against `n`.
pub fn trace_svg(title: &str, trace: &IterationTrace) -> String {
    let floor = 1e-300;
    let series: [Series; 2] = [
        ("residual", "#1f77b4", trace.rows.iter().map(|r| (r.n as f64, r.residual.max(floor).log10())).collect()),
        (
            "distance",
            "#d62728",
            trace.rows.iter().filter_map(|r| r.distance.map(|d| (r.n as f64, d.max(floor).log10()))).collect(),
        ),
    ];
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.2.iter().copied()).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if all.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1.0 {
        x1 = x0 + 1.0;
    }
    y0 = y0.floor();
    y1 = y1.ceil();
    if y1 - y0 < 1.0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut out = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    out.push('\n');
    out.push_str(&format!(r#"<rect width="{W}" height="{H}" fill="white"/>"#));
    out.push('\n');
    out.push_str(&format!(r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title)));
    out.push('\n');
    out.push_str(&format!(
        r#"<path d="M{PAD},{PAD} V{} H{}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD
    ));
    out.push('\n');
    let step = ((y1 - y0) / 8.0).ceil().max(1.0);
    let mut e = y0;
    while e <= y1 + 1e-9 {
        out.push_str(&format!(
            r#"<text x="{}" y="{:.2}" text-anchor="end">1e{}</text>"#,
            PAD - 6.0,
            sy(e) + 4.0,
            e as i64
        ));
        out.push('\n');
        e += step;
    }
    out.push_str(&format!(r#"<text x="{PAD}" y="{}">{}</text>"#, H - PAD + 18.0, x0 as i64));
    out.push_str(&format!(r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, W - PAD, H - PAD + 18.0, x1 as i64));
    out.push_str(&format!(r#"<text x="{}" y="{}" text-anchor="middle">n</text>"#, W / 2.0, H - PAD + 18.0));
    out.push('\n');
    for (i, (name, color, pts)) in series.iter().enumerate() {
        if pts.is_empty() {
            continue;
        }
        let mapped: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (sx(x), sy(y))).collect();
        out.push_str(&polyline(&mapped, color));
        out.push('\n');
        out.push_str(&format!(
            r#"<text x="{}" y="{}" fill="{color}">{name}</text>"#,
            W - PAD - 80.0,
            PAD + 16.0 * (i as f64 + 1.0)
        ));
        out.push('\n');
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
    use crate::krylov::TraceRow;

    fn trace() -> IterationTrace {
        IterationTrace {
            rows: (1..=4)
                .map(|n| TraceRow {
                    n,
                    residual: 10f64.powi(-(n as i32)),
                    distance: Some(0.5),
                    approximant_norm: 1.0,
                    wall_time_s: 0.0,
                })
                .collect(),
        }
    }

    #[test]
    fn svg_has_both_series() {
        let s = trace_svg("t<1>", &trace());
        assert!(s.starts_with("<svg"));
        assert_eq!(s.matches("<polyline").count(), 2);
        assert!(s.contains("t&lt;1&gt;"));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn stems_are_sanitized() {
        assert_eq!(file_stem("loss s=1.0"), "loss_s_1_0");
    }
}
