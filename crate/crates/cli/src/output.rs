use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::manifest::RunManifest;

pub const CSV_VERSION: &str = "fq-csv v1";

/// Collects artifacts under the output directory and records them in the manifest.
pub struct Sink {
    dir: PathBuf,
    pub manifest: RunManifest,
}

impl Sink {
    pub fn new(dir: &Path, manifest: RunManifest) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Sink { dir: dir.to_path_buf(), manifest })
    }

    fn write(&mut self, name: &str, body: &str) -> std::io::Result<()> {
        fs::write(self.dir.join(name), body)?;
        self.manifest.artifacts.push(name.to_string());
        Ok(())
    }

    pub fn csv(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> std::io::Result<()> {
        let mut s = format!("# {CSV_VERSION} run={}\n{}\n", self.manifest.run, header.join(","));
        for r in rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        self.write(name, &s)
    }

    pub fn json<T: serde::Serialize>(&mut self, name: &str, value: &T) -> std::io::Result<()> {
        let v = serde_json::json!({ "run": self.manifest.run, "report": value });
        self.write(name, &(serde_json::to_string_pretty(&v).expect("serializable") + "\n"))
    }

    pub fn svg(&mut self, name: &str, plot: &Plot) -> std::io::Result<()> {
        let body = plot.render(&self.manifest.run);
        self.write(name, &body)
    }

    pub fn finish(mut self) -> std::io::Result<PathBuf> {
        self.manifest.artifacts.sort();
        let p = self.dir.join("manifest.json");
        fs::write(&p, serde_json::to_string_pretty(&self.manifest).expect("serializable") + "\n")?;
        Ok(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Style {
    Stem,
    Scatter,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

const W: f64 = 800.0;
const H: f64 = 400.0;
const PAD: f64 = 50.0;

impl Plot {
    pub fn render(&self, run: &str) -> String {
        let finite: Vec<(f64, f64)> = self.points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &finite {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if finite.is_empty() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if self.style == Style::Stem {
            y0 = y0.min(0.0);
        }
        if x1 - x0 < 1e-12 {
            (x0, x1) = (x0 - 0.5, x1 + 0.5);
        }
        if y1 - y0 < 1e-12 {
            (y0, y1) = (y0 - 0.5, y1 + 0.5);
        }
        let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
        let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
        let _ = writeln!(s, "<!-- run={run} -->");
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="24" font-size="16" text-anchor="middle">{}</text>"#, W / 2.0, esc(&self.title));
        let _ = writeln!(
            s,
            r#"<polyline points="{PAD},{PAD} {PAD},{b} {r},{b}" fill="none" stroke="black"/>"#,
            b = H - PAD,
            r = W - PAD
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, esc(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="14" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
            H / 2.0,
            H / 2.0,
            esc(&self.y_label)
        );
        for (v, anchor, x, y) in [(x0, "start", PAD, H - PAD + 16.0), (x1, "end", W - PAD, H - PAD + 16.0)] {
            let _ = writeln!(s, r#"<text x="{x}" y="{y}" font-size="10" text-anchor="{anchor}">{}</text>"#, fmt_tick(v));
        }
        for (v, y) in [(y0, H - PAD), (y1, PAD)] {
            let _ = writeln!(s, r#"<text x="{}" y="{y}" font-size="10" text-anchor="end">{}</text>"#, PAD - 4.0, fmt_tick(v));
        }
        for &(x, y) in &finite {
            match self.style {
                Style::Stem => {
                    let _ = writeln!(
                        s,
                        r#"<line x1="{px:.2}" y1="{z:.2}" x2="{px:.2}" y2="{py:.2}" stroke="steelblue"/><circle cx="{px:.2}" cy="{py:.2}" r="2" fill="steelblue"/>"#,
                        px = sx(x),
                        z = sy(0.0f64.clamp(y0, y1)),
                        py = sy(y)
                    );
                }
                Style::Scatter => {
                    let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="steelblue"/>"#, sx(x), sy(y));
                }
            }
        }
        s.push_str("</svg>\n");
        s
    }
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn f(v: f64) -> String {
    format!("{v}")
}
