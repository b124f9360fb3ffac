use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use fq_core::amoeba::{amoeba_contains, is_lee_yang, m_stability_probe, Membership};
use fq_core::constructions::*;
use fq_core::error::FqError;
use fq_core::genericity::{is_generic, is_uniformly_generic};
use fq_core::measures::{spectrum_rational_approx, SpectrumTable};
use fq_core::polyring::{ModelFile, TrigMapRep};
use fq_core::polytope::{is_unfolded, mixed_volume, LatticePolytope, Polytope};
use fq_core::rootfind::{real_roots_1d, verify_real_rooted, TrigPoly1};
use serde::Deserialize;
use serde_json::json;

use crate::manifest::RunManifest;
use crate::output::{f, Plot, Sink, Style};
use crate::{Cli, Cmd, Format};

#[derive(Debug)]
pub enum CliError {
    /// bad input files or parameters: exit 2
    Usage(String),
    /// computation failed: exit 1
    Compute(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) | CliError::Compute(s) => f.write_str(s),
        }
    }
}

impl From<FqError> for CliError {
    fn from(e: FqError) -> Self {
        match e {
            FqError::InvalidInput(_) | FqError::Parse(_) | FqError::GammaNotPrimitive(_) => CliError::Usage(e.to_string()),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Compute(format!("cannot write output: {e}"))
    }
}

type Res<T> = Result<T, CliError>;

struct Input {
    path: PathBuf,
    bytes: Vec<u8>,
}

impl Input {
    fn read(path: &Path) -> Res<Input> {
        let bytes = fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Ok(Input { path: path.to_path_buf(), bytes })
    }

    fn text(&self) -> Res<&str> {
        std::str::from_utf8(&self.bytes).map_err(|e| CliError::Usage(format!("{}: not UTF-8: {e}", self.path.display())))
    }

    fn json<T: for<'de> Deserialize<'de>>(&self) -> Res<T> {
        serde_json::from_str(self.text()?).map_err(|e| CliError::Usage(format!("{}: {e}", self.path.display())))
    }

    fn model(&self) -> Res<ModelFile> {
        self.json()
    }

    fn trig_map(&self) -> Res<TrigMapRep> {
        self.model()?.into_trig_map().map_err(|e| CliError::Usage(format!("{}: {e}", self.path.display())))
    }

    fn example1(&self) -> Res<Example1Spec> {
        Example1Spec::from_json(self.text()?).map_err(|e| CliError::Usage(format!("{}: {e}", self.path.display())))
    }

    fn cutproject(&self) -> Res<CutProjectSpec> {
        let cp: CutProjectSpec = self.json()?;
        cp.validate().map_err(|e| CliError::Usage(format!("{}: {e}", self.path.display())))?;
        Ok(cp)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PolytopeFile {
    Bare(Vec<Vec<Vec<f64>>>),
    Named { polytopes: Vec<Vec<Vec<f64>>> },
}

enum Tuple {
    Lattice(Vec<LatticePolytope>),
    Real(Vec<Polytope<f64>>),
}

fn polytopes(inp: &Input) -> Res<Tuple> {
    let raw = match inp.json::<PolytopeFile>()? {
        PolytopeFile::Bare(v) | PolytopeFile::Named { polytopes: v } => v,
    };
    if raw.is_empty() {
        return Err(CliError::Usage(format!("{}: no polytopes", inp.path.display())));
    }
    let integral = raw.iter().flatten().flatten().all(|v| v.fract() == 0.0 && v.abs() < 1e15);
    let bad = |e: FqError| CliError::Usage(format!("{}: {e}", inp.path.display()));
    if integral {
        let ps = raw
            .iter()
            .map(|p| LatticePolytope::from_exponents(&p.iter().map(|v| v.iter().map(|x| *x as i64).collect()).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(bad)?;
        Ok(Tuple::Lattice(ps))
    } else {
        Ok(Tuple::Real(raw.iter().map(|p| Polytope::new(p)).collect::<Result<Vec<_>, _>>().map_err(bad)?))
    }
}

fn positive(name: &str, v: f64) -> Res<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--{name} must be positive")))
    }
}

fn spectrum_rows(t: &SpectrumTable) -> (Vec<String>, Vec<Vec<String>>) {
    let nl = t.entries.first().and_then(|e| e.label.as_ref()).map_or(0, |l| l.len());
    let nf = t.window.dim();
    let mut header: Vec<String> = (1..=nl).map(|i| format!("l{i}")).collect();
    header.extend((1..=nf).map(|i| if nf == 1 { "frequency".to_string() } else { format!("frequency{i}") }));
    header.extend(["re".to_string(), "im".to_string()]);
    let rows = t
        .entries
        .iter()
        .map(|e| {
            let mut r: Vec<String> = e.label.iter().flatten().map(|v| v.to_string()).collect();
            r.extend(e.frequency.iter().map(|v| f(*v)));
            r.extend([f(e.coefficient.re), f(e.coefficient.im)]);
            r
        })
        .collect();
    (header, rows)
}

fn stem_plot(title: &str, t: &SpectrumTable) -> Plot {
    Plot {
        title: title.into(),
        x_label: "frequency".into(),
        y_label: "|coefficient|".into(),
        points: t.entries.iter().map(|e| (e.frequency[0], e.coefficient.norm())).collect(),
        style: Style::Stem,
    }
}

fn emit_table(sink: &mut Sink, format: Format, name: &str, header: &[String], rows: &[Vec<String>], plot: Option<Plot>) -> Res<()> {
    match format {
        Format::Json => {
            let objs: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|r| header.iter().cloned().zip(r.iter().map(|v| v.parse::<f64>().map_or(json!(v), |x| json!(x)))).collect())
                .collect();
            sink.json(&format!("{name}.json"), &objs)?;
        }
        Format::Csv => sink.csv(&format!("{name}.csv"), header, rows)?,
        Format::Svg => {
            sink.csv(&format!("{name}.csv"), header, rows)?;
            if let Some(p) = plot {
                sink.svg(&format!("{name}.svg"), &p)?;
            }
        }
    }
    Ok(())
}

fn params(cmd: &Cmd, cli: &Cli) -> serde_json::Value {
    json!({ "command": format!("{cmd:?}"), "format": cli.common.format })
}

pub fn run(cli: &Cli) -> Res<u8> {
    let c = &cli.common;
    let mut inputs: Vec<Input> = Vec::new();
    for p in input_paths(&cli.cmd) {
        inputs.push(Input::read(p)?);
    }
    let name = subcommand_name(&cli.cmd);
    // parse everything up front so --dry-run validates the same way
    let prepared = prepare(&cli.cmd, &inputs)?;
    if c.dry_run {
        println!("{name}: inputs valid ({} file(s))", inputs.len());
        return Ok(0);
    }
    let refs: Vec<(&Path, &[u8])> = inputs.iter().map(|i| (i.path.as_path(), i.bytes.as_slice())).collect();
    let manifest = RunManifest::new(name, &refs, params(&cli.cmd, cli), c.seed);
    let mut sink = Sink::new(&c.out, manifest)?;
    let code = execute(&cli.cmd, prepared, &mut sink, c.format)?;
    let m = sink.finish()?;
    eprintln!("manifest: {}", m.display());
    Ok(code)
}

fn subcommand_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Construct { .. } => "construct",
        Cmd::Roots { .. } => "roots",
        Cmd::Spectrum { .. } => "spectrum",
        Cmd::Cutproject { .. } => "cutproject",
        Cmd::Generic { .. } => "generic",
        Cmd::Unfolded { .. } => "unfolded",
        Cmd::Mixedvol { .. } => "mixedvol",
        Cmd::Amoeba { .. } => "amoeba",
        Cmd::Leeyang { .. } => "leeyang",
        Cmd::Stability { .. } => "stability",
        Cmd::Verify { .. } => "verify",
        Cmd::Plot { .. } => "plot",
    }
}

fn one(p: &Path) -> Vec<&Path> {
    vec![p]
}

fn input_paths(cmd: &Cmd) -> Vec<&Path> {
    match cmd {
        Cmd::Construct { spec, .. } | Cmd::Cutproject { spec, .. } => one(spec),
        Cmd::Roots { model, spec, .. } | Cmd::Spectrum { model, spec, .. } | Cmd::Verify { model, spec, .. } => {
            model.iter().chain(spec.iter()).map(|p| p.as_path()).collect()
        }
        Cmd::Generic { model, .. } | Cmd::Amoeba { model, .. } | Cmd::Leeyang { model, .. } | Cmd::Stability { model, .. } => one(model),
        Cmd::Unfolded { polytopes } | Cmd::Mixedvol { polytopes } => one(polytopes),
        Cmd::Plot { input } => one(input),
    }
}

enum Prepared {
    Spec(Example1Spec),
    Map(TrigMapRep),
    Model(ModelFile),
    Cut(CutProjectSpec),
    Tuple(Tuple),
    Csv(Vec<String>, Vec<Vec<String>>),
}

fn prepare(cmd: &Cmd, inputs: &[Input]) -> Res<Prepared> {
    let inp = &inputs[0];
    Ok(match cmd {
        Cmd::Construct { window, .. } => {
            positive("window", *window)?;
            Prepared::Spec(inp.example1()?)
        }
        Cmd::Roots { spec, window, tol, .. } | Cmd::Verify { spec, window, tol, .. } | Cmd::Spectrum { spec, window, tol, .. } => {
            positive("window", *window)?;
            positive("tol", *tol)?;
            if spec.is_some() {
                Prepared::Spec(inp.example1()?)
            } else {
                Prepared::Map(inp.trig_map()?)
            }
        }
        Cmd::Cutproject { window, labels, .. } => {
            positive("window", *window)?;
            if *labels < 0 {
                return Err(CliError::Usage("--labels must be nonnegative".into()));
            }
            Prepared::Cut(inp.cutproject()?)
        }
        Cmd::Generic { .. } | Cmd::Amoeba { .. } | Cmd::Leeyang { .. } => {
            let m = inp.model()?;
            m.laurent_map().map_err(|e| CliError::Usage(format!("{}: {e}", inp.path.display())))?;
            Prepared::Model(m)
        }
        Cmd::Stability { delta, .. } => {
            positive("delta", *delta)?;
            Prepared::Map(inp.trig_map()?)
        }
        Cmd::Unfolded { .. } | Cmd::Mixedvol { .. } => Prepared::Tuple(polytopes(inp)?),
        Cmd::Plot { .. } => {
            let (h, r) = read_csv(inp)?;
            Prepared::Csv(h, r)
        }
    })
}

fn read_csv(inp: &Input) -> Res<(Vec<String>, Vec<Vec<String>>)> {
    let mut lines = inp.text()?.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CliError::Usage(format!("{}: empty CSV", inp.path.display())))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for (i, l) in lines.enumerate() {
        let r: Vec<String> = l.split(',').map(|s| s.trim().to_string()).collect();
        if r.len() != header.len() {
            return Err(CliError::Usage(format!("{}: data row {} has {} fields, expected {}", inp.path.display(), i + 1, r.len(), header.len())));
        }
        rows.push(r);
    }
    Ok((header, rows))
}

fn execute(cmd: &Cmd, prepared: Prepared, sink: &mut Sink, format: Format) -> Res<u8> {
    match (cmd, prepared) {
        (Cmd::Construct { window, .. }, Prepared::Spec(spec)) => {
            let p = build_example1(&spec)?;
            let lat = lambda_p0(&spec)?;
            let roots = enumerate_roots_example1(&spec, *window)?;
            sink.json("model.json", &p.to_model())?;
            sink.json("lattice.json", &lat)?;
            let (header, rows) = root_rows(&roots, spec.n);
            let plot = Plot {
                title: format!("roots in [-{window}, {window}]"),
                x_label: "x1".into(),
                y_label: "multiplicity".into(),
                points: roots.points.iter().map(|(x, k)| (x[0], *k as f64)).collect(),
                style: Style::Stem,
            };
            emit_table(sink, format, "roots", &header, &rows, Some(plot))?;
            println!("density {} (other sign choice {}), {} roots in window", lat.delta, lat.delta_plus, roots.total());
            Ok(0)
        }
        (Cmd::Roots { window, tol, .. }, Prepared::Spec(spec)) => {
            let roots = enumerate_roots_example1(&spec, *window)?;
            let (header, rows) = root_rows(&roots, spec.n);
            let plot = Plot {
                title: "roots".into(),
                x_label: "x1".into(),
                y_label: "multiplicity".into(),
                points: roots.points.iter().map(|(x, k)| (x[0], *k as f64)).collect(),
                style: Style::Stem,
            };
            emit_table(sink, format, "roots", &header, &rows, Some(plot))?;
            println!("{} roots, max residual {:.2e} (tolerance {tol:e})", roots.total(), max_residual(&spec, &roots)?);
            Ok(0)
        }
        (Cmd::Roots { window, tol, .. }, Prepared::Map(p)) => {
            let fp = TrigPoly1::from_trig_map(&p)?;
            let found = real_roots_1d(&fp, -window, *window, fp.imag_band(), *tol)?;
            let header = vec!["re".to_string(), "im".to_string(), "multiplicity".to_string(), "needs_review".to_string()];
            let rows: Vec<Vec<String>> =
                found.iter().map(|r| vec![f(r.re), f(r.im), r.multiplicity.to_string(), r.needs_review.to_string()]).collect();
            let plot = Plot {
                title: "roots".into(),
                x_label: "Re".into(),
                y_label: "Im".into(),
                points: found.iter().map(|r| (r.re, r.im)).collect(),
                style: Style::Scatter,
            };
            emit_table(sink, format, "roots", &header, &rows, Some(plot))?;
            let total: usize = found.iter().map(|r| r.multiplicity).sum();
            println!("{total} roots with |Im| <= {:.3}", fp.imag_band());
            Ok(0)
        }
        (Cmd::Spectrum { window, tol, .. }, Prepared::Spec(spec)) => {
            let t = example1_spectrum(&spec, *window, *tol)?;
            let (header, rows) = spectrum_rows(&t);
            emit_table(sink, format, "spectrum", &header, &rows, Some(stem_plot("Fourier-Bohr coefficients", &t)))?;
            println!("{} coefficients above {tol:e}; support bound {}", t.entries.len(), support_bound(&spec, *window)?);
            Ok(0)
        }
        (Cmd::Spectrum { window, .. }, Prepared::Map(p)) => {
            let t = spectrum_rational_approx(p.q(), p.m_scalars(), *window)?;
            let (header, rows) = spectrum_rows(&t);
            emit_table(sink, format, "spectrum", &header, &rows, Some(stem_plot("approximant spectrum", &t)))?;
            println!("{} atoms ({})", t.entries.len(), t.normalization);
            Ok(0)
        }
        (Cmd::Cutproject { window, labels, .. }, Prepared::Cut(cp)) => {
            let mut rows = Vec::new();
            for j in [1u8, 2] {
                for (t, _) in &cutproject_multiset(&cp, j, 0.0, *window)?.points {
                    rows.push(vec![f(t[0]), j.to_string()]);
                }
            }
            rows.sort_by(|a, b| a[0].parse::<f64>().unwrap_or(0.0).total_cmp(&b[0].parse::<f64>().unwrap_or(0.0)));
            let atoms = rows.len();
            emit_table(sink, format, "atoms", &["t".to_string(), "set".to_string()], &rows, None)?;
            let th = cp.theta.value;
            let mut srows = Vec::new();
            let mut pts = Vec::new();
            for l1 in -labels..=*labels {
                for l2 in -labels..=*labels {
                    let w = l1 as f64 * th.cos() + l2 as f64 * th.sin();
                    for j in [1u8, 2] {
                        let c = cutproject_fb_closed(&cp, j, l1, l2)?;
                        let e = cutproject_fb_empirical(&cp, j, l1, l2, *window)?;
                        srows.push(vec![l1.to_string(), l2.to_string(), j.to_string(), f(w), f(c.re), f(c.im), f(e.re), f(e.im)]);
                        pts.push((w, c.norm()));
                    }
                }
            }
            let header: Vec<String> = ["l1", "l2", "set", "frequency", "re", "im", "empirical_re", "empirical_im"].map(String::from).to_vec();
            let plot = Plot { title: "closed-form coefficients".into(), x_label: "frequency".into(), y_label: "|coefficient|".into(), points: pts, style: Style::Stem };
            emit_table(sink, format, "spectrum", &header, &srows, Some(plot))?;
            println!("{atoms} points in [0, {window}], density {:.6} (sin theta = {:.6})", atoms as f64 / window, th.sin());
            Ok(0)
        }
        (Cmd::Generic { grid, .. }, Prepared::Model(m)) => {
            let q = m.laurent_map()?;
            let uniform = m.m_mat.is_some() && q.m() > q.n();
            let v = if uniform { is_uniformly_generic(&m.into_trig_map()?, *grid)? } else { is_generic(&q)? };
            sink.json("generic.json", &v)?;
            println!("{} ({:?} mode, {} faces, margin {:.3e})", serde_json::to_value(v.verdict).unwrap_or_default().as_str().unwrap_or("?"), v.mode, v.faces_checked, v.margin);
            Ok(0)
        }
        (Cmd::Unfolded { .. }, Prepared::Tuple(t)) => {
            let (ok, w) = match t {
                Tuple::Lattice(ps) => {
                    let (ok, w) = is_unfolded(&ps)?;
                    (ok, w.map(|u| u.iter().map(|v| v.to_string()).collect::<Vec<_>>()))
                }
                Tuple::Real(ps) => {
                    let (ok, w) = is_unfolded(&ps)?;
                    (ok, w.map(|u| u.iter().map(|v| v.to_string()).collect::<Vec<_>>()))
                }
            };
            sink.json("unfolded.json", &json!({ "unfolded": ok, "witness": w }))?;
            match w {
                None => println!("unfolded"),
                Some(u) => println!("folded (direction [{}])", u.join(", ")),
            }
            Ok(0)
        }
        (Cmd::Mixedvol { .. }, Prepared::Tuple(t)) => {
            let v = match t {
                Tuple::Lattice(ps) => mixed_volume(&ps)?.to_string(),
                Tuple::Real(ps) => f(mixed_volume(&ps)?),
            };
            sink.json("mixedvol.json", &json!({ "mixed_volume": v }))?;
            println!("{v}");
            Ok(0)
        }
        (Cmd::Amoeba { window, points, grid, tol, .. }, Prepared::Model(m)) => {
            let q = m.laurent_map()?;
            let q0 = &q.components()[0];
            let mm = q0.nvars();
            if mm > 2 || *points < 2 {
                return Err(CliError::Usage("amoeba sections need m <= 2 and --points >= 2".into()));
            }
            let axis: Vec<f64> = (0..*points).map(|i| -window + 2.0 * window * i as f64 / (*points - 1) as f64).collect();
            let xs: Vec<Vec<f64>> = if mm == 1 { axis.iter().map(|a| vec![*a]).collect() } else { axis.iter().flat_map(|a| axis.iter().map(move |b| vec![*a, *b])).collect() };
            use rayon::prelude::*;
            let reps = xs.par_iter().map(|x| amoeba_contains(q0, x, *tol, *grid)).collect::<Result<Vec<_>, _>>()?;
            let mut header: Vec<String> = (1..=mm).map(|i| format!("x{i}")).collect();
            header.extend(["membership".to_string(), "min_gap".to_string()]);
            let label = |m: Membership| match m {
                Membership::Yes => "in",
                Membership::No => "out",
                Membership::BoundaryUndecided => "boundary",
            };
            let rows: Vec<Vec<String>> = xs
                .iter()
                .zip(&reps)
                .map(|(x, r)| x.iter().map(|v| f(*v)).chain([label(r.membership).to_string(), f(r.min_gap)]).collect())
                .collect();
            let plot = Plot {
                title: "amoeba section (inside points)".into(),
                x_label: "x1".into(),
                y_label: if mm == 2 { "x2".into() } else { "".into() },
                points: xs.iter().zip(&reps).filter(|(_, r)| r.membership != Membership::No).map(|(x, _)| (x[0], if mm == 2 { x[1] } else { 0.0 })).collect(),
                style: Style::Scatter,
            };
            emit_table(sink, format, "amoeba", &header, &rows, Some(plot))?;
            let inside = reps.iter().filter(|r| r.membership == Membership::Yes).count();
            let undecided = reps.iter().filter(|r| r.membership == Membership::BoundaryUndecided).count();
            println!("{} points: {inside} inside, {undecided} undecided", reps.len());
            Ok(0)
        }
        (Cmd::Leeyang { grid, .. }, Prepared::Model(m)) => {
            let q = m.laurent_map()?;
            let r = is_lee_yang(&q.components()[0], *grid)?;
            sink.json("leeyang.json", &r)?;
            println!("{} ({} samples)", serde_json::to_value(r.verdict).unwrap_or_default().as_str().unwrap_or("?"), r.samples);
            Ok(0)
        }
        (Cmd::Stability { delta, grid, .. }, Prepared::Map(p)) => {
            let r = m_stability_probe(p.q(), p.m_f64(), *delta, *grid)?;
            sink.json("stability.json", &r)?;
            println!("{} ({} perturbations, {} points, clearance {:.3e})", serde_json::to_value(r.verdict).unwrap_or_default().as_str().unwrap_or("?"), r.perturbations, r.points, r.min_clearance);
            Ok(0)
        }
        (Cmd::Verify { window, .. }, Prepared::Spec(spec)) => {
            let r = verify_example1(&spec, *window)?;
            sink.json("verify.json", &r)?;
            let line = |ok: bool, what: String| println!("{} {what}", if ok { "PASS" } else { "FAIL" });
            line(r.max_residual < 1e-10, format!("residuals: max |P(x)| = {:.2e}", r.max_residual));
            line(r.density_gap < 0.01, format!("density: {} roots, {:.6} vs {:.6}", r.roots, r.density, r.delta));
            if let (Some(g), Some(im)) = (r.contour_max_gap, r.contour_max_im) {
                line(g < 1e-8 && im < 1e-8, format!("real-rootedness: contour search agrees to {g:.2e}, max |Im| {im:.2e}"));
            }
            line((r.coefficient_zero.re - r.delta).abs() < 1e-6, format!("mean: F(0) = {:.10}", r.coefficient_zero.re));
            if let Some(ps) = &r.poisson {
                let worst = ps.checks.iter().map(|c| c.discrepancy).fold(0.0, f64::max);
                line(ps.pass, format!("Poisson summation: max discrepancy {worst:.2e}"));
            }
            println!("{}", if r.pass { "PASS" } else { "FAIL" });
            Ok(if r.pass { 0 } else { 1 })
        }
        (Cmd::Verify { window, tol, .. }, Prepared::Map(p)) => {
            let r = verify_real_rooted(&p, *window, *tol)?;
            sink.json("verify.json", &r)?;
            println!("{} real-rootedness: {} of {} roots real, max |Im| {:.2e}", if r.max_abs_im < 1e-8 { "PASS" } else { "FAIL" }, r.real_count, r.total_count, r.max_abs_im);
            println!("density {:.6} vs mixed volume {:.6}", r.real_density, r.expected);
            println!("{}", if r.pass { "PASS" } else { "FAIL" });
            Ok(if r.pass { 0 } else { 1 })
        }
        (Cmd::Plot { input }, Prepared::Csv(header, rows)) => {
            let plot = plot_from_csv(input, &header, &rows)?;
            sink.svg("plot.svg", &plot)?;
            println!("{} points plotted", plot.points.len());
            Ok(0)
        }
        _ => Err(CliError::Compute("internal: inputs do not match subcommand".into())),
    }
}

fn root_rows(roots: &fq_core::measures::Multiset, n: usize) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    header.push("multiplicity".into());
    let rows = roots.points.iter().map(|(x, k)| x.iter().map(|v| f(*v)).chain([k.to_string()]).collect()).collect();
    (header, rows)
}

fn plot_from_csv(input: &Path, header: &[String], rows: &[Vec<String>]) -> Res<Plot> {
    let col = |name: &str| header.iter().position(|h| h == name);
    let num = |r: &Vec<String>, i: usize| -> Res<f64> {
        r[i].parse::<f64>().map_err(|_| CliError::Usage(format!("{}: non-numeric value '{}' in column {}", input.display(), r[i], header[i])))
    };
    let x_col = header.iter().position(|h| h.starts_with("frequency")).unwrap_or(0);
    let (y_label, style, ys): (String, Style, Box<dyn Fn(&Vec<String>) -> Res<f64>>) = match (col("re"), col("im"), col("multiplicity")) {
        (Some(a), Some(b), _) if x_col != a => ("|coefficient|".into(), Style::Stem, Box::new(move |r| Ok(num(r, a)?.hypot(num(r, b)?)))),
        (_, _, Some(m)) => ("multiplicity".into(), Style::Stem, Box::new(move |r| num(r, m))),
        (_, Some(b), _) => ("Im".into(), Style::Scatter, Box::new(move |r| num(r, b))),
        _ if header.len() > 1 => (header[1].clone(), Style::Scatter, Box::new(move |r| num(r, 1))),
        _ => ("".into(), Style::Stem, Box::new(|_| Ok(1.0))),
    };
    let mut points = Vec::with_capacity(rows.len());
    for r in rows {
        points.push((num(r, x_col)?, ys(r)?));
    }
    Ok(Plot { title: input.display().to_string(), x_label: header[x_col].clone(), y_label, points, style })
}
