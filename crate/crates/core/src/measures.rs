//! Discrete measures and multisets on `R^n`: matching distance, index,
//! translation and growth bounds, affine maps with their dual action on
//! spectra, windowed Fourier-Bohr means, Poisson summation checks, and the
//! spectra of periodic approximants.

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{invalid, FqError, Result};
use crate::numeric::{linear_fit, norm2, unit_ball_volume, CSum};
use crate::poly;
use crate::polyring::{LaurentMap, LaurentPoly};
use crate::polytope::{normal_fan_representatives, LatticePolytope};
use crate::scalar::{rat_to_f64, Scalar};

type C = Complex64;

/// Axis-aligned box within which a point set is complete.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Window {
    pub fn cube(n: usize, r: f64) -> Window {
        Window { lo: vec![-r; n], hi: vec![r; n] }
    }

    pub fn interval(a: f64, b: f64) -> Window {
        Window { lo: vec![a], hi: vec![b] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(&self.lo).zip(&self.hi).all(|((v, a), b)| v >= a && v <= b)
    }

    /// Distance from `x` to the complement of the window.
    pub fn depth(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.lo).zip(&self.hi).map(|((v, a), b)| (v - a).min(b - v)).fold(f64::INFINITY, f64::min)
    }

    /// Radius of the largest centred ball inside the window.
    pub fn inner_radius(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (-a).min(*b)).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: Vec<f64>,
    pub w: C,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub atoms: Vec<Atom>,
    pub window: Window,
}

const MERGE_TOL: f64 = 1e-12;

fn lex(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs()))
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<Atom>, window: Window) -> Result<Self> {
        let n = window.dim();
        if atoms.iter().any(|a| a.x.len() != n) {
            return invalid("atom dimension does not match window");
        }
        if atoms.iter().any(|a| !window.contains(&a.x)) {
            return invalid("atom outside window");
        }
        Ok(DiscreteMeasure { atoms, window })
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    /// Sorted, with coincident atoms merged and zero weights dropped.
    pub fn normalized(&self) -> DiscreteMeasure {
        let mut a = self.atoms.clone();
        a.sort_by(|p, q| lex(&p.x, &q.x));
        let mut out: Vec<Atom> = Vec::with_capacity(a.len());
        for at in a {
            match out.last_mut() {
                Some(last) if close(&last.x, &at.x, MERGE_TOL) => last.w += at.w,
                _ => out.push(at),
            }
        }
        out.retain(|a| a.w.norm() > 0.0);
        DiscreteMeasure { atoms: out, window: self.window.clone() }
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.w.norm()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Multiset {
    pub points: Vec<(Vec<f64>, usize)>,
    pub window: Option<Window>,
}

impl Multiset {
    /// Coincident points (to `1e-12` relative) are merged into multiplicities.
    pub fn from_points(mut pts: Vec<Vec<f64>>) -> Multiset {
        pts.sort_by(|a, b| lex(a, b));
        let mut points: Vec<(Vec<f64>, usize)> = Vec::with_capacity(pts.len());
        for p in pts {
            match points.last_mut() {
                Some(last) if close(&last.0, &p, MERGE_TOL) => last.1 += 1,
                _ => points.push((p, 1)),
            }
        }
        Multiset { points, window: None }
    }

    pub fn with_window(mut self, w: Window) -> Multiset {
        self.window = Some(w);
        self
    }

    pub fn dim(&self) -> usize {
        self.points.first().map(|p| p.0.len()).or(self.window.as_ref().map(|w| w.dim())).unwrap_or(1)
    }

    pub fn total(&self) -> usize {
        self.points.iter().map(|p| p.1).sum()
    }

    pub fn to_measure(&self) -> Result<DiscreteMeasure> {
        let window = match &self.window {
            Some(w) => w.clone(),
            None => bounding_window(self.points.iter().map(|p| p.0.as_slice()), self.dim()),
        };
        DiscreteMeasure::new(self.points.iter().map(|(x, k)| Atom { x: x.clone(), w: C::new(*k as f64, 0.0) }).collect(), window)
    }

    fn expanded(&self) -> Vec<&[f64]> {
        self.points.iter().flat_map(|(x, k)| std::iter::repeat_n(x.as_slice(), *k)).collect()
    }
}

fn bounding_window<'a>(pts: impl Iterator<Item = &'a [f64]>, n: usize) -> Window {
    let mut w = Window { lo: vec![f64::INFINITY; n], hi: vec![f64::NEG_INFINITY; n] };
    for p in pts {
        for k in 0..n {
            w.lo[k] = w.lo[k].min(p[k]);
            w.hi[k] = w.hi[k].max(p[k]);
        }
    }
    for k in 0..n {
        if w.lo[k] > w.hi[k] {
            w.lo[k] = 0.0;
            w.hi[k] = 0.0;
        }
    }
    w
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Perfect matching in the bipartite graph `|a_i - b_j| <= r` (Kuhn).
fn has_matching(a: &[&[f64]], b: &[&[f64]], r: f64) -> bool {
    let n = a.len();
    let adj: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| dist(a[i], b[j]) <= r).collect()).collect();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn augment(i: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &j in &adj[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none_or(|k| augment(k, adj, seen, owner)) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, &adj, &mut seen, &mut owner) {
            return false;
        }
    }
    true
}

/// Bottleneck distance: the least `r` such that some bijection moves every
/// point by at most `r`. Infinite when the total multiplicities differ.
pub fn multiset_distance(a: &Multiset, b: &Multiset) -> f64 {
    let (pa, pb) = (a.expanded(), b.expanded());
    if pa.len() != pb.len() {
        return f64::INFINITY;
    }
    if pa.is_empty() {
        return 0.0;
    }
    let mut cand: Vec<f64> = pa.iter().flat_map(|x| pb.iter().map(move |y| dist(x, y))).collect();
    cand.sort_by(f64::total_cmp);
    cand.dedup();
    let (mut lo, mut hi) = (0, cand.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_matching(&pa, &pb, cand[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cand[lo]
}

pub fn multiset_sum(a: &Multiset, b: &Multiset) -> Result<Multiset> {
    if !a.points.is_empty() && !b.points.is_empty() && a.dim() != b.dim() {
        return invalid("multisets live in different dimensions");
    }
    let window = match (&a.window, &b.window) {
        (Some(x), Some(y)) => {
            if x.dim() != y.dim() {
                return invalid("windows have different dimensions");
            }
            // the sum is complete only on the common part
            Some(Window {
                lo: x.lo.iter().zip(&y.lo).map(|(p, q)| p.max(*q)).collect(),
                hi: x.hi.iter().zip(&y.hi).map(|(p, q)| p.min(*q)).collect(),
            })
        }
        (Some(x), None) => Some(x.clone()),
        (None, y) => y.clone(),
    };
    let mut pts: Vec<(Vec<f64>, usize)> = a.points.iter().chain(&b.points).cloned().collect();
    pts.sort_by(|p, q| lex(&p.0, &q.0));
    let mut points: Vec<(Vec<f64>, usize)> = Vec::with_capacity(pts.len());
    for (x, k) in pts {
        match points.last_mut() {
            Some(last) if close(&last.0, &x, MERGE_TOL) => last.1 += k,
            _ => points.push((x, k)),
        }
    }
    if let Some(w) = &window {
        points.retain(|p| w.contains(&p.0));
    }
    Ok(Multiset { points, window })
}

/// Largest total weight `f(atom)` inside an open ball of radius `eps`.
/// Exact in one dimension; in higher dimensions the centres tried are the
/// atoms and the midpoints of close pairs.
fn max_ball_mass(pts: &[(Vec<f64>, f64)], eps: f64) -> f64 {
    if pts.is_empty() {
        return 0.0;
    }
    let n = pts[0].0.len();
    if n == 1 {
        let mut v: Vec<(f64, f64)> = pts.iter().map(|(x, w)| (x[0], *w)).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut best: f64 = 0.0;
        let mut j = 0;
        let mut acc = 0.0;
        for i in 0..v.len() {
            while j < v.len() && v[j].0 - v[i].0 < 2.0 * eps {
                acc += v[j].1;
                j += 1;
            }
            best = best.max(acc);
            acc -= v[i].1;
        }
        return best;
    }
    let mass_at = |c: &[f64]| pts.iter().filter(|(x, _)| dist(x, c) < eps).map(|p| p.1).sum::<f64>();
    let mut best: f64 = 0.0;
    for (i, (x, _)) in pts.iter().enumerate() {
        best = best.max(mass_at(x));
        for (y, _) in &pts[i + 1..] {
            if dist(x, y) < 2.0 * eps {
                let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a + b) / 2.0).collect();
                best = best.max(mass_at(&mid));
            }
        }
    }
    best
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexReport {
    pub per_eps: Vec<(f64, usize)>,
    pub index: usize,
}

/// `sup_x` multiplicity in `B(x, eps)` for each `eps`; the index is the
/// smallest value over the schedule.
pub fn index(a: &Multiset, eps_schedule: &[f64]) -> Result<IndexReport> {
    if eps_schedule.is_empty() || eps_schedule.iter().any(|e| !(*e > 0.0)) {
        return invalid("epsilon schedule must be nonempty and positive");
    }
    let pts: Vec<(Vec<f64>, f64)> = a.points.iter().map(|(x, k)| (x.clone(), *k as f64)).collect();
    let per_eps: Vec<(f64, usize)> = eps_schedule.iter().map(|&e| (e, max_ball_mass(&pts, e).round() as usize)).collect();
    let index = per_eps.iter().map(|p| p.1).min().unwrap_or(0);
    Ok(IndexReport { per_eps, index })
}

#[derive(Clone, Debug, Serialize)]
pub struct TranslationBound {
    pub bound: f64,
    /// largest unit-ball mass within half the window
    pub inner: f64,
    /// set when the outer half carries balls much heavier than the inner half
    pub unbounded_growth: bool,
}

pub fn translation_bound(mu: &DiscreteMeasure) -> TranslationBound {
    let pts: Vec<(Vec<f64>, f64)> = mu.atoms.iter().map(|a| (a.x.clone(), a.w.norm())).collect();
    let bound = max_ball_mass(&pts, 1.0);
    let half = mu.window.inner_radius() / 2.0;
    let inner_pts: Vec<(Vec<f64>, f64)> = pts.iter().filter(|p| norm2(&p.0) <= half).cloned().collect();
    let inner = max_ball_mass(&inner_pts, 1.0);
    TranslationBound { bound, inner, unbounded_growth: bound > 4.0 * inner.max(f64::MIN_POSITIVE) && half >= 2.0 }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub radii: Vec<f64>,
    pub mass: Vec<f64>,
    pub exponent: f64,
    pub residual: f64,
    pub super_polynomial: bool,
}

/// Fits `log |mu|(B(0, r))` against `log r` on dyadic radii `R, R/2, ...`
/// (at most seven, none below 1).
pub fn growth_exponent(mu: &DiscreteMeasure) -> Result<GrowthReport> {
    let big_r = mu.window.inner_radius();
    if !(big_r >= 10.0) {
        return invalid("window radius must be at least 10");
    }
    let mut radii: Vec<f64> = (0..7).map(|j| big_r / 2f64.powi(j)).filter(|&r| r >= 1.0).collect();
    radii.reverse();
    let norms: Vec<(f64, f64)> = mu.atoms.iter().map(|a| (norm2(&a.x), a.w.norm())).collect();
    let mass: Vec<f64> = radii.iter().map(|&r| norms.iter().filter(|p| p.0 <= r).map(|p| p.1).sum()).collect();
    let usable: Vec<(f64, f64)> = radii.iter().zip(&mass).filter(|p| *p.1 > 0.0).map(|(r, m)| (r.ln(), m.ln())).collect();
    if usable.len() < 4 {
        return invalid("fewer than four dyadic radii carry mass");
    }
    let (x, y): (Vec<f64>, Vec<f64>) = usable.iter().cloned().unzip();
    let (exponent, _, residual) = linear_fit(&x, &y);
    let local: Vec<f64> = usable.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
    let super_polynomial = local.last().unwrap() > &(2.0 * local[0].max(0.0) + 1.0);
    Ok(GrowthReport { radii, mass, exponent, residual, super_polynomial })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub label: Option<Vec<i64>>,
    pub frequency: Vec<f64>,
    pub coefficient: C,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub entries: Vec<SpectrumEntry>,
    /// frequencies are complete inside this window
    pub window: Window,
    pub normalization: String,
}

impl SpectrumTable {
    /// Entries with frequencies within `1e-10` merged (labels dropped on merge).
    pub fn merged(&self) -> SpectrumTable {
        let mut e = self.entries.clone();
        e.sort_by(|a, b| lex(&a.frequency, &b.frequency));
        let mut out: Vec<SpectrumEntry> = Vec::with_capacity(e.len());
        for s in e {
            match out.last_mut() {
                Some(last) if last.frequency.iter().zip(&s.frequency).all(|(a, b)| (a - b).abs() <= 1e-10) => {
                    last.coefficient += s.coefficient;
                    if last.label != s.label {
                        last.label = None;
                    }
                }
                _ => out.push(s),
            }
        }
        SpectrumTable { entries: out, window: self.window.clone(), normalization: self.normalization.clone() }
    }

    pub fn at(&self, f: &[f64], tol: f64) -> C {
        self.entries
            .iter()
            .filter(|e| e.frequency.iter().zip(f).all(|(a, b)| (a - b).abs() <= tol))
            .map(|e| e.coefficient)
            .sum()
    }
}

fn invert(m: &[Vec<f64>]) -> Result<(nalgebra::DMatrix<f64>, f64)> {
    let n = m.len();
    if n == 0 || m.iter().any(|r| r.len() != n) {
        return invalid("matrix must be square");
    }
    let a = nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j]);
    let det = a.determinant();
    let scale = m.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max).powi(n as i32);
    if !(det.abs() > 1e-14 * scale) {
        return Err(FqError::Singular("affine map is not invertible".into()));
    }
    let inv = a.try_inverse().ok_or_else(|| FqError::Singular("affine map is not invertible".into()))?;
    Ok((inv, det))
}

/// Push-forward under `x -> M x + y`.
pub fn affine_transform(mu: &DiscreteMeasure, m: &[Vec<f64>], y: &[f64]) -> Result<DiscreteMeasure> {
    invert(m)?;
    let n = mu.dim();
    if m.len() != n || y.len() != n {
        return invalid("affine map has wrong dimension");
    }
    let apply = |x: &[f64]| -> Vec<f64> { (0..n).map(|i| (0..n).map(|j| m[i][j] * x[j]).sum::<f64>() + y[i]).collect() };
    let atoms = mu.atoms.iter().map(|a| Atom { x: apply(&a.x), w: a.w }).collect();
    let a = nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j]);
    let window = image_window(&mu.window, &a, y);
    Ok(DiscreteMeasure { atoms, window })
}

/// Spectrum of the push-forward: `s -> M^{-T} s` with weight
/// `a_s e^{-2 pi i s' . y} / |det M|`.
pub fn dual_spectrum(z: &SpectrumTable, m: &[Vec<f64>], y: &[f64]) -> Result<SpectrumTable> {
    let (inv, det) = invert(m)?;
    let n = m.len();
    if y.len() != n || z.window.dim() != n {
        return invalid("affine map has wrong dimension");
    }
    let apply = |s: &[f64]| -> Vec<f64> { (0..n).map(|i| (0..n).map(|j| inv[(j, i)] * s[j]).sum()).collect() };
    let entries = z
        .entries
        .iter()
        .map(|e| {
            let f = apply(&e.frequency);
            let ph: f64 = f.iter().zip(y).map(|(a, b)| a * b).sum();
            SpectrumEntry { label: e.label.clone(), frequency: f, coefficient: e.coefficient * C::from_polar(1.0 / det.abs(), -TAU * ph) }
        })
        .collect();
    let window = image_window(&z.window, &inv.transpose(), &vec![0.0; n]);
    Ok(SpectrumTable { entries, window, normalization: z.normalization.clone() })
}

/// A box inside the image of `w` under `x -> a x + off`: exact for diagonal
/// `a`, otherwise a cube inscribed in the image of the inscribed ball.
fn image_window(w: &Window, a: &nalgebra::DMatrix<f64>, off: &[f64]) -> Window {
    let n = w.dim();
    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || a[(i, j)] == 0.0));
    if diagonal {
        let (lo, hi): (Vec<f64>, Vec<f64>) = (0..n)
            .map(|k| {
                let (p, q) = (a[(k, k)] * w.lo[k] + off[k], a[(k, k)] * w.hi[k] + off[k]);
                (p.min(q), p.max(q))
            })
            .unzip();
        return Window { lo, hi };
    }
    let c: Vec<f64> = w.lo.iter().zip(&w.hi).map(|(p, q)| (p + q) / 2.0).collect();
    let rho = w.lo.iter().zip(&w.hi).map(|(p, q)| (q - p) / 2.0).fold(f64::INFINITY, f64::min);
    let half = rho * a.clone().singular_values().min() / (n as f64).sqrt();
    let ci: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[(i, j)] * c[j]).sum::<f64>() + off[i]).collect();
    Window { lo: ci.iter().map(|v| v - half).collect(), hi: ci.iter().map(|v| v + half).collect() }
}

const CHUNK: usize = 4096;

/// Deterministic parallel compensated sum: fixed chunks, combined in order.
fn par_csum<F: Fn(&Atom) -> C + Sync>(atoms: &[Atom], f: F) -> C {
    let parts: Vec<C> = atoms
        .par_chunks(CHUNK)
        .map(|ch| {
            let mut s = CSum::default();
            for a in ch {
                s.add(f(a));
            }
            s.total()
        })
        .collect();
    let mut s = CSum::default();
    for p in parts {
        s.add(p);
    }
    s.total()
}

/// `(c_n r^n)^{-1} sum_{|x| < r} w_x e^{-2 pi i omega . x}`.
pub fn empirical_fourier_bohr(mu: &DiscreteMeasure, omega: &[f64], r: f64) -> Result<C> {
    let n = mu.dim();
    if omega.len() != n {
        return invalid("frequency has wrong dimension");
    }
    if !(r > 0.0) || r > mu.window.inner_radius() * (1.0 + 1e-12) {
        return invalid("radius must be positive and inside the window");
    }
    let s = par_csum(&mu.atoms, |a| {
        if norm2(&a.x) < r {
            let ph: f64 = a.x.iter().zip(omega).map(|(x, w)| x * w).sum();
            a.w * C::from_polar(1.0, -TAU * ph)
        } else {
            C::new(0.0, 0.0)
        }
    });
    Ok(s / (unit_ball_volume(n) * r.powi(n as i32)))
}

/// Bohr mean of `F(exp(2 pi i M x))` when the rows of `M` are independent
/// over Q: the constant term of `F`.
pub fn bohr_mean_structured(f: &LaurentPoly) -> C {
    f.coeff(&vec![0; f.nvars()])
}

/// `M(|f|^2)` as the constant term of `F * conj(F)(1/z)`, and `sum |c|^2`.
pub fn parseval_pair(f: &LaurentPoly) -> Result<(f64, f64)> {
    let g = f.mul(&f.conj_reflect())?;
    let lhs = bohr_mean_structured(&g).re;
    let rhs = f.terms().map(|(_, c)| c.norm_sqr()).sum();
    Ok((lhs, rhs))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestFunction {
    /// `exp(-pi |x - c|^2 / sigma^2)`
    Gaussian { center: Vec<f64>, sigma: f64 },
    /// `exp(2 pi i xi . x) exp(-pi |x - c|^2 / sigma^2)`
    ModulatedGaussian { center: Vec<f64>, sigma: f64, xi: Vec<f64> },
}

impl TestFunction {
    fn parts(&self) -> (&[f64], f64, Option<&[f64]>) {
        match self {
            TestFunction::Gaussian { center, sigma } => (center, *sigma, None),
            TestFunction::ModulatedGaussian { center, sigma, xi } => (center, *sigma, Some(xi)),
        }
    }

    pub fn eval(&self, x: &[f64]) -> C {
        let (c, s, xi) = self.parts();
        let d2: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
        let ph = xi.map_or(0.0, |xi| xi.iter().zip(x).map(|(a, b)| a * b).sum());
        C::from_polar((-PI * d2 / (s * s)).exp(), TAU * ph)
    }

    /// `int h(x) e^{-2 pi i x . y} dx`.
    pub fn fourier(&self, y: &[f64]) -> C {
        let (c, s, xi) = self.parts();
        let n = c.len();
        let zero = vec![0.0; n];
        let xi = xi.unwrap_or(&zero);
        let d: Vec<f64> = y.iter().zip(xi).map(|(a, b)| a - b).collect();
        let d2: f64 = d.iter().map(|v| v * v).sum();
        let ph: f64 = d.iter().zip(c).map(|(a, b)| a * b).sum();
        C::from_polar(s.powi(n as i32) * (-PI * s * s * d2).exp(), -TAU * ph)
    }

    fn validate(&self, n: usize) -> Result<()> {
        let (c, s, xi) = self.parts();
        if !(s > 0.0) {
            return invalid("test function width must be positive");
        }
        if c.len() != n || xi.is_some_and(|v| v.len() != n) {
            return invalid("test function has wrong dimension");
        }
        Ok(())
    }
}

/// Bound on `sum |w| g(|x - c|)` over atoms outside the window, for a
/// Gaussian profile `amp * exp(-pi k |x - c|^2)`, using at most `t` mass per
/// unit ball.
fn tail_bound(t: f64, depth: f64, amp: f64, k: f64, n: usize) -> f64 {
    let mut s = 0.0;
    for j in 0..10_000 {
        let rr = depth + j as f64;
        let shell = 2.0 * n as f64 * (rr + 2.0).powi(n as i32 - 1);
        let term = t * shell * amp * (-PI * k * rr * rr).exp();
        s += term;
        if term < 1e-300 || (j > 10 && term < 1e-18 * s) {
            break;
        }
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct PoissonCheck {
    pub test: TestFunction,
    /// `sum_x w_x hat h(x)`
    pub measure_side: C,
    /// `sum_s a_s h(s)`
    pub spectrum_side: C,
    pub discrepancy: f64,
    pub truncation_bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PoissonReport {
    pub checks: Vec<PoissonCheck>,
    pub pass: bool,
}

/// Checks `<mu, hat h> = <zeta, h>` for Gaussian test functions. Both sums
/// are truncated to their windows; the truncation is bounded via the
/// translation bounds and added to `tol`.
pub fn poisson_check(mu: &DiscreteMeasure, z: &SpectrumTable, tests: &[TestFunction], tol: f64) -> Result<PoissonReport> {
    let n = mu.dim();
    if z.window.dim() != n {
        return invalid("spectrum and measure dimensions differ");
    }
    let tm = translation_bound(mu).bound;
    let spec_atoms: Vec<Atom> = z.entries.iter().map(|e| Atom { x: e.frequency.clone(), w: e.coefficient }).collect();
    let tz = translation_bound(&DiscreteMeasure { atoms: spec_atoms.clone(), window: z.window.clone() }).bound;
    let mut checks = Vec::with_capacity(tests.len());
    for h in tests {
        h.validate(n)?;
        let (c, s, xi) = h.parts();
        let zero = vec![0.0; n];
        let xi = xi.unwrap_or(&zero);
        // hat h is centred at xi with width 1/s; h is centred at c with width s
        let d_mu = mu.window.depth(xi);
        let d_z = z.window.depth(c);
        if d_mu < 3.0 / s || d_z < 3.0 * s {
            return invalid(format!("windows too small for test function of width {s}"));
        }
        let lhs = par_csum(&mu.atoms, |a| a.w * h.fourier(&a.x));
        let rhs = par_csum(&spec_atoms, |a| a.w * h.eval(&a.x));
        let bound = tail_bound(tm, d_mu, s.powi(n as i32), s * s, n) + tail_bound(tz, d_z, 1.0, 1.0 / (s * s), n);
        let discrepancy = (lhs - rhs).norm();
        checks.push(PoissonCheck { test: h.clone(), measure_side: lhs, spectrum_side: rhs, discrepancy, truncation_bound: bound, pass: discrepancy < tol + bound });
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(PoissonReport { checks, pass })
}

/// Spectrum of `Q(exp(2 pi i M x))` for exactly rational `M` with `n = 1`:
/// with `beta = 1/lcm(denominators)` and `N = M / beta`, the roots are
/// `x = (arg lambda / 2 pi + j) / beta` over torus roots `lambda` of
/// `Q(w^N)`, and the transform has atoms `beta sum m_lambda lambda^{-j}` at
/// `beta j`.
pub fn spectrum_rational_approx(q: &LaurentMap, m_k: &[Vec<Scalar>], window: f64) -> Result<SpectrumTable> {
    let (m, n) = (q.m(), q.n());
    if n != 1 {
        return Err(FqError::Unsupported("rational approximants are implemented for n = 1".into()));
    }
    if m_k.len() != m || m_k.iter().any(|r| r.len() != n) {
        return invalid(format!("M must be {m} x {n}"));
    }
    if !(window > 0.0) {
        return invalid("window must be positive");
    }
    let exact: Vec<_> = m_k
        .iter()
        .map(|r| r[0].exact.clone().ok_or_else(|| FqError::InvalidInput("M must be exactly rational".into())))
        .collect::<Result<_>>()?;
    let lcm = exact.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let beta = 1.0 / lcm.to_f64().unwrap_or(f64::INFINITY);
    let nmat: Vec<Vec<i64>> = exact
        .iter()
        .map(|r| {
            let v = r * num_rational::BigRational::from_integer(lcm.clone());
            v.to_integer().to_i64().map(|x| vec![x]).ok_or_else(|| FqError::Overflow("approximant exponents".into()))
        })
        .collect::<Result<_>>()?;
    if nmat.iter().all(|r| r[0] == 0) {
        return invalid("M must be nonzero");
    }
    let qk = q.monomial_substitute(&nmat)?;
    let comp = &qk.components()[0];
    if comp.is_zero() || comp.is_monomial() {
        return invalid("approximant is a monomial");
    }
    let lo = comp.terms().map(|(e, _)| e[0]).min().unwrap_or(0);
    let hi = comp.terms().map(|(e, _)| e[0]).max().unwrap_or(0);
    let mut c = vec![C::new(0.0, 0.0); (hi - lo) as usize + 1];
    for (e, v) in comp.terms() {
        c[(e[0] - lo) as usize] += v;
    }
    let rs: Vec<C> = poly::roots(&c)?.into_iter().filter(|r| r.norm() > 0.0).collect();
    let lambdas = poly::cluster(&rs, crate::rootfind::CLUSTER_RADIUS);
    if let Some((bad, _)) = lambdas.iter().find(|(l, _)| (l.norm() - 1.0).abs() > 1e-6) {
        return Err(FqError::NotRealRooted(format!("root of modulus {}", bad.norm())));
    }
    let jmax = (window / beta).floor() as i64;
    let entries: Vec<SpectrumEntry> = (-jmax..=jmax)
        .into_par_iter()
        .map(|j| {
            let mut s = CSum::default();
            for (l, k) in &lambdas {
                s.add(C::from_polar(*k as f64, -(j as f64) * l.arg()));
            }
            SpectrumEntry { label: Some(vec![j]), frequency: vec![beta * j as f64], coefficient: s.total() * beta }
        })
        .collect();
    Ok(SpectrumTable { entries, window: Window::cube(1, window), normalization: format!("beta = 1/{lcm}; label j at frequency beta j") })
}

/// Exact `beta` of a rational approximant, for callers labelling atoms.
pub fn approximant_beta(m_k: &[Vec<Scalar>]) -> Result<f64> {
    let mut lcm = BigInt::one();
    for r in m_k.iter().flatten() {
        let e = r.exact.as_ref().ok_or_else(|| FqError::InvalidInput("M must be exactly rational".into()))?;
        lcm = lcm.lcm(e.denom());
    }
    Ok(1.0 / rat_to_f64(&num_rational::BigRational::from_integer(lcm)))
}

#[derive(Clone, Debug, Serialize)]
pub struct Dominance {
    pub r: Vec<f64>,
    pub max_ratio: f64,
}

/// Polyradius where the monomial at vertex `v` dominates the rest of `q`:
/// `sum_{e != v} |c_e| r^{e - v} / |c_v| <= 1/2`. Moves along the normal
/// cone of `v`, doubling the step.
pub fn dominance_radius(q: &LaurentPoly, v: &[i64]) -> Result<Dominance> {
    let m = q.nvars();
    if v.len() != m {
        return invalid("vertex has wrong dimension");
    }
    let cv = q.coeff(v).norm();
    if cv == 0.0 {
        return invalid("v is not in the support");
    }
    if q.is_monomial() {
        return Ok(Dominance { r: vec![1.0; m], max_ratio: 0.0 });
    }
    let poly: LatticePolytope = q.newton_polytope()?;
    let vq: Vec<num_rational::BigRational> = v.iter().map(|&x| num_rational::BigRational::from_integer(x.into())).collect();
    let vi = poly
        .vertices()
        .iter()
        .position(|p| *p == vq)
        .ok_or_else(|| FqError::InvalidInput("v is not a vertex of the Newton polytope".into()))?;
    let cells = normal_fan_representatives(std::slice::from_ref(&poly))?;
    let u = cells
        .iter()
        .find(|c| c.faces[0].indices == [vi])
        .map(|c| c.u.iter().map(rat_to_f64).collect::<Vec<f64>>())
        .ok_or_else(|| FqError::InvalidInput("no normal direction isolates v".into()))?;
    // v minimises u, so |z^v| is largest along log|z| = -t u
    let ratio = |x: &[f64]| -> f64 {
        q.terms()
            .filter(|(e, _)| e.as_slice() != v)
            .map(|(e, c)| c.norm() * e.iter().zip(v).zip(x).map(|((a, b), t)| (a - b) as f64 * t).sum::<f64>().exp())
            .sum::<f64>()
            / cv
    };
    let mut t = 0.0;
    for k in 0..=60 {
        let x: Vec<f64> = u.iter().map(|w| -t * w).collect();
        let r = ratio(&x);
        if r <= 0.5 {
            return Ok(Dominance { r: x.iter().map(|v| v.exp()).collect(), max_ratio: r });
        }
        t = 2f64.powi(k - 4);
    }
    Err(FqError::NonConvergence("vertex does not dominate within 60 doublings".into()))
}

/// Mean of `h` over the torus `|z_j| = r_j`, by tensor trapezoid rules doubled
/// until successive values agree to `1e-10`.
pub fn constant_term_on_torus<F: Fn(&[C]) -> C + Sync>(h: F, r: &[f64]) -> Result<C> {
    let m = r.len();
    if m == 0 || r.iter().any(|v| !(*v > 0.0)) {
        return invalid("radii must be positive");
    }
    let mean = |k: usize| -> C {
        let total = k.pow(m as u32);
        let parts: Vec<C> = (0..total)
            .into_par_iter()
            .with_min_len(1024)
            .map(|idx| {
                let mut rem = idx;
                let z: Vec<C> = r
                    .iter()
                    .map(|&rj| {
                        let i = rem % k;
                        rem /= k;
                        C::from_polar(rj, TAU * i as f64 / k as f64)
                    })
                    .collect();
                h(&z)
            })
            .collect();
        let mut s = CSum::default();
        for p in parts {
            s.add(p);
        }
        s.total() / total as f64
    };
    let mut k = 16;
    let mut prev = mean(k);
    while k.pow(m as u32) <= 1 << 22 {
        k *= 2;
        let cur = mean(k);
        if (cur - prev).norm() < 1e-10 {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(FqError::NonConvergence("torus mean did not settle".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(p: &[f64]) -> Multiset {
        Multiset::from_points(p.iter().map(|&x| vec![x]).collect())
    }

    pub(crate) fn comb(r: i64) -> DiscreteMeasure {
        let atoms = (-r..=r).map(|k| Atom { x: vec![k as f64], w: C::new(1.0, 0.0) }).collect();
        DiscreteMeasure::new(atoms, Window::cube(1, r as f64)).unwrap()
    }

    fn comb_spectrum(r: i64) -> SpectrumTable {
        let entries = (-r..=r)
            .map(|k| SpectrumEntry { label: Some(vec![k]), frequency: vec![k as f64], coefficient: C::new(1.0, 0.0) })
            .collect();
        SpectrumTable { entries, window: Window::cube(1, r as f64), normalization: "comb".into() }
    }

    #[test]
    fn distance_examples() {
        assert!((multiset_distance(&ms(&[0.0, 1.0]), &ms(&[0.1, 1.05])) - 0.1).abs() < 1e-15);
        assert_eq!(multiset_distance(&ms(&[0.0, 1.0]), &ms(&[0.0, 1.0])), 0.0);
        let h = 0.25;
        let double = ms(&[0.0, 0.0]);
        assert_eq!(double.points[0].1, 2);
        assert_eq!(multiset_distance(&double, &ms(&[-h, h])), h);
        assert!(multiset_distance(&ms(&[0.0]), &ms(&[0.0, 1.0])).is_infinite());
    }

    #[test]
    fn sums() {
        let a = ms(&[0.0]);
        let s = multiset_sum(&a, &a).unwrap();
        assert_eq!(s.points, vec![(vec![0.0], 2)]);
        let e = Multiset { points: vec![], window: None };
        assert_eq!(multiset_sum(&a, &e).unwrap().points, a.points);
    }

    #[test]
    fn index_examples() {
        let c = Multiset::from_points((-20..=20).map(|k| vec![k as f64]).collect());
        assert_eq!(index(&c, &[0.5, 0.25, 0.1]).unwrap().index, 1);
        let mut pts: Vec<Vec<f64>> = (-20..=20).map(|k| vec![k as f64]).collect();
        pts.push(vec![3.0]);
        assert_eq!(index(&Multiset::from_points(pts), &[0.5, 0.1]).unwrap().index, 2);
    }

    #[test]
    fn translation_bounds() {
        assert_eq!(translation_bound(&comb(50)).bound, 2.0);
        assert!(!translation_bound(&comb(50)).unbounded_growth);
        let one = DiscreteMeasure::new(vec![Atom { x: vec![0.3], w: C::new(3.0, 0.0) }], Window::cube(1, 1.0)).unwrap();
        assert_eq!(translation_bound(&one).bound, 3.0);
    }

    #[test]
    fn growth_of_combs() {
        let g = growth_exponent(&comb(1024)).unwrap();
        assert!((g.exponent - 1.0).abs() < 0.05, "{g:?}");
        assert!(!g.super_polynomial);
        let r = 256;
        let atoms = (-r..=r)
            .flat_map(|i| (-r..=r).map(move |j| Atom { x: vec![i as f64, j as f64], w: C::new(1.0, 0.0) }))
            .collect();
        let g = growth_exponent(&DiscreteMeasure::new(atoms, Window::cube(2, r as f64)).unwrap()).unwrap();
        assert!((g.exponent - 2.0).abs() < 0.05, "{g:?}");
        assert!(growth_exponent(&comb(5)).is_err());
    }

    #[test]
    fn affine_and_dual() {
        let mu = comb(10);
        let same = affine_transform(&mu, &[vec![1.0]], &[0.0]).unwrap();
        assert_eq!(same.atoms, mu.atoms);
        let z = comb_spectrum(10);
        let dz = dual_spectrum(&z, &[vec![2.0]], &[0.0]).unwrap();
        assert!((dz.entries[0].frequency[0] + 5.0).abs() < 1e-15);
        assert!((dz.entries[0].coefficient - 0.5).norm() < 1e-15);
        let m = vec![vec![2.0]];
        let y = vec![0.3];
        let there = affine_transform(&mu, &m, &y).unwrap();
        let back = affine_transform(&there, &[vec![0.5]], &[-0.15]).unwrap();
        for (a, b) in back.atoms.iter().zip(&mu.atoms) {
            assert!((a.x[0] - b.x[0]).abs() < 1e-12);
        }
        assert!(affine_transform(&mu, &[vec![0.0]], &[0.0]).is_err());
    }

    #[test]
    fn fourier_bohr_of_comb() {
        let mu = comb(100);
        assert!((empirical_fourier_bohr(&mu, &[0.0], 100.0).unwrap() - 1.0).norm() < 0.01);
        assert!(empirical_fourier_bohr(&mu, &[0.5], 100.0).unwrap().norm() < 0.01);
    }

    #[test]
    fn structured_means() {
        let f = LaurentPoly::real(1, &[(&[0], 3.0), (&[1], 1.0)]).unwrap();
        assert_eq!(bohr_mean_structured(&f), C::new(3.0, 0.0));
        let g = LaurentPoly::from_terms(
            2,
            vec![(vec![0, 0], C::new(1.0, 2.0)), (vec![1, -1], C::new(-0.5, 0.0)), (vec![3, 2], C::new(0.0, 0.7))],
        )
        .unwrap();
        let (a, b) = parseval_pair(&g).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn poisson_on_combs() {
        let mu = comb(40);
        let z = comb_spectrum(40);
        let h = TestFunction::Gaussian { center: vec![0.0], sigma: 1.0 };
        let rep = poisson_check(&mu, &z, std::slice::from_ref(&h), 1e-10).unwrap();
        assert!(rep.pass && rep.checks[0].discrepancy < 1e-10, "{rep:?}");
        let m = vec![vec![2.0]];
        let y = vec![0.25];
        let mu2 = affine_transform(&mu, &m, &y).unwrap();
        let z2 = dual_spectrum(&z, &m, &y).unwrap();
        let tests = vec![
            TestFunction::Gaussian { center: vec![0.3], sigma: 1.5 },
            TestFunction::ModulatedGaussian { center: vec![-1.0], sigma: 2.0, xi: vec![0.7] },
        ];
        let rep = poisson_check(&mu2, &z2, &tests, 1e-10).unwrap();
        assert!(rep.checks.iter().all(|c| c.discrepancy < 1e-10), "{rep:?}");
        let wide = TestFunction::Gaussian { center: vec![0.0], sigma: 30.0 };
        assert!(poisson_check(&mu, &z, &[wide], 1e-10).is_err());
    }

    #[test]
    fn rational_approximant_quarter_roots() {
        // Q = z1 - z2^2 with M = (1, -1/2): roots are Z/2, spectrum 2 on 2Z
        let q = LaurentMap::new(vec![LaurentPoly::real(2, &[(&[1, 0], 1.0), (&[0, 2], -1.0)]).unwrap()]).unwrap();
        let m = vec![vec![Scalar::int(1)], vec![Scalar::ratio(-1, 2)]];
        let t = spectrum_rational_approx(&q, &m, 6.0).unwrap();
        for e in &t.entries {
            let f = e.frequency[0];
            let want = if (f / 2.0 - (f / 2.0).round()).abs() < 1e-12 { 2.0 } else { 0.0 };
            assert!((e.coefficient - want).norm() < 1e-10, "{e:?}");
        }
        let off = LaurentMap::new(vec![LaurentPoly::real(2, &[(&[1, 0], 1.0), (&[0, 2], -2.0)]).unwrap()]).unwrap();
        assert!(matches!(spectrum_rational_approx(&off, &m, 6.0), Err(FqError::NotRealRooted(_))));
    }

    #[test]
    fn dominance_examples() {
        let q = LaurentPoly::real(1, &[(&[0], 1.0), (&[1], 0.1)]).unwrap();
        let d = dominance_radius(&q, &[0]).unwrap();
        assert!(d.r[0] <= 5.0 && d.max_ratio <= 0.5);
        let q = LaurentPoly::real(1, &[(&[0], 1.0), (&[1], 1.0)]).unwrap();
        let d = dominance_radius(&q, &[0]).unwrap();
        assert!(d.r[0] <= 0.5 && d.max_ratio <= 0.5);
        let d = dominance_radius(&q, &[1]).unwrap();
        assert!(d.r[0] >= 2.0);
        let q = LaurentPoly::real(2, &[(&[1, 1], 2.0)]).unwrap();
        assert_eq!(dominance_radius(&q, &[1, 1]).unwrap().max_ratio, 0.0);
    }

    #[test]
    fn torus_constant_terms() {
        let v = constant_term_on_torus(|z: &[C]| 3.0 + z[0] + 1.0 / z[0], &[1.0]).unwrap();
        assert!((v - 3.0).norm() < 1e-12);
        let v = constant_term_on_torus(|z: &[C]| z[0], &[2.5]).unwrap();
        assert!(v.norm() < 1e-12);
        let v = constant_term_on_torus(|z: &[C]| 1.0 / (1.0 - 0.2 * z[0]), &[1.0]).unwrap();
        assert!((v - 1.0).norm() < 1e-12);
        let v = constant_term_on_torus(|z: &[C]| 5.0 + z[0] * z[1], &[0.5, 2.0]).unwrap();
        assert!((v - 5.0).norm() < 1e-12);
    }
}
