//! Root location for holomorphic functions of one variable by the argument
//! principle, torus roots of univariate Laurent polynomials, continuation in
//! a homotopy parameter, and density / real-rootedness checks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

use crate::error::{invalid, FqError, Result};
use crate::measures::Multiset;
use crate::numeric::unit_ball_volume;
use crate::poly::{self, cluster};
use crate::polyring::{LaurentPoly, TrigMapRep};
use crate::polytope::mixed_volume;

type C = Complex64;

/// Relative size of `|p|` on a contour below which the contour is treated as
/// passing through a root.
pub const CONTACT_REL: f64 = 1e-10;
pub const CLUSTER_RADIUS: f64 = 1e-6;
/// Root estimates closer than this are one multiple root.
pub const MULTIPLICITY_RADIUS: f64 = 1e-7;
pub const REAL_IM_TOL: f64 = 1e-8;
const MAX_RETRIES: usize = 5;
const MAX_SEG_DEPTH: usize = 48;

/// A holomorphic function of one variable.
pub trait Analytic: Sync {
    /// `(p(z) / s, S / s)` for some positive `s`, where `S` bounds the size of
    /// the terms making up `p(z)`. Used for argument tracking and contact tests.
    fn eval_normalized(&self, z: C) -> (C, f64);

    /// `p(z) / p'(z)`.
    fn newton_ratio(&self, z: C) -> C;
}

/// `sum_k c_k exp(2 pi i w_k z)` with real frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly1 {
    pub terms: Vec<(f64, C)>,
}

impl TrigPoly1 {
    pub fn new(terms: Vec<(f64, C)>) -> Result<Self> {
        let terms: Vec<(f64, C)> = terms.into_iter().filter(|t| t.1.norm() > 0.0).collect();
        if terms.is_empty() {
            return invalid("zero trigonometric polynomial");
        }
        Ok(TrigPoly1 { terms })
    }

    pub fn from_trig_map(p: &TrigMapRep) -> Result<Self> {
        if p.n() != 1 {
            return invalid("need a trigonometric map with n = 1");
        }
        let spec = p.spectrum();
        TrigPoly1::new(spec[0].iter().map(|t| (t.frequency[0], t.coefficient)).collect())
    }

    /// Laurent polynomial in one variable read as `q(e^{2 pi i z})`.
    pub fn from_laurent(q: &LaurentPoly) -> Result<Self> {
        if q.nvars() != 1 {
            return invalid("need one variable");
        }
        TrigPoly1::new(q.terms().map(|(e, c)| (e[0] as f64, *c)).collect())
    }

    pub fn eval(&self, z: C) -> C {
        let (v, _) = self.eval_normalized(z);
        v * self.log_top(z).exp()
    }

    fn log_top(&self, z: C) -> f64 {
        self.terms.iter().map(|(w, c)| c.norm().ln() - TAU * w * z.im).fold(f64::NEG_INFINITY, f64::max)
    }

    fn normalized_with_deriv(&self, z: C) -> (C, C, f64) {
        let top = self.log_top(z);
        let mut v = C::new(0.0, 0.0);
        let mut dv = C::new(0.0, 0.0);
        let mut s = 0.0;
        for (w, c) in &self.terms {
            let mag = (c.norm().ln() - TAU * w * z.im - top).exp();
            let t = C::from_polar(mag, c.arg() + TAU * w * z.re);
            v += t;
            dv += t * C::new(0.0, TAU * w);
            s += mag;
        }
        (v, dv, s)
    }

    pub fn frequency_range(&self) -> (f64, f64) {
        let lo = self.terms.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
        let hi = self.terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Half-height of a horizontal band containing every root: beyond it the
    /// extreme frequency dominates the sum of the rest.
    pub fn imag_band(&self) -> f64 {
        let (lo, hi) = self.frequency_range();
        if !(hi > lo) {
            return 5.0;
        }
        let total: f64 = self.terms.iter().map(|t| t.1.norm()).sum();
        let bound = |edge: f64| -> Option<f64> {
            let c = self.terms.iter().filter(|t| t.0 == edge).map(|t| t.1.norm()).sum::<f64>();
            let gap = self.terms.iter().filter(|t| t.0 != edge).map(|t| (t.0 - edge).abs()).fold(f64::INFINITY, f64::min);
            if c == 0.0 || !gap.is_finite() {
                return None;
            }
            Some(((total - c) / c).max(1e-300).ln().max(0.0) / (TAU * gap))
        };
        match (bound(lo), bound(hi)) {
            (Some(a), Some(b)) => 1.1 * a.max(b) + 0.1,
            _ => 5.0,
        }
    }
}

impl Analytic for TrigPoly1 {
    fn eval_normalized(&self, z: C) -> (C, f64) {
        let (v, _, s) = self.normalized_with_deriv(z);
        (v, s)
    }

    fn newton_ratio(&self, z: C) -> C {
        let (v, dv, _) = self.normalized_with_deriv(z);
        v / dv
    }
}

/// Wraps a closure `z -> (p(z), p'(z))`.
pub struct FnAnalytic<F>(pub F);

impl<F: Fn(C) -> (C, C) + Sync> Analytic for FnAnalytic<F> {
    fn eval_normalized(&self, z: C) -> (C, f64) {
        let v = (self.0)(z).0;
        (v, v.norm().max(1.0))
    }

    fn newton_ratio(&self, z: C) -> C {
        let (v, dv) = (self.0)(z);
        v / dv
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Rect> {
        if !(x1 > x0 && y1 > y0) {
            return invalid("rectangle must have positive width and height");
        }
        Ok(Rect { x0, x1, y0, y1 })
    }

    fn dilate(&self, f: f64) -> Rect {
        let (cx, cy) = ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0);
        let (hw, hh) = ((self.x1 - self.x0) / 2.0 * f, (self.y1 - self.y0) / 2.0 * f);
        Rect { x0: cx - hw, x1: cx + hw, y0: cy - hh, y1: cy + hh }
    }

    pub fn center(&self) -> C {
        C::new((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }

    fn size(&self) -> f64 {
        (self.x1 - self.x0).max(self.y1 - self.y0)
    }

    fn contains_loose(&self, z: C, slack: f64) -> bool {
        z.re >= self.x0 - slack && z.re <= self.x1 + slack && z.im >= self.y0 - slack && z.im <= self.y1 + slack
    }
}

struct Contact;

fn segment<P: Analytic + ?Sized>(p: &P, a: C, va: C, b: C, vb: C, depth: usize) -> std::result::Result<f64, Contact> {
    let m = (a + b) / 2.0;
    let (vm, sm) = p.eval_normalized(m);
    if vm.norm() <= CONTACT_REL * sm {
        return Err(Contact);
    }
    let d1 = (vm / va).arg();
    let d2 = (vb / vm).arg();
    let whole = (vb / va).arg();
    let consistent = ((d1 + d2) - whole).abs() < 1e-9;
    if d1.abs() < PI / 2.0 && d2.abs() < PI / 2.0 && consistent {
        return Ok(d1 + d2);
    }
    if depth >= MAX_SEG_DEPTH {
        return Err(Contact);
    }
    Ok(segment(p, a, va, m, vm, depth + 1)? + segment(p, m, vm, b, vb, depth + 1)?)
}

fn contour_increment<P: Analytic + ?Sized>(p: &P, r: &Rect) -> std::result::Result<f64, Contact> {
    let corners = [C::new(r.x0, r.y0), C::new(r.x1, r.y0), C::new(r.x1, r.y1), C::new(r.x0, r.y1)];
    let per_edge = 16;
    let mut pts = Vec::with_capacity(4 * per_edge + 1);
    for k in 0..4 {
        let (a, b) = (corners[k], corners[(k + 1) % 4]);
        for i in 0..per_edge {
            pts.push(a + (b - a) * (i as f64 / per_edge as f64));
        }
    }
    pts.push(corners[0]);
    let mut vals = Vec::with_capacity(pts.len());
    for &z in &pts {
        let (v, s) = p.eval_normalized(z);
        if !(v.norm() > CONTACT_REL * s) {
            return Err(Contact);
        }
        vals.push(v);
    }
    let mut total = 0.0;
    for i in 0..pts.len() - 1 {
        total += segment(p, pts[i], vals[i], pts[i + 1], vals[i + 1], 0)?;
    }
    Ok(total)
}

/// Number of roots (with multiplicity) inside `r`. When the boundary passes
/// too close to a root the rectangle is dilated by a tiny random factor and
/// retried.
pub fn winding_number<P: Analytic + ?Sized>(p: &P, r: &Rect) -> Result<i64> {
    if let Ok(t) = contour_increment(p, r) {
        return Ok((t / TAU).round() as i64);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..MAX_RETRIES {
        let f = 1.0 + rng.gen_range(1e-7..1e-6);
        if let Ok(t) = contour_increment(p, &r.dilate(f)) {
            return Ok((t / TAU).round() as i64);
        }
    }
    Err(FqError::RootOnContour)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootEstimate {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    /// set for multiplicity above 3 or when Newton refinement failed
    pub needs_review: bool,
}

impl RootEstimate {
    pub fn z(&self) -> C {
        C::new(self.re, self.im)
    }
}

const JITTER: [f64; 6] = [0.0, 0.0371, -0.0613, 0.1093, -0.1459, 0.2011];

fn newton_in_box<P: Analytic + ?Sized>(p: &P, r: &Rect, k: usize) -> Option<C> {
    let mut z = r.center();
    let slack = r.size();
    for _ in 0..60 {
        let step = p.newton_ratio(z) * k as f64;
        if !step.is_finite() {
            return None;
        }
        z -= step;
        if !r.contains_loose(z, slack) {
            return None;
        }
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    // linear convergence near clustered roots: accept if stalled inside the box
    if r.contains_loose(z, 0.0) {
        Some(z)
    } else {
        None
    }
}

fn split<P: Analytic + ?Sized>(p: &P, r: &Rect, count: i64) -> Result<(Rect, i64, Rect, i64)> {
    let horizontal = (r.x1 - r.x0) >= (r.y1 - r.y0);
    let mut last = FqError::RootOnContour;
    for j in JITTER {
        let f = 0.5 + j;
        let (a, b) = if horizontal {
            let xm = r.x0 + f * (r.x1 - r.x0);
            (Rect { x1: xm, ..*r }, Rect { x0: xm, ..*r })
        } else {
            let ym = r.y0 + f * (r.y1 - r.y0);
            (Rect { y1: ym, ..*r }, Rect { y0: ym, ..*r })
        };
        match (winding_number(p, &a), winding_number(p, &b)) {
            (Ok(ca), Ok(cb)) if ca + cb == count && ca >= 0 && cb >= 0 => return Ok((a, ca, b, cb)),
            (Err(e), _) | (_, Err(e)) => last = e,
            _ => {}
        }
    }
    Err(last)
}

fn refine<P: Analytic + ?Sized>(p: &P, r: Rect, count: i64, tol: f64, out: &mut Vec<RootEstimate>) -> Result<()> {
    if count <= 0 {
        return Ok(());
    }
    let k = count as usize;
    let small = r.size() < 1e-3;
    if small && count == 1 {
        if let Some(z) = newton_in_box(p, &r, 1) {
            out.push(RootEstimate { re: z.re, im: z.im, multiplicity: 1, needs_review: false });
            return Ok(());
        }
    }
    let cluster_at = |r: &Rect| {
        let z = newton_in_box(p, r, k).unwrap_or_else(|| r.center());
        RootEstimate { re: z.re, im: z.im, multiplicity: k, needs_review: k > 3 }
    };
    if r.size() < tol {
        out.push(cluster_at(&r));
        return Ok(());
    }
    match split(p, &r, count) {
        Ok((a, ca, b, cb)) => {
            refine(p, a, ca, tol, out)?;
            refine(p, b, cb, tol, out)
        }
        // near a multiple root |p| falls below the contact level before the
        // box reaches `tol`; report the cluster
        Err(FqError::RootOnContour) if small && count > 1 => {
            out.push(cluster_at(&r));
            Ok(())
        }
        Err(e) => Err(e),
    }
}

/// Roots in `r` with multiplicity, by recursive subdivision.
pub fn roots_in_rect<P: Analytic + ?Sized>(p: &P, r: &Rect, tol: f64) -> Result<Vec<RootEstimate>> {
    let count = winding_number(p, r)?;
    let mut out = Vec::new();
    refine(p, *r, count, tol, &mut out)?;
    Ok(merge_close(out))
}

/// Rounding splits a multiple root into a tiny cluster of simple ones.
fn merge_close(mut v: Vec<RootEstimate>) -> Vec<RootEstimate> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re));
    let mut out: Vec<(Vec<RootEstimate>, C)> = Vec::new();
    for r in v {
        match out.iter_mut().rev().take_while(|g| r.re - g.1.re <= MULTIPLICITY_RADIUS).find(|g| (g.1 - r.z()).norm() <= MULTIPLICITY_RADIUS) {
            Some(g) => {
                g.0.push(r);
                let k: usize = g.0.iter().map(|e| e.multiplicity).sum();
                g.1 = g.0.iter().map(|e| e.z() * e.multiplicity as f64).sum::<C>() / k as f64;
            }
            None => {
                let z = r.z();
                out.push((vec![r], z));
            }
        }
    }
    out.into_iter()
        .map(|(g, z)| {
            let k: usize = g.iter().map(|e| e.multiplicity).sum();
            let review = g.iter().any(|e| e.needs_review) || k > 3;
            RootEstimate { re: z.re, im: z.im, multiplicity: k, needs_review: review }
        })
        .collect()
}

/// Roots of `p` with real part in `[a, b]` and `|Im| <= h`, sorted by real
/// part. The strip is cut into unit pieces handled in parallel.
pub fn real_roots_1d<P: Analytic + ?Sized>(p: &P, a: f64, b: f64, h: f64, tol: f64) -> Result<Vec<RootEstimate>> {
    if !(b > a) || !(h > 0.0) || !(tol > 0.0) {
        return invalid("need a < b, h > 0, tol > 0");
    }
    let pieces = ((b - a).ceil() as usize).max(1);
    let w = (b - a) / pieces as f64;
    // interior cut points are jittered off any lattice the roots may sit on
    let cuts: Vec<f64> = (0..=pieces)
        .map(|k| if k == 0 { a } else if k == pieces { b } else { a + w * (k as f64 + 0.0173) })
        .collect();
    let parts: Vec<Vec<RootEstimate>> = (0..pieces)
        .into_par_iter()
        .map(|k| {
            let r = Rect { x0: cuts[k], x1: cuts[k + 1], y0: -h, y1: h };
            roots_in_rect(p, &r, tol)
        })
        .collect::<Result<_>>()?;
    Ok(merge_close(parts.into_iter().flatten().collect()))
}

/// Roots of a one-variable Laurent polynomial lying on the unit circle.
pub fn torus_roots_univariate(q: &LaurentPoly) -> Result<Vec<(C, usize)>> {
    if q.nvars() != 1 {
        return invalid("need one variable");
    }
    if q.is_zero() || q.is_monomial() {
        return invalid("monomial has no torus roots");
    }
    let lo = q.terms().map(|(e, _)| e[0]).min().unwrap_or(0);
    let hi = q.terms().map(|(e, _)| e[0]).max().unwrap_or(0);
    let mut c = vec![C::new(0.0, 0.0); (hi - lo) as usize + 1];
    for (e, v) in q.terms() {
        c[(e[0] - lo) as usize] += v;
    }
    let rs: Vec<C> = poly::roots(&c)?.into_iter().filter(|r| r.norm() > 0.0).collect();
    let mut out: Vec<(C, usize)> =
        cluster(&rs, CLUSTER_RADIUS).into_iter().filter(|(r, _)| (r.norm() - 1.0).abs() < 1e-8).collect();
    out.sort_by(|a, b| a.0.arg().total_cmp(&b.0.arg()));
    Ok(out)
}

/// A family `H(x, t)` of `n` functions in `n` variables.
pub trait Homotopy: Sync {
    fn dim(&self) -> usize;
    /// Values, Jacobian `dH_j/dx_k`, and `dH_j/dt`.
    fn eval(&self, x: &[C], t: f64) -> Result<(Vec<C>, Vec<Vec<C>>, Vec<C>)>;
}

#[derive(Clone, Debug, Serialize)]
pub struct Path {
    pub t: Vec<f64>,
    pub x: Vec<Vec<f64>>,
}

impl Path {
    pub fn end(&self) -> &[f64] {
        self.x.last().expect("path is never empty")
    }
}

fn max_norm(v: &[C]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn jac_matrix(j: &[Vec<C>]) -> DMatrix<C> {
    let n = j.len();
    DMatrix::from_fn(n, n, |r, c| j[r][c])
}

fn condition(j: &DMatrix<C>) -> f64 {
    let sv = j.clone().singular_values();
    let (lo, hi) = (sv.min(), sv.max());
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

fn solve(j: &DMatrix<C>, rhs: &[C]) -> Option<Vec<C>> {
    let b = nalgebra::DVector::from_column_slice(rhs);
    j.clone().lu().solve(&b).map(|v| v.iter().copied().collect())
}

const TRACK_RESIDUAL: f64 = 1e-12;
const TRACK_IM: f64 = 1e-9;

fn correct<H: Homotopy + ?Sized>(h: &H, mut x: Vec<C>, t: f64) -> Result<Option<Vec<C>>> {
    for _ in 0..30 {
        let (v, j, _) = h.eval(&x, t)?;
        if max_norm(&v) < TRACK_RESIDUAL {
            return Ok(Some(x));
        }
        let jm = jac_matrix(&j);
        if condition(&jm) > 1e12 {
            return Ok(None);
        }
        let Some(dx) = solve(&jm, &v) else { return Ok(None) };
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi -= d;
        }
    }
    let (v, _, _) = h.eval(&x, t)?;
    Ok(if max_norm(&v) < TRACK_RESIDUAL { Some(x) } else { None })
}

fn step<H: Homotopy + ?Sized>(h: &H, x: &[f64], t0: f64, t1: f64, depth: usize) -> Result<Vec<f64>> {
    let xc: Vec<C> = x.iter().map(|&v| C::new(v, 0.0)).collect();
    let attempt = || -> Result<Option<Vec<f64>>> {
        let (_, j, dt) = h.eval(&xc, t0)?;
        let jm = jac_matrix(&j);
        if condition(&jm) > 1e12 {
            return Ok(None);
        }
        let Some(dx) = solve(&jm, &dt) else { return Ok(None) };
        let pred: Vec<C> = xc.iter().zip(&dx).map(|(a, d)| a - d * (t1 - t0)).collect();
        let Some(y) = correct(h, pred, t1)? else { return Ok(None) };
        if y.iter().any(|v| v.im.abs() >= TRACK_IM) {
            return Ok(None);
        }
        // reject jumps to another branch: the step must match the predictor scale
        let moved = y.iter().zip(&xc).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let pred_move = max_norm(&dx) * (t1 - t0).abs();
        if moved > 10.0 * pred_move + 1e-3 {
            return Ok(None);
        }
        Ok(Some(y.iter().map(|v| v.re).collect()))
    };
    if let Some(y) = attempt()? {
        return Ok(y);
    }
    if depth >= 20 {
        return Err(FqError::NonConvergence(format!("continuation failed near t = {t0}")));
    }
    let tm = (t0 + t1) / 2.0;
    let xm = step(h, x, t0, tm, depth + 1)?;
    step(h, &xm, tm, t1, depth + 1)
}

/// Follows a real root of `H(., t)` along `t_grid` by Euler prediction and
/// Newton correction, bisecting steps that fail.
pub fn continuation_track<H: Homotopy + ?Sized>(h: &H, x0: &[f64], t_grid: &[f64]) -> Result<Path> {
    if x0.len() != h.dim() {
        return invalid("start point has wrong dimension");
    }
    if t_grid.is_empty() {
        return invalid("empty t grid");
    }
    let xc: Vec<C> = x0.iter().map(|&v| C::new(v, 0.0)).collect();
    let (v, _, _) = h.eval(&xc, t_grid[0])?;
    if max_norm(&v) >= 1e-10 {
        return invalid("start point is not a root at the first grid value");
    }
    let start = correct(h, xc, t_grid[0])?
        .ok_or_else(|| FqError::NonConvergence("start point refinement".into()))?;
    let mut path = Path { t: vec![t_grid[0]], x: vec![start.iter().map(|v| v.re).collect()] };
    for w in t_grid.windows(2) {
        let next = step(h, path.end(), w[0], w[1], 0)?;
        path.t.push(w[1]);
        path.x.push(next);
    }
    Ok(path)
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityEstimate {
    pub r: f64,
    pub count: f64,
    pub density: f64,
    pub expected: Option<f64>,
}

/// Weighted count in the closed ball of radius `r` over `c_n r^n`.
pub fn density_estimate(roots: &Multiset, r: f64) -> Result<DensityEstimate> {
    if !(r > 0.0) {
        return invalid("radius must be positive");
    }
    let n = roots.dim();
    let count: f64 = roots
        .points
        .iter()
        .filter(|(x, _)| x.iter().map(|v| v * v).sum::<f64>().sqrt() <= r)
        .map(|(_, k)| *k as f64)
        .sum();
    let density = count / (unit_ball_volume(n) * r.powi(n as i32));
    Ok(DensityEstimate { r, count, density, expected: None })
}

/// Mixed volume of the real Newton polytopes `M^T N(q_j)`.
pub fn expected_density(p: &TrigMapRep) -> Result<f64> {
    mixed_volume(&p.newton_polytopes_real()?)
}

#[derive(Clone, Debug, Serialize)]
pub struct RealRootReport {
    pub window: f64,
    pub band: f64,
    pub expected: f64,
    pub total_count: usize,
    pub real_count: usize,
    pub real_density: f64,
    pub max_abs_im: f64,
    pub pass: bool,
}

/// Compares the density of real roots in `[-r, r]` with the mixed-volume
/// density. Only `n = 1` maps are handled here.
pub fn verify_real_rooted(p: &TrigMapRep, r: f64, tol: f64) -> Result<RealRootReport> {
    if p.n() != 1 {
        return Err(FqError::Unsupported("contour verification needs n = 1".into()));
    }
    let f = TrigPoly1::from_trig_map(p)?;
    let band = f.imag_band();
    let roots = real_roots_1d(&f, -r, r, band, 1e-10)?;
    let expected = expected_density(p)?;
    let total_count: usize = roots.iter().map(|x| x.multiplicity).sum();
    let real_count: usize = roots.iter().filter(|x| x.im.abs() < REAL_IM_TOL).map(|x| x.multiplicity).sum();
    let max_abs_im = roots.iter().map(|x| x.im.abs()).fold(0.0, f64::max);
    let real_density = real_count as f64 / (2.0 * r);
    let gap = if expected > 0.0 { (real_density - expected).abs() / expected } else { f64::INFINITY };
    let pass = gap < tol && max_abs_im < REAL_IM_TOL;
    Ok(RealRootReport { window: r, band, expected, total_count, real_count, real_density, max_abs_im, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::LaurentMap;

    fn comb() -> TrigPoly1 {
        TrigPoly1::new(vec![(1.0, C::new(1.0, 0.0)), (0.0, C::new(-1.0, 0.0))]).unwrap()
    }

    #[test]
    fn winding_examples() {
        let p = comb();
        let r = Rect::new(-0.5, 0.5, -1.0, 1.0).unwrap();
        assert_eq!(winding_number(&p, &r).unwrap(), 1);
        let sq = FnAnalytic(|z: C| {
            let e = (C::new(0.0, TAU) * z).exp();
            ((e - 1.0) * (e - 1.0), 2.0 * (e - 1.0) * e * C::new(0.0, TAU))
        });
        assert_eq!(winding_number(&sq, &r).unwrap(), 2);
        let two = TrigPoly1::new(vec![(1.0, C::new(1.0, 0.0)), (0.0, C::new(-2.0, 0.0))]).unwrap();
        let y = -(2f64.ln()) / TAU;
        assert_eq!(winding_number(&two, &Rect::new(-0.5, 0.5, y - 0.2, y + 0.2).unwrap()).unwrap(), 1);
        assert_eq!(winding_number(&two, &Rect::new(-0.5, 0.5, y + 0.05, y + 0.2).unwrap()).unwrap(), 0);
    }

    #[test]
    fn root_on_corner_is_retried() {
        // the root at 0 sits on the left edge; the dilated box contains it
        let r = Rect::new(0.0, 0.5, -1.0, 1.0).unwrap();
        assert_eq!(winding_number(&comb(), &r).unwrap(), 1);
    }

    #[test]
    fn comb_roots() {
        let rs = real_roots_1d(&comb(), -2.5, 2.5, 1.0, 1e-10).unwrap();
        let re: Vec<f64> = rs.iter().map(|r| r.re).collect();
        assert_eq!(rs.len(), 5);
        for (k, x) in re.iter().enumerate() {
            assert!((x - (k as f64 - 2.0)).abs() < 1e-12);
        }
        assert!(rs.iter().all(|r| r.multiplicity == 1 && r.im.abs() < 1e-12));
    }

    #[test]
    fn double_roots() {
        let sq = TrigPoly1::new(vec![(2.0, C::new(1.0, 0.0)), (1.0, C::new(-2.0, 0.0)), (0.0, C::new(1.0, 0.0))]).unwrap();
        let rs = real_roots_1d(&sq, -1.5, 1.5, 1.0, 1e-10).unwrap();
        assert_eq!(rs.len(), 3);
        for r in &rs {
            assert_eq!(r.multiplicity, 2);
            assert!((r.re - r.re.round()).abs() < 1e-7);
        }
    }

    #[test]
    fn torus_roots_examples() {
        let q = LaurentPoly::real(1, &[(&[2], 1.0), (&[0], -1.0)]).unwrap();
        assert_eq!(torus_roots_univariate(&q).unwrap().len(), 2);
        let q = LaurentPoly::real(1, &[(&[2], 1.0), (&[-2], -1.0)]).unwrap();
        let r = torus_roots_univariate(&q).unwrap();
        assert_eq!(r.len(), 4);
        for (z, k) in r {
            assert_eq!(k, 1);
            assert!((z.powu(4) - 1.0).norm() < 1e-12);
        }
        let q = LaurentPoly::real(1, &[(&[2], 1.0), (&[1], -2.0), (&[0], 1.0)]).unwrap();
        let r = torus_roots_univariate(&q).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].1, 2);
        let q = LaurentPoly::real(1, &[(&[1], 1.0), (&[0], -2.0)]).unwrap();
        assert!(torus_roots_univariate(&q).unwrap().is_empty());
    }

    #[test]
    fn density_of_comb() {
        let ms = Multiset::from_points((-100..=100).map(|k| vec![k as f64]).collect());
        let d = density_estimate(&ms, 100.0).unwrap();
        assert_eq!(d.count, 201.0);
        assert!((d.density - 1.005).abs() < 1e-12);
    }

    fn trig(terms: &[(&[i64], f64)], m: &[Vec<f64>]) -> TrigMapRep {
        let q = LaurentMap::new(vec![LaurentPoly::real(m.len(), terms).unwrap()]).unwrap();
        TrigMapRep::from_f64(q, m).unwrap()
    }

    #[test]
    fn real_rootedness_checks() {
        let p = trig(&[(&[1], 1.0), (&[0], -1.0)], &[vec![1.0]]);
        assert!((expected_density(&p).unwrap() - 1.0).abs() < 1e-12);
        assert!(verify_real_rooted(&p, 20.5, 0.05).unwrap().pass);
        let p = trig(&[(&[1], 1.0), (&[0], -2.0)], &[vec![1.0]]);
        let r = verify_real_rooted(&p, 20.5, 0.05).unwrap();
        assert!(!r.pass);
        assert_eq!(r.real_count, 0);
        assert!(r.total_count >= 40);
    }

    struct Shift;

    impl Homotopy for Shift {
        fn dim(&self) -> usize {
            1
        }
        // x^3 + x - t: one real root for every t
        fn eval(&self, x: &[C], t: f64) -> Result<(Vec<C>, Vec<Vec<C>>, Vec<C>)> {
            let v = x[0] * x[0] * x[0] + x[0] - t;
            Ok((vec![v], vec![vec![3.0 * x[0] * x[0] + 1.0]], vec![C::new(-1.0, 0.0)]))
        }
    }

    #[test]
    fn continuation_follows_root() {
        let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0 * 10.0).collect();
        let path = continuation_track(&Shift, &[0.0], &grid).unwrap();
        let x = path.end()[0];
        assert!((x * x * x + x - 10.0).abs() < 1e-12);
        let path = continuation_track(&Shift, &[0.0], &[0.0, 0.0]).unwrap();
        assert_eq!(path.end()[0], 0.0);
        assert!(continuation_track(&Shift, &[1.0], &grid).is_err());
    }
}
