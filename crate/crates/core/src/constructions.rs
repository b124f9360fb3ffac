//! Explicit constructions: the Example-1 family of real-rooted trigonometric
//! maps built from Moebius maps of the circle, its root lattice at `t = 0`,
//! parametric root enumeration, Fourier-Bohr coefficients as contour
//! integrals, and cut-and-project multisets with closed-form spectra.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{invalid, FqError, Result};
use crate::lattice::{annihilator, unimodular_completion, IntMat};
use crate::measures::{poisson_check, Multiset, PoissonReport, SpectrumEntry, SpectrumTable, TestFunction, Window};
use crate::numeric::CSum;
use crate::polyring::{LaurentMap, LaurentPoly, TrigMapRep};
use crate::rootfind::{real_roots_1d, Homotopy, TrigPoly1};
use crate::scalar::Scalar;

type C = Complex64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Example1Spec {
    pub n: usize,
    /// length `n + 1`
    pub s: Vec<Scalar>,
    /// length `n`, positive; assumed independent of 1 over Q
    pub b: Vec<Scalar>,
    /// length `n + 1`, positive, gcd 1
    pub gamma: Vec<i64>,
    pub t: Scalar,
}

impl Example1Spec {
    pub fn new(s: Vec<Scalar>, b: Vec<Scalar>, gamma: Vec<i64>, t: Scalar) -> Result<Self> {
        let spec = Example1Spec { n: b.len(), s, b, gamma, t };
        spec.validate()?;
        Ok(spec)
    }

    /// `s = (-1/3, 0)`, `gamma = (2, 1)`, `b = 0.3`, `t = 1`.
    pub fn kurasov_sarnak() -> Self {
        Example1Spec::new(vec![Scalar::ratio(-1, 3), Scalar::int(0)], vec![Scalar::float(0.3)], vec![2, 1], Scalar::int(1))
            .expect("valid spec")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: Example1Spec = serde_json::from_str(s).map_err(|e| FqError::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let m = n + 1;
        if n == 0 {
            return invalid("n must be positive");
        }
        if self.s.len() != m || self.b.len() != n || self.gamma.len() != m {
            return invalid(format!("need |s| = {m}, |b| = {n}, |gamma| = {m}"));
        }
        for (j, s) in self.s.iter().enumerate() {
            if !(s.value > -1.0 && s.value < 1.0) {
                return invalid(format!("s[{j}] must lie in (-1, 1)"));
            }
            if j < n && s.value == 0.0 {
                return invalid(format!("s[{j}] must be nonzero"));
            }
        }
        if self.b.iter().any(|b| !(b.value > 0.0)) {
            return invalid("b must be positive");
        }
        if !(self.t.value >= 0.0 && self.t.value <= 1.0) {
            return invalid("t must lie in [0, 1]");
        }
        unimodular_completion(&self.gamma)?;
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.n + 1
    }

    pub fn with_t(&self, t: f64) -> Example1Spec {
        Example1Spec { t: Scalar::float(t), ..self.clone() }
    }

    fn b_f64(&self) -> Vec<f64> {
        self.b.iter().map(|v| v.value).collect()
    }

    fn s_f64(&self) -> Vec<f64> {
        self.s.iter().map(|v| v.value).collect()
    }

    /// `M = [I_n; -b^T]`, exact where `b` is.
    pub fn m_matrix(&self) -> Vec<Vec<Scalar>> {
        let n = self.n;
        let mut rows: Vec<Vec<Scalar>> = (0..n).map(|i| (0..n).map(|j| Scalar::int((i == j) as i64)).collect()).collect();
        rows.push(
            self.b
                .iter()
                .map(|b| Scalar { value: -b.value, exact: b.exact.as_ref().map(|r| -r.clone()) })
                .collect(),
        );
        rows
    }

    pub fn m_f64(&self) -> Vec<Vec<f64>> {
        self.m_matrix().iter().map(|r| r.iter().map(|s| s.value).collect()).collect()
    }
}

fn linear(m: usize, var: usize, c0: f64, c1: f64) -> Result<LaurentPoly> {
    let mut e = vec![0; m];
    e[var] = 1;
    LaurentPoly::from_terms(m, vec![(vec![0; m], C::new(c0, 0.0)), (e, C::new(c1, 0.0))])
}

/// `q_{t,j} = (z_j + t s_j)^{g_m} (1 + t s_m z_m)^{g_j} - (1 + t s_j z_j)^{g_m} (z_m + t s_m)^{g_j}`
/// with `M = [I_n; -b^T]`.
pub fn build_example1(spec: &Example1Spec) -> Result<TrigMapRep> {
    spec.validate()?;
    let (n, m) = (spec.n, spec.m());
    let t = spec.t.value;
    let s = spec.s_f64();
    let gm = spec.gamma[n] as u32;
    let mut comps = Vec::with_capacity(n);
    for j in 0..n {
        let gj = spec.gamma[j] as u32;
        let a = linear(m, j, t * s[j], 1.0)?.pow(gm).mul(&linear(m, n, 1.0, t * s[n])?.pow(gj))?;
        let c = linear(m, j, 1.0, t * s[j])?.pow(gm).mul(&linear(m, n, t * s[n], 1.0)?.pow(gj))?;
        comps.push(a.sub(&c)?);
    }
    TrigMapRep::new(LaurentMap::new(comps)?, spec.m_matrix())
}

/// `P_t(x) = Q_t(exp(2 pi i M x))` evaluated in closed form, for continuation.
#[derive(Clone, Debug)]
pub struct Example1Homotopy {
    n: usize,
    s: Vec<f64>,
    b: Vec<f64>,
    gamma: Vec<i32>,
}

impl Example1Homotopy {
    pub fn new(spec: &Example1Spec) -> Result<Self> {
        spec.validate()?;
        Ok(Example1Homotopy { n: spec.n, s: spec.s_f64(), b: spec.b_f64(), gamma: spec.gamma.iter().map(|&g| g as i32).collect() })
    }
}

impl Homotopy for Example1Homotopy {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &[C], t: f64) -> Result<(Vec<C>, Vec<Vec<C>>, Vec<C>)> {
        let n = self.n;
        if x.len() != n {
            return invalid("point has wrong dimension");
        }
        let i2pi = C::new(0.0, TAU);
        let z: Vec<C> = x.iter().map(|v| (i2pi * v).exp()).collect();
        let bx: C = self.b.iter().zip(x).map(|(b, v)| *b * v).sum();
        let zm = (-i2pi * bx).exp();
        let (sm, gm) = (self.s[n], self.gamma[n]);
        let mut vals = Vec::with_capacity(n);
        let mut jac = vec![vec![C::new(0.0, 0.0); n]; n];
        let mut dts = Vec::with_capacity(n);
        let pw = |v: C, k: i32| if k == 0 { C::new(1.0, 0.0) } else { v.powi(k) };
        for j in 0..n {
            let (sj, gj, zj) = (self.s[j], self.gamma[j], z[j]);
            let u1 = zj + t * sj;
            let u2 = 1.0 + t * sm * zm;
            let u3 = 1.0 + t * sj * zj;
            let u4 = zm + t * sm;
            let (a, b, c, d) = (pw(u1, gm), pw(u2, gj), pw(u3, gm), pw(u4, gj));
            let (da, db, dc, dd) = (gm as f64 * pw(u1, gm - 1), gj as f64 * pw(u2, gj - 1), gm as f64 * pw(u3, gm - 1), gj as f64 * pw(u4, gj - 1));
            vals.push(a * b - c * d);
            let dq_dzj = da * b - dc * t * sj * d;
            let dq_dzm = a * db * t * sm - c * dd;
            for k in 0..n {
                let dzm = -i2pi * self.b[k] * zm;
                let mut v = dq_dzm * dzm;
                if k == j {
                    v += dq_dzj * i2pi * zj;
                }
                jac[j][k] = v;
            }
            dts.push(da * sj * b + a * db * sm * zm - dc * sj * zj * d - c * dd * sm);
        }
        Ok((vals, jac, dts))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeP0 {
    pub j: Vec<Vec<i64>>,
    /// `J11 - J12 b^T`
    pub block: Vec<Vec<f64>>,
    /// columns generate the root lattice at `t = 0`
    pub basis: Vec<Vec<f64>>,
    pub delta: f64,
    /// `|det(J11 + J12 b^T)|`, the other sign choice, for comparison
    pub delta_plus: f64,
}

/// Root lattice of `P_0`: `x` is a root iff `M x + r gamma` is integral for
/// some real `r`. With `J gamma = e_m` this reads `(J11 - J12 b^T) x` integral.
pub fn lambda_p0(spec: &Example1Spec) -> Result<LatticeP0> {
    spec.validate()?;
    let n = spec.n;
    let jm: IntMat = unimodular_completion(&spec.gamma)?;
    let j = jm.to_i64_rows()?;
    let b = spec.b_f64();
    let blk = |sign: f64| DMatrix::from_fn(n, n, |r, c| j[r][c] as f64 + sign * j[r][n] as f64 * b[c]);
    let minus = blk(-1.0);
    let plus = blk(1.0);
    let delta = minus.determinant().abs();
    if !(delta > 1e-12) {
        return Err(FqError::Singular("J11 - J12 b^T".into()));
    }
    let inv = minus.clone().try_inverse().ok_or_else(|| FqError::Singular("J11 - J12 b^T".into()))?;
    Ok(LatticeP0 {
        j,
        block: (0..n).map(|r| (0..n).map(|c| minus[(r, c)]).collect()).collect(),
        basis: (0..n).map(|r| (0..n).map(|c| inv[(r, c)]).collect()).collect(),
        delta,
        delta_plus: plus.determinant().abs(),
    })
}

/// Continuous argument of the `j`-th Moebius coordinate over `zeta = e^{2 pi i theta}`,
/// divided by `2 pi`: `gamma_j theta - arg(1 - sigma e^{2 pi i gamma_j theta}) / pi`.
fn arg_lift(sigma: f64, gamma: i64, theta: f64) -> f64 {
    let u = C::from_polar(1.0, TAU * gamma as f64 * theta);
    gamma as f64 * theta - (1.0 - sigma * u).arg() / PI
}

/// `d/dtheta` of [`arg_lift`]: `gamma (1 - sigma^2) / |1 - sigma u|^2`.
fn arg_lift_deriv(sigma: f64, gamma: i64, theta: f64) -> f64 {
    let u = C::from_polar(1.0, TAU * gamma as f64 * theta);
    gamma as f64 * (1.0 - sigma * sigma) / (1.0 - sigma * u).norm_sqr()
}

struct Param {
    n: usize,
    sigma: Vec<f64>,
    gamma: Vec<i64>,
    b: Vec<f64>,
}

impl Param {
    fn new(spec: &Example1Spec) -> Self {
        let t = spec.t.value;
        Param { n: spec.n, sigma: spec.s_f64().iter().map(|s| t * s).collect(), gamma: spec.gamma.clone(), b: spec.b_f64() }
    }

    fn a(&self, theta: f64) -> Vec<f64> {
        (0..=self.n).map(|j| arg_lift(self.sigma[j], self.gamma[j], theta)).collect()
    }

    /// `-b . a_{1..n}(theta) - a_m(theta)`: strictly decreasing, drops by
    /// `b . gamma' + gamma_m` over one turn.
    fn g(&self, theta: f64) -> f64 {
        let a = self.a(theta);
        -self.b.iter().zip(&a).map(|(b, v)| b * v).sum::<f64>() - a[self.n]
    }

    fn drop(&self) -> f64 {
        self.b.iter().zip(&self.gamma).map(|(b, &g)| b * g as f64).sum::<f64>() + self.gamma[self.n] as f64
    }
}

const TIE_EPS: f64 = 1e-9;

/// Real roots of `P_t` in the cube `[-r, r]^n`. Each root is `a(theta) + k`
/// with `k` integral and `theta` solving `g(theta) - b.k = N` for an integer
/// `N`; `g` is monotone, so each `(k, N)` gives one root, found by bisection.
pub fn enumerate_roots_example1(spec: &Example1Spec, r: f64) -> Result<Multiset> {
    spec.validate()?;
    if !(r > 0.0) {
        return invalid("box radius must be positive");
    }
    let p = Param::new(spec);
    let n = p.n;
    let g0 = p.g(0.0);
    let d = p.drop();
    let lo: Vec<i64> = (0..n).map(|j| (-r - p.gamma[j] as f64).floor() as i64 - 1).collect();
    let hi: Vec<i64> = (0..n).map(|_| r.ceil() as i64 + 1).collect();
    let total: usize = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as usize).product();
    let points: Vec<Vec<f64>> = (0..total)
        .into_par_iter()
        .flat_map_iter(|idx| {
            let mut rem = idx;
            let k: Vec<i64> = (0..n)
                .map(|j| {
                    let span = (hi[j] - lo[j] + 1) as usize;
                    let v = lo[j] + (rem % span) as i64;
                    rem /= span;
                    v
                })
                .collect();
            let bk: f64 = p.b.iter().zip(&k).map(|(b, &v)| b * v as f64).sum();
            let nlo = (g0 - d - bk + TIE_EPS).floor() as i64 + 1;
            let nhi = (g0 - bk + TIE_EPS).floor() as i64;
            let p = &p;
            (nlo..=nhi).filter_map(move |nn| {
                let target = nn as f64 + bk;
                let (mut a, mut b) = (0.0f64, 1.0f64);
                if p.g(0.0) <= target {
                    b = 0.0;
                }
                for _ in 0..64 {
                    let mid = 0.5 * (a + b);
                    if p.g(mid) > target {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                let theta = 0.5 * (a + b);
                let av = p.a(theta);
                let x: Vec<f64> = (0..n).map(|j| av[j] + k[j] as f64).collect();
                if x.iter().all(|v| v.abs() <= r) {
                    Some(x)
                } else {
                    None
                }
            })
        })
        .collect();
    Ok(Multiset::from_points(points).with_window(Window::cube(n, r)))
}

/// `max_x |P_t(x)|` over the given points.
pub fn max_residual(spec: &Example1Spec, pts: &Multiset) -> Result<f64> {
    let h = Example1Homotopy::new(spec)?;
    let t = spec.t.value;
    let mut worst: f64 = 0.0;
    for (x, _) in &pts.points {
        let xc: Vec<C> = x.iter().map(|&v| C::new(v, 0.0)).collect();
        let (v, _, _) = h.eval(&xc, t)?;
        worst = worst.max(v.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok(worst)
}

fn trapezoid_coefficient(p: &Param, alpha: &[f64], l: &[i64], k: usize) -> C {
    const CH: usize = 1024;
    let chunks: Vec<C> = (0..k.div_ceil(CH))
        .into_par_iter()
        .map(|c| {
            let mut s = CSum::default();
            for i in c * CH..((c + 1) * CH).min(k) {
                let th = i as f64 / k as f64;
                let mut phase = 0.0;
                let mut dens = 0.0;
                for j in 0..=p.n {
                    phase += l[j] as f64 * arg_lift(p.sigma[j], p.gamma[j], th);
                    dens += alpha[j] * arg_lift_deriv(p.sigma[j], p.gamma[j], th);
                }
                s.add(C::from_polar(dens, -TAU * phase));
            }
            s.total()
        })
        .collect();
    let mut s = CSum::default();
    for c in chunks {
        s.add(c);
    }
    s.total() / k as f64
}

/// `F_B(mu)(M^T l)` as `(1 / 2 pi i) oint z(zeta)^{-l} sum_k alpha_k dz_k / z_k`
/// over the unit circle, where `alpha^T M = 0` and `alpha . gamma = Delta`.
/// On the circle the integrand is `e^{-2 pi i l . a(theta)} sum_k alpha_k a_k'(theta)`.
pub fn fourier_coefficient(spec: &Example1Spec, l: &[i64]) -> Result<C> {
    spec.validate()?;
    if l.len() != spec.m() {
        return invalid("label has wrong length");
    }
    let delta = lambda_p0(spec)?.delta;
    let alpha = annihilator(&spec.m_f64(), &spec.gamma, delta)?.alpha;
    let p = Param::new(spec);
    let mut k = 1 << 14;
    let mut prev = trapezoid_coefficient(&p, &alpha, l, k);
    while k < 1 << 18 {
        k *= 2;
        let cur = trapezoid_coefficient(&p, &alpha, l, k);
        if (cur - prev).norm() < 1e-10 {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(FqError::NonConvergence(format!("coefficient at {l:?}")))
}

/// Labels `l` with `M^T l` in `[-r, r]^n` that can carry a nonzero
/// coefficient: `l_j` in `[l_m b_j - r, l_m b_j + r]`, `|l_m| < max(1, beta (r + 1))`.
pub fn candidate_labels(spec: &Example1Spec, r: f64) -> Vec<Vec<i64>> {
    let b = spec.b_f64();
    let n = spec.n;
    let beta = b.iter().map(|v| 1.0 / v).fold(0.0, f64::max);
    let lm_max = (1.0f64).max(beta * (r + 1.0)).ceil() as i64;
    let mut out = Vec::new();
    for lm in -lm_max..=lm_max {
        let ranges: Vec<(i64, i64)> = (0..n).map(|j| ((lm as f64 * b[j] - r).ceil() as i64, (lm as f64 * b[j] + r).floor() as i64)).collect();
        if ranges.iter().any(|(a, b)| a > b) {
            continue;
        }
        let total: usize = ranges.iter().map(|(a, b)| (b - a + 1) as usize).product();
        for idx in 0..total {
            let mut rem = idx;
            let mut l: Vec<i64> = ranges
                .iter()
                .map(|(a, b)| {
                    let span = (b - a + 1) as usize;
                    let v = a + (rem % span) as i64;
                    rem /= span;
                    v
                })
                .collect();
            l.push(lm);
            out.push(l);
        }
    }
    out
}

/// All coefficients with frequency in `[-r, r]^n` and modulus above `floor`.
pub fn example1_spectrum(spec: &Example1Spec, r: f64, floor: f64) -> Result<SpectrumTable> {
    let p = build_example1(spec)?;
    let labels = candidate_labels(spec, r);
    let vals: Vec<C> = labels.iter().map(|l| fourier_coefficient(spec, l)).collect::<Result<_>>()?;
    let mut entries: Vec<SpectrumEntry> = labels
        .into_iter()
        .zip(vals)
        .filter(|(_, v)| v.norm() > floor)
        .map(|(l, v)| SpectrumEntry { frequency: p.frequency(&l), label: Some(l), coefficient: v })
        .collect();
    entries.retain(|e| e.frequency.iter().all(|f| f.abs() <= r));
    Ok(SpectrumTable { entries, window: Window::cube(spec.n, r), normalization: "Fourier-Bohr coefficients at M^T l".into() })
}

/// `2 (beta r + 1 + beta) (2 r + 1)^n` with `beta = max 1/b_j`.
pub fn support_bound(spec: &Example1Spec, r: f64) -> Result<u64> {
    if !(r > 0.0) {
        return invalid("r must be positive");
    }
    let beta = spec.b_f64().iter().map(|v| 1.0 / v).fold(0.0, f64::max);
    let g = 2.0 * (beta * r + 1.0 + beta) * (2.0 * r + 1.0).powi(spec.n as i32);
    (g + 1e-9).floor().to_u64().ok_or_else(|| FqError::Overflow("support bound".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutProjectSpec {
    /// angle in `(0, pi)`, `tan theta` assumed irrational
    pub theta: Scalar,
    /// assumed irrational, `|c| < |tan theta|`
    pub c: Scalar,
}

impl CutProjectSpec {
    pub fn new(theta: f64, c: f64) -> Result<Self> {
        let cp = CutProjectSpec { theta: Scalar::float(theta), c: Scalar::float(c) };
        cp.validate()?;
        Ok(cp)
    }

    pub fn validate(&self) -> Result<()> {
        let th = self.theta.value;
        if !(th > 0.0 && th < PI) {
            return invalid("theta must lie in (0, pi)");
        }
        if th.cos().abs() < 1e-12 {
            return invalid("theta = pi/2 gives no transverse section");
        }
        if !(self.c.value.abs() < th.tan().abs()) {
            return invalid("need |c| < |tan theta|");
        }
        Ok(())
    }
}

/// Points `t` in `[a, b]` with `psi(t) = (t cos theta, t sin theta) mod 1` on
/// `L_1 = {y = c x, x in [0, 1/2)}` (`j = 1`) or
/// `L_2 = {y = c - c x, x in [1/2, 1)}` (`j = 2`). On each piece where
/// `floor(t cos theta) = p` the condition is linear in `t`.
pub fn cutproject_multiset(cp: &CutProjectSpec, j: u8, a: f64, b: f64) -> Result<Multiset> {
    cp.validate()?;
    if !(b > a) {
        return invalid("need a < b");
    }
    let (th, c) = (cp.theta.value, cp.c.value);
    let (ct, st) = (th.cos(), th.sin());
    // t = (N + off(p)) / slope on piece p
    let (slope, x_lo, x_hi) = match j {
        1 => (st - c * ct, 0.0, 0.5),
        2 => (st + c * ct, 0.5, 1.0),
        _ => return invalid("j must be 1 or 2"),
    };
    let off = |p: i64| if j == 1 { -c * p as f64 } else { c + c * p as f64 };
    let (p_lo, p_hi) = {
        let (u, v) = (a * ct, b * ct);
        (u.min(v).floor() as i64 - 1, u.max(v).floor() as i64 + 1)
    };
    let mut pts: Vec<Vec<f64>> = Vec::new();
    for p in p_lo..=p_hi {
        let (t1, t2) = ((p as f64 + x_lo) / ct, (p as f64 + x_hi) / ct);
        let (tl, th_) = (t1.min(t2).max(a), t1.max(t2).min(b));
        if tl > th_ {
            continue;
        }
        let (n1, n2) = (tl * slope - off(p), th_ * slope - off(p));
        let (nl, nh) = (n1.min(n2).floor() as i64 - 1, n1.max(n2).ceil() as i64 + 1);
        for nn in nl..=nh {
            let t = (nn as f64 + off(p)) / slope;
            if t < a || t > b {
                continue;
            }
            let x = t * ct - p as f64;
            if x >= x_lo - 1e-12 && x < x_hi - 1e-12 && (x >= x_lo || p as f64 == (t * ct).floor()) {
                pts.push(vec![t]);
            }
        }
    }
    pts.sort_by(|u, v| u[0].total_cmp(&v[0]));
    pts.dedup_by(|u, v| (u[0] - v[0]).abs() < 1e-12);
    Ok(Multiset::from_points(pts).with_window(Window::interval(a, b)))
}

/// Distance in the torus from `psi(t)` to the section `L_j`.
pub fn cutproject_residual(cp: &CutProjectSpec, j: u8, t: f64) -> f64 {
    let (th, c) = (cp.theta.value, cp.c.value);
    let x = (t * th.cos()).rem_euclid(1.0);
    let y = (t * th.sin()).rem_euclid(1.0);
    let target = if j == 1 { c * x } else { c - c * x };
    let d = (y - target).rem_euclid(1.0);
    let in_range = if j == 1 { !(0.5 + 1e-12..=1.0 - 1e-12).contains(&x) } else { x >= 0.5 - 1e-12 };
    if in_range {
        d.min(1.0 - d)
    } else {
        f64::INFINITY
    }
}

/// Closed-form `F_B(mu_j)(l_1 cos theta + l_2 sin theta)`.
pub fn cutproject_fb_closed(cp: &CutProjectSpec, j: u8, l1: i64, l2: i64) -> Result<C> {
    cp.validate()?;
    let (th, c) = (cp.theta.value, cp.c.value);
    let (l1, l2) = (l1 as f64, l2 as f64);
    let sinc_half = |k: f64| if k.abs() < 1e-300 { 0.5 } else { (PI * k / 2.0).sin() / (PI * k) };
    match j {
        1 => {
            let k = l1 + c * l2;
            Ok(C::from_polar((th.sin() - c * th.cos()) * sinc_half(k), -PI * k / 2.0))
        }
        2 => {
            let k = l1 - c * l2;
            Ok(C::from_polar((th.sin() + c * th.cos()) * sinc_half(k), -PI * (3.0 * l1 + c * l2) / 2.0))
        }
        _ => invalid("j must be 1 or 2"),
    }
}

/// `T^{-1} sum_{t in Lambda_j, 0 <= t < T} e^{-2 pi i (l_1 cos theta + l_2 sin theta) t}`.
pub fn cutproject_fb_empirical(cp: &CutProjectSpec, j: u8, l1: i64, l2: i64, t_max: f64) -> Result<C> {
    let pts = cutproject_multiset(cp, j, 0.0, t_max)?;
    let th = cp.theta.value;
    let w = l1 as f64 * th.cos() + l2 as f64 * th.sin();
    let mut s = CSum::default();
    for (t, k) in &pts.points {
        if t[0] < t_max {
            s.add(C::from_polar(*k as f64, -TAU * w * t[0]));
        }
    }
    Ok(s.total() / t_max)
}

#[derive(Clone, Debug, Serialize)]
pub struct Example1Report {
    pub window: f64,
    pub roots: usize,
    pub max_residual: f64,
    pub delta: f64,
    pub delta_plus: f64,
    pub density: f64,
    pub density_gap: f64,
    /// contour root-finder agreement, `n = 1` only
    pub contour_count: Option<usize>,
    pub contour_max_gap: Option<f64>,
    pub contour_max_im: Option<f64>,
    pub coefficient_zero: C,
    pub poisson: Option<PoissonReport>,
    pub pass: bool,
}

/// Cross-checks one Example-1 instance on `[-r, r]^n`: parametric roots
/// against the lattice density, against the contour root-finder (`n = 1`),
/// and the Poisson formula with the contour-integral spectrum (`n = 1`).
pub fn verify_example1(spec: &Example1Spec, r: f64) -> Result<Example1Report> {
    let n = spec.n;
    let lat = lambda_p0(spec)?;
    let roots = enumerate_roots_example1(spec, r)?;
    let max_res = max_residual(spec, &roots)?;
    let vol: f64 = (2.0 * r).powi(n as i32);
    let density = roots.total() as f64 / vol;
    let density_gap = (density - lat.delta).abs() / lat.delta;
    let f0 = fourier_coefficient(spec, &vec![0; spec.m()])?;
    let (mut cc, mut cg, mut ci, mut poisson) = (None, None, None, None);
    let mut pass = max_res < 1e-10 && density_gap < 0.01 && (f0 - lat.delta).norm() < 1e-6;
    if n == 1 {
        let p = build_example1(spec)?;
        let f = TrigPoly1::from_trig_map(&p)?;
        let found = real_roots_1d(&f, -r, r, f.imag_band(), 1e-12)?;
        let inner = r - 1e-6;
        let mut a: Vec<f64> = roots.points.iter().map(|(x, _)| x[0]).filter(|x| x.abs() < inner).collect();
        let mut b: Vec<f64> = found.iter().filter(|e| e.re.abs() < inner).flat_map(|e| std::iter::repeat_n(e.re, e.multiplicity)).collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let gap = if a.len() == b.len() { a.iter().zip(&b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max) } else { f64::INFINITY };
        let im = found.iter().map(|e| e.im.abs()).fold(0.0, f64::max);
        pass &= gap < 1e-8 && im < 1e-8;
        cc = Some(b.len());
        cg = Some(gap);
        ci = Some(im);
        if r >= 8.0 {
            let z = example1_spectrum(spec, 6.0, 1e-14)?;
            let mu = roots.to_measure()?;
            let tests = [
                TestFunction::Gaussian { center: vec![0.3], sigma: 1.0 },
                TestFunction::ModulatedGaussian { center: vec![-0.2], sigma: 1.0, xi: vec![0.7] },
            ];
            let rep = poisson_check(&mu, &z, &tests, 1e-8)?;
            pass &= rep.pass;
            poisson = Some(rep);
        }
    }
    Ok(Example1Report {
        window: r,
        roots: roots.total(),
        max_residual: max_res,
        delta: lat.delta,
        delta_plus: lat.delta_plus,
        density,
        density_gap,
        contour_count: cc,
        contour_max_gap: cg,
        contour_max_im: ci,
        coefficient_zero: f0,
        poisson,
        pass,
    })
}
