//! Dense univariate polynomials (ascending coefficients): roots, clustering,
//! resultants, and exact gcd over Q(i).

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{FqError, Result};
use crate::scalar::rat_to_f64;

pub type C = Complex64;

pub fn horner(c: &[C], z: C) -> C {
    c.iter().rev().fold(C::new(0.0, 0.0), |acc, &a| acc * z + a)
}

pub fn horner_deriv(c: &[C], z: C) -> (C, C) {
    let mut p = C::new(0.0, 0.0);
    let mut dp = C::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn max_abs(c: &[C]) -> f64 {
    c.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Drops negligible leading coefficients.
pub fn trim(c: &[C]) -> Vec<C> {
    let scale = max_abs(c);
    let mut v = c.to_vec();
    while v.len() > 1 && v.last().is_some_and(|x| x.norm() <= 1e-15 * scale) {
        v.pop();
    }
    v
}

/// All roots (with repetition) of `sum c_k z^k`. Zero polynomial is an error.
pub fn roots(c: &[C]) -> Result<Vec<C>> {
    let c = trim(c);
    if c.iter().all(|v| v.norm() == 0.0) {
        return Err(FqError::InvalidInput("zero polynomial has no finite root set".into()));
    }
    let lead_zero = c.iter().take_while(|v| v.norm() == 0.0).count();
    let mut out = vec![C::new(0.0, 0.0); lead_zero];
    let p = &c[lead_zero..];
    let d = p.len() - 1;
    if d == 0 {
        return Ok(out);
    }
    if d == 1 {
        out.push(-p[0] / p[1]);
        return Ok(out);
    }
    let lead = p[d];
    let mut m = DMatrix::<C>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = C::new(1.0, 0.0);
    }
    for i in 0..d {
        m[(i, d - 1)] = -p[i] / lead;
    }
    let schur = nalgebra::linalg::Schur::try_new(m, 1e-15, 10_000)
        .ok_or_else(|| FqError::NonConvergence("companion eigenvalues".into()))?;
    let ev = schur.eigenvalues().ok_or_else(|| FqError::NonConvergence("companion eigenvalues".into()))?;
    for z in ev.iter() {
        out.push(polish(p, *z));
    }
    Ok(out)
}

/// A few guarded Newton steps; never makes the residual worse.
fn polish(p: &[C], mut z: C) -> C {
    let mut best = horner(p, z).norm();
    for _ in 0..3 {
        let (v, dv) = horner_deriv(p, z);
        if dv.norm() == 0.0 {
            break;
        }
        let cand = z - v / dv;
        let r = horner(p, cand).norm();
        if r < best && cand.is_finite() {
            best = r;
            z = cand;
        } else {
            break;
        }
    }
    z
}

/// Single-linkage clusters within `radius`; returns cluster means and sizes.
pub fn cluster(roots: &[C], radius: f64) -> Vec<(C, usize)> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<(usize, C, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += roots[i];
                g.2 += 1;
            }
            None => groups.push((r, roots[i], 1)),
        }
    }
    groups.into_iter().map(|(_, s, k)| (s / k as f64, k)).collect()
}

pub fn sylvester(f: &[C], g: &[C]) -> DMatrix<C> {
    let p = f.len() - 1;
    let q = g.len() - 1;
    let n = p + q;
    let mut s = DMatrix::<C>::zeros(n, n);
    for i in 0..q {
        for (k, &c) in f.iter().rev().enumerate() {
            s[(i, i + k)] = c;
        }
    }
    for i in 0..p {
        for (k, &c) in g.iter().rev().enumerate() {
            s[(q + i, i + k)] = c;
        }
    }
    s
}

pub fn resultant(f: &[C], g: &[C]) -> C {
    let (f, g) = (trim(f), trim(g));
    if f.len() == 1 && g.len() == 1 {
        return C::new(1.0, 0.0);
    }
    if f.len() == 1 {
        return f[0].powu((g.len() - 1) as u32);
    }
    if g.len() == 1 {
        return g[0].powu((f.len() - 1) as u32);
    }
    sylvester(&f, &g).determinant()
}

/// Best rational approximation with denominator at most `max_den`, accepted
/// only if it reproduces `x` to `tol`.
pub fn recover_rational(x: f64, max_den: i64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if ((h1 as f64) / (k1 as f64) - x).abs() <= tol * x.abs().max(1.0) {
            return Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = r - a;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

/// Exact Gaussian rational `re + i im`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn zero() -> Self {
        GaussRat { re: BigRational::zero(), im: BigRational::zero() }
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn from_complex(c: C, max_den: i64) -> Option<Self> {
        Some(GaussRat { re: recover_rational(c.re, max_den, 1e-13)?, im: recover_rational(c.im, max_den, 1e-13)? })
    }
    pub fn to_complex(&self) -> C {
        C::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
    fn mul(&self, o: &GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
    fn sub(&self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    fn inv(&self) -> GaussRat {
        let n = &self.re * &self.re + &self.im * &self.im;
        GaussRat { re: &self.re / &n, im: -&self.im / &n }
    }
}

fn strip(mut p: Vec<GaussRat>) -> Vec<GaussRat> {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
    if p.is_empty() {
        p.push(GaussRat::zero());
    }
    p
}

fn make_monic(p: Vec<GaussRat>) -> Vec<GaussRat> {
    let p = strip(p);
    let inv = p.last().unwrap().inv();
    p.iter().map(|c| c.mul(&inv)).collect()
}

fn poly_rem(a: &[GaussRat], b: &[GaussRat]) -> Vec<GaussRat> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = b[db].inv();
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let k = r.len() - 1 - db;
        let q = r.last().unwrap().mul(&lead_inv);
        for i in 0..=db {
            r[k + i] = r[k + i].sub(&q.mul(&b[i]));
        }
        r.pop();
        r = strip(r);
        if r.len() <= db {
            break;
        }
    }
    strip(r)
}

/// Monic gcd over Q(i).
pub fn gcd_exact(a: &[GaussRat], b: &[GaussRat]) -> Vec<GaussRat> {
    let mut x = strip(a.to_vec());
    let mut y = strip(b.to_vec());
    if x.iter().all(|c| c.is_zero()) {
        return make_monic(y);
    }
    while !(y.len() == 1 && y[0].is_zero()) {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    make_monic(x)
}

pub fn degree_exact(p: &[GaussRat]) -> usize {
    strip(p.to_vec()).len() - 1
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r.to_f64().unwrap_or(f64::INFINITY)
}
