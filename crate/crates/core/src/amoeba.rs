//! Amoebas `Log|V(q)|`: membership by counting fibre roots inside a circle,
//! Lee-Yang polynomials, and stability of `M R^n` against the amoeba.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

use crate::error::{invalid, Result};
use crate::poly;
use crate::polyring::{LaurentMap, LaurentPoly};

type C = Complex64;

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_GRID: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    Yes,
    No,
    BoundaryUndecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct AmoebaReport {
    pub membership: Membership,
    /// smallest `| log|root| - x_var |` seen over the fibre grid
    pub min_gap: f64,
    /// order of the complement component (winding numbers), when outside
    pub order: Option<Vec<i64>>,
}

fn pick_var(q: &LaurentPoly) -> Option<usize> {
    let m = q.nvars();
    let mut best = None;
    let mut span = 0;
    for j in 0..m {
        let s = q.exponent_span(j);
        if s >= span && s > 0 {
            span = s;
            best = Some(j);
        }
    }
    best
}

fn lowest_exp(q: &LaurentPoly, j: usize) -> i64 {
    q.terms().map(|(e, _)| e[j]).min().unwrap_or(0)
}

/// Roots in `var` over the point `x` with angles `theta` on the other
/// coordinates: (count inside `e^{x_var}`, min gap). The fibre polynomial is
/// rescaled to the unit circle in log scale so large `|x|` neither overflows
/// nor loses leading coefficients.
fn fibre(q: &LaurentPoly, var: usize, x: &[f64], theta: &[f64]) -> Result<(i64, f64)> {
    let lo = lowest_exp(q, var);
    let d = q.exponent_span(var) as usize;
    let mut logs: Vec<(usize, f64, f64)> = Vec::with_capacity(q.num_terms());
    for (e, c) in q.terms() {
        let mut lg = c.norm().ln();
        let mut ph = c.arg();
        let mut k = 0;
        for (j, (&ej, &xj)) in e.iter().zip(x).enumerate() {
            lg += ej as f64 * xj;
            if j != var {
                ph += ej as f64 * TAU * theta[k];
                k += 1;
            }
        }
        logs.push(((e[var] - lo) as usize, lg, ph));
    }
    let top = logs.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    let mut coeffs = vec![C::new(0.0, 0.0); d + 1];
    for (k, lg, ph) in logs {
        coeffs[k] += C::from_polar((lg - top).exp(), ph);
    }
    let rs = poly::roots(&coeffs)?;
    let mut inside = 0;
    let mut gap = f64::INFINITY;
    for r in rs {
        let n = r.norm();
        if n == 0.0 {
            inside += 1;
            continue;
        }
        let l = n.ln();
        if l < 0.0 {
            inside += 1;
        }
        gap = gap.min(l.abs());
    }
    Ok((inside, gap))
}

/// Winding numbers of `q` around each coordinate circle at `x`, read off the
/// fibre over angle zero. Only meaningful when `x` is outside the amoeba.
pub fn component_order(q: &LaurentPoly, x: &[f64]) -> Result<Vec<i64>> {
    let m = q.nvars();
    (0..m)
        .map(|j| {
            if q.exponent_span(j) == 0 {
                return Ok(lowest_exp(q, j));
            }
            let theta = vec![0.0; m - 1];
            let (inside, _) = fibre(q, j, x, &theta)?;
            Ok(inside + lowest_exp(q, j))
        })
        .collect()
}

pub fn amoeba_contains(q: &LaurentPoly, x: &[f64], tol: f64, grid: usize) -> Result<AmoebaReport> {
    let m = q.nvars();
    if x.len() != m {
        return invalid("point has wrong dimension");
    }
    if !(tol > 0.0) {
        return invalid("tolerance must be positive");
    }
    if grid < 64 {
        return invalid("grid must be at least 64");
    }
    if q.is_zero() {
        return invalid("zero polynomial");
    }
    let Some(var) = pick_var(q) else {
        let order = q.support()[0].clone();
        return Ok(AmoebaReport { membership: Membership::No, min_gap: f64::INFINITY, order: Some(order) });
    };
    let per = if m <= 2 { grid } else { (grid / 4).max(16) };
    let dims = m - 1;
    let total = per.pow(dims as u32);
    let cells: Vec<(i64, f64)> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let mut th = Vec::with_capacity(dims);
            let mut r = idx;
            for _ in 0..dims {
                th.push((r % per) as f64 / per as f64);
                r /= per;
            }
            fibre(q, var, x, &th)
        })
        .collect::<Result<_>>()?;
    let min_gap = cells.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let mut crossing = false;
    for idx in 0..total {
        let mut stride = 1;
        for _ in 0..dims {
            let coord = (idx / stride) % per;
            let nb = idx - coord * stride + ((coord + 1) % per) * stride;
            if cells[idx].0 != cells[nb].0 {
                crossing = true;
            }
            stride *= per;
        }
    }
    let membership = if crossing || min_gap < tol {
        Membership::Yes
    } else if min_gap > 10.0 * tol {
        Membership::No
    } else {
        Membership::BoundaryUndecided
    };
    let order = if membership == Membership::No { Some(component_order(q, x)?) } else { None };
    Ok(AmoebaReport { membership, min_gap, order })
}

/// `sum_J prod_{j in J, k not in J} a_jk z^J` for symmetric `A` with off-diagonal
/// moduli in (0, 1).
pub fn lee_yang_family(a: &[Vec<C>]) -> Result<LaurentPoly> {
    let n = a.len();
    if n == 0 || n > 20 || a.iter().any(|r| r.len() != n) {
        return invalid("A must be square with 1 <= n <= 20");
    }
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            if (a[j][k] - a[k][j]).norm() > 1e-15 {
                return invalid("A must be symmetric");
            }
            let r = a[j][k].norm();
            if !(r > 0.0 && r < 1.0) {
                return invalid("off-diagonal entries need modulus in (0, 1)");
            }
        }
    }
    let terms = (0u32..(1 << n)).map(|mask| {
        let mut c = C::new(1.0, 0.0);
        for j in 0..n {
            if mask >> j & 1 == 0 {
                continue;
            }
            for k in 0..n {
                if mask >> k & 1 == 0 {
                    c *= a[j][k];
                }
            }
        }
        ((0..n).map(|j| (mask >> j & 1) as i64).collect(), c)
    });
    LaurentPoly::from_terms(n, terms.collect::<Vec<_>>())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Probable {
    ProbablyYes,
    No,
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct LeeYangReport {
    pub verdict: Probable,
    pub witness: Option<Vec<f64>>,
    pub samples: usize,
}

const LY_STEPS: [f64; 12] = [1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0];

fn orthant_samples(m: usize) -> Vec<Vec<f64>> {
    let steps: Vec<f64> = if m <= 2 {
        LY_STEPS.iter().map(|k| k / 8.0).collect()
    } else {
        [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0].iter().map(|k| k / 8.0).collect()
    };
    let mut pts: Vec<Vec<f64>> = vec![vec![]];
    if m <= 3 {
        for _ in 0..m {
            pts = pts.iter().flat_map(|p| steps.iter().map(move |s| [p.as_slice(), &[*s]].concat())).collect();
        }
    } else {
        pts.clear();
        for j in 0..m {
            for s in &steps {
                let mut p = vec![0.125; m];
                p[j] = *s;
                pts.push(p);
            }
        }
    }
    for k in 1..=64 {
        pts.push(vec![k as f64 / 8.0; m]);
    }
    pts
}

/// Samples both open sign orthants `{x > 0}` and `{x < 0}`. A point inside the
/// amoeba, or two points with different complement orders, disproves.
pub fn is_lee_yang(q: &LaurentPoly, grid: usize) -> Result<LeeYangReport> {
    let m = q.nvars();
    let pts = orthant_samples(m);
    let mut undecided = false;
    let mut samples = 0;
    for sign in [1.0, -1.0] {
        let xs: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|v| sign * v).collect()).collect();
        let reports: Vec<AmoebaReport> =
            xs.iter().map(|x| amoeba_contains(q, x, DEFAULT_TOL, grid)).collect::<Result<_>>()?;
        samples += reports.len();
        let mut first: Option<&Vec<i64>> = None;
        for (x, r) in xs.iter().zip(&reports) {
            match r.membership {
                Membership::Yes => {
                    return Ok(LeeYangReport { verdict: Probable::No, witness: Some(x.clone()), samples })
                }
                Membership::BoundaryUndecided => undecided = true,
                Membership::No => {
                    let o = r.order.as_ref().unwrap();
                    match first {
                        None => first = Some(o),
                        Some(f) if f != o => {
                            return Ok(LeeYangReport { verdict: Probable::No, witness: Some(x.clone()), samples })
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    let verdict = if undecided { Probable::Undecided } else { Probable::ProbablyYes };
    Ok(LeeYangReport { verdict, witness: None, samples })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    ProbablyStable,
    Unstable,
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityWitness {
    pub m_perturbed: Vec<Vec<f64>>,
    pub v: Vec<f64>,
    pub x: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub verdict: Stability,
    pub perturbations: usize,
    pub points: usize,
    pub min_clearance: f64,
    pub witness: Option<StabilityWitness>,
}

fn directions(n: usize) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..16).map(|k| {
            let t = TAU * k as f64 / 16.0;
            vec![t.cos(), t.sin()]
        })
        .collect(),
        _ => {
            let k = 32 * (n - 2);
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..k)
                .map(|i| {
                    let y = 1.0 - 2.0 * (i as f64 + 0.5) / k as f64;
                    let r = (1.0 - y * y).sqrt();
                    let t = golden * i as f64;
                    let mut v = vec![r * t.cos(), r * t.sin(), y];
                    v.resize(n, 0.0);
                    v
                })
                .collect()
        }
    }
}

fn perturbations(m_mat: &[Vec<f64>], delta: f64) -> Vec<Vec<Vec<f64>>> {
    let mut out = vec![m_mat.to_vec()];
    if delta == 0.0 {
        return out;
    }
    let (rows, cols) = (m_mat.len(), m_mat[0].len());
    for j in 0..rows {
        for k in 0..cols {
            for s in [1.0, -1.0] {
                let mut p = m_mat.to_vec();
                p[j][k] += s * delta;
                out.push(p);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..4 {
        let e: Vec<Vec<f64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let norm = e.iter().flatten().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        out.push(m_mat.iter().zip(&e).map(|(r, er)| r.iter().zip(er).map(|(a, b)| a + delta * b / norm).collect()).collect());
    }
    out
}

/// Probes whether `M' R^n` meets the amoeba of `Lambda(Q)` only at the origin
/// for all `M'` within `delta` of `M`. For `n = 1` the amoeba is that of the
/// single component and crossings certify instability. For `n >= 2` a point is
/// certified outside when some component amoeba misses it; otherwise the probe
/// stays undecided.
pub fn m_stability_probe(q: &LaurentMap, m_mat: &[Vec<f64>], delta: f64, grid: usize) -> Result<StabilityReport> {
    let (m, n) = (q.m(), q.n());
    if m_mat.len() != m || m_mat.iter().any(|r| r.len() != n) {
        return invalid(format!("M must be {m} x {n}"));
    }
    if !(delta >= 0.0) {
        return invalid("delta must be nonnegative");
    }
    let eps0 = 0.05;
    let rmax = if delta > 0.0 { (10.0 / delta).clamp(20.0, 1e4) } else { 20.0 };
    let nrad = 48;
    let radii: Vec<f64> = (0..nrad).map(|i| eps0 * (rmax / eps0).powf(i as f64 / (nrad - 1) as f64)).collect();
    let mut min_clearance = f64::INFINITY;
    let mut undecided = false;
    let perts = perturbations(m_mat, delta);
    let mut points = 0;
    for mp in &perts {
        for v in directions(n) {
            let mut prev: Option<Vec<i64>> = None;
            for &t in &radii {
                let x: Vec<f64> = (0..m).map(|j| (0..n).map(|k| mp[j][k] * v[k] * t).sum()).collect();
                points += 1;
                let witness = || StabilityWitness { m_perturbed: mp.clone(), v: v.iter().map(|c| c * t).collect(), x: x.clone() };
                if n == 1 {
                    let r = amoeba_contains(&q.components()[0], &x, DEFAULT_TOL, grid)?;
                    match r.membership {
                        Membership::Yes => {
                            return Ok(StabilityReport {
                                verdict: Stability::Unstable,
                                perturbations: perts.len(),
                                points,
                                min_clearance: 0.0,
                                witness: Some(witness()),
                            })
                        }
                        Membership::BoundaryUndecided => {
                            undecided = true;
                            prev = None;
                        }
                        Membership::No => {
                            min_clearance = min_clearance.min(r.min_gap);
                            if let Some(p) = &prev {
                                if Some(p) != r.order.as_ref() {
                                    return Ok(StabilityReport {
                                        verdict: Stability::Unstable,
                                        perturbations: perts.len(),
                                        points,
                                        min_clearance: 0.0,
                                        witness: Some(witness()),
                                    });
                                }
                            }
                            prev = r.order;
                        }
                    }
                } else {
                    let mut certified = false;
                    for comp in q.components() {
                        let r = amoeba_contains(comp, &x, DEFAULT_TOL, grid)?;
                        if r.membership == Membership::No {
                            min_clearance = min_clearance.min(r.min_gap);
                            certified = true;
                            break;
                        }
                    }
                    if !certified {
                        undecided = true;
                    }
                }
            }
        }
    }
    if undecided && n >= 2 {
        return Ok(StabilityReport { verdict: Stability::Undecided, perturbations: perts.len(), points, min_clearance, witness: None });
    }
    let verdict = if undecided { Stability::Undecided } else { Stability::ProbablyStable };
    Ok(StabilityReport { verdict, perturbations: perts.len(), points, min_clearance, witness: None })
}
