//! Genericity of a Laurent map: every facial subsystem must have no zero in
//! the torus. Facial systems are reduced to their own lattice first, so a
//! system supported on an edge becomes univariate.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use std::f64::consts::TAU;

use crate::bivariate::solve_bivariate;
use crate::error::{FqError, Result};
use crate::lattice::{smith_normal_form, IntMat};
use crate::poly::{self, gcd_exact, GaussRat};
use crate::polyring::{LaurentMap, LaurentPoly, TrigMapRep};
use crate::polytope::{normal_fan_representatives, Coord};

type C = Complex64;

const COMMON_ROOT_TOL: f64 = 1e-8;
const UNDECIDED_TOL: f64 = 1e-6;
const MAX_DEN: i64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Generic,
    NonGeneric,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    Numeric,
    Sampling,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericityWitness {
    pub u: Vec<f64>,
    /// facial system as (exponent, re, im) triples per component
    pub facial: Vec<Vec<(Vec<i64>, f64, f64)>>,
    /// a common zero of the facial system, when one was located
    pub point: Option<Vec<(f64, f64)>>,
    /// twist `g` in turns, for uniform genericity
    pub twist: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericityVerdict {
    pub verdict: Verdict,
    pub mode: Mode,
    pub witnesses: Vec<GenericityWitness>,
    /// smallest certificate over non-monomial faces; infinite if none
    pub margin: f64,
    pub faces_checked: usize,
}

enum FaceOutcome {
    Empty(f64),
    Zero(Option<Vec<C>>),
    Unclear(f64),
}

fn describe(sys: &[LaurentPoly]) -> Vec<Vec<(Vec<i64>, f64, f64)>> {
    sys.iter().map(|p| p.terms().map(|(e, c)| (e.clone(), c.re, c.im)).collect()).collect()
}

/// Rewrites the facial system over the lattice spanned by its exponent
/// differences; returns the rank, the reduced system, and `U` for mapping
/// points back.
fn reduce(sys: &[LaurentPoly]) -> (usize, Vec<LaurentPoly>, Vec<Vec<i64>>) {
    let m = sys[0].nvars();
    let mut cols: Vec<Vec<i64>> = Vec::new();
    let mut bases = Vec::new();
    for p in sys {
        let sup = p.support();
        let v = sup[0].clone();
        for e in &sup[1..] {
            cols.push(e.iter().zip(&v).map(|(a, b)| a - b).collect());
        }
        bases.push(v);
    }
    if cols.is_empty() {
        let id = (0..m).map(|i| (0..m).map(|j| (i == j) as i64).collect()).collect();
        return (0, vec![], id);
    }
    let g: Vec<Vec<i64>> = (0..m).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    let snf = smith_normal_form(&IntMat::from_rows(&g).expect("rectangular"));
    let d = snf.rank();
    let u = snf.u.to_i64_rows().expect("small unimodular transform");
    let reduced = sys
        .iter()
        .zip(&bases)
        .map(|(p, v)| {
            let terms = p.terms().map(|(e, c)| {
                let diff: Vec<i64> = e.iter().zip(v).map(|(a, b)| a - b).collect();
                let img: Vec<i64> = (0..d).map(|i| u[i].iter().zip(&diff).map(|(x, y)| x * y).sum()).collect();
                (img, *c)
            });
            LaurentPoly::from_terms(d, terms).expect("consistent dimension")
        })
        .collect();
    (d, reduced, u)
}

/// Point in the original torus from reduced coordinates `y` (others set to 1):
/// `z_j = prod_i y_i^{U_ij}`.
fn lift_point(y: &[C], u: &[Vec<i64>]) -> Vec<C> {
    let m = u.len();
    (0..m)
        .map(|j| y.iter().enumerate().fold(C::new(1.0, 0.0), |acc, (i, yi)| acc * yi.powi(u[i][j] as i32)))
        .collect()
}

fn dense_univariate(p: &LaurentPoly) -> Vec<C> {
    let lo = p.terms().map(|(e, _)| e[0]).min().unwrap_or(0);
    let hi = p.terms().map(|(e, _)| e[0]).max().unwrap_or(0);
    let mut c = vec![C::new(0.0, 0.0); (hi - lo + 1) as usize];
    for (e, v) in p.terms() {
        c[(e[0] - lo) as usize] = *v;
    }
    c
}

fn rel_residual(p: &LaurentPoly, z: &[C]) -> f64 {
    p.eval(z).map(|v| v.norm()).unwrap_or(f64::INFINITY) / p.abs_eval(z).max(1e-300)
}

fn univariate_margin(sys: &[Vec<C>]) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..sys.len() {
        for j in i + 1..sys.len() {
            best = best.max(poly::resultant(&sys[i], &sys[j]).norm());
        }
    }
    best
}

fn decide_univariate(red: &[LaurentPoly], allow_exact: bool) -> Result<(FaceOutcome, bool)> {
    let dense: Vec<Vec<C>> = red.iter().map(dense_univariate).collect();
    let margin = univariate_margin(&dense);
    if allow_exact {
        let exact: Option<Vec<Vec<GaussRat>>> =
            dense.iter().map(|p| p.iter().map(|c| GaussRat::from_complex(*c, MAX_DEN)).collect()).collect();
        if let Some(ex) = exact {
            let mut g = ex[0].clone();
            for p in &ex[1..] {
                g = gcd_exact(&g, p);
            }
            if poly::degree_exact(&g) == 0 {
                return Ok((FaceOutcome::Empty(margin), true));
            }
            let gc: Vec<C> = g.iter().map(|c| c.to_complex()).collect();
            let r = poly::roots(&gc)?;
            return Ok((FaceOutcome::Zero(r.first().map(|z| vec![*z])), true));
        }
    }
    // numeric: roots of the sparsest component, checked against the rest
    let pivot = (0..dense.len()).min_by_key(|&i| dense[i].len()).unwrap();
    let mut worst = f64::INFINITY;
    let mut at = None;
    for r in poly::roots(&dense[pivot])? {
        if r.norm() == 0.0 {
            continue;
        }
        let res = red
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != pivot)
            .map(|(_, p)| rel_residual(p, &[r]))
            .fold(0.0, f64::max);
        if res < worst {
            worst = res;
            at = Some(r);
        }
    }
    let out = if worst < COMMON_ROOT_TOL {
        FaceOutcome::Zero(at.map(|z| vec![z]))
    } else if worst < UNDECIDED_TOL {
        FaceOutcome::Unclear(worst)
    } else {
        FaceOutcome::Empty(margin)
    };
    Ok((out, false))
}

fn decide_bivariate(red: &[LaurentPoly]) -> Result<FaceOutcome> {
    let pairs = [(0usize, 1usize, 2usize), (0, 2, 1), (1, 2, 0)];
    for &(a, b, c) in pairs.iter().take(if red.len() > 2 { 3 } else { 1 }) {
        let roots = match solve_bivariate(&red[a], &red[b]) {
            Ok(r) => r,
            Err(FqError::Unsupported(_)) => continue,
            Err(e) => return Err(e),
        };
        if red.len() == 2 {
            return Ok(match roots.first() {
                Some(r) => FaceOutcome::Zero(Some(r.z.to_vec())),
                None => FaceOutcome::Empty(f64::INFINITY),
            });
        }
        let mut worst = f64::INFINITY;
        let mut at = None;
        for r in &roots {
            let res = rel_residual(&red[c], &r.z);
            if res < worst {
                worst = res;
                at = Some(r.z.to_vec());
            }
        }
        return Ok(if worst < COMMON_ROOT_TOL {
            FaceOutcome::Zero(at)
        } else if worst < UNDECIDED_TOL {
            FaceOutcome::Unclear(worst)
        } else {
            FaceOutcome::Empty(worst)
        });
    }
    Ok(FaceOutcome::Unclear(0.0))
}

fn decide_face(sys: &[LaurentPoly], allow_exact: bool) -> Result<(FaceOutcome, bool, Vec<Vec<i64>>)> {
    if sys.iter().any(|p| p.is_monomial()) {
        return Ok((FaceOutcome::Empty(f64::INFINITY), true, vec![]));
    }
    let (d, red, u) = reduce(sys);
    match d {
        1 => {
            let (o, ex) = decide_univariate(&red, allow_exact)?;
            Ok((o, ex, u))
        }
        2 => Ok((decide_bivariate(&red)?, false, u)),
        _ => Err(FqError::Unsupported(format!("facial system of rank {d}"))),
    }
}

fn to_f64_vec<T: Coord>(u: &[T]) -> Vec<f64> {
    u.iter().map(|v| v.to_f64()).collect()
}

/// Genericity of a square Laurent map `Q` with `n = m <= 3`.
pub fn is_generic(q: &LaurentMap) -> Result<GenericityVerdict> {
    if q.n() != q.m() {
        return Err(FqError::InvalidInput("genericity needs n = m".into()));
    }
    if q.m() > 3 {
        return Err(FqError::Unsupported("genericity above three variables".into()));
    }
    let polys = q.newton_polytopes()?;
    let cells = normal_fan_representatives(&polys)?;
    let mut margin = f64::INFINITY;
    let mut witnesses = Vec::new();
    let mut undecided = false;
    let mut all_exact = true;
    for cell in &cells {
        let face = q.facial_restriction::<BigRational>(&cell.u)?;
        let sys = face.components();
        let (outcome, exact, u) = decide_face(sys, q.m() <= 2)?;
        all_exact &= exact;
        match outcome {
            FaceOutcome::Empty(mg) => margin = margin.min(mg),
            FaceOutcome::Unclear(mg) => {
                undecided = true;
                margin = margin.min(mg);
            }
            FaceOutcome::Zero(pt) => {
                margin = 0.0;
                let point = pt.map(|y| lift_point(&y, &u).iter().map(|z| (z.re, z.im)).collect());
                witnesses.push(GenericityWitness { u: to_f64_vec(&cell.u), facial: describe(sys), point, twist: None });
            }
        }
    }
    let verdict = if !witnesses.is_empty() {
        Verdict::NonGeneric
    } else if undecided {
        Verdict::Undecided
    } else {
        Verdict::Generic
    };
    let mode = if all_exact { Mode::Exact } else if q.m() <= 2 { Mode::Numeric } else { Mode::Sampling };
    Ok(GenericityVerdict { verdict, mode, witnesses, margin, faces_checked: cells.len() })
}

/// Genericity of `Q` twisted by every `g` in the torus `T^m`, for the
/// trigonometric map `P = Q(exp(2 pi i M z))`. For `m > n` this samples `g`
/// on a grid with `res` points per coordinate.
pub fn is_uniformly_generic(p: &TrigMapRep, res: usize) -> Result<GenericityVerdict> {
    if res < 8 {
        return Err(FqError::InvalidInput("grid resolution must be >= 8".into()));
    }
    let (m, n) = (p.m(), p.n());
    if m == n {
        let mut v = is_generic(p.q())?;
        for w in &mut v.witnesses {
            w.twist = Some(vec![0.0; m]);
        }
        return Ok(v);
    }
    if m > 6 {
        return Err(FqError::Unsupported("twist grid above six variables".into()));
    }
    let polys = p.newton_polytopes_real()?;
    let cells = normal_fan_representatives(&polys)?;
    let mf = p.m_f64();
    let mut margin = f64::INFINITY;
    let mut witnesses = Vec::new();
    let mut undecided = false;
    let h = 1.0 / res as f64;
    for cell in &cells {
        let mu: Vec<f64> = (0..m).map(|j| (0..n).map(|k| mf[j][k] * cell.u[k]).sum()).collect();
        let face = p.q().facial_restriction::<f64>(&mu)?;
        let sys = face.components();
        if sys.iter().any(|c| c.is_monomial()) {
            continue;
        }
        // Lipschitz constant of the normalised residual in turns
        let lip = sys
            .iter()
            .map(|c| c.terms().map(|(e, _)| e.iter().map(|v| v.abs() as f64).sum::<f64>()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
            * 2.0
            * TAU;
        let ys = transverse_grid(&cell.u, res);
        let mut face_min = f64::INFINITY;
        let mut face_at: Option<(Vec<f64>, Vec<C>)> = None;
        let total = res.pow(m as u32);
        for idx in 0..total {
            let mut g = Vec::with_capacity(m);
            let mut r = idx;
            for _ in 0..m {
                g.push((r % res) as f64 * h);
                r /= res;
            }
            for y in &ys {
                let z: Vec<C> = (0..m)
                    .map(|j| {
                        let my: f64 = (0..n).map(|k| mf[j][k] * y[k]).sum();
                        C::new(0.0, TAU * g[j]).exp() * (-TAU * my).exp()
                    })
                    .collect();
                let r = sys.iter().map(|c| rel_residual(c, &z)).fold(0.0, f64::max);
                if r < face_min {
                    face_min = r;
                    face_at = Some((g.clone(), z));
                }
            }
        }
        margin = margin.min(face_min);
        if face_min < 1e-10 {
            let (g, z) = face_at.unwrap();
            witnesses.push(GenericityWitness {
                u: cell.u.clone(),
                facial: describe(sys),
                point: Some(z.iter().map(|v| (v.re, v.im)).collect()),
                twist: Some(g),
            });
        } else if face_min <= 10.0 * lip * h {
            undecided = true;
        }
    }
    let verdict = if !witnesses.is_empty() {
        Verdict::NonGeneric
    } else if undecided {
        Verdict::Undecided
    } else {
        Verdict::Generic
    };
    Ok(GenericityVerdict { verdict, mode: Mode::Sampling, witnesses, margin, faces_checked: cells.len() })
}

/// Sample points of `u^perp` in a box; the normalised residual is invariant
/// along `u`, so only the transverse directions matter.
fn transverse_grid(u: &[f64], res: usize) -> Vec<Vec<f64>> {
    let n = u.len();
    if n == 1 {
        return vec![vec![0.0]];
    }
    let norm: f64 = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    let un: Vec<f64> = u.iter().map(|v| v / norm).collect();
    // orthonormal complement by Gram-Schmidt on the standard basis
    let mut basis: Vec<Vec<f64>> = vec![un.clone()];
    for k in 0..n {
        let mut e: Vec<f64> = (0..n).map(|i| (i == k) as u8 as f64).collect();
        for b in &basis {
            let d: f64 = e.iter().zip(b).map(|(x, y)| x * y).sum();
            for i in 0..n {
                e[i] -= d * b[i];
            }
        }
        let l: f64 = e.iter().map(|v| v * v).sum::<f64>().sqrt();
        if l > 1e-8 {
            basis.push(e.iter().map(|v| v / l).collect());
        }
    }
    let comp = &basis[1..];
    let steps: Vec<f64> = (0..=res).map(|i| -1.0 + 2.0 * i as f64 / res as f64).collect();
    let mut out = vec![vec![0.0; n]];
    for b in comp {
        let mut next = Vec::new();
        for p in &out {
            for s in &steps {
                next.push(p.iter().zip(b).map(|(x, y)| x + s * y).collect());
            }
        }
        out = next;
    }
    out
}

/// Total root count of a generic square system in `(C*)^2` via the resultant solver.
pub fn bernshtein_count_2d(q: &LaurentMap) -> Result<usize> {
    if q.m() != 2 || q.n() != 2 {
        return Err(FqError::InvalidInput("needs a 2 x 2 system".into()));
    }
    let r = solve_bivariate(&q.components()[0], &q.components()[1])?;
    Ok(crate::bivariate::total_multiplicity(&r))
}

/// Mixed volume of the Newton polytopes as an integer.
pub fn bernshtein_bound(q: &LaurentMap) -> Result<usize> {
    let mv = crate::polytope::mixed_volume(&q.newton_polytopes()?)?;
    if !mv.is_integer() {
        return Err(FqError::InvalidInput("non-integral mixed volume".into()));
    }
    mv.to_integer().to_usize().ok_or_else(|| FqError::Overflow("mixed volume".into()))
}
