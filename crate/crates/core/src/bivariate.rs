//! Isolated common zeros in the torus of two Laurent polynomials in two
//! variables, by a Sylvester resultant interpolated from samples on a circle.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{invalid, FqError, Result};
use crate::poly::{cluster, roots, sylvester};
use crate::polyring::LaurentPoly;

type C = Complex64;

#[derive(Clone, Debug)]
pub struct TorusRoot {
    pub z: [C; 2],
    pub multiplicity: usize,
}

/// Shift so every exponent is nonnegative with minimum zero in each variable.
fn normalise(p: &LaurentPoly) -> LaurentPoly {
    let lo: Vec<i64> = (0..2).map(|k| p.terms().map(|(e, _)| e[k]).min().unwrap_or(0)).collect();
    p.shift(&[-lo[0], -lo[1]])
}

fn deg(p: &LaurentPoly, k: usize) -> usize {
    p.terms().map(|(e, _)| e[k]).max().unwrap_or(0) as usize
}

/// Coefficients of `p` in `z2` (formal degree `d`) at fixed `z1`.
fn coeffs_in_z2(p: &LaurentPoly, z1: C, d: usize) -> Vec<C> {
    let mut c = vec![C::new(0.0, 0.0); d + 1];
    for (e, v) in p.terms() {
        c[e[1] as usize] += v * z1.powi(e[0] as i32);
    }
    c
}

fn swap_vars(p: &LaurentPoly) -> LaurentPoly {
    LaurentPoly::from_terms(2, p.terms().map(|(e, c)| (vec![e[1], e[0]], *c))).expect("two variables")
}

fn rel_residual(p: &LaurentPoly, z: &[C]) -> f64 {
    let v = p.eval(z).map(|v| v.norm()).unwrap_or(f64::INFINITY);
    v / p.abs_eval(z).max(1e-300)
}

fn newton2(f: &LaurentPoly, g: &LaurentPoly, mut z: [C; 2]) -> [C; 2] {
    for _ in 0..30 {
        let Ok((fv, fg)) = f.eval_grad(&z) else { break };
        let Ok((gv, gg)) = g.eval_grad(&z) else { break };
        let j = Matrix2::new(fg[0], fg[1], gg[0], gg[1]);
        let Some(step) = j.lu().solve(&Vector2::new(fv, gv)) else { break };
        let next = [z[0] - step[0], z[1] - step[1]];
        if !(next[0].is_finite() && next[1].is_finite()) {
            break;
        }
        let before = rel_residual(f, &z).max(rel_residual(g, &z));
        let after = rel_residual(f, &next).max(rel_residual(g, &next));
        if after > before {
            break;
        }
        z = next;
        if after < 1e-15 || step.norm() < 1e-16 * (z[0].norm() + z[1].norm()) {
            break;
        }
    }
    z
}

/// Roots of `f` and `g` in `(C*)^2`, counted with multiplicity.
/// Errors when the resultant vanishes identically (positive-dimensional
/// common zero set or a shared factor).
pub fn solve_bivariate(f: &LaurentPoly, g: &LaurentPoly) -> Result<Vec<TorusRoot>> {
    if f.nvars() != 2 || g.nvars() != 2 {
        return invalid("bivariate solve needs two variables");
    }
    if f.is_zero() || g.is_zero() {
        return invalid("zero polynomial");
    }
    if f.is_monomial() || g.is_monomial() {
        return Ok(vec![]);
    }
    let (f, g) = (normalise(f), normalise(g));
    let (p, q) = (deg(&f, 1), deg(&g, 1));
    if p == 0 && q == 0 {
        // both depend on z1 only: any common root gives a whole circle of zeros
        let rf = roots(&coeffs_in_z1(&f))?;
        if rf.iter().any(|r| r.norm() > 0.0 && rel_residual(&g, &[*r, C::new(1.0, 0.0)]) < 1e-8) {
            return Err(FqError::Unsupported("common zero set is not isolated".into()));
        }
        return Ok(vec![]);
    }
    if p == 0 || q == 0 {
        let (uni, other) = if p == 0 { (&f, &g) } else { (&g, &f) };
        return triangular(uni, other);
    }
    if deg(&f, 0) + deg(&g, 0) == 0 {
        return solve_bivariate(&swap_vars(&f), &swap_vars(&g)).map(|v| {
            v.into_iter().map(|r| TorusRoot { z: [r.z[1], r.z[0]], multiplicity: r.multiplicity }).collect()
        });
    }
    general(&f, &g, p, q)
}

/// Coefficients in `z1` of a polynomial free of `z2`.
fn coeffs_in_z1(p: &LaurentPoly) -> Vec<C> {
    let d = deg(p, 0);
    let mut c = vec![C::new(0.0, 0.0); d + 1];
    for (e, v) in p.terms() {
        c[e[0] as usize] += v;
    }
    c
}

/// `uni` depends on `z1` alone.
fn triangular(uni: &LaurentPoly, other: &LaurentPoly) -> Result<Vec<TorusRoot>> {
    let r1 = roots(&coeffs_in_z1(uni))?;
    let r1: Vec<C> = r1.into_iter().filter(|r| r.norm() > 1e-12).collect();
    let mut out = Vec::new();
    for (z1, k1) in cluster(&r1, 1e-6) {
        let d = deg(other, 1);
        let c = coeffs_in_z2(other, z1, d);
        if c.iter().all(|v| v.norm() <= 1e-12 * other.abs_eval(&[z1, C::new(1.0, 0.0)])) {
            return Err(FqError::Unsupported("common zero set is not isolated".into()));
        }
        let r2 = roots(&c)?;
        for (z2, k2) in cluster(&r2.into_iter().filter(|r| r.norm() > 1e-12).collect::<Vec<_>>(), 1e-6) {
            out.push(TorusRoot { z: [z1, z2], multiplicity: k1 * k2 });
        }
    }
    Ok(out)
}

fn general(f: &LaurentPoly, g: &LaurentPoly, p: usize, q: usize) -> Result<Vec<TorusRoot>> {
    let d = p * deg(g, 0) + q * deg(f, 0);
    let nsamp = d + 1;
    let mut vals = Vec::with_capacity(nsamp);
    let mut hadamard: f64 = 0.0;
    for k in 0..nsamp {
        let z1 = C::new(0.0, TAU * k as f64 / nsamp as f64).exp();
        let s = sylvester(&coeffs_in_z2(f, z1, p), &coeffs_in_z2(g, z1, q));
        let h: f64 = s.row_iter().map(|r| r.norm()).product();
        hadamard = hadamard.max(h);
        vals.push(s.determinant());
    }
    let maxv = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if maxv <= 1e-11 * hadamard {
        return Err(FqError::Unsupported("resultant vanishes identically; zeros not isolated".into()));
    }
    let mut coef = vec![C::new(0.0, 0.0); nsamp];
    for (j, cj) in coef.iter_mut().enumerate() {
        let mut s = C::new(0.0, 0.0);
        for (k, v) in vals.iter().enumerate() {
            s += v * C::new(0.0, -TAU * (j * k) as f64 / nsamp as f64).exp();
        }
        *cj = s / nsamp as f64;
    }
    let cmax = coef.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for c in coef.iter_mut() {
        if c.norm() <= 1e-11 * cmax {
            *c = C::new(0.0, 0.0);
        }
    }
    let r1: Vec<C> = roots(&coef)?.into_iter().filter(|r| r.norm() > 0.0).collect();
    let mut out: Vec<TorusRoot> = Vec::new();
    for (z1, k) in cluster(&r1, 1e-6) {
        let cf = coeffs_in_z2(f, z1, p);
        let cands = roots(&cf).unwrap_or_default();
        let mut hits: Vec<[C; 2]> = Vec::new();
        for z2 in cands {
            if z2.norm() < 1e-12 || !z2.is_finite() {
                continue;
            }
            if rel_residual(g, &[z1, z2]) > 1e-5 {
                continue;
            }
            let z = newton2(f, g, [z1, z2]);
            if z[0].norm() < 1e-12 || z[1].norm() < 1e-12 {
                continue;
            }
            if rel_residual(f, &z).max(rel_residual(g, &z)) > 1e-9 {
                continue;
            }
            if !hits.iter().any(|h| (h[0] - z[0]).norm() + (h[1] - z[1]).norm() < 1e-7 * (1.0 + z[0].norm() + z[1].norm())) {
                hits.push(z);
            }
        }
        let share = if hits.is_empty() { 0 } else { (k / hits.len()).max(1) };
        for z in hits {
            out.push(TorusRoot { z, multiplicity: share });
        }
    }
    Ok(out)
}

pub fn total_multiplicity(r: &[TorusRoot]) -> usize {
    r.iter().map(|t| t.multiplicity).sum()
}
