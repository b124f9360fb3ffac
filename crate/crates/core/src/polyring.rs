//! Laurent polynomials, Laurent maps `Q`, and trigonometric maps
//! `P(z) = Q(exp(2 pi i M z))` stored as the pair `(Q, M)`.

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::error::{invalid, FqError, Result};
use crate::lattice::{smith_normal_form, IntMat};
use crate::numeric::CSum;
use crate::polytope::{Coord, LatticePolytope, Polytope, RealPolytope};
use crate::scalar::Scalar;

pub type C = Complex64;

/// Coefficients below this fraction of the largest are dropped.
pub const DROP_REL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly {
    m: usize,
    terms: BTreeMap<Vec<i64>, C>,
}

impl LaurentPoly {
    pub fn zero(m: usize) -> Self {
        LaurentPoly { m, terms: BTreeMap::new() }
    }

    pub fn constant(m: usize, c: C) -> Self {
        let mut p = LaurentPoly::zero(m);
        p.terms.insert(vec![0; m], c);
        p.clean();
        p
    }

    pub fn monomial(exp: Vec<i64>, c: C) -> Self {
        let mut p = LaurentPoly::zero(exp.len());
        p.terms.insert(exp, c);
        p.clean();
        p
    }

    pub fn from_terms(m: usize, terms: impl IntoIterator<Item = (Vec<i64>, C)>) -> Result<Self> {
        let mut p = LaurentPoly::zero(m);
        for (e, c) in terms {
            if e.len() != m {
                return invalid(format!("exponent {e:?} has length != {m}"));
            }
            if !c.is_finite() {
                return invalid("non-finite coefficient");
            }
            *p.terms.entry(e).or_insert(C::new(0.0, 0.0)) += c;
        }
        p.clean();
        Ok(p)
    }

    /// Real-coefficient shorthand used throughout the tests.
    pub fn real(m: usize, terms: &[(&[i64], f64)]) -> Result<Self> {
        LaurentPoly::from_terms(m, terms.iter().map(|(e, c)| (e.to_vec(), C::new(*c, 0.0))))
    }

    fn clean(&mut self) {
        let max = self.terms.values().map(|c| c.norm()).fold(0.0, f64::max);
        self.terms.retain(|_, c| c.norm() > DROP_REL * max && c.norm() > 0.0);
    }

    pub fn nvars(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn coeff(&self, exp: &[i64]) -> C {
        self.terms.get(exp).copied().unwrap_or(C::new(0.0, 0.0))
    }

    pub fn support(&self) -> Vec<Vec<i64>> {
        self.terms.keys().cloned().collect()
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn add(&self, o: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_vars(o)?;
        let mut p = self.clone();
        for (e, c) in &o.terms {
            *p.terms.entry(e.clone()).or_insert(C::new(0.0, 0.0)) += c;
        }
        p.clean();
        Ok(p)
    }

    pub fn sub(&self, o: &LaurentPoly) -> Result<LaurentPoly> {
        self.add(&o.scale(C::new(-1.0, 0.0)))
    }

    pub fn scale(&self, k: C) -> LaurentPoly {
        let mut p = LaurentPoly { m: self.m, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect() };
        p.clean();
        p
    }

    pub fn mul(&self, o: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_vars(o)?;
        let mut out: BTreeMap<Vec<i64>, C> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let e: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                *out.entry(e).or_insert(C::new(0.0, 0.0)) += ca * cb;
            }
        }
        let mut p = LaurentPoly { m: self.m, terms: out };
        p.clean();
        Ok(p)
    }

    pub fn pow(&self, k: u32) -> LaurentPoly {
        let mut acc = LaurentPoly::constant(self.m, C::new(1.0, 0.0));
        for _ in 0..k {
            acc = acc.mul(self).expect("same variables");
        }
        acc
    }

    /// `sum conj(c) z^{-l}`: the structured form of the complex conjugate on the torus.
    pub fn conj_reflect(&self) -> LaurentPoly {
        LaurentPoly {
            m: self.m,
            terms: self.terms.iter().map(|(e, c)| (e.iter().map(|v| -v).collect(), c.conj())).collect(),
        }
    }

    fn check_vars(&self, o: &LaurentPoly) -> Result<()> {
        if self.m != o.m {
            return invalid("polynomials in different numbers of variables");
        }
        Ok(())
    }

    pub fn eval(&self, z: &[C]) -> Result<C> {
        if z.len() != self.m {
            return invalid("point has wrong dimension");
        }
        let mut s = CSum::default();
        for (e, c) in &self.terms {
            let mut t = *c;
            for (zj, &ej) in z.iter().zip(e) {
                if ej == 0 {
                    continue;
                }
                if zj.norm() == 0.0 {
                    if ej < 0 {
                        return Err(FqError::Domain("zero coordinate with negative exponent".into()));
                    }
                    t = C::new(0.0, 0.0);
                    break;
                }
                t *= zj.powi(ej as i32);
            }
            s.add(t);
        }
        Ok(s.total())
    }

    /// Value and gradient; the point must lie in the torus.
    pub fn eval_grad(&self, z: &[C]) -> Result<(C, Vec<C>)> {
        if z.len() != self.m {
            return invalid("point has wrong dimension");
        }
        if z.iter().any(|v| v.norm() == 0.0) {
            return Err(FqError::Domain("gradient needs nonzero coordinates".into()));
        }
        let mut s = CSum::default();
        let mut g = vec![CSum::default(); self.m];
        for (e, c) in &self.terms {
            let mut t = *c;
            for (zj, &ej) in z.iter().zip(e) {
                if ej != 0 {
                    t *= zj.powi(ej as i32);
                }
            }
            s.add(t);
            for k in 0..self.m {
                if e[k] != 0 {
                    g[k].add(t * e[k] as f64 / z[k]);
                }
            }
        }
        Ok((s.total(), g.into_iter().map(|v| v.total()).collect()))
    }

    /// `sum |c| |z^l|`, the natural scale for residuals.
    pub fn abs_eval(&self, z: &[C]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.norm() * z.iter().zip(e).map(|(zj, &ej)| zj.norm().powi(ej as i32)).product::<f64>())
            .sum()
    }

    pub fn newton_polytope(&self) -> Result<LatticePolytope> {
        if self.is_zero() {
            return invalid("zero polynomial has no Newton polytope");
        }
        LatticePolytope::from_exponents(&self.support())
    }

    /// Terms whose exponents minimise `<u, l>`.
    pub fn facial_restriction<T: Coord>(&self, u: &[T]) -> Result<LaurentPoly> {
        if u.len() != self.m {
            return invalid("direction has wrong dimension");
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let val = |e: &[i64]| u.iter().zip(e).fold(T::zero(), |acc, (a, &b)| acc + a.clone() * T::from_i64(b));
        let vals: Vec<T> = self.terms.keys().map(|e| val(e)).collect();
        let mut min = vals[0].clone();
        for v in &vals {
            if (v.clone() - min.clone()).sign() < 0 {
                min = v.clone();
            }
        }
        let terms = self
            .terms
            .iter()
            .zip(&vals)
            .filter(|(_, v)| ((*v).clone() - min.clone()).sign() == 0)
            .map(|((e, c), _)| (e.clone(), *c))
            .collect();
        Ok(LaurentPoly { m: self.m, terms })
    }

    /// `Q(w^N)`: exponent `l` goes to `N^T l` for an `m x n` integer `N`.
    pub fn monomial_substitute(&self, n_mat: &[Vec<i64>]) -> Result<LaurentPoly> {
        if n_mat.len() != self.m {
            return invalid("substitution matrix must have m rows");
        }
        let n = n_mat.first().map_or(0, |r| r.len());
        if n == 0 || n_mat.iter().any(|r| r.len() != n) {
            return invalid("substitution matrix must be m x n with n >= 1");
        }
        let terms = self.terms.iter().map(|(e, c)| {
            let img: Vec<i64> = (0..n).map(|k| (0..self.m).map(|j| n_mat[j][k] * e[j]).sum()).collect();
            (img, *c)
        });
        LaurentPoly::from_terms(n, terms)
    }

    /// Exponent `l` goes to `A l` for unimodular `A`.
    pub fn gl_transform(&self, a: &IntMat) -> Result<LaurentPoly> {
        if a.rows() != self.m || a.cols() != self.m || !a.is_unimodular() {
            return invalid("transform must be a unimodular m x m integer matrix");
        }
        let rows = a.to_i64_rows()?;
        let terms = self.terms.iter().map(|(e, c)| {
            let img: Vec<i64> = rows.iter().map(|r| r.iter().zip(e).map(|(x, y)| x * y).sum()).collect();
            (img, *c)
        });
        LaurentPoly::from_terms(self.m, terms)
    }

    pub fn shift(&self, by: &[i64]) -> LaurentPoly {
        LaurentPoly {
            m: self.m,
            terms: self.terms.iter().map(|(e, c)| (e.iter().zip(by).map(|(a, b)| a + b).collect(), *c)).collect(),
        }
    }

    /// Coefficients of `q` as a polynomial in variable `var` after fixing the
    /// others; returns the lowest exponent and the dense coefficient list.
    pub fn univariate_at(&self, var: usize, others: &[C]) -> Result<(i64, Vec<C>)> {
        if self.is_zero() {
            return invalid("zero polynomial");
        }
        let lo = self.terms.keys().map(|e| e[var]).min().unwrap();
        let hi = self.terms.keys().map(|e| e[var]).max().unwrap();
        let mut acc: Vec<CSum> = vec![CSum::default(); (hi - lo + 1) as usize];
        for (e, c) in &self.terms {
            let mut t = *c;
            let mut k = 0;
            for j in 0..self.m {
                if j == var {
                    continue;
                }
                if e[j] != 0 {
                    t *= others[k].powi(e[j] as i32);
                }
                k += 1;
            }
            acc[(e[var] - lo) as usize].add(t);
        }
        Ok((lo, acc.into_iter().map(|s| s.total()).collect()))
    }

    pub fn exponent_span(&self, var: usize) -> i64 {
        let lo = self.terms.keys().map(|e| e[var]).min().unwrap_or(0);
        let hi = self.terms.keys().map(|e| e[var]).max().unwrap_or(0);
        hi - lo
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaurentMap {
    m: usize,
    comps: Vec<LaurentPoly>,
}

impl LaurentMap {
    pub fn new(comps: Vec<LaurentPoly>) -> Result<Self> {
        let Some(first) = comps.first() else { return invalid("Laurent map needs a component") };
        let m = first.nvars();
        if comps.iter().any(|c| c.nvars() != m) {
            return invalid("components in different numbers of variables");
        }
        if comps.iter().any(|c| c.is_zero()) {
            return invalid("zero component");
        }
        Ok(LaurentMap { m, comps })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.comps.len()
    }

    pub fn components(&self) -> &[LaurentPoly] {
        &self.comps
    }

    pub fn eval(&self, z: &[C]) -> Result<Vec<C>> {
        self.comps.iter().map(|c| c.eval(z)).collect()
    }

    pub fn newton_polytopes(&self) -> Result<Vec<LatticePolytope>> {
        self.comps.iter().map(|c| c.newton_polytope()).collect()
    }

    pub fn facial_restriction<T: Coord>(&self, u: &[T]) -> Result<LaurentMap> {
        Ok(LaurentMap { m: self.m, comps: self.comps.iter().map(|c| c.facial_restriction(u)).collect::<Result<_>>()? })
    }

    pub fn monomial_substitute(&self, n_mat: &[Vec<i64>]) -> Result<LaurentMap> {
        LaurentMap::new(self.comps.iter().map(|c| c.monomial_substitute(n_mat)).collect::<Result<_>>()?)
    }

    pub fn gl_transform(&self, a: &IntMat) -> Result<LaurentMap> {
        LaurentMap::new(self.comps.iter().map(|c| c.gl_transform(a)).collect::<Result<_>>()?)
    }

    /// True when the exponents generate all of `Z^m`.
    pub fn is_minimal(&self) -> bool {
        let exps: Vec<Vec<i64>> = self.comps.iter().flat_map(|c| c.support()).collect();
        let cols: Vec<Vec<i64>> = (0..self.m).map(|i| exps.iter().map(|e| e[i]).collect()).collect();
        let Ok(mat) = IntMat::from_rows(&cols) else { return false };
        let snf = smith_normal_form(&mat);
        let d = snf.diagonal();
        d.len() == self.m && d.iter().all(|v| *v == 1.into())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrigTerm {
    pub frequency: Vec<f64>,
    pub coefficient: C,
    /// exponents of `Q` mapping onto this frequency
    pub labels: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrigMapRep {
    q: LaurentMap,
    m_mat: Vec<Vec<Scalar>>,
    mf: Vec<Vec<f64>>,
}

impl TrigMapRep {
    pub fn new(q: LaurentMap, m_mat: Vec<Vec<Scalar>>) -> Result<Self> {
        let (m, n) = (q.m(), q.n());
        if m_mat.len() != m || m_mat.iter().any(|r| r.len() != n) {
            return invalid(format!("M must be {m} x {n}"));
        }
        let mf: Vec<Vec<f64>> = m_mat.iter().map(|r| r.iter().map(|s| s.value).collect()).collect();
        if m < n {
            return invalid("need m >= n");
        }
        let mat = nalgebra::DMatrix::from_fn(m, n, |i, j| mf[i][j]);
        let sv = mat.singular_values();
        let smax = sv.max();
        if !(sv.min() > 1e-9 * smax.max(1e-300)) {
            return invalid("M must have rank n");
        }
        Ok(TrigMapRep { q, m_mat, mf })
    }

    pub fn from_f64(q: LaurentMap, m_mat: &[Vec<f64>]) -> Result<Self> {
        TrigMapRep::new(q, m_mat.iter().map(|r| r.iter().map(|&v| Scalar::float(v)).collect()).collect())
    }

    pub fn q(&self) -> &LaurentMap {
        &self.q
    }

    pub fn m_scalars(&self) -> &[Vec<Scalar>] {
        &self.m_mat
    }

    pub fn m_f64(&self) -> &[Vec<f64>] {
        &self.mf
    }

    pub fn m_exact(&self) -> Option<Vec<Vec<BigRational>>> {
        self.m_mat.iter().map(|r| r.iter().map(|s| s.exact.clone()).collect()).collect()
    }

    pub fn n(&self) -> usize {
        self.q.n()
    }

    pub fn m(&self) -> usize {
        self.q.m()
    }

    pub fn frequency(&self, l: &[i64]) -> Vec<f64> {
        (0..self.n()).map(|k| (0..self.m()).map(|j| self.mf[j][k] * l[j] as f64).sum()).collect()
    }

    fn phase_factor(&self, freq: &[f64], z: &[C]) -> Result<C> {
        let mut arg = C::new(0.0, 0.0);
        for (w, zk) in freq.iter().zip(z) {
            arg += zk * *w;
        }
        let growth = -TAU * arg.im;
        if growth > 700.0 {
            return Err(FqError::Overflow("exp(2 pi i M z) overflows; |Im z| too large".into()));
        }
        Ok(C::new(0.0, TAU * arg.re).exp() * growth.exp())
    }

    pub fn eval(&self, z: &[C]) -> Result<Vec<C>> {
        Ok(self.eval_with_jacobian(z)?.0)
    }

    /// Values and `d p_j / d z_k`.
    pub fn eval_with_jacobian(&self, z: &[C]) -> Result<(Vec<C>, Vec<Vec<C>>)> {
        if z.len() != self.n() {
            return invalid("point has wrong dimension");
        }
        let n = self.n();
        let mut vals = Vec::with_capacity(n);
        let mut jac = Vec::with_capacity(n);
        for comp in self.q.components() {
            let mut s = CSum::default();
            let mut ds = vec![CSum::default(); n];
            for (l, c) in comp.terms() {
                let f = self.frequency(l);
                let t = c * self.phase_factor(&f, z)?;
                s.add(t);
                for k in 0..n {
                    ds[k].add(t * C::new(0.0, TAU * f[k]));
                }
            }
            vals.push(s.total());
            jac.push(ds.into_iter().map(|d| d.total()).collect());
        }
        Ok((vals, jac))
    }

    /// Frequencies `M^T l` per component, with colliding labels merged.
    pub fn spectrum(&self) -> Vec<Vec<TrigTerm>> {
        let exact = self.m_exact();
        self.q
            .components()
            .iter()
            .map(|comp| {
                let mut out: Vec<TrigTerm> = Vec::new();
                let mut keys: Vec<Option<Vec<BigRational>>> = Vec::new();
                for (l, c) in comp.terms() {
                    let f = self.frequency(l);
                    let key = exact.as_ref().map(|ex| {
                        (0..self.n())
                            .map(|k| {
                                (0..self.m()).fold(BigRational::from_i64(0), |acc, j| {
                                    acc + ex[j][k].clone() * BigRational::from_i64(l[j])
                                })
                            })
                            .collect::<Vec<_>>()
                    });
                    let hit = out.iter().zip(&keys).position(|(t, kk)| match (&key, kk) {
                        (Some(a), Some(b)) => a == b,
                        _ => t.frequency.iter().zip(&f).all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + a.abs())),
                    });
                    match hit {
                        Some(i) => {
                            out[i].coefficient += c;
                            out[i].labels.push(l.clone());
                        }
                        None => {
                            out.push(TrigTerm { frequency: f, coefficient: *c, labels: vec![l.clone()] });
                            keys.push(key);
                        }
                    }
                }
                out
            })
            .collect()
    }

    /// `M^T N(q_j)` for each component.
    pub fn newton_polytopes_real(&self) -> Result<Vec<RealPolytope>> {
        self.q
            .components()
            .iter()
            .map(|comp| {
                let pts: Vec<Vec<f64>> = comp.support().iter().map(|l| self.frequency(l)).collect();
                Polytope::new(&pts)
            })
            .collect()
    }

    pub fn from_model_json(s: &str) -> Result<Self> {
        let f: ModelFile = serde_json::from_str(s).map_err(|e| FqError::Parse(e.to_string()))?;
        f.into_trig_map()
    }

    pub fn to_model(&self) -> ModelFile {
        ModelFile::from_map(&self.q, Some(self.m_mat.clone()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermFile {
    pub exp: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentFile {
    pub terms: Vec<TermFile>,
}

/// On-disk model: `{m, n, components[].terms[] = {exp, re, im}, M}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub m: usize,
    pub n: usize,
    pub components: Vec<ComponentFile>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m_mat: Option<Vec<Vec<Scalar>>>,
}

impl ModelFile {
    pub fn from_map(q: &LaurentMap, m_mat: Option<Vec<Vec<Scalar>>>) -> Self {
        ModelFile {
            m: q.m(),
            n: q.n(),
            components: q
                .components()
                .iter()
                .map(|c| ComponentFile {
                    terms: c.terms().map(|(e, v)| TermFile { exp: e.clone(), re: v.re, im: v.im }).collect(),
                })
                .collect(),
            m_mat,
        }
    }

    pub fn laurent_map(&self) -> Result<LaurentMap> {
        if self.components.len() != self.n {
            return invalid("component count differs from n");
        }
        let comps = self
            .components
            .iter()
            .map(|c| LaurentPoly::from_terms(self.m, c.terms.iter().map(|t| (t.exp.clone(), C::new(t.re, t.im)))))
            .collect::<Result<Vec<_>>>()?;
        LaurentMap::new(comps)
    }

    pub fn into_trig_map(self) -> Result<TrigMapRep> {
        let q = self.laurent_map()?;
        let m_mat = self.m_mat.ok_or_else(|| FqError::InvalidInput("model has no M".into()))?;
        TrigMapRep::new(q, m_mat)
    }
}

pub fn eval_laurent(q: &LaurentMap, z: &[C]) -> Result<Vec<C>> {
    q.eval(z)
}

pub fn eval_trig(p: &TrigMapRep, z: &[C]) -> Result<Vec<C>> {
    p.eval(z)
}

pub fn spectrum_trig(p: &TrigMapRep) -> Vec<Vec<TrigTerm>> {
    p.spectrum()
}

pub fn facial_restriction<T: Coord>(q: &LaurentPoly, u: &[T]) -> Result<LaurentPoly> {
    q.facial_restriction(u)
}

pub fn monomial_substitute(q: &LaurentMap, n_mat: &[Vec<i64>]) -> Result<LaurentMap> {
    q.monomial_substitute(n_mat)
}

pub fn gl_transform(q: &LaurentMap, a: &IntMat) -> Result<LaurentMap> {
    q.gl_transform(a)
}

pub fn is_minimal(q: &LaurentMap) -> bool {
    q.is_minimal()
}
