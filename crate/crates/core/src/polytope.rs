//! Convex polytopes in dimension <= 3 over exact rationals or f64.
//!
//! Faces are taken with the argmin convention: the face of `P` in direction
//! `u` is the set of points minimising `<u, x>`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{invalid, FqError, Result};
use crate::scalar::rat_to_f64;

pub const FLOAT_TOL: f64 = 1e-9;

pub trait Coord:
    Clone
    + Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// -1, 0 or 1; floats use an absolute tolerance.
    fn sign(&self) -> i32;
    fn to_f64(&self) -> f64;
    fn abs_val(&self) -> Self {
        if self.sign() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Coord for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn sign(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.is_positive() {
            1
        } else {
            -1
        }
    }
    fn to_f64(&self) -> f64 {
        rat_to_f64(self)
    }
}

impl Coord for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn sign(&self) -> i32 {
        if self.abs() <= FLOAT_TOL {
            0
        } else if *self > 0.0 {
            1
        } else {
            -1
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

fn dot<T: Coord>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

fn sub<T: Coord>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

fn add<T: Coord>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

fn same_point<T: Coord>(a: &[T], b: &[T]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x.clone() - y.clone()).sign() == 0)
}

fn lex_cmp<T: Coord>(a: &[T], b: &[T]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match (x.clone() - y.clone()).sign() {
            0 => continue,
            s if s < 0 => return Ordering::Less,
            _ => return Ordering::Greater,
        }
    }
    Ordering::Equal
}

fn dedup_points<T: Coord>(pts: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut v = pts.to_vec();
    v.sort_by(|a, b| lex_cmp(a, b));
    v.dedup_by(|a, b| same_point(a, b));
    v
}

/// Row echelon form with pivot columns; rows below the rank are dropped.
fn echelon<T: Coord>(rows: &[Vec<T>], ncols: usize) -> (Vec<Vec<T>>, Vec<usize>) {
    let mut a: Vec<Vec<T>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        // largest magnitude keeps the float path stable
        let mut best: Option<usize> = None;
        for i in r..a.len() {
            if a[i][c].sign() != 0 {
                match best {
                    Some(b) if a[b][c].abs_val() >= a[i][c].abs_val() => {}
                    _ => best = Some(i),
                }
            }
        }
        let Some(p) = best else { continue };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if a[i][c].sign() == 0 {
                continue;
            }
            let f = a[i][c].clone() / a[r][c].clone();
            for j in c..ncols {
                let v = a[i][j].clone() - f.clone() * a[r][j].clone();
                a[i][j] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank<T: Coord>(vectors: &[Vec<T>]) -> usize {
    match vectors.first() {
        None => 0,
        Some(v) => echelon(vectors, v.len()).1.len(),
    }
}

pub fn affine_dim<T: Coord>(pts: &[Vec<T>]) -> usize {
    if pts.len() < 2 {
        return 0;
    }
    let diffs: Vec<Vec<T>> = pts[1..].iter().map(|p| sub(p, &pts[0])).collect();
    rank(&diffs)
}

/// A nonzero vector orthogonal to every row of an echelon matrix.
fn null_vector<T: Coord>(ech: &[Vec<T>], pivots: &[usize], ncols: usize) -> Option<Vec<T>> {
    let free = (0..ncols).find(|c| !pivots.contains(c))?;
    let mut x = vec![T::zero(); ncols];
    x[free] = T::one();
    for (r, &pc) in pivots.iter().enumerate().rev() {
        let mut s = T::zero();
        for j in pc + 1..ncols {
            s = s + ech[r][j].clone() * x[j].clone();
        }
        x[pc] = -s / ech[r][pc].clone();
    }
    Some(x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polytope<T: Coord> {
    ambient: usize,
    vertices: Vec<Vec<T>>,
}

pub type LatticePolytope = Polytope<BigRational>;
pub type RealPolytope = Polytope<f64>;

#[derive(Clone, Debug, PartialEq)]
pub struct Face<T: Coord> {
    pub direction: Vec<T>,
    /// indices into the parent's vertex list
    pub indices: Vec<usize>,
    pub vertices: Vec<Vec<T>>,
}

impl<T: Coord> Face<T> {
    pub fn dim(&self) -> usize {
        affine_dim(&self.vertices)
    }
}

#[derive(Clone, Debug)]
pub struct FanCell<T: Coord> {
    pub u: Vec<T>,
    pub faces: Vec<Face<T>>,
}

struct HullData<T: Coord> {
    vertices: Vec<Vec<T>>,
    /// proper faces: (interior normal-cone direction, vertex indices)
    faces: Vec<(Vec<T>, Vec<usize>)>,
    /// direction orthogonal to the affine hull when it is lower dimensional
    complement: Option<Vec<T>>,
    aff_dim: usize,
    volume: T,
}

impl<T: Coord> Polytope<T> {
    pub fn new(points: &[Vec<T>]) -> Result<Self> {
        let h = hull(points)?;
        let n = points[0].len();
        let mut vertices = h.vertices;
        vertices.sort_by(|a, b| lex_cmp(a, b));
        Ok(Polytope { ambient: n, vertices })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn vertices(&self) -> &[Vec<T>] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        affine_dim(&self.vertices)
    }

    pub fn map<S: Coord>(&self, f: impl Fn(&T) -> S) -> Result<Polytope<S>> {
        let pts: Vec<Vec<S>> = self.vertices.iter().map(|v| v.iter().map(&f).collect()).collect();
        Polytope::new(&pts)
    }
}

impl LatticePolytope {
    pub fn from_exponents(exps: &[Vec<i64>]) -> Result<Self> {
        let pts: Vec<Vec<BigRational>> =
            exps.iter().map(|e| e.iter().map(|&x| BigRational::from_i64(x)).collect()).collect();
        Polytope::new(&pts)
    }

    pub fn to_f64(&self) -> RealPolytope {
        Polytope {
            ambient: self.ambient,
            vertices: self.vertices.iter().map(|v| v.iter().map(rat_to_f64).collect()).collect(),
        }
    }
}

fn hull<T: Coord>(points: &[Vec<T>]) -> Result<HullData<T>> {
    if points.is_empty() {
        return invalid("empty point set");
    }
    let n = points[0].len();
    if n == 0 || points.iter().any(|p| p.len() != n) {
        return invalid("points must share a positive dimension");
    }
    let pts = dedup_points(points);
    let diffs: Vec<Vec<T>> = pts[1..].iter().map(|p| sub(p, &pts[0])).collect();
    let (ech, pivots) = if diffs.is_empty() { (vec![], vec![]) } else { echelon(&diffs, n) };
    let k = pivots.len();
    if k > 3 {
        return Err(FqError::Unsupported("hulls above dimension 3".into()));
    }
    let complement = if k < n { null_vector(&ech, &pivots, n) } else { None };
    let proj: Vec<Vec<T>> = pts.iter().map(|p| pivots.iter().map(|&c| p[c].clone()).collect()).collect();
    let lift = |w: &[T]| -> Vec<T> {
        let mut u = vec![T::zero(); n];
        for (i, &c) in pivots.iter().enumerate() {
            u[c] = w[i].clone();
        }
        u
    };

    let (vidx, faces, volume): (Vec<usize>, Vec<(Vec<T>, Vec<usize>)>, T) = match k {
        0 => (vec![0], vec![], T::zero()),
        1 => {
            let mut lo = 0;
            let mut hi = 0;
            for i in 0..proj.len() {
                if proj[i][0] < proj[lo][0] {
                    lo = i;
                }
                if proj[i][0] > proj[hi][0] {
                    hi = i;
                }
            }
            let len = proj[hi][0].clone() - proj[lo][0].clone();
            (vec![lo, hi], vec![(vec![T::one()], vec![0]), (vec![-T::one()], vec![1])], len)
        }
        2 => hull2(&proj),
        _ => hull3(&proj),
    };
    let vertices: Vec<Vec<T>> = vidx.iter().map(|&i| pts[i].clone()).collect();
    let faces = faces.into_iter().map(|(w, ix)| (lift(&w), ix)).collect();
    Ok(HullData { vertices, faces, complement, aff_dim: k, volume })
}

fn cross2<T: Coord>(o: &[T], a: &[T], b: &[T]) -> T {
    (a[0].clone() - o[0].clone()) * (b[1].clone() - o[1].clone())
        - (a[1].clone() - o[1].clone()) * (b[0].clone() - o[0].clone())
}

/// Monotone chain; returns ccw vertex indices, faces with inner normals, area.
fn hull2<T: Coord>(p: &[Vec<T>]) -> (Vec<usize>, Vec<(Vec<T>, Vec<usize>)>, T) {
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(&p[a], &p[b]));
    let mut lower: Vec<usize> = Vec::new();
    for &i in &order {
        while lower.len() >= 2 && cross2(&p[lower[lower.len() - 2]], &p[lower[lower.len() - 1]], &p[i]).sign() <= 0 {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in order.iter().rev() {
        while upper.len() >= 2 && cross2(&p[upper[upper.len() - 2]], &p[upper[upper.len() - 1]], &p[i]).sign() <= 0 {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    let ring = lower;
    let h = ring.len();
    let mut area2 = T::zero();
    let mut normals = Vec::with_capacity(h);
    for i in 0..h {
        let a = &p[ring[i]];
        let b = &p[ring[(i + 1) % h]];
        area2 = area2 + a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone();
        normals.push(vec![-(b[1].clone() - a[1].clone()), b[0].clone() - a[0].clone()]);
    }
    let mut faces = Vec::new();
    for i in 0..h {
        faces.push((normals[i].clone(), vec![i, (i + 1) % h]));
    }
    for i in 0..h {
        let prev = &normals[(i + h - 1) % h];
        faces.push((add(prev, &normals[i]), vec![i]));
    }
    (ring, faces, area2 / T::from_i64(2))
}

fn cross3<T: Coord>(a: &[T], b: &[T]) -> Vec<T> {
    vec![
        a[1].clone() * b[2].clone() - a[2].clone() * b[1].clone(),
        a[2].clone() * b[0].clone() - a[0].clone() * b[2].clone(),
        a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone(),
    ]
}

fn orient3<T: Coord>(a: &[T], b: &[T], c: &[T], d: &[T]) -> T {
    dot(&cross3(&sub(b, a), &sub(c, a)), &sub(d, a))
}

/// Incremental hull with strict visibility. Triangles are oriented with
/// outward normals; the caller guarantees full dimension.
fn hull3<T: Coord>(p: &[Vec<T>]) -> (Vec<usize>, Vec<(Vec<T>, Vec<usize>)>, T) {
    let np = p.len();
    let i0 = 0;
    let i1 = (1..np).find(|&i| !same_point(&p[i], &p[i0])).expect("3d hull");
    let i2 = (0..np)
        .find(|&i| cross3(&sub(&p[i1], &p[i0]), &sub(&p[i], &p[i0])).iter().any(|v| v.sign() != 0))
        .expect("3d hull");
    let i3 = (0..np).find(|&i| orient3(&p[i0], &p[i1], &p[i2], &p[i]).sign() != 0).expect("3d hull");

    let mut tris: Vec<Option<[usize; 3]>> = Vec::new();
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    let push = |tris: &mut Vec<Option<[usize; 3]>>, edges: &mut HashMap<(usize, usize), usize>, t: [usize; 3]| {
        let id = tris.len();
        tris.push(Some(t));
        for e in 0..3 {
            edges.insert((t[e], t[(e + 1) % 3]), id);
        }
    };
    let base = [i0, i1, i2, i3];
    for skip in 0..4 {
        let f: Vec<usize> = (0..4).filter(|&j| j != skip).map(|j| base[j]).collect();
        let mut t = [f[0], f[1], f[2]];
        if orient3(&p[t[0]], &p[t[1]], &p[t[2]], &p[base[skip]]).sign() > 0 {
            t.swap(1, 2);
        }
        push(&mut tris, &mut edges, t);
    }

    for q in 0..np {
        if base.contains(&q) {
            continue;
        }
        let visible: Vec<usize> = (0..tris.len())
            .filter(|&i| {
                tris[i].is_some_and(|t| orient3(&p[t[0]], &p[t[1]], &p[t[2]], &p[q]).sign() > 0)
            })
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut horizon = Vec::new();
        for &f in &visible {
            let t = tris[f].unwrap();
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                let twin = edges[&(b, a)];
                if !visible.contains(&twin) {
                    horizon.push((a, b));
                }
            }
        }
        for &f in &visible {
            let t = tris[f].take().unwrap();
            for e in 0..3 {
                edges.remove(&(t[e], t[(e + 1) % 3]));
            }
        }
        for (a, b) in horizon {
            push(&mut tris, &mut edges, [a, b, q]);
        }
    }

    let tris: Vec<[usize; 3]> = tris.into_iter().flatten().collect();
    let anchor = &p[tris[0][0]];
    let mut vol6 = T::zero();
    for t in &tris {
        vol6 = vol6 + orient3(anchor, &p[t[0]], &p[t[1]], &p[t[2]]);
    }
    let volume = vol6.abs_val() / T::from_i64(6);

    // group coplanar triangles into facets
    let outward: Vec<Vec<T>> = tris.iter().map(|t| cross3(&sub(&p[t[1]], &p[t[0]]), &sub(&p[t[2]], &p[t[0]]))).collect();
    let mut facet_of = vec![usize::MAX; tris.len()];
    let mut facets: Vec<(Vec<T>, Vec<usize>)> = Vec::new();
    for i in 0..tris.len() {
        if facet_of[i] != usize::MAX {
            continue;
        }
        let id = facets.len();
        let mut pts: Vec<usize> = Vec::new();
        for j in i..tris.len() {
            if facet_of[j] == usize::MAX
                && cross3(&outward[i], &outward[j]).iter().all(|v| v.sign() == 0)
                && dot(&outward[i], &outward[j]).sign() > 0
            {
                facet_of[j] = id;
                pts.extend_from_slice(&tris[j]);
            }
        }
        pts.sort_unstable();
        pts.dedup();
        let inner: Vec<T> = outward[i].iter().map(|v| -v.clone()).collect();
        facets.push((inner, pts));
    }

    let mut cand: Vec<usize> = facets.iter().flat_map(|f| f.1.iter().copied()).collect();
    cand.sort_unstable();
    cand.dedup();
    let mut vidx = Vec::new();
    let mut vnormal = Vec::new();
    for &c in &cand {
        let ns: Vec<Vec<T>> = facets.iter().filter(|f| f.1.contains(&c)).map(|f| f.0.clone()).collect();
        if rank(&ns) == 3 {
            let s = ns.iter().skip(1).fold(ns[0].clone(), |acc, v| add(&acc, v));
            vidx.push(c);
            vnormal.push(s);
        }
    }
    let local = |g: usize| vidx.iter().position(|&v| v == g);

    let mut faces = Vec::new();
    let facet_ext: Vec<Vec<usize>> = facets.iter().map(|f| f.1.iter().filter_map(|&g| local(g)).collect()).collect();
    for (f, ext) in facets.iter().zip(&facet_ext) {
        faces.push((f.0.clone(), ext.clone()));
    }
    for a in 0..facets.len() {
        for b in a + 1..facets.len() {
            let common: Vec<usize> = facet_ext[a].iter().copied().filter(|v| facet_ext[b].contains(v)).collect();
            if common.len() >= 2 {
                faces.push((add(&facets[a].0, &facets[b].0), common));
            }
        }
    }
    for (i, nrm) in vnormal.into_iter().enumerate() {
        faces.push((nrm, vec![i]));
    }
    (vidx, faces, volume)
}

pub fn convex_hull<T: Coord>(points: &[Vec<T>]) -> Result<Polytope<T>> {
    Polytope::new(points)
}

pub fn minkowski_sum<T: Coord>(a: &Polytope<T>, b: &Polytope<T>) -> Result<Polytope<T>> {
    if a.ambient != b.ambient {
        return invalid("Minkowski sum of polytopes in different dimensions");
    }
    let mut pts = Vec::with_capacity(a.vertices.len() * b.vertices.len());
    for x in &a.vertices {
        for y in &b.vertices {
            pts.push(add(x, y));
        }
    }
    Polytope::new(&pts)
}

pub fn minkowski_sum_all<T: Coord>(ps: &[Polytope<T>]) -> Result<Polytope<T>> {
    let Some(first) = ps.first() else { return invalid("empty polytope tuple") };
    ps[1..].iter().try_fold(first.clone(), |acc, p| minkowski_sum(&acc, p))
}

/// Euclidean volume in the ambient dimension; zero when degenerate.
pub fn volume<T: Coord>(p: &Polytope<T>) -> Result<T> {
    let h = hull(&p.vertices)?;
    if h.aff_dim < p.ambient {
        return Ok(T::zero());
    }
    Ok(h.volume)
}

pub fn mixed_volume<T: Coord>(ps: &[Polytope<T>]) -> Result<T> {
    let n = ps.len();
    if n == 0 || ps.iter().any(|p| p.ambient != n) {
        return invalid("mixed volume needs n polytopes in R^n");
    }
    if n > 3 {
        return Err(FqError::Unsupported("mixed volume above dimension 3".into()));
    }
    let mut total = T::zero();
    for mask in 1u32..(1 << n) {
        let members: Vec<Polytope<T>> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ps[i].clone()).collect();
        let v = volume(&minkowski_sum_all(&members)?)?;
        if (n - members.len()).is_multiple_of(2) {
            total = total + v;
        } else {
            total = total - v;
        }
    }
    Ok(total)
}

pub fn face_in_direction<T: Coord>(p: &Polytope<T>, u: &[T]) -> Result<Face<T>> {
    if u.len() != p.ambient {
        return invalid("direction has wrong dimension");
    }
    if u.iter().all(|x| x.sign() == 0) {
        return invalid("direction u must be nonzero");
    }
    let vals: Vec<T> = p.vertices.iter().map(|v| dot(u, v)).collect();
    let mut min = vals[0].clone();
    for v in &vals[1..] {
        if (v.clone() - min.clone()).sign() < 0 {
            min = v.clone();
        }
    }
    let indices: Vec<usize> = (0..vals.len()).filter(|&i| (vals[i].clone() - min.clone()).sign() == 0).collect();
    let vertices = indices.iter().map(|&i| p.vertices[i].clone()).collect();
    Ok(Face { direction: u.to_vec(), indices, vertices })
}

/// One direction per face of the Minkowski sum, each giving a distinct
/// tuple of faces.
pub fn normal_fan_representatives<T: Coord>(ps: &[Polytope<T>]) -> Result<Vec<FanCell<T>>> {
    let k = minkowski_sum_all(ps)?;
    let h = hull(&k.vertices)?;
    let mut dirs: Vec<Vec<T>> = h.faces.into_iter().map(|f| f.0).collect();
    if let Some(c) = h.complement {
        dirs.push(c);
    }
    let mut seen: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut out = Vec::new();
    for u in dirs {
        let faces: Vec<Face<T>> = ps.iter().map(|p| face_in_direction(p, &u)).collect::<Result<_>>()?;
        let key: Vec<Vec<usize>> = faces.iter().map(|f| f.indices.clone()).collect();
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        out.push(FanCell { u, faces });
    }
    Ok(out)
}

/// Returns `(true, None)` when unfolded, otherwise a witness direction.
pub fn is_unfolded<T: Coord>(ps: &[Polytope<T>]) -> Result<(bool, Option<Vec<T>>)> {
    for cell in normal_fan_representatives(ps)? {
        let dims: usize = cell.faces.iter().map(|f| f.dim()).sum();
        let diffs: Vec<Vec<T>> = cell
            .faces
            .iter()
            .flat_map(|f| f.vertices[1..].iter().map(|v| sub(v, &f.vertices[0])).collect::<Vec<_>>())
            .collect();
        if dims > rank(&diffs) {
            return Ok((false, Some(cell.u)));
        }
    }
    Ok((true, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};
    use proptest::prelude::*;

    fn lp(pts: &[[i64; 2]]) -> LatticePolytope {
        LatticePolytope::from_exponents(&pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn square() -> LatticePolytope {
        lp(&[[0, 0], [1, 0], [0, 1], [1, 1]])
    }

    fn triangle() -> LatticePolytope {
        lp(&[[0, 0], [1, 0], [0, 1]])
    }

    fn r(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn hull_drops_interior_and_collinear() {
        let p = lp(&[[0, 0], [2, 0], [1, 0], [1, 1], [0, 2], [2, 2], [1, 2]]);
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(volume(&p).unwrap(), rat_int(4));
        let seg = lp(&[[0, 0], [1, 1], [3, 3]]);
        assert_eq!(seg.vertices().len(), 2);
        assert_eq!(volume(&seg).unwrap(), rat_int(0));
    }

    #[test]
    fn cube_volume_and_faces() {
        let mut pts = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    pts.push(r(&[x, y, z]));
                }
            }
        }
        let c = Polytope::new(&pts).unwrap();
        assert_eq!(c.vertices().len(), 8);
        assert_eq!(volume(&c).unwrap(), rat_int(8));
        let h = hull(c.vertices()).unwrap();
        // 6 facets, 12 edges, 8 vertices
        assert_eq!(h.faces.len(), 26);
        let simplex = Polytope::new(&[r(&[0, 0, 0]), r(&[1, 0, 0]), r(&[0, 1, 0]), r(&[0, 0, 1])]).unwrap();
        assert_eq!(volume(&simplex).unwrap(), rat(1, 6));
    }

    #[test]
    fn mixed_volume_examples() {
        assert_eq!(mixed_volume(&[square(), square()]).unwrap(), rat_int(2));
        let e1 = lp(&[[0, 0], [1, 0]]);
        let e2 = lp(&[[0, 0], [0, 1]]);
        assert_eq!(mixed_volume(&[e1, e2]).unwrap(), rat_int(1));
        assert_eq!(mixed_volume(&[triangle(), triangle()]).unwrap(), rat_int(1));
        let cube = Polytope::new(&[
            r(&[0, 0, 0]), r(&[1, 0, 0]), r(&[0, 1, 0]), r(&[0, 0, 1]),
            r(&[1, 1, 0]), r(&[1, 0, 1]), r(&[0, 1, 1]), r(&[1, 1, 1]),
        ])
        .unwrap();
        // MV(K,K,K) = 3! vol(K)
        assert_eq!(mixed_volume(&[cube.clone(), cube.clone(), cube]).unwrap(), rat_int(6));
    }

    #[test]
    fn face_examples() {
        let f = face_in_direction(&square(), &r(&[0, -1])).unwrap();
        assert_eq!(f.vertices, vec![r(&[0, 1]), r(&[1, 1])]);
        let f = face_in_direction(&square(), &r(&[-1, -1])).unwrap();
        assert_eq!(f.vertices, vec![r(&[1, 1])]);
        assert!(face_in_direction(&square(), &r(&[0, 0])).is_err());
    }

    #[test]
    fn fan_examples() {
        assert_eq!(normal_fan_representatives(&[square(), square()]).unwrap().len(), 8);
        let seg = LatticePolytope::from_exponents(&[vec![0], vec![2]]).unwrap();
        assert_eq!(normal_fan_representatives(&[seg]).unwrap().len(), 2);
        // a segment in the plane: two endpoints plus the segment itself
        let s2 = lp(&[[0, 0], [2, 1]]);
        assert_eq!(normal_fan_representatives(&[s2]).unwrap().len(), 3);
    }

    #[test]
    fn fan_matches_angular_sweep() {
        let tuple = [square(), triangle()];
        let cells = normal_fan_representatives(&tuple).unwrap();
        let ft = [square().to_f64(), triangle().to_f64()];
        let mut dirs: Vec<Vec<f64>> = (0..3600)
            .map(|k| {
                let t = (k as f64 + 0.5) * std::f64::consts::TAU / 3600.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        for p in &ft {
            for a in p.vertices() {
                for b in p.vertices() {
                    let d = [b[0] - a[0], b[1] - a[1]];
                    if d != [0.0, 0.0] {
                        dirs.push(vec![-d[1], d[0]]);
                    }
                }
            }
        }
        let mut tuples: Vec<Vec<Vec<usize>>> = Vec::new();
        for u in &dirs {
            let key: Vec<Vec<usize>> = ft.iter().map(|p| face_in_direction(p, u).unwrap().indices).collect();
            if !tuples.contains(&key) {
                tuples.push(key);
            }
        }
        assert_eq!(cells.len(), tuples.len());
        let mut keys: Vec<Vec<Vec<usize>>> = cells.iter().map(|c| c.faces.iter().map(|f| f.indices.clone()).collect()).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), cells.len());
    }

    #[test]
    fn unfoldedness() {
        let (ok, w) = is_unfolded(&[square(), square()]).unwrap();
        assert!(!ok);
        assert!(w.is_some());
        let seg = LatticePolytope::from_exponents(&[vec![0], vec![2]]).unwrap();
        assert!(is_unfolded(&[seg]).unwrap().0);
        let q1 = Polytope::new(&[vec![0.0, 0.0], vec![1.0, 0.1], vec![0.0, 1.0], vec![1.0, 1.1]]).unwrap();
        let q2 = Polytope::new(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.2, 1.0], vec![1.2, 1.0]]).unwrap();
        assert!(is_unfolded(&[q1, q2]).unwrap().0);
    }

    #[test]
    fn float_hull_agrees_with_exact() {
        let p = square().to_f64();
        assert!((volume(&p).unwrap() - 1.0).abs() < 1e-12);
        assert!((mixed_volume(&[p.clone(), p]).unwrap() - 2.0).abs() < 1e-12);
    }

    fn small_poly() -> impl Strategy<Value = LatticePolytope> {
        proptest::collection::vec((-3i64..4, -3i64..4), 1..6).prop_map(|v| {
            LatticePolytope::from_exponents(&v.into_iter().map(|(a, b)| vec![a, b]).collect::<Vec<_>>()).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn mixed_volume_symmetric_multilinear(a in small_poly(), b in small_poly(), c in small_poly()) {
            let ab = mixed_volume(&[a.clone(), b.clone()]).unwrap();
            prop_assert_eq!(ab.clone(), mixed_volume(&[b.clone(), a.clone()]).unwrap());
            let sum = minkowski_sum(&a, &c).unwrap();
            prop_assert_eq!(
                mixed_volume(&[sum, b.clone()]).unwrap(),
                ab.clone() + mixed_volume(&[c.clone(), b.clone()]).unwrap()
            );
            prop_assert_eq!(mixed_volume(&[a.clone(), a.clone()]).unwrap(), volume(&a).unwrap() * rat_int(2));
            prop_assert!(ab >= rat_int(0));
            prop_assert!(ab.is_integer());
        }
    }
}
