//! Exact integer lattice algebra: Smith normal form, unimodular completion,
//! and the annihilating covector of a block matrix `[I; -b^T]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{invalid, FqError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return invalid("ragged integer matrix");
        }
        let data = rows.iter().flatten().map(|&v| BigInt::from(v)).collect();
        Ok(IntMat { rows: r, cols: c, data })
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return invalid("ragged integer matrix");
        }
        Ok(IntMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn column(v: &[i64]) -> Self {
        IntMat { rows: v.len(), cols: 1, data: v.iter().map(|&x| BigInt::from(x)).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_i64_rows(&self) -> Result<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|v| v.to_i64().ok_or_else(|| FqError::Overflow("entry exceeds i64".into())))
                    .collect()
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> Result<IntMat> {
        if self.cols != other.rows {
            return invalid(format!(
                "shape mismatch {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<BigInt> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, &b)| a * BigInt::from(b)).sum())
            .collect()
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return invalid("determinant of non-square matrix");
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        Ok(sign * a[(n - 1, n - 1)].clone())
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().map(|d| d.abs().is_one()).unwrap_or(false)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * k;
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * k;
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }
}

impl Index<(usize, usize)> for IntMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let r: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", r.join(", "))?;
        }
        Ok(())
    }
}

/// `U * A * V = D` with `D` diagonal, nonnegative, and `d_i | d_{i+1}`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMat,
    pub v: IntMat,
    pub d: IntMat,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|v| !v.is_zero()).count()
    }
}

fn smallest_nonzero(a: &IntMat, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let v = &a[(i, j)];
            if v.is_zero() {
                continue;
            }
            match best {
                Some(b) if a[b].abs() <= v.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

pub fn smith_normal_form(a: &IntMat) -> Snf {
    let (r, c) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMat::identity(r);
    let mut v = IntMat::identity(c);

    for t in 0..r.min(c) {
        let Some((pi, pj)) = smallest_nonzero(&d, t) else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..r {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&d[(t, t)]);
                d.add_row(i, t, &q);
                u.add_row(i, t, &q);
                if !d[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..c {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&d[(t, t)]);
                d.add_col(j, t, &q);
                v.add_col(j, t, &q);
                if !d[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // a remainder is now smaller than the pivot; move it in
                let mut best = (t, t);
                for i in t..r {
                    if !d[(i, t)].is_zero() && d[(i, t)].abs() < d[best].abs() {
                        best = (i, t);
                    }
                }
                for j in t..c {
                    if !d[(t, j)].is_zero() && d[(t, j)].abs() < d[best].abs() {
                        best = (t, j);
                    }
                }
                d.swap_rows(t, best.0);
                u.swap_rows(t, best.0);
                d.swap_cols(t, best.1);
                v.swap_cols(t, best.1);
                continue;
            }
            let bad = (t + 1..r)
                .flat_map(|i| (t + 1..c).map(move |j| (i, j)))
                .find(|&(i, j)| !d[(i, j)].is_multiple_of(&d[(t, t)]));
            match bad {
                Some((i, _)) => {
                    let one = BigInt::one();
                    d.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    Snf { u, v, d }
}

/// Unimodular `J` with `J * gamma = e_m`.
pub fn unimodular_completion(gamma: &[i64]) -> Result<IntMat> {
    let m = gamma.len();
    if m == 0 {
        return invalid("empty gamma");
    }
    if gamma.iter().any(|&g| g <= 0) {
        return invalid("gamma entries must be positive");
    }
    let g = gamma.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if g != 1 {
        return Err(FqError::GammaNotPrimitive(g.to_string()));
    }
    let snf = smith_normal_form(&IntMat::column(gamma));
    // U gamma = sign(V) e_1; rotate row 0 to the bottom
    let sign = snf.v[(0, 0)].clone();
    let mut j = IntMat::zeros(m, m);
    for i in 0..m {
        let src = (i + 1) % m;
        for k in 0..m {
            j[(i, k)] = &snf.u[(src, k)] * &sign;
        }
    }
    Ok(j)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnihilatorCovector {
    pub alpha: Vec<f64>,
    pub delta: f64,
}

/// Checks `M = [I_n; -b^T]` and returns `b`.
pub fn block_b(m: &[Vec<f64>]) -> Result<Vec<f64>> {
    let rows = m.len();
    if rows < 2 {
        return invalid("M needs at least two rows");
    }
    let n = rows - 1;
    if m.iter().any(|r| r.len() != n) {
        return invalid("M must be (n+1) x n");
    }
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { 1.0 } else { 0.0 };
            if (m[i][j] - want).abs() > 1e-15 {
                return invalid("M is not of the form [I; -b^T]");
            }
        }
    }
    Ok(m[n].iter().map(|v| -v).collect())
}

pub fn annihilator(m: &[Vec<f64>], gamma: &[i64], delta: f64) -> Result<AnnihilatorCovector> {
    let b = block_b(m)?;
    let n = b.len();
    if gamma.len() != n + 1 {
        return invalid("gamma length must be n + 1");
    }
    if !(delta > 0.0) {
        return invalid("delta must be positive");
    }
    let denom: f64 = b.iter().zip(gamma).map(|(bj, &g)| bj * g as f64).sum::<f64>() + gamma[n] as f64;
    if denom == 0.0 {
        return Err(FqError::Singular("b . gamma + gamma_m = 0".into()));
    }
    let c = delta / denom;
    let mut alpha: Vec<f64> = b.iter().map(|bj| c * bj).collect();
    alpha.push(c);
    Ok(AnnihilatorCovector { alpha, delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diag(s: &Snf) -> Vec<i64> {
        s.diagonal().iter().map(|v| v.to_i64().unwrap()).collect()
    }

    fn check_snf(a: &IntMat) {
        let s = smith_normal_form(a);
        assert!(s.u.is_unimodular() && s.v.is_unimodular());
        assert_eq!(s.u.mul(a).unwrap().mul(&s.v).unwrap(), s.d);
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d[(i, j)].is_zero());
                }
            }
        }
        let dg = s.diagonal();
        for w in dg.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
    }

    #[test]
    fn snf_examples() {
        let a = IntMat::from_rows(&[vec![2, 0], vec![0, 3]]).unwrap();
        assert_eq!(diag(&smith_normal_form(&a)), vec![1, 6]);
        check_snf(&a);
        let b = IntMat::from_rows(&[vec![2, 4], vec![6, 8]]).unwrap();
        assert_eq!(diag(&smith_normal_form(&b)), vec![2, 4]);
        check_snf(&b);
        let z = IntMat::zeros(2, 3);
        assert_eq!(smith_normal_form(&z).rank(), 0);
    }

    #[test]
    fn det_matches_cofactor() {
        let a = IntMat::from_rows(&[vec![2, -1, 3], vec![0, 4, 1], vec![5, 2, -2]]).unwrap();
        // 2(-8-2) +1(0-5) +3(0-20)
        assert_eq!(a.det().unwrap(), BigInt::from(-85));
    }

    #[test]
    fn completion_examples() {
        for g in [vec![2i64, 1], vec![1, 1], vec![3, 5, 7], vec![1]] {
            let j = unimodular_completion(&g).unwrap();
            assert!(j.is_unimodular());
            let out = j.mul_vec(&g);
            let m = g.len();
            for (i, v) in out.iter().enumerate() {
                assert_eq!(*v, BigInt::from(if i == m - 1 { 1 } else { 0 }));
            }
        }
        let e = unimodular_completion(&[2, 4]).unwrap_err();
        assert!(e.to_string().contains("gamma not primitive"));
    }

    #[test]
    fn annihilator_example() {
        let m = vec![vec![1.0], vec![-0.3]];
        let a = annihilator(&m, &[2, 1], 1.6).unwrap();
        assert!((a.alpha[0] - 0.3).abs() < 1e-15);
        assert!((a.alpha[1] - 1.0).abs() < 1e-15);
        assert!(annihilator(&[vec![1.0], vec![-0.5]], &[2, 1], 0.0).is_err());
        assert!(annihilator(&[vec![2.0], vec![-0.5]], &[2, 1], 1.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn snf_invariants(rows in 1usize..4, cols in 1usize..4, seed in proptest::collection::vec(-9i64..10, 16)) {
            let data: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 4 + j]).collect()).collect();
            check_snf(&IntMat::from_rows(&data).unwrap());
        }

        #[test]
        fn completion_is_unimodular(g in proptest::collection::vec(1i64..=50, 1..5)) {
            let gcd = g.iter().fold(0i64, |a, &x| a.gcd(&x));
            let res = unimodular_completion(&g);
            if gcd != 1 {
                prop_assert!(res.is_err());
            } else {
                let j = res.unwrap();
                prop_assert!(j.is_unimodular());
                let out = j.mul_vec(&g);
                for (i, v) in out.iter().enumerate() {
                    prop_assert_eq!(v.clone(), BigInt::from(if i + 1 == g.len() { 1 } else { 0 }));
                }
            }
        }

        #[test]
        fn annihilator_kills_m(b in proptest::collection::vec(0.05f64..3.0, 1..4), gseed in proptest::collection::vec(1i64..9, 4), delta in 0.1f64..10.0) {
            let n = b.len();
            let gamma: Vec<i64> = gseed[..=n].to_vec();
            let mut m: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
            m.push(b.iter().map(|v| -v).collect());
            let a = annihilator(&m, &gamma, delta).unwrap();
            for j in 0..n {
                let s: f64 = (0..=n).map(|i| a.alpha[i] * m[i][j]).sum();
                prop_assert!(s.abs() <= 1e-12);
            }
            let s: f64 = a.alpha.iter().zip(&gamma).map(|(x, &g)| x * g as f64).sum();
            prop_assert!((s - delta).abs() <= 1e-12 * delta);
        }
    }
}
