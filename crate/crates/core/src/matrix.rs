//! Dense matrices over a field and over its polynomial ring.

use std::fmt;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::poly::Poly;

/// Row-major matrix over a field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    k: Field,
    rows: usize,
    cols: usize,
    a: Vec<Elem>,
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| self.k.format(self.get(i, j)))
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Mat {
    pub fn zeros(k: &Field, rows: usize, cols: usize) -> Mat {
        Mat {
            k: k.clone(),
            rows,
            cols,
            a: vec![k.zero(); rows * cols],
        }
    }

    pub fn identity(k: &Field, n: usize) -> Mat {
        let mut m = Mat::zeros(k, n, n);
        for i in 0..n {
            m.set(i, i, k.one());
        }
        m
    }

    pub fn scalar(k: &Field, n: usize, c: &Elem) -> Mat {
        let mut m = Mat::zeros(k, n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn from_rows(k: &Field, rows: Vec<Vec<Elem>>) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Mat {
            k: k.clone(),
            rows: r,
            cols: c,
            a: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_ints(k: &Field, rows: &[Vec<i64>]) -> Mat {
        Mat::from_rows(
            k,
            rows.iter()
                .map(|r| r.iter().map(|&v| k.from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn diag(k: &Field, d: &[Elem]) -> Mat {
        let mut m = Mat::zeros(k, d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn field(&self) -> &Field {
        &self.k
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.a[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.a[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<Elem> {
        self.a[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(&self.k, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn add(&self, o: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let a = self
            .a
            .iter()
            .zip(&o.a)
            .map(|(x, y)| self.k.add(x, y))
            .collect();
        Mat {
            k: self.k.clone(),
            rows: self.rows,
            cols: self.cols,
            a,
        }
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        self.add(&o.scale(&self.k.from_i64(-1)))
    }

    pub fn scale(&self, c: &Elem) -> Mat {
        let a = self.a.iter().map(|x| self.k.mul(x, c)).collect();
        Mat {
            k: self.k.clone(),
            rows: self.rows,
            cols: self.cols,
            a,
        }
    }

    pub fn neg(&self) -> Mat {
        self.scale(&self.k.from_i64(-1))
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        let k = &self.k;
        let mut out = Mat::zeros(k, self.rows, o.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let x = self.get(i, l);
                if k.is_zero(x) {
                    continue;
                }
                for j in 0..o.cols {
                    let y = o.get(l, j);
                    if k.is_zero(y) {
                        continue;
                    }
                    let idx = i * o.cols + j;
                    out.a[idx] = k.add(&out.a[idx], &k.mul(x, y));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Elem]) -> Vec<Elem> {
        let k = &self.k;
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(k.zero(), |acc, j| {
                    k.add(&acc, &k.mul(self.get(i, j), &v[j]))
                })
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|x| self.k.is_zero(x))
    }

    /// Row echelon form in place; returns (rank, determinant sign/scale factor of the row operations).
    fn echelon(&mut self) -> (usize, Elem) {
        let k = self.k.clone();
        let mut det = k.one();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !k.is_zero(self.get(i, c))) else {
                det = k.zero();
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.a.swap(p * self.cols + j, r * self.cols + j);
                }
                det = k.neg(&det);
            }
            let piv = self.get(r, c).clone();
            det = k.mul(&det, &piv);
            let inv = k.inv(&piv).unwrap();
            for i in r + 1..self.rows {
                let f = k.mul(self.get(i, c), &inv);
                if k.is_zero(&f) {
                    continue;
                }
                for j in c..self.cols {
                    let v = k.sub(self.get(i, j), &k.mul(&f, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            r += 1;
        }
        (r, det)
    }

    pub fn det(&self) -> Elem {
        assert!(self.is_square(), "det of a non-square matrix");
        if self.rows == 0 {
            return self.k.one();
        }
        let mut m = self.clone();
        let (r, d) = m.echelon();
        if r < self.rows {
            self.k.zero()
        } else {
            d
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.echelon().0
    }

    pub fn inverse(&self) -> Result<Mat> {
        if !self.is_square() {
            return Err(Error::SizeMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let k = &self.k;
        let mut aug = Mat::zeros(k, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, k.one());
        }
        for c in 0..n {
            let p = (c..n)
                .find(|&i| !k.is_zero(aug.get(i, c)))
                .ok_or(Error::SingularMatrix)?;
            if p != c {
                for j in 0..2 * n {
                    aug.a.swap(p * 2 * n + j, c * 2 * n + j);
                }
            }
            let inv = k.inv(aug.get(c, c)).unwrap();
            for j in 0..2 * n {
                let v = k.mul(aug.get(c, j), &inv);
                aug.set(c, j, v);
            }
            for i in 0..n {
                if i == c {
                    continue;
                }
                let f = aug.get(i, c).clone();
                if k.is_zero(&f) {
                    continue;
                }
                for j in 0..2 * n {
                    let v = k.sub(aug.get(i, j), &k.mul(&f, aug.get(c, j)));
                    aug.set(i, j, v);
                }
            }
        }
        let mut out = Mat::zeros(k, n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Ok(out)
    }

    /// Basis of the right null space.
    pub fn nullspace(&self) -> Vec<Vec<Elem>> {
        let k = &self.k;
        let mut m = self.clone();
        // reduced row echelon
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !k.is_zero(m.get(i, c))) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.a.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = k.inv(m.get(r, c)).unwrap();
            for j in 0..m.cols {
                let v = k.mul(m.get(r, j), &inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if k.is_zero(&f) {
                    continue;
                }
                for j in 0..m.cols {
                    let v = k.sub(m.get(i, j), &k.mul(&f, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![k.zero(); m.cols];
                v[fc] = k.one();
                for (ri, &pc) in pivots.iter().enumerate() {
                    v[pc] = k.neg(m.get(ri, fc));
                }
                v
            })
            .collect()
    }

    pub fn block_diag(k: &Field, blocks: &[Mat]) -> Mat {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Mat::zeros(k, n, m);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Entries mapped into an extension field.
    pub fn lift_to(&self, ext: &Field) -> Mat {
        Mat {
            k: ext.clone(),
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().map(|x| ext.embed_from(&self.k, x)).collect(),
        }
    }

    /// `p(self)` for a polynomial over the same field.
    pub fn poly_eval(&self, p: &Poly) -> Mat {
        let n = self.rows;
        let mut acc = Mat::zeros(&self.k, n, n);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self).add(&Mat::scalar(&self.k, n, c));
        }
        acc
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|i| {
                    Value::Array(
                        (0..self.cols)
                            .map(|j| self.k.to_json(self.get(i, j)))
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    pub fn from_json(k: &Field, v: &Value) -> Result<Mat> {
        let rows = v
            .as_array()
            .ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
        let mut out = Vec::with_capacity(rows.len());
        for r in rows {
            let r = r
                .as_array()
                .ok_or_else(|| Error::Parse("matrix row must be an array".into()))?;
            out.push(
                r.iter()
                    .map(|x| k.from_json(x))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let c = out.first().map_or(0, |x| x.len());
        if out.iter().any(|x| x.len() != c) {
            return Err(Error::Parse("ragged matrix".into()));
        }
        Ok(Mat::from_rows(k, out))
    }
}

/// Square or rectangular matrix over `k[X]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMat {
    k: Field,
    rows: usize,
    cols: usize,
    a: Vec<Poly>,
}

impl PolyMat {
    pub fn zeros(k: &Field, rows: usize, cols: usize) -> PolyMat {
        PolyMat {
            k: k.clone(),
            rows,
            cols,
            a: vec![Poly::zero(k); rows * cols],
        }
    }

    pub fn identity(k: &Field, n: usize) -> PolyMat {
        let mut m = PolyMat::zeros(k, n, n);
        for i in 0..n {
            m.set(i, i, Poly::one(k));
        }
        m
    }

    pub fn from_rows(k: &Field, rows: Vec<Vec<Poly>>) -> PolyMat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        PolyMat {
            k: k.clone(),
            rows: r,
            cols: c,
            a: rows.into_iter().flatten().collect(),
        }
    }

    /// `x_coef * X + c_coef` entrywise.
    pub fn linear(x_coef: &Mat, c_coef: &Mat) -> PolyMat {
        let k = x_coef.field().clone();
        let mut m = PolyMat::zeros(&k, x_coef.rows(), x_coef.cols());
        for i in 0..x_coef.rows() {
            for j in 0..x_coef.cols() {
                m.set(
                    i,
                    j,
                    Poly::new(&k, vec![c_coef.get(i, j).clone(), x_coef.get(i, j).clone()]),
                );
            }
        }
        m
    }

    pub fn field(&self) -> &Field {
        &self.k
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.a[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: Poly) {
        self.a[i * self.cols + j] = v;
    }

    pub fn mul(&self, o: &PolyMat) -> PolyMat {
        assert_eq!(self.cols, o.rows);
        let mut out = PolyMat::zeros(&self.k, self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = Poly::zero(&self.k);
                for l in 0..self.cols {
                    acc = acc.add(&self.get(i, l).mul(o.get(l, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            for c in 0..self.cols {
                self.a.swap(i * self.cols + c, j * self.cols + c);
            }
        }
    }

    pub fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for r in 0..self.rows {
                self.a.swap(r * self.cols + i, r * self.cols + j);
            }
        }
    }

    /// row_i += f * row_j
    pub fn add_row_multiple(&mut self, i: usize, j: usize, f: &Poly) {
        for c in 0..self.cols {
            let v = self.get(i, c).add(&f.mul(self.get(j, c)));
            self.set(i, c, v);
        }
    }

    /// col_i += f * col_j
    pub fn add_col_multiple(&mut self, i: usize, j: usize, f: &Poly) {
        for r in 0..self.rows {
            let v = self.get(r, i).add(&self.get(r, j).mul(f));
            self.set(r, i, v);
        }
    }

    pub fn scale_row(&mut self, i: usize, c: &Elem) {
        for col in 0..self.cols {
            let v = self.get(i, col).scale(c);
            self.set(i, col, v);
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination over `k[X]`.
    pub fn det_bareiss(&self) -> Poly {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let k = &self.k;
        if n == 0 {
            return Poly::one(k);
        }
        let mut m = self.clone();
        let mut sign = false;
        let mut prev = Poly::one(k);
        for c in 0..n - 1 {
            if m.get(c, c).is_zero() {
                match (c + 1..n).find(|&i| !m.get(i, c).is_zero()) {
                    Some(p) => {
                        m.swap_rows(p, c);
                        sign = !sign;
                    }
                    None => return Poly::zero(k),
                }
            }
            for i in c + 1..n {
                for j in c + 1..n {
                    let v = m
                        .get(c, c)
                        .mul(m.get(i, j))
                        .sub(&m.get(i, c).mul(m.get(c, j)));
                    m.set(i, j, v.div_exact(&prev));
                }
            }
            prev = m.get(c, c).clone();
        }
        let d = m.get(n - 1, n - 1).clone();
        if sign {
            d.neg()
        } else {
            d
        }
    }

    /// Evaluate every entry at `x` in an extension field of the coefficients.
    pub fn eval_in(&self, ext: &Field, x: &Elem) -> Mat {
        let rows = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).eval_in(ext, x))
                    .collect()
            })
            .collect();
        Mat::from_rows(ext, rows)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse() {
        let f5 = Field::prime(5).unwrap();
        let m = Mat::from_ints(&f5, &[vec![1, 2], vec![3, 4]]);
        assert_eq!(m.det(), f5.from_i64(-2));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Mat::identity(&f5, 2));
        assert_eq!(Mat::from_ints(&f5, &[vec![1, 2], vec![2, 4]]).rank(), 1);
    }

    #[test]
    fn bareiss_matches_expansion() {
        let q = Field::rational();
        let x = |c: &[i64]| Poly::from_ints(&q, c);
        let m = PolyMat::from_rows(
            &q,
            vec![vec![x(&[0, 1]), x(&[1])], vec![x(&[0]), x(&[0, 1])]],
        );
        assert_eq!(m.det_bareiss(), x(&[0, 0, 1]));
        let m = PolyMat::from_rows(
            &q,
            vec![
                vec![x(&[0]), x(&[1, 1]), x(&[2])],
                vec![x(&[1]), x(&[0]), x(&[0, 3])],
                vec![x(&[0, 1]), x(&[1]), x(&[0])],
            ],
        );
        // 0*(..) - (1+X)*(0 - 3X^2) + 2*(1 - 0) = 3X^2 + 3X^3 + 2
        assert_eq!(m.det_bareiss(), x(&[2, 0, 3, 3]));
    }

    #[test]
    fn nullspace_basis() {
        let f3 = Field::prime(3).unwrap();
        let m = Mat::from_ints(&f3, &[vec![1, 1, 0], vec![0, 0, 1]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(|x| f3.is_zero(x)));
    }
}
