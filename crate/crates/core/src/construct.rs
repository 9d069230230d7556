//! Explicit symmetric pencils: Hankel pairs with a prescribed determinant, canonical Segre
//! blocks and realizations of module types.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::form::{form_split, BinaryForm, PointOnP1};
use crate::matrix::Mat;
use crate::modstruct::ModuleType;
use crate::pencil::Pencil;
use crate::poly::Poly;

/// `(-1)^(r(r-1)/2)` in `k`.
pub fn hankel_sign(k: &Field, r: usize) -> Elem {
    if (r * r.saturating_sub(1) / 2).is_multiple_of(2) {
        k.one()
    } else {
        k.from_i64(-1)
    }
}

/// Symmetric pair with `det(X M0 + M1) = f`, where `f` has degree `r` and leading coefficient
/// `(-1)^(r(r-1)/2)`. Entries are `theta(X^(i+j))` and `-theta(X^(i+j+1))`, with `theta` reading
/// the `X^(r-1)` coefficient modulo `f`.
pub fn lemma_a1_pair(f: &Poly) -> Result<Pencil> {
    let k = f.field();
    let r = match f.deg() {
        Some(r) if r >= 1 => r,
        _ => {
            return Err(Error::InvalidInput(
                "polynomial of degree at least 1 required".into(),
            ))
        }
    };
    let want = hankel_sign(k, r);
    if f.lead() != Some(&want) {
        return Err(Error::LeadingCoefficientMismatch(format!(
            "degree {r} needs leading coefficient {}, got {}",
            k.format(&want),
            k.format(f.lead().unwrap())
        )));
    }
    // theta(X^j) for j < 2r
    let mut theta = Vec::with_capacity(2 * r);
    let mut pw = Poly::one(k);
    let x = Poly::x(k);
    for _ in 0..2 * r {
        theta.push(pw.coeff(r - 1));
        pw = pw.mul(&x).rem(f);
    }
    let mut m0 = Mat::zeros(k, r, r);
    let mut m1 = Mat::zeros(k, r, r);
    for i in 0..r {
        for j in 0..r {
            m0.set(i, j, theta[i + j].clone());
            m1.set(i, j, k.neg(&theta[i + j + 1]));
        }
    }
    Pencil::new(m0, m1)
}

/// Companion matrix of a monic polynomial, acting on column vectors (`X` times `X^i` is `X^(i+1)`).
pub fn companion(f: &Poly) -> Mat {
    let k = f.field();
    let r = f.deg().expect("nonzero polynomial");
    let f = f.monic();
    let mut c = Mat::zeros(k, r, r);
    for i in 1..r {
        c.set(i, i - 1, k.one());
    }
    for i in 0..r {
        c.set(i, r - 1, k.neg(&f.coeff(i)));
    }
    c
}

fn antidiag(k: &Field, e: usize, shift: usize) -> Mat {
    let mut m = Mat::zeros(k, e, e);
    for i in 0..e {
        for j in 0..e {
            if i + j + 1 == e + shift {
                m.set(i, j, k.one());
            }
        }
    }
    m
}

/// Ones on the antidiagonal.
pub fn delta(k: &Field, e: usize) -> Mat {
    antidiag(k, e, 0)
}

/// Ones just below the antidiagonal (`i + j = e` with 0-based indices).
pub fn lambda(k: &Field, e: usize) -> Mat {
    antidiag(k, e, 1)
}

/// Pair with `det(X0 M0 + X1 M1) = f` for a binary form `f = X1^s g` whose `C_f` is
/// `(-1)^(r(r-1)/2)`; the output is free.
pub fn lemma_a2_pair(f: &BinaryForm) -> Result<Pencil> {
    let k = f.field();
    let r = f.degree();
    if r == 0 {
        return Err(Error::InvalidInput(
            "form of degree at least 1 required".into(),
        ));
    }
    let (s, g, c) = form_split(f)?;
    let want = hankel_sign(k, r);
    if c != want {
        return Err(Error::CoefficientConventionViolated(format!(
            "degree {r} needs C_f = {}, got {}",
            k.format(&want),
            k.format(&c)
        )));
    }
    let mut b0 = Vec::new();
    let mut b1 = Vec::new();
    if s > 0 {
        let sign = if (r - s).is_multiple_of(2) {
            k.one()
        } else {
            k.from_i64(-1)
        };
        b0.push(lambda(k, s));
        b1.push(delta(k, s).scale(&sign));
    }
    if r > s {
        let a = r - s;
        let eps = k.mul(&hankel_sign(k, a), &hankel_sign(k, r));
        let gp = g.dehomogenize().scale(&eps);
        let p = lemma_a1_pair(&gp)?;
        b0.push(p.m0().clone());
        b1.push(p.m1().clone());
    }
    Pencil::new(Mat::block_diag(k, &b0), Mat::block_diag(k, &b1))
}

/// Segre block at `(u : v)` with discriminant `(-1)^(e(e-1)/2) (v X0 - u X1)^e`.
/// For `u = 0` the pair `(v Delta, Lambda)` replaces `(v Delta + Lambda, 0)`, which is not free
/// when `e >= 2`; both agree for `e = 1`.
pub fn delta_lambda_block(e: usize, u: &Elem, v: &Elem, k: &Field) -> Result<Pencil> {
    if e == 0 {
        return Err(Error::InvalidInput("block size must be at least 1".into()));
    }
    if k.is_zero(u) && k.is_zero(v) {
        return Err(Error::ZeroPoint);
    }
    let d = delta(k, e);
    let l = lambda(k, e);
    if k.is_zero(u) {
        Pencil::new(d.scale(v), l)
    } else {
        Pencil::new(d.scale(v).add(&l), d.scale(&k.neg(u)))
    }
}

/// A point of a Segre description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecPoint {
    Rational(Elem, Elem),
    General(PointOnP1),
}

#[derive(Clone, Debug)]
pub struct SegreSpec {
    pub field: Field,
    pub points: Vec<(SpecPoint, Vec<usize>)>,
}

impl SegreSpec {
    fn closed_points(&self) -> Result<Vec<(PointOnP1, Vec<usize>)>> {
        self.points
            .iter()
            .map(|(p, e)| {
                let q = match p {
                    SpecPoint::Rational(u, v) => PointOnP1::rational(&self.field, u, v)?,
                    SpecPoint::General(q) => q.clone(),
                };
                Ok((q, e.clone()))
            })
            .collect()
    }

    /// The module type this description stands for.
    pub fn module_type(&self) -> Result<ModuleType> {
        ModuleType::new(&self.field, self.closed_points()?)
    }

    /// `{"points": [{"u":..,"v":..,"partition":[..]} | {"point":[..],"partition":[..]}]}`
    pub fn from_json(k: &Field, v: &Value) -> Result<SegreSpec> {
        let arr = v
            .get("points")
            .and_then(|p| p.as_array())
            .or_else(|| v.as_array())
            .ok_or_else(|| Error::Parse("Segre spec needs a 'points' array".into()))?;
        let mut points = Vec::new();
        for e in arr {
            let part = e
                .get("partition")
                .and_then(|x| x.as_array())
                .ok_or_else(|| Error::Parse("missing 'partition'".into()))?
                .iter()
                .map(|x| {
                    x.as_u64()
                        .map(|y| y as usize)
                        .ok_or_else(|| Error::Parse("partition parts must be integers".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            let p = if let (Some(u), Some(w)) = (e.get("u"), e.get("v")) {
                SpecPoint::Rational(k.from_json(u)?, k.from_json(w)?)
            } else if let Some(pt) = e.get("point") {
                SpecPoint::General(PointOnP1::from_json(k, pt)?)
            } else {
                return Err(Error::Parse(
                    "each spec entry needs 'u','v' or 'point'".into(),
                ));
            };
            points.push((p, part));
        }
        Ok(SegreSpec {
            field: k.clone(),
            points,
        })
    }
}

/// Direct sum of Segre blocks. All points must be rational.
pub fn segre_pair(spec: &SegreSpec) -> Result<Pencil> {
    let k = &spec.field;
    // validates distinctness and partitions
    spec.module_type()?;
    let mut b0 = Vec::new();
    let mut b1 = Vec::new();
    for (p, part) in &spec.points {
        let (u, v) = match p {
            SpecPoint::Rational(u, v) => (u.clone(), v.clone()),
            SpecPoint::General(q) => q.rational_coords().ok_or_else(|| {
                Error::NonRationalPoint(format!("point of degree {}", q.degree()))
            })?,
        };
        let mut part = part.clone();
        part.sort_unstable_by(|a, b| b.cmp(a));
        for &e in &part {
            let blk = delta_lambda_block(e, &u, &v, k)?;
            b0.push(blk.m0().clone());
            b1.push(blk.m1().clone());
        }
    }
    if b0.is_empty() {
        return Err(Error::InvalidInput("empty Segre description".into()));
    }
    Pencil::new(Mat::block_diag(k, &b0), Mat::block_diag(k, &b1))
}

/// A symmetric pencil whose module type is `t`: one free block per part, each built from
/// the form `point^e` scaled to meet the Hankel sign convention.
pub fn realize_pair(t: &ModuleType) -> Result<Pencil> {
    let k = t.field();
    let mut b0 = Vec::new();
    let mut b1 = Vec::new();
    for (p, part) in &t.entries {
        for &e in part {
            let f = p.form().pow(e);
            let (_, _, c) = form_split(&f)?;
            let scale = k.div(&hankel_sign(k, f.degree()), &c)?;
            let blk = lemma_a2_pair(&f.scale(&scale))?;
            b0.push(blk.m0().clone());
            b1.push(blk.m1().clone());
        }
    }
    if b0.is_empty() {
        return Err(Error::InvalidInput("empty module type".into()));
    }
    Pencil::new(Mat::block_diag(k, &b0), Mat::block_diag(k, &b1))
}
