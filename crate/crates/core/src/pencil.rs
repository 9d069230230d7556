//! Pencils `(M0, M1)`, their discriminant and the congruence action.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::form::{scheme_of, BinaryForm, SchemeS};
use crate::matrix::{Mat, PolyMat};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pencil {
    k: Field,
    m0: Mat,
    m1: Mat,
    symmetric: bool,
}

/// A coordinate change `X0 = a X0' + c X1'`, `X1 = b X0' + d X1'` on the projective line,
/// realized on pencils by `(a M0 + b M1, c M0 + d M1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reparam {
    pub a: Elem,
    pub b: Elem,
    pub c: Elem,
    pub d: Elem,
}

impl Reparam {
    pub fn identity(k: &Field) -> Reparam {
        Reparam {
            a: k.one(),
            b: k.zero(),
            c: k.zero(),
            d: k.one(),
        }
    }

    pub fn is_identity(&self, k: &Field) -> bool {
        *self == Reparam::identity(k)
    }

    pub fn apply_form(&self, f: &BinaryForm) -> BinaryForm {
        f.substitute(&self.a, &self.b, &self.c, &self.d)
    }
}

impl Pencil {
    pub fn new(m0: Mat, m1: Mat) -> Result<Pencil> {
        if !m0.is_square() || !m1.is_square() || m0.rows() != m1.rows() {
            return Err(Error::SizeMismatch(format!(
                "pencil matrices must be square of equal size, got {}x{} and {}x{}",
                m0.rows(),
                m0.cols(),
                m1.rows(),
                m1.cols()
            )));
        }
        if m0.rows() == 0 {
            return Err(Error::SizeMismatch(
                "pencil matrices must be at least 1x1".into(),
            ));
        }
        if m0.field() != m1.field() {
            return Err(Error::InvalidInput(
                "pencil matrices over different fields".into(),
            ));
        }
        let symmetric = m0.is_symmetric() && m1.is_symmetric();
        Ok(Pencil {
            k: m0.field().clone(),
            m0,
            m1,
            symmetric,
        })
    }

    pub fn from_ints(k: &Field, m0: &[Vec<i64>], m1: &[Vec<i64>]) -> Result<Pencil> {
        Pencil::new(Mat::from_ints(k, m0), Mat::from_ints(k, m1))
    }

    pub fn field(&self) -> &Field {
        &self.k
    }
    pub fn m0(&self) -> &Mat {
        &self.m0
    }
    pub fn m1(&self) -> &Mat {
        &self.m1
    }
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }
    /// Matrix size `n + 1`.
    pub fn size(&self) -> usize {
        self.m0.rows()
    }
    pub fn n(&self) -> usize {
        self.size() - 1
    }

    /// `det(X0 M0 + X1 M1)`: interpolation when the field has at least `n + 2` elements,
    /// fraction-free elimination otherwise.
    pub fn disc(&self) -> BinaryForm {
        let big = self.k.size().is_none_or(|q| q as usize > self.size());
        if big {
            self.disc_interpolate()
        } else {
            self.disc_bareiss()
        }
    }

    pub fn disc_bareiss(&self) -> BinaryForm {
        let d = PolyMat::linear(&self.m0, &self.m1).det_bareiss();
        BinaryForm::from_poly(&d, self.size())
    }

    /// Evaluate at `n + 2` points and interpolate, moving to an extension when the field is too small.
    pub fn disc_interpolate(&self) -> BinaryForm {
        let n1 = self.size();
        let (ext, xs) = match self.k.size() {
            Some(q) if (q as usize) < n1 + 1 => {
                let mut d = 2;
                while (q as u128).pow(d as u32) < (n1 + 1) as u128 {
                    d += 1;
                }
                let e = Field::default_extension(&self.k, d)
                    .expect("finite fields have irreducibles of every degree");
                let xs: Vec<Elem> = (0..=n1 as u64).map(|i| e.from_index(i)).collect();
                (e, xs)
            }
            Some(_) => (
                self.k.clone(),
                (0..=n1 as u64).map(|i| self.k.from_index(i)).collect(),
            ),
            None => (
                self.k.clone(),
                (0..=n1 as i64).map(|i| self.k.from_i64(i)).collect(),
            ),
        };
        let a0 = if ext == self.k {
            self.m0.clone()
        } else {
            self.m0.lift_to(&ext)
        };
        let a1 = if ext == self.k {
            self.m1.clone()
        } else {
            self.m1.lift_to(&ext)
        };
        let ys: Vec<Elem> = xs.iter().map(|x| a0.scale(x).add(&a1).det()).collect();
        let p = interpolate(&ext, &xs, &ys);
        let p = if ext == self.k {
            p
        } else {
            p.descend_to(&self.k)
                .expect("determinant has base-field coefficients")
        };
        BinaryForm::from_poly(&p, n1)
    }

    /// `(tP M0 P, tP M1 P)`.
    pub fn act(&self, p: &Mat) -> Result<Pencil> {
        if !p.is_square() || p.rows() != self.size() {
            return Err(Error::SizeMismatch(format!(
                "P must be {}x{}",
                self.size(),
                self.size()
            )));
        }
        if p.field() != &self.k {
            return Err(Error::InvalidInput("P over a different field".into()));
        }
        if self.k.is_zero(&p.det()) {
            return Err(Error::SingularP);
        }
        Ok(self.act_unchecked(p))
    }

    pub(crate) fn act_unchecked(&self, p: &Mat) -> Pencil {
        let pt = p.transpose();
        let m0 = pt.mul(&self.m0).mul(p);
        let m1 = pt.mul(&self.m1).mul(p);
        let symmetric = m0.is_symmetric() && m1.is_symmetric();
        Pencil {
            k: self.k.clone(),
            m0,
            m1,
            symmetric,
        }
    }

    /// `(a M0 + b M1, c M0 + d M1)`; the discriminant becomes `f(a X0 + c X1, b X0 + d X1)`.
    pub fn recombine(&self, g: &Reparam) -> Pencil {
        let m0 = self.m0.scale(&g.a).add(&self.m1.scale(&g.b));
        let m1 = self.m0.scale(&g.c).add(&self.m1.scale(&g.d));
        let symmetric = m0.is_symmetric() && m1.is_symmetric();
        Pencil {
            k: self.k.clone(),
            m0,
            m1,
            symmetric,
        }
    }

    pub fn transpose_pair(&self) -> Pencil {
        Pencil {
            k: self.k.clone(),
            m0: self.m0.transpose(),
            m1: self.m1.transpose(),
            symmetric: self.symmetric,
        }
    }

    pub fn scheme(&self) -> Result<SchemeS> {
        let f = self.disc();
        if f.is_zero() {
            return Err(Error::VanishingDiscriminant);
        }
        scheme_of(&f)
    }

    /// Rank of `a M0 + b M1` is `n` at every root of the discriminant.
    pub fn is_free(&self) -> Result<bool> {
        let s = self.scheme()?;
        let n = self.n();
        for (p, _) in &s.points {
            let r = p.residue();
            let rank = if r.at_infinity {
                self.m0.rank()
            } else if r.field == self.k {
                self.m0.scale(&r.root).add(&self.m1).rank()
            } else {
                let a0 = self.m0.lift_to(&r.field);
                let a1 = self.m1.lift_to(&r.field);
                a0.scale(&r.root).add(&a1).rank()
            };
            if rank < n {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn scheme_is_reduced(&self) -> Result<bool> {
        Ok(self.scheme()?.is_reduced())
    }

    /// Deterministic coordinate change making `M0` invertible: first shears `X0 -> X0 + c X1`
    /// with the least working `c`, then the swapped chart. Fails only over finite fields where
    /// the discriminant vanishes on every rational point.
    pub fn chart(&self) -> Result<Reparam> {
        let k = &self.k;
        let f = self.disc();
        if f.is_zero() {
            return Err(Error::VanishingDiscriminant);
        }
        let cands: Vec<Elem> = match k.size() {
            Some(q) => (0..q).map(|i| k.from_index(i)).collect(),
            None => {
                let mut v = vec![k.zero()];
                for i in 1..=(self.size() as i64 + 1) {
                    v.push(k.from_i64(i));
                    v.push(k.from_i64(-i));
                }
                v
            }
        };
        // new M0 = a M0 + b M1 has determinant f(a, b)
        for c in &cands {
            if !k.is_zero(&f.eval(&k.one(), c)) {
                return Ok(Reparam {
                    a: k.one(),
                    b: c.clone(),
                    c: k.zero(),
                    d: k.one(),
                });
            }
        }
        if !k.is_zero(&f.eval(&k.zero(), &k.one())) {
            return Ok(Reparam {
                a: k.zero(),
                b: k.one(),
                c: k.one(),
                d: k.zero(),
            });
        }
        Err(Error::PreconditionViolated(
            "the discriminant vanishes at every rational point; no chart with M0 invertible".into(),
        ))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "field": self.k.descriptor(),
            "n": self.n(),
            "M0": self.m0.to_json(),
            "M1": self.m1.to_json(),
            "symmetric": self.symmetric,
        })
    }

    /// Read a pencil. The field comes from the document's `"field"` key, or from `default`
    /// when the key is absent; both present and different is an error.
    pub fn from_json(v: &Value, default: Option<&Field>) -> Result<Pencil> {
        let k = match (v.get("field"), default) {
            (Some(d), dflt) => {
                let d = d
                    .as_str()
                    .ok_or_else(|| Error::Parse("'field' must be a string".into()))?;
                let k = Field::parse(d)?;
                if let Some(dk) = dflt {
                    if *dk != k {
                        return Err(Error::InvalidInput(format!(
                            "pencil field {} differs from requested field {}",
                            k.descriptor(),
                            dk.descriptor()
                        )));
                    }
                }
                k
            }
            (None, Some(dk)) => dk.clone(),
            (None, None) => return Err(Error::InvalidInput("no field given".into())),
        };
        let m0 = Mat::from_json(
            &k,
            v.get("M0")
                .ok_or_else(|| Error::Parse("missing 'M0'".into()))?,
        )?;
        let m1 = Mat::from_json(
            &k,
            v.get("M1")
                .ok_or_else(|| Error::Parse("missing 'M1'".into()))?,
        )?;
        let p = Pencil::new(m0, m1)?;
        if let Some(n) = v.get("n") {
            if n.as_u64() != Some(p.n() as u64) {
                return Err(Error::InvalidInput(format!(
                    "'n' does not match matrix size {}",
                    p.size()
                )));
            }
        }
        if let Some(s) = v.get("symmetric") {
            if s.as_bool() == Some(true) && !p.symmetric {
                return Err(Error::InvalidInput(
                    "pencil marked symmetric but matrices are not".into(),
                ));
            }
        }
        Ok(p)
    }
}

/// Newton interpolation through distinct `xs`.
pub(crate) fn interpolate(k: &Field, xs: &[Elem], ys: &[Elem]) -> Poly {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = k.sub(&dd[i], &dd[i - 1]);
            let den = k.sub(&xs[i], &xs[i - j]);
            dd[i] = k.div(&num, &den).expect("interpolation nodes are distinct");
        }
    }
    let mut p = Poly::constant(k, dd[n - 1].clone());
    for i in (0..n - 1).rev() {
        p = p
            .mul(&Poly::linear(k, &xs[i]))
            .add(&Poly::constant(k, dd[i].clone()));
    }
    p
}
