//! Binary forms, closed points of the projective line and discriminant schemes.

use std::cmp::Ordering;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::factor::factor;
use crate::field::{Elem, Field};
use crate::poly::Poly;

/// Homogeneous form `sum c_i X0^i X1^(D-i)` of degree `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryForm {
    k: Field,
    c: Vec<Elem>,
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        let mut terms = Vec::new();
        for (i, a) in self.c.iter().enumerate().rev() {
            if self.k.is_zero(a) {
                continue;
            }
            let mut t = format!("({})", self.k.format(a));
            match i {
                0 => {}
                1 => t.push_str("*X0"),
                _ => t.push_str(&format!("*X0^{i}")),
            }
            match d - i {
                0 => {}
                1 => t.push_str("*X1"),
                e => t.push_str(&format!("*X1^{e}")),
            }
            terms.push(t);
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl BinaryForm {
    /// Form of degree `coeffs.len() - 1`.
    pub fn new(k: &Field, coeffs: Vec<Elem>) -> BinaryForm {
        assert!(
            !coeffs.is_empty(),
            "a binary form needs at least one coefficient"
        );
        BinaryForm {
            k: k.clone(),
            c: coeffs,
        }
    }

    pub fn from_ints(k: &Field, coeffs: &[i64]) -> BinaryForm {
        BinaryForm::new(k, coeffs.iter().map(|&v| k.from_i64(v)).collect())
    }

    /// Homogenization of `p` to degree `d >= deg p`.
    pub fn from_poly(p: &Poly, d: usize) -> BinaryForm {
        assert!(p.deg().is_none_or(|e| e <= d));
        BinaryForm {
            k: p.field().clone(),
            c: p.padded(d + 1),
        }
    }

    pub fn zero(k: &Field, d: usize) -> BinaryForm {
        BinaryForm {
            k: k.clone(),
            c: vec![k.zero(); d + 1],
        }
    }

    pub fn field(&self) -> &Field {
        &self.k
    }
    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }
    pub fn coeffs(&self) -> &[Elem] {
        &self.c
    }
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|a| self.k.is_zero(a))
    }

    /// `f(X, 1)`.
    pub fn dehomogenize(&self) -> Poly {
        Poly::new(&self.k, self.c.clone())
    }

    /// `f(1, Y)` as a polynomial in `Y = X1/X0`.
    pub fn dehomogenize_y(&self) -> Poly {
        let mut v = self.c.clone();
        v.reverse();
        Poly::new(&self.k, v)
    }

    pub fn mul(&self, o: &BinaryForm) -> BinaryForm {
        let k = &self.k;
        let mut v = vec![k.zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                v[i + j] = k.add(&v[i + j], &k.mul(a, b));
            }
        }
        BinaryForm { k: k.clone(), c: v }
    }

    pub fn pow(&self, e: usize) -> BinaryForm {
        let mut r = BinaryForm::new(&self.k, vec![self.k.one()]);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    pub fn scale(&self, a: &Elem) -> BinaryForm {
        BinaryForm {
            k: self.k.clone(),
            c: self.c.iter().map(|x| self.k.mul(x, a)).collect(),
        }
    }

    pub fn eval(&self, x0: &Elem, x1: &Elem) -> Elem {
        let k = &self.k;
        let d = self.degree();
        self.c.iter().enumerate().fold(k.zero(), |acc, (i, a)| {
            k.add(
                &acc,
                &k.mul(a, &k.mul(&k.pow(x0, i as u64), &k.pow(x1, (d - i) as u64))),
            )
        })
    }

    /// `f(a X0 + c X1, b X0 + d X1)`.
    pub fn substitute(&self, a: &Elem, b: &Elem, c: &Elem, d: &Elem) -> BinaryForm {
        let k = &self.k;
        let deg = self.degree();
        // linear forms as coefficient vectors [coef of X1, coef of X0]
        let l0 = BinaryForm::new(k, vec![c.clone(), a.clone()]);
        let l1 = BinaryForm::new(k, vec![d.clone(), b.clone()]);
        let mut out = BinaryForm::zero(k, deg);
        for (i, ci) in self.c.iter().enumerate() {
            if k.is_zero(ci) {
                continue;
            }
            let term = l0.pow(i).mul(&l1.pow(deg - i)).scale(ci);
            for (j, t) in term.c.iter().enumerate() {
                out.c[j] = k.add(&out.c[j], t);
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "degree": self.degree(),
            "coeffs": self.c.iter().map(|a| self.k.to_json(a)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(k: &Field, v: &Value) -> Result<BinaryForm> {
        let coeffs = v
            .get("coeffs")
            .and_then(|c| c.as_array())
            .ok_or_else(|| Error::Parse("binary form needs a 'coeffs' array".into()))?;
        let c: Vec<Elem> = coeffs
            .iter()
            .map(|x| k.from_json(x))
            .collect::<Result<_>>()?;
        if c.is_empty() {
            return Err(Error::Parse(
                "binary form needs at least one coefficient".into(),
            ));
        }
        if let Some(d) = v.get("degree") {
            let d = d
                .as_u64()
                .ok_or_else(|| Error::Parse("'degree' must be an integer".into()))?;
            if d as usize + 1 != c.len() {
                return Err(Error::Parse(format!(
                    "degree {d} needs {} coefficients",
                    d + 1
                )));
            }
        }
        Ok(BinaryForm::new(k, c))
    }
}

/// Split `f = X1^s * g` with `X1` not dividing `g`; returns `(s, g, C_f)`.
pub fn form_split(f: &BinaryForm) -> Result<(usize, BinaryForm, Elem)> {
    if f.is_zero() {
        return Err(Error::ZeroForm);
    }
    let d = f.degree();
    let top = f.c.iter().rposition(|a| !f.k.is_zero(a)).unwrap();
    let s = d - top;
    let g = BinaryForm::new(&f.k, f.c[..=top].to_vec());
    Ok((s, g, f.c[top].clone()))
}

/// Closed point of P^1: an irreducible binary form, normalized so its leading `X0` coefficient
/// is 1, or the point `X1` (stored as coefficients `[1, 0]`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointOnP1 {
    form: BinaryForm,
}

impl fmt::Display for PointOnP1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.form)
    }
}

/// Residue field data of a point: the field, the root in the affine chart, and the chart.
#[derive(Clone, Debug)]
pub struct Residue {
    pub field: Field,
    /// Root of the point's equation in its chart coordinate.
    pub root: Elem,
    pub at_infinity: bool,
}

impl PointOnP1 {
    pub fn infinity(k: &Field) -> PointOnP1 {
        PointOnP1 {
            form: BinaryForm::new(k, vec![k.one(), k.zero()]),
        }
    }

    /// Point given by a monic irreducible polynomial in `X = X0/X1`. Irreducibility is the caller's duty.
    pub fn finite(p: &Poly) -> PointOnP1 {
        let p = p.monic();
        let d = p.deg().expect("nonzero polynomial");
        PointOnP1 {
            form: BinaryForm::from_poly(&p, d),
        }
    }

    /// The rational point `(u : v)`, i.e. the form `v X0 - u X1` normalized.
    pub fn rational(k: &Field, u: &Elem, v: &Elem) -> Result<PointOnP1> {
        if k.is_zero(v) {
            if k.is_zero(u) {
                return Err(Error::ZeroPoint);
            }
            return Ok(PointOnP1::infinity(k));
        }
        let a = k.div(u, v)?;
        Ok(PointOnP1::finite(&Poly::linear(k, &a)))
    }

    /// Validate and normalize an arbitrary form as a closed point.
    pub fn from_form(f: &BinaryForm) -> Result<PointOnP1> {
        let k = f.field();
        let (s, g, _) = form_split(f)?;
        if s > 0 {
            if f.degree() == 1 {
                return Ok(PointOnP1::infinity(k));
            }
            return Err(Error::InvalidInput("form is not irreducible".into()));
        }
        let p = g.dehomogenize();
        let (_, fac) = factor(&p)?;
        if fac.len() != 1 || fac[0].1 != 1 {
            return Err(Error::InvalidInput("form is not irreducible".into()));
        }
        Ok(PointOnP1::finite(&p))
    }

    pub fn field(&self) -> &Field {
        self.form.field()
    }
    pub fn form(&self) -> &BinaryForm {
        &self.form
    }
    pub fn degree(&self) -> usize {
        self.form.degree()
    }
    pub fn is_infinity(&self) -> bool {
        let k = self.form.field();
        self.degree() == 1 && k.is_zero(&self.form.coeffs()[1])
    }

    /// Equation in the chart coordinate (`X` for finite points, `Y` at infinity).
    pub fn chart_poly(&self) -> Poly {
        if self.is_infinity() {
            Poly::x(self.field())
        } else {
            self.form.dehomogenize()
        }
    }

    /// Coordinates `(a, b)` when the point is rational.
    pub fn rational_coords(&self) -> Option<(Elem, Elem)> {
        let k = self.field();
        if self.is_infinity() {
            return Some((k.one(), k.zero()));
        }
        if self.degree() == 1 {
            return Some((k.neg(&self.form.coeffs()[0]), k.one()));
        }
        None
    }

    /// Residue field and root. Degree-one points use the base field itself.
    pub fn residue(&self) -> Residue {
        let k = self.field();
        if self.is_infinity() {
            return Residue {
                field: k.clone(),
                root: k.zero(),
                at_infinity: true,
            };
        }
        if self.degree() == 1 {
            return Residue {
                field: k.clone(),
                root: k.neg(&self.form.coeffs()[0]),
                at_infinity: false,
            };
        }
        let ext = Field::extension_unchecked(k, self.form.coeffs().to_vec());
        let root = ext.generator();
        Residue {
            field: ext,
            root,
            at_infinity: false,
        }
    }

    pub fn cmp_canonical(&self, o: &PointOnP1) -> Ordering {
        let k = self.field();
        self.degree().cmp(&o.degree()).then_with(|| {
            for (a, b) in self.form.coeffs().iter().zip(o.form.coeffs()) {
                match k.cmp(a, b) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.form
                .coeffs()
                .iter()
                .map(|a| self.field().to_json(a))
                .collect(),
        )
    }

    /// Read a point from its coefficient array (`c_0..c_d` of the form).
    pub fn from_json(k: &Field, v: &Value) -> Result<PointOnP1> {
        let arr = match v {
            Value::Array(a) => a.clone(),
            Value::Object(_) => v
                .get("coeffs")
                .and_then(|c| c.as_array())
                .cloned()
                .ok_or_else(|| Error::Parse("point needs coefficients".into()))?,
            _ => return Err(Error::Parse("point must be a coefficient array".into())),
        };
        let c: Vec<Elem> = arr.iter().map(|x| k.from_json(x)).collect::<Result<_>>()?;
        if c.len() < 2 {
            return Err(Error::Parse("a point needs degree at least 1".into()));
        }
        PointOnP1::from_form(&BinaryForm::new(k, c))
    }
}

/// The discriminant scheme: distinct points with multiplicities and the leftover unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeS {
    k: Field,
    pub points: Vec<(PointOnP1, usize)>,
    /// `f = unit * prod point^mult`.
    pub unit: Elem,
}

impl SchemeS {
    pub fn new(k: &Field, mut points: Vec<(PointOnP1, usize)>, unit: Elem) -> Result<SchemeS> {
        points.sort_by(|a, b| a.0.cmp_canonical(&b.0));
        for w in points.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidInput("repeated point in scheme".into()));
            }
        }
        if points.iter().any(|(_, m)| *m == 0) || k.is_zero(&unit) {
            return Err(Error::InvalidInput(
                "multiplicities must be positive and the unit nonzero".into(),
            ));
        }
        Ok(SchemeS {
            k: k.clone(),
            points,
            unit,
        })
    }

    pub fn field(&self) -> &Field {
        &self.k
    }

    /// `sum deg(point) * mult`
    pub fn degree(&self) -> usize {
        self.points.iter().map(|(p, m)| p.degree() * m).sum()
    }

    pub fn is_reduced(&self) -> bool {
        self.points.iter().all(|(_, m)| *m == 1)
    }

    pub fn contains_infinity(&self) -> bool {
        self.points.iter().any(|(p, _)| p.is_infinity())
    }

    /// Same points and multiplicities (the unit is ignored).
    pub fn same_support(&self, o: &SchemeS) -> bool {
        self.points == o.points
    }

    pub fn multiplicity(&self, p: &PointOnP1) -> usize {
        self.points
            .iter()
            .find(|(q, _)| q == p)
            .map_or(0, |(_, m)| *m)
    }

    pub fn to_form(&self) -> BinaryForm {
        let mut f = BinaryForm::new(&self.k, vec![self.unit.clone()]);
        for (p, m) in &self.points {
            f = f.mul(&p.form().pow(*m));
        }
        f
    }

    pub fn to_json(&self) -> Value {
        json!({
            "field": self.k.descriptor(),
            "unit": self.k.to_json(&self.unit),
            "points": self.points.iter().map(|(p, m)| json!({
                "point": p.to_json(),
                "degree": p.degree(),
                "multiplicity": m,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(k: &Field, v: &Value) -> Result<SchemeS> {
        let pts = v
            .get("points")
            .and_then(|p| p.as_array())
            .ok_or_else(|| Error::Parse("scheme needs a 'points' array".into()))?;
        let mut points = Vec::new();
        for e in pts {
            let p = PointOnP1::from_json(
                k,
                e.get("point")
                    .ok_or_else(|| Error::Parse("missing 'point'".into()))?,
            )?;
            let m = e
                .get("multiplicity")
                .and_then(|m| m.as_u64())
                .ok_or_else(|| Error::Parse("missing 'multiplicity'".into()))?;
            points.push((p, m as usize));
        }
        let unit = match v.get("unit") {
            Some(u) => k.from_json(u)?,
            None => k.one(),
        };
        SchemeS::new(k, points, unit)
    }
}

/// Factor a nonzero binary form into closed points with multiplicities.
pub fn scheme_of(f: &BinaryForm) -> Result<SchemeS> {
    let (s, g, cf) = form_split(f)?;
    let k = f.field();
    let mut points = Vec::new();
    let p = g.dehomogenize();
    if p.deg().unwrap_or(0) > 0 {
        let (_, fac) = factor(&p)?;
        for (q, m) in fac {
            points.push((PointOnP1::finite(&q), m));
        }
    }
    if s > 0 {
        points.push((PointOnP1::infinity(k), s));
    }
    SchemeS::new(k, points, cf)
}
