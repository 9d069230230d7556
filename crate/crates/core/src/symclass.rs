//! GL-congruence invariants of symmetric pencils in odd characteristic: Jordan splitting of the
//! pencil over the complete local ring at each point of the discriminant.

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::form::PointOnP1;
use crate::matrix::Mat;
use crate::modstruct::{module_type_with_scheme, ModuleType};
use crate::pencil::Pencil;

/// Class of a unit modulo squares: a bit over finite fields (`true` = nonsquare), a squarefree
/// integer over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum UnitClass {
    Finite(bool),
    Rational(BigInt),
}

impl UnitClass {
    fn one(k: &Field) -> UnitClass {
        if k.is_rational() {
            UnitClass::Rational(BigInt::from(1))
        } else {
            UnitClass::Finite(false)
        }
    }

    fn mul(&self, o: &UnitClass) -> Result<UnitClass> {
        Ok(match (self, o) {
            (UnitClass::Finite(a), UnitClass::Finite(b)) => UnitClass::Finite(a ^ b),
            (UnitClass::Rational(a), UnitClass::Rational(b)) => {
                UnitClass::Rational(crate::field::squarefree_part(&(a * b))?)
            }
            _ => {
                return Err(Error::InvalidInput(
                    "mixing unit classes of different fields".into(),
                ))
            }
        })
    }

    pub fn to_json(&self) -> Value {
        match self {
            UnitClass::Finite(b) => json!(u8::from(*b)),
            UnitClass::Rational(d) => json!(d.to_string()),
        }
    }
}

/// Diagonal form `diag(u_j t^(e_j))` at one point; only the parts with `e_j >= 1` are kept.
#[derive(Clone, Debug)]
pub struct LocalSymmetricForm {
    pub point: PointOnP1,
    /// Residue field of the point.
    pub residue: Field,
    /// `(e_j, u_j(0))`, exponents descending.
    pub blocks: Vec<(usize, Elem)>,
}

impl LocalSymmetricForm {
    pub fn exponents(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.0).collect()
    }

    pub fn unit_classes(&self) -> Result<Vec<UnitClass>> {
        self.blocks
            .iter()
            .map(|(_, u)| unit_class(&self.residue, u))
            .collect()
    }
}

fn unit_class(k: &Field, u: &Elem) -> Result<UnitClass> {
    if k.is_rational() {
        Ok(UnitClass::Rational(k.rational_square_class(u)?))
    } else {
        Ok(UnitClass::Finite(k.square_class(u)?))
    }
}

fn check_field(k: &Field) -> Result<()> {
    if k.characteristic() == 2 {
        return Err(Error::CharTwo);
    }
    if !k.is_rational() && !k.is_finite() {
        return Err(Error::Unsupported(format!("field {}", k.descriptor())));
    }
    Ok(())
}

// truncated power series over a field
struct Series<'a> {
    k: &'a Field,
    prec: usize,
}

impl Series<'_> {
    fn val(&self, a: &[Elem]) -> Option<usize> {
        a.iter().position(|x| !self.k.is_zero(x))
    }

    fn mul(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let k = self.k;
        let mut out = vec![k.zero(); self.prec];
        for (i, x) in a.iter().enumerate() {
            if k.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(self.prec - i) {
                out[i + j] = k.add(&out[i + j], &k.mul(x, y));
            }
        }
        out
    }

    fn inv(&self, a: &[Elem]) -> Vec<Elem> {
        let k = self.k;
        let a0 = k.inv(&a[0]).expect("unit series");
        let mut b = vec![k.zero(); self.prec];
        b[0] = a0.clone();
        for i in 1..self.prec {
            let mut s = k.zero();
            for j in 1..=i.min(a.len() - 1) {
                s = k.add(&s, &k.mul(&a[j], &b[i - j]));
            }
            b[i] = k.neg(&k.mul(&s, &a0));
        }
        b
    }

    /// `a / t^v`, padded with zeros (the top `v` coefficients are unknown and never used).
    fn shift_down(&self, a: &[Elem], v: usize) -> Vec<Elem> {
        let mut out: Vec<Elem> = a[v..].to_vec();
        out.resize(self.prec, self.k.zero());
        out
    }

    fn add(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        a.iter().zip(b).map(|(x, y)| self.k.add(x, y)).collect()
    }

    fn sub(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        a.iter().zip(b).map(|(x, y)| self.k.sub(x, y)).collect()
    }
}

/// Jordan splitting of a symmetric pencil at one point of its discriminant scheme.
pub fn local_diagonalize(m: &Pencil, point: &PointOnP1) -> Result<LocalSymmetricForm> {
    check_field(m.field())?;
    if !m.is_symmetric() {
        return Err(Error::PreconditionViolated(
            "pencil is not symmetric".into(),
        ));
    }
    let s = m.scheme()?;
    let mult = s.multiplicity(point);
    if mult == 0 {
        return Err(Error::InvalidInput(
            "point is not on the discriminant scheme".into(),
        ));
    }
    local_diagonalize_at(m, point, mult)
}

fn local_diagonalize_at(m: &Pencil, point: &PointOnP1, mult: usize) -> Result<LocalSymmetricForm> {
    let k = m.field();
    if k.is_rational() && point.degree() > 1 {
        return Err(Error::Unsupported(
            "rational invariants at points of degree > 1".into(),
        ));
    }
    let res = point.residue();
    let kk = res.field.clone();
    let lift = |a: &Mat| if kk == *k { a.clone() } else { a.lift_to(&kk) };
    let (c0, c1) = if res.at_infinity {
        (lift(m.m0()), lift(m.m1()))
    } else {
        let a0 = lift(m.m0());
        (a0.scale(&res.root).add(&lift(m.m1())), a0)
    };
    let prec = mult + 1;
    let ser = Series { k: &kk, prec };
    let r = m.size();
    let mut a: Vec<Vec<Vec<Elem>>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let mut v = vec![kk.zero(); prec];
                    v[0] = c0.get(i, j).clone();
                    v[1] = c1.get(i, j).clone();
                    v
                })
                .collect()
        })
        .collect();
    let mut active: Vec<usize> = (0..r).collect();
    let mut blocks = Vec::new();
    while !active.is_empty() {
        let mut best: Option<(usize, usize, usize)> = None;
        for &i in &active {
            for &j in &active {
                if let Some(v) = ser.val(&a[i][j]) {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, _, _)) = best else {
            return Err(Error::ConventionFailure(
                "local reduction left a block vanishing to full precision".into(),
            ));
        };
        let piv = match active
            .iter()
            .copied()
            .find(|&i| ser.val(&a[i][i]) == Some(v))
        {
            Some(i) => i,
            None => {
                let (_, i, j) = best.unwrap();
                // row_i += row_j, col_i += col_j; the new diagonal entry has valuation v
                for c in 0..r {
                    a[i][c] = ser.add(&a[i][c], &a[j][c]);
                }
                for rr in 0..r {
                    a[rr][i] = ser.add(&a[rr][i], &a[rr][j]);
                }
                i
            }
        };
        let u = ser.shift_down(&a[piv][piv], v);
        let uinv = ser.inv(&u);
        active.retain(|&x| x != piv);
        let cs: Vec<Vec<Elem>> = (0..r).map(|j| ser.shift_down(&a[j][piv], v)).collect();
        for &j in &active {
            for &l in &active {
                // A_jl -= t^v c_j c_l / u
                let t = ser.mul(&ser.mul(&cs[j], &cs[l]), &uinv);
                let mut shifted = vec![kk.zero(); prec];
                for (idx, x) in t.into_iter().enumerate() {
                    if idx + v < prec {
                        shifted[idx + v] = x;
                    }
                }
                a[j][l] = ser.sub(&a[j][l], &shifted);
            }
        }
        if v >= 1 {
            blocks.push((v, u[0].clone()));
        }
    }
    blocks.sort_by(|x, y| y.0.cmp(&x.0));
    Ok(LocalSymmetricForm {
        point: point.clone(),
        residue: kk,
        blocks,
    })
}

/// Invariant of one Jordan constituent: `h` parts equal to `e` with the product of their unit classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockInvariant {
    pub point: PointOnP1,
    pub e: usize,
    pub h: usize,
    pub class: UnitClass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymOrbitInvariant {
    pub module_type: ModuleType,
    pub blocks: Vec<BlockInvariant>,
}

impl SymOrbitInvariant {
    pub fn to_json(&self) -> Value {
        json!({
            "module_type": self.module_type.to_json(),
            "blocks": self.blocks.iter().map(|b| json!({
                "point": b.point.to_json(),
                "e": b.e,
                "h": b.h,
                "disc_class": b.class.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Module type plus the Jordan constituent classes at every point.
pub fn sym_invariant(m: &Pencil) -> Result<SymOrbitInvariant> {
    let k = m.field();
    check_field(k)?;
    if !m.is_symmetric() {
        return Err(Error::PreconditionViolated(
            "pencil is not symmetric".into(),
        ));
    }
    let s = m.scheme()?;
    let t = module_type_with_scheme(m, &s)?;
    let mut blocks = Vec::new();
    for (p, mult) in &s.points {
        let loc = local_diagonalize_at(m, p, *mult)?;
        if Some(loc.exponents().as_slice()) != t.partition_at(p) {
            return Err(Error::ConventionFailure(format!(
                "local exponents {:?} disagree with elementary divisors {:?}",
                loc.exponents(),
                t.partition_at(p)
            )));
        }
        let classes = loc.unit_classes()?;
        let mut i = 0;
        while i < loc.blocks.len() {
            let e = loc.blocks[i].0;
            let mut j = i;
            let mut cls = UnitClass::one(&loc.residue);
            while j < loc.blocks.len() && loc.blocks[j].0 == e {
                cls = cls.mul(&classes[j])?;
                j += 1;
            }
            blocks.push(BlockInvariant {
                point: p.clone(),
                e,
                h: j - i,
                class: cls,
            });
            i = j;
        }
    }
    Ok(SymOrbitInvariant {
        module_type: t,
        blocks,
    })
}

/// GL-congruence of symmetric pencils over finite fields of odd characteristic.
pub fn sym_equivalent(m: &Pencil, m2: &Pencil) -> Result<bool> {
    let k = m.field();
    if k != m2.field() {
        return Err(Error::InvalidInput("pencils over different fields".into()));
    }
    if !k.is_finite() || k.characteristic() == 2 {
        return Err(Error::Unsupported(format!(
            "invariant decision needs a finite field of odd characteristic, got {}",
            k.descriptor()
        )));
    }
    if !m.is_symmetric() || !m2.is_symmetric() {
        return Err(Error::PreconditionViolated(
            "both pencils must be symmetric".into(),
        ));
    }
    if m.size() != m2.size() {
        return Ok(false);
    }
    let (s1, s2) = (m.scheme()?, m2.scheme()?);
    if !s1.same_support(&s2) {
        return Ok(false);
    }
    Ok(sym_invariant(m)? == sym_invariant(m2)?)
}
