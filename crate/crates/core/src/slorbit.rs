//! The algebra `L` of functions on the discriminant scheme, its norm, the group
//! `G_S = (k^* x L^*) / {(N(b)^-1, b^2)}` and its action on free symmetric pencils.

use std::collections::{HashMap, HashSet};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::form::{form_split, scheme_of, BinaryForm, PointOnP1, SchemeS};
use crate::matrix::Mat;
use crate::pencil::Pencil;
use crate::poly::Poly;

/// Local factor `k[z]/(q^m)` of `L`, with `z = X0/X1` at finite points and `z = X1/X0` at infinity.
#[derive(Clone, Debug)]
pub struct AlgebraFactor {
    pub point: PointOnP1,
    pub mult: usize,
    /// Equation of the point in the chart coordinate.
    pub q: Poly,
    /// `q^mult`
    pub modulus: Poly,
    pub residue: Field,
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub struct FiniteAlgebra {
    k: Field,
    pub factors: Vec<AlgebraFactor>,
    pub dim: usize,
}

/// Element of `L`: one residue polynomial per factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElem {
    pub comps: Vec<Poly>,
}

/// Representative `(u, alpha)` of an element of `G_S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GsClass {
    pub u: Elem,
    pub alpha: AlgebraElem,
}

pub fn algebra_of(s: &SchemeS) -> FiniteAlgebra {
    let k = s.field().clone();
    let factors: Vec<AlgebraFactor> = s
        .points
        .iter()
        .map(|(p, m)| {
            let q = p.chart_poly();
            AlgebraFactor {
                point: p.clone(),
                mult: *m,
                modulus: q.pow(*m as u64),
                residue: p.residue().field,
                dim: p.degree() * m,
                q,
            }
        })
        .collect();
    let dim = factors.iter().map(|f| f.dim).sum();
    FiniteAlgebra { k, factors, dim }
}

impl FiniteAlgebra {
    pub fn field(&self) -> &Field {
        &self.k
    }

    pub fn one(&self) -> AlgebraElem {
        AlgebraElem {
            comps: self.factors.iter().map(|_| Poly::one(&self.k)).collect(),
        }
    }

    pub fn constant(&self, c: &Elem) -> AlgebraElem {
        AlgebraElem {
            comps: self
                .factors
                .iter()
                .map(|_| Poly::constant(&self.k, c.clone()))
                .collect(),
        }
    }

    /// Image of a polynomial in `X`; only defined when infinity is not on the scheme.
    pub fn from_global(&self, p: &Poly) -> Result<AlgebraElem> {
        if self.factors.iter().any(|f| f.point.is_infinity()) {
            return Err(Error::PreconditionViolated(
                "a global polynomial in X does not describe the factor at infinity".into(),
            ));
        }
        Ok(AlgebraElem {
            comps: self.factors.iter().map(|f| p.rem(&f.modulus)).collect(),
        })
    }

    pub fn reduce(&self, a: &AlgebraElem) -> Result<AlgebraElem> {
        if a.comps.len() != self.factors.len() {
            return Err(Error::SizeMismatch(format!(
                "algebra has {} factors, element has {}",
                self.factors.len(),
                a.comps.len()
            )));
        }
        Ok(AlgebraElem {
            comps: a
                .comps
                .iter()
                .zip(&self.factors)
                .map(|(c, f)| c.rem(&f.modulus))
                .collect(),
        })
    }

    pub fn mul(&self, a: &AlgebraElem, b: &AlgebraElem) -> AlgebraElem {
        AlgebraElem {
            comps: a
                .comps
                .iter()
                .zip(&b.comps)
                .zip(&self.factors)
                .map(|((x, y), f)| x.mul_mod(y, &f.modulus))
                .collect(),
        }
    }

    pub fn inv(&self, a: &AlgebraElem) -> Result<AlgebraElem> {
        let comps = a
            .comps
            .iter()
            .zip(&self.factors)
            .map(|(x, f)| x.inv_mod(&f.modulus).ok_or(Error::NonUnit))
            .collect::<Result<_>>()?;
        Ok(AlgebraElem { comps })
    }

    fn residue_of(&self, i: usize, c: &Poly) -> Elem {
        let f = &self.factors[i];
        let r = c.rem(&f.q);
        if f.q.deg() == Some(1) {
            r.coeff(0)
        } else {
            f.residue.from_coeffs(&r.padded(f.q.deg().unwrap()))
        }
    }

    fn from_residue(&self, i: usize, e: &Elem) -> Poly {
        let f = &self.factors[i];
        if f.q.deg() == Some(1) {
            Poly::constant(&self.k, e.clone())
        } else {
            match e {
                Elem::Ext(c) => Poly::new(&self.k, c.clone()),
                _ => Poly::constant(&self.k, f.residue.to_base(e).expect("residue element")),
            }
        }
    }

    pub fn is_unit(&self, a: &AlgebraElem) -> bool {
        a.comps.len() == self.factors.len()
            && a.comps
                .iter()
                .zip(&self.factors)
                .all(|(c, f)| !c.rem(&f.q).is_zero())
    }

    /// Norm of one component: `N_{k_i/k}(a mod q)^m`.
    pub fn component_norm(&self, i: usize, c: &Poly) -> Elem {
        let f = &self.factors[i];
        let r = self.residue_of(i, c);
        let n = if f.residue == self.k {
            r
        } else {
            f.residue.norm_to(&self.k, &r)
        };
        self.k.pow(&n, f.mult as u64)
    }

    pub fn norm(&self, a: &AlgebraElem) -> Elem {
        (0..self.factors.len()).fold(self.k.one(), |acc, i| {
            self.k.mul(&acc, &self.component_norm(i, &a.comps[i]))
        })
    }

    /// Determinant of multiplication by `a` on `L` in the monomial basis of each factor.
    pub fn norm_regular(&self, a: &AlgebraElem) -> Elem {
        let k = &self.k;
        let mut acc = k.one();
        for (c, f) in a.comps.iter().zip(&self.factors) {
            let d = f.dim;
            let mut m = Mat::zeros(k, d, d);
            for j in 0..d {
                let col = c.mul_mod(&Poly::monomial(k, k.one(), j), &f.modulus);
                for i in 0..d {
                    m.set(i, j, col.coeff(i));
                }
            }
            acc = k.mul(&acc, &m.det());
        }
        acc
    }

    /// Number of elements; `None` over infinite fields or when it overflows.
    pub fn size(&self) -> Option<u64> {
        let q = self.k.size()?;
        q.checked_pow(self.dim as u32)
    }

    /// Element with mixed-radix index (first factor least significant).
    pub fn from_index(&self, mut idx: u64) -> AlgebraElem {
        let q = self.k.size().expect("finite field");
        let comps = self
            .factors
            .iter()
            .map(|f| {
                let c: Vec<Elem> = (0..f.dim)
                    .map(|_| {
                        let d = idx % q;
                        idx /= q;
                        self.k.from_index(d)
                    })
                    .collect();
                Poly::new(&self.k, c)
            })
            .collect();
        AlgebraElem { comps }
    }

    pub fn index(&self, a: &AlgebraElem) -> u64 {
        let q = self.k.size().expect("finite field");
        let mut idx = 0u64;
        let mut w = 1u64;
        for (c, f) in a.comps.iter().zip(&self.factors) {
            for j in 0..f.dim {
                idx += self.k.index(&c.coeff(j)) * w;
                w *= q;
            }
        }
        idx
    }

    pub fn units(&self) -> Result<Vec<AlgebraElem>> {
        let n = self
            .size()
            .ok_or_else(|| Error::Unsupported("enumerating units needs a finite field".into()))?;
        if n > 1 << 24 {
            return Err(Error::InstanceTooLarge(format!("algebra has {n} elements")));
        }
        Ok((0..n)
            .map(|i| self.from_index(i))
            .filter(|a| self.is_unit(a))
            .collect())
    }

    /// All square roots of the unit `g` in factor `i`.
    pub fn sqrt_component(&self, i: usize, g: &Poly) -> Result<Vec<Poly>> {
        let f = &self.factors[i];
        let k = &self.k;
        let gb = self.residue_of(i, g);
        if f.residue.is_zero(&gb) {
            return Err(Error::NonUnit);
        }
        let Some(r0) = f.residue.sqrt(&gb)? else {
            return Ok(vec![]);
        };
        let b0 = self.from_residue(i, &r0);
        let g = g.rem(&f.modulus);
        if k.characteristic() != 2 {
            // Newton iteration converges quadratically in the q-adic topology
            let two = k.from_i64(2);
            let mut b = b0;
            let mut steps = 0;
            while !b.mul_mod(&b, &f.modulus).sub(&g).rem(&f.modulus).is_zero() {
                let den = b.scale(&two).inv_mod(&f.modulus).ok_or(Error::NonUnit)?;
                let corr = b.mul_mod(&b, &f.modulus).sub(&g).mul_mod(&den, &f.modulus);
                b = b.sub(&corr).rem(&f.modulus);
                steps += 1;
                if steps > 2 * f.mult + 4 {
                    return Err(Error::ConventionFailure(
                        "square root iteration did not converge".into(),
                    ));
                }
            }
            let nb = b.neg().rem(&f.modulus);
            return Ok(vec![b, nb]);
        }
        // characteristic 2: lift one q-adic digit at a time
        let d = f.q.deg().unwrap();
        let qn = k
            .size()
            .ok_or_else(|| Error::Unsupported("characteristic 2 needs a finite field".into()))?;
        let digits: Vec<Poly> = (0..qn.pow(d as u32))
            .map(|mut idx| {
                let c: Vec<Elem> = (0..d)
                    .map(|_| {
                        let x = idx % qn;
                        idx /= qn;
                        k.from_index(x)
                    })
                    .collect();
                Poly::new(k, c)
            })
            .collect();
        let mut sols = vec![b0];
        let mut qj = f.q.clone();
        for j in 1..f.mult {
            let qj1 = qj.mul(&f.q);
            let mut next = Vec::new();
            for b in &sols {
                for dgt in &digits {
                    let cand = b.add(&dgt.mul(&qj)).rem(&f.modulus);
                    if cand.mul(&cand).sub(&g).rem(&qj1).is_zero() {
                        next.push(cand);
                    }
                }
            }
            sols = next;
            qj = qj1;
            let _ = j;
        }
        Ok(sols)
    }

    /// Norms `N(b)` of all square roots `b` of the unit `g`, or `None` when `g` is not a square.
    fn root_norms(&self, g: &AlgebraElem) -> Result<Option<HashSet<Elem>>> {
        let k = &self.k;
        let mut acc: HashSet<Elem> = HashSet::from([k.one()]);
        for i in 0..self.factors.len() {
            let roots = self.sqrt_component(i, &g.comps[i])?;
            if roots.is_empty() {
                return Ok(None);
            }
            let norms: HashSet<Elem> = roots.iter().map(|r| self.component_norm(i, r)).collect();
            acc = acc
                .iter()
                .flat_map(|a| norms.iter().map(move |b| k.mul(a, b)))
                .collect();
        }
        Ok(Some(acc))
    }

    pub fn elem_to_json(&self, a: &AlgebraElem) -> Value {
        Value::Array(
            a.comps
                .iter()
                .map(|c| Value::Array(c.coeffs().iter().map(|x| self.k.to_json(x)).collect()))
                .collect(),
        )
    }

    /// One coefficient array per factor, or `{"global": [..]}` for a polynomial in `X`.
    pub fn elem_from_json(&self, v: &Value) -> Result<AlgebraElem> {
        let parse_poly = |c: &Value| -> Result<Poly> {
            let arr = c
                .as_array()
                .ok_or_else(|| Error::Parse("coefficients must be an array".into()))?;
            let cs = arr
                .iter()
                .map(|x| self.k.from_json(x))
                .collect::<Result<Vec<_>>>()?;
            Ok(Poly::new(&self.k, cs))
        };
        if let Some(g) = v.get("global") {
            return self.from_global(&parse_poly(g)?);
        }
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Parse("algebra element must be an array of components".into()))?;
        let comps = arr.iter().map(parse_poly).collect::<Result<Vec<_>>>()?;
        self.reduce(&AlgebraElem { comps })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "field": self.k.descriptor(),
            "dim": self.dim,
            "factors": self.factors.iter().map(|f| json!({
                "point": f.point.to_json(),
                "residue_degree": f.point.degree(),
                "nilpotency": f.mult,
            })).collect::<Vec<_>>(),
        })
    }
}

/// `(u, a) ~ (u', a')` in `G_S`: some unit `b` has `b^2 = a / a'` and `N(b) = u' / u`.
pub fn gs_equal(l: &FiniteAlgebra, x: &GsClass, y: &GsClass) -> Result<bool> {
    let k = l.field();
    if k.is_zero(&x.u) || k.is_zero(&y.u) || !l.is_unit(&x.alpha) || !l.is_unit(&y.alpha) {
        return Err(Error::NonUnit);
    }
    let g = l.mul(&x.alpha, &l.inv(&y.alpha)?);
    let target = k.div(&y.u, &x.u)?;
    Ok(l.root_norms(&g)?.is_some_and(|s| s.contains(&target)))
}

/// `(-1)^(n(n+1)/2)` for a form of degree `n + 1`.
fn norm_sign(k: &Field, deg: usize) -> Elem {
    let n = deg - 1;
    if (n * (n + 1) / 2).is_multiple_of(2) {
        k.one()
    } else {
        k.from_i64(-1)
    }
}

fn check_scheme(s: &SchemeS, f: &BinaryForm) -> Result<()> {
    let sf = scheme_of(f)?;
    if !sf.same_support(s) {
        return Err(Error::SchemeMismatch);
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct SlCount {
    pub count: usize,
    /// Least `(index u, index alpha)` in each class.
    pub labels: Vec<GsClass>,
    /// Size of `{(u, a) : C_f = (-1)^(n(n+1)/2) u^2 N(a)}`.
    pub solutions: usize,
}

/// Number of SL-orbits of free symmetric pencils with discriminant exactly `f`.
pub fn sl_orbit_count(s: &SchemeS, f: &BinaryForm) -> Result<SlCount> {
    check_scheme(s, f)?;
    let k = s.field();
    if !k.is_finite() {
        return Err(Error::Unsupported(
            "orbit counting needs a finite field; use existence search".into(),
        ));
    }
    let l = algebra_of(s);
    let (_, _, cf) = form_split(f)?;
    let eps = norm_sign(k, f.degree());
    let units = l.units()?;
    let unit_idx: HashMap<u64, usize> = units
        .iter()
        .enumerate()
        .map(|(i, a)| (l.index(a), i))
        .collect();
    let norms: Vec<Elem> = units.iter().map(|a| l.norm(a)).collect();
    let ku = k.units();
    let ku_idx: HashMap<Elem, usize> = ku.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
    let mut sols: Vec<(usize, usize)> = Vec::new();
    for (iu, u) in ku.iter().enumerate() {
        let uu = k.mul(&eps, &k.mul(u, u));
        for (ia, n) in norms.iter().enumerate() {
            if k.mul(&uu, n) == cf {
                sols.push((iu, ia));
            }
        }
    }
    // acting data per b: (index of N(b)^-1 * u, index of b^2 * a) computed lazily
    let act: Vec<(Elem, AlgebraElem)> = units
        .iter()
        .zip(&norms)
        .map(|(b, nb)| (k.inv(nb).unwrap(), l.mul(b, b)))
        .collect();
    let order = |a: &(usize, usize)| (k.index(&ku[a.0]), l.index(&units[a.1]));
    sols.sort_by_key(order);
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut labels = Vec::new();
    for &x in &sols {
        if seen.contains(&x) {
            continue;
        }
        for (nbi, b2) in &act {
            let y = (
                ku_idx[&k.mul(nbi, &ku[x.0])],
                unit_idx[&l.index(&l.mul(b2, &units[x.1]))],
            );
            seen.insert(y);
        }
        labels.push(GsClass {
            u: ku[x.0].clone(),
            alpha: units[x.1].clone(),
        });
    }
    Ok(SlCount {
        count: labels.len(),
        labels,
        solutions: sols.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Existence {
    Witness(GsClass),
    /// Exhaustive search over a finite field found nothing: no free symmetric pencil has this
    /// discriminant.
    None,
    /// No witness within the search bound; says nothing about nonexistence.
    Unknown,
}

/// Search for `(u, a)` with `C_f = (-1)^(n(n+1)/2) u^2 N(a)`. Exact over finite fields; over the
/// rationals, residue coefficients range over integers of absolute value at most `bound`.
pub fn existence_search(s: &SchemeS, f: &BinaryForm, bound: u64) -> Result<Existence> {
    check_scheme(s, f)?;
    let k = s.field();
    let l = algebra_of(s);
    let (_, _, cf) = form_split(f)?;
    let eps = norm_sign(k, f.degree());
    let try_alpha = |a: &AlgebraElem| -> Result<Option<Existence>> {
        if !l.is_unit(a) {
            return Ok(None);
        }
        let n = l.norm(a);
        let target = k.div(&cf, &k.mul(&eps, &n))?;
        Ok(k.sqrt(&target)?.map(|u| {
            Existence::Witness(GsClass {
                u,
                alpha: a.clone(),
            })
        }))
    };
    if k.is_finite() {
        let size = l
            .size()
            .ok_or_else(|| Error::InstanceTooLarge("algebra too large to enumerate".into()))?;
        for i in 0..size {
            if let Some(w) = try_alpha(&l.from_index(i))? {
                return Ok(w);
            }
        }
        return Ok(Existence::None);
    }
    let dims: Vec<usize> = l.factors.iter().map(|f| f.point.degree()).collect();
    let total: usize = dims.iter().sum();
    let vals: Vec<i64> = std::iter::once(0)
        .chain((1..=bound as i64).flat_map(|b| [b, -b]))
        .collect();
    let combos = (vals.len() as f64).powi(total as i32);
    if combos > 5e7 {
        return Err(Error::InstanceTooLarge(format!(
            "{combos:.0} candidates at bound {bound}"
        )));
    }
    let mut digits = vec![0usize; total];
    loop {
        let mut comps = Vec::new();
        let mut pos = 0;
        for &d in &dims {
            comps.push(Poly::new(
                k,
                digits[pos..pos + d]
                    .iter()
                    .map(|&i| k.from_i64(vals[i]))
                    .collect(),
            ));
            pos += d;
        }
        if let Some(w) = try_alpha(&AlgebraElem { comps })? {
            return Ok(w);
        }
        // odometer, last digit fastest
        let mut i = total;
        loop {
            if i == 0 {
                return Ok(Existence::Unknown);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < vals.len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

#[derive(Clone, Debug)]
pub struct Stabilizer {
    pub size: u64,
    /// How the size was obtained: "sign-vectors" or "enumeration".
    pub method: &'static str,
    pub elements: Vec<AlgebraElem>,
}

/// `{b in L^* : b^2 = 1, N(b) = 1}`.
pub fn stabilizer(s: &SchemeS) -> Result<Stabilizer> {
    let l = algebra_of(s);
    let k = s.field();
    if k.characteristic() != 2 {
        // b = +-1 in each factor; N(-1) in factor i is (-1)^dim_i
        let r = l.factors.len();
        let mut elements = Vec::new();
        for mask in 0u64..(1 << r) {
            let parity: usize = (0..r)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| l.factors[i].dim)
                .sum();
            if parity.is_multiple_of(2) {
                let comps = (0..r)
                    .map(|i| {
                        Poly::constant(
                            k,
                            if mask >> i & 1 == 1 {
                                k.from_i64(-1)
                            } else {
                                k.one()
                            },
                        )
                    })
                    .collect();
                elements.push(AlgebraElem { comps });
            }
        }
        let all_even = l.factors.iter().all(|f| f.dim % 2 == 0);
        let size = if all_even { 1u64 << r } else { 1u64 << (r - 1) };
        debug_assert_eq!(size as usize, elements.len());
        return Ok(Stabilizer {
            size,
            method: "sign-vectors",
            elements,
        });
    }
    if !k.is_finite() {
        return Err(Error::Unsupported(
            "characteristic 2 stabilizers need a finite field".into(),
        ));
    }
    let one = l.one();
    let mut per: Vec<Vec<Poly>> = Vec::new();
    for i in 0..l.factors.len() {
        let roots = l.sqrt_component(i, &one.comps[i])?;
        per.push(
            roots
                .into_iter()
                .filter(|r| l.component_norm(i, r) == k.one())
                .collect(),
        );
    }
    // every square root of 1 is 1 modulo q, so its norm is 1 already
    let size: u64 = per.iter().map(|v| v.len() as u64).product();
    let mut elements = Vec::new();
    if size <= 4096 {
        let mut acc: Vec<Vec<Poly>> = vec![vec![]];
        for roots in &per {
            acc = acc
                .iter()
                .flat_map(|pre| {
                    roots
                        .iter()
                        .map(move |r| [pre.clone(), vec![r.clone()]].concat())
                })
                .collect();
        }
        elements = acc.into_iter().map(|comps| AlgebraElem { comps }).collect();
    }
    Ok(Stabilizer {
        size,
        method: "enumeration",
        elements,
    })
}

/// Stabilizer size by scanning all of `L^*`.
pub fn stabilizer_by_enumeration(s: &SchemeS) -> Result<u64> {
    let l = algebra_of(s);
    let one = l.one();
    let k = s.field();
    Ok(l.units()?
        .iter()
        .filter(|b| l.mul(b, b) == one && l.norm(b) == k.one())
        .count() as u64)
}

/// `|G_S| = (q - 1) |stabilizer|`.
pub fn gs_order(s: &SchemeS) -> Result<u64> {
    let q = s
        .field()
        .size()
        .ok_or_else(|| Error::Unsupported("group order needs a finite field".into()))?;
    Ok((q - 1) * stabilizer(s)?.size)
}

/// Carry `a` from the original coordinates to the chart `g`, as a polynomial in the new `X`
/// modulo the new discriminant.
fn transport(
    l: &FiniteAlgebra,
    a: &AlgebraElem,
    g: &crate::pencil::Reparam,
) -> Result<(Poly, Poly)> {
    let k = l.field();
    let mut mods = Vec::new();
    let mut parts = Vec::new();
    for (c, f) in a.comps.iter().zip(&l.factors) {
        let qt = g.apply_form(f.point.form()).dehomogenize();
        if qt.deg() != Some(f.point.degree()) {
            return Err(Error::ConventionFailure(
                "chart change moved a point to infinity".into(),
            ));
        }
        let modulus = qt.monic().pow(f.mult as u64);
        // X0 = a X' + c, X1 = b X' + d
        let x0 = Poly::new(k, vec![g.c.clone(), g.a.clone()]);
        let x1 = Poly::new(k, vec![g.d.clone(), g.b.clone()]);
        let (num, den) = if f.point.is_infinity() {
            (x1, x0)
        } else {
            (x0, x1)
        };
        let z = num.mul_mod(&den.inv_mod(&modulus).ok_or(Error::NonUnit)?, &modulus);
        let mut v = Poly::zero(k);
        for coef in c.coeffs().iter().rev() {
            v = v
                .mul_mod(&z, &modulus)
                .add(&Poly::constant(k, coef.clone()));
        }
        parts.push(v.rem(&modulus));
        mods.push(modulus);
    }
    let big = mods.iter().fold(Poly::one(k), |acc, m| acc.mul(m));
    let mut out = Poly::zero(k);
    for (v, m) in parts.iter().zip(&mods) {
        let co = big.div_exact(m);
        let e = co.inv_mod(m).ok_or(Error::NonUnit)?.mul(&co);
        out = out.add(&v.mul(&e)).rem(&big);
    }
    Ok((out, big))
}

/// Action of `(u, a)` on a free symmetric pencil: `Q = a(N)` with `N = -M0^-1 M1` in a chart where
/// `M0` is invertible, `P = diag(u, 1, ..., 1)`, result `(tP M0 Q P, tP M1 Q P)`.
pub fn gs_act(m: &Pencil, u: &Elem, alpha: &AlgebraElem) -> Result<Pencil> {
    let k = m.field();
    if !m.is_symmetric() {
        return Err(Error::PreconditionViolated(
            "pencil is not symmetric".into(),
        ));
    }
    if !m.is_free()? {
        return Err(Error::PreconditionViolated("pencil is not free".into()));
    }
    let s = m.scheme()?;
    let l = algebra_of(&s);
    let alpha = l.reduce(alpha)?;
    if k.is_zero(u) || !l.is_unit(&alpha) {
        return Err(Error::NonUnit);
    }
    let g = m.chart()?;
    let mt = m.recombine(&g);
    let (at, _) = transport(&l, &alpha, &g)?;
    let nmat = mt.m0().inverse()?.mul(mt.m1()).neg();
    let q = nmat.poly_eval(&at);
    let mut pd = vec![k.one(); m.size()];
    pd[0] = u.clone();
    let p = Mat::diag(k, &pd);
    let want = m.disc().scale(&k.mul(&k.mul(u, u), &l.norm(&alpha)));
    for qq in [q.clone(), q.transpose()] {
        let out = Pencil::new(m.m0().mul(&qq), m.m1().mul(&qq))?.act_unchecked(&p);
        if out.is_symmetric() && out.disc() == want {
            return Ok(out);
        }
    }
    Err(Error::ConventionFailure(
        "neither Q nor its transpose gives a symmetric pencil with the predicted discriminant"
            .into(),
    ))
}
