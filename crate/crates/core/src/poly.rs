//! Dense univariate polynomials over a [`Field`].

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

/// Polynomial with coefficients constant term first; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    k: Field,
    c: Vec<Elem>,
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut terms = Vec::new();
        for (i, a) in self.c.iter().enumerate().rev() {
            if self.k.is_zero(a) {
                continue;
            }
            let s = self.k.format(a);
            terms.push(match i {
                0 => s,
                1 => format!("({s})*X"),
                _ => format!("({s})*X^{i}"),
            });
        }
        write!(f, "{}", terms.join(" + "))
    }
}

impl Poly {
    pub fn new(k: &Field, mut c: Vec<Elem>) -> Poly {
        while c.last().is_some_and(|x| k.is_zero(x)) {
            c.pop();
        }
        Poly { k: k.clone(), c }
    }

    pub fn from_ints(k: &Field, c: &[i64]) -> Poly {
        Poly::new(k, c.iter().map(|&v| k.from_i64(v)).collect())
    }

    pub fn zero(k: &Field) -> Poly {
        Poly {
            k: k.clone(),
            c: vec![],
        }
    }

    pub fn one(k: &Field) -> Poly {
        Poly::constant(k, k.one())
    }

    pub fn constant(k: &Field, a: Elem) -> Poly {
        Poly::new(k, vec![a])
    }

    pub fn x(k: &Field) -> Poly {
        Poly::new(k, vec![k.zero(), k.one()])
    }

    pub fn monomial(k: &Field, a: Elem, e: usize) -> Poly {
        let mut c = vec![k.zero(); e + 1];
        c[e] = a;
        Poly::new(k, c)
    }

    /// `X - a`
    pub fn linear(k: &Field, a: &Elem) -> Poly {
        Poly::new(k, vec![k.neg(a), k.one()])
    }

    pub fn field(&self) -> &Field {
        &self.k
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<Elem> {
        self.c
    }

    /// Coefficients padded with zeros to length `n`.
    pub fn padded(&self, n: usize) -> Vec<Elem> {
        let mut v = self.c.clone();
        v.resize(n.max(v.len()), self.k.zero());
        v
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.c.get(i).cloned().unwrap_or_else(|| self.k.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.k.is_one(&self.c[0])
    }

    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with `-1` for the zero polynomial.
    pub fn degree_i(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn lead(&self) -> Option<&Elem> {
        self.c.last()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_some_and(|l| self.k.is_one(l))
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let v = (0..n)
            .map(|i| self.k.add(&self.coeff(i), &o.coeff(i)))
            .collect();
        Poly::new(&self.k, v)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let v = (0..n)
            .map(|i| self.k.sub(&self.coeff(i), &o.coeff(i)))
            .collect();
        Poly::new(&self.k, v)
    }

    pub fn neg(&self) -> Poly {
        Poly::new(&self.k, self.c.iter().map(|a| self.k.neg(a)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(&self.k);
        }
        let k = &self.k;
        let mut v = vec![k.zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if k.is_zero(a) {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if k.is_zero(b) {
                    continue;
                }
                v[i + j] = k.add(&v[i + j], &k.mul(a, b));
            }
        }
        Poly::new(k, v)
    }

    pub fn scale(&self, a: &Elem) -> Poly {
        Poly::new(&self.k, self.c.iter().map(|x| self.k.mul(x, a)).collect())
    }

    pub fn shift(&self, e: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![self.k.zero(); e];
        v.extend(self.c.iter().cloned());
        Poly::new(&self.k, v)
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut r = Poly::one(&self.k);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    pub fn divrem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d.deg().ok_or(Error::ZeroInversion)?;
        let k = &self.k;
        let mut r = self.c.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(k), self.clone()));
        }
        let inv = k.inv(d.lead().unwrap())?;
        let mut q = vec![k.zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = k.mul(&r[i], &inv);
            if k.is_zero(&c) {
                continue;
            }
            for (j, b) in d.c.iter().enumerate() {
                r[i - dd + j] = k.sub(&r[i - dd + j], &k.mul(&c, b));
            }
            q[i - dd] = c;
        }
        r.truncate(dd);
        Ok((Poly::new(k, q), Poly::new(k, r)))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divrem(d).expect("nonzero divisor").1
    }

    /// Quotient, asserting exact divisibility.
    pub fn div_exact(&self, d: &Poly) -> Poly {
        let (q, r) = self.divrem(d).expect("nonzero divisor");
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn divides(&self, o: &Poly) -> bool {
        o.divrem(self).map(|(_, r)| r.is_zero()).unwrap_or(false)
    }

    pub fn monic(&self) -> Poly {
        match self.lead() {
            None => self.clone(),
            Some(l) => self.scale(&self.k.inv(l).unwrap()),
        }
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = std::mem::replace(&mut b, r);
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*o = g`, `g` the monic gcd.
    pub fn xgcd(&self, o: &Poly) -> (Poly, Poly, Poly) {
        let k = &self.k;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(k), Poly::zero(k));
        let (mut t0, mut t1) = (Poly::zero(k), Poly::one(k));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).unwrap();
            r0 = std::mem::replace(&mut r1, r);
            let s2 = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s2);
            let t2 = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t2);
        }
        match r0.lead() {
            None => (r0, s0, t0),
            Some(l) => {
                let inv = k.inv(l).unwrap();
                (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
            }
        }
    }

    /// Inverse modulo `m`, if `self` is coprime to `m`.
    pub fn inv_mod(&self, m: &Poly) -> Option<Poly> {
        let (g, s, _) = self.rem(m).xgcd(m);
        if g.is_one() {
            Some(s.rem(m))
        } else {
            None
        }
    }

    pub fn mul_mod(&self, o: &Poly, m: &Poly) -> Poly {
        self.mul(o).rem(m)
    }

    pub fn pow_mod(&self, e: &BigUint, m: &Poly) -> Poly {
        let mut r = Poly::one(&self.k).rem(m);
        let b = self.rem(m);
        for i in (0..e.bits()).rev() {
            r = r.mul_mod(&r, m);
            if e.bit(i) {
                r = r.mul_mod(&b, m);
            }
        }
        r
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero(&self.k);
        }
        let v = self.c[1..]
            .iter()
            .enumerate()
            .map(|(i, a)| self.k.mul(a, &self.k.from_u64(i as u64 + 1)))
            .collect();
        Poly::new(&self.k, v)
    }

    pub fn eval(&self, x: &Elem) -> Elem {
        let k = &self.k;
        self.c
            .iter()
            .rev()
            .fold(k.zero(), |acc, a| k.add(&k.mul(&acc, x), a))
    }

    /// Evaluate at an element of an extension `ext` of the coefficient field.
    pub fn eval_in(&self, ext: &Field, x: &Elem) -> Elem {
        self.c.iter().rev().fold(ext.zero(), |acc, a| {
            ext.add(&ext.mul(&acc, x), &ext.embed_from(&self.k, a))
        })
    }

    /// `self(o(X))`
    pub fn compose(&self, o: &Poly) -> Poly {
        self.c.iter().rev().fold(Poly::zero(&self.k), |acc, a| {
            acc.mul(o).add(&Poly::constant(&self.k, a.clone()))
        })
    }

    /// Coefficients mapped into an extension field of the coefficient field.
    pub fn lift_to(&self, ext: &Field) -> Poly {
        Poly::new(
            ext,
            self.c.iter().map(|a| ext.embed_from(&self.k, a)).collect(),
        )
    }

    /// Coefficients mapped down into a subfield, if they all lie there.
    pub fn descend_to(&self, sub: &Field) -> Option<Poly> {
        let v: Option<Vec<Elem>> = self.c.iter().map(|a| self.k.to_sub(sub, a)).collect();
        v.map(|v| Poly::new(sub, v))
    }

    /// Lexicographic order on coefficient vectors, constant term first.
    pub fn cmp_lex(&self, o: &Poly) -> Ordering {
        for (a, b) in self.c.iter().zip(&o.c) {
            match self.k.cmp(a, b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.c.len().cmp(&o.c.len())
    }

    /// Canonical order used for factor lists: degree, then [`Poly::cmp_lex`].
    pub fn cmp_canonical(&self, o: &Poly) -> Ordering {
        self.c.len().cmp(&o.c.len()).then_with(|| self.cmp_lex(o))
    }

    /// Rabin irreducibility test over a finite field.
    pub fn is_irreducible(&self) -> Result<bool> {
        let d = self.deg().ok_or(Error::ZeroPolynomial)?;
        if d == 0 {
            return Ok(false);
        }
        if d == 1 {
            return Ok(true);
        }
        let q = self
            .k
            .order()
            .cloned()
            .ok_or_else(|| Error::Unsupported("Rabin test needs a finite field".into()))?;
        let f = self.monic();
        let x = Poly::x(&self.k);
        let mut frob = vec![x.rem(&f)];
        for _ in 0..d {
            let next = frob.last().unwrap().pow_mod(&q, &f);
            frob.push(next);
        }
        if frob[d] != x.rem(&f) {
            return Ok(false);
        }
        for r in prime_divisors(d) {
            let h = frob[d / r].sub(&x);
            if !h.gcd(&f).is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub(crate) fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_and_gcd() {
        let q = Field::rational();
        let a = Poly::from_ints(&q, &[-1, 0, 1]);
        let b = Poly::from_ints(&q, &[-1, 1]);
        let (qq, r) = a.divrem(&b).unwrap();
        assert!(r.is_zero());
        assert_eq!(qq, Poly::from_ints(&q, &[1, 1]));
        assert_eq!(
            a.gcd(&Poly::from_ints(&q, &[1, 1])),
            Poly::from_ints(&q, &[1, 1])
        );
        let (g, s, t) = a.xgcd(&Poly::from_ints(&q, &[2, 0, 1]));
        assert!(g.is_one());
        assert_eq!(s.mul(&a).add(&t.mul(&Poly::from_ints(&q, &[2, 0, 1]))), g);
    }

    #[test]
    fn irreducibility() {
        let f3 = Field::prime(3).unwrap();
        assert!(Poly::from_ints(&f3, &[1, 0, 1]).is_irreducible().unwrap());
        assert!(!Poly::from_ints(&f3, &[2, 0, 1]).is_irreducible().unwrap());
        let f2 = Field::prime(2).unwrap();
        assert!(Poly::from_ints(&f2, &[1, 1, 1, 1, 1])
            .is_irreducible()
            .unwrap());
        assert!(!Poly::from_ints(&f2, &[1, 0, 0, 0, 1])
            .is_irreducible()
            .unwrap());
    }

    #[test]
    fn compose_and_eval() {
        let f5 = Field::prime(5).unwrap();
        let p = Poly::from_ints(&f5, &[1, 2, 3]);
        let o = Poly::from_ints(&f5, &[4, 1]);
        let c = p.compose(&o);
        for x in f5.elements() {
            assert_eq!(c.eval(&x), p.eval(&o.eval(&x)));
        }
    }
}
