//! Exact coefficient fields: Q, prime fields and towers of simple extensions.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::poly::Poly;

/// A field element. Only meaningful together with the [`Field`] it came from.
///
/// Representations are always fully reduced, so derived equality is field equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Elem {
    Rat(BigRational),
    Fp(u64),
    /// Coefficients over the immediate base field, constant first, length = extension degree.
    Ext(Vec<Elem>),
}

#[derive(Debug)]
enum Kind {
    Rational,
    Prime(u64),
    Ext { base: Field, modulus: Vec<Elem> },
}

#[derive(Debug)]
struct Inner {
    kind: Kind,
    order: Option<BigUint>,
    characteristic: u64,
    abs_degree: usize,
    default_modulus: bool,
}

/// Handle to an immutable field description. Cheap to clone and shareable across threads.
#[derive(Clone, Debug)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (&self.0.kind, &other.0.kind) {
            (Kind::Rational, Kind::Rational) => true,
            (Kind::Prime(p), Kind::Prime(q)) => p == q,
            (
                Kind::Ext {
                    base: b1,
                    modulus: m1,
                },
                Kind::Ext {
                    base: b2,
                    modulus: m2,
                },
            ) => b1 == b2 && m1 == m2,
            _ => false,
        }
    }
}
impl Eq for Field {}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.descriptor())
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powm = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulm(r, a);
            }
            a = mulm(a, a);
            e >>= 1;
        }
        r
    };
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powm(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulm(x, x);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

// Small dense polynomial helpers over a base field, used for extension arithmetic.
fn vp_trim(v: &mut Vec<Elem>, k: &Field) {
    while v.last().is_some_and(|c| k.is_zero(c)) {
        v.pop();
    }
}

fn vp_mul(k: &Field, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![k.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if k.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = k.add(&out[i + j], &k.mul(x, y));
        }
    }
    vp_trim(&mut out, k);
    out
}

fn vp_divrem(k: &Field, a: &[Elem], b: &[Elem]) -> (Vec<Elem>, Vec<Elem>) {
    let mut r: Vec<Elem> = a.to_vec();
    vp_trim(&mut r, k);
    let db = b.len() - 1;
    let lc_inv = k.inv(&b[db]).expect("nonzero leading coefficient");
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![k.zero(); r.len() - db];
    while r.len() >= b.len() {
        let shift = r.len() - 1 - db;
        let c = k.mul(r.last().unwrap(), &lc_inv);
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] = k.sub(&r[shift + j], &k.mul(&c, bj));
        }
        q[shift] = c;
        r.pop();
        vp_trim(&mut r, k);
    }
    vp_trim(&mut q, k);
    (q, r)
}

fn vp_sub(k: &Field, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(|| k.zero());
        let y = b.get(i).cloned().unwrap_or_else(|| k.zero());
        out.push(k.sub(&x, &y));
    }
    vp_trim(&mut out, k);
    out
}

/// Inverse of `a` modulo the irreducible `m`, by the extended Euclidean algorithm.
fn vp_inv_mod(k: &Field, a: &[Elem], m: &[Elem]) -> Option<Vec<Elem>> {
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    vp_trim(&mut r1, k);
    let (mut t0, mut t1): (Vec<Elem>, Vec<Elem>) = (vec![], vec![k.one()]);
    while !r1.is_empty() {
        let (q, r) = vp_divrem(k, &r0, &r1);
        let t2 = vp_sub(k, &t0, &vp_mul(k, &q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.len() != 1 {
        return None;
    }
    let c = k.inv(&r0[0]).ok()?;
    Some(t0.iter().map(|x| k.mul(x, &c)).collect())
}

impl Field {
    pub fn rational() -> Field {
        Field(Arc::new(Inner {
            kind: Kind::Rational,
            order: None,
            characteristic: 0,
            abs_degree: 1,
            default_modulus: false,
        }))
    }

    pub fn prime(p: u64) -> Result<Field> {
        if !is_prime_u64(p) || p >= (1u64 << 62) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field(Arc::new(Inner {
            kind: Kind::Prime(p),
            order: Some(BigUint::from(p)),
            characteristic: p,
            abs_degree: 1,
            default_modulus: false,
        })))
    }

    /// Simple extension `base[T]/(modulus)`; the modulus must be monic and irreducible.
    pub fn extension(base: &Field, modulus: Vec<Elem>) -> Result<Field> {
        if modulus.len() < 2 {
            return Err(Error::InvalidModulus("degree must be at least 1".into()));
        }
        if !base.is_one(modulus.last().unwrap()) {
            return Err(Error::InvalidModulus("modulus must be monic".into()));
        }
        let p = Poly::new(base, modulus.clone());
        let irreducible = if base.is_finite() {
            p.is_irreducible()?
        } else if base.is_rational() {
            let (_, fac) = crate::factor::factor(&p)?;
            fac.len() == 1 && fac[0].1 == 1
        } else {
            return Err(Error::Unsupported(
                "irreducibility test over non-prime characteristic-zero fields".into(),
            ));
        };
        if !irreducible {
            return Err(Error::InvalidModulus("modulus is reducible".into()));
        }
        Ok(Self::extension_unchecked(base, modulus))
    }

    /// Extension without the irreducibility check; callers guarantee irreducibility.
    pub fn extension_unchecked(base: &Field, modulus: Vec<Elem>) -> Field {
        let d = modulus.len() - 1;
        let order = base.order().map(|q| q.pow(d as u32));
        Field(Arc::new(Inner {
            kind: Kind::Ext {
                base: base.clone(),
                modulus,
            },
            order,
            characteristic: base.characteristic(),
            abs_degree: base.abs_degree() * d,
            default_modulus: false,
        }))
    }

    /// Extension of degree `d` of a finite field, with the smallest monic irreducible modulus.
    ///
    /// Candidates `T^d + c_{d-1}T^{d-1} + ... + c_0` are scanned by increasing `sum c_i q^i`.
    pub fn default_extension(base: &Field, d: usize) -> Result<Field> {
        let q = base.size().ok_or_else(|| {
            Error::Unsupported("default extensions exist only over finite fields".into())
        })?;
        if d == 0 {
            return Err(Error::InvalidModulus("degree must be at least 1".into()));
        }
        let total = (q as u128)
            .checked_pow(d as u32)
            .ok_or_else(|| Error::InstanceTooLarge("extension search".into()))?;
        for idx in 0..total {
            let mut coeffs = Vec::with_capacity(d + 1);
            let mut rest = idx;
            for _ in 0..d {
                coeffs.push(base.from_index((rest % q as u128) as u64));
                rest /= q as u128;
            }
            coeffs.push(base.one());
            if d > 1 && base.is_zero(&coeffs[0]) {
                continue;
            }
            if Poly::new(base, coeffs.clone()).is_irreducible()? {
                let f = Self::extension_unchecked(base, coeffs);
                let mut inner = Arc::try_unwrap(f.0).expect("fresh field");
                inner.default_modulus = true;
                return Ok(Field(Arc::new(inner)));
            }
        }
        Err(Error::InvalidModulus(
            "no irreducible polynomial found".into(),
        ))
    }

    /// `F_{p^d}` with the default modulus; `d = 1` gives the prime field.
    pub fn fq(p: u64, d: usize) -> Result<Field> {
        let fp = Field::prime(p)?;
        if d == 1 {
            Ok(fp)
        } else {
            Field::default_extension(&fp, d)
        }
    }

    /// Parse `q`, `fp:<p>`, `fq:<p>:<d>` or `fq:<p>:<d>:<c0,c1,...,1>`.
    pub fn parse(desc: &str) -> Result<Field> {
        let parts: Vec<&str> = desc.trim().split(':').collect();
        let num = |s: &str| -> Result<u64> {
            s.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad integer '{s}' in field descriptor")))
        };
        match parts.as_slice() {
            ["q"] | ["Q"] => Ok(Field::rational()),
            ["fp", p] => Field::prime(num(p)?),
            ["fq", p, d] => Field::fq(num(p)?, num(d)? as usize),
            ["fq", p, d, cs] => {
                let fp = Field::prime(num(p)?)?;
                let d = num(d)? as usize;
                let coeffs: Vec<Elem> = cs
                    .split(',')
                    .map(|c| num(c).map(|v| fp.from_u64(v)))
                    .collect::<Result<_>>()?;
                if coeffs.len() != d + 1 {
                    return Err(Error::InvalidModulus(format!(
                        "expected {} coefficients",
                        d + 1
                    )));
                }
                if d == 1 {
                    return Err(Error::InvalidModulus("use fp:<p> for prime fields".into()));
                }
                Field::extension(&fp, coeffs)
            }
            _ => Err(Error::Parse(format!("unknown field descriptor '{desc}'"))),
        }
    }

    pub fn descriptor(&self) -> String {
        match &self.0.kind {
            Kind::Rational => "q".into(),
            Kind::Prime(p) => format!("fp:{p}"),
            Kind::Ext { base, modulus } => {
                if let Kind::Prime(p) = base.0.kind {
                    let d = modulus.len() - 1;
                    if self.0.default_modulus {
                        format!("fq:{p}:{d}")
                    } else {
                        let cs: Vec<String> =
                            modulus.iter().map(|c| base.index(c).to_string()).collect();
                        format!("fq:{p}:{d}:{}", cs.join(","))
                    }
                } else {
                    let cs: Vec<String> = modulus.iter().map(|c| base.format(c)).collect();
                    format!("ext({};{})", base.descriptor(), cs.join(","))
                }
            }
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.0.kind, Kind::Rational)
    }
    pub fn is_finite(&self) -> bool {
        self.0.order.is_some()
    }
    pub fn is_prime_field(&self) -> bool {
        matches!(self.0.kind, Kind::Prime(_))
    }
    pub fn characteristic(&self) -> u64 {
        self.0.characteristic
    }
    pub fn order(&self) -> Option<&BigUint> {
        self.0.order.as_ref()
    }
    /// Number of elements when finite and below 2^64.
    pub fn size(&self) -> Option<u64> {
        self.0.order.as_ref().and_then(|o| o.to_u64())
    }
    /// Degree over the prime field (1 for Q).
    pub fn abs_degree(&self) -> usize {
        self.0.abs_degree
    }
    /// Degree over the immediate base (1 for Q and prime fields).
    pub fn ext_degree(&self) -> usize {
        match &self.0.kind {
            Kind::Ext { modulus, .. } => modulus.len() - 1,
            _ => 1,
        }
    }
    pub fn base(&self) -> Option<&Field> {
        match &self.0.kind {
            Kind::Ext { base, .. } => Some(base),
            _ => None,
        }
    }
    pub fn modulus(&self) -> Option<&[Elem]> {
        match &self.0.kind {
            Kind::Ext { modulus, .. } => Some(modulus),
            _ => None,
        }
    }
    /// The prime field (or Q) at the bottom of the tower.
    pub fn prime_subfield(&self) -> Field {
        match &self.0.kind {
            Kind::Ext { base, .. } => base.prime_subfield(),
            _ => self.clone(),
        }
    }

    pub fn zero(&self) -> Elem {
        match &self.0.kind {
            Kind::Rational => Elem::Rat(BigRational::zero()),
            Kind::Prime(_) => Elem::Fp(0),
            Kind::Ext { base, modulus } => Elem::Ext(vec![base.zero(); modulus.len() - 1]),
        }
    }

    pub fn one(&self) -> Elem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Elem {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_u64(&self, v: u64) -> Elem {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(&self, v: &BigInt) -> Elem {
        match &self.0.kind {
            Kind::Rational => Elem::Rat(BigRational::from_integer(v.clone())),
            Kind::Prime(p) => {
                let r = v.mod_floor(&BigInt::from(*p));
                Elem::Fp(r.to_u64().unwrap())
            }
            Kind::Ext { base, .. } => self.embed(&base.from_bigint(v)),
        }
    }

    /// Image of a rational number; fails when the denominator vanishes in the field.
    pub fn from_rational(&self, v: &BigRational) -> Result<Elem> {
        match &self.0.kind {
            Kind::Rational => Ok(Elem::Rat(v.clone())),
            _ => {
                let n = self.from_bigint(v.numer());
                let d = self.from_bigint(v.denom());
                self.div(&n, &d)
            }
        }
    }

    /// Embed an element of the immediate base field.
    pub fn embed(&self, a: &Elem) -> Elem {
        match &self.0.kind {
            Kind::Ext { base, modulus } => {
                let mut v = vec![base.zero(); modulus.len() - 1];
                v[0] = a.clone();
                Elem::Ext(v)
            }
            _ => a.clone(),
        }
    }

    /// Embed an element of any field further down the tower.
    pub fn embed_from(&self, sub: &Field, a: &Elem) -> Elem {
        if self == sub {
            return a.clone();
        }
        match &self.0.kind {
            Kind::Ext { base, .. } => self.embed(&base.embed_from(sub, a)),
            _ => panic!("field {} is not below {}", sub, self),
        }
    }

    /// If `a` lies in the immediate base field, return it there.
    pub fn to_base(&self, a: &Elem) -> Option<Elem> {
        match (&self.0.kind, a) {
            (Kind::Ext { base, .. }, Elem::Ext(v)) => {
                if v[1..].iter().all(|c| base.is_zero(c)) {
                    Some(v[0].clone())
                } else {
                    None
                }
            }
            _ => Some(a.clone()),
        }
    }

    /// Descend to a field further down the tower, if `a` lies there.
    pub fn to_sub(&self, sub: &Field, a: &Elem) -> Option<Elem> {
        if self == sub {
            return Some(a.clone());
        }
        let b = self.to_base(a)?;
        self.base()?.to_sub(sub, &b)
    }

    /// The class of T in `base[T]/(modulus)`.
    pub fn generator(&self) -> Elem {
        match &self.0.kind {
            Kind::Ext { base, modulus } => {
                let d = modulus.len() - 1;
                if d == 1 {
                    return Elem::Ext(vec![base.neg(&modulus[0])]);
                }
                let mut v = vec![base.zero(); d];
                v[1] = base.one();
                Elem::Ext(v)
            }
            _ => self.one(),
        }
    }

    /// Build an extension element from coefficients over the immediate base.
    pub fn from_coeffs(&self, coeffs: &[Elem]) -> Elem {
        match &self.0.kind {
            Kind::Ext { base, modulus } => {
                let d = modulus.len() - 1;
                let mut v: Vec<Elem> = coeffs.to_vec();
                vp_trim(&mut v, base);
                if v.len() > d {
                    v = vp_divrem(base, &v, modulus).1;
                }
                v.resize(d, base.zero());
                Elem::Ext(v)
            }
            _ => coeffs.first().cloned().unwrap_or_else(|| self.zero()),
        }
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        match a {
            Elem::Rat(r) => r.is_zero(),
            Elem::Fp(x) => *x == 0,
            Elem::Ext(v) => {
                let base = self.base().expect("extension element");
                v.iter().all(|c| base.is_zero(c))
            }
        }
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (&self.0.kind, a, b) {
            (_, Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x + y),
            (Kind::Prime(p), Elem::Fp(x), Elem::Fp(y)) => {
                let s = *x as u128 + *y as u128;
                Elem::Fp((s % *p as u128) as u64)
            }
            (Kind::Ext { base, .. }, Elem::Ext(x), Elem::Ext(y)) => {
                Elem::Ext(x.iter().zip(y).map(|(s, t)| base.add(s, t)).collect())
            }
            _ => panic!("element/field mismatch in add"),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match (&self.0.kind, a) {
            (_, Elem::Rat(x)) => Elem::Rat(-x),
            (Kind::Prime(p), Elem::Fp(x)) => Elem::Fp(if *x == 0 { 0 } else { p - x }),
            (Kind::Ext { base, .. }, Elem::Ext(x)) => {
                Elem::Ext(x.iter().map(|s| base.neg(s)).collect())
            }
            _ => panic!("element/field mismatch in neg"),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (&self.0.kind, a, b) {
            (_, Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x * y),
            (Kind::Prime(p), Elem::Fp(x), Elem::Fp(y)) => {
                Elem::Fp(((*x as u128 * *y as u128) % *p as u128) as u64)
            }
            (Kind::Ext { base, modulus }, Elem::Ext(x), Elem::Ext(y)) => {
                let d = modulus.len() - 1;
                let prod = vp_mul(base, x, y);
                let mut r = if prod.len() > d {
                    vp_divrem(base, &prod, modulus).1
                } else {
                    prod
                };
                r.resize(d, base.zero());
                Elem::Ext(r)
            }
            _ => panic!("element/field mismatch in mul"),
        }
    }

    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        if self.is_zero(a) {
            return Err(Error::ZeroInversion);
        }
        Ok(match (&self.0.kind, a) {
            (_, Elem::Rat(x)) => Elem::Rat(x.recip()),
            (Kind::Prime(p), Elem::Fp(x)) => {
                let (mut t, mut nt) = (0i128, 1i128);
                let (mut r, mut nr) = (*p as i128, *x as i128);
                while nr != 0 {
                    let q = r / nr;
                    (t, nt) = (nt, t - q * nt);
                    (r, nr) = (nr, r - q * nr);
                }
                Elem::Fp(t.rem_euclid(*p as i128) as u64)
            }
            (Kind::Ext { base, modulus }, Elem::Ext(x)) => {
                let d = modulus.len() - 1;
                let mut v = vp_inv_mod(base, x, modulus).ok_or(Error::ZeroInversion)?;
                v.resize(d, base.zero());
                Elem::Ext(v)
            }
            _ => panic!("element/field mismatch in inv"),
        })
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Elem, mut e: u64) -> Elem {
        let mut base = a.clone();
        let mut r = self.one();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        r
    }

    pub fn pow_big(&self, a: &Elem, e: &BigUint) -> Elem {
        let mut r = self.one();
        let bits = e.bits();
        for i in (0..bits).rev() {
            r = self.mul(&r, &r);
            if e.bit(i) {
                r = self.mul(&r, a);
            }
        }
        r
    }

    /// Signed power; negative exponents need a unit.
    pub fn powi(&self, a: &Elem, e: i64) -> Result<Elem> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(&self.inv(a)?, e.unsigned_abs()))
        }
    }

    /// Total order: Q by value, finite fields by [`Field::index`].
    pub fn cmp(&self, a: &Elem, b: &Elem) -> Ordering {
        match (&self.0.kind, a, b) {
            (_, Elem::Rat(x), Elem::Rat(y)) => x.cmp(y),
            (_, Elem::Fp(x), Elem::Fp(y)) => x.cmp(y),
            (Kind::Ext { base, .. }, Elem::Ext(x), Elem::Ext(y)) => {
                for (s, t) in x.iter().zip(y).rev() {
                    match base.cmp(s, t) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            }
            _ => panic!("element/field mismatch in cmp"),
        }
    }

    /// Index of a finite-field element: residue value, or `sum index(c_i) |base|^i` for extensions.
    pub fn index(&self, a: &Elem) -> u64 {
        match (&self.0.kind, a) {
            (Kind::Prime(_), Elem::Fp(x)) => *x,
            (Kind::Ext { base, .. }, Elem::Ext(v)) => {
                let q = base.size().expect("finite field");
                v.iter().rev().fold(0u64, |acc, c| acc * q + base.index(c))
            }
            _ => panic!("index is defined for finite fields only"),
        }
    }

    pub fn from_index(&self, mut i: u64) -> Elem {
        match &self.0.kind {
            Kind::Prime(p) => Elem::Fp(i % p),
            Kind::Ext { base, modulus } => {
                let q = base.size().expect("finite field");
                let mut v = Vec::with_capacity(modulus.len() - 1);
                for _ in 0..modulus.len() - 1 {
                    v.push(base.from_index(i % q));
                    i /= q;
                }
                Elem::Ext(v)
            }
            Kind::Rational => panic!("from_index on Q"),
        }
    }

    /// All elements in index order (finite fields only).
    pub fn elements(&self) -> Vec<Elem> {
        let q = self.size().expect("finite field");
        (0..q).map(|i| self.from_index(i)).collect()
    }

    /// Nonzero elements in index order.
    pub fn units(&self) -> Vec<Elem> {
        let q = self.size().expect("finite field");
        (1..q).map(|i| self.from_index(i)).collect()
    }

    /// Square class over a finite field of odd characteristic: `false` = square, `true` = nonsquare.
    pub fn square_class(&self, a: &Elem) -> Result<bool> {
        if self.is_zero(a) {
            return Err(Error::ZeroInput);
        }
        let q = match self.order() {
            Some(q) if self.characteristic() != 2 => q.clone(),
            _ => {
                return Err(Error::WrongCharacteristic(
                    "square classes need a finite field of odd characteristic".into(),
                ))
            }
        };
        let e = (q - 1u32) / 2u32;
        Ok(!self.is_one(&self.pow_big(a, &e)))
    }

    /// Whether `a` is a square. Finite fields and Q only.
    pub fn is_square(&self, a: &Elem) -> Result<bool> {
        if self.is_zero(a) {
            return Ok(true);
        }
        if self.is_finite() {
            if self.characteristic() == 2 {
                return Ok(true);
            }
            return Ok(!self.square_class(a)?);
        }
        match a {
            Elem::Rat(_) => Ok(self.sqrt(a)?.is_some()),
            _ => Err(Error::Unsupported("square test over number fields".into())),
        }
    }

    /// A square root, if one exists. Finite fields and Q only.
    pub fn sqrt(&self, a: &Elem) -> Result<Option<Elem>> {
        if self.is_zero(a) {
            return Ok(Some(self.zero()));
        }
        if let Elem::Rat(r) = a {
            if r.is_negative() {
                return Ok(None);
            }
            let (n, d) = (r.numer(), r.denom());
            let (sn, sd) = (n.sqrt(), d.sqrt());
            if &(&sn * &sn) == n && &(&sd * &sd) == d {
                return Ok(Some(Elem::Rat(BigRational::new(sn, sd))));
            }
            return Ok(None);
        }
        let q = match self.order() {
            Some(q) => q.clone(),
            None => return Err(Error::Unsupported("square roots over number fields".into())),
        };
        if self.characteristic() == 2 {
            return Ok(Some(self.pow_big(a, &(q / 2u32))));
        }
        if self.square_class(a)? {
            return Ok(None);
        }
        // Tonelli-Shanks
        let qm1 = &q - 1u32;
        let s = qm1.trailing_zeros().unwrap();
        let t = &qm1 >> s;
        let z = (1..self.size().unwrap_or(u64::MAX))
            .map(|i| self.from_index(i))
            .find(|z| self.square_class(z).unwrap())
            .expect("nonresidue exists");
        let mut m = s;
        let mut c = self.pow_big(&z, &t);
        let mut tt = self.pow_big(a, &t);
        let mut r = self.pow_big(a, &((&t + 1u32) / 2u32));
        while !self.is_one(&tt) {
            let mut i = 0;
            let mut x = tt.clone();
            while !self.is_one(&x) {
                x = self.mul(&x, &x);
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = self.mul(&b, &b);
            }
            m = i;
            c = self.mul(&b, &b);
            tt = self.mul(&tt, &c);
            r = self.mul(&r, &b);
        }
        Ok(Some(r))
    }

    /// Norm to the immediate base field: determinant of multiplication by `a`.
    pub fn ext_norm(&self, a: &Elem) -> Result<Elem> {
        let base = match self.base() {
            Some(b) => b.clone(),
            None => {
                return Err(Error::InvalidInput(
                    "ext_norm needs an extension field".into(),
                ))
            }
        };
        let d = self.ext_degree();
        let mut rows = Vec::with_capacity(d);
        let mut x = a.clone();
        let t = self.generator();
        for _ in 0..d {
            match &x {
                Elem::Ext(v) => rows.push(v.clone()),
                _ => unreachable!(),
            }
            x = self.mul(&x, &t);
        }
        Ok(crate::matrix::Mat::from_rows(&base, rows).det())
    }

    /// Norm all the way down to the prime field (or Q).
    pub fn abs_norm(&self, a: &Elem) -> Elem {
        match self.base() {
            None => a.clone(),
            Some(b) => b.abs_norm(&self.ext_norm(a).unwrap()),
        }
    }

    /// Norm from `self` down to the subfield `sub` of the tower.
    pub fn norm_to(&self, sub: &Field, a: &Elem) -> Elem {
        if self == sub {
            return a.clone();
        }
        let b = self.base().expect("subfield lies in the tower");
        b.norm_to(sub, &self.ext_norm(a).unwrap())
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        match &self.0.kind {
            Kind::Rational => {
                let n: i64 = rng.gen_range(-10..=10);
                let d: i64 = rng.gen_range(1..=10);
                Elem::Rat(BigRational::new(n.into(), d.into()))
            }
            Kind::Prime(p) => Elem::Fp(rng.gen_range(0..*p)),
            Kind::Ext { base, modulus } => {
                Elem::Ext((0..modulus.len() - 1).map(|_| base.random(rng)).collect())
            }
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        loop {
            let a = self.random(rng);
            if !self.is_zero(&a) {
                return a;
            }
        }
    }

    /// Human readable element: `p/q` over Q, residues, or `[c0,c1,..]` for extensions.
    pub fn format(&self, a: &Elem) -> String {
        match a {
            Elem::Rat(r) => {
                if r.is_integer() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Elem::Fp(x) => x.to_string(),
            Elem::Ext(v) => {
                let base = self.base().unwrap();
                let parts: Vec<String> = v.iter().map(|c| base.format(c)).collect();
                format!("[{}]", parts.join(","))
            }
        }
    }

    pub fn to_json(&self, a: &Elem) -> Value {
        match a {
            Elem::Rat(_) => Value::String(self.format(a)),
            Elem::Fp(x) => Value::from(*x),
            Elem::Ext(v) => {
                let base = self.base().unwrap();
                Value::Array(v.iter().map(|c| base.to_json(c)).collect())
            }
        }
    }

    pub fn from_json(&self, v: &Value) -> Result<Elem> {
        match v {
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(self.from_i64(i))
                } else if let Some(u) = n.as_u64() {
                    Ok(self.from_u64(u))
                } else {
                    Err(Error::Parse(format!(
                        "non-integer number {n}; use a \"p/q\" string"
                    )))
                }
            }
            Value::String(s) => {
                let r = parse_rational(s)?;
                self.from_rational(&r)
            }
            Value::Array(items) => {
                let base = self.base().ok_or_else(|| {
                    Error::Parse("coefficient arrays need an extension field".into())
                })?;
                if items.len() > self.ext_degree() {
                    return Err(Error::Parse(
                        "too many coefficients for the extension degree".into(),
                    ));
                }
                let cs: Vec<Elem> = items
                    .iter()
                    .map(|x| base.from_json(x))
                    .collect::<Result<_>>()?;
                Ok(self.from_coeffs(&cs))
            }
            _ => Err(Error::Parse(format!(
                "cannot read a field element from {v}"
            ))),
        }
    }

    /// Square class of a nonzero rational as a squarefree integer.
    pub fn rational_square_class(&self, a: &Elem) -> Result<BigInt> {
        match a {
            Elem::Rat(r) if !r.is_zero() => {
                let prod = r.numer() * r.denom();
                squarefree_part(&prod)
            }
            Elem::Rat(_) => Err(Error::ZeroInput),
            _ => Err(Error::WrongCharacteristic(
                "rational square classes need Q".into(),
            )),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational '{s}'"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(n))
    }
}

/// Squarefree part of a nonzero integer by trial division (sign kept).
pub fn squarefree_part(n: &BigInt) -> Result<BigInt> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut m = n.abs();
    if m.bits() > 80 {
        return Err(Error::Unsupported(
            "square class of a large rational".into(),
        ));
    }
    let mut out = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut e = 0;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &p;
        }
        p += 1;
    }
    out *= m;
    if n.is_negative() {
        out = -out;
    }
    Ok(out)
}
