//! Squarefree decomposition and factorization into irreducibles.
//!
//! Finite fields: distinct-degree then equal-degree splitting (trace map in characteristic 2).
//! Q: squarefree parts, factorization modulo a good prime, Hensel lifting and subset recombination.

use std::cell::Cell;
use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::poly::Poly;

/// Largest degree accepted by rational factorization.
pub const RATIONAL_DEGREE_BOUND: usize = 24;

thread_local! {
    static SPLIT_SEED: Cell<u64> = const { Cell::new(0) };
}

/// Seed for the random splitting in [`factor`] on the current thread.
///
/// Factor lists are sorted canonically, so results never depend on it.
pub fn set_split_seed(seed: u64) {
    SPLIT_SEED.with(|s| s.set(seed));
}

fn split_rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SPLIT_SEED.with(|s| s.get()))
}

/// Factor list: unit and sorted (monic irreducible, multiplicity) pairs.
pub type Factorization = (Elem, Vec<(Poly, usize)>);

/// `f = unit * prod g_i^{m_i}` with `g_i` monic, squarefree, pairwise coprime, `m_i` distinct.
pub fn squarefree_decompose(f: &Poly) -> Result<Vec<(Poly, usize)>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let k = f.field();
    let mut out: BTreeMap<usize, Poly> = BTreeMap::new();
    let m = f.monic();
    if k.characteristic() == 0 {
        yun(&m, &mut out);
    } else {
        sff_char_p(&m, 1, &mut out);
    }
    let mut v: Vec<(Poly, usize)> = out
        .into_iter()
        .filter(|(_, g)| !g.is_one())
        .map(|(e, g)| (g, e))
        .collect();
    v.sort_by_key(|a| a.1);
    Ok(v)
}

fn push_factor(out: &mut BTreeMap<usize, Poly>, g: Poly, e: usize) {
    if g.is_one() {
        return;
    }
    let entry = out.entry(e).or_insert_with(|| Poly::one(g.field()));
    *entry = entry.mul(&g);
}

fn yun(f: &Poly, out: &mut BTreeMap<usize, Poly>) {
    let d = f.derivative();
    let a0 = f.gcd(&d);
    let mut b = f.div_exact(&a0);
    let mut c = d.div_exact(&a0);
    let mut dd = c.sub(&b.derivative());
    let mut i = 1;
    while b.deg().unwrap_or(0) > 0 {
        let a = b.gcd(&dd);
        push_factor(out, a.clone(), i);
        b = b.div_exact(&a);
        c = dd.div_exact(&a);
        dd = c.sub(&b.derivative());
        i += 1;
    }
}

fn sff_char_p(f: &Poly, mult: usize, out: &mut BTreeMap<usize, Poly>) {
    let k = f.field();
    let p = k.characteristic() as usize;
    let mut c = f.gcd(&f.derivative());
    let mut w = f.div_exact(&c);
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.div_exact(&y);
        push_factor(out, fac, i * mult);
        w = y;
        c = c.div_exact(&w);
        i += 1;
    }
    if !c.is_one() {
        let root = pth_root(&c);
        sff_char_p(&root, mult * p, out);
    }
}

/// `g` with `g^p = f`, for `f` a polynomial in `X^p` over a finite field.
fn pth_root(f: &Poly) -> Poly {
    let k = f.field();
    let p = k.characteristic() as usize;
    let q = k.order().unwrap().clone();
    let e = q / BigUint::from(p);
    let n = f.coeffs().len();
    let v: Vec<Elem> = (0..n)
        .step_by(p)
        .map(|i| k.pow_big(&f.coeffs()[i], &e))
        .collect();
    Poly::new(k, v)
}

/// Full factorization. Finite fields, Q (degree at most [`RATIONAL_DEGREE_BOUND`]).
pub fn factor(f: &Poly) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let k = f.field();
    let unit = f.lead().unwrap().clone();
    let mut out: Vec<(Poly, usize)> = Vec::new();
    if k.is_finite() {
        let mut rng = split_rng();
        for (g, m) in squarefree_decompose(f)? {
            for h in factor_squarefree_finite(&g, &mut rng) {
                out.push((h, m));
            }
        }
    } else if k.is_rational() {
        let d = f.deg().unwrap();
        if d > RATIONAL_DEGREE_BOUND {
            return Err(Error::DegreeBoundExceeded {
                degree: d,
                bound: RATIONAL_DEGREE_BOUND,
            });
        }
        for (g, m) in squarefree_decompose(f)? {
            for h in factor_squarefree_rational(&g)? {
                out.push((h, m));
            }
        }
    } else {
        return Err(Error::Unsupported(
            "factorization over number fields".into(),
        ));
    }
    out.sort_by(|a, b| a.0.cmp_canonical(&b.0).then(a.1.cmp(&b.1)));
    Ok((unit, out))
}

/// Distinct-degree factorization of a monic squarefree polynomial: (product, degree) pairs.
pub fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let k = f.field();
    let q = k.order().unwrap().clone();
    let x = Poly::x(k);
    let mut rest = f.clone();
    let mut h = x.rem(&rest);
    let mut out = Vec::new();
    let mut i = 1;
    while rest.deg().unwrap_or(0) >= 2 * i {
        h = h.pow_mod(&q, &rest);
        let g = h.sub(&x).gcd(&rest);
        if !g.is_one() {
            rest = rest.div_exact(&g);
            h = h.rem(&rest);
            out.push((g, i));
        }
        i += 1;
    }
    if rest.deg().unwrap_or(0) > 0 {
        let d = rest.deg().unwrap();
        out.push((rest, d));
    }
    out
}

/// Equal-degree splitting of a monic squarefree product of degree-`d` irreducibles.
pub fn equal_degree<R: Rng>(f: &Poly, d: usize, rng: &mut R) -> Vec<Poly> {
    let n = f.deg().unwrap();
    if n == d {
        return vec![f.clone()];
    }
    let k = f.field();
    let q = k.order().unwrap().clone();
    loop {
        let a = Poly::new(k, (0..n).map(|_| k.random(rng)).collect());
        if a.deg().unwrap_or(0) == 0 {
            continue;
        }
        let g0 = a.gcd(f);
        let candidate = if !g0.is_one() {
            g0
        } else if k.characteristic() == 2 {
            // absolute trace of a over F_{q^d}
            let m = k.abs_degree() * d;
            let mut t = a.rem(f);
            let mut s = t.clone();
            for _ in 1..m {
                t = t.mul_mod(&t, f);
                s = s.add(&t);
            }
            s.gcd(f)
        } else {
            let e = (q.pow(d as u32) - 1u32) / 2u32;
            a.pow_mod(&e, f).sub(&Poly::one(k)).gcd(f)
        };
        let cd = candidate.deg().unwrap_or(0);
        if cd > 0 && cd < n {
            let other = f.div_exact(&candidate);
            let mut out = equal_degree(&candidate, d, rng);
            out.extend(equal_degree(&other, d, rng));
            return out;
        }
    }
}

fn factor_squarefree_finite<R: Rng>(f: &Poly, rng: &mut R) -> Vec<Poly> {
    let mut out = Vec::new();
    for (g, d) in distinct_degree(&f.monic()) {
        out.extend(equal_degree(&g, d, rng));
    }
    out
}

// ---------------------------------------------------------------- integer polynomials

type ZPoly = Vec<BigInt>;

fn z_trim(v: &mut ZPoly) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn z_mul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    z_trim(&mut out);
    out
}

fn z_sub(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let n = a.len().max(b.len());
    let mut out: ZPoly = (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
        .collect();
    z_trim(&mut out);
    out
}

fn z_mod(a: &ZPoly, m: &BigInt) -> ZPoly {
    let mut v: ZPoly = a.iter().map(|c| c.mod_floor(m)).collect();
    z_trim(&mut v);
    v
}

fn z_symmetric(a: &ZPoly, m: &BigInt) -> ZPoly {
    let half = m / 2;
    let mut v: ZPoly = a
        .iter()
        .map(|c| {
            let r = c.mod_floor(m);
            if r > half {
                r - m
            } else {
                r
            }
        })
        .collect();
    z_trim(&mut v);
    v
}

fn z_content(a: &ZPoly) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn z_primitive(a: &ZPoly) -> ZPoly {
    let c = z_content(a);
    let mut v: ZPoly = a.iter().map(|x| x / &c).collect();
    if v.last().is_some_and(|l| l.is_negative()) {
        v = v.into_iter().map(|x| -x).collect();
    }
    v
}

/// Exact division over Z, or None.
fn z_divide(a: &ZPoly, b: &ZPoly) -> Option<ZPoly> {
    let db = b.len() - 1;
    let lb = b.last().unwrap();
    let mut r = a.clone();
    if r.len() < b.len() {
        return if r.is_empty() { Some(vec![]) } else { None };
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for i in (db..r.len()).rev() {
        if r[i].is_zero() {
            continue;
        }
        let (qq, rr) = r[i].div_rem(lb);
        if !rr.is_zero() {
            return None;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i - db + j] -= &qq * bj;
        }
        q[i - db] = qq;
    }
    if r.iter().any(|c| !c.is_zero()) {
        return None;
    }
    z_trim(&mut q);
    Some(q)
}

fn to_fp(a: &ZPoly, fp: &Field) -> Poly {
    Poly::new(fp, a.iter().map(|c| fp.from_bigint(c)).collect())
}

fn from_fp(a: &Poly) -> ZPoly {
    a.coeffs()
        .iter()
        .map(|c| BigInt::from(a.field().index(c)))
        .collect()
}

/// Lift `f ≡ a*b (mod p)` (all monic) to `f ≡ A*B (mod p^k)`.
fn hensel_pair(f: &ZPoly, a: &Poly, b: &Poly, p: &BigInt, k: u32) -> (ZPoly, ZPoly) {
    let fp = a.field();
    let (g, s, t) = a.xgcd(b);
    debug_assert!(g.is_one());
    let mut big_a = from_fp(a);
    let mut big_b = from_fp(b);
    let mut pj = p.clone();
    for _ in 1..k {
        let pj1 = &pj * p;
        let diff = z_mod(&z_sub(f, &z_mul(&big_a, &big_b)), &pj1);
        let e: ZPoly = diff.iter().map(|c| c / &pj).collect();
        let e = to_fp(&e, fp);
        let tau = e.mul(&t).rem(a);
        let sigma = e.mul(&s).rem(b);
        let add = |x: &ZPoly, y: &Poly| -> ZPoly {
            let yz = from_fp(y);
            let n = x.len().max(yz.len());
            let mut v: ZPoly = (0..n)
                .map(|i| {
                    x.get(i).cloned().unwrap_or_default()
                        + &pj * yz.get(i).cloned().unwrap_or_default()
                })
                .collect();
            v = z_mod(&v, &pj1);
            v
        };
        big_a = add(&big_a, &tau);
        big_b = add(&big_b, &sigma);
        pj = pj1;
    }
    (big_a, big_b)
}

fn hensel_multi(f: &ZPoly, facs: &[Poly], p: &BigInt, k: u32) -> Vec<ZPoly> {
    if facs.len() == 1 {
        return vec![f.clone()];
    }
    let fp = facs[0].field();
    let mid = facs.len() / 2;
    let a = facs[..mid].iter().fold(Poly::one(fp), |acc, x| acc.mul(x));
    let b = facs[mid..].iter().fold(Poly::one(fp), |acc, x| acc.mul(x));
    let (big_a, big_b) = hensel_pair(f, &a, &b, p, k);
    let mut out = hensel_multi(&big_a, &facs[..mid], p, k);
    out.extend(hensel_multi(&big_b, &facs[mid..], p, k));
    out
}

fn next_prime(mut n: u64) -> u64 {
    loop {
        n += 1;
        if Field::prime(n).is_ok() {
            return n;
        }
    }
}

fn combinations(n: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if s > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..s).collect();
    loop {
        out.push(idx.clone());
        let mut i = s;
        while i > 0 && idx[i - 1] == n - s + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..s {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Irreducible factors over Z of a primitive squarefree integer polynomial.
fn factor_squarefree_int(g: &ZPoly) -> Vec<ZPoly> {
    let d = g.len() - 1;
    if d <= 1 {
        return vec![g.clone()];
    }
    let lc = g.last().unwrap().clone();
    let mut p = 2u64;
    let (fp, modp) = loop {
        p = next_prime(p);
        let pb = BigInt::from(p);
        if (&lc % &pb).is_zero() {
            continue;
        }
        let fp = Field::prime(p).unwrap();
        let gp = to_fp(g, &fp);
        if gp.gcd(&gp.derivative()).is_one() {
            break (fp, gp);
        }
    };
    let mut rng = split_rng();
    let mut local = factor_squarefree_finite(&modp, &mut rng);
    if local.len() == 1 {
        return vec![g.clone()];
    }
    local.sort_by(|a, b| a.cmp_canonical(b));
    // coefficient bound for lc * (monic factor lifts)
    let norm2: BigInt = g.iter().map(|c| c * c).sum::<BigInt>().sqrt() + 1;
    let bound = BigInt::from(2) * lc.abs() * (BigInt::one() << d) * norm2;
    let pb = BigInt::from(p);
    let mut k = 1u32;
    let mut pk = pb.clone();
    while pk <= bound {
        pk *= &pb;
        k += 1;
    }
    let lc_inv = {
        let lcp = fp.from_bigint(&lc);
        let inv = fp.inv(&lcp).unwrap();
        // lift the inverse of lc to p^k by Newton iteration
        let mut x = BigInt::from(fp.index(&inv));
        let mut m = pb.clone();
        while m < pk {
            m = (&m * &m).min(pk.clone());
            x = (&x * (BigInt::from(2) - &lc * &x)).mod_floor(&m);
        }
        x.mod_floor(&pk)
    };
    let monic_g: ZPoly = z_mod(&g.iter().map(|c| c * &lc_inv).collect(), &pk);
    let mut lifted = hensel_multi(&monic_g, &local, &pb, k);
    let mut current = g.clone();
    let mut found = Vec::new();
    let mut s = 1;
    while 2 * s <= lifted.len() {
        let mut hit = None;
        for subset in combinations(lifted.len(), s) {
            let lcc = current.last().unwrap().clone();
            let mut cand: ZPoly = vec![lcc];
            for &i in &subset {
                cand = z_mod(&z_mul(&cand, &lifted[i]), &pk);
            }
            let cand = z_primitive(&z_symmetric(&cand, &pk));
            if let Some(q) = z_divide(&current, &cand) {
                hit = Some((subset, cand, q));
                break;
            }
        }
        match hit {
            Some((subset, cand, q)) => {
                found.push(cand);
                current = q;
                lifted = lifted
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, x)| x)
                    .collect();
            }
            None => s += 1,
        }
    }
    if current.len() > 1 {
        found.push(z_primitive(&current));
    }
    found
}

fn factor_squarefree_rational(f: &Poly) -> Result<Vec<Poly>> {
    let k = f.field();
    let rats: Vec<BigRational> = f
        .coeffs()
        .iter()
        .map(|c| match c {
            Elem::Rat(r) => r.clone(),
            _ => unreachable!(),
        })
        .collect();
    let den = rats.iter().fold(BigInt::one(), |l, r| l.lcm(r.denom()));
    let ints: ZPoly = rats
        .iter()
        .map(|r| (r * BigRational::from_integer(den.clone())).to_integer())
        .collect();
    let prim = z_primitive(&ints);
    let mut out = Vec::new();
    for h in factor_squarefree_int(&prim) {
        let p = Poly::new(k, h.iter().map(|c| k.from_bigint(c)).collect());
        out.push(p.monic());
    }
    Ok(out)
}

/// Whether the polynomial has a root in `k` (finite: by enumeration for tiny fields, else via factor).
pub fn has_root(f: &Poly) -> Result<bool> {
    let (_, fac) = factor(f)?;
    Ok(fac.iter().any(|(g, _)| g.deg() == Some(1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(k: &Field, unit: &Elem, fac: &[(Poly, usize)]) -> Poly {
        fac.iter()
            .fold(Poly::constant(k, unit.clone()), |acc, (g, m)| {
                acc.mul(&g.pow(*m as u64))
            })
    }

    #[test]
    fn squarefree_examples() {
        let q = Field::rational();
        let f = Poly::from_ints(&q, &[0, 0, 1, 1]);
        let sf = squarefree_decompose(&f).unwrap();
        assert_eq!(
            sf,
            vec![
                (Poly::from_ints(&q, &[1, 1]), 1),
                (Poly::from_ints(&q, &[0, 1]), 2)
            ]
        );
        let f2 = Field::prime(2).unwrap();
        let f = Poly::from_ints(&f2, &[0, 0, 0, 0, 1, 0, 1]);
        let sf = squarefree_decompose(&f).unwrap();
        assert_eq!(
            sf,
            vec![
                (Poly::from_ints(&f2, &[1, 1]), 2),
                (Poly::from_ints(&f2, &[0, 1]), 4)
            ]
        );
        let g = Poly::from_ints(&f2, &[1, 1, 1]);
        assert_eq!(squarefree_decompose(&g).unwrap(), vec![(g.clone(), 1)]);
        assert_eq!(
            squarefree_decompose(&Poly::zero(&f2)),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn factor_examples() {
        let f3 = Field::prime(3).unwrap();
        let (_, fac) = factor(&Poly::from_ints(&f3, &[1, 0, 1])).unwrap();
        assert_eq!(fac.len(), 1);
        let q = Field::rational();
        let (_, fac) = factor(&Poly::from_ints(&q, &[-1, 0, 1])).unwrap();
        assert_eq!(
            fac,
            vec![
                (Poly::from_ints(&q, &[-1, 1]), 1),
                (Poly::from_ints(&q, &[1, 1]), 1)
            ]
        );
        let f2 = Field::prime(2).unwrap();
        let (_, fac) = factor(&Poly::from_ints(&f2, &[1, 1, 1, 1, 1])).unwrap();
        assert_eq!(fac.len(), 1);
    }

    #[test]
    fn rational_zassenhaus() {
        let q = Field::rational();
        // (x^2+1)(x^2-2)(3x+1)(x^4+x+1)^2 / 5
        let a = Poly::from_ints(&q, &[1, 0, 1]);
        let b = Poly::from_ints(&q, &[-2, 0, 1]);
        let c = Poly::from_ints(&q, &[1, 3]);
        let d = Poly::from_ints(&q, &[1, 1, 0, 0, 1]);
        let f = a.mul(&b).mul(&c).mul(&d).mul(&d).scale(
            &q.from_rational(&BigRational::new(1.into(), 5.into()))
                .unwrap(),
        );
        let (u, fac) = factor(&f).unwrap();
        assert_eq!(product(&q, &u, &fac), f);
        assert_eq!(fac.len(), 4);
        // x^4 + 1 is irreducible over Q but splits modulo every prime
        let (_, fac) = factor(&Poly::from_ints(&q, &[1, 0, 0, 0, 1])).unwrap();
        assert_eq!(fac.len(), 1);
        // Swinnerton-Dyer style: (x^2-2)(x^2-3) vs x^4-10x^2+1
        let (_, fac) = factor(&Poly::from_ints(&q, &[1, 0, -10, 0, 1])).unwrap();
        assert_eq!(fac.len(), 1);
        let big = Poly::from_ints(&q, &[1; 26]);
        assert!(matches!(
            factor(&big),
            Err(Error::DegreeBoundExceeded { .. })
        ));
    }

    #[test]
    fn finite_factor_roundtrip() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for f in [
            Field::prime(2).unwrap(),
            Field::prime(3).unwrap(),
            Field::fq(2, 2).unwrap(),
            Field::fq(3, 2).unwrap(),
        ] {
            for _ in 0..40 {
                let n = rng.gen_range(1..9);
                let p = Poly::new(&f, (0..=n).map(|_| f.random(&mut rng)).collect());
                if p.is_zero() {
                    continue;
                }
                let (u, fac) = factor(&p).unwrap();
                assert_eq!(product(&f, &u, &fac), p);
                for (g, _) in &fac {
                    assert!(g.is_irreducible().unwrap());
                    assert!(g.is_monic());
                }
            }
        }
    }

    #[test]
    fn combos() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3).len(), 1);
        assert_eq!(combinations(5, 1).len(), 5);
    }
}
