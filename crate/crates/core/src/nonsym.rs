//! Pairs that need not be symmetric. The module type is computed exactly as in the symmetric
//! case. In the free locus the pairing `psi` reduces to a Gram matrix in a cyclic basis, and
//! equivalence becomes a search over the units of `L = k[X]/(charpoly)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::modstruct::{module_type, ModuleType};
use crate::oracle::{self, Group, OracleConfig};
use crate::pencil::{Pencil, Reparam};
use crate::poly::Poly;

/// Unit search is abandoned above this many candidates.
const MAX_UNITS: u64 = 10_000_000;

pub fn nonsym_module_type(m: &Pencil) -> Result<ModuleType> {
    module_type(m)
}

/// Module type plus, in the free case, the Gram matrix `Psi = tK M0 K` of the chart matrix
/// `M0` in the cyclic basis `K = [v, Nv, ..., N^n v]`, `N = -M0^{-1} M1`.
#[derive(Clone, Debug)]
pub struct PsiData {
    pub module_type: ModuleType,
    pub chart: Reparam,
    pub psi: Option<Mat>,
    /// Companion matrix of the action of `X` in the cyclic basis.
    pub companion: Option<Mat>,
}

impl PsiData {
    pub fn to_json(&self) -> Value {
        json!({
            "module_type": self.module_type.to_json(),
            "psi": self.psi.as_ref().map(|p| p.to_json()),
        })
    }
}

/// `N = -M0^{-1} M1` for the recombined pair.
fn chart_operator(m: &Pencil, g: &Reparam) -> Result<(Pencil, Mat)> {
    let t = m.recombine(g);
    let inv = t
        .m0()
        .inverse()
        .map_err(|_| Error::ConventionFailure("chart left M0 singular".into()))?;
    let n = inv.mul(t.m1()).neg();
    Ok((t, n))
}

fn krylov(n: &Mat, v: &[crate::field::Elem]) -> Mat {
    let k = n.field();
    let size = n.rows();
    let mut cols = vec![v.to_vec()];
    for _ in 1..size {
        let next = n.mul_vec(cols.last().unwrap());
        cols.push(next);
    }
    Mat::from_rows(
        k,
        (0..size)
            .map(|i| cols.iter().map(|c| c[i].clone()).collect())
            .collect(),
    )
}

/// A vector `v` with `[v, Nv, ...]` invertible: unit vectors first, then seeded random ones.
fn cyclic_vector(n: &Mat, seed: u64) -> Option<Mat> {
    let k = n.field();
    let size = n.rows();
    for j in 0..size {
        let mut v = vec![k.zero(); size];
        v[j] = k.one();
        let kr = krylov(n, &v);
        if kr.rank() == size {
            return Some(kr);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..256 {
        let v: Vec<_> = (0..size).map(|_| k.random(&mut rng)).collect();
        let kr = krylov(n, &v);
        if kr.rank() == size {
            return Some(kr);
        }
    }
    None
}

fn psi_in_chart(t: &Pencil, n: &Mat, seed: u64) -> Result<(Mat, Mat)> {
    let kr = cyclic_vector(n, seed).ok_or(Error::NotFree)?;
    let psi = kr.transpose().mul(t.m0()).mul(&kr);
    let comp = kr.inverse()?.mul(n).mul(&kr);
    Ok((psi, comp))
}

pub fn psi_data(m: &Pencil) -> Result<PsiData> {
    let t = module_type(m)?;
    let chart = m.chart()?;
    if !t.is_free() {
        return Ok(PsiData {
            module_type: t,
            chart,
            psi: None,
            companion: None,
        });
    }
    let (tp, n) = chart_operator(m, &chart)?;
    let (psi, comp) = psi_in_chart(&tp, &n, 0)?;
    Ok(PsiData {
        module_type: t,
        chart,
        psi: Some(psi),
        companion: Some(comp),
    })
}

/// Free-locus decision: some unit `beta` of `L` with `t(beta(C)) Psi beta(C) = Psi'`.
pub fn nonsym_equivalent_free(m: &Pencil, m2: &Pencil) -> Result<bool> {
    let k = m.field();
    if m2.field() != k {
        return Err(Error::InvalidInput("pencils over different fields".into()));
    }
    if m.size() != m2.size() {
        return Err(Error::SizeMismatch("pencils of different sizes".into()));
    }
    let q = k
        .size()
        .ok_or_else(|| Error::Unsupported("free-locus decision needs a finite field".into()))?;
    if !m.is_free()? || !m2.is_free()? {
        return Err(Error::NotFree);
    }
    if !m.scheme()?.same_support(&m2.scheme()?) {
        return Ok(false);
    }
    let size = m.size();
    let units = (q as u128).checked_pow(size as u32).unwrap_or(u128::MAX);
    if units > MAX_UNITS as u128 {
        return Err(Error::InstanceTooLarge(format!("{units} candidate units")));
    }
    // one chart serves both: the charts depend only on the scheme
    let g = m.chart()?;
    let (t, n) = chart_operator(m, &g)?;
    let (t2, n2) = chart_operator(m2, &g)?;
    let (psi, comp) = psi_in_chart(&t, &n, 0)?;
    let (psi2, comp2) = psi_in_chart(&t2, &n2, 0)?;
    if comp != comp2 {
        // same scheme but different characteristic polynomial cannot happen after a shared chart
        return Err(Error::ConventionFailure(
            "companion matrices differ for equal schemes".into(),
        ));
    }
    let charpoly = {
        let mut c: Vec<_> = (0..size).map(|i| k.neg(comp.get(i, size - 1))).collect();
        c.push(k.one());
        Poly::new(k, c)
    };
    for idx in 1..units as u64 {
        let mut coeffs = Vec::with_capacity(size);
        let mut x = idx;
        for _ in 0..size {
            coeffs.push(k.from_index(x % q));
            x /= q;
        }
        let beta = Poly::new(k, coeffs);
        if beta.gcd(&charpoly).deg() != Some(0) {
            continue;
        }
        let r = comp.poly_eval(&beta);
        if r.transpose().mul(&psi).mul(&r) == psi2 {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Invariant,
    Oracle,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Invariant => "invariant",
            Method::Oracle => "oracle",
        }
    }
}

/// GL-congruence of arbitrary pairs: the free-locus decision when both are free, the oracle
/// otherwise.
pub fn nonsym_equivalent(m: &Pencil, m2: &Pencil) -> Result<(bool, Method)> {
    nonsym_equivalent_with(m, m2, &OracleConfig::default())
}

pub fn nonsym_equivalent_with(
    m: &Pencil,
    m2: &Pencil,
    cfg: &OracleConfig,
) -> Result<(bool, Method)> {
    if m.field() != m2.field() {
        return Err(Error::InvalidInput("pencils over different fields".into()));
    }
    if m.size() != m2.size() {
        return Err(Error::SizeMismatch("pencils of different sizes".into()));
    }
    let (t, t2) = (module_type(m)?, module_type(m2)?);
    if t != t2 {
        return Ok((false, Method::Invariant));
    }
    if !m.field().is_finite() {
        return if t.is_free() {
            Err(Error::Unsupported(
                "free-locus decision over the rationals".into(),
            ))
        } else {
            Err(Error::Unsupported("orbit search over the rationals".into()))
        };
    }
    if t.is_free() {
        return Ok((nonsym_equivalent_free(m, m2)?, Method::Invariant));
    }
    match oracle::brute_equivalent(m, m2, Group::GL, cfg) {
        Ok(b) => Ok((b, Method::Oracle)),
        Err(Error::BudgetExceeded { needed, budget }) => Err(Error::InstanceTooLarge(format!(
            "orbit search needs {needed} steps, budget {budget}"
        ))),
        Err(e) => Err(e),
    }
}
