//! Elementary divisors of a pencil: Smith normal form, module types and Segre symbols.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::form::{PointOnP1, SchemeS};
use crate::matrix::PolyMat;
use crate::pencil::Pencil;
use crate::poly::Poly;

/// `U A V = diag(d)` with `U`, `V` unimodular and `d_1 | d_2 | ...` monic.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: PolyMat,
    pub v: PolyMat,
    pub d: Vec<Poly>,
}

/// Smith normal form with transformation matrices.
pub fn smith(a: &PolyMat) -> Result<SmithForm> {
    smith_impl(a, true)
}

/// Only the invariant factors.
pub fn invariant_factors(a: &PolyMat) -> Result<Vec<Poly>> {
    Ok(smith_impl(a, false)?.d)
}

fn smith_impl(a: &PolyMat, track: bool) -> Result<SmithForm> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::SizeMismatch(
            "smith form needs a square matrix".into(),
        ));
    }
    let k = a.field().clone();
    let mut m = a.clone();
    let mut u = PolyMat::identity(&k, if track { n } else { 0 });
    let mut v = PolyMat::identity(&k, if track { n } else { 0 });
    for t in 0..n {
        loop {
            // pivot: least degree, then first position in row-major order
            let mut best: Option<(usize, usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if let Some(dg) = m.get(i, j).deg() {
                        if best.is_none_or(|(bd, _, _)| dg < bd) {
                            best = Some((dg, i, j));
                        }
                    }
                }
            }
            let Some((_, pi, pj)) = best else {
                return Err(Error::SingularMatrix);
            };
            m.swap_rows(t, pi);
            m.swap_cols(t, pj);
            if track {
                u.swap_rows(t, pi);
                v.swap_cols(t, pj);
            }
            let piv = m.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..n {
                if m.get(i, t).is_zero() {
                    continue;
                }
                let (q, r) = m.get(i, t).divrem(&piv)?;
                let q = q.neg();
                m.add_row_multiple(i, t, &q);
                if track {
                    u.add_row_multiple(i, t, &q);
                }
                clean &= r.is_zero();
            }
            for j in t + 1..n {
                if m.get(t, j).is_zero() {
                    continue;
                }
                let (q, r) = m.get(t, j).divrem(&piv)?;
                let q = q.neg();
                m.add_col_multiple(j, t, &q);
                if track {
                    v.add_col_multiple(j, t, &q);
                }
                clean &= r.is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..n).find(|&i| (t + 1..n).any(|j| !piv.divides(m.get(i, j))));
            match bad {
                Some(i) => {
                    let one = Poly::one(&k);
                    m.add_row_multiple(t, i, &one);
                    if track {
                        u.add_row_multiple(t, i, &one);
                    }
                }
                None => break,
            }
        }
        let c = k.inv(m.get(t, t).lead().unwrap())?;
        m.scale_row(t, &c);
        if track {
            u.scale_row(t, &c);
        }
    }
    let d = (0..n).map(|i| m.get(i, i).clone()).collect();
    Ok(SmithForm { u, v, d })
}

/// Exponent of the irreducible `p` in `d`.
pub fn valuation(d: &Poly, p: &Poly) -> usize {
    let mut d = d.clone();
    let mut e = 0;
    while !d.is_zero() {
        let (q, r) = d.divrem(p).expect("nonzero divisor");
        if !r.is_zero() {
            break;
        }
        d = q;
        e += 1;
    }
    e
}

/// Isomorphism class of the torsion module: a partition at every point of the scheme.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleType {
    k: Field,
    pub entries: Vec<(PointOnP1, Vec<usize>)>,
}

impl ModuleType {
    pub fn new(k: &Field, mut entries: Vec<(PointOnP1, Vec<usize>)>) -> Result<ModuleType> {
        entries.sort_by(|a, b| a.0.cmp_canonical(&b.0));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidInput("repeated point in module type".into()));
            }
        }
        for (_, part) in entries.iter_mut() {
            if part.is_empty() || part.contains(&0) {
                return Err(Error::InvalidInput(
                    "partitions must be nonempty with positive parts".into(),
                ));
            }
            part.sort_unstable_by(|a, b| b.cmp(a));
        }
        Ok(ModuleType {
            k: k.clone(),
            entries,
        })
    }

    pub fn field(&self) -> &Field {
        &self.k
    }

    /// `sum deg(point) * |partition|`, the matrix size realizing this type.
    pub fn size(&self) -> usize {
        self.entries
            .iter()
            .map(|(p, e)| p.degree() * e.iter().sum::<usize>())
            .sum()
    }

    /// Free of rank one exactly when each partition has one part.
    pub fn is_free(&self) -> bool {
        self.entries.iter().all(|(_, e)| e.len() == 1)
    }

    pub fn partition_at(&self, p: &PointOnP1) -> Option<&[usize]> {
        self.entries
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, e)| e.as_slice())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.entries
                .iter()
                .map(|(p, e)| json!({"point": p.to_json(), "degree": p.degree(), "partition": e}))
                .collect(),
        )
    }

    pub fn from_json(k: &Field, v: &Value) -> Result<ModuleType> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Parse("module type must be an array".into()))?;
        let mut entries = Vec::new();
        for e in arr {
            let p = PointOnP1::from_json(
                k,
                e.get("point")
                    .ok_or_else(|| Error::Parse("missing 'point'".into()))?,
            )?;
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
            entries.push((p, part));
        }
        ModuleType::new(k, entries)
    }
}

/// Module type from elementary divisors, the finite chart on `X M0 + M1` and the chart at
/// infinity on `M0 + X M1`.
pub fn module_type(m: &Pencil) -> Result<ModuleType> {
    let s = m.scheme()?;
    module_type_with_scheme(m, &s)
}

pub(crate) fn module_type_with_scheme(m: &Pencil, s: &SchemeS) -> Result<ModuleType> {
    let k = m.field();
    let mut entries = Vec::new();
    let finite: Vec<&(PointOnP1, usize)> =
        s.points.iter().filter(|(p, _)| !p.is_infinity()).collect();
    if !finite.is_empty() {
        let d = invariant_factors(&PolyMat::linear(m.m0(), m.m1()))?;
        for (p, mult) in finite {
            let q = p.chart_poly();
            entries.push((p.clone(), partition_from(&d, &q, *mult)?));
        }
    }
    if let Some((p, mult)) = s.points.iter().find(|(p, _)| p.is_infinity()) {
        let d = invariant_factors(&PolyMat::linear(m.m1(), m.m0()))?;
        entries.push((p.clone(), partition_from(&d, &Poly::x(k), *mult)?));
    }
    ModuleType::new(k, entries)
}

fn partition_from(d: &[Poly], q: &Poly, mult: usize) -> Result<Vec<usize>> {
    let mut e: Vec<usize> = d
        .iter()
        .map(|x| valuation(x, q))
        .filter(|&v| v > 0)
        .collect();
    e.sort_unstable_by(|a, b| b.cmp(a));
    if e.iter().sum::<usize>() != mult {
        return Err(Error::ConventionFailure(format!(
            "elementary divisors {e:?} do not add up to multiplicity {mult}"
        )));
    }
    Ok(e)
}

/// One entry of a Segre symbol: a partition attached to a closed point of the given degree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SegreEntry {
    pub partition: Vec<usize>,
    pub degree: usize,
}

/// Multiset of partitions over the algebraic closure; a degree-`d` point stands for `d`
/// conjugate points with the same partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegreSymbol {
    pub entries: Vec<SegreEntry>,
}

impl SegreSymbol {
    pub fn from_module_type(t: &ModuleType) -> SegreSymbol {
        let mut entries: Vec<SegreEntry> = t
            .entries
            .iter()
            .map(|(p, e)| SegreEntry {
                partition: e.clone(),
                degree: p.degree(),
            })
            .collect();
        entries.sort_by(|a, b| b.cmp(a));
        SegreSymbol { entries }
    }

    /// Symbol over the algebraic closure, where only the partitions matter.
    pub fn geometric(&self) -> Vec<Vec<usize>> {
        let mut v: Vec<Vec<usize>> = self
            .entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.partition.clone(), e.degree))
            .collect();
        v.sort_by(|a, b| b.cmp(a));
        v
    }

    pub fn to_json(&self) -> Value {
        json!({
            "symbol": self.to_string(),
            "entries": self.entries.iter().map(|e| json!({"degree": e.degree, "partition": e.partition})).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for SegreSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .geometric()
            .iter()
            .map(|p| {
                if p.len() == 1 {
                    p[0].to_string()
                } else {
                    format!(
                        "({})",
                        p.iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    )
                }
            })
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

pub fn segre_symbol(m: &Pencil) -> Result<SegreSymbol> {
    Ok(SegreSymbol::from_module_type(&module_type(m)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Mat;

    fn x(k: &Field, c: &[i64]) -> Poly {
        Poly::from_ints(k, c)
    }

    fn check(a: &PolyMat) -> Vec<Poly> {
        let s = smith(a).unwrap();
        let prod = s.u.mul(a).mul(&s.v);
        let n = a.rows();
        for i in 0..n {
            for j in 0..n {
                let want = if i == j {
                    s.d[i].clone()
                } else {
                    Poly::zero(a.field())
                };
                assert_eq!(prod.get(i, j), &want);
            }
        }
        for w in s.d.windows(2) {
            assert!(w[0].divides(&w[1]));
        }
        assert_eq!(s.u.det_bareiss().deg(), Some(0));
        assert_eq!(s.v.det_bareiss().deg(), Some(0));
        s.d
    }

    #[test]
    fn smith_examples() {
        let q = Field::rational();
        let a = PolyMat::from_rows(
            &q,
            vec![
                vec![x(&q, &[0, 1]), x(&q, &[0])],
                vec![x(&q, &[0]), x(&q, &[0, 1])],
            ],
        );
        assert_eq!(check(&a), vec![x(&q, &[0, 1]), x(&q, &[0, 1])]);
        let a = PolyMat::from_rows(
            &q,
            vec![
                vec![x(&q, &[0, 1]), x(&q, &[1])],
                vec![x(&q, &[0]), x(&q, &[0, 1])],
            ],
        );
        assert_eq!(check(&a), vec![x(&q, &[1]), x(&q, &[0, 0, 1])]);
        // X I - companion(X^3 + 2X + 5)
        let c = Mat::from_ints(&q, &[vec![0, 0, -5], vec![1, 0, -2], vec![0, 1, 0]]);
        let a = PolyMat::linear(&Mat::identity(&q, 3), &c.neg());
        assert_eq!(
            check(&a),
            vec![x(&q, &[1]), x(&q, &[1]), x(&q, &[5, 2, 0, 1])]
        );
    }

    #[test]
    fn diagonal_pencil_type() {
        let f5 = Field::prime(5).unwrap();
        let p = Pencil::from_ints(
            &f5,
            &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
            &[vec![0, 0, 0], vec![0, 1, 0], vec![0, 0, 2]],
        )
        .unwrap();
        let t = module_type(&p).unwrap();
        assert_eq!(t.entries.len(), 3);
        assert!(t.entries.iter().all(|(_, e)| e == &vec![1]));
        assert_eq!(segre_symbol(&p).unwrap().to_string(), "[1, 1, 1]");
    }

    #[test]
    fn jordan_block_at_infinity() {
        // (I, J_2(0)): disc = X0^2, the point X0 in the finite chart
        let q = Field::rational();
        let p =
            Pencil::from_ints(&q, &[vec![1, 0], vec![0, 1]], &[vec![0, 1], vec![0, 0]]).unwrap();
        let t = module_type(&p).unwrap();
        assert_eq!(t.entries.len(), 1);
        assert_eq!(t.entries[0].1, vec![2]);
        assert_eq!(module_type(&p.transpose_pair()).unwrap(), t);
        // (J_2(0), I): the point X1
        let p =
            Pencil::from_ints(&q, &[vec![0, 1], vec![0, 0]], &[vec![1, 0], vec![0, 1]]).unwrap();
        let t = module_type(&p).unwrap();
        assert!(t.entries[0].0.is_infinity());
        assert_eq!(t.entries[0].1, vec![2]);
    }

    #[test]
    fn segre_display() {
        let s = SegreSymbol {
            entries: vec![
                SegreEntry {
                    partition: vec![1],
                    degree: 2,
                },
                SegreEntry {
                    partition: vec![2, 1],
                    degree: 1,
                },
            ],
        };
        assert_eq!(s.to_string(), "[(2,1), 1, 1]");
    }
}
