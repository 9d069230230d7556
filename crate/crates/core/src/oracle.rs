//! Brute-force ground truth over tiny finite fields: exhaustive orbit tables, equivalence by
//! orbit search and stabilizers by scanning the whole group. Arithmetic here is a separate
//! table-driven implementation so results do not depend on the rest of the crate.

use std::collections::{HashSet, VecDeque};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::form::{BinaryForm, SchemeS};
use crate::matrix::Mat;
use crate::par::{self, Exec};
use crate::pencil::Pencil;

/// Default cap on `pencils x generators` (or group elements scanned).
pub const DEFAULT_BUDGET: u128 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Group {
    GL,
    SL,
}

impl Group {
    pub fn name(self) -> &'static str {
        match self {
            Group::GL => "GL",
            Group::SL => "SL",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Symmetric,
    General,
}

#[derive(Clone, Debug)]
pub enum Constraint {
    /// Every pencil with nonzero discriminant.
    All,
    /// Discriminant a nonzero multiple of the scheme's form.
    FixedScheme(SchemeS),
    /// Discriminant exactly this form (SL only; GL rescales discriminants).
    FixedDisc(BinaryForm),
}

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    pub budget: u128,
    pub exec: Exec,
}

impl Default for OracleConfig {
    fn default() -> OracleConfig {
        OracleConfig {
            budget: DEFAULT_BUDGET,
            exec: Exec::default(),
        }
    }
}

/// Table arithmetic on element indices (the same indices as `Field::index`).
#[derive(Clone, Debug)]
pub struct OracleField {
    field: Field,
    pub q: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    /// Additive generators `T^l`, `l < d`.
    basis: Vec<u16>,
    primitive: u16,
}

impl OracleField {
    pub fn new(k: &Field) -> Result<OracleField> {
        let q = k
            .size()
            .ok_or_else(|| Error::Unsupported("the oracle needs a finite field".into()))?
            as usize;
        if q > 256 {
            return Err(Error::InstanceTooLarge(format!("field of order {q}")));
        }
        let p = k.characteristic() as usize;
        // modulus over F_p as digits, or none for prime fields
        let modulus: Option<Vec<usize>> = if k.is_prime_field() {
            None
        } else {
            let base = k.base().unwrap();
            if !base.is_prime_field() {
                return Err(Error::Unsupported(
                    "the oracle handles prime fields and simple extensions only".into(),
                ));
            }
            Some(
                k.modulus()
                    .unwrap()
                    .iter()
                    .map(|c| base.index(c) as usize)
                    .collect(),
            )
        };
        let d = modulus.as_ref().map_or(1, |m| m.len() - 1);
        let digits = |mut x: usize| -> Vec<usize> {
            (0..d)
                .map(|_| {
                    let r = x % p;
                    x /= p;
                    r
                })
                .collect()
        };
        let undigits = |v: &[usize]| v.iter().rev().fold(0usize, |acc, &c| acc * p + c);
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let s: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = undigits(&s) as u16;
                let mut prod = vec![0usize; 2 * d - 1];
                for i in 0..d {
                    for j in 0..d {
                        prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
                    }
                }
                if let Some(m) = &modulus {
                    for top in (d..2 * d - 1).rev() {
                        let c = prod[top];
                        if c != 0 {
                            for (i, &mi) in m.iter().enumerate().take(d) {
                                let idx = top - d + i;
                                prod[idx] = (prod[idx] + (p - c) * mi) % p;
                            }
                            prod[top] = 0;
                        }
                    }
                }
                mul[a * q + b] = undigits(&prod[..d]) as u16;
            }
        }
        let neg: Vec<u16> = (0..q)
            .map(|a| (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u16)
            .collect();
        let mut inv = vec![0u16; q];
        for a in 1..q {
            inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).ok_or_else(|| {
                Error::ConventionFailure("oracle tables: element without inverse".into())
            })? as u16;
        }
        let basis: Vec<u16> = (0..d).map(|l| p.pow(l as u32) as u16).collect();
        let primitive = (1..q)
            .find(|&g| {
                let mut x = g;
                let mut ord = 1;
                while x != 1 {
                    x = mul[x * q + g] as usize;
                    ord += 1;
                }
                ord == q - 1
            })
            .unwrap() as u16;
        Ok(OracleField {
            field: k.clone(),
            q,
            add,
            mul,
            neg,
            inv,
            basis,
            primitive,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    #[inline]
    fn a(&self, x: u16, y: u16) -> u16 {
        self.add[x as usize * self.q + y as usize]
    }
    #[inline]
    fn m(&self, x: u16, y: u16) -> u16 {
        self.mul[x as usize * self.q + y as usize]
    }
    #[inline]
    fn s(&self, x: u16, y: u16) -> u16 {
        self.a(x, self.neg[y as usize])
    }
}

// small dense polynomials over the tables, constant term first
type TPoly = Vec<u16>;

fn tp_trim(mut p: TPoly) -> TPoly {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn tp_mul(f: &OracleField, a: &TPoly, b: &TPoly) -> TPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u16; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.a(out[i + j], f.m(x, y));
        }
    }
    tp_trim(out)
}

fn tp_add(f: &OracleField, a: &TPoly, b: &TPoly) -> TPoly {
    let n = a.len().max(b.len());
    tp_trim(
        (0..n)
            .map(|i| f.a(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
            .collect(),
    )
}

fn tp_rem(f: &OracleField, a: &TPoly, b: &TPoly) -> TPoly {
    let mut r = a.clone();
    let lb = *b.last().unwrap();
    let il = f.inv[lb as usize];
    while r.len() >= b.len() && !r.is_empty() {
        let c = f.m(*r.last().unwrap(), il);
        let sh = r.len() - b.len();
        for (i, &bi) in b.iter().enumerate() {
            r[sh + i] = f.s(r[sh + i], f.m(c, bi));
        }
        r = tp_trim(r);
    }
    r
}

fn tp_gcd(f: &OracleField, a: &TPoly, b: &TPoly) -> TPoly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_empty() {
        let r = tp_rem(f, &x, &y);
        x = y;
        y = r;
    }
    x
}

/// Permutations of `0..n` with their signs.
fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    fn rec(
        pre: &mut Vec<usize>,
        used: &mut Vec<bool>,
        n: usize,
        out: &mut Vec<(Vec<usize>, bool)>,
    ) {
        if pre.len() == n {
            let mut inv = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if pre[i] > pre[j] {
                        inv += 1;
                    }
                }
            }
            out.push((pre.clone(), inv % 2 == 1));
            return;
        }
        for c in 0..n {
            if !used[c] {
                used[c] = true;
                pre.push(c);
                rec(pre, used, n, out);
                pre.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut vec![], &mut vec![false; n], n, &mut out);
    out
}

/// Pencil encoding as digit vectors and base-`q` codes.
struct Codec<'a> {
    f: &'a OracleField,
    n: usize,
    mode: Mode,
    perms: Vec<(Vec<usize>, bool)>,
    minor_perms: Vec<(Vec<usize>, bool)>,
}

impl<'a> Codec<'a> {
    fn new(f: &'a OracleField, n: usize, mode: Mode) -> Codec<'a> {
        Codec {
            f,
            n,
            mode,
            perms: permutations(n),
            minor_perms: permutations(n.saturating_sub(1)),
        }
    }

    fn digits_per_matrix(&self) -> usize {
        match self.mode {
            Mode::Symmetric => self.n * (self.n + 1) / 2,
            Mode::General => self.n * self.n,
        }
    }

    fn digits(&self) -> usize {
        2 * self.digits_per_matrix()
    }

    /// Matrices as `[M0 | M1]`, each `n*n` row-major.
    fn decode(&self, mut code: u128) -> Vec<u16> {
        let n = self.n;
        let q = self.f.q as u128;
        let mut out = vec![0u16; 2 * n * n];
        for m in 0..2 {
            let base = m * n * n;
            for i in 0..n {
                let j0 = if self.mode == Mode::Symmetric { i } else { 0 };
                for j in j0..n {
                    let d = (code % q) as u16;
                    code /= q;
                    out[base + i * n + j] = d;
                    if self.mode == Mode::Symmetric {
                        out[base + j * n + i] = d;
                    }
                }
            }
        }
        out
    }

    fn encode(&self, m: &[u16]) -> u128 {
        let n = self.n;
        let q = self.f.q as u128;
        let mut code = 0u128;
        let mut w = 1u128;
        for mat in 0..2 {
            let base = mat * n * n;
            for i in 0..n {
                let j0 = if self.mode == Mode::Symmetric { i } else { 0 };
                for j in j0..n {
                    code += m[base + i * n + j] as u128 * w;
                    w *= q;
                }
            }
        }
        code
    }

    /// `tP M P` for `P = I + a E_ij`: column `j` += `a` column `i`, then row `j` += `a` row `i`.
    fn transvect(&self, m: &mut [u16], i: usize, j: usize, a: u16) {
        let n = self.n;
        let f = self.f;
        for mat in 0..2 {
            let b = mat * n * n;
            for r in 0..n {
                let v = f.a(m[b + r * n + j], f.m(a, m[b + r * n + i]));
                m[b + r * n + j] = v;
            }
            for c in 0..n {
                let v = f.a(m[b + j * n + c], f.m(a, m[b + i * n + c]));
                m[b + j * n + c] = v;
            }
        }
    }

    /// `tP M P` for `P = diag(g, 1, ..., 1)`.
    fn scale_first(&self, m: &mut [u16], g: u16) {
        let n = self.n;
        let f = self.f;
        for mat in 0..2 {
            let b = mat * n * n;
            for c in 0..n {
                m[b + c] = f.m(g, m[b + c]);
            }
            for r in 0..n {
                m[b + r * n] = f.m(g, m[b + r * n]);
            }
        }
    }

    /// `det(X0 M0 + X1 M1)` as coefficients of `X0^i X1^(n-i)`.
    fn disc(&self, m: &[u16]) -> Vec<u16> {
        let n = self.n;
        let f = self.f;
        let mut out = vec![0u16; n + 1];
        for (perm, odd) in &self.perms {
            let mut form = vec![1u16];
            for (r, &c) in perm.iter().enumerate() {
                let (x0, x1) = (m[r * n + c], m[n * n + r * n + c]);
                let mut next = vec![0u16; form.len() + 1];
                for (i, &v) in form.iter().enumerate() {
                    next[i] = f.a(next[i], f.m(v, x1));
                    next[i + 1] = f.a(next[i + 1], f.m(v, x0));
                }
                form = next;
            }
            for i in 0..=n {
                out[i] = if *odd {
                    f.s(out[i], form[i])
                } else {
                    f.a(out[i], form[i])
                };
            }
        }
        out
    }

    fn disc_code(&self, m: &[u16]) -> u64 {
        self.disc(m)
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.f.q as u64 + c as u64)
    }

    fn rank(&self, a: &[u16]) -> usize {
        let n = self.n;
        let f = self.f;
        let mut a = a.to_vec();
        let mut r = 0;
        for c in 0..n {
            let Some(p) = (r..n).find(|&i| a[i * n + c] != 0) else {
                continue;
            };
            for j in 0..n {
                a.swap(p * n + j, r * n + j);
            }
            let inv = f.inv[a[r * n + c] as usize];
            for i in r + 1..n {
                let t = f.m(a[i * n + c], inv);
                if t != 0 {
                    for j in 0..n {
                        a[i * n + j] = f.s(a[i * n + j], f.m(t, a[r * n + j]));
                    }
                }
            }
            r += 1;
        }
        r
    }

    /// Rank `>= n - 1` at every root: `M0` at infinity, gcd of the maximal proper minors of
    /// `X M0 + M1` elsewhere.
    fn is_free(&self, m: &[u16]) -> bool {
        let n = self.n;
        if n == 1 {
            return true;
        }
        let f = self.f;
        let d = self.disc(m);
        if d[n] == 0 && self.rank(&m[..n * n]) + 1 < n {
            return false;
        }
        let mut g: TPoly = vec![];
        for skip_r in 0..n {
            for skip_c in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != skip_r).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != skip_c).collect();
                let mut minor: TPoly = vec![];
                for (perm, odd) in &self.minor_perms {
                    let mut t: TPoly = vec![1];
                    for (ri, &ci) in perm.iter().enumerate() {
                        let (r, c) = (rows[ri], cols[ci]);
                        t = tp_mul(f, &t, &tp_trim(vec![m[n * n + r * n + c], m[r * n + c]]));
                    }
                    if *odd {
                        t = t.iter().map(|&x| f.neg[x as usize]).collect();
                    }
                    minor = tp_add(f, &minor, &t);
                }
                g = tp_gcd(f, &g, &minor);
                if g.len() == 1 {
                    return true;
                }
            }
        }
        g.len() == 1
    }

    /// Generator list: transvections over an additive basis, plus a diagonal for GL.
    fn generators(&self, group: Group) -> Vec<Gen> {
        let mut gens = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    for &a in &self.f.basis {
                        gens.push(Gen::Transvection(i, j, a));
                    }
                }
            }
        }
        if group == Group::GL && self.f.primitive != 1 {
            gens.push(Gen::Scale(self.f.primitive));
        }
        gens
    }

    fn apply(&self, m: &mut [u16], g: &Gen) {
        match *g {
            Gen::Transvection(i, j, a) => self.transvect(m, i, j, a),
            Gen::Scale(s) => self.scale_first(m, s),
        }
    }

    fn to_pencil(&self, m: &[u16]) -> Pencil {
        let k = &self.f.field;
        let n = self.n;
        let mat = |b: usize| {
            Mat::from_rows(
                k,
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| k.from_index(m[b + i * n + j] as u64))
                            .collect()
                    })
                    .collect(),
            )
        };
        Pencil::new(mat(0), mat(n * n)).expect("square matrices")
    }

    fn from_pencil(&self, p: &Pencil) -> Vec<u16> {
        let k = &self.f.field;
        let n = self.n;
        let mut out = vec![0u16; 2 * n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = k.index(p.m0().get(i, j)) as u16;
                out[n * n + i * n + j] = k.index(p.m1().get(i, j)) as u16;
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
enum Gen {
    Transvection(usize, usize, u16),
    Scale(u16),
}

pub fn group_order(q: u64, n: usize, group: Group) -> u128 {
    let q = q as u128;
    let qn = q.pow(n as u32);
    let gl: u128 = (0..n).map(|i| qn - q.pow(i as u32)).product();
    match group {
        Group::GL => gl,
        Group::SL => gl / (q - 1),
    }
}

#[derive(Clone, Debug)]
pub struct Orbit {
    /// Least code in the orbit.
    pub code: u128,
    pub rep: Pencil,
    pub size: u64,
    pub stabilizer: u128,
    pub disc: BinaryForm,
    pub free: bool,
}

#[derive(Clone, Debug)]
pub struct OrbitTable {
    pub field: Field,
    pub n: usize,
    pub group: Group,
    pub mode: Mode,
    pub constraint: String,
    pub group_order: u128,
    /// Number of pencils enumerated after filtering.
    pub total: u64,
    pub orbits: Vec<Orbit>,
    member_codes: Vec<u64>,
    member_orbit: Vec<u32>,
    tables: OracleField,
}

impl OrbitTable {
    pub fn member_count(&self) -> usize {
        self.member_codes.len()
    }

    /// The `i`-th enumerated pencil (in code order) and the index of its orbit in `orbits`.
    pub fn member(&self, i: usize) -> (Pencil, usize) {
        let codec = Codec::new(&self.tables, self.n + 1, self.mode);
        (
            codec.to_pencil(&codec.decode(self.member_codes[i] as u128)),
            self.member_orbit[i] as usize,
        )
    }

    /// Orbit index of `m`, if it was enumerated.
    pub fn orbit_of(&self, m: &Pencil) -> Option<usize> {
        if m.size() != self.n + 1 || m.field() != &self.field {
            return None;
        }
        let codec = Codec::new(&self.tables, self.n + 1, self.mode);
        let c = codec.encode(&codec.from_pencil(m)) as u64;
        self.member_codes
            .binary_search(&c)
            .ok()
            .map(|i| self.member_orbit[i] as usize)
    }

    fn header(&self) -> Value {
        json!({
            "field": self.field.descriptor(),
            "n": self.n,
            "group": self.group.name(),
            "mode": match self.mode { Mode::Symmetric => "symmetric", Mode::General => "general" },
            "constraint": self.constraint,
            "group_order": self.group_order.to_string(),
            "total": self.total,
            "orbit_count": self.orbits.len(),
        })
    }

    pub fn orbit_json(o: &Orbit) -> Value {
        json!({
            "rep": o.rep.to_json(),
            "size": o.size,
            "stabilizer": o.stabilizer.to_string(),
            "disc": o.disc.to_json(),
            "free": o.free,
        })
    }

    pub fn to_json(&self) -> Value {
        let mut h = self.header();
        h["orbits"] = Value::Array(self.orbits.iter().map(OrbitTable::orbit_json).collect());
        h
    }

    /// Header line followed by one line per orbit.
    pub fn to_jsonl(&self) -> String {
        let mut s = self.header().to_string();
        s.push('\n');
        for o in &self.orbits {
            s.push_str(&OrbitTable::orbit_json(o).to_string());
            s.push('\n');
        }
        s
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    let mut r = x;
    while parent[r as usize] != r {
        r = parent[r as usize];
    }
    while parent[x as usize] != r {
        let nx = parent[x as usize];
        parent[x as usize] = r;
        x = nx;
    }
    r
}

/// Partition all pencils satisfying `constraint` into orbits.
pub fn enumerate_orbits(
    k: &Field,
    n: usize,
    group: Group,
    mode: Mode,
    constraint: &Constraint,
    cfg: &OracleConfig,
) -> Result<OrbitTable> {
    enumerate_orbits_with_order(k, n, group, mode, constraint, cfg, false)
}

/// As [`enumerate_orbits`], optionally applying the generators in reverse order; the table
/// must not depend on it.
pub fn enumerate_orbits_with_order(
    k: &Field,
    n: usize,
    group: Group,
    mode: Mode,
    constraint: &Constraint,
    cfg: &OracleConfig,
    reverse_generators: bool,
) -> Result<OrbitTable> {
    if n == 0 {
        return Err(Error::InvalidInput("matrix size must be at least 1".into()));
    }
    let f = OracleField::new(k)?;
    let size = n + 1;
    let codec = Codec::new(&f, size, mode);
    let mut gens = codec.generators(group);
    if reverse_generators {
        gens.reverse();
    }
    let q = f.q as u128;
    let total = q
        .checked_pow(codec.digits() as u32)
        .ok_or(Error::BudgetExceeded {
            needed: u128::MAX,
            budget: cfg.budget,
        })?;
    let needed = total.saturating_mul(gens.len().max(1) as u128);
    if needed > cfg.budget {
        return Err(Error::BudgetExceeded {
            needed,
            budget: cfg.budget,
        });
    }
    if total > u32::MAX as u128 {
        return Err(Error::BudgetExceeded {
            needed,
            budget: cfg.budget,
        });
    }
    let (allowed, label): (Option<HashSet<u64>>, String) = match constraint {
        Constraint::All => (None, "all".into()),
        Constraint::FixedScheme(s) => {
            if s.field() != k || s.degree() != size {
                return Err(Error::InvalidInput(
                    "scheme does not match field and size".into(),
                ));
            }
            let base = s.to_form();
            let codes = k
                .units()
                .iter()
                .map(|c| form_code(&f, &base.scale(c)))
                .collect();
            (Some(codes), format!("scheme {}", base))
        }
        Constraint::FixedDisc(d) => {
            if group == Group::GL {
                return Err(Error::InvalidInput(
                    "a fixed discriminant is only preserved by SL".into(),
                ));
            }
            if d.field() != k || d.degree() != size {
                return Err(Error::InvalidInput(
                    "discriminant does not match field and size".into(),
                ));
            }
            (
                Some(HashSet::from([form_code(&f, d)])),
                format!("disc {}", d),
            )
        }
    };
    let members: Vec<u64> = par::filter_range(cfg.exec, total as u64, |c| {
        let m = codec.decode(c as u128);
        let d = codec.disc_code(&m);
        d != 0 && allowed.as_ref().is_none_or(|a| a.contains(&d))
    });
    let mut pos = vec![u32::MAX; total as usize];
    for (i, &c) in members.iter().enumerate() {
        pos[c as usize] = i as u32;
    }
    let mut parent: Vec<u32> = (0..members.len() as u32).collect();
    for g in &gens {
        let images: Vec<u32> = par::map(cfg.exec, &members, |&c| {
            let mut m = codec.decode(c as u128);
            codec.apply(&mut m, g);
            pos[codec.encode(&m) as usize]
        });
        for (i, &img) in images.iter().enumerate() {
            if img == u32::MAX {
                return Err(Error::ConventionFailure(
                    "group action left the constrained set".into(),
                ));
            }
            let (a, b) = (find(&mut parent, i as u32), find(&mut parent, img));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi as usize] = lo;
            }
        }
    }
    let mut counts = vec![0u64; members.len()];
    for i in 0..members.len() {
        let r = find(&mut parent, i as u32);
        counts[r as usize] += 1;
    }
    let order = group_order(q as u64, size, group);
    let roots: Vec<usize> = (0..members.len()).filter(|&i| counts[i] > 0).collect();
    let orbits = par::map(cfg.exec, &roots, |&i| {
        let m = codec.decode(members[i] as u128);
        let size_o = counts[i];
        let d = codec.disc(&m);
        Orbit {
            code: members[i] as u128,
            rep: codec.to_pencil(&m),
            size: size_o,
            stabilizer: order / size_o as u128,
            disc: BinaryForm::new(k, d.iter().map(|&x| k.from_index(x as u64)).collect()),
            free: codec.is_free(&m),
        }
    });
    let mut root_to_orbit = vec![u32::MAX; members.len()];
    for (oi, &r) in roots.iter().enumerate() {
        root_to_orbit[r] = oi as u32;
    }
    let member_orbit: Vec<u32> = (0..members.len())
        .map(|i| root_to_orbit[find(&mut parent, i as u32) as usize])
        .collect();
    for o in &orbits {
        if !order.is_multiple_of(o.size as u128) {
            return Err(Error::ConventionFailure(format!(
                "orbit size {} does not divide {}",
                o.size, order
            )));
        }
    }
    Ok(OrbitTable {
        field: k.clone(),
        n,
        group,
        mode,
        constraint: label,
        group_order: order,
        total: members.len() as u64,
        orbits,
        member_codes: members,
        member_orbit,
        tables: f.clone(),
    })
}

fn form_code(f: &OracleField, d: &BinaryForm) -> u64 {
    d.coeffs()
        .iter()
        .rev()
        .fold(0u64, |acc, c| acc * f.q as u64 + f.field.index(c))
}

fn check_pair(m: &Pencil, m2: &Pencil) -> Result<()> {
    if m.field() != m2.field() {
        return Err(Error::InvalidInput("pencils over different fields".into()));
    }
    if m.size() != m2.size() {
        return Err(Error::SizeMismatch("pencils of different sizes".into()));
    }
    Ok(())
}

/// Is some `P` in the group carrying `m` to `m2`? Breadth-first search of the orbit of `m`.
pub fn brute_equivalent(m: &Pencil, m2: &Pencil, group: Group, cfg: &OracleConfig) -> Result<bool> {
    check_pair(m, m2)?;
    let k = m.field();
    let f = OracleField::new(k)?;
    if m.is_symmetric() != m2.is_symmetric() {
        return Ok(false);
    }
    let mode = if m.is_symmetric() {
        Mode::Symmetric
    } else {
        Mode::General
    };
    let codec = Codec::new(&f, m.size(), mode);
    if (codec.digits() as u32) * (f.q as f64).log2().ceil() as u32 > 127 {
        return Err(Error::InstanceTooLarge(
            "pencil codes exceed 128 bits".into(),
        ));
    }
    let gens = codec.generators(group);
    let order = group_order(f.q as u64, m.size(), group);
    let needed = order.saturating_mul(gens.len() as u128);
    if needed > cfg.budget {
        return Err(Error::BudgetExceeded {
            needed,
            budget: cfg.budget,
        });
    }
    let start = codec.encode(&codec.from_pencil(m));
    let target = codec.encode(&codec.from_pencil(m2));
    if start == target {
        return Ok(true);
    }
    let mut seen: HashSet<u128> = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        let base = codec.decode(c);
        for g in &gens {
            let mut x = base.clone();
            codec.apply(&mut x, g);
            let e = codec.encode(&x);
            if e == target {
                return Ok(true);
            }
            if seen.insert(e) {
                queue.push_back(e);
            }
        }
    }
    Ok(false)
}

#[derive(Clone, Debug)]
pub struct BruteStabilizer {
    pub order: u64,
    pub elements: Vec<Mat>,
}

/// All `P` in the group with `m . P = m`, by scanning every matrix.
pub fn brute_stabilizer(m: &Pencil, group: Group, cfg: &OracleConfig) -> Result<BruteStabilizer> {
    let k = m.field();
    let f = OracleField::new(k)?;
    let n = m.size();
    let total = (f.q as u128)
        .checked_pow((n * n) as u32)
        .unwrap_or(u128::MAX);
    if total > cfg.budget {
        return Err(Error::BudgetExceeded {
            needed: total,
            budget: cfg.budget,
        });
    }
    let codec = Codec::new(&f, n, Mode::General);
    let target = codec.from_pencil(m);
    let perms = permutations(n);
    let q = f.q as u64;
    let decode_p = |mut c: u64| -> Vec<u16> {
        (0..n * n)
            .map(|_| {
                let d = (c % q) as u16;
                c /= q;
                d
            })
            .collect()
    };
    let hits = par::filter_range(cfg.exec, total as u64, |c| {
        let p = decode_p(c);
        let mut det = 0u16;
        for (perm, odd) in &perms {
            let t = perm
                .iter()
                .enumerate()
                .fold(1u16, |acc, (r, &cc)| f.m(acc, p[r * n + cc]));
            det = if *odd { f.s(det, t) } else { f.a(det, t) };
        }
        if det == 0 || (group == Group::SL && det != 1) {
            return false;
        }
        // tP A P == A for both matrices
        (0..2).all(|mat| {
            let a = &target[mat * n * n..(mat + 1) * n * n];
            (0..n).all(|i| {
                (0..n).all(|j| {
                    let mut s = 0u16;
                    for r in 0..n {
                        if p[r * n + i] == 0 {
                            continue;
                        }
                        let mut inner = 0u16;
                        for c in 0..n {
                            inner = f.a(inner, f.m(a[r * n + c], p[c * n + j]));
                        }
                        s = f.a(s, f.m(p[r * n + i], inner));
                    }
                    s == a[i * n + j]
                })
            })
        })
    });
    let elements = hits
        .iter()
        .take(10_000)
        .map(|&c| {
            let p = decode_p(c);
            Mat::from_rows(
                k,
                (0..n)
                    .map(|i| (0..n).map(|j| k.from_index(p[i * n + j] as u64)).collect())
                    .collect(),
            )
        })
        .collect();
    Ok(BruteStabilizer {
        order: hits.len() as u64,
        elements,
    })
}

/// Discriminant computed by the oracle's own arithmetic.
pub fn oracle_disc(m: &Pencil) -> Result<BinaryForm> {
    let k = m.field();
    let f = OracleField::new(k)?;
    let codec = Codec::new(&f, m.size(), Mode::General);
    let d = codec.disc(&codec.from_pencil(m));
    Ok(BinaryForm::new(
        k,
        d.iter()
            .map(|&x| k.from_index(x as u64))
            .collect::<Vec<Elem>>(),
    ))
}

/// Freeness decided by the oracle's own arithmetic.
pub fn oracle_is_free(m: &Pencil) -> Result<bool> {
    let k = m.field();
    let f = OracleField::new(k)?;
    let codec = Codec::new(&f, m.size(), Mode::General);
    let a = codec.from_pencil(m);
    if codec.disc_code(&a) == 0 {
        return Err(Error::VanishingDiscriminant);
    }
    Ok(codec.is_free(&a))
}
