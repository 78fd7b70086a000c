//! `Poly_n(F_q^*)`: monic squarefree polynomials of degree `n` with nonzero
//! constant term. Enumeration, sharding, factorization, Frobenius labeled
//! cycle types, and the norm-form search for `f = g^d ∓ t h^d`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::finite_field::{root_label, FieldError, FieldTable, PolyFq};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyspaceError {
    #[error("not squarefree")]
    NotSquarefree,
    #[error(
        "cap exceeded: norm-form search needs n <= {max_n} and q <= {max_q} (got n = {n}, q = {q})"
    )]
    CapExceeded {
        n: usize,
        q: u32,
        max_n: usize,
        max_q: u32,
    },
    #[error("irreducible sieve too large: q^{degree} = {size}")]
    SieveTooLarge { degree: usize, size: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// One block of a labeled cycle type: `mult` cycles of length `len` carrying `label`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CyclePart {
    pub len: u32,
    pub label: u32,
    pub mult: u32,
}

/// Conjugacy class of `W_n = (Z/dZ)^n ⋊ S_n`: a multiset of `(length, label)`
/// pairs, stored sorted with multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LabeledCycleType {
    d: u32,
    parts: Vec<CyclePart>,
}

impl LabeledCycleType {
    /// Builds the canonical type from an unordered list of cycles; labels are
    /// reduced modulo `d`.
    pub fn from_cycles<I>(d: u32, cycles: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        assert!(d >= 1);
        let mut v: Vec<(u32, u32)> = cycles
            .into_iter()
            .map(|(len, label)| {
                assert!(len >= 1, "cycle length must be positive");
                (len, label % d)
            })
            .collect();
        v.sort_unstable();
        let mut parts: Vec<CyclePart> = Vec::new();
        for (len, label) in v {
            match parts.last_mut() {
                Some(p) if p.len == len && p.label == label => p.mult += 1,
                _ => parts.push(CyclePart {
                    len,
                    label,
                    mult: 1,
                }),
            }
        }
        LabeledCycleType { d, parts }
    }

    /// Builds a type from `(len, label, mult)` blocks.
    pub fn from_parts<I>(d: u32, parts: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, u32)>,
    {
        Self::from_cycles(
            d,
            parts
                .into_iter()
                .flat_map(|(len, label, mult)| std::iter::repeat((len, label)).take(mult as usize)),
        )
    }

    pub fn empty(d: u32) -> Self {
        LabeledCycleType {
            d,
            parts: Vec::new(),
        }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn parts(&self) -> &[CyclePart] {
        &self.parts
    }

    /// `n = Σ len · mult`.
    pub fn weight(&self) -> u32 {
        self.parts.iter().map(|p| p.len * p.mult).sum()
    }

    /// `m_{len,label}`.
    pub fn multiplicity(&self, len: u32, label: u32) -> u32 {
        let label = label % self.d;
        self.parts
            .iter()
            .find(|p| p.len == len && p.label == label)
            .map_or(0, |p| p.mult)
    }

    /// Cycles in canonical order, one entry per cycle.
    pub fn cycles(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.parts
            .iter()
            .flat_map(|p| std::iter::repeat((p.len, p.label)).take(p.mult as usize))
    }

    /// Reduces labels to a coarser modulus `e | d`.
    pub fn coarsen(&self, e: u32) -> Self {
        assert!(self.d % e == 0, "{e} must divide {}", self.d);
        Self::from_cycles(e, self.cycles())
    }

    /// The same type with `a` extra fixed points labeled 0.
    pub fn with_fixed_points(&self, a: u32) -> Self {
        Self::from_cycles(
            self.d,
            self.cycles()
                .chain(std::iter::repeat((1, 0)).take(a as usize)),
        )
    }
}

impl fmt::Display for LabeledCycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "({},{})", p.len, p.label)?;
            if p.mult > 1 {
                write!(f, "^{}", p.mult)?;
            }
        }
        write!(f, "}}")
    }
}

/// 1 iff every cycle is labeled with the identity of `Z/dZ`.
pub fn delta_indicator(t: &LabeledCycleType) -> u32 {
    u32::from(t.parts.iter().all(|p| p.label == 0))
}

/// `|Poly_n(F_q^*)|`, the coefficient of `t^n` in
/// `(1 - q t^2) / ((1 - q t)(1 + t))`:
/// `q^n - 2q^{n-1} + 2q^{n-2} - ... ± 2q ∓ 1` for `n >= 2`.
pub fn polyspace_size(q: u64, n: u32) -> u64 {
    // a_k = Σ_{j<=k} q^j (-1)^{k-j}, the coefficient of 1/((1-qt)(1+t))
    let a = |k: u32| -> i128 {
        let q = q as i128;
        (0..=k)
            .map(|j| q.pow(j) * if (k - j) % 2 == 0 { 1 } else { -1 })
            .sum()
    };
    let v = if n >= 2 {
        a(n) - q as i128 * a(n - 2)
    } else {
        a(n)
    };
    v as u64
}

/// Number of monic degree-`n` candidates, `q^n`.
pub fn candidate_count(q: u32, n: usize) -> u64 {
    (q as u64).pow(n as u32)
}

/// Contiguous index range of shard `shard` out of `shards`. Indices order the
/// candidates lexicographically, leading coefficients most significant, so a
/// shard is a block of leading-coefficient prefixes.
pub fn shard_range(total: u64, shard: usize, shards: usize) -> Range<u64> {
    assert!(shards >= 1 && shard < shards);
    let lo = (total as u128 * shard as u128 / shards as u128) as u64;
    let hi = (total as u128 * (shard as u128 + 1) / shards as u128) as u64;
    lo..hi
}

/// Lexicographic stream over all of `Poly_n(F_q^*)`.
pub fn enumerate_polyspace(field: &FieldTable, n: usize) -> impl Iterator<Item = PolyFq> + '_ {
    enumerate_shard(field, n, 0, 1)
}

/// The members of `Poly_n(F_q^*)` whose index falls in the given shard.
pub fn enumerate_shard(
    field: &FieldTable,
    n: usize,
    shard: usize,
    shards: usize,
) -> impl Iterator<Item = PolyFq> + '_ {
    assert!(n >= 1, "degree must be positive");
    let range = shard_range(candidate_count(field.q(), n), shard, shards);
    range
        .map(move |idx| PolyFq::monic_from_index(field, n, idx))
        .filter(move |f| f.coeff(0) != 0 && f.is_squarefree(field))
}

/// Table of monic irreducibles with nonzero constant term, by degree.
#[derive(Debug, Clone)]
pub struct IrreducibleSieve {
    max_degree: usize,
    by_degree: Vec<Vec<PolyFq>>,
    /// `is_irreducible[k][idx]` for the monic degree-`k` polynomial with index `idx`.
    is_irreducible: Vec<Vec<bool>>,
}

pub const SIEVE_SIZE_LIMIT: u64 = 1 << 24;

impl IrreducibleSieve {
    /// Eratosthenes over `F_q[T]`: marks every product of a lower-degree
    /// irreducible with a monic cofactor.
    pub fn build(field: &FieldTable, max_degree: usize) -> Result<Self, PolyspaceError> {
        let q = field.q() as u64;
        let mut is_irreducible: Vec<Vec<bool>> = vec![Vec::new()];
        let mut by_degree: Vec<Vec<PolyFq>> = vec![Vec::new()];
        for k in 1..=max_degree {
            let size = q
                .checked_pow(k as u32)
                .filter(|&s| s <= SIEVE_SIZE_LIMIT)
                .ok_or(PolyspaceError::SieveTooLarge {
                    degree: k,
                    size: q.saturating_pow(k as u32),
                })?;
            let mut irr = vec![true; size as usize];
            for j in 1..=k / 2 {
                for a in &by_degree[j] {
                    for bidx in 0..q.pow((k - j) as u32) {
                        let b = PolyFq::monic_from_index(field, k - j, bidx);
                        let prod = a.mul(field, &b);
                        irr[prod.monic_index(field) as usize] = false;
                    }
                }
            }
            // T divides every polynomial with zero constant term.
            if k >= 2 {
                for idx in (0..size).step_by(q as usize) {
                    irr[idx as usize] = false;
                }
            }
            let list: Vec<PolyFq> = (0..size)
                .filter(|&idx| irr[idx as usize])
                .map(|idx| PolyFq::monic_from_index(field, k, idx))
                .filter(|p| p.coeff(0) != 0)
                .collect();
            by_degree.push(list);
            is_irreducible.push(irr);
        }
        Ok(IrreducibleSieve {
            max_degree,
            by_degree,
            is_irreducible,
        })
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Irreducibles of degree `k` with nonzero constant term.
    pub fn of_degree(&self, k: usize) -> &[PolyFq] {
        &self.by_degree[k]
    }

    pub fn is_irreducible(&self, field: &FieldTable, p: &PolyFq) -> Option<bool> {
        let k = p.degree()?;
        if k == 0 || k > self.max_degree || !p.is_monic() {
            return None;
        }
        Some(self.is_irreducible[k][p.monic_index(field) as usize])
    }
}

/// Trial-division factorizer for squarefree polynomials of degree `<= n`.
#[derive(Debug, Clone)]
pub struct Factorizer<'a> {
    field: &'a FieldTable,
    sieve: IrreducibleSieve,
}

impl<'a> Factorizer<'a> {
    pub fn new(field: &'a FieldTable, n: usize) -> Result<Self, PolyspaceError> {
        Ok(Factorizer {
            field,
            sieve: IrreducibleSieve::build(field, n.div_ceil(2).max(1))?,
        })
    }

    pub fn sieve(&self) -> &IrreducibleSieve {
        &self.sieve
    }

    /// Distinct monic irreducible factors of a monic squarefree `f` with
    /// `f(0) != 0`, in the order found (ascending degree, then sieve order).
    pub fn factorize(&self, f: &PolyFq) -> Result<Vec<PolyFq>, PolyspaceError> {
        let field = self.field;
        let mut rest = f.make_monic(field);
        let mut out = Vec::new();
        let mut k = 1;
        while rest.degree().is_some_and(|m| 2 * k <= m) {
            if k > self.sieve.max_degree() {
                break;
            }
            for p in self.sieve.of_degree(k) {
                if rest.degree().is_some_and(|m| m < k) {
                    break;
                }
                let (quot, rem) = rest.divrem(field, p);
                if rem.is_zero() {
                    if quot.rem(field, p).is_zero() {
                        return Err(PolyspaceError::NotSquarefree);
                    }
                    out.push(p.clone());
                    rest = quot;
                }
            }
            k += 1;
        }
        if rest.degree().is_some_and(|m| m >= 1) {
            if out.contains(&rest) {
                return Err(PolyspaceError::NotSquarefree);
            }
            if rest.degree().unwrap() > 2 * self.sieve.max_degree() + 1 {
                // cofactor may still be composite beyond the sieve's reach
                let sub = Factorizer::new(field, rest.degree().unwrap())?;
                out.extend(sub.factorize(&rest)?);
            } else {
                out.push(rest);
            }
        }
        Ok(out)
    }

    /// Frobenius labeled cycle type `σ_f`: one `(deg p, root_label(p))` per factor.
    pub fn frobenius_type(&self, f: &PolyFq, d: u32) -> Result<LabeledCycleType, PolyspaceError> {
        let factors = self.factorize(f)?;
        let mut cycles = Vec::with_capacity(factors.len());
        for p in &factors {
            cycles.push((p.degree().unwrap() as u32, root_label(p, d, self.field)?));
        }
        Ok(LabeledCycleType::from_cycles(d, cycles))
    }
}

/// Factorizes `f` with a freshly built sieve.
pub fn factorize(field: &FieldTable, f: &PolyFq) -> Result<Vec<PolyFq>, PolyspaceError> {
    let n = f.degree().unwrap_or(0);
    if !f.is_squarefree(field) {
        return Err(PolyspaceError::NotSquarefree);
    }
    Factorizer::new(field, n)?.factorize(f)
}

pub fn frobenius_type(
    f: &PolyFq,
    d: u32,
    field: &FieldTable,
) -> Result<LabeledCycleType, PolyspaceError> {
    let n = f.degree().unwrap_or(0);
    Factorizer::new(field, n)?.frobenius_type(f, d)
}

/// Exact tally of Frobenius types over a set of polynomials.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TypeCounts {
    pub poly_count: u64,
    pub candidates: u64,
    pub counts: BTreeMap<LabeledCycleType, u64>,
}

impl TypeCounts {
    pub fn merge(&mut self, other: TypeCounts) {
        self.poly_count += other.poly_count;
        self.candidates += other.candidates;
        for (t, c) in other.counts {
            *self.counts.entry(t).or_insert(0) += c;
        }
    }
}

/// Hot-path scanner over candidate indices: squarefree rejection by
/// `gcd(f, f') = 1`, distinct-degree splitting by `gcd(f, T^{q^k} - T)`,
/// trial division only when a degree class holds several factors, and labels
/// read off constant terms.
pub struct PolyspaceScanner<'a> {
    field: &'a FieldTable,
    arith: Arith,
    n: usize,
    d: u32,
    /// `dlog(c) mod d` for `c != 0`.
    norm_label: Vec<u32>,
    sieve: Vec<Vec<Vec<u32>>>,
}

impl<'a> PolyspaceScanner<'a> {
    pub fn new(field: &'a FieldTable, n: usize, d: u32) -> Result<Self, PolyspaceError> {
        let qm1 = field.q() - 1;
        if d == 0 || qm1 % d != 0 {
            return Err(FieldError::BadLabelModulus { d, qm1 }.into());
        }
        if n >= MAX_SLICE / 2 {
            return Err(PolyspaceError::SieveTooLarge {
                degree: n,
                size: u64::MAX,
            });
        }
        let max_deg = (n / 2).max(1);
        let sieve = IrreducibleSieve::build(field, max_deg)?;
        let lists = (0..=max_deg)
            .map(|k| {
                sieve
                    .of_degree(k)
                    .iter()
                    .map(|p| p.coeffs().to_vec())
                    .collect()
            })
            .collect();
        let norm_label = (0..field.q())
            .map(|c| field.dlog(c).map_or(u32::MAX, |l| l % d))
            .collect();
        Ok(PolyspaceScanner {
            field,
            arith: Arith::new(field)?,
            n,
            d,
            norm_label,
            sieve: lists,
        })
    }

    pub fn total_candidates(&self) -> u64 {
        candidate_count(self.field.q(), self.n)
    }

    /// Tallies the types of every member of `Poly_n(F_q^*)` with index in `range`.
    pub fn scan_range(&self, range: Range<u64>) -> TypeCounts {
        const CHUNK: u64 = 1 << 14;
        let chunks: Vec<Range<u64>> = (range.start..range.end)
            .step_by(CHUNK as usize)
            .map(|lo| lo..(lo + CHUNK).min(range.end))
            .collect();
        chunks.into_par_iter().map(|r| self.scan_serial(r)).reduce(
            TypeCounts::default,
            |mut a, b| {
                a.merge(b);
                a
            },
        )
    }

    /// Single-threaded scan of `range`.
    pub fn scan_serial(&self, range: Range<u64>) -> TypeCounts {
        let mut ws = Workspace::new(self.n);
        let mut local: HashMap<Vec<(u32, u32)>, u64> = HashMap::new();
        let mut poly_count = 0;
        let candidates = range.end - range.start;
        let mut cycles = Vec::with_capacity(self.n);
        for idx in range {
            if self.classify(idx, &mut ws, &mut cycles) {
                poly_count += 1;
                match local.get_mut(&cycles) {
                    Some(c) => *c += 1,
                    None => {
                        local.insert(cycles.clone(), 1);
                    }
                }
            }
        }
        let mut counts = BTreeMap::new();
        for (cycles, c) in local {
            let t = LabeledCycleType::from_cycles(self.d, cycles);
            *counts.entry(t).or_insert(0) += c;
        }
        TypeCounts {
            poly_count,
            candidates,
            counts,
        }
    }

    /// Label of a monic irreducible of degree `k` with constant term `c0`:
    /// `T^{(q^k-1)/d} = N(root)^{(q-1)/d}` and `N(root) = (-1)^k c0`.
    fn label(&self, k: usize, c0: u32) -> u32 {
        let norm = if k % 2 == 1 { self.arith.neg(c0) } else { c0 };
        self.norm_label[norm as usize]
    }

    /// Fills `cycles` with the sorted `(degree, label)` list of the candidate
    /// with index `idx`; false if it is not in `Poly_n(F_q^*)`.
    fn classify(&self, idx: u64, ws: &mut Workspace, cycles: &mut Vec<(u32, u32)>) -> bool {
        let fld = &self.arith;
        let n = self.n;
        let q = fld.q() as u64;
        let mut x = idx;
        for k in 0..n {
            ws.f[k] = (x % q) as u32;
            x /= q;
        }
        ws.f[n] = 1;
        if ws.f[0] == 0 {
            return false;
        }
        if !squarefree_slice(fld, &ws.f[..=n], &mut ws.a, &mut ws.b) {
            return false;
        }
        cycles.clear();
        let mut deg = n;
        // linear factors by root search
        for a in 1..fld.q() {
            if deg == 0 {
                break;
            }
            if eval_slice(fld, &ws.f[..=deg], a) == 0 {
                deflate_linear(fld, &mut ws.f[..=deg], a);
                deg -= 1;
                cycles.push((1, self.label(1, fld.neg(a))));
            }
        }
        if deg >= 4 {
            // h = T^{q^k} mod f
            let mut h = [0u32; MAX_SLICE];
            h[1] = 1;
            let mut k = 1;
            while 2 * (k + 1) <= deg {
                k += 1;
                if k == 2 {
                    build_frobenius(fld, &ws.f[..=deg], &mut ws.qm);
                    apply_frobenius(fld, &mut h, deg, &ws.qm);
                }
                apply_frobenius(fld, &mut h, deg, &ws.qm);
                // g = gcd(f, h - T)
                ws.a.clear();
                ws.a.extend_from_slice(&ws.f[..=deg]);
                ws.b.clear();
                ws.b.extend_from_slice(&h[..deg]);
                ws.b[1] = fld.sub(ws.b[1], 1);
                trim(&mut ws.b);
                let gdeg = gcd_in_place(fld, &mut ws.a, &mut ws.b);
                if gdeg < k {
                    continue;
                }
                let g = &mut ws.g;
                g.clear();
                g.extend_from_slice(&ws.a[..=gdeg]);
                let inv = fld.inv(g[gdeg]);
                for c in g.iter_mut() {
                    *c = fld.mul(*c, inv);
                }
                // f /= g
                let ok = divides_slice(fld, &ws.f[..=deg], g, &mut ws.quot);
                debug_assert!(ok);
                let qdeg = deg - gdeg;
                ws.f[..=qdeg].copy_from_slice(&ws.quot[..=qdeg]);
                deg = qdeg;
                if deg > 0 {
                    reduce_mod(fld, &mut h, &ws.f[..=deg]);
                    build_frobenius(fld, &ws.f[..=deg], &mut ws.qm);
                }
                if gdeg == k {
                    cycles.push((k as u32, self.label(k, g[0])));
                } else {
                    let mut gd = gdeg;
                    for p in &self.sieve[k] {
                        if gd == k {
                            break;
                        }
                        if divides_slice(fld, &g[..=gd], p, &mut ws.quot) {
                            cycles.push((k as u32, self.label(k, p[0])));
                            gd -= k;
                            g[..=gd].copy_from_slice(&ws.quot[..=gd]);
                        }
                    }
                    cycles.push((k as u32, self.label(k, g[0])));
                }
            }
        }
        if deg >= 1 {
            // what remains has no factor of degree <= deg / 2
            cycles.push((deg as u32, self.label(deg, ws.f[0])));
        }
        cycles.sort_unstable();
        true
    }
}

const MAX_SLICE: usize = 64;

/// Largest `q` the scanner accepts; its operation tables have `q^2` entries.
pub const SCAN_MAX_Q: u32 = 256;

/// Table-driven `F_q` arithmetic for the scanner's inner loops.
struct Arith {
    q: u32,
    p: u32,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl Arith {
    fn new(field: &FieldTable) -> Result<Self, FieldError> {
        let q = field.q();
        if q > SCAN_MAX_Q {
            return Err(FieldError::FieldTooLarge {
                q: q as u64,
                bound: SCAN_MAX_Q,
            });
        }
        let mut add = vec![0; (q * q) as usize];
        let mut mul = vec![0; (q * q) as usize];
        for a in 0..q {
            for b in 0..q {
                add[(a * q + b) as usize] = field.add(a, b) as u16;
                mul[(a * q + b) as usize] = field.mul(a, b) as u16;
            }
        }
        Ok(Arith {
            q,
            p: field.p(),
            add,
            mul,
            neg: (0..q).map(|a| field.neg(a) as u16).collect(),
            inv: (0..q)
                .map(|a| if a == 0 { 0 } else { field.inv(a) as u16 })
                .collect(),
        })
    }

    fn q(&self) -> u32 {
        self.q
    }

    fn p(&self) -> u32 {
        self.p
    }

    #[inline(always)]
    fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.q + b) as usize] as u32
    }

    #[inline(always)]
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.q + b) as usize] as u32
    }

    #[inline(always)]
    fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize] as u32
    }

    #[inline(always)]
    fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero in F_q");
        self.inv[a as usize] as u32
    }
}

struct Workspace {
    f: Vec<u32>,
    a: Vec<u32>,
    b: Vec<u32>,
    g: Vec<u32>,
    quot: Vec<u32>,
    qm: Vec<u32>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace {
            f: vec![0; n + 1],
            a: vec![0; n + 1],
            b: vec![0; n + 1],
            g: vec![0; n + 1],
            quot: vec![0; n + 1],
            qm: vec![0; n * n],
        }
    }
}

/// Reduces `h` (any length, zero-padded) modulo the monic `f` in place.
fn reduce_mod(fld: &Arith, h: &mut [u32], f: &[u32]) {
    let m = f.len() - 1;
    for top in (m..h.len()).rev() {
        let c = h[top];
        if c != 0 {
            let shift = top - m;
            for j in 0..m {
                h[shift + j] = fld.sub(h[shift + j], fld.mul(c, f[j]));
            }
            h[top] = 0;
        }
    }
}

/// Rows `T^{qi} mod f` for `i < deg f`, row stride `deg f`: the matrix of
/// `h -> h^q` on `F_q[T]/f`, linear because `c^q = c` on `F_q`.
fn build_frobenius(fld: &Arith, f: &[u32], qm: &mut [u32]) {
    let m = f.len() - 1;
    let q = fld.q();
    let mut row = [0u32; MAX_SLICE];
    row[0] = 1;
    for i in 0..m {
        qm[i * m..(i + 1) * m].copy_from_slice(&row[..m]);
        if i + 1 == m {
            break;
        }
        for _ in 0..q {
            // row <- row * T mod f
            let top = row[m - 1];
            for j in (1..m).rev() {
                row[j] = fld.sub(row[j - 1], fld.mul(top, f[j]));
            }
            row[0] = fld.neg(fld.mul(top, f[0]));
        }
    }
}

/// `h <- h^q mod f` through the matrix from [`build_frobenius`].
fn apply_frobenius(fld: &Arith, h: &mut [u32], m: usize, qm: &[u32]) {
    let mut out = [0u32; MAX_SLICE];
    for i in 0..m {
        let c = h[i];
        if c == 0 {
            continue;
        }
        let row = &qm[i * m..(i + 1) * m];
        for j in 0..m {
            out[j] = fld.add(out[j], fld.mul(c, row[j]));
        }
    }
    h[..m].copy_from_slice(&out[..m]);
}

/// Euclid on `(a, b)`; leaves the gcd (not normalized) in `a` and returns its degree.
fn gcd_in_place(fld: &Arith, a: &mut Vec<u32>, b: &mut Vec<u32>) -> usize {
    trim(a);
    trim(b);
    while !b.is_empty() {
        rem_in_place(fld, a, b);
        std::mem::swap(a, b);
    }
    a.len() - 1
}

fn eval_slice(fld: &Arith, f: &[u32], x: u32) -> u32 {
    f.iter()
        .rev()
        .fold(0, |acc, &c| fld.add(fld.mul(acc, x), c))
}

/// Divides the monic `f` by `T - a` in place (the root must be exact); the
/// top coefficient slot becomes garbage.
fn deflate_linear(fld: &Arith, f: &mut [u32], a: u32) {
    let n = f.len() - 1;
    let mut carry = 0;
    let mut out = vec![0u32; n];
    for k in (0..n).rev() {
        carry = fld.add(fld.mul(carry, a), f[k + 1]);
        out[k] = carry;
    }
    f[..n].copy_from_slice(&out);
}

/// Whether monic `p` divides monic `f`; on success `quot[..=deg f - deg p]`
/// holds the quotient.
fn divides_slice(fld: &Arith, f: &[u32], p: &[u32], quot: &mut [u32]) -> bool {
    let nd = f.len() - 1;
    let dd = p.len() - 1;
    let mut rem: [u32; 64] = [0; 64];
    rem[..=nd].copy_from_slice(f);
    for k in (0..=nd - dd).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        if c != 0 {
            for j in 0..dd {
                rem[k + j] = fld.sub(rem[k + j], fld.mul(c, p[j]));
            }
        }
    }
    rem[..dd].iter().all(|&r| r == 0)
}

/// `gcd(f, f') == 1` for a monic `f` given as a coefficient slice.
fn squarefree_slice(fld: &Arith, f: &[u32], a: &mut Vec<u32>, b: &mut Vec<u32>) -> bool {
    let n = f.len() - 1;
    a.clear();
    a.extend_from_slice(f);
    b.clear();
    for k in 1..=n {
        let mult = (k as u32) % fld.p();
        let mut v = 0;
        for _ in 0..mult {
            v = fld.add(v, f[k]);
        }
        b.push(v);
    }
    trim(b);
    if b.is_empty() {
        return n == 0;
    }
    // Euclid on (a, b)
    loop {
        if b.is_empty() {
            return a.len() == 1;
        }
        if b.len() == 1 {
            return true;
        }
        rem_in_place(fld, a, b);
        std::mem::swap(a, b);
    }
}

fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn rem_in_place(fld: &Arith, a: &mut Vec<u32>, b: &[u32]) {
    let dd = b.len() - 1;
    let inv = fld.inv(b[dd]);
    while a.len() > dd {
        let top = a.len() - 1;
        let c = fld.mul(a[top], inv);
        if c != 0 {
            let shift = top - dd;
            for j in 0..=dd {
                a[shift + j] = fld.sub(a[shift + j], fld.mul(c, b[j]));
            }
        }
        a.pop();
        trim(a);
    }
}

/// Sign convention of a norm-form witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum NormSign {
    /// `f = g^d - t h^d`
    Minus,
    /// `f = g^d + t h^d`
    Plus,
}

impl NormSign {
    pub const ALL: [NormSign; 2] = [NormSign::Minus, NormSign::Plus];

    pub fn as_i32(self) -> i32 {
        match self {
            NormSign::Minus => -1,
            NormSign::Plus => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormWitness {
    pub g: PolyFq,
    pub h: PolyFq,
    pub sign: NormSign,
}

pub const NORM_FORM_MAX_N: usize = 6;
pub const NORM_FORM_MAX_Q: u32 = 7;

fn check_norm_caps(field: &FieldTable, n: usize) -> Result<(), PolyspaceError> {
    if n > NORM_FORM_MAX_N || field.q() > NORM_FORM_MAX_Q {
        return Err(PolyspaceError::CapExceeded {
            n,
            q: field.q(),
            max_n: NORM_FORM_MAX_N,
            max_q: NORM_FORM_MAX_Q,
        });
    }
    Ok(())
}

/// All polynomials of degree `<= max_deg` (zero included), lexicographic with
/// the top coefficient most significant.
fn all_polys_up_to(field: &FieldTable, max_deg: usize) -> Vec<PolyFq> {
    let q = field.q() as u64;
    let count = q.pow(max_deg as u32 + 1);
    (0..count)
        .map(|mut idx| {
            let mut c = vec![0u32; max_deg + 1];
            for x in c.iter_mut() {
                *x = (idx % q) as u32;
                idx /= q;
            }
            PolyFq::new(c)
        })
        .collect()
}

/// Candidate `(g^d, t h^d)` pairs for the search, with the bounds
/// `d deg g <= n` and `1 + d deg h <= n`.
struct NormSearchSpace {
    g_pows: Vec<(PolyFq, PolyFq)>,
    th_pows: Vec<(PolyFq, PolyFq)>,
}

impl NormSearchSpace {
    fn new(field: &FieldTable, n: usize, d: u32) -> Self {
        let d = d as usize;
        let g_max = n / d;
        let g_pows = all_polys_up_to(field, g_max)
            .into_iter()
            .map(|g| {
                let gd = g.pow(field, d as u32);
                (g, gd)
            })
            .collect();
        let th_pows = if n >= 1 {
            all_polys_up_to(field, (n - 1) / d)
                .into_iter()
                .map(|h| {
                    let thd = h.pow(field, d as u32).mul(field, &PolyFq::x());
                    (h, thd)
                })
                .collect()
        } else {
            Vec::new()
        };
        NormSearchSpace { g_pows, th_pows }
    }

    fn combine(field: &FieldTable, gd: &PolyFq, thd: &PolyFq, sign: NormSign) -> PolyFq {
        match sign {
            NormSign::Minus => gd.sub(field, thd),
            NormSign::Plus => gd.add(field, thd),
        }
    }
}

/// Exhaustive search for `f = g^d - t h^d` (tried first) or `f = g^d + t h^d`.
/// For `d = 1` the trivial witness `g = f, h = 0` is returned.
pub fn norm_form_witness(
    field: &FieldTable,
    f: &PolyFq,
    d: u32,
) -> Result<Option<NormWitness>, PolyspaceError> {
    let n = f.degree().unwrap_or(0);
    check_norm_caps(field, n)?;
    if d == 1 {
        return Ok(Some(NormWitness {
            g: f.clone(),
            h: PolyFq::zero(),
            sign: NormSign::Minus,
        }));
    }
    let space = NormSearchSpace::new(field, n, d);
    for sign in NormSign::ALL {
        for (g, gd) in &space.g_pows {
            for (h, thd) in &space.th_pows {
                if &NormSearchSpace::combine(field, gd, thd, sign) == f {
                    return Ok(Some(NormWitness {
                        g: g.clone(),
                        h: h.clone(),
                        sign,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// First witness of each sign for every degree-`n` polynomial reachable by
/// the search, in the same order [`norm_form_witness`] uses.
#[derive(Debug, Clone)]
pub struct NormFormTable {
    pub minus: HashMap<PolyFq, (PolyFq, PolyFq)>,
    pub plus: HashMap<PolyFq, (PolyFq, PolyFq)>,
}

impl NormFormTable {
    pub fn build(field: &FieldTable, n: usize, d: u32) -> Result<Self, PolyspaceError> {
        check_norm_caps(field, n)?;
        let mut minus = HashMap::new();
        let mut plus = HashMap::new();
        if d == 1 {
            for f in enumerate_polyspace(field, n) {
                minus.insert(f.clone(), (f.clone(), PolyFq::zero()));
                plus.insert(f.clone(), (f, PolyFq::zero()));
            }
            return Ok(NormFormTable { minus, plus });
        }
        let space = NormSearchSpace::new(field, n, d);
        for (sign, table) in [(NormSign::Minus, &mut minus), (NormSign::Plus, &mut plus)] {
            for (g, gd) in &space.g_pows {
                for (h, thd) in &space.th_pows {
                    let f = NormSearchSpace::combine(field, gd, thd, sign);
                    if f.degree() == Some(n) && f.is_monic() {
                        table.entry(f).or_insert_with(|| (g.clone(), h.clone()));
                    }
                }
            }
        }
        Ok(NormFormTable { minus, plus })
    }

    pub fn witness(&self, f: &PolyFq) -> Option<NormWitness> {
        self.minus
            .get(f)
            .map(|(g, h)| (g, h, NormSign::Minus))
            .or_else(|| self.plus.get(f).map(|(g, h)| (g, h, NormSign::Plus)))
            .map(|(g, h, sign)| NormWitness {
                g: g.clone(),
                h: h.clone(),
                sign,
            })
    }

    pub fn has(&self, f: &PolyFq, sign: NormSign) -> bool {
        match sign {
            NormSign::Minus => self.minus.contains_key(f),
            NormSign::Plus => self.plus.contains_key(f),
        }
    }
}
