//! `W_n`-equivariant cohomology of the complement of
//! `{x_i = 0} ∪ {x_i = ζ^k x_j}` in `C^n` through its Orlik–Solomon algebra.
//!
//! Flats of this arrangement are combinatorial: a set of coordinates forced
//! to zero plus blocks of coordinates tied together by `x_i = ζ^a x_j`. Ranks,
//! independence and the no-broken-circuit basis are computed on that
//! description; straightening into the basis uses the circuit relations with
//! integer coefficients, so every trace is an exact integer.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::CycNum;
use crate::polyspace::LabeledCycleType;
use crate::wreath_char::{
    inner_product, statistic_on_table, CharError, ClassFunction, ClassTable, Provenance, Statistic,
    WreathElement,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OsError {
    #[error("size budget exceeded: C({hyperplanes}, {degree}) > {budget}")]
    BudgetExceeded {
        hyperplanes: usize,
        degree: usize,
        budget: u64,
    },
    #[error("no plateau within n_max = {n_max}: values {values:?}")]
    NoPlateau { n_max: u32, values: Vec<String> },
    #[error("non-integral invariant dimension {0}")]
    NonIntegral(String),
    #[error(transparent)]
    Char(#[from] CharError),
}

pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Hyperplane {
    /// `x_i = 0`
    Coord(usize),
    /// `x_i = ζ^k x_j`, `i < j`
    Diff(usize, usize, u32),
}

#[derive(Debug, Clone)]
pub struct Arrangement {
    n: usize,
    d: u32,
    hyperplanes: Vec<Hyperplane>,
    index: HashMap<Hyperplane, usize>,
}

/// The full arrangement: coordinate hyperplanes first, then `Diff` in
/// lexicographic `(i, j, k)` order.
pub fn build_arrangement(n: usize, d: u32) -> Arrangement {
    Arrangement::new(n, d, true)
}

/// Only the `x_i = ζ^k x_j` hyperplanes.
pub fn build_diff_arrangement(n: usize, d: u32) -> Arrangement {
    Arrangement::new(n, d, false)
}

impl Arrangement {
    fn new(n: usize, d: u32, with_coords: bool) -> Self {
        assert!(n >= 1 && d >= 1);
        let mut hyperplanes = Vec::new();
        if with_coords {
            hyperplanes.extend((0..n).map(Hyperplane::Coord));
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..d {
                    hyperplanes.push(Hyperplane::Diff(i, j, k));
                }
            }
        }
        let index = hyperplanes
            .iter()
            .enumerate()
            .map(|(k, &h)| (h, k))
            .collect();
        Arrangement {
            n,
            d,
            hyperplanes,
            index,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }

    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn index_of(&self, h: Hyperplane) -> Option<usize> {
        self.index.get(&h).copied()
    }

    /// Normal vector over `Q(ζ_d)`: `e_i`, or `e_i - ζ^k e_j`.
    pub fn normal_vector(&self, h: Hyperplane) -> Vec<CycNum> {
        let d = self.d;
        let mut v = vec![CycNum::zero(d); self.n];
        match h {
            Hyperplane::Coord(i) => v[i] = CycNum::one(d),
            Hyperplane::Diff(i, j, k) => {
                v[i] = CycNum::one(d);
                v[j] = -CycNum::zeta_pow(d, k as i64);
            }
        }
        v
    }

    /// Image of a hyperplane under `w`, which sends `x` to `y` with
    /// `y_{σ(i)} = ζ^{g_i} x_i`.
    pub fn act(&self, w: &WreathElement, h: Hyperplane) -> Hyperplane {
        let d = self.d;
        match h {
            Hyperplane::Coord(i) => Hyperplane::Coord(w.perm[i]),
            Hyperplane::Diff(i, j, k) => {
                // y_{σi} = ζ^{k + g_i - g_j} y_{σj}
                let e = (k + w.labels[i] + d - w.labels[j]) % d;
                let (a, b) = (w.perm[i], w.perm[j]);
                if a < b {
                    Hyperplane::Diff(a, b, e)
                } else {
                    Hyperplane::Diff(b, a, (d - e) % d)
                }
            }
        }
    }

    /// Index permutation of the hyperplanes induced by `w`.
    pub fn permutation(&self, w: &WreathElement) -> Vec<u16> {
        self.hyperplanes
            .iter()
            .map(|&h| self.index[&self.act(w, h)] as u16)
            .collect()
    }
}

/// Canonical description of an intersection of hyperplanes: for each
/// coordinate, the smallest coordinate of its block (or `ZERO`) and the
/// exponent `a` with `x_i = ζ^a x_rep`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flat {
    rep: Vec<u8>,
    off: Vec<u8>,
}

const ZERO: u8 = u8::MAX;

impl Flat {
    pub fn rank(&self) -> usize {
        self.rep
            .iter()
            .enumerate()
            .filter(|&(i, &r)| r == ZERO || r as usize != i)
            .count()
    }

    pub fn contains(&self, h: Hyperplane, d: u32) -> bool {
        match h {
            Hyperplane::Coord(i) => self.rep[i] == ZERO,
            Hyperplane::Diff(i, j, k) => {
                if self.rep[i] == ZERO {
                    return self.rep[j] == ZERO;
                }
                self.rep[i] == self.rep[j] && (self.off[i] as u32 + d - self.off[j] as u32) % d == k
            }
        }
    }
}

/// Union-find over coordinates with `Z/dZ` offsets and a zero flag per block.
#[derive(Debug, Clone)]
struct FlatBuilder {
    d: u32,
    comp: Vec<u8>,
    off: Vec<u32>,
    zero: Vec<bool>,
    rank: usize,
}

impl FlatBuilder {
    fn new(n: usize, d: u32) -> Self {
        FlatBuilder {
            d,
            comp: (0..n as u8).collect(),
            off: vec![0; n],
            zero: vec![false; n],
            rank: 0,
        }
    }

    fn mark_zero(&mut self, c: u8) -> bool {
        if self.zero[c as usize] {
            return false;
        }
        self.zero[c as usize] = true;
        true
    }

    /// Adds a hyperplane; returns whether the rank went up.
    fn add(&mut self, h: Hyperplane) -> bool {
        let grew = match h {
            Hyperplane::Coord(i) => {
                let c = self.comp[i];
                self.mark_zero(c)
            }
            Hyperplane::Diff(i, j, k) => {
                let (ci, cj) = (self.comp[i], self.comp[j]);
                let d = self.d;
                if ci == cj {
                    let consistent = (self.off[i] + d - self.off[j]) % d == k;
                    if consistent {
                        false
                    } else {
                        self.mark_zero(ci)
                    }
                } else if self.zero[ci as usize] && self.zero[cj as usize] {
                    false
                } else {
                    // x_m = ζ^{off_m - off_j + off_i - k} x_{root(ci)} for m in cj
                    let shift = (self.off[i] + 2 * d - self.off[j] - k) % d;
                    let z = self.zero[ci as usize] || self.zero[cj as usize];
                    for m in 0..self.comp.len() {
                        if self.comp[m] == cj {
                            self.comp[m] = ci;
                            self.off[m] = (self.off[m] + shift) % d;
                        }
                    }
                    self.zero[ci as usize] = z;
                    true
                }
            }
        };
        if grew {
            self.rank += 1;
        }
        grew
    }

    fn flat(&self) -> Flat {
        let n = self.comp.len();
        let mut rep = vec![0u8; n];
        let mut off = vec![0u8; n];
        let mut first: HashMap<u8, usize> = HashMap::new();
        for i in 0..n {
            let c = self.comp[i];
            if self.zero[c as usize] {
                rep[i] = ZERO;
                continue;
            }
            let r = *first.entry(c).or_insert(i);
            rep[i] = r as u8;
            off[i] = ((self.off[i] + self.d - self.off[r]) % self.d) as u8;
        }
        Flat { rep, off }
    }
}

impl Arrangement {
    /// Flat spanned by a set of hyperplanes and whether the set is independent.
    pub fn flat_of(&self, set: &[u16]) -> (Flat, bool) {
        let mut b = FlatBuilder::new(self.n, self.d);
        let mut independent = true;
        for &h in set {
            independent &= b.add(self.hyperplanes[h as usize]);
        }
        (b.flat(), independent)
    }

    /// Smallest hyperplane containing the flat.
    pub fn min_containing(&self, flat: &Flat) -> Option<u16> {
        self.hyperplanes
            .iter()
            .position(|&h| flat.contains(h, self.d))
            .map(|k| k as u16)
    }

    /// Every hyperplane containing the flat.
    pub fn hyperplanes_containing(&self, flat: &Flat) -> Vec<u16> {
        (0..self.len() as u16)
            .filter(|&k| flat.contains(self.hyperplanes[k as usize], self.d))
            .collect()
    }
}

/// One graded piece of the Orlik–Solomon algebra.
#[derive(Debug, Clone)]
pub struct OsComponent {
    pub degree: usize,
    pub nbc: Vec<Vec<u16>>,
    pub flats: Vec<Flat>,
    index: HashMap<Vec<u16>, u32>,
}

impl OsComponent {
    pub fn rank(&self) -> usize {
        self.nbc.len()
    }

    pub fn index_of(&self, set: &[u16]) -> Option<u32> {
        self.index.get(set).copied()
    }
}

/// Sparse integer vector over an NBC basis, sorted by index.
pub type Sparse = Vec<(u32, i64)>;

/// The Orlik–Solomon algebra up to a degree bound.
#[derive(Debug, Clone)]
pub struct OsAlgebra {
    arr: Arrangement,
    comps: Vec<OsComponent>,
}

impl OsAlgebra {
    /// NBC bases in degrees `0..=max_degree`, subject to the budget on
    /// `C(#hyperplanes, max_degree)`.
    pub fn new(arr: Arrangement, max_degree: usize, budget: u64) -> Result<Self, OsError> {
        let max_degree = max_degree.min(arr.n());
        let subsets = binomial(BigUint::from(arr.len()), BigUint::from(max_degree));
        if subsets > BigUint::from(budget) {
            return Err(OsError::BudgetExceeded {
                hyperplanes: arr.len(),
                degree: max_degree,
                budget,
            });
        }
        let mut comps = Vec::with_capacity(max_degree + 1);
        let mut current: Vec<Vec<u16>> = vec![Vec::new()];
        for degree in 0..=max_degree {
            if degree > 0 {
                current = extend_nbc(&arr, &current);
            }
            current.sort();
            let flats: Vec<Flat> = current.iter().map(|s| arr.flat_of(s).0).collect();
            let index = current
                .iter()
                .enumerate()
                .map(|(k, s)| (s.clone(), k as u32))
                .collect();
            comps.push(OsComponent {
                degree,
                nbc: current.clone(),
                flats,
                index,
            });
        }
        Ok(OsAlgebra { arr, comps })
    }

    pub fn full(n: usize, d: u32) -> Result<Self, OsError> {
        Self::new(build_arrangement(n, d), n, DEFAULT_BUDGET)
    }

    pub fn arrangement(&self) -> &Arrangement {
        &self.arr
    }

    pub fn components(&self) -> &[OsComponent] {
        &self.comps
    }

    pub fn max_degree(&self) -> usize {
        self.comps.len() - 1
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.comps.iter().map(OsComponent::rank).collect()
    }

    /// Expresses `e_{set}` (`set` sorted ascending) in the NBC basis.
    pub fn straighten(&self, set: &[u16], memo: &mut HashMap<Vec<u16>, Sparse>) -> Sparse {
        let comp = &self.comps[set.len()];
        if let Some(k) = comp.index_of(set) {
            return vec![(k, 1)];
        }
        if let Some(v) = memo.get(set) {
            return v.clone();
        }
        let result = self.straighten_uncached(set, memo);
        memo.insert(set.to_vec(), result.clone());
        result
    }

    fn straighten_uncached(&self, set: &[u16], memo: &mut HashMap<Vec<u16>, Sparse>) -> Sparse {
        let arr = &self.arr;
        let p = set.len();
        // tail flats X_j = H_j ∩ ... ∩ H_p, built from the end
        let mut b = FlatBuilder::new(arr.n, arr.d);
        let mut violation = None;
        for j in (0..p).rev() {
            if !b.add(arr.hyperplanes[set[j] as usize]) {
                return Vec::new();
            }
            if violation.is_none() {
                let h0 = arr
                    .min_containing(&b.flat())
                    .expect("flat lies in its own hyperplanes");
                if h0 != set[j] {
                    violation = Some((j, h0));
                }
            }
        }
        let (j, h0) = violation.expect("independent non-NBC set has a broken circuit");
        // ∂(e_{H0} e_{T}) = 0 for T = (H_j..H_p) gives
        // e_T = Σ_l (-1)^{l+1} e_{H0} e_{T ∖ T_l}
        let mut acc: HashMap<u32, i64> = HashMap::new();
        let tail = &set[j..];
        for l in 0..tail.len() {
            let mut word: Vec<u16> = Vec::with_capacity(p);
            word.extend_from_slice(&set[..j]);
            word.push(h0);
            word.extend(
                tail.iter()
                    .enumerate()
                    .filter(|&(m, _)| m != l)
                    .map(|(_, &h)| h),
            );
            let sign = if l % 2 == 0 { 1 } else { -1 };
            let Some((sorted, s)) = sort_with_sign(&word) else {
                continue;
            };
            for (k, c) in self.straighten(&sorted, memo) {
                *acc.entry(k).or_insert(0) += sign * s * c;
            }
        }
        let mut out: Sparse = acc.into_iter().filter(|&(_, c)| c != 0).collect();
        out.sort_unstable();
        out
    }

    /// Matrix of `w` on degree `i` in the NBC basis; column `b` is the image of
    /// basis element `b`.
    pub fn action_matrix(&self, w: &WreathElement, i: usize) -> Vec<Vec<i64>> {
        let comp = &self.comps[i];
        let perm = self.arr.permutation(w);
        let r = comp.rank();
        let mut m = vec![vec![0i64; r]; r];
        let mut memo = HashMap::new();
        for (col, b) in comp.nbc.iter().enumerate() {
            let image: Vec<u16> = b.iter().map(|&h| perm[h as usize]).collect();
            if let Some((sorted, s)) = sort_with_sign(&image) {
                for (row, c) in self.straighten(&sorted, &mut memo) {
                    m[row as usize][col] += s * c;
                }
            }
        }
        m
    }

    /// `tr(w | H^i)`, visiting only basis elements whose flat `w` fixes.
    pub fn trace(&self, w: &WreathElement, i: usize, memo: &mut HashMap<Vec<u16>, Sparse>) -> i64 {
        let comp = &self.comps[i];
        let perm = self.arr.permutation(w);
        let d = self.arr.d;
        let mut tr = 0;
        let mut image: Vec<u16> = Vec::with_capacity(i);
        for (k, b) in comp.nbc.iter().enumerate() {
            let flat = &comp.flats[k];
            image.clear();
            image.extend(b.iter().map(|&h| perm[h as usize]));
            if !image
                .iter()
                .all(|&h| flat.contains(self.arr.hyperplanes[h as usize], d))
            {
                continue;
            }
            let (sorted, s) = sort_with_sign(&image).expect("image of a basis set has no repeats");
            let v = self.straighten(&sorted, memo);
            if let Ok(pos) = v.binary_search_by_key(&(k as u32), |&(idx, _)| idx) {
                tr += s * v[pos].1;
            }
        }
        tr
    }

    /// Traces on the canonical representative of each type, degrees
    /// `0..=max_degree`, in parallel over types.
    pub fn traces_on(&self, types: &[LabeledCycleType]) -> Vec<Vec<i64>> {
        types
            .par_iter()
            .map_init(HashMap::new, |memo, t| {
                let w = WreathElement::representative(t);
                (0..=self.max_degree())
                    .map(|i| self.trace(&w, i, memo))
                    .collect()
            })
            .collect()
    }
}

/// NBC sets of the next degree: prepend `H < min T` keeping independence and
/// making `H` the smallest hyperplane through the new flat.
fn extend_nbc(arr: &Arrangement, sets: &[Vec<u16>]) -> Vec<Vec<u16>> {
    sets.par_iter()
        .flat_map_iter(|t| {
            let top = t.first().copied().unwrap_or(arr.len() as u16);
            let mut base = FlatBuilder::new(arr.n, arr.d);
            for &h in t {
                base.add(arr.hyperplanes[h as usize]);
            }
            let mut out = Vec::new();
            for h in 0..top {
                let mut b = base.clone();
                if !b.add(arr.hyperplanes[h as usize]) {
                    continue;
                }
                if arr.min_containing(&b.flat()) == Some(h) {
                    let mut s = Vec::with_capacity(t.len() + 1);
                    s.push(h);
                    s.extend_from_slice(t);
                    out.push(s);
                }
            }
            out
        })
        .collect()
}

/// Sorts a word of distinct generators, returning the permutation sign;
/// `None` if a generator repeats (the product vanishes).
pub fn sort_with_sign(word: &[u16]) -> Option<(Vec<u16>, i64)> {
    let mut v = word.to_vec();
    let mut sign = 1;
    for a in 1..v.len() {
        let mut b = a;
        while b > 0 && v[b - 1] > v[b] {
            v.swap(b - 1, b);
            sign = -sign;
            b -= 1;
        }
        if b > 0 && v[b - 1] == v[b] {
            return None;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// Coefficients of `Π_{j<n} (1 + (jd + 1) t)`.
pub fn poincare_product(n: usize, d: u32) -> Vec<u64> {
    let mut c = vec![1u64];
    for j in 0..n as u64 {
        let a = j * d as u64 + 1;
        let mut next = vec![0u64; c.len() + 1];
        for (k, &v) in c.iter().enumerate() {
            next[k] += v;
            next[k + 1] += a * v;
        }
        c = next;
    }
    c
}

/// `tr(· | H^i)` for every degree, as class functions of `W_n`.
#[derive(Debug, Clone)]
pub struct GradedCharacter {
    pub n: u32,
    pub d: u32,
    pub table: Arc<ClassTable>,
    pub degrees: Vec<ClassFunction>,
}

impl GradedCharacter {
    pub fn degree(&self, i: usize) -> &ClassFunction {
        &self.degrees[i]
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.len() - 1
    }

    /// `dim H^i`, the trace at the identity.
    pub fn dimension(&self, i: usize) -> i64 {
        let id = LabeledCycleType::from_cycles(self.d, (0..self.n).map(|_| (1, 0)));
        self.degrees[i]
            .value(&id)
            .and_then(|v| v.to_rational().ok())
            .and_then(|r| r.to_integer().to_i64())
            .expect("identity trace is an integer")
    }
}

pub fn graded_character(n: u32, d: u32) -> Result<GradedCharacter, OsError> {
    graded_character_upto(n, d, n as usize)
}

/// Graded character in degrees `0..=min(i_max, n)`.
pub fn graded_character_upto(n: u32, d: u32, i_max: usize) -> Result<GradedCharacter, OsError> {
    let table = ClassTable::new(d, n);
    if n == 0 {
        let one = ClassFunction::new(
            table.clone(),
            vec![CycNum::one(d)],
            Provenance::FromCohomology { degree: 0 },
        );
        return Ok(GradedCharacter {
            n,
            d,
            table,
            degrees: vec![one],
        });
    }
    let alg = OsAlgebra::new(build_arrangement(n as usize, d), i_max, DEFAULT_BUDGET)?;
    let traces = alg.traces_on(table.types());
    let degrees = (0..=alg.max_degree())
        .map(|i| {
            let values = traces.iter().map(|tr| CycNum::from_int(d, tr[i])).collect();
            ClassFunction::new(
                table.clone(),
                values,
                Provenance::FromCohomology { degree: i as u32 },
            )
        })
        .collect();
    Ok(GradedCharacter {
        n,
        d,
        table,
        degrees,
    })
}

/// `⟨P_n, tr(· | H^i_n)⟩` for a single `n`. Traces are only computed on the
/// classes where `P_n` is nonzero.
pub fn inner_product_with_cohomology(p: &Statistic, i: usize, n: u32) -> Result<CycNum, OsError> {
    let d = p.d();
    let table = ClassTable::new(d, n);
    let pn = statistic_on_table(p, &table);
    if i > n as usize {
        return Ok(CycNum::zero(d));
    }
    let support: Vec<usize> = (0..table.len())
        .filter(|&k| !pn.values()[k].is_zero())
        .collect();
    if support.is_empty() {
        return Ok(CycNum::zero(d));
    }
    let alg = OsAlgebra::new(build_arrangement(n as usize, d), i, DEFAULT_BUDGET)?;
    let types: Vec<LabeledCycleType> = support.iter().map(|&k| table.types()[k].clone()).collect();
    let traces = alg.traces_on(&types);
    let mut acc = CycNum::zero(d);
    for (&k, tr) in support.iter().zip(&traces) {
        if tr[i] == 0 {
            continue;
        }
        let w = BigRational::from_integer(BigInt::from(table.sizes()[k].clone()) * tr[i]);
        acc = &acc + &pn.values()[k].scale(&w);
    }
    let order = BigRational::from_integer(BigInt::from(table.group_order().clone()));
    Ok(acc.scale(&order.recip()))
}

#[derive(Debug, Clone, Serialize)]
pub struct StableProduct {
    pub degree: usize,
    pub value: CycNum,
    pub plateau_onset: u32,
    pub n_max: u32,
    pub values: Vec<(u32, CycNum)>,
}

impl StableProduct {
    /// Length of the run of equal values ending at `n_max`.
    pub fn plateau_length(&self) -> usize {
        let last = &self.values.last().expect("non-empty").1;
        self.values
            .iter()
            .rev()
            .take_while(|(_, v)| v == last)
            .count()
    }
}

/// Default search bound `i + deg(P) + 3`, with `X[k, ·]` of weight `k`.
pub fn default_n_max(p: &Statistic, i: usize) -> u32 {
    i as u32 + p.weighted_degree() + 3
}

/// `⟨P_n, H^i_n⟩` for `n = max(i, 1) ..= n_max`; the value is the one shared
/// by the run of equal results ending at `n_max`, which must have length >= 2.
pub fn stable_inner_product(p: &Statistic, i: usize, n_max: u32) -> Result<StableProduct, OsError> {
    let start = (i as u32).max(1);
    let mut values = Vec::new();
    for n in start..=n_max {
        values.push((n, inner_product_with_cohomology(p, i, n)?));
    }
    let no_plateau = || OsError::NoPlateau {
        n_max,
        values: values.iter().map(|(n, v)| format!("n={n}: {v}")).collect(),
    };
    if values.len() < 2 || values[values.len() - 1].1 != values[values.len() - 2].1 {
        return Err(no_plateau());
    }
    let value = values.last().unwrap().1.clone();
    let run = values.iter().rev().take_while(|(_, v)| *v == value).count();
    let plateau_onset = values[values.len() - run].0;
    Ok(StableProduct {
        degree: i,
        value,
        plateau_onset,
        n_max,
        values,
    })
}

/// `dim (H^i_n)^{W_{n-a}}`, with `W_{n-a}` acting on the first `n - a`
/// coordinates.
pub fn invariant_dimension(i: usize, n: u32, a: u32, d: u32) -> Result<u64, OsError> {
    assert!(a <= n);
    if i > n as usize {
        return Ok(0);
    }
    let sub = ClassTable::new(d, n - a);
    let embedded: Vec<LabeledCycleType> =
        sub.types().iter().map(|t| t.with_fixed_points(a)).collect();
    let traces = if n == 0 {
        vec![vec![1]]
    } else {
        let alg = OsAlgebra::new(build_arrangement(n as usize, d), i, DEFAULT_BUDGET)?;
        alg.traces_on(&embedded)
    };
    let mut acc = BigInt::zero();
    for (size, tr) in sub.sizes().iter().zip(&traces) {
        acc += BigInt::from(size.clone()) * tr[i];
    }
    let order = BigInt::from(sub.group_order().clone());
    if (&acc % &order) != BigInt::zero() || acc < BigInt::zero() {
        return Err(OsError::NonIntegral(format!("{acc}/{order}")));
    }
    Ok((acc / order).to_u64().expect("dimension fits in u64"))
}

/// Graded ranks of the Orlik–Solomon algebra of `{x_i = ζ^k x_j}` alone,
/// the algebra generated by `e_{a,g,b}` with its quadratic relations.
pub fn agd_algebra(n: usize, d: u32) -> Result<Vec<usize>, OsError> {
    let arr = build_diff_arrangement(n, d);
    let top = n.saturating_sub(1);
    Ok(OsAlgebra::new(arr, top, DEFAULT_BUDGET)?.ranks())
}

/// Both sides of the tensor bound
/// `dim (H^i)^{W_{n-a}} <= d^a · dim ((Λ[y_1..y_n] ⊗ A(1)_n)_i)^{S_{n-a}}`,
/// where `Λ` is the exterior algebra with `S_n` permuting generators and
/// `A(1)_n` the Orlik–Solomon algebra of the braid arrangement.
pub fn tensor_bound(i: usize, n: u32, a: u32, d: u32) -> Result<(u64, u64), OsError> {
    let lhs = invariant_dimension(i, n, a, d)?;
    let braid = OsAlgebra::new(
        build_diff_arrangement(n as usize, 1),
        n as usize,
        DEFAULT_BUDGET,
    )?;
    let sub = ClassTable::new(1, n - a);
    let embedded: Vec<LabeledCycleType> =
        sub.types().iter().map(|t| t.with_fixed_points(a)).collect();
    let braid_traces = braid.traces_on(&embedded);
    let mut acc = BigInt::zero();
    for ((t, size), tr_a) in embedded.iter().zip(sub.sizes()).zip(&braid_traces) {
        let ext = exterior_traces(t, n as usize);
        let mut tr = 0i64;
        for j in 0..=i {
            let k = i - j;
            if j < ext.len() && k < tr_a.len() {
                tr += ext[j] * tr_a[k];
            }
        }
        acc += BigInt::from(size.clone()) * tr;
    }
    let order = BigInt::from(sub.group_order().clone());
    let rhs_inv = (acc / order).to_u64().expect("nonnegative dimension");
    Ok((lhs, (d as u64).pow(a) * rhs_inv))
}

/// `tr(σ | Λ^j)` for the permutation representation: coefficients of
/// `Π_cycles (1 - (-t)^len)`.
fn exterior_traces(t: &LabeledCycleType, n: usize) -> Vec<i64> {
    let mut c = vec![0i64; n + 1];
    c[0] = 1;
    for (len, _) in t.cycles() {
        let len = len as usize;
        let coeff = if len % 2 == 1 { 1 } else { -1 };
        for k in (len..=n).rev() {
            c[k] += coeff * c[k - len];
        }
    }
    c
}

/// `Σ_i (-1)^i q^{n-i} ⟨φ, tr(·|H^i_n)⟩`.
pub fn lefschetz_side(
    phi: &ClassFunction,
    ch: &GradedCharacter,
    q: u64,
) -> Result<CycNum, OsError> {
    let n = ch.n;
    let d = ch.d;
    let mut acc = CycNum::zero(d);
    for i in 0..=ch.max_degree() {
        let ip = inner_product(phi, ch.degree(i))?;
        let w = BigInt::from(q).pow(n - i as u32) * if i % 2 == 0 { 1 } else { -1 };
        acc = &acc + &ip.scale(&BigRational::from_integer(w));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wreath_char::parse_statistic;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::{BTreeMap, BTreeSet};

    fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
        let mut r = 1u64;
        b %= m;
        while e > 0 {
            if e & 1 == 1 {
                r = (r as u128 * b as u128 % m as u128) as u64;
            }
            b = (b as u128 * b as u128 % m as u128) as u64;
            e >>= 1;
        }
        r
    }

    fn is_prime(n: u64) -> bool {
        n > 1 && (2..).take_while(|k| k * k <= n).all(|k| n % k != 0)
    }

    /// A prime `p ≡ 1 mod 12`, large enough that the matroid over `F_p`
    /// is the one over `C`.
    fn prime_1_mod_12() -> u64 {
        (1_000_000u64..)
            .find(|&p| p % 12 == 1 && is_prime(p))
            .unwrap()
    }

    /// Primitive `d`-th root of unity mod `p`.
    fn root_of_unity(p: u64, d: u64) -> u64 {
        let cofactors: Vec<u64> = (2..=d).filter(|r| d % r == 0 && is_prime(*r)).collect();
        (2..p)
            .map(|g| mod_pow(g, (p - 1) / d, p))
            .find(|&z| cofactors.iter().all(|&r| mod_pow(z, d / r, p) != 1))
            .unwrap()
    }

    fn rank_mod_p(rows: &[Vec<u64>], p: u64) -> usize {
        let mut m: Vec<Vec<u64>> = rows.to_vec();
        let cols = m.first().map_or(0, Vec::len);
        let mut r = 0;
        for c in 0..cols {
            let Some(piv) = (r..m.len()).find(|&k| m[k][c] != 0) else {
                continue;
            };
            m.swap(r, piv);
            let inv = mod_pow(m[r][c], p - 2, p);
            for k in 0..m.len() {
                if k != r && m[k][c] != 0 {
                    let f = m[k][c] * inv % p;
                    for j in 0..cols {
                        m[k][j] = (m[k][j] + p - f * m[r][j] % p) % p;
                    }
                }
            }
            r += 1;
        }
        r
    }

    /// Poincaré polynomial from the intersection lattice over `F_p`:
    /// flats as closed sets of hyperplanes, `π(t) = Σ_X |μ(X)| t^{rk X}`.
    fn lattice_poincare(n: usize, d: u32, with_coords: bool) -> Vec<u64> {
        let p = prime_1_mod_12();
        let z = root_of_unity(p, d as u64);
        let mut normals: Vec<Vec<u64>> = Vec::new();
        if with_coords {
            for i in 0..n {
                let mut v = vec![0; n];
                v[i] = 1;
                normals.push(v);
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..d as u64 {
                    let mut v = vec![0; n];
                    v[i] = 1;
                    v[j] = (p - mod_pow(z, k, p)) % p;
                    normals.push(v);
                }
            }
        }
        let m = normals.len();
        let closure = |set: &BTreeSet<usize>| -> BTreeSet<usize> {
            let rows: Vec<Vec<u64>> = set.iter().map(|&k| normals[k].clone()).collect();
            let r = rank_mod_p(&rows, p);
            (0..m)
                .filter(|&h| {
                    let mut rr = rows.clone();
                    rr.push(normals[h].clone());
                    rank_mod_p(&rr, p) == r
                })
                .collect()
        };
        let mut by_rank: Vec<BTreeSet<BTreeSet<usize>>> = vec![BTreeSet::from([BTreeSet::new()])];
        for r in 1..=n {
            let mut next = BTreeSet::new();
            for x in &by_rank[r - 1] {
                for h in 0..m {
                    if !x.contains(&h) {
                        let mut s = x.clone();
                        s.insert(h);
                        next.insert(closure(&s));
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            by_rank.push(next);
        }
        let mut mu: BTreeMap<BTreeSet<usize>, i64> = BTreeMap::new();
        let mut poly = vec![0u64; by_rank.len()];
        for (r, level) in by_rank.iter().enumerate() {
            for x in level {
                let v = if r == 0 {
                    1
                } else {
                    -mu.iter()
                        .filter(|(y, _)| y.is_subset(x) && *y != x)
                        .map(|(_, v)| v)
                        .sum::<i64>()
                };
                mu.insert(x.clone(), v);
                poly[r] += v.unsigned_abs();
            }
        }
        poly
    }

    #[test]
    fn arrangement_sizes() {
        assert_eq!(build_arrangement(2, 2).len(), 4);
        assert_eq!(build_arrangement(1, 5).len(), 1);
        assert_eq!(build_arrangement(3, 1).len(), 6);
        for n in 1..=5 {
            for d in 1..=4 {
                assert_eq!(
                    build_arrangement(n, d).len(),
                    n + d as usize * n * (n - 1) / 2
                );
            }
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(OsAlgebra::full(2, 2).unwrap().ranks(), vec![1, 4, 3]);
        assert_eq!(OsAlgebra::full(1, 7).unwrap().ranks(), vec![1, 1]);
        assert_eq!(OsAlgebra::full(3, 2).unwrap().ranks(), vec![1, 9, 23, 15]);
    }

    #[test]
    fn ranks_match_lattice_oracle() {
        for n in 1..=4usize {
            for d in 1..=3u32 {
                let ranks: Vec<u64> = OsAlgebra::full(n, d)
                    .unwrap()
                    .ranks()
                    .iter()
                    .map(|&r| r as u64)
                    .collect();
                assert_eq!(ranks, lattice_poincare(n, d, true), "n={n} d={d}");
                assert_eq!(ranks, poincare_product(n, d), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn agd_ranks_match_lattice_oracle() {
        assert_eq!(agd_algebra(2, 1).unwrap(), vec![1, 1]);
        assert_eq!(agd_algebra(2, 2).unwrap(), vec![1, 2]);
        // the two lines x_1 = ±x_2 meet only at the origin
        let full = OsAlgebra::new(build_diff_arrangement(2, 2), 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(full.ranks(), vec![1, 2, 1]);
        for n in 2..=4usize {
            for d in 1..=3u32 {
                let alg = OsAlgebra::new(build_diff_arrangement(n, d), n, DEFAULT_BUDGET).unwrap();
                let mut ranks: Vec<u64> = alg.ranks().iter().map(|&r| r as u64).collect();
                while ranks.last() == Some(&0) {
                    ranks.pop();
                }
                assert_eq!(ranks, lattice_poincare(n, d, false), "n={n} d={d}");
                assert_eq!(ranks[1], d as u64 * (n * (n - 1) / 2) as u64);
            }
        }
    }

    /// Rank over `Q(ζ_d)` by exact elimination agrees with the combinatorial flat rank.
    #[test]
    fn flat_rank_matches_cyclotomic_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (n, d) in [(3usize, 3u32), (4, 2), (3, 4)] {
            let arr = build_arrangement(n, d);
            for _ in 0..40 {
                let k = rng.gen_range(1..=n + 1);
                let mut set: Vec<u16> =
                    (0..k).map(|_| rng.gen_range(0..arr.len()) as u16).collect();
                set.sort();
                set.dedup();
                let (flat, _) = arr.flat_of(&set);
                let mut rows: Vec<Vec<CycNum>> = set
                    .iter()
                    .map(|&h| arr.normal_vector(arr.hyperplanes()[h as usize]))
                    .collect();
                assert_eq!(flat.rank(), cyc_rank(&mut rows, d), "{set:?}");
            }
        }
    }

    fn cyc_rank(m: &mut [Vec<CycNum>], _d: u32) -> usize {
        let cols = m.first().map_or(0, Vec::len);
        let mut r = 0;
        for c in 0..cols {
            let Some(piv) = (r..m.len()).find(|&k| !m[k][c].is_zero()) else {
                continue;
            };
            m.swap(r, piv);
            let inv = m[r][c].inv().unwrap();
            for k in 0..m.len() {
                if k != r && !m[k][c].is_zero() {
                    let f = &m[k][c] * &inv;
                    for j in 0..cols {
                        let t = &f * &m[r][j];
                        m[k][j] = &m[k][j] - &t;
                    }
                }
            }
            r += 1;
        }
        r
    }

    fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let n = a.len();
        let mut c = vec![vec![0; n]; n];
        for i in 0..n {
            for k in 0..n {
                if a[i][k] != 0 {
                    for j in 0..n {
                        c[i][j] += a[i][k] * b[k][j];
                    }
                }
            }
        }
        c
    }

    fn identity(n: usize) -> Vec<Vec<i64>> {
        (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect()
    }

    fn random_element(rng: &mut ChaCha8Rng, d: u32, n: usize) -> WreathElement {
        let mut perm: Vec<usize> = (0..n).collect();
        for k in (1..n).rev() {
            perm.swap(k, rng.gen_range(0..=k));
        }
        WreathElement::new(d, (0..n).map(|_| rng.gen_range(0..d)).collect(), perm)
    }

    #[test]
    fn action_examples() {
        let alg = OsAlgebra::full(2, 1).unwrap();
        let e = WreathElement::identity(1, 2);
        for i in 0..=2 {
            assert_eq!(
                alg.action_matrix(&e, i),
                identity(alg.components()[i].rank())
            );
        }
        let swap = WreathElement::new(1, vec![0, 0], vec![1, 0]);
        let m = alg.action_matrix(&swap, 1);
        assert_eq!((0..3).map(|k| m[k][k]).sum::<i64>(), 1);
    }

    #[test]
    fn functoriality_and_inverses() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (n, d) in [(2usize, 2u32), (3, 1), (3, 2), (3, 3), (4, 2)] {
            let alg = OsAlgebra::full(n, d).unwrap();
            for _ in 0..20 {
                let w1 = random_element(&mut rng, d, n);
                let w2 = random_element(&mut rng, d, n);
                for i in 0..=n {
                    let m12 = alg.action_matrix(&w1.compose(&w2), i);
                    let m1 = alg.action_matrix(&w1, i);
                    let m2 = alg.action_matrix(&w2, i);
                    assert_eq!(m12, mat_mul(&m1, &m2), "n={n} d={d} i={i}");
                    let minv = alg.action_matrix(&w1.inverse(), i);
                    assert_eq!(mat_mul(&m1, &minv), identity(m1.len()));
                }
            }
        }
    }

    #[test]
    fn traces_are_class_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (n, d) in [(3usize, 2u32), (3, 3), (4, 2)] {
            let alg = OsAlgebra::full(n, d).unwrap();
            for _ in 0..20 {
                let w = random_element(&mut rng, d, n);
                let g = random_element(&mut rng, d, n);
                let c = g.compose(&w).compose(&g.inverse());
                let rep = WreathElement::representative(&w.cycle_type());
                let mut memo = HashMap::new();
                for i in 0..=n {
                    let full_trace = {
                        let m = alg.action_matrix(&w, i);
                        (0..m.len()).map(|k| m[k][k]).sum::<i64>()
                    };
                    assert_eq!(alg.trace(&w, i, &mut memo), full_trace);
                    assert_eq!(alg.trace(&c, i, &mut memo), full_trace);
                    assert_eq!(alg.trace(&rep, i, &mut memo), full_trace);
                }
            }
        }
    }

    #[test]
    fn brute_force_characters_d2_n2() {
        let ch = graded_character(2, 2).unwrap();
        let alg = OsAlgebra::full(2, 2).unwrap();
        for w in WreathElement::all(2, 2) {
            for i in 0..=2 {
                let m = alg.action_matrix(&w, i);
                let tr: i64 = (0..m.len()).map(|k| m[k][k]).sum();
                assert_eq!(
                    ch.degree(i).value(&w.cycle_type()).unwrap(),
                    &CycNum::from_int(2, tr)
                );
            }
        }
        assert_eq!(ch.dimension(1), 4);
        assert!(ch.degree(0).values().iter().all(|v| *v == CycNum::one(2)));
    }

    #[test]
    fn stable_products_of_one() {
        let one = Statistic::constant_one(2);
        let s0 = stable_inner_product(&one, 0, 4).unwrap();
        assert_eq!(s0.value, CycNum::one(2));
        // H^1 of the quotient: x_i = 0 and x_i = ±x_j orbits
        let s1 = stable_inner_product(&one, 1, 5).unwrap();
        assert_eq!(s1.value, CycNum::from_int(2, 2));
    }

    #[test]
    fn invariant_dimension_examples() {
        for (n, d) in [(2u32, 2u32), (3, 2), (3, 3)] {
            let dims = poincare_product(n as usize, d);
            for i in 0..=n as usize {
                assert_eq!(invariant_dimension(i, n, n, d).unwrap(), dims[i]);
            }
            assert_eq!(invariant_dimension(0, n, 0, d).unwrap(), 1);
        }
    }

    #[test]
    fn invariant_dimensions_stabilize() {
        // (a, i) -> stable value, constant for n = 4..=6
        let expected = [
            ((0, 0), 1),
            ((0, 1), 2),
            ((0, 2), 2),
            ((1, 0), 1),
            ((1, 1), 4),
            ((1, 2), 8),
        ];
        for ((a, i), v) in expected {
            for n in 4..=6 {
                assert_eq!(
                    invariant_dimension(i, n, a, 2).unwrap(),
                    v,
                    "a={a} i={i} n={n}"
                );
            }
        }
    }

    #[test]
    fn tensor_bound_holds() {
        for n in 1..=3u32 {
            for a in 0..=1u32.min(n) {
                for i in 0..=n as usize {
                    let (lhs, rhs) = tensor_bound(i, n, a, 2).unwrap();
                    assert!(lhs <= rhs, "n={n} a={a} i={i}: {lhs} > {rhs}");
                }
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            OsAlgebra::new(build_arrangement(12, 6), 12, DEFAULT_BUDGET),
            Err(OsError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn sort_sign() {
        assert_eq!(sort_with_sign(&[2, 0, 1]), Some((vec![0, 1, 2], 1)));
        assert_eq!(sort_with_sign(&[1, 0]), Some((vec![0, 1], -1)));
        assert_eq!(sort_with_sign(&[1, 1]), None);
        assert_eq!(sort_with_sign(&[3, 1, 3]), None);
    }

    #[test]
    fn statistic_products_are_real() {
        let p = parse_statistic("X[1,chi 1]*X[1,chi -1]", 4).unwrap();
        let v = inner_product_with_cohomology(&p, 1, 3).unwrap();
        assert!(v.is_rational());
    }
}
