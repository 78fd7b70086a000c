//! Character calculus on `W_n = (Z/dZ)^n ⋊ S_n`: conjugacy classes, the
//! statistic language of character polynomials, class functions and their
//! inner products.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::{parse_rational, CycNum};
use crate::polyspace::{delta_indicator, LabeledCycleType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("cycle length must be >= 1 (byte {offset})")]
    ZeroCycleLength { offset: usize },
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u32, right: u32 },
    #[error("degree mismatch: n = {left} vs n = {right}")]
    DegreeMismatch { left: u32, right: u32 },
}

/// `X[i, g k]` counts `k`-labeled `i`-cycles; `X[i, chi j]` is
/// `Σ_k ζ_d^{jk} X[i, g k]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum AtomKind {
    G(u32),
    Chi(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub len: u32,
    pub kind: AtomKind,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(BigRational),
    Atom(Atom),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// Product of raw label counts `Π X[i, g k]^e`, sorted by `(i, k)`.
pub type Monomial = Vec<((u32, u32), u32)>;

/// Cyclotomic-linear combination of monomials in the `X[i, g k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    d: u32,
    terms: BTreeMap<Monomial, CycNum>,
}

impl NormalForm {
    pub fn constant(d: u32, c: CycNum) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        NormalForm { d, terms }
    }

    fn raw_atom(d: u32, len: u32, k: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![((len, k % d), 1)], CycNum::one(d));
        NormalForm { d, terms }
    }

    pub fn atom(d: u32, len: u32, kind: AtomKind) -> Self {
        match kind {
            AtomKind::G(k) => Self::raw_atom(d, len, k),
            AtomKind::Chi(j) => {
                let mut out = Self::constant(d, CycNum::zero(d));
                for k in 0..d {
                    let coeff = CycNum::zeta_pow(d, (j as i64) * (k as i64));
                    out = out.add(&Self::raw_atom(d, len, k).scale(&coeff));
                }
                out
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, CycNum> {
        &self.terms
    }

    fn insert(&mut self, m: Monomial, c: CycNum) {
        let entry = self
            .terms
            .entry(m.clone())
            .or_insert_with(|| CycNum::zero(self.d));
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        NormalForm {
            d: self.d,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &CycNum) -> Self {
        let mut out = NormalForm::constant(self.d, CycNum::zero(self.d));
        for (m, v) in &self.terms {
            out.insert(m.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = NormalForm::constant(self.d, CycNum::zero(self.d));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert(mul_monomials(ma, mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = NormalForm::constant(self.d, CycNum::one(self.d));
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Degree with `X[i, ·]` weighted by `i`.
    pub fn weighted_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|((len, _), e)| len * e).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn evaluate(&self, t: &LabeledCycleType) -> CycNum {
        let mut acc = CycNum::zero(self.d);
        for (m, c) in &self.terms {
            let mut prod: i64 = 1;
            for &((len, k), e) in m {
                prod *= (t.multiplicity(len, k) as i64).pow(e);
                if prod == 0 {
                    break;
                }
            }
            if prod != 0 {
                acc = &acc + &c.scale(&BigRational::from_integer(BigInt::from(prod)));
            }
        }
        acc
    }
}

fn mul_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut map: BTreeMap<(u32, u32), u32> = a.iter().copied().collect();
    for &(v, e) in b {
        *map.entry(v).or_insert(0) += e;
    }
    map.into_iter().collect()
}

/// A character polynomial: parsed expression tree plus its expanded normal form.
#[derive(Debug, Clone)]
pub struct Statistic {
    d: u32,
    text: String,
    expr: Expr,
    normal: NormalForm,
}

impl Statistic {
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn normal_form(&self) -> &NormalForm {
        &self.normal
    }

    pub fn weighted_degree(&self) -> u32 {
        self.normal.weighted_degree()
    }

    pub fn from_expr(d: u32, text: impl Into<String>, expr: Expr) -> Self {
        let normal = expand(d, &expr);
        Statistic {
            d,
            text: text.into(),
            expr,
            normal,
        }
    }

    pub fn constant_one(d: u32) -> Self {
        Self::from_expr(d, "1", Expr::Const(BigRational::one()))
    }

    /// Evaluates the expression tree directly.
    pub fn evaluate(&self, t: &LabeledCycleType) -> Result<CycNum, CharError> {
        if t.d() != self.d {
            return Err(CharError::ModulusMismatch {
                left: self.d,
                right: t.d(),
            });
        }
        Ok(eval_expr(self.d, &self.expr, t))
    }

    /// Evaluates the expanded normal form.
    pub fn evaluate_normal(&self, t: &LabeledCycleType) -> Result<CycNum, CharError> {
        if t.d() != self.d {
            return Err(CharError::ModulusMismatch {
                left: self.d,
                right: t.d(),
            });
        }
        Ok(self.normal.evaluate(t))
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

fn eval_expr(d: u32, e: &Expr, t: &LabeledCycleType) -> CycNum {
    match e {
        Expr::Const(r) => CycNum::from_rational(d, r.clone()),
        Expr::Atom(a) => match a.kind {
            AtomKind::G(k) => CycNum::from_int(d, t.multiplicity(a.len, k) as i64),
            AtomKind::Chi(j) => (0..d).fold(CycNum::zero(d), |acc, k| {
                let m = t.multiplicity(a.len, k) as i64;
                if m == 0 {
                    acc
                } else {
                    let z = CycNum::zeta_pow(d, j as i64 * k as i64);
                    &acc + &(&z * &CycNum::from_int(d, m))
                }
            }),
        },
        Expr::Neg(x) => -eval_expr(d, x, t),
        Expr::Add(a, b) => &eval_expr(d, a, t) + &eval_expr(d, b, t),
        Expr::Sub(a, b) => &eval_expr(d, a, t) - &eval_expr(d, b, t),
        Expr::Mul(a, b) => &eval_expr(d, a, t) * &eval_expr(d, b, t),
        Expr::Pow(a, k) => eval_expr(d, a, t).pow(*k),
    }
}

fn expand(d: u32, e: &Expr) -> NormalForm {
    match e {
        Expr::Const(r) => NormalForm::constant(d, CycNum::from_rational(d, r.clone())),
        Expr::Atom(a) => NormalForm::atom(d, a.len, a.kind),
        Expr::Neg(x) => expand(d, x).neg(),
        Expr::Add(a, b) => expand(d, a).add(&expand(d, b)),
        Expr::Sub(a, b) => expand(d, a).add(&expand(d, b).neg()),
        Expr::Mul(a, b) => expand(d, a).mul(&expand(d, b)),
        Expr::Pow(a, k) => expand(d, a).pow(*k),
    }
}

/// Parses a statistic. Grammar:
///
/// ```text
/// expr   := term (('+' | '-') term)*
/// term   := factor ('*' factor)*
/// factor := atom ('^' posint)?
/// atom   := 'X[' posint ',' label ']' | rational | '(' expr ')' | '-' atom
/// label  := ('g' | 'chi') '='? int
/// ```
///
/// Labels are reduced modulo `d`.
pub fn parse_statistic(text: &str, d: u32) -> Result<Statistic, CharError> {
    assert!(d >= 1);
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        d,
    };
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(Statistic::from_expr(d, text.trim(), expr))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    d: u32,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> CharError {
        CharError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), CharError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, CharError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, CharError> {
        let mut lhs = self.factor()?;
        while self.eat(b'*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, CharError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            self.skip_ws();
            let start = self.pos;
            let e = self.digits()?;
            let e: u32 = e.parse().map_err(|_| CharError::Syntax {
                offset: start,
                message: "exponent too large".into(),
            })?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> Result<String, CharError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn signed_int(&mut self) -> Result<i64, CharError> {
        let neg = self.eat(b'-');
        if !neg {
            self.eat(b'+');
        }
        let start = self.pos;
        let v: i64 = self.digits()?.parse().map_err(|_| CharError::Syntax {
            offset: start,
            message: "integer too large".into(),
        })?;
        Ok(if neg { -v } else { v })
    }

    fn atom(&mut self) -> Result<Expr, CharError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.atom()?)))
            }
            Some(b'X') => {
                let offset = self.pos;
                self.pos += 1;
                self.expect(b'[')?;
                self.skip_ws();
                let len_at = self.pos;
                let len: u32 = self.digits()?.parse().map_err(|_| CharError::Syntax {
                    offset: len_at,
                    message: "cycle length too large".into(),
                })?;
                if len == 0 {
                    return Err(CharError::ZeroCycleLength { offset: len_at });
                }
                self.expect(b',')?;
                self.skip_ws();
                let kind = if self.src[self.pos..].starts_with(b"chi") {
                    self.pos += 3;
                    self.eat(b'=');
                    AtomKind::Chi(self.signed_int()?.rem_euclid(self.d as i64) as u32)
                } else if self.src[self.pos..].starts_with(b"g") {
                    self.pos += 1;
                    self.eat(b'=');
                    AtomKind::G(self.signed_int()?.rem_euclid(self.d as i64) as u32)
                } else {
                    return Err(self.error("expected label 'g' or 'chi'"));
                };
                self.expect(b']')?;
                Ok(Expr::Atom(Atom { len, kind, offset }))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let mut text = self.digits()?;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    text.push('/');
                    text.push_str(&self.digits()?);
                }
                parse_rational(&text)
                    .map(Expr::Const)
                    .ok_or(CharError::Syntax {
                        offset: start,
                        message: "invalid rational".into(),
                    })
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// `|W_n| = d^n n!`.
pub fn group_order(d: u32, n: u32) -> BigUint {
    let mut out = BigUint::from(d).pow(n);
    for k in 2..=n {
        out *= k;
    }
    out
}

/// Centralizer order `Π m_{i,c}! (i d)^{m_{i,c}}`.
pub fn centralizer_order(t: &LabeledCycleType) -> BigUint {
    let d = t.d();
    let mut out = BigUint::one();
    for p in t.parts() {
        for k in 2..=p.mult {
            out *= k;
        }
        out *= BigUint::from(p.len * d).pow(p.mult);
    }
    out
}

pub fn class_size(t: &LabeledCycleType) -> BigUint {
    group_order(t.d(), t.weight()) / centralizer_order(t)
}

/// Every labeled cycle type of weight `n` with its class size, in canonical order.
pub fn labeled_cycle_types(d: u32, n: u32) -> Vec<(LabeledCycleType, BigUint)> {
    let mut out = Vec::new();
    let slots: Vec<(u32, u32)> = (1..=n.max(1))
        .flat_map(|len| (0..d).map(move |c| (len, c)))
        .collect();
    let mut chosen: Vec<(u32, u32, u32)> = Vec::new();
    fill_types(&slots, 0, n, &mut chosen, &mut |parts| {
        let t = LabeledCycleType::from_parts(d, parts.iter().copied());
        let size = class_size(&t);
        out.push((t, size));
    });
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn fill_types(
    slots: &[(u32, u32)],
    start: usize,
    remaining: u32,
    chosen: &mut Vec<(u32, u32, u32)>,
    emit: &mut dyn FnMut(&[(u32, u32, u32)]),
) {
    if remaining == 0 {
        emit(chosen);
        return;
    }
    for s in start..slots.len() {
        let (len, c) = slots[s];
        if len > remaining {
            break;
        }
        for mult in 1..=remaining / len {
            chosen.push((len, c, mult));
            fill_types(slots, s + 1, remaining - len * mult, chosen, emit);
            chosen.pop();
        }
    }
}

/// Conjugacy classes of `W_n` with sizes and an index.
#[derive(Debug, Clone)]
pub struct ClassTable {
    d: u32,
    n: u32,
    types: Vec<LabeledCycleType>,
    sizes: Vec<BigUint>,
    index: HashMap<LabeledCycleType, usize>,
    order: BigUint,
}

impl ClassTable {
    pub fn new(d: u32, n: u32) -> Arc<Self> {
        let (types, sizes): (Vec<_>, Vec<_>) = labeled_cycle_types(d, n).into_iter().unzip();
        let index = types
            .iter()
            .cloned()
            .enumerate()
            .map(|(k, t)| (t, k))
            .collect();
        Arc::new(ClassTable {
            d,
            n,
            types,
            sizes,
            index,
            order: group_order(d, n),
        })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn types(&self) -> &[LabeledCycleType] {
        &self.types
    }

    pub fn sizes(&self) -> &[BigUint] {
        &self.sizes
    }

    pub fn group_order(&self) -> &BigUint {
        &self.order
    }

    pub fn index_of(&self, t: &LabeledCycleType) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "kebab-case")]
pub enum Provenance {
    FromStatistic(String),
    FromCohomology { degree: u32 },
    Custom(String),
}

/// A complete table of values on the classes of `W_n`.
#[derive(Debug, Clone)]
pub struct ClassFunction {
    table: Arc<ClassTable>,
    values: Vec<CycNum>,
    provenance: Provenance,
}

impl ClassFunction {
    pub fn new(table: Arc<ClassTable>, values: Vec<CycNum>, provenance: Provenance) -> Self {
        assert_eq!(table.len(), values.len(), "class function must be complete");
        ClassFunction {
            table,
            values,
            provenance,
        }
    }

    pub fn from_fn(
        table: Arc<ClassTable>,
        provenance: Provenance,
        f: impl Fn(&LabeledCycleType) -> CycNum,
    ) -> Self {
        let values = table.types().iter().map(f).collect();
        Self::new(table, values, provenance)
    }

    pub fn table(&self) -> &Arc<ClassTable> {
        &self.table
    }

    pub fn n(&self) -> u32 {
        self.table.n()
    }

    pub fn d(&self) -> u32 {
        self.table.d()
    }

    pub fn values(&self) -> &[CycNum] {
        &self.values
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn value(&self, t: &LabeledCycleType) -> Option<&CycNum> {
        self.table.index_of(t).map(|k| &self.values[k])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LabeledCycleType, &CycNum)> {
        self.table.types().iter().zip(&self.values)
    }

    pub fn add(&self, other: &Self) -> Result<Self, CharError> {
        check_compatible(self, other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::new(
            self.table.clone(),
            values,
            Provenance::Custom("sum".into()),
        ))
    }

    pub fn scale(&self, c: &CycNum) -> Self {
        let values = self.values.iter().map(|a| a * c).collect();
        Self::new(self.table.clone(), values, self.provenance.clone())
    }
}

fn check_compatible(a: &ClassFunction, b: &ClassFunction) -> Result<(), CharError> {
    if a.d() != b.d() {
        return Err(CharError::ModulusMismatch {
            left: a.d(),
            right: b.d(),
        });
    }
    if a.n() != b.n() {
        return Err(CharError::DegreeMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    Ok(())
}

/// `⟨a, b⟩ = (1/|W_n|) Σ_classes size · a · conj(b)`.
pub fn inner_product(a: &ClassFunction, b: &ClassFunction) -> Result<CycNum, CharError> {
    check_compatible(a, b)?;
    let table = &a.table;
    let d = table.d();
    let mut acc = CycNum::zero(d);
    for ((size, va), vb) in table.sizes().iter().zip(&a.values).zip(&b.values) {
        if va.is_zero() || vb.is_zero() {
            continue;
        }
        let w = BigRational::from_integer(BigInt::from(size.clone()));
        acc = &acc + &(va * &vb.conj()).scale(&w);
    }
    let order = BigRational::from_integer(BigInt::from(table.group_order().clone()));
    Ok(acc.scale(&order.recip()))
}

pub fn statistic_to_class_function(s: &Statistic, n: u32) -> ClassFunction {
    let table = ClassTable::new(s.d(), n);
    statistic_on_table(s, &table)
}

pub fn statistic_on_table(s: &Statistic, table: &Arc<ClassTable>) -> ClassFunction {
    assert_eq!(s.d(), table.d());
    ClassFunction::from_fn(
        table.clone(),
        Provenance::FromStatistic(s.text().to_string()),
        |t| s.normal_form().evaluate(t),
    )
}

pub fn delta_class_function(d: u32, n: u32) -> ClassFunction {
    delta_on_table(&ClassTable::new(d, n))
}

pub fn delta_on_table(table: &Arc<ClassTable>) -> ClassFunction {
    let d = table.d();
    ClassFunction::from_fn(table.clone(), Provenance::Custom("delta".into()), |t| {
        CycNum::from_int(d, delta_indicator(t) as i64)
    })
}

/// Element of `W_n` acting on `C^n` by `(w x)_{σ(i)} = ζ_d^{g_i} x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WreathElement {
    pub d: u32,
    pub labels: Vec<u32>,
    pub perm: Vec<usize>,
}

impl WreathElement {
    pub fn new(d: u32, labels: Vec<u32>, perm: Vec<usize>) -> Self {
        assert_eq!(labels.len(), perm.len());
        let labels = labels.into_iter().map(|g| g % d).collect();
        WreathElement { d, labels, perm }
    }

    pub fn identity(d: u32, n: usize) -> Self {
        WreathElement {
            d,
            labels: vec![0; n],
            perm: (0..n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let n = self.n();
        let labels = (0..n)
            .map(|i| (other.labels[i] + self.labels[other.perm[i]]) % self.d)
            .collect();
        let perm = (0..n).map(|i| self.perm[other.perm[i]]).collect();
        WreathElement {
            d: self.d,
            labels,
            perm,
        }
    }

    pub fn inverse(&self) -> Self {
        let n = self.n();
        let mut labels = vec![0; n];
        let mut perm = vec![0; n];
        for i in 0..n {
            perm[self.perm[i]] = i;
            labels[self.perm[i]] = (self.d - self.labels[i]) % self.d;
        }
        WreathElement {
            d: self.d,
            labels,
            perm,
        }
    }

    /// Cycles of the permutation, each labeled by the sum of its labels.
    pub fn cycle_type(&self) -> LabeledCycleType {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut label = 0;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                len += 1;
                label = (label + self.labels[i]) % self.d;
                i = self.perm[i];
            }
            cycles.push((len, label));
        }
        LabeledCycleType::from_cycles(self.d, cycles)
    }

    /// Canonical representative: cycles on consecutive blocks in the type's
    /// order, each label carried by the first point of its block.
    pub fn representative(t: &LabeledCycleType) -> Self {
        let n = t.weight() as usize;
        let mut labels = vec![0; n];
        let mut perm = vec![0; n];
        let mut start = 0;
        for (len, label) in t.cycles() {
            let len = len as usize;
            for k in 0..len {
                perm[start + k] = start + (k + 1) % len;
            }
            labels[start] = label;
            start += len;
        }
        WreathElement {
            d: t.d(),
            labels,
            perm,
        }
    }

    /// Every element of `W_n`, labels varying fastest.
    pub fn all(d: u32, n: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for perm in permutations(n) {
            let total = (d as u64).pow(n as u32);
            for mut code in 0..total {
                let mut labels = vec![0; n];
                for g in labels.iter_mut() {
                    *g = (code % d as u64) as u32;
                    code /= d as u64;
                }
                out.push(WreathElement {
                    d,
                    labels,
                    perm: perm.clone(),
                });
            }
        }
        out
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// Whether every value of `f` is rational.
pub fn is_rational_valued(f: &ClassFunction) -> bool {
    f.values().iter().all(CycNum::is_rational)
}
