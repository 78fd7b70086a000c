//! `F_q` with discrete-log tables, and dense polynomials over it.
//!
//! Elements of `F_{p^f}` are encoded as integers in `[0, q)`: the base-`p`
//! digits are the coefficients, constant term first, of a polynomial in a
//! root of the defining modulus. For prime `q` this is the usual residue.

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

pub const DEFAULT_TABLE_BOUND: u32 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("not prime: {0}")]
    NotPrime(u32),
    #[error("field too large: {q} exceeds table bound {bound}")]
    FieldTooLarge { q: u64, bound: u32 },
    #[error("zero modulus")]
    ZeroModulus,
    #[error("label not constant")]
    LabelNotConstant,
    #[error("zero root")]
    ZeroRoot,
    #[error("{d} does not divide q - 1 = {qm1}")]
    BadLabelModulus { d: u32, qm1: u32 },
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u32;
    while (k as u64) * (k as u64) <= n as u64 {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            out.push(k);
            while n % k == 0 {
                n /= k;
            }
        }
        k += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The finite field `F_q`, `q = p^f`, with log/exp tables for a fixed generator.
#[derive(Debug, Clone)]
pub struct FieldTable {
    p: u32,
    f: u32,
    q: u32,
    modulus: Vec<u32>,
    generator: u32,
    log: Vec<u32>,
    exp: Vec<u32>,
}

impl FieldTable {
    pub fn new(p: u32, f: u32) -> Result<Self, FieldError> {
        Self::with_bound(p, f, DEFAULT_TABLE_BOUND)
    }

    pub fn with_bound(p: u32, f: u32, bound: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        assert!(f >= 1, "extension degree must be positive");
        let q64 = (p as u64).checked_pow(f).unwrap_or(u64::MAX);
        if q64 > bound as u64 {
            return Err(FieldError::FieldTooLarge { q: q64, bound });
        }
        let q = q64 as u32;
        let modulus = if f == 1 {
            vec![0, 1]
        } else {
            smallest_irreducible_over_prime(p, f)
        };
        let mut table = FieldTable {
            p,
            f,
            q,
            modulus,
            generator: 0,
            log: Vec::new(),
            exp: Vec::new(),
        };
        table.generator = table.find_generator();
        table.build_tables();
        Ok(table)
    }

    /// Builds `F_q` from the field size, which must be a prime power.
    pub fn from_order(q: u32) -> Result<Self, FieldError> {
        let factors = prime_factors(q as u64);
        if factors.len() != 1 {
            return Err(FieldError::NotPrime(q));
        }
        let p = factors[0] as u32;
        let mut f = 0;
        let mut r = q;
        while r > 1 {
            r /= p;
            f += 1;
        }
        Self::new(p, f)
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn f(&self) -> u32 {
        self.f
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn generator(&self) -> u32 {
        self.generator
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn find_generator(&self) -> u32 {
        let order = (self.q - 1) as u64;
        let primes = prime_factors(order);
        for c in 1..self.q {
            if primes.iter().all(|&r| self.slow_pow(c, order / r) != 1) {
                return c;
            }
        }
        unreachable!("the multiplicative group of a finite field is cyclic")
    }

    fn build_tables(&mut self) {
        let n = (self.q - 1) as usize;
        self.log = vec![0; self.q as usize];
        self.exp = vec![0; n.max(1)];
        let mut x = 1u32;
        for k in 0..n {
            self.exp[k] = x;
            self.log[x as usize] = k as u32;
            x = self.slow_mul(x, self.generator);
        }
        debug_assert_eq!(x, 1);
    }

    fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut out = vec![0; self.f as usize];
        for d in out.iter_mut() {
            *d = a % self.p;
            a /= self.p;
        }
        out
    }

    fn undigits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &x| acc * self.p + x)
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        if self.f == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let p = self.p as u64;
        let f = self.f as usize;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * f - 1];
        for i in 0..f {
            for j in 0..f {
                prod[i + j] = (prod[i + j] + da[i] as u64 * db[j] as u64) % p;
            }
        }
        for top in (f..prod.len()).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for j in 0..f {
                prod[top - f + j] = (prod[top - f + j] + (p - c) * self.modulus[j] as u64) % p;
            }
        }
        let res: Vec<u32> = prod[..f].iter().map(|&x| x as u32).collect();
        self.undigits(&res)
    }

    fn slow_pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.f == 1 {
            let s = a + b;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        } else {
            let (mut a, mut b) = (a, b);
            let mut out = 0;
            let mut place = 1;
            for _ in 0..self.f {
                out += ((a % self.p + b % self.p) % self.p) * place;
                a /= self.p;
                b /= self.p;
                place *= self.p;
            }
            out
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.f == 1 {
            if a == 0 {
                0
            } else {
                self.p - a
            }
        } else {
            let mut a = a;
            let mut out = 0;
            let mut place = 1;
            for _ in 0..self.f {
                out += ((self.p - a % self.p) % self.p) * place;
                a /= self.p;
                place *= self.p;
            }
            out
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] + self.log[b as usize];
        let n = self.q - 1;
        self.exp[(if s >= n { s - n } else { s }) as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero in F_q");
        let n = self.q - 1;
        let l = self.log[a as usize];
        self.exp[(if l == 0 { 0 } else { n - l }) as usize]
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.q - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (e % n)) % n) as usize]
    }

    /// Discrete log base the generator; `None` for zero.
    pub fn dlog(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    pub fn gen_pow(&self, k: u64) -> u32 {
        self.exp[(k % (self.q - 1) as u64) as usize]
    }

    /// Multiplicative order of a nonzero element.
    pub fn order_of(&self, a: u32) -> u64 {
        let n = (self.q - 1) as u64;
        let l = self.log[a as usize] as u64;
        n / num_integer::gcd(n, l)
    }

    /// Label of a `d`-th root of unity `c ∈ F_q`: the `k ∈ Z/dZ` with `c = γ^{k(q-1)/d}`.
    pub fn root_of_unity_label(&self, c: u32, d: u32) -> Option<u32> {
        let n = self.q - 1;
        if d == 0 || n % d != 0 || c == 0 {
            return None;
        }
        let step = n / d;
        let l = self.log[c as usize];
        (l % step == 0).then(|| l / step)
    }
}

/// Smallest monic irreducible of degree `f` over `F_p`, in the integer order
/// of its lower coefficients.
fn smallest_irreducible_over_prime(p: u32, f: u32) -> Vec<u32> {
    let prime = FieldTable::new(p, 1).expect("prime field");
    let count = (p as u64).pow(f);
    for idx in 0..count {
        let poly = PolyFq::monic_from_index(&prime, f as usize, idx);
        if poly.coeffs()[0] != 0 && is_irreducible_brute(&prime, &poly) {
            return poly.coeffs().to_vec();
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub fn is_irreducible_brute(field: &FieldTable, f: &PolyFq) -> bool {
    let n = match f.degree() {
        None | Some(0) => return false,
        Some(n) => n,
    };
    for k in 1..=n / 2 {
        let count = (field.q() as u64).pow(k as u32);
        for idx in 0..count {
            let g = PolyFq::monic_from_index(field, k, idx);
            if f.rem(field, &g).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Dense polynomial over `F_q`, coefficients low degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyFq {
    coeffs: Vec<u32>,
}

impl PolyFq {
    pub fn new(mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PolyFq { coeffs }
    }

    pub fn zero() -> Self {
        PolyFq { coeffs: Vec::new() }
    }

    pub fn constant(c: u32) -> Self {
        Self::new(vec![c])
    }

    /// `T`.
    pub fn x() -> Self {
        PolyFq { coeffs: vec![0, 1] }
    }

    /// `T - a`.
    pub fn linear(field: &FieldTable, a: u32) -> Self {
        PolyFq {
            coeffs: vec![field.neg(a), 1],
        }
    }

    /// The monic polynomial of degree `n` whose lower coefficients are the
    /// base-`q` digits of `idx`, `c_{n-1}` most significant.
    pub fn monic_from_index(field: &FieldTable, n: usize, mut idx: u64) -> Self {
        let q = field.q() as u64;
        let mut coeffs = vec![0u32; n + 1];
        for c in coeffs.iter_mut().take(n) {
            *c = (idx % q) as u32;
            idx /= q;
        }
        coeffs[n] = 1;
        PolyFq { coeffs }
    }

    /// Inverse of [`PolyFq::monic_from_index`] for monic polynomials.
    pub fn monic_index(&self, field: &FieldTable) -> u64 {
        let q = field.q() as u64;
        let n = self.coeffs.len() - 1;
        self.coeffs[..n]
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * q + c as u64)
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == 1
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn coeff(&self, k: usize) -> u32 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn eval(&self, field: &FieldTable, x: u32) -> u32 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| field.add(field.mul(acc, x), c))
    }

    pub fn add(&self, field: &FieldTable, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|k| field.add(self.coeff(k), other.coeff(k)))
                .collect(),
        )
    }

    pub fn sub(&self, field: &FieldTable, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|k| field.sub(self.coeff(k), other.coeff(k)))
                .collect(),
        )
    }

    pub fn scale(&self, field: &FieldTable, c: u32) -> Self {
        Self::new(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, field: &FieldTable, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0u32; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, field: &FieldTable, e: u32) -> Self {
        let mut acc = Self::constant(1);
        for _ in 0..e {
            acc = acc.mul(field, self);
        }
        acc
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn divrem(&self, field: &FieldTable, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let Some(nd) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if nd < dd {
            return (Self::zero(), self.clone());
        }
        let inv_lead = field.inv(divisor.lead());
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u32; nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = field.mul(rem[k + dd], inv_lead);
            quot[k] = c;
            if c == 0 {
                continue;
            }
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = field.sub(rem[k + j], field.mul(c, b));
            }
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn rem(&self, field: &FieldTable, divisor: &Self) -> Self {
        self.divrem(field, divisor).1
    }

    pub fn derivative(&self, field: &FieldTable) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, &c)| {
                    // (k+1)·c computed by repeated addition in characteristic p
                    let mult = ((k + 1) as u32) % field.p();
                    (0..mult).fold(0, |acc, _| field.add(acc, c))
                })
                .collect(),
        )
    }

    pub fn make_monic(&self, field: &FieldTable) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(field, field.inv(self.lead()))
    }

    /// `self · other mod modulus`.
    pub fn mulmod(
        &self,
        field: &FieldTable,
        other: &Self,
        modulus: &Self,
    ) -> Result<Self, FieldError> {
        if modulus.is_zero() {
            return Err(FieldError::ZeroModulus);
        }
        Ok(self.mul(field, other).rem(field, modulus))
    }

    /// `self^exponent mod modulus` by square-and-multiply.
    pub fn powmod(
        &self,
        field: &FieldTable,
        exponent: &BigUint,
        modulus: &Self,
    ) -> Result<Self, FieldError> {
        if modulus.is_zero() {
            return Err(FieldError::ZeroModulus);
        }
        let base = self.rem(field, modulus);
        let mut acc = Self::constant(1).rem(field, modulus);
        for bit in (0..exponent.bits()).rev() {
            acc = acc.mul(field, &acc).rem(field, modulus);
            if exponent.bit(bit) {
                acc = acc.mul(field, &base).rem(field, modulus);
            }
        }
        Ok(acc)
    }

    /// Monic gcd; `gcd(0, 0)` is `0`.
    pub fn gcd(&self, field: &FieldTable, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(field, &b);
            a = b;
            b = r;
        }
        a.make_monic(field)
    }

    pub fn is_squarefree(&self, field: &FieldTable) -> bool {
        let d = self.derivative(field);
        if d.is_zero() {
            return self.degree() == Some(0);
        }
        self.gcd(field, &d).degree() == Some(0)
    }

    /// Human-readable form, highest degree first.
    pub fn display(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let term = match (k, c) {
                (0, c) => c.to_string(),
                (1, 1) => "T".to_string(),
                (1, c) => format!("{c}*T"),
                (k, 1) => format!("T^{k}"),
                (k, c) => format!("{c}*T^{k}"),
            };
            parts.push(term);
        }
        parts.join(" + ")
    }
}

/// `χ(root(p))` as an element of `Z/dZ`: computes `T^{(q^i-1)/d} mod p` in
/// `F_q[T]/(p)`, which must be the constant `γ^{k(q-1)/d}`; returns `k`.
pub fn root_label(p_irr: &PolyFq, d: u32, field: &FieldTable) -> Result<u32, FieldError> {
    let qm1 = field.q() - 1;
    if d == 0 || qm1 % d != 0 {
        return Err(FieldError::BadLabelModulus { d, qm1 });
    }
    if p_irr.coeff(0) == 0 {
        return Err(FieldError::ZeroRoot);
    }
    let i = p_irr
        .degree()
        .filter(|&i| i >= 1)
        .ok_or(FieldError::LabelNotConstant)?;
    let monic = p_irr.make_monic(field);
    let qi = BigUint::from(field.q()).pow(i as u32);
    let exponent = (qi - BigUint::one()) / BigUint::from(d);
    let c = PolyFq::x().powmod(field, &exponent, &monic)?;
    if !c.is_constant() || c.is_zero() {
        return Err(FieldError::LabelNotConstant);
    }
    let value = c.coeff(0);
    let label = field
        .root_of_unity_label(value, d)
        .ok_or(FieldError::LabelNotConstant)?;
    Ok(label)
}

/// Labels of every nonzero `a ∈ F_q` for the linear factor `T - a`:
/// `a^{(q-1)/d} = γ^{k(q-1)/d}` gives `k = dlog(a) mod d`.
pub fn linear_labels(field: &FieldTable, d: u32) -> Vec<u32> {
    let mut out = vec![u32::MAX; field.q() as usize];
    for a in 1..field.q() {
        out[a as usize] = field.dlog(a).unwrap() % d;
    }
    out
}
