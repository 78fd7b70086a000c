//! Exact arithmetic in cyclotomic fields `Q(ζ_m)`.
//!
//! A [`CycNum`] stores a length-`m` coefficient vector `Σ a_k ζ_m^k`. The
//! canonical form is the remainder modulo the `m`-th cyclotomic polynomial,
//! padded with zeros up to length `m`, so equality of values is equality of
//! vectors.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("not rational")]
    NotRational,
}

/// Integer coefficients of `Φ_m`, low degree first.
fn cyclotomic_poly(m: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(p) = cache.read().unwrap().get(&m) {
        return p.clone();
    }
    // Φ_m = (x^m - 1) / Π_{e | m, e < m} Φ_e
    let mut num: Vec<i64> = vec![0; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for e in 1..m {
        if m % e == 0 {
            let div = cyclotomic_poly(e);
            num = exact_poly_div(&num, &div);
        }
    }
    let p = Arc::new(num);
    cache.write().unwrap().insert(m, p.clone());
    p
}

fn exact_poly_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = num.len() - 1;
    let mut quot = vec![0i64; nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[k + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// Euler's totient.
pub fn totient(m: u32) -> u32 {
    (1..=m).filter(|&k| k.gcd(&m) == 1).count() as u32
}

/// Exact element of `Q(ζ_m)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNum {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl CycNum {
    pub fn zero(order: u32) -> Self {
        assert!(order >= 1, "cyclotomic order must be positive");
        CycNum {
            order,
            coeffs: vec![BigRational::zero(); order as usize],
        }
    }

    pub fn from_rational(order: u32, r: BigRational) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = r;
        z
    }

    pub fn from_int(order: u32, v: i64) -> Self {
        Self::from_rational(order, BigRational::from_integer(BigInt::from(v)))
    }

    pub fn one(order: u32) -> Self {
        Self::from_int(order, 1)
    }

    /// `ζ_m^k`, with `k` taken modulo `m`.
    pub fn zeta_pow(order: u32, k: i64) -> Self {
        let mut raw = vec![BigRational::zero(); order as usize];
        raw[k.rem_euclid(order as i64) as usize] = BigRational::one();
        Self::from_raw(order, raw)
    }

    /// Builds a value from an arbitrary (non-canonical) coefficient vector.
    pub fn from_raw(order: u32, mut coeffs: Vec<BigRational>) -> Self {
        assert_eq!(coeffs.len(), order as usize);
        reduce_in_place(order, &mut coeffs);
        CycNum { order, coeffs }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }

    pub fn to_rational(&self) -> Result<BigRational, CycError> {
        if self.is_rational() {
            Ok(self.coeffs[0].clone())
        } else {
            Err(CycError::NotRational)
        }
    }

    /// Re-expresses the value in `Q(ζ_target)`; `order` must divide `target`.
    pub fn lift(&self, target: u32) -> Self {
        if target == self.order {
            return self.clone();
        }
        assert!(
            target % self.order == 0,
            "cannot lift order {} to {}",
            self.order,
            target
        );
        let step = (target / self.order) as usize;
        let mut raw = vec![BigRational::zero(); target as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            raw[k * step] = c.clone();
        }
        Self::from_raw(target, raw)
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if a.order == b.order {
            return (a.clone(), b.clone());
        }
        let l = a.order.lcm(&b.order);
        (a.lift(l), b.lift(l))
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        self.galois(self.order as i64 - 1)
    }

    /// The automorphism `ζ ↦ ζ^k` for `k` coprime to the order.
    pub fn galois(&self, k: i64) -> Self {
        let m = self.order as i64;
        debug_assert_eq!((k.rem_euclid(m).max(1) as u32).gcd(&self.order), 1);
        let mut raw = vec![BigRational::zero(); self.order as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let idx = (j as i64 * k).rem_euclid(m) as usize;
                raw[idx] += c;
            }
        }
        Self::from_raw(self.order, raw)
    }

    /// Field norm down to `Q`.
    pub fn norm(&self) -> BigRational {
        let mut acc = self.clone();
        for k in 2..self.order {
            if k.gcd(&self.order) == 1 {
                acc = &acc * &self.galois(k as i64);
            }
        }
        acc.to_rational()
            .expect("norm of a cyclotomic number is rational")
    }

    pub fn inv(&self) -> Result<Self, CycError> {
        if self.is_zero() {
            return Err(CycError::DivisionByZero);
        }
        // a^{-1} = (Π_{k ≠ 1} σ_k(a)) / N(a)
        let mut others = CycNum::one(self.order);
        for k in 2..self.order {
            if k.gcd(&self.order) == 1 {
                others = &others * &self.galois(k as i64);
            }
        }
        let n = (&others * self)
            .to_rational()
            .expect("norm of a cyclotomic number is rational");
        Ok(others.scale(&n.recip()))
    }

    pub fn div(&self, other: &Self) -> Result<Self, CycError> {
        Ok(self * &other.inv()?)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        CycNum {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = CycNum::one(self.order);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Floating-point value in `C` as `(re, im)`; for display only.
    pub fn approx(&self) -> (f64, f64) {
        let m = self.order as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = ratio_to_f64(c);
            let theta = 2.0 * std::f64::consts::PI * k as f64 / m;
            re += v * theta.cos();
            im += v * theta.sin();
        }
        (re, im)
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Scale down huge operands before dividing.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Reduces a length-`m` vector modulo `Φ_m`.
fn reduce_in_place(order: u32, coeffs: &mut [BigRational]) {
    let phi = cyclotomic_poly(order);
    let deg = phi.len() - 1;
    for top in (deg..coeffs.len()).rev() {
        if coeffs[top].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut coeffs[top], BigRational::zero());
        let shift = top - deg;
        for (j, &pj) in phi[..deg].iter().enumerate() {
            if pj != 0 {
                coeffs[shift + j] -= &c * BigRational::from_integer(BigInt::from(pj));
            }
        }
    }
}

impl<'a> Add<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn add(self, rhs: &'a CycNum) -> CycNum {
        if self.order != rhs.order {
            let (a, b) = CycNum::common(self, rhs);
            return &a + &b;
        }
        CycNum {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &'a CycNum) -> CycNum {
        if self.order != rhs.order {
            let (a, b) = CycNum::common(self, rhs);
            return &a - &b;
        }
        CycNum {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<'a> Mul<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &'a CycNum) -> CycNum {
        if self.order != rhs.order {
            let (a, b) = CycNum::common(self, rhs);
            return &a * &b;
        }
        let m = self.order as usize;
        if self.is_rational() {
            return rhs.scale(&self.coeffs[0]);
        }
        if rhs.is_rational() {
            return self.scale(&rhs.coeffs[0]);
        }
        let mut raw = vec![BigRational::zero(); m];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    raw[(i + j) % m] += a * b;
                }
            }
        }
        CycNum::from_raw(self.order, raw)
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycNum> for CycNum {
            type Output = CycNum;
            fn $m(self, rhs: CycNum) -> CycNum {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -(&self)
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match k {
                0 => write!(f, "{abs}")?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{abs}*")?;
                    }
                    if k == 1 {
                        write!(f, "z{}", self.order)?;
                    } else {
                        write!(f, "z{}^{k}", self.order)?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let (re, im) = self.approx();
        let mut st = serializer.serialize_struct("CycNum", 3)?;
        st.serialize_field("order", &self.order)?;
        let coeffs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        st.serialize_field("coeffs", &coeffs)?;
        st.serialize_field("approx", &[re, im])?;
        st.end()
    }
}

/// Parses `"a"` or `"a/b"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}
