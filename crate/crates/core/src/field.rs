//! Arithmetic in F_p and F_{p^m} with precomputed tables.
//!
//! An element is identified with its encoding enc(x) = Σ coeffs[i]·p^i, where
//! coeffs are the little-endian coefficients of its polynomial representative.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalars::is_prime;

pub const MAX_FIELD_SIZE: u32 = 49;

struct FieldData {
    p: u32,
    m: u32,
    q: u32,
    modulus: Option<Vec<u32>>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    trace: Vec<u8>,
}

/// A finite field F_q, q = p^m ≤ 49, with its arithmetic tables.
#[derive(Clone)]
pub struct FieldSpec(Arc<FieldData>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.m == other.0.m && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.modulus {
            None => write!(f, "F_{}", self.0.q),
            Some(m) => {
                let m: Vec<String> = m.iter().map(|c| c.to_string()).collect();
                write!(f, "F_{}[{}]", self.0.q, m.join(","))
            }
        }
    }
}

fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut m = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p, m))
}

pub fn default_modulus(q: u32) -> Option<Vec<u32>> {
    match q {
        4 => Some(vec![1, 1, 1]),
        8 => Some(vec![1, 1, 0, 1]),
        9 => Some(vec![1, 0, 1]),
        _ => None,
    }
}

// Polynomials over F_p as little-endian coefficient vectors.

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = pow_mod(b[db], p - 2, p);
    while r.len() > db {
        let top = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if top != 0 {
            let factor = top * lead_inv % p;
            for (i, &c) in b.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + p * p - factor * c % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn pow_mod(mut b: u32, mut e: u32, p: u32) -> u32 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let m = modulus.len() - 1;
    for k in 1..=m / 2 {
        // every monic polynomial of degree k
        let count = p.pow(k as u32);
        for code in 0..count {
            let mut f = Vec::with_capacity(k + 1);
            let mut c = code;
            for _ in 0..k {
                f.push(c % p);
                c /= p;
            }
            f.push(1);
            if poly_rem(modulus, &f, p).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    pub fn prime(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a prime")));
        }
        if p > MAX_FIELD_SIZE {
            return Err(Error::InvalidField(format!(
                "q = {p} exceeds the supported maximum {MAX_FIELD_SIZE}"
            )));
        }
        Ok(Self::build(p, 1, None))
    }

    /// F_{p^m} = F_p[x]/(modulus), modulus little-endian and monic of degree m.
    pub fn extension(p: u32, modulus: &[u32]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a prime")));
        }
        if modulus.len() < 2 {
            return Err(Error::InvalidField("modulus must have degree at least 1".into()));
        }
        let m = modulus.len() as u32 - 1;
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField(format!(
                "modulus coefficients must lie in [0, {p})"
            )));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        if p.checked_pow(m).is_none_or(|q| q > MAX_FIELD_SIZE) {
            return Err(Error::InvalidField(format!(
                "{p}^{m} exceeds the supported maximum {MAX_FIELD_SIZE}"
            )));
        }
        if m == 1 {
            return Self::prime(p);
        }
        if !is_irreducible(modulus, p) {
            return Err(Error::InvalidField(format!(
                "modulus {modulus:?} is reducible over F_{p}"
            )));
        }
        Ok(Self::build(p, m, Some(modulus.to_vec())))
    }

    /// The field of size q, using the shipped modulus for 4, 8 and 9 when none is given.
    pub fn with_q(q: u32, modulus: Option<&[u32]>) -> Result<Self> {
        if q > MAX_FIELD_SIZE {
            return Err(Error::InvalidField(format!(
                "q = {q} exceeds the supported maximum {MAX_FIELD_SIZE}"
            )));
        }
        let (p, m) =
            prime_power(q).ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        match (m, modulus) {
            (1, None) => Self::prime(p),
            (1, Some(_)) => Err(Error::InvalidField(format!(
                "q = {q} is prime; a modulus is only meaningful for prime powers"
            ))),
            (_, Some(md)) => {
                if md.len() as u32 != m + 1 {
                    return Err(Error::InvalidField(format!(
                        "q = {q} needs a modulus of degree {m}, got degree {}",
                        md.len().saturating_sub(1)
                    )));
                }
                Self::extension(p, md)
            }
            (_, None) => match default_modulus(q) {
                Some(md) => Self::extension(p, &md),
                None => Err(Error::InvalidField(format!(
                    "q = {q} needs an irreducible modulus (--modulus c0,c1,...,1)"
                ))),
            },
        }
    }

    fn build(p: u32, m: u32, modulus: Option<Vec<u32>>) -> Self {
        let q = p.pow(m);
        let qs = q as usize;
        let coeffs = |x: u32| -> Vec<u32> {
            let mut c = Vec::with_capacity(m as usize);
            let mut r = x;
            for _ in 0..m {
                c.push(r % p);
                r /= p;
            }
            c
        };
        let encode = |c: &[u32]| -> u32 { c.iter().rev().fold(0, |acc, &d| acc * p + d) };
        let mut add = vec![0u8; qs * qs];
        let mut mul = vec![0u8; qs * qs];
        for x in 0..q {
            let cx = coeffs(x);
            for y in 0..q {
                let cy = coeffs(y);
                let s: Vec<u32> = cx.iter().zip(&cy).map(|(a, b)| (a + b) % p).collect();
                add[(x * q + y) as usize] = encode(&s) as u8;
                let mut prod = vec![0u32; 2 * m as usize - 1];
                for (i, a) in cx.iter().enumerate() {
                    for (j, b) in cy.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + a * b) % p;
                    }
                }
                let red = match &modulus {
                    Some(md) => poly_rem(&prod, md, p),
                    None => prod,
                };
                let mut red = red;
                red.resize(m as usize, 0);
                mul[(x * q + y) as usize] = encode(&red) as u8;
            }
        }
        let mut neg = vec![0u8; qs];
        let mut inv = vec![0u8; qs];
        for x in 0..q {
            for y in 0..q {
                if add[(x * q + y) as usize] == 0 {
                    neg[x as usize] = y as u8;
                }
                if mul[(x * q + y) as usize] == 1 {
                    inv[x as usize] = y as u8;
                }
            }
        }
        let mut trace = vec![0u8; qs];
        for x in 0..qs {
            // Tr(x) = x + x^p + ... + x^{p^{m-1}}
            let mut acc = 0u8;
            let mut power = x as u8;
            for _ in 0..m {
                acc = add[acc as usize * qs + power as usize];
                let mut next = 1u8;
                for _ in 0..p {
                    next = mul[next as usize * qs + power as usize];
                }
                power = next;
            }
            assert!((acc as u32) < p, "trace must land in the prime field");
            trace[x] = acc;
        }
        Self(Arc::new(FieldData {
            p,
            m,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
            trace,
        }))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn m(&self) -> u32 {
        self.0.m
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> Option<&[u32]> {
        self.0.modulus.as_deref()
    }

    // Encoded arithmetic; callers guarantee x, y < q.

    #[inline]
    pub fn add(&self, x: u8, y: u8) -> u8 {
        self.0.add[x as usize * self.0.q as usize + y as usize]
    }

    #[inline]
    pub fn mul(&self, x: u8, y: u8) -> u8 {
        self.0.mul[x as usize * self.0.q as usize + y as usize]
    }

    #[inline]
    pub fn neg(&self, x: u8) -> u8 {
        self.0.neg[x as usize]
    }

    #[inline]
    pub fn sub(&self, x: u8, y: u8) -> u8 {
        self.add(x, self.neg(y))
    }

    /// Inverse of a nonzero encoding; 0 maps to 0.
    #[inline]
    pub fn inv_raw(&self, x: u8) -> u8 {
        self.0.inv[x as usize]
    }

    #[inline]
    pub fn trace_raw(&self, x: u8) -> u8 {
        self.0.trace[x as usize]
    }

    pub fn dot(&self, x: &[u8], y: &[u8]) -> u8 {
        x.iter()
            .zip(y)
            .fold(0u8, |acc, (&a, &b)| self.add(acc, self.mul(a, b)))
    }

    pub fn element(&self, enc: u32) -> Result<FieldElement> {
        if enc >= self.q() {
            return Err(Error::InvalidField(format!(
                "encoding {enc} is outside [0, {})",
                self.q()
            )));
        }
        Ok(FieldElement {
            spec: self.clone(),
            value: enc as u8,
        })
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.m() as usize || coeffs.iter().any(|&c| c >= self.p()) {
            return Err(Error::InvalidField(format!(
                "{coeffs:?} is not a coefficient vector for {self}"
            )));
        }
        let enc = coeffs.iter().rev().fold(0, |acc, &d| acc * self.p() + d);
        self.element(enc)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            spec: self.clone(),
            value: 0,
        }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement {
            spec: self.clone(),
            value: 1,
        }
    }

    pub(crate) fn wrap(&self, value: u8) -> FieldElement {
        FieldElement {
            spec: self.clone(),
            value,
        }
    }

    /// All q elements in encoding order (0 first, 1 second).
    pub fn elements(&self) -> Vec<FieldElement> {
        (0..self.q()).map(|v| self.wrap(v as u8)).collect()
    }

    pub fn units(&self) -> Vec<FieldElement> {
        (1..self.q()).map(|v| self.wrap(v as u8)).collect()
    }
}

/// An element of F_q.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    spec: FieldSpec,
    value: u8,
}

impl FieldElement {
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn enc(&self) -> u32 {
        self.value as u32
    }

    pub(crate) fn raw(&self) -> u8 {
        self.value
    }

    pub fn coeffs(&self) -> Vec<u32> {
        let p = self.spec.p();
        let mut r = self.enc();
        (0..self.spec.m())
            .map(|_| {
                let c = r % p;
                r /= p;
                c
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same(&self, other: &Self) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(self.spec.wrap(self.spec.add(self.value, other.value)))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(self.spec.wrap(self.spec.sub(self.value, other.value)))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        Ok(self.spec.wrap(self.spec.mul(self.value, other.value)))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        self.checked_mul(&other.inv()?)
    }

    pub fn neg(&self) -> Self {
        self.spec.wrap(self.spec.neg(self.value))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.spec.wrap(self.spec.inv_raw(self.value)))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.value;
        let mut acc = 1u8;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.spec.mul(acc, base);
            }
            base = self.spec.mul(base, base);
            e >>= 1;
        }
        self.spec.wrap(acc)
    }

    /// Absolute trace to F_p, returned as an element of the prime subfield.
    pub fn trace(&self) -> Self {
        self.spec.wrap(self.spec.trace_raw(self.value))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.spec.m() == 1 || self.value == 0 {
            return write!(f, "{}", self.value);
        }
        let terms: Vec<String> = self
            .coeffs()
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "a".to_string(),
                (1, c) => format!("{c}a"),
                (i, 1) => format!("a^{i}"),
                (i, c) => format!("{c}a^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join("+"))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_examples() {
        let f3 = FieldSpec::prime(3).unwrap();
        let two = f3.element(2).unwrap();
        assert_eq!(two.checked_add(&two).unwrap().enc(), 1);
        assert_eq!(two.inv().unwrap().enc(), 2);
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(f5.element(2).unwrap().inv().unwrap().enc(), 3);
        assert_eq!(f3.zero().inv(), Err(Error::DivisionByZero));
        assert_eq!(Error::DivisionByZero.to_string(), "division by zero in F_q");
    }

    #[test]
    fn f4_examples() {
        let f4 = FieldSpec::with_q(4, None).unwrap();
        let alpha = f4.from_coeffs(&[0, 1]).unwrap();
        let alpha_plus_one = f4.from_coeffs(&[1, 1]).unwrap();
        assert_eq!(alpha.checked_mul(&alpha).unwrap(), alpha_plus_one);
        assert_eq!(alpha.inv().unwrap(), alpha_plus_one);
        assert_eq!(alpha.trace().enc(), 1);
        assert_eq!(f4.one().trace().enc(), 0);
        assert_eq!(alpha_plus_one.to_string(), "a+1");
        let encs: Vec<u32> = f4.elements().iter().map(|e| e.enc()).collect();
        assert_eq!(encs, vec![0, 1, 2, 3]);
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(FieldSpec::with_q(6, None).is_err());
        assert!(FieldSpec::with_q(53, None).is_err());
        assert!(FieldSpec::with_q(16, None).is_err());
        // x^2 + 1 is reducible over F_2
        assert!(FieldSpec::with_q(4, Some(&[1, 0, 1])).is_err());
        assert!(FieldSpec::with_q(9, Some(&[1, 0, 1])).is_ok());
        assert!(FieldSpec::with_q(3, Some(&[1, 1])).is_err());
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2 over F_2 has no roots but is reducible
        assert!(FieldSpec::extension(2, &[1, 0, 1, 0, 1]).is_err());
    }

    #[test]
    fn mismatched_fields_rejected() {
        let a = FieldSpec::prime(3).unwrap().one();
        let b = FieldSpec::prime(5).unwrap().one();
        assert_eq!(a.checked_add(&b), Err(Error::FieldMismatch));
    }
}
