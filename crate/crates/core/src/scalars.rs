//! Exact arithmetic in Q and in the cyclotomic field Q(ζ_p).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// An element Σ c_i ζ^i of Q(ζ_p), stored in the power basis {1, ζ, …, ζ^{p−2}}.
///
/// For p = 2 the field is Q itself and ζ = −1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicNumber {
    prime: u32,
    coeffs: Vec<Rational>,
}

impl CyclotomicNumber {
    pub fn new(prime: u32, coeffs: Vec<Rational>) -> Result<Self> {
        if !is_prime(prime) {
            return Err(Error::NotPrime(prime));
        }
        let expected = prime as usize - 1;
        if coeffs.len() != expected {
            return Err(Error::CoefficientLength {
                prime,
                expected,
                got: coeffs.len(),
            });
        }
        Ok(Self { prime, coeffs })
    }

    pub fn zero(prime: u32) -> Self {
        assert!(is_prime(prime), "{prime} is not a prime");
        Self {
            prime,
            coeffs: vec![Rational::zero(); prime as usize - 1],
        }
    }

    pub fn one(prime: u32) -> Self {
        Self::from_rational(prime, Rational::one())
    }

    pub fn from_rational(prime: u32, r: Rational) -> Self {
        let mut x = Self::zero(prime);
        x.coeffs[0] = r;
        x
    }

    pub fn from_integer(prime: u32, n: i64) -> Self {
        Self::from_rational(prime, Rational::from_integer(BigInt::from(n)))
    }

    pub fn zeta(prime: u32) -> Self {
        Self::zeta_pow(prime, 1)
    }

    /// ζ^k for any integer k.
    pub fn zeta_pow(prime: u32, k: i64) -> Self {
        let p = prime as i64;
        let mut cyclic = vec![BigInt::zero(); prime as usize];
        cyclic[k.rem_euclid(p) as usize] = BigInt::one();
        Self::from_cyclic(prime, &cyclic, &BigInt::one())
    }

    /// Builds Σ c_i ζ^i / denom from a length-p vector in Z[x]/(x^p − 1).
    ///
    /// The image of x^{p−1} is −(1 + ζ + … + ζ^{p−2}), so the canonical
    /// coefficient i is c_i − c_{p−1}.
    pub fn from_cyclic(prime: u32, cyclic: &[BigInt], denom: &BigInt) -> Self {
        let p = prime as usize;
        assert_eq!(cyclic.len(), p);
        let top = &cyclic[p - 1];
        let coeffs = cyclic[..p - 1]
            .iter()
            .map(|c| Rational::new(c - top, denom.clone()))
            .collect();
        Self { prime, coeffs }
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then(|| &self.coeffs[0])
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational()
            .filter(|r| r.is_integer())
            .map(|r| r.to_integer())
    }

    /// True when every coefficient is an integer, i.e. the value lies in Z[ζ].
    pub fn is_algebraic_integer(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch {
                left: self.prime,
                right: other.prime,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            prime: self.prime,
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            prime: self.prime,
            coeffs,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let p = self.prime as usize;
        // product in Q[x]/(x^p - 1), then fold x^{p-1}
        let mut cyclic = vec![Rational::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                cyclic[(i + j) % p] += a * b;
            }
        }
        let top = cyclic[p - 1].clone();
        cyclic.truncate(p - 1);
        for c in &mut cyclic {
            *c -= &top;
        }
        Ok(Self {
            prime: self.prime,
            coeffs: cyclic,
        })
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self {
            prime: self.prime,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Complex conjugation ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        let p = self.prime as usize;
        let mut cyclic = vec![Rational::zero(); p];
        for (i, c) in self.coeffs.iter().enumerate() {
            cyclic[(p - i) % p] = c.clone();
        }
        let top = cyclic[p - 1].clone();
        cyclic.truncate(p - 1);
        for c in &mut cyclic {
            *c -= &top;
        }
        Self {
            prime: self.prime,
            coeffs: cyclic,
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.prime);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Numerical embedding ζ ↦ e^{2πi/p}.
    pub fn to_complex(&self) -> Complex64 {
        let p = self.prime as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let angle = 2.0 * std::f64::consts::PI * i as f64 / p;
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), angle)
            })
            .sum()
    }
}

pub fn format_complex(z: Complex64) -> String {
    format!("({:.6}, {:.6})", z.re, z.im)
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                (_, false) => write!(f, "{mag}*")?,
            }
            match i {
                0 => {}
                1 => write!(f, "z")?,
                _ => write!(f, "z^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(z_{})[{}]", self.prime, self)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&CyclotomicNumber> for &CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $method(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
                self.$checked(rhs).expect("cyclotomic operands")
            }
        }
        impl $trait<CyclotomicNumber> for CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $method(self, rhs: CyclotomicNumber) -> CyclotomicNumber {
                (&self).$checked(&rhs).expect("cyclotomic operands")
            }
        }
        impl $trait<&CyclotomicNumber> for CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $method(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
                (&self).$checked(rhs).expect("cyclotomic operands")
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber {
            prime: self.prime,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        rational(n, 1)
    }

    #[test]
    fn zeta_squared_mod_three() {
        let z = CyclotomicNumber::zeta(3);
        assert_eq!((&z * &z).coeffs(), &[r(-1), r(-1)]);
        let s = &z + &CyclotomicNumber::zeta_pow(3, 2);
        assert_eq!(s, CyclotomicNumber::from_integer(3, -1));
    }

    #[test]
    fn zeta_to_the_p_is_one() {
        for p in [2, 3, 5, 7] {
            assert_eq!(CyclotomicNumber::zeta(p).pow(p), CyclotomicNumber::one(p));
        }
    }

    #[test]
    fn p_two_is_rational() {
        let z = CyclotomicNumber::zeta(2);
        assert_eq!(z, CyclotomicNumber::from_integer(2, -1));
    }

    #[test]
    fn conj_examples() {
        // a + bζ ↦ (a−b) − bζ
        let x = CyclotomicNumber::new(3, vec![r(2), r(5)]).unwrap();
        assert_eq!(x.conj().coeffs(), &[r(-3), r(-5)]);
        let y = CyclotomicNumber::zeta_pow(5, 2) + CyclotomicNumber::zeta_pow(5, 3);
        assert_eq!(y.conj(), y);
    }

    #[test]
    fn complex_embedding() {
        let z = CyclotomicNumber::zeta(3).to_complex();
        assert!((z.re + 0.5).abs() < 1e-12 && (z.im - 0.75f64.sqrt()).abs() < 1e-12);
        assert_eq!(format_complex(z), "(-0.500000, 0.866025)");
    }

    #[test]
    fn mismatched_primes_rejected() {
        let a = CyclotomicNumber::one(3);
        let b = CyclotomicNumber::one(5);
        assert_eq!(
            a.checked_add(&b),
            Err(Error::PrimeMismatch { left: 3, right: 5 })
        );
        assert!(CyclotomicNumber::new(4, vec![r(0); 3]).is_err());
        assert!(CyclotomicNumber::new(5, vec![r(0); 3]).is_err());
    }

    #[test]
    fn display() {
        let x = CyclotomicNumber::new(5, vec![r(-1), r(-1), rational(1, 2), r(0)]).unwrap();
        assert_eq!(x.to_string(), "-1 - z + 1/2*z^2");
        assert_eq!(CyclotomicNumber::zero(3).to_string(), "0");
    }
}
