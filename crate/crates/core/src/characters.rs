//! The additive character ψ = ζ_p^{Tr(·)} and the Kloosterman function.

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::lattice;
use crate::scalars::CyclotomicNumber;

/// ψ and Kl tabulated over F_q, indexed by encoding.
#[derive(Clone, Debug)]
pub struct CharacterContext {
    field: FieldSpec,
    twist: u8,
    phase: Vec<u8>,
    psi_table: Vec<CyclotomicNumber>,
    kl_table: Vec<CyclotomicNumber>,
    kl_int: Vec<i128>,
}

impl CharacterContext {
    /// The standard character ψ(x) = ζ_p^{Tr(x)}.
    pub fn new(field: &FieldSpec) -> Self {
        Self::build(field, 1)
    }

    /// The twisted character ψ_b(x) = ψ(bx), b ≠ 0.
    pub fn with_twist(field: &FieldSpec, b: &FieldElement) -> Result<Self> {
        if b.spec() != field {
            return Err(Error::FieldMismatch);
        }
        if b.is_zero() {
            return Err(Error::InvalidField("the twist of ψ must be nonzero".into()));
        }
        Ok(Self::build(field, b.raw()))
    }

    fn build(field: &FieldSpec, twist: u8) -> Self {
        let p = field.p();
        let q = field.q() as u8;
        let phase: Vec<u8> = (0..q)
            .map(|x| field.trace_raw(field.mul(twist, x)))
            .collect();
        let psi_table: Vec<CyclotomicNumber> = phase
            .iter()
            .map(|&k| CyclotomicNumber::zeta_pow(p, k as i64))
            .collect();
        let kl_table: Vec<CyclotomicNumber> = (0..q)
            .map(|a| {
                (1..q).fold(CyclotomicNumber::zero(p), |acc, t| {
                    let arg = field.add(field.mul(a, field.inv_raw(t)), t);
                    acc + &psi_table[arg as usize]
                })
            })
            .collect();
        let (kl_int, _) =
            lattice::integer_table(p, &kl_table).expect("Kloosterman sums are algebraic integers");
        Self {
            field: field.clone(),
            twist,
            phase,
            psi_table,
            kl_table,
            kl_int,
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn prime(&self) -> u32 {
        self.field.p()
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn twist(&self) -> FieldElement {
        self.field.wrap(self.twist)
    }

    pub fn psi(&self, x: &FieldElement) -> CyclotomicNumber {
        assert!(x.spec() == &self.field, "element from another field");
        self.psi_table[x.enc() as usize].clone()
    }

    /// Kl(a) = Σ_{t ≠ 0} ψ(a/t + t), summed directly.
    pub fn kloosterman(&self, a: &FieldElement) -> CyclotomicNumber {
        assert!(a.spec() == &self.field, "element from another field");
        self.sum_over_field(|t| {
            if t.is_zero() {
                CyclotomicNumber::zero(self.prime())
            } else {
                let arg = a.checked_div(t).unwrap().checked_add(t).unwrap();
                self.psi(&arg)
            }
        })
    }

    pub fn kloosterman_table(&self) -> &[CyclotomicNumber] {
        &self.kl_table
    }

    pub fn psi_table(&self) -> &[CyclotomicNumber] {
        &self.psi_table
    }

    pub fn sum_over_field<F>(&self, f: F) -> CyclotomicNumber
    where
        F: Fn(&FieldElement) -> CyclotomicNumber,
    {
        self.field
            .elements()
            .iter()
            .fold(CyclotomicNumber::zero(self.prime()), |acc, x| acc + f(x))
    }

    /// ψ(x) = ζ^{phase(x)} for an encoded x.
    #[inline]
    pub(crate) fn phase(&self, x: u8) -> usize {
        self.phase[x as usize] as usize
    }

    #[inline]
    pub(crate) fn kl_row(&self, a: u8) -> &[i128] {
        let p = self.prime() as usize;
        &self.kl_int[a as usize * p..(a as usize + 1) * p]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f3_values() {
        let f3 = FieldSpec::prime(3).unwrap();
        let ctx = CharacterContext::new(&f3);
        let two = f3.element(2).unwrap();
        assert_eq!(ctx.psi(&two), CyclotomicNumber::zeta_pow(3, 2));
        let want: Vec<_> = [-1, -1, 2]
            .iter()
            .map(|&n| CyclotomicNumber::from_integer(3, n))
            .collect();
        assert_eq!(ctx.kloosterman_table(), &want[..]);
    }

    #[test]
    fn f2_and_f4_values() {
        let f2 = FieldSpec::prime(2).unwrap();
        let ctx = CharacterContext::new(&f2);
        let want: Vec<_> = [-1, 1]
            .iter()
            .map(|&n| CyclotomicNumber::from_integer(2, n))
            .collect();
        assert_eq!(ctx.kloosterman_table(), &want[..]);
        let f4 = FieldSpec::with_q(4, None).unwrap();
        let ctx = CharacterContext::new(&f4);
        let alpha = f4.element(2).unwrap();
        assert_eq!(ctx.psi(&alpha), CyclotomicNumber::from_integer(2, -1));
    }

    #[test]
    fn twist_rejects_zero() {
        let f5 = FieldSpec::prime(5).unwrap();
        assert!(CharacterContext::with_twist(&f5, &f5.zero()).is_err());
        let ctx = CharacterContext::with_twist(&f5, &f5.element(2).unwrap()).unwrap();
        assert_eq!(ctx.psi(&f5.one()), CyclotomicNumber::zeta_pow(5, 2));
    }
}
