//! Seeded random elements, matrices and functions.

use std::sync::Arc;

use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::{FieldElement, FieldSpec};
use crate::functions::{FunctionOnSet, IndexedSet};
use crate::matrix::RectMatrix;
use crate::scalars::{CyclotomicNumber, Rational};

pub type SuiteRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_element<R: Rng>(field: &FieldSpec, rng: &mut R) -> FieldElement {
    field.wrap(rng.gen_range(0..field.q()) as u8)
}

pub fn random_unit<R: Rng>(field: &FieldSpec, rng: &mut R) -> FieldElement {
    field.wrap(rng.gen_range(1..field.q()) as u8)
}

pub fn random_matrix<R: Rng>(field: &FieldSpec, rows: usize, cols: usize, rng: &mut R) -> RectMatrix {
    let entries = (0..rows * cols).map(|_| rng.gen_range(0..field.q()) as u8).collect();
    RectMatrix::from_raw(field, rows, cols, entries)
}

pub fn random_invertible<R: Rng>(field: &FieldSpec, n: usize, rng: &mut R) -> RectMatrix {
    loop {
        let m = random_matrix(field, n, n, rng);
        if !m.det().expect("square").is_zero() {
            return m;
        }
    }
}

/// A uniformly random element of SL_n(F_q).
pub fn random_special_linear<R: Rng>(field: &FieldSpec, n: usize, rng: &mut R) -> RectMatrix {
    let mut m = random_invertible(field, n, rng);
    let dinv = m.det().expect("square").inv().expect("invertible");
    for i in 0..n {
        let v = field.mul(m.raw(i, 0), dinv.raw());
        m.set_raw(i, 0, v);
    }
    m
}

pub fn random_upper_unipotent<R: Rng>(field: &FieldSpec, n: usize, rng: &mut R) -> RectMatrix {
    let mut m = RectMatrix::identity(field, n);
    for i in 0..n {
        for j in i + 1..n {
            m.set_raw(i, j, random_element(field, rng).raw());
        }
    }
    m
}

/// A value with small random rational coefficients.
pub fn random_cyclotomic<R: Rng>(prime: u32, rng: &mut R) -> CyclotomicNumber {
    let coeffs = (0..prime as usize - 1)
        .map(|_| {
            let num = rng.gen_range(-9i64..=9);
            let den = rng.gen_range(1i64..=4);
            Rational::new(BigInt::from(num), BigInt::from(den))
        })
        .collect();
    CyclotomicNumber::new(prime, coeffs).expect("valid prime")
}

/// A dense random function with small integer cyclotomic values.
pub fn random_function<R: Rng>(set: &Arc<IndexedSet>, prime: u32, rng: &mut R) -> FunctionOnSet {
    FunctionOnSet::from_fn(set, prime, |_| {
        let coeffs = (0..prime as usize - 1)
            .map(|_| Rational::from_integer(BigInt::from(rng.gen_range(-3i64..=3))))
            .collect::<Vec<_>>();
        CyclotomicNumber::new(prime, coeffs).expect("valid prime")
    })
}
