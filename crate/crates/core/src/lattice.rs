//! Integer fast path: vectors of Z[ζ] values over a common denominator.
//!
//! A value is held as a length-p vector in Z[x]/(x^p − 1), or as a single
//! integer when every value of the vector is rational. Multiplying by ζ^k is
//! then a cyclic shift and all transforms run on machine integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::scalars::{CyclotomicNumber, Rational};

/// Magnitudes above this are refused so that sums of a few million terms stay in i128.
const ENTRY_LIMIT: f64 = 1e18;
/// Accumulated bound allowed before falling back to exact rationals.
pub(crate) const ACC_LIMIT: f64 = 1e36;

#[derive(Clone, Debug)]
pub(crate) struct Lattice {
    /// 1 when all values are rational, p otherwise.
    pub width: usize,
    pub denom: BigInt,
    pub nums: Vec<i128>,
    pub max_abs: f64,
}

impl Lattice {
    pub fn len(&self) -> usize {
        self.nums.len() / self.width
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.nums[i * self.width..(i + 1) * self.width]
    }

    pub fn is_zero_at(&self, i: usize) -> bool {
        self.row(i).iter().all(|&c| c == 0)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.is_zero_at(i)).collect()
    }

    pub fn from_values(prime: u32, values: &[CyclotomicNumber]) -> Option<Self> {
        let p = prime as usize;
        let rational = values.iter().all(|v| v.is_rational());
        let width = if rational { 1 } else { p };
        let mut denom = BigInt::one();
        for v in values {
            for c in v.coeffs() {
                if !c.is_zero() {
                    denom = denom.lcm(c.denom());
                }
            }
        }
        if denom.to_f64()? > ENTRY_LIMIT {
            return None;
        }
        let mut nums = vec![0i128; values.len() * width];
        let mut max_abs = 0f64;
        for (i, v) in values.iter().enumerate() {
            for (j, c) in v.coeffs().iter().enumerate().take(width) {
                if c.is_zero() {
                    continue;
                }
                let n = c.numer() * (&denom / c.denom());
                let f = n.to_f64()?.abs();
                if f > ENTRY_LIMIT {
                    return None;
                }
                max_abs = max_abs.max(f);
                nums[i * width + j] = n.to_i128()?;
            }
        }
        Some(Self {
            width,
            denom,
            nums,
            max_abs,
        })
    }
}

/// Converts a width-1 or width-p integer row into (Σ c_i ζ^i) · scale / denom.
pub(crate) fn cyclic_to_number(
    prime: u32,
    row: &[i128],
    denom: &BigInt,
    scale: &Rational,
) -> CyclotomicNumber {
    let p = prime as usize;
    let mut full = vec![BigInt::zero(); p];
    for (i, &c) in row.iter().enumerate() {
        full[i] = BigInt::from(c);
    }
    let value = CyclotomicNumber::from_cyclic(prime, &full, denom);
    if scale.is_one() {
        value
    } else {
        value.scale(scale)
    }
}

/// Converts kernel table entries to cyclic integer rows of length p.
///
/// Returns None when some entry is not in Z[ζ]. The second component is the
/// largest coefficient magnitude.
pub(crate) fn integer_table(prime: u32, table: &[CyclotomicNumber]) -> Option<(Vec<i128>, f64)> {
    let p = prime as usize;
    let mut out = vec![0i128; table.len() * p];
    let mut max_abs = 0f64;
    for (k, v) in table.iter().enumerate() {
        if !v.is_algebraic_integer() {
            return None;
        }
        for (i, c) in v.coeffs().iter().enumerate() {
            let n = c.to_integer();
            let f = n.to_f64()?.abs();
            if f > ENTRY_LIMIT {
                return None;
            }
            max_abs = max_abs.max(f);
            out[k * p + i] = n.to_i128()?;
        }
    }
    Some((out, max_abs))
}

/// acc += t ⊛ b in Z[x]/(x^p − 1), where b has width 1 or p.
#[inline]
pub(crate) fn conv_add(acc: &mut [i128], t: &[i128], b: &[i128]) {
    let p = acc.len();
    if b.len() == 1 {
        let s = b[0];
        if s != 0 {
            for (a, &ti) in acc.iter_mut().zip(t) {
                *a += ti * s;
            }
        }
        return;
    }
    for (i, &ti) in t.iter().enumerate() {
        if ti == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            let k = if i + j >= p { i + j - p } else { i + j };
            acc[k] += ti * bj;
        }
    }
}

/// acc += ζ^k · b, where b has width 1 or p and acc has length p.
#[inline]
pub(crate) fn shift_add(acc: &mut [i128], b: &[i128], k: usize) {
    let p = acc.len();
    if b.len() == 1 {
        acc[k] += b[0];
        return;
    }
    let (head, tail) = b.split_at(p - k);
    acc[k..].iter_mut().zip(head).for_each(|(a, &x)| *a += x);
    acc[..k].iter_mut().zip(tail).for_each(|(a, &x)| *a += x);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rational;

    #[test]
    fn round_trip() {
        let vals = vec![
            CyclotomicNumber::new(3, vec![rational(1, 2), rational(-1, 3)]).unwrap(),
            CyclotomicNumber::zeta(3),
            CyclotomicNumber::zero(3),
        ];
        let lat = Lattice::from_values(3, &vals).unwrap();
        assert_eq!(lat.width, 3);
        assert_eq!(lat.denom, BigInt::from(6));
        let back: Vec<_> = (0..lat.len())
            .map(|i| cyclic_to_number(3, lat.row(i), &lat.denom, &Rational::one()))
            .collect();
        assert_eq!(back, vals);
        assert_eq!(lat.support(), vec![0, 1]);
    }

    #[test]
    fn shift_is_multiplication_by_zeta() {
        let coeffs = vec![rational(1, 1), rational(2, 1), rational(0, 1), rational(-3, 1)];
        let x = CyclotomicNumber::new(5, coeffs).unwrap();
        let lat = Lattice::from_values(5, std::slice::from_ref(&x)).unwrap();
        for k in 0..5 {
            let mut acc = vec![0i128; 5];
            shift_add(&mut acc, lat.row(0), k);
            let got = cyclic_to_number(5, &acc, &lat.denom, &Rational::one());
            assert_eq!(got, &x * &CyclotomicNumber::zeta_pow(5, k as i64));
        }
    }
}
