//! Dense matrices over F_q.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

#[derive(Clone, PartialEq, Eq)]
pub struct RectMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    entries: Vec<u8>,
}

impl fmt::Debug for RectMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RectMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let r: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
                r.join(" ")
            })
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

impl RectMatrix {
    pub fn new(field: &FieldSpec, rows: usize, cols: usize, entries: Vec<FieldElement>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|e| e.spec() != field) {
            return Err(Error::FieldMismatch);
        }
        let entries = entries.iter().map(|e| e.raw()).collect();
        Ok(Self::from_raw(field, rows, cols, entries))
    }

    /// Builds a matrix from integers reduced into the prime subfield, e.g. -1 → p − 1.
    pub fn from_ints(field: &FieldSpec, rows: usize, cols: usize, entries: &[i64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let p = field.p() as i64;
        let raw = entries.iter().map(|&e| e.rem_euclid(p) as u8).collect();
        Ok(Self::from_raw(field, rows, cols, raw))
    }

    pub(crate) fn from_raw(field: &FieldSpec, rows: usize, cols: usize, entries: Vec<u8>) -> Self {
        debug_assert_eq!(entries.len(), rows * cols);
        Self {
            field: field.clone(),
            rows,
            cols,
            entries,
        }
    }

    pub fn zero(field: &FieldSpec, rows: usize, cols: usize) -> Self {
        Self::from_raw(field, rows, cols, vec![0; rows * cols])
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.field.wrap(self.raw(i, j))
    }

    #[inline]
    pub(crate) fn raw(&self, i: usize, j: usize) -> u8 {
        self.entries[i * self.cols + j]
    }

    pub(crate) fn set_raw(&mut self, i: usize, j: usize, v: u8) {
        self.entries[i * self.cols + j] = v;
    }

    pub(crate) fn raw_entries(&self) -> &[u8] {
        &self.entries
    }

    pub(crate) fn column_raw(&self, j: usize) -> Vec<u8> {
        (0..self.rows).map(|i| self.raw(i, j)).collect()
    }

    pub fn column(&self, j: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<FieldElement> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.raw(i, j);
            }
        }
        t
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zero(f, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0u8;
                for k in 0..self.cols {
                    acc = f.add(acc, f.mul(self.raw(i, k), other.raw(k, j)));
                }
                out.entries[i * other.cols + j] = acc;
            }
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, c: &FieldElement) -> Self {
        let f = &self.field;
        let entries = self.entries.iter().map(|&e| f.mul(c.raw(), e)).collect();
        Self::from_raw(f, self.rows, self.cols, entries)
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        let entries = self.entries.iter().map(|&e| f.neg(e)).collect();
        Self::from_raw(f, self.rows, self.cols, entries)
    }

    /// Applies the matrix to a column vector of encodings.
    pub(crate) fn apply_raw(&self, v: &[u8]) -> Vec<u8> {
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(0u8, |acc, k| f.add(acc, f.mul(self.raw(i, k), v[k])))
            })
            .collect()
    }

    /// Row vector times matrix, on encodings.
    pub(crate) fn left_apply_raw(&self, v: &[u8]) -> Vec<u8> {
        let f = &self.field;
        (0..self.cols)
            .map(|j| {
                (0..self.rows).fold(0u8, |acc, k| f.add(acc, f.mul(v[k], self.raw(k, j))))
            })
            .collect()
    }

    pub fn trace(&self) -> Result<FieldElement> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("trace of a non-square matrix".into()));
        }
        let f = &self.field;
        Ok(f.wrap((0..self.rows).fold(0u8, |acc, i| f.add(acc, self.raw(i, i)))))
    }

    pub fn det(&self) -> Result<FieldElement> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("determinant of a non-square matrix".into()));
        }
        let f = &self.field;
        let n = self.rows;
        let mut a = self.entries.clone();
        let mut det = 1u8;
        for c in 0..n {
            let Some(piv) = (c..n).find(|&r| a[r * n + c] != 0) else {
                return Ok(f.zero());
            };
            if piv != c {
                for j in 0..n {
                    a.swap(piv * n + j, c * n + j);
                }
                det = f.neg(det);
            }
            let pv = a[c * n + c];
            det = f.mul(det, pv);
            let pinv = f.inv_raw(pv);
            for r in c + 1..n {
                let factor = f.mul(a[r * n + c], pinv);
                if factor == 0 {
                    continue;
                }
                for j in c..n {
                    a[r * n + j] = f.sub(a[r * n + j], f.mul(factor, a[c * n + j]));
                }
            }
        }
        Ok(f.wrap(det))
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("inverse of a non-square matrix".into()));
        }
        let f = &self.field;
        let n = self.rows;
        let mut a = self.entries.clone();
        let mut inv = Self::identity(f, n).entries;
        for c in 0..n {
            let piv = (c..n).find(|&r| a[r * n + c] != 0).ok_or(Error::Singular)?;
            for j in 0..n {
                a.swap(piv * n + j, c * n + j);
                inv.swap(piv * n + j, c * n + j);
            }
            let pinv = f.inv_raw(a[c * n + c]);
            for j in 0..n {
                a[c * n + j] = f.mul(a[c * n + j], pinv);
                inv[c * n + j] = f.mul(inv[c * n + j], pinv);
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let factor = a[r * n + c];
                if factor == 0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] = f.sub(a[r * n + j], f.mul(factor, a[c * n + j]));
                    inv[r * n + j] = f.sub(inv[r * n + j], f.mul(factor, inv[c * n + j]));
                }
            }
        }
        Ok(Self::from_raw(f, n, n, inv))
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().map(|d| d.enc() == 1).unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse() {
        let f5 = FieldSpec::prime(5).unwrap();
        let m = RectMatrix::from_ints(&f5, 3, 3, &[1, 2, 0, 3, 1, 4, 0, 2, 2]).unwrap();
        // 1*(2-8) - 2*(6-0) = -18 = 2 mod 5
        assert_eq!(m.det().unwrap().enc(), 2);
        let inv = m.inverse().unwrap();
        assert_eq!(m.checked_mul(&inv).unwrap(), RectMatrix::identity(&f5, 3));
        let sing = RectMatrix::from_ints(&f5, 2, 2, &[1, 2, 2, 4]).unwrap();
        assert_eq!(sing.inverse(), Err(Error::Singular));
        assert_eq!(sing.det().unwrap().enc(), 0);
    }

    #[test]
    fn shape_errors() {
        let f3 = FieldSpec::prime(3).unwrap();
        let a = RectMatrix::zero(&f3, 2, 3);
        assert!(a.checked_mul(&a).is_err());
        assert!(a.det().is_err());
    }
}
