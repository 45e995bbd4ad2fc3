//! The (n−1)+1 parabolic of SL_n: matrix-space models and the trace-kernel transform.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use crate::characters::CharacterContext;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::functions::{ClassFn, FunctionOnSet, IndexedSet, KernelOperator};
use crate::matrix::RectMatrix;
use crate::quadric::lex_vectors;
use crate::scalars::Rational;

/// An element of the Wang monoid Mat_{n−1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WangMonoidMat {
    pub element: RectMatrix,
}

impl WangMonoidMat {
    pub fn n_minus_1(&self) -> usize {
        self.element.rows()
    }

    pub fn is_identity(&self) -> bool {
        self.element == RectMatrix::identity(self.element.field(), self.element.rows())
    }
}

/// (M, N) ↦ NM.
pub fn slipper_mirabolic(m: &RectMatrix, n: &RectMatrix) -> Result<WangMonoidMat> {
    if m.rows() != m.cols() + 1 || n.rows() != m.cols() || n.cols() != m.rows() {
        return Err(Error::ShapeMismatch(format!(
            "expected M of shape n x (n-1) and N of shape (n-1) x n, got {}x{} and {}x{}",
            m.rows(),
            m.cols(),
            n.rows(),
            n.cols()
        )));
    }
    Ok(WangMonoidMat {
        element: n.checked_mul(m)?,
    })
}

/// Model of g ∈ SL_n: its first n−1 columns.
pub fn model(g: &RectMatrix) -> RectMatrix {
    let n = g.rows();
    let mut m = RectMatrix::zero(g.field(), n, n - 1);
    for i in 0..n {
        for j in 0..n - 1 {
            m.set_raw(i, j, g.raw(i, j));
        }
    }
    m
}

/// Opposite model of g: the first n−1 rows of g⁻¹.
pub fn model_op(g: &RectMatrix) -> Result<RectMatrix> {
    let n = g.rows();
    let ginv = g.inverse()?;
    let mut m = RectMatrix::zero(g.field(), n - 1, n);
    for i in 0..n - 1 {
        for j in 0..n {
            m.set_raw(i, j, ginv.raw(i, j));
        }
    }
    Ok(m)
}

/// Mat_{n,n−1}(F_q) and Mat_{n−1,n}(F_q), each enumerated lexicographically in row-major entries.
#[derive(Clone, Debug)]
pub struct MirabolicSpaces {
    n: usize,
    ctx: CharacterContext,
    domain: Arc<IndexedSet>,
    codomain: Arc<IndexedSet>,
}

impl MirabolicSpaces {
    pub fn new(n: usize, ctx: &CharacterContext, budget: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Unsupported(format!("mirabolic case needs n ≥ 2, got {n}")));
        }
        let q = ctx.q();
        let entries = (n * (n - 1)) as u32;
        let required = (q as u64).checked_pow(entries).unwrap_or(u64::MAX);
        if required > budget {
            return Err(Error::OverBudget {
                what: format!("Mat_{{{n},{}}} over F_{q}", n - 1),
                required,
                budget,
            });
        }
        let coords: Vec<u8> = lex_vectors(q, entries as usize).flatten().collect();
        let field = ctx.field();
        let domain = IndexedSet::new(format!("Mat_{n}x{}(F_{q})", n - 1), field, entries as usize, coords.clone())?;
        let codomain = IndexedSet::new(format!("Mat_{}x{n}(F_{q})", n - 1), field, entries as usize, coords)?;
        Ok(Self {
            n,
            ctx: ctx.clone(),
            domain: Arc::new(domain),
            codomain: Arc::new(codomain),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ctx(&self) -> &CharacterContext {
        &self.ctx
    }

    pub fn domain(&self) -> &Arc<IndexedSet> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<IndexedSet> {
        &self.codomain
    }

    fn field(&self) -> &FieldSpec {
        self.ctx.field()
    }

    pub fn domain_matrix(&self, i: usize) -> RectMatrix {
        RectMatrix::from_raw(self.field(), self.n, self.n - 1, self.domain.point(i).to_vec())
    }

    pub fn codomain_matrix(&self, i: usize) -> RectMatrix {
        RectMatrix::from_raw(self.field(), self.n - 1, self.n, self.codomain.point(i).to_vec())
    }

    pub fn domain_index(&self, m: &RectMatrix) -> Option<usize> {
        (m.rows() == self.n && m.cols() == self.n - 1)
            .then(|| self.domain.index_of(m.raw_entries()))
            .flatten()
    }

    pub fn codomain_index(&self, m: &RectMatrix) -> Option<usize> {
        (m.rows() == self.n - 1 && m.cols() == self.n)
            .then(|| self.codomain.index_of(m.raw_entries()))
            .flatten()
    }

    /// q^{−(n²−n)/2}.
    pub fn normalization(&self) -> Rational {
        let e = (self.n * self.n - self.n) / 2;
        Rational::new(BigInt::one(), BigInt::from(self.ctx.q()).pow(e as u32))
    }

    /// tr(NM) with M an n×(n−1) and N an (n−1)×n row-major coordinate slice.
    fn trace_class(&self, negate: bool) -> Arc<ClassFn> {
        let field = self.field().clone();
        let n = self.n;
        Arc::new(move |m: &[u8], nn: &[u8]| {
            let mut acc = 0u8;
            for i in 0..n - 1 {
                for j in 0..n {
                    acc = field.add(acc, field.mul(nn[i * n + j], m[j * (n - 1) + i]));
                }
            }
            if negate {
                field.neg(acc) as usize
            } else {
                acc as usize
            }
        })
    }

    /// f ↦ q^{−(n²−n)/2} Σ_M f(M) ψ(tr(NM)), from Mat_{n,n−1} to Mat_{n−1,n}.
    pub fn forward_operator(&self) -> KernelOperator {
        KernelOperator::pairing(
            &self.domain,
            &self.codomain,
            self.ctx.prime(),
            self.trace_class(false),
            self.ctx.psi_table().to_vec(),
            self.normalization(),
        )
    }

    /// h ↦ q^{−(n²−n)/2} Σ_N h(N) ψ(−tr(NM)), from Mat_{n−1,n} back to Mat_{n,n−1}.
    pub fn backward_operator(&self) -> KernelOperator {
        let class = self.trace_class(true);
        let swapped: Arc<ClassFn> = Arc::new(move |nn: &[u8], m: &[u8]| class(m, nn));
        KernelOperator::pairing(
            &self.codomain,
            &self.domain,
            self.ctx.prime(),
            swapped,
            self.ctx.psi_table().to_vec(),
            self.normalization(),
        )
    }
}

pub fn mirabolic_fourier(spaces: &MirabolicSpaces, f: &FunctionOnSet) -> Result<FunctionOnSet> {
    spaces.forward_operator().apply(f)
}

pub fn mirabolic_fourier_op(spaces: &MirabolicSpaces, h: &FunctionOnSet) -> Result<FunctionOnSet> {
    spaces.backward_operator().apply(h)
}

fn check_pair(spaces: &MirabolicSpaces, g: &RectMatrix, m: &RectMatrix) -> Result<(RectMatrix, RectMatrix)> {
    let n = spaces.n;
    if g.rows() != n || g.cols() != n || m.rows() != n - 1 || m.cols() != n - 1 {
        return Err(Error::ShapeMismatch(format!(
            "expected g of size {n} and m of size {}",
            n - 1
        )));
    }
    if !g.is_unimodular() {
        return Err(Error::NotUnimodular);
    }
    Ok((g.inverse()?, m.inverse()?))
}

fn pull_back<M>(set: &Arc<IndexedSet>, f: &FunctionOnSet, map: M) -> Result<FunctionOnSet>
where
    M: Fn(&[u8]) -> Vec<u8>,
{
    if !set.same_as(f.set()) {
        return Err(Error::SetMismatch {
            expected: set.label().to_string(),
            found: f.set().label().to_string(),
        });
    }
    let values = (0..set.len())
        .map(|i| f.value(set.index_of(&map(set.point(i))).expect("closed under the action")).clone())
        .collect();
    FunctionOnSet::new(set, f.prime(), values)
}

/// ((g, m)·f)(M) = f(g⁻¹Mm) on Mat_{n,n−1}.
pub fn mirabolic_action(spaces: &MirabolicSpaces, g: &RectMatrix, m: &RectMatrix, f: &FunctionOnSet) -> Result<FunctionOnSet> {
    let (ginv, _) = check_pair(spaces, g, m)?;
    let (n, field) = (spaces.n, spaces.field().clone());
    pull_back(&spaces.domain, f, |x| {
        let mm = RectMatrix::from_raw(&field, n, n - 1, x.to_vec());
        ginv.checked_mul(&mm).unwrap().checked_mul(m).unwrap().raw_entries().to_vec()
    })
}

/// ((g, m)·h)(N) = h(m⁻¹Ng) on Mat_{n−1,n}.
pub fn mirabolic_action_op(
    spaces: &MirabolicSpaces,
    g: &RectMatrix,
    m: &RectMatrix,
    h: &FunctionOnSet,
) -> Result<FunctionOnSet> {
    let (_, minv) = check_pair(spaces, g, m)?;
    let (n, field) = (spaces.n, spaces.field().clone());
    pull_back(&spaces.codomain, h, |y| {
        let nn = RectMatrix::from_raw(&field, n - 1, n, y.to_vec());
        minv.checked_mul(&nn).unwrap().checked_mul(g).unwrap().raw_entries().to_vec()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slipper_examples() {
        let f = FieldSpec::prime(3).unwrap();
        let m = RectMatrix::from_ints(&f, 2, 1, &[1, 0]).unwrap();
        let n = RectMatrix::from_ints(&f, 1, 2, &[1, 0]).unwrap();
        let s = slipper_mirabolic(&m, &n).unwrap();
        assert!(s.is_identity());
        assert!(slipper_mirabolic(&m, &m).is_err());
        assert!(slipper_mirabolic(&RectMatrix::zero(&f, 2, 1), &n).unwrap().element.is_zero());
    }

    #[test]
    fn singular_levi_rejected() {
        let f = FieldSpec::prime(3).unwrap();
        let spaces = MirabolicSpaces::new(2, &CharacterContext::new(&f), 1000).unwrap();
        let g = RectMatrix::identity(&f, 2);
        let m = RectMatrix::zero(&f, 1, 1);
        let h = FunctionOnSet::zero(spaces.domain(), 3);
        assert_eq!(mirabolic_action(&spaces, &g, &m, &h), Err(Error::Singular));
    }
}
