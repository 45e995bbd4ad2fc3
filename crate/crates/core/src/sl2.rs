//! The symplectic Fourier transform on A²(F_q).

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use crate::characters::CharacterContext;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::functions::{ClassFn, FunctionOnSet, IndexedSet, KernelOperator};
use crate::matrix::RectMatrix;
use crate::quadric::lex_vectors;
use crate::scalars::Rational;

/// A point (a, c) of the plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanePoint {
    pub a: FieldElement,
    pub c: FieldElement,
}

/// The plane A²(F_q), enumerated lexicographically in (a, c).
#[derive(Clone, Debug)]
pub struct Plane {
    ctx: CharacterContext,
    points: Arc<IndexedSet>,
}

impl Plane {
    pub fn new(ctx: &CharacterContext) -> Self {
        let q = ctx.q();
        let coords: Vec<u8> = lex_vectors(q, 2).flatten().collect();
        let points = IndexedSet::new(format!("A2(F_{q})"), ctx.field(), 2, coords).expect("distinct points");
        Self {
            ctx: ctx.clone(),
            points: Arc::new(points),
        }
    }

    pub fn ctx(&self) -> &CharacterContext {
        &self.ctx
    }

    pub fn points(&self) -> &Arc<IndexedSet> {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> PlanePoint {
        let e = self.points.point_elements(i);
        PlanePoint {
            a: e[0].clone(),
            c: e[1].clone(),
        }
    }

    pub fn index_of(&self, x: &PlanePoint) -> Option<usize> {
        self.points.index_of_elements(&[x.a.clone(), x.c.clone()])
    }

    /// The operator f ↦ q⁻¹ Σ_{(a,c)} f(a,c) ψ(ad − bc).
    pub fn fourier_operator(&self) -> KernelOperator {
        let field = self.ctx.field().clone();
        let class: Arc<ClassFn> = Arc::new(move |x, y| {
            // x = (a, c), y = (b, d)
            field.sub(field.mul(x[0], y[1]), field.mul(y[0], x[1])) as usize
        });
        KernelOperator::pairing(
            &self.points,
            &self.points,
            self.ctx.prime(),
            class,
            self.ctx.psi_table().to_vec(),
            Rational::new(BigInt::one(), BigInt::from(self.ctx.q())),
        )
    }
}

pub fn sl2_fourier(plane: &Plane, f: &FunctionOnSet) -> Result<FunctionOnSet> {
    plane.fourier_operator().apply(f)
}

pub fn sl2_matrix(field: &FieldSpec, a: i64, b: i64, c: i64, d: i64) -> Result<RectMatrix> {
    RectMatrix::from_ints(field, 2, 2, &[a, b, c, d])
}

fn check_sl2(g: &RectMatrix) -> Result<()> {
    if g.rows() != 2 || g.cols() != 2 {
        return Err(Error::ShapeMismatch(format!("expected 2x2, got {}x{}", g.rows(), g.cols())));
    }
    if !g.is_unimodular() {
        return Err(Error::NotUnimodular);
    }
    Ok(())
}

/// ad′ − cb′ for g = (a b; c d), h = (a′ b′; c′ d′).
pub fn sl2_pairing(g: &RectMatrix, h: &RectMatrix) -> Result<FieldElement> {
    check_sl2(g)?;
    check_sl2(h)?;
    if g.field() != h.field() {
        return Err(Error::FieldMismatch);
    }
    let f = g.field();
    Ok(f.wrap(f.sub(f.mul(g.raw(0, 0), h.raw(1, 1)), f.mul(g.raw(1, 0), h.raw(0, 1)))))
}

/// The model point of g: its first column.
pub fn model_point(g: &RectMatrix) -> PlanePoint {
    PlanePoint {
        a: g.get(0, 0),
        c: g.get(1, 0),
    }
}

/// The opposite model point of h: its second column (b, d).
pub fn model_point_op(h: &RectMatrix) -> PlanePoint {
    PlanePoint {
        a: h.get(0, 1),
        c: h.get(1, 1),
    }
}

/// (g·f)(x) = f(g⁻¹x).
pub fn sl2_action(plane: &Plane, g: &RectMatrix, f: &FunctionOnSet) -> Result<FunctionOnSet> {
    check_sl2(g)?;
    let ginv = g.inverse()?;
    pull_back(plane, f, |x| ginv.apply_raw(x))
}

/// (R_t f)(x) = f(tx) for t ≠ 0.
pub fn torus_action(plane: &Plane, t: &FieldElement, f: &FunctionOnSet) -> Result<FunctionOnSet> {
    if t.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let field = plane.ctx.field().clone();
    pull_back(plane, f, |x| x.iter().map(|&c| field.mul(t.raw(), c)).collect())
}

fn pull_back<M>(plane: &Plane, f: &FunctionOnSet, map: M) -> Result<FunctionOnSet>
where
    M: Fn(&[u8]) -> Vec<u8>,
{
    let set = &plane.points;
    if !set.same_as(f.set()) {
        return Err(Error::SetMismatch {
            expected: set.label().to_string(),
            found: f.set().label().to_string(),
        });
    }
    let values = (0..set.len())
        .map(|i| {
            let j = set.index_of(&map(set.point(i))).expect("plane is closed");
            f.value(j).clone()
        })
        .collect();
    FunctionOnSet::new(set, f.prime(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::CyclotomicNumber;

    #[test]
    fn pairing_examples() {
        let f = FieldSpec::prime(5).unwrap();
        let id = RectMatrix::identity(&f, 2);
        assert_eq!(sl2_pairing(&id, &id).unwrap().enc(), 1);
        // h = diag(2, 3): pairing = t^{-1} = 3
        let h = sl2_matrix(&f, 2, 0, 0, 3).unwrap();
        assert_eq!(sl2_pairing(&id, &h).unwrap().enc(), 3);
        let bad = sl2_matrix(&f, 2, 0, 0, 2).unwrap();
        assert_eq!(sl2_pairing(&bad, &id), Err(Error::NotUnimodular));
    }

    #[test]
    fn delta_at_origin() {
        let f = FieldSpec::prime(3).unwrap();
        let plane = Plane::new(&CharacterContext::new(&f));
        let zero = plane.index_of(&PlanePoint { a: f.zero(), c: f.zero() }).unwrap();
        let out = sl2_fourier(&plane, &FunctionOnSet::delta(plane.points(), 3, zero)).unwrap();
        let third = CyclotomicNumber::from_rational(3, crate::scalars::rational(1, 3));
        assert!(out.values().iter().all(|v| v == &third));
    }
}
