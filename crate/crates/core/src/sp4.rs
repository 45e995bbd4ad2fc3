//! Sp₄ and its Siegel parabolic: the symplectic form, the Siegel cone model
//! and the Kloosterman transform on it.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use rand::Rng;

use crate::characters::CharacterContext;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::functions::{ClassFn, FunctionOnSet, IndexedSet, Kernel, KernelOperator, OrbitPartition};
use crate::matrix::RectMatrix;
use crate::quadric::{expected_count, lex_vectors, scaling_partition, QuadricPoint};
use crate::sampling::{random_element, random_invertible};
use crate::scalars::Rational;
use crate::Execution;

/// ω(x, y) = x₁y₄ − x₂y₃ + x₃y₂ − x₄y₁ on encoded coordinates.
#[inline]
pub(crate) fn omega_raw(f: &FieldSpec, x: &[u8], y: &[u8]) -> u8 {
    let a = f.sub(f.mul(x[0], y[3]), f.mul(x[1], y[2]));
    let b = f.sub(f.mul(x[2], y[1]), f.mul(x[3], y[0]));
    f.add(a, b)
}

pub fn omega(x: &[FieldElement], y: &[FieldElement]) -> Result<FieldElement> {
    if x.len() != 4 || y.len() != 4 {
        return Err(Error::ShapeMismatch(format!(
            "ω needs 4-vectors, got lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    let f = x[0].spec().clone();
    if x.iter().chain(y).any(|e| e.spec() != &f) {
        return Err(Error::FieldMismatch);
    }
    let xr: Vec<u8> = x.iter().map(FieldElement::raw).collect();
    let yr: Vec<u8> = y.iter().map(FieldElement::raw).collect();
    Ok(f.wrap(omega_raw(&f, &xr, &yr)))
}

/// The Gram matrix J of ω.
pub fn symplectic_form(field: &FieldSpec) -> RectMatrix {
    RectMatrix::from_ints(field, 4, 4, &[0, 0, 0, 1, 0, 0, -1, 0, 0, 1, 0, 0, -1, 0, 0, 0]).expect("4x4")
}

/// gᵀJg = J.
pub fn is_symplectic(g: &RectMatrix) -> bool {
    if g.rows() != 4 || g.cols() != 4 {
        return false;
    }
    let j = symplectic_form(g.field());
    g.transpose().checked_mul(&j).and_then(|m| m.checked_mul(g)).is_ok_and(|m| m == j)
}

fn check_sp4(g: &RectMatrix) -> Result<()> {
    if is_symplectic(g) {
        Ok(())
    } else {
        Err(Error::NotSymplectic)
    }
}

/// diag(m, m / det m).
pub fn embed_levi(m: &RectMatrix) -> Result<RectMatrix> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::ShapeMismatch(format!("expected 2x2, got {}x{}", m.rows(), m.cols())));
    }
    let det = m.det()?;
    if det.is_zero() {
        return Err(Error::Singular);
    }
    let lower = m.scalar_mul(&det.inv()?);
    let mut g = RectMatrix::zero(m.field(), 4, 4);
    for i in 0..2 {
        for j in 0..2 {
            g.set_raw(i, j, m.raw(i, j));
            g.set_raw(i + 2, j + 2, lower.raw(i, j));
        }
    }
    debug_assert!(is_symplectic(&g));
    Ok(g)
}

fn levi_lower(m: &RectMatrix) -> Result<RectMatrix> {
    let g = embed_levi(m)?;
    let mut l = RectMatrix::zero(m.field(), 2, 2);
    for i in 0..2 {
        for j in 0..2 {
            l.set_raw(i, j, g.raw(i + 2, j + 2));
        }
    }
    Ok(l)
}

fn siegel_unipotent(field: &FieldSpec, a: &FieldElement, b: &FieldElement, c: &FieldElement, upper: bool) -> RectMatrix {
    let mut g = RectMatrix::identity(field, 4);
    let block = [[a.raw(), b.raw()], [c.raw(), field.neg(a.raw())]];
    let (r0, c0) = if upper { (0, 2) } else { (2, 0) };
    for (i, row) in block.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            g.set_raw(r0 + i, c0 + j, v);
        }
    }
    g
}

/// (I B; 0 I) with B = (a b; c −a).
pub fn siegel_unipotent_upper(a: &FieldElement, b: &FieldElement, c: &FieldElement) -> RectMatrix {
    siegel_unipotent(a.spec(), a, b, c, true)
}

/// (I 0; C I) with C = (a b; c −a).
pub fn siegel_unipotent_lower(a: &FieldElement, b: &FieldElement, c: &FieldElement) -> RectMatrix {
    siegel_unipotent(a.spec(), a, b, c, false)
}

/// A product of six random Levi images and Siegel unipotents.
pub fn random_symplectic<R: Rng>(field: &FieldSpec, rng: &mut R) -> RectMatrix {
    let mut g = RectMatrix::identity(field, 4);
    for step in 0..6 {
        let factor = match step % 3 {
            0 => embed_levi(&random_invertible(field, 2, rng)).expect("invertible"),
            k => {
                let (a, b, c) = (
                    random_element(field, rng),
                    random_element(field, rng),
                    random_element(field, rng),
                );
                siegel_unipotent(field, &a, &b, &c, k == 1)
            }
        };
        g = g.checked_mul(&factor).expect("4x4");
    }
    g
}

/// A pair of columns (v₁, v₂) with ω(v₁, v₂) = 0.
#[derive(Clone, PartialEq, Eq)]
pub struct SiegelPoint {
    v1: Vec<FieldElement>,
    v2: Vec<FieldElement>,
}

impl fmt::Debug for SiegelPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.v1, self.v2)
    }
}

impl SiegelPoint {
    pub fn new(v1: Vec<FieldElement>, v2: Vec<FieldElement>) -> Result<Self> {
        if !omega(&v1, &v2)?.is_zero() {
            return Err(Error::PointNotInSet("ω(v₁, v₂) ≠ 0".into()));
        }
        Ok(Self { v1, v2 })
    }

    fn from_raw(field: &FieldSpec, coords: &[u8]) -> Self {
        Self {
            v1: coords[..4].iter().map(|&c| field.wrap(c)).collect(),
            v2: coords[4..].iter().map(|&c| field.wrap(c)).collect(),
        }
    }

    fn raw(&self) -> Vec<u8> {
        self.v1.iter().chain(&self.v2).map(FieldElement::raw).collect()
    }

    pub fn v1(&self) -> &[FieldElement] {
        &self.v1
    }

    pub fn v2(&self) -> &[FieldElement] {
        &self.v2
    }

    pub fn is_zero(&self) -> bool {
        self.v1.iter().chain(&self.v2).all(FieldElement::is_zero)
    }

    pub fn scaled(&self, lambda: &FieldElement) -> Self {
        let s = |v: &[FieldElement]| v.iter().map(|e| e.checked_mul(lambda).unwrap()).collect();
        Self {
            v1: s(&self.v1),
            v2: s(&self.v2),
        }
    }
}

fn columns(g: &RectMatrix, a: usize, b: usize) -> SiegelPoint {
    SiegelPoint {
        v1: g.column(a),
        v2: g.column(b),
    }
}

/// Columns 1 and 2 of g.
pub fn siegel_model(g: &RectMatrix) -> Result<SiegelPoint> {
    check_sp4(g)?;
    Ok(columns(g, 0, 1))
}

/// Columns 3 and 4 of g.
pub fn siegel_model_op(g: &RectMatrix) -> Result<SiegelPoint> {
    check_sp4(g)?;
    Ok(columns(g, 2, 3))
}

/// Rows (−ω(v₁,w₂), −ω(v₂,w₂)) and (ω(v₁,w₁), ω(v₂,w₁)) for x = (v₁, v₂), y = (w₁, w₂).
pub fn slipper_sp4(x: &SiegelPoint, y: &SiegelPoint) -> Result<RectMatrix> {
    let w = |a: &[FieldElement], b: &[FieldElement]| omega(a, b);
    let entries = vec![
        w(&x.v1, &y.v2)?.neg(),
        w(&x.v2, &y.v2)?.neg(),
        w(&x.v1, &y.v1)?,
        w(&x.v2, &y.v1)?,
    ];
    RectMatrix::new(x.v1[0].spec(), 2, 2, entries)
}

/// The upper-left 2×2 block of h⁻¹g.
pub fn levi_block(g: &RectMatrix, h: &RectMatrix) -> Result<RectMatrix> {
    check_sp4(g)?;
    check_sp4(h)?;
    let p = h.inverse()?.checked_mul(g)?;
    let mut out = RectMatrix::zero(g.field(), 2, 2);
    for i in 0..2 {
        for j in 0..2 {
            out.set_raw(i, j, p.raw(i, j));
        }
    }
    Ok(out)
}

/// (v₁, v₂) ↦ (u, u∨) with u = v₁ and u∨_j = ω(e_j, v₂).
pub fn to_quadric_coords(x: &SiegelPoint) -> QuadricPoint {
    let f = x.v1[0].spec();
    let raw = x.raw();
    let coords = quadric_raw(f, &raw);
    QuadricPoint::from_raw(f, &coords)
}

fn quadric_raw(f: &FieldSpec, x: &[u8]) -> [u8; 8] {
    let v2 = &x[4..];
    [x[0], x[1], x[2], x[3], v2[3], f.neg(v2[2]), v2[1], f.neg(v2[0])]
}

/// X = {(v₁, v₂) : ω(v₁, v₂) = 0}, ordered lexicographically in (v₁, v₂).
#[derive(Clone)]
pub struct SiegelSet {
    ctx: CharacterContext,
    points: Arc<IndexedSet>,
    scaling: Arc<OrbitPartition>,
}

impl fmt::Debug for SiegelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SiegelSet({}, {} points)", self.ctx.field(), self.len())
    }
}

impl SiegelSet {
    pub fn new(ctx: &CharacterContext, budget: u64) -> Result<Self> {
        let q = ctx.q();
        if q > 5 {
            return Err(Error::Unsupported(format!("Siegel cone requires q ≤ 5, got q = {q}")));
        }
        let required = expected_count(4, q);
        if required > budget {
            return Err(Error::OverBudget {
                what: format!("Siegel cone over F_{q}"),
                required,
                budget,
            });
        }
        let field = ctx.field().clone();
        let vectors: Vec<Vec<u8>> = lex_vectors(q, 4).collect();
        let mut coords = Vec::with_capacity(required as usize * 8);
        for v1 in &vectors {
            for v2 in &vectors {
                if omega_raw(&field, v1, v2) == 0 {
                    coords.extend_from_slice(v1);
                    coords.extend_from_slice(v2);
                }
            }
        }
        let points = Arc::new(IndexedSet::new(format!("Siegel(F_{q})"), &field, 8, coords)?);
        let scaling = Arc::new(scaling_partition(&points));
        Ok(Self {
            ctx: ctx.clone(),
            points,
            scaling,
        })
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

    pub fn point(&self, i: usize) -> SiegelPoint {
        SiegelPoint::from_raw(self.ctx.field(), self.points.point(i))
    }

    pub fn index_of(&self, x: &SiegelPoint) -> Option<usize> {
        self.points.index_of(&x.raw())
    }

    /// ω(v₁, w₂) + ω(w₁, v₂).
    pub fn kernel_arg(&self, x: usize, y: usize) -> u8 {
        kernel_arg_raw(self.ctx.field(), self.points.point(x), self.points.point(y))
    }

    /// The transform as a kernel operator with scale q⁻⁴.
    pub fn fourier_operator(&self) -> KernelOperator {
        let field = self.ctx.field().clone();
        let class: Arc<ClassFn> = Arc::new(move |x, y| kernel_arg_raw(&field, x, y) as usize);
        KernelOperator::pairing(
            &self.points,
            &self.points,
            self.ctx.prime(),
            class,
            self.ctx.kloosterman_table().to_vec(),
            Rational::new(BigInt::one(), BigInt::from(self.ctx.q()).pow(4)),
        )
    }

    pub fn special_projector(&self) -> KernelOperator {
        KernelOperator::new(
            &self.points,
            &self.points,
            self.ctx.prime(),
            Kernel::Projector(self.scaling.clone()),
            Rational::one(),
        )
    }

    pub fn special_generator(&self, x: usize) -> FunctionOnSet {
        let delta = FunctionOnSet::delta(&self.points, self.ctx.prime(), x);
        self.special_projector().apply(&delta).expect("same set")
    }

    /// Index of the point (v₁, v₂) in the d = 4 quadric enumeration's coordinates.
    pub(crate) fn quadric_coords(&self, i: usize) -> [u8; 8] {
        quadric_raw(self.ctx.field(), self.points.point(i))
    }
}

#[inline]
fn kernel_arg_raw(f: &FieldSpec, x: &[u8], y: &[u8]) -> u8 {
    f.add(omega_raw(f, &x[..4], &y[4..]), omega_raw(f, &y[..4], &x[4..]))
}

/// F(f)(w₁, w₂) = q⁻⁴ Σ f(v₁, v₂) Kl(ω(v₁, w₂) + ω(w₁, v₂)).
pub fn sp4_fourier(set: &SiegelSet, f: &FunctionOnSet) -> Result<FunctionOnSet> {
    sp4_fourier_with(set, f, Execution::default())
}

pub fn sp4_fourier_with(set: &SiegelSet, f: &FunctionOnSet, exec: Execution) -> Result<FunctionOnSet> {
    set.fourier_operator().apply_with(f, exec)
}

fn check_levi(m: &RectMatrix) -> Result<()> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::ShapeMismatch(format!("expected 2x2, got {}x{}", m.rows(), m.cols())));
    }
    if m.det()?.is_zero() {
        return Err(Error::Singular);
    }
    Ok(())
}

fn pull_back(set: &SiegelSet, f: &FunctionOnSet, ginv: &RectMatrix, right: &RectMatrix) -> Result<FunctionOnSet> {
    if !set.points.same_as(f.set()) {
        return Err(Error::SetMismatch {
            expected: set.points.label().to_string(),
            found: f.set().label().to_string(),
        });
    }
    let field = set.ctx.field();
    let values = (0..set.len())
        .map(|i| {
            let x = set.points.point(i);
            let v1 = ginv.apply_raw(&x[..4]);
            let v2 = ginv.apply_raw(&x[4..]);
            let mut y = vec![0u8; 8];
            for r in 0..4 {
                for c in 0..2 {
                    let t = field.add(field.mul(v1[r], right.raw(0, c)), field.mul(v2[r], right.raw(1, c)));
                    y[c * 4 + r] = t;
                }
            }
            f.value(set.points.index_of(&y).expect("cone is stable")).clone()
        })
        .collect();
    FunctionOnSet::new(&set.points, f.prime(), values)
}

/// ((g, m)·f)(V) = f(g⁻¹Vm), with V the 4×2 matrix of columns (v₁, v₂).
pub fn sp4_action(set: &SiegelSet, g: &RectMatrix, m: &RectMatrix, f: &FunctionOnSet) -> Result<FunctionOnSet> {
    check_sp4(g)?;
    check_levi(m)?;
    pull_back(set, f, &g.inverse()?, m)
}

/// ((g, m)·h)(W) = h(g⁻¹W·L(m)), where L(m) is the lower block of embed_levi(m).
pub fn sp4_action_op(set: &SiegelSet, g: &RectMatrix, m: &RectMatrix, h: &FunctionOnSet) -> Result<FunctionOnSet> {
    check_sp4(g)?;
    check_levi(m)?;
    pull_back(set, h, &g.inverse()?, &levi_lower(m)?)
}
