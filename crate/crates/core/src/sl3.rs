//! SL₃ modelled on the d = 3 quadric: cross-product ratio kernels, the
//! restricted space S′, Bernstein–Kazhdan transforms and the S₃ action.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::characters::CharacterContext;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::functions::{grid_index, orbit_partition, FunctionOnSet, Kernel, KernelOperator, OrbitPartition};
use crate::lattice::{self, Lattice, ACC_LIMIT};
use crate::matrix::RectMatrix;
use crate::quadric::{enumerate_quadric, fourier_raw_with, QuadricPoint, QuadricSet};
use crate::scalars::{CyclotomicNumber, Rational};
use crate::{map_indices, Execution};

/// The Wang monoid of SL₃, a copy of A² with invariants (A, B).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WangMonoidA2 {
    pub a: FieldElement,
    pub b: FieldElement,
}

impl WangMonoidA2 {
    pub fn is_identity(&self) -> bool {
        self.a.enc() == 1 && self.b.enc() == 1
    }
}

fn check_sl3(g: &RectMatrix) -> Result<()> {
    if g.rows() != 3 || g.cols() != 3 {
        return Err(Error::ShapeMismatch(format!("expected 3x3, got {}x{}", g.rows(), g.cols())));
    }
    if !g.is_unimodular() {
        return Err(Error::NotUnimodular);
    }
    Ok(())
}

#[inline]
fn cross_raw(field: &FieldSpec, u: &[u8], v: &[u8]) -> [u8; 3] {
    let c = |i: usize, j: usize| field.sub(field.mul(u[i], v[j]), field.mul(u[j], v[i]));
    [c(1, 2), c(2, 0), c(0, 1)]
}

/// Component k of u × v.
#[inline]
fn cross_component(field: &FieldSpec, u: &[u8], v: &[u8], k: usize) -> u8 {
    let (i, j) = ((k + 1) % 3, (k + 2) % 3);
    field.sub(field.mul(u[i], v[j]), field.mul(u[j], v[i]))
}

#[inline]
fn first_nonzero(v: &[u8]) -> Option<usize> {
    v.iter().position(|&c| c != 0)
}

/// λ with w = λ·reference, read off at the first nonzero coordinate of the reference.
/// Both arguments must annihilate a common 2-space, which the callers guarantee.
#[inline]
fn ratio_unchecked(field: &FieldSpec, w_k: u8, reference: &[u8], k: usize) -> u8 {
    field.mul(w_k, field.inv_raw(reference[k]))
}

/// u × v with orientation e₁ × e₂ = e₃.
pub fn cross(u: &[FieldElement], v: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let field = same_field(u, v)?;
    let ur: Vec<u8> = u.iter().map(FieldElement::raw).collect();
    let vr: Vec<u8> = v.iter().map(FieldElement::raw).collect();
    Ok(cross_raw(&field, &ur, &vr).iter().map(|&c| field.wrap(c)).collect())
}

/// The unique λ with w = λ·v_dual.
pub fn ratio(w: &[FieldElement], v_dual: &[FieldElement]) -> Result<FieldElement> {
    same_field(w, v_dual)?;
    let k = v_dual
        .iter()
        .position(|e| !e.is_zero())
        .ok_or(Error::RatioAgainstZero)?;
    let lambda = w[k].checked_div(&v_dual[k])?;
    if w.iter().zip(v_dual).any(|(a, b)| a != &lambda.checked_mul(b).unwrap()) {
        return Err(Error::NonProportional);
    }
    Ok(lambda)
}

fn same_field(u: &[FieldElement], v: &[FieldElement]) -> Result<FieldSpec> {
    if u.len() != 3 || v.len() != 3 {
        return Err(Error::ShapeMismatch(format!(
            "expected vectors of length 3, got {} and {}",
            u.len(),
            v.len()
        )));
    }
    let field = u[0].spec().clone();
    if u.iter().chain(v).any(|e| e.spec() != &field) {
        return Err(Error::FieldMismatch);
    }
    Ok(field)
}

fn point_from(field: &FieldSpec, v: &[u8], w: &[u8]) -> QuadricPoint {
    let coords: Vec<u8> = v.iter().chain(w).copied().collect();
    QuadricPoint::from_raw(field, &coords)
}

/// φ(g) = (c₁, c₁ × c₂), the first column of g and the third row of g⁻¹.
pub fn sl3_model(g: &RectMatrix) -> Result<QuadricPoint> {
    check_sl3(g)?;
    let (c1, c2) = (g.column_raw(0), g.column_raw(1));
    Ok(point_from(g.field(), &c1, &cross_raw(g.field(), &c1, &c2)))
}

/// (c₃, c₂ × c₃), the third column of g and the first row of g⁻¹.
pub fn sl3_model_op(g: &RectMatrix) -> Result<QuadricPoint> {
    check_sl3(g)?;
    let (c2, c3) = (g.column_raw(1), g.column_raw(2));
    Ok(point_from(g.field(), &c3, &cross_raw(g.field(), &c2, &c3)))
}

/// 𝔖(x, y) = (⟨w, v∨⟩, ⟨v, w∨⟩) for x = (v, v∨), y = (w, w∨).
pub fn slipper_sl3(x: &QuadricPoint, y: &QuadricPoint) -> Result<WangMonoidA2> {
    if x.dim() != 3 || y.dim() != 3 {
        return Err(Error::ShapeMismatch("slipper pairing needs points of the d = 3 quadric".into()));
    }
    let field = x.u()[0].spec();
    if y.u()[0].spec() != field {
        return Err(Error::FieldMismatch);
    }
    let (xr, yr) = (x.raw(), y.raw());
    Ok(WangMonoidA2 {
        a: field.wrap(field.dot(&yr[..3], &xr[3..])),
        b: field.wrap(field.dot(&xr[..3], &yr[3..])),
    })
}

/// The d = 3 quadric with the fibrations and torus orbits used by the SL₃ transforms.
#[derive(Clone)]
pub struct Sl3Space {
    quad: QuadricSet,
    /// Points (u, w) grouped by the grid index of w.
    by_covector: Vec<Vec<u32>>,
    /// Points (v, w) grouped by the grid index of v.
    by_vector: Vec<Vec<u32>>,
    vec_orbits: Arc<OrbitPartition>,
    covec_orbits: Arc<OrbitPartition>,
    diag_orbits: Arc<OrbitPartition>,
    torus_orbits: Arc<OrbitPartition>,
}

impl fmt::Debug for Sl3Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sl3Space({:?})", self.quad)
    }
}

impl Sl3Space {
    pub fn new(ctx: &CharacterContext, budget: u64) -> Result<Self> {
        let quad = enumerate_quadric(3, ctx, budget)?;
        let q = ctx.q() as usize;
        let field = ctx.field().clone();
        let set = quad.points().clone();
        let mut by_covector = vec![Vec::new(); q * q * q];
        let mut by_vector = vec![Vec::new(); q * q * q];
        for i in 0..set.len() {
            let x = set.point(i);
            by_vector[grid_index(q as u64, &x[..3])].push(i as u32);
            by_covector[grid_index(q as u64, &x[3..])].push(i as u32);
        }
        let scaled_orbits = |sv: bool, sw: bool| {
            orbit_partition(set.len(), |i| {
                let x = set.point(i);
                field
                    .units()
                    .iter()
                    .map(|l| {
                        let y: Vec<u8> = x
                            .iter()
                            .enumerate()
                            .map(|(j, &c)| if (j < 3 && sv) || (j >= 3 && sw) { field.mul(l.raw(), c) } else { c })
                            .collect();
                        set.index_of(&y).expect("quadric is closed under scaling")
                    })
                    .collect()
            })
            .map(Arc::new)
        };
        let torus_orbits = orbit_partition(set.len(), |i| {
            let x = set.point(i);
            let units = field.units();
            let mut out = Vec::with_capacity(units.len() * units.len());
            for l in &units {
                for m in &units {
                    let y: Vec<u8> = x
                        .iter()
                        .enumerate()
                        .map(|(j, &c)| field.mul(if j < 3 { l.raw() } else { m.raw() }, c))
                        .collect();
                    out.push(set.index_of(&y).expect("quadric is closed under scaling"));
                }
            }
            out
        })?;
        Ok(Self {
            vec_orbits: scaled_orbits(true, false)?,
            covec_orbits: scaled_orbits(false, true)?,
            diag_orbits: scaled_orbits(true, true)?,
            torus_orbits: Arc::new(torus_orbits),
            quad,
            by_covector,
            by_vector,
        })
    }

    pub fn quadric(&self) -> &QuadricSet {
        &self.quad
    }

    pub fn ctx(&self) -> &CharacterContext {
        self.quad.ctx()
    }

    pub fn len(&self) -> usize {
        self.quad.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quad.is_empty()
    }

    fn q(&self) -> usize {
        self.ctx().q() as usize
    }

    fn prime(&self) -> u32 {
        self.ctx().prime()
    }

    fn field(&self) -> &FieldSpec {
        self.ctx().field()
    }

    fn coords(&self, i: usize) -> &[u8] {
        self.quad.points().point(i)
    }

    /// The three commuting projectors cutting out S′: vector-slot scaling,
    /// covector-slot scaling and diagonal scaling.
    pub fn sprime_projectors(&self) -> [KernelOperator; 3] {
        let set = self.quad.points();
        let make = |part: &Arc<OrbitPartition>| {
            KernelOperator::new(set, set, self.prime(), Kernel::Projector(part.clone()), Rational::one())
        };
        [make(&self.vec_orbits), make(&self.covec_orbits), make(&self.diag_orbits)]
    }

    /// Orbits of (u, w) ↦ (λu, μw).
    pub fn torus_orbits(&self) -> &OrbitPartition {
        &self.torus_orbits
    }

    fn check(&self, f: &FunctionOnSet) -> Result<()> {
        if !self.quad.points().same_as(f.set()) {
            return Err(Error::SetMismatch {
                expected: self.quad.points().label().to_string(),
                found: f.set().label().to_string(),
            });
        }
        if f.prime() != self.prime() {
            return Err(Error::PrimeMismatch {
                left: self.prime(),
                right: f.prime(),
            });
        }
        Ok(())
    }

    /// Whether every vector-slot, covector-slot and diagonal scaling orbit sums to zero.
    pub fn in_sprime(&self, f: &FunctionOnSet) -> Result<bool> {
        self.check(f)?;
        let parts = [&self.vec_orbits, &self.covec_orbits, &self.diag_orbits];
        if let Some(lat) = Lattice::from_values(self.prime(), f.values()) {
            let w = lat.width;
            let mut sum = vec![0i128; w];
            for part in parts {
                for o in 0..part.count() {
                    sum.iter_mut().for_each(|c| *c = 0);
                    for &i in part.members(o) {
                        sum.iter_mut().zip(lat.row(i as usize)).for_each(|(s, &c)| *s += c);
                    }
                    // Σ c_i ζ^i = 0 in Z[ζ] iff all cyclic coefficients agree
                    if sum.iter().any(|&c| c != sum[0]) || (w == 1 && sum[0] != 0) {
                        return Ok(false);
                    }
                }
            }
            return Ok(true);
        }
        for part in parts {
            for o in 0..part.count() {
                let s = part
                    .members(o)
                    .iter()
                    .fold(CyclotomicNumber::zero(self.prime()), |acc, &i| acc + f.value(i as usize));
                if !s.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn gate(&self, f: &FunctionOnSet) -> Result<()> {
        if self.in_sprime(f)? {
            Ok(())
        } else {
            Err(Error::OutsideRestrictedSpace)
        }
    }

    /// Σ over terms (x, k) of f(x)·ζ^k for every output point, scaled.
    fn accumulate<T>(&self, f: &FunctionOnSet, scale: &Rational, max_terms: f64, exec: Execution, terms: T) -> FunctionOnSet
    where
        T: Fn(usize, &mut dyn FnMut(usize, usize)) + Sync + Send,
    {
        let p = self.prime() as usize;
        let set = self.quad.points();
        if let Some(lat) = Lattice::from_values(self.prime(), f.values()) {
            if lat.max_abs * max_terms * p as f64 <= ACC_LIMIT {
                let rows = map_indices(exec, set.len(), |y| {
                    let mut acc = vec![0i128; p];
                    terms(y, &mut |x, k| {
                        if !lat.is_zero_at(x) {
                            lattice::shift_add(&mut acc, lat.row(x), k)
                        }
                    });
                    acc
                });
                let values = rows
                    .iter()
                    .map(|r| lattice::cyclic_to_number(self.prime(), r, &lat.denom, scale))
                    .collect();
                return FunctionOnSet::new(set, self.prime(), values).expect("sizes agree");
            }
        }
        let values = map_indices(exec, set.len(), |y| {
            let mut acc = CyclotomicNumber::zero(self.prime());
            terms(y, &mut |x, k| {
                if !f.value(x).is_zero() {
                    acc = &acc + &(f.value(x) * &CyclotomicNumber::zeta_pow(self.prime(), k as i64));
                }
            });
            acc.scale(scale)
        });
        FunctionOnSet::new(set, self.prime(), values).expect("sizes agree")
    }

    fn inv_q(&self, e: u32) -> Rational {
        Rational::new(BigInt::one(), BigInt::from(self.q()).pow(e))
    }
}

/// q⁻¹ Σ_{u ⊥ v∨} f(u, v∨) ψ(ratio(u × v, v∨)), zero where v∨ = 0.
pub fn bk_transform_vec(space: &Sl3Space, f: &FunctionOnSet) -> Result<FunctionOnSet> {
    bk_transform_vec_with(space, f, Execution::default())
}

pub fn bk_transform_vec_with(space: &Sl3Space, f: &FunctionOnSet, exec: Execution) -> Result<FunctionOnSet> {
    space.gate(f)?;
    Ok(bk_fibers(space, f, exec, true))
}

/// q⁻¹ Σ_{u∨ ⊥ v} f(v, u∨) ψ(ratio(u∨ × v∨, v)), zero where v = 0.
pub fn bk_transform_covec(space: &Sl3Space, f: &FunctionOnSet) -> Result<FunctionOnSet> {
    bk_transform_covec_with(space, f, Execution::default())
}

pub fn bk_transform_covec_with(space: &Sl3Space, f: &FunctionOnSet, exec: Execution) -> Result<FunctionOnSet> {
    space.gate(f)?;
    Ok(bk_fibers(space, f, exec, false))
}

fn bk_fibers(space: &Sl3Space, f: &FunctionOnSet, exec: Execution, vector_slot: bool) -> FunctionOnSet {
    let q = space.q();
    let field = space.field().clone();
    let (moving, fixed) = if vector_slot { (0..3, 3..6) } else { (3..6, 0..3) };
    let fibers = if vector_slot { &space.by_covector } else { &space.by_vector };
    space.accumulate(f, &space.inv_q(1), (q * q) as f64, exec, |y, emit| {
        let yc = space.coords(y);
        let reference = &yc[fixed.clone()];
        let Some(k) = first_nonzero(reference) else { return };
        let v = &yc[moving.clone()];
        for &x in &fibers[grid_index(q as u64, reference)] {
            let u = &space.coords(x as usize)[moving.clone()];
            let r = ratio_unchecked(&field, cross_component(&field, u, v, k), reference, k);
            emit(x as usize, space.ctx().phase(r));
        }
    })
}

/// Projection onto S′ through the three scaling projectors.
pub fn project_sprime(space: &Sl3Space, f: &FunctionOnSet) -> Result<FunctionOnSet> {
    space.check(f)?;
    let mut g = f.clone();
    for op in space.sprime_projectors() {
        g = op.apply(&g)?;
    }
    Ok(g)
}

/// The composite transform as a direct triple sum over c₁ ⊥ r̄₃, c₂ ⊥ r̄₃, r̄₁, scaled by q⁻³.
///
/// For an output (c₃, r̄₁) and an input (c₁, r̄₃) the middle vector c₂ runs over
/// the line spanned by r̄₃ × r̄₁, or over r̄₁^⊥ when r̄₃ and r̄₁ are proportional.
pub fn composite_triple_sum(space: &Sl3Space, f: &FunctionOnSet) -> Result<FunctionOnSet> {
    composite_triple_sum_with(space, f, Execution::default())
}

pub fn composite_triple_sum_with(space: &Sl3Space, f: &FunctionOnSet, exec: Execution) -> Result<FunctionOnSet> {
    space.gate(f)?;
    let q = space.q();
    let field = space.field().clone();
    let ctx = space.ctx();
    let p = space.prime() as usize;
    let support: Vec<usize> = f
        .support()
        .into_iter()
        .filter(|&x| {
            let c = space.coords(x);
            c[..3].iter().any(|&e| e != 0) && c[3..].iter().any(|&e| e != 0)
        })
        .collect();
    let units: Vec<u8> = (1..q as u8).collect();
    let max_terms = (support.len() * q * q) as f64;
    Ok(space.accumulate(f, &space.inv_q(3), max_terms, exec, |y, emit| {
        let yc = space.coords(y);
        let (c3, r1) = (&yc[..3], &yc[3..]);
        let Some(k1) = first_nonzero(r1) else { return };
        for &x in &support {
            let xc = space.coords(x);
            let (c1, r3) = (&xc[..3], &xc[3..]);
            let k3 = first_nonzero(r3).expect("filtered");
            let n = cross_raw(&field, r3, r1);
            let mut term = |c2: &[u8]| {
                let kc = first_nonzero(c2).expect("nonzero middle vector");
                let a = ratio_unchecked(&field, cross_component(&field, c1, c2, k3), r3, k3);
                let b = ratio_unchecked(&field, n[kc], c2, kc);
                let c = ratio_unchecked(&field, cross_component(&field, c2, c3, k1), r1, k1);
                emit(x, (ctx.phase(a) + ctx.phase(b) + ctx.phase(c)) % p);
            };
            if n.iter().any(|&e| e != 0) {
                for &l in &units {
                    let c2 = [field.mul(l, n[0]), field.mul(l, n[1]), field.mul(l, n[2])];
                    term(&c2);
                }
            } else {
                for &z in &space.by_covector[grid_index(q as u64, r1)] {
                    let c2 = &space.coords(z as usize)[..3];
                    if c2.iter().any(|&e| e != 0) {
                        term(c2);
                    }
                }
            }
        }
    }))
}

/// q⁻³ Σ_x f(x) Kl(⟨u, v∨⟩ + ⟨v, u∨⟩).
pub fn sl3_kloosterman(space: &Sl3Space, f: &FunctionOnSet) -> Result<FunctionOnSet> {
    sl3_kloosterman_with(space, f, Execution::default())
}

pub fn sl3_kloosterman_with(space: &Sl3Space, f: &FunctionOnSet, exec: Execution) -> Result<FunctionOnSet> {
    Ok(fourier_raw_with(&space.quad, f, exec)?.scale_rational(&space.inv_q(3)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WeylLetter {
    S1,
    S2,
}

impl fmt::Display for WeylLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeylLetter::S1 => "s1",
            WeylLetter::S2 => "s2",
        })
    }
}

/// A word in s₁, s₂, written like "s1s2s1", "s1 s2" or "s1,s2"; the empty string is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeylWord(pub Vec<WeylLetter>);

impl FromStr for WeylWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace() && *c != ',' && *c != '·').collect();
        let mut letters = Vec::new();
        let mut rest = cleaned.as_str();
        while !rest.is_empty() {
            let letter = if let Some(r) = rest.strip_prefix("s1") {
                rest = r;
                WeylLetter::S1
            } else if let Some(r) = rest.strip_prefix("s2") {
                rest = r;
                WeylLetter::S2
            } else {
                let bad: String = rest.chars().take(2).collect();
                return Err(Error::InvalidWeylLetter(bad));
            };
            letters.push(letter);
        }
        Ok(Self(letters))
    }
}

impl fmt::Display for WeylWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Applies a word as operators on S′, rightmost letter first; s₁ is the vector-slot transform.
pub fn weyl_action(space: &Sl3Space, word: &WeylWord, f: &FunctionOnSet) -> Result<FunctionOnSet> {
    weyl_action_with(space, word, f, Execution::default())
}

pub fn weyl_action_with(space: &Sl3Space, word: &WeylWord, f: &FunctionOnSet, exec: Execution) -> Result<FunctionOnSet> {
    space.gate(f)?;
    let mut g = f.clone();
    for letter in word.0.iter().rev() {
        g = match letter {
            WeylLetter::S1 => bk_transform_vec_with(space, &g, exec)?,
            WeylLetter::S2 => bk_transform_covec_with(space, &g, exec)?,
        };
    }
    Ok(g)
}

/// (g·f)(v, v∨) = f(g⁻¹v, v∨g).
pub fn sl3_action(space: &Sl3Space, g: &RectMatrix, f: &FunctionOnSet) -> Result<FunctionOnSet> {
    check_sl3(g)?;
    space.check(f)?;
    let ginv = g.inverse()?;
    let set = space.quad.points();
    let values = (0..set.len())
        .map(|i| {
            let x = set.point(i);
            let mut y = ginv.apply_raw(&x[..3]);
            y.extend(g.left_apply_raw(&x[3..]));
            f.value(set.index_of(&y).expect("quadric is G-stable")).clone()
        })
        .collect();
    FunctionOnSet::new(set, f.prime(), values)
}

/// g·(v, v∨) = (gv, v∨g⁻¹).
pub fn act_on_point(g: &RectMatrix, x: &QuadricPoint) -> Result<QuadricPoint> {
    check_sl3(g)?;
    if x.dim() != 3 {
        return Err(Error::ShapeMismatch("expected a point of the d = 3 quadric".into()));
    }
    let raw = x.raw();
    let ginv = g.inverse()?;
    Ok(point_from(g.field(), &g.apply_raw(&raw[..3]), &ginv.left_apply_raw(&raw[3..])))
}

/// A basis of S′ drawn from the projected deltas P′δ_x.
#[derive(Clone, Debug)]
pub struct SprimeBasis {
    /// Points x whose P′δ_x form the basis.
    pub points: Vec<usize>,
    pub functions: Vec<FunctionOnSet>,
    /// Number of nonzero P′δ_x.
    pub spanning_count: usize,
}

impl SprimeBasis {
    pub fn dimension(&self) -> usize {
        self.functions.len()
    }
}

/// P′δ_x for every x, reduced to a basis by exact elimination inside each torus orbit.
///
/// P′ commutes with the (F_q^×)² action and each P′δ_x is supported on the orbit
/// of x, so independence can be decided one orbit at a time.
pub fn sprime_basis(space: &Sl3Space) -> SprimeBasis {
    let set = space.quad.points();
    let prime = space.prime();
    let torus = &space.torus_orbits;
    let mut basis = SprimeBasis {
        points: Vec::new(),
        functions: Vec::new(),
        spanning_count: 0,
    };
    for o in 0..torus.count() {
        let members: Vec<usize> = torus.members(o).iter().map(|&i| i as usize).collect();
        let local = |i: usize| members.binary_search(&i).expect("orbit member");
        let mut echelon: Vec<(usize, Vec<Rational>)> = Vec::new();
        for &x in &members {
            let mut v = vec![Rational::zero(); members.len()];
            v[local(x)] = Rational::one();
            for part in [&space.vec_orbits, &space.covec_orbits, &space.diag_orbits] {
                v = project_local(&v, &members, part, &local);
            }
            if v.iter().all(Zero::is_zero) {
                continue;
            }
            basis.spanning_count += 1;
            let image = v.clone();
            let mut r = v;
            for (pivot, row) in &echelon {
                if !r[*pivot].is_zero() {
                    let c = r[*pivot].clone();
                    r.iter_mut().zip(row).for_each(|(a, b)| *a -= &c * b);
                }
            }
            if let Some(pivot) = r.iter().position(|c| !c.is_zero()) {
                let inv = r[pivot].recip();
                r.iter_mut().for_each(|c| *c *= &inv);
                for (_, row) in echelon.iter_mut() {
                    if !row[pivot].is_zero() {
                        let c = row[pivot].clone();
                        row.iter_mut().zip(&r).for_each(|(a, b)| *a -= &c * b);
                    }
                }
                echelon.push((pivot, r));
                let mut values = vec![CyclotomicNumber::zero(prime); set.len()];
                for (pos, &m) in members.iter().enumerate() {
                    values[m] = CyclotomicNumber::from_rational(prime, image[pos].clone());
                }
                basis.points.push(x);
                basis
                    .functions
                    .push(FunctionOnSet::new(set, prime, values).expect("sizes agree"));
            }
        }
    }
    basis
}

fn project_local<L>(v: &[Rational], members: &[usize], part: &OrbitPartition, local: &L) -> Vec<Rational>
where
    L: Fn(usize) -> usize,
{
    let mut out = v.to_vec();
    let mut done = vec![false; members.len()];
    for (pos, &m) in members.iter().enumerate() {
        if done[pos] {
            continue;
        }
        let orbit = part.members(part.orbit_of(m));
        let idx: Vec<usize> = orbit.iter().map(|&i| local(i as usize)).collect();
        let avg = idx.iter().fold(Rational::zero(), |acc, &j| acc + &v[j]) / Rational::from_integer(BigInt::from(idx.len()));
        for &j in &idx {
            out[j] = &v[j] - &avg;
            done[j] = true;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(q: u32) -> Sl3Space {
        let f = FieldSpec::with_q(q, None).unwrap();
        Sl3Space::new(&CharacterContext::new(&f), 100_000).unwrap()
    }

    #[test]
    fn cross_and_ratio() {
        let f = FieldSpec::prime(5).unwrap();
        let e = |v: [i64; 3]| v.iter().map(|&c| f.element(c.rem_euclid(5) as u32).unwrap()).collect::<Vec<_>>();
        assert_eq!(cross(&e([1, 0, 0]), &e([0, 1, 0])).unwrap(), e([0, 0, 1]));
        assert_eq!(ratio(&e([0, 0, 2]), &e([0, 0, 1])).unwrap().enc(), 2);
        assert_eq!(ratio(&e([0, 0, 0]), &e([0, 1, 1])).unwrap().enc(), 0);
        assert_eq!(ratio(&e([1, 0, 0]), &e([0, 0, 0])), Err(Error::RatioAgainstZero));
        assert_eq!(ratio(&e([1, 1, 0]), &e([1, 2, 0])), Err(Error::NonProportional));
    }

    #[test]
    fn sprime_vanishes_for_small_fields() {
        assert_eq!(sprime_basis(&space(3)).dimension(), 0);
        assert_eq!(sprime_basis(&space(4)).dimension(), 210);
    }

    #[test]
    fn gate_rejects_delta() {
        let s = space(3);
        let x = s.quadric().points().len() - 1;
        let f = FunctionOnSet::delta(s.quadric().points(), 3, x);
        assert_eq!(bk_transform_vec(&s, &f), Err(Error::OutsideRestrictedSpace));
        let zero = FunctionOnSet::zero(s.quadric().points(), 3);
        assert!(bk_transform_vec(&s, &zero).unwrap().is_zero());
    }

    #[test]
    fn words_parse() {
        let w: WeylWord = "s1 s2,s1".parse().unwrap();
        assert_eq!(w.0, vec![WeylLetter::S1, WeylLetter::S2, WeylLetter::S1]);
        assert_eq!("".parse::<WeylWord>().unwrap().0, vec![]);
        assert!(matches!("s3".parse::<WeylWord>(), Err(Error::InvalidWeylLetter(_))));
        assert_eq!(w.to_string(), "s1s2s1");
    }
}
