//! The quadric cone X = {(u, u∨) ∈ V × V* : ⟨u, u∨⟩ = 0} and its Kloosterman transform.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::characters::CharacterContext;
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::functions::{
    grid_index, orbit_partition, ClassFn, FunctionOnSet, IndexedSet, Kernel, KernelOperator, OrbitPartition,
};
use crate::lattice::{self, Lattice, ACC_LIMIT};
use crate::scalars::{CyclotomicNumber, Rational};
use crate::{map_indices, Execution};

pub const DEFAULT_BUDGET: u64 = 20_000;

/// A point (u, u∨) of the cone.
#[derive(Clone, PartialEq, Eq)]
pub struct QuadricPoint {
    u: Vec<FieldElement>,
    u_dual: Vec<FieldElement>,
}

impl fmt::Debug for QuadricPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.u, self.u_dual)
    }
}

impl QuadricPoint {
    pub fn new(u: Vec<FieldElement>, u_dual: Vec<FieldElement>) -> Result<Self> {
        if u.len() != u_dual.len() || u.is_empty() {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} against covector of length {}",
                u.len(),
                u_dual.len()
            )));
        }
        let field = u[0].spec().clone();
        if u.iter().chain(&u_dual).any(|e| e.spec() != &field) {
            return Err(Error::FieldMismatch);
        }
        let p = Self { u, u_dual };
        if !p.pairing().is_zero() {
            return Err(Error::ShapeMismatch("⟨u, u∨⟩ ≠ 0: point is off the quadric".into()));
        }
        Ok(p)
    }

    pub(crate) fn from_raw(field: &crate::field::FieldSpec, coords: &[u8]) -> Self {
        let d = coords.len() / 2;
        Self {
            u: coords[..d].iter().map(|&c| field.wrap(c)).collect(),
            u_dual: coords[d..].iter().map(|&c| field.wrap(c)).collect(),
        }
    }

    pub(crate) fn raw(&self) -> Vec<u8> {
        self.u.iter().chain(&self.u_dual).map(|e| e.raw()).collect()
    }

    pub fn u(&self) -> &[FieldElement] {
        &self.u
    }

    pub fn u_dual(&self) -> &[FieldElement] {
        &self.u_dual
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn pairing(&self) -> FieldElement {
        let f = self.u[0].spec();
        f.wrap(f.dot(
            &self.u.iter().map(|e| e.raw()).collect::<Vec<_>>(),
            &self.u_dual.iter().map(|e| e.raw()).collect::<Vec<_>>(),
        ))
    }

    pub fn is_zero(&self) -> bool {
        self.u.iter().chain(&self.u_dual).all(FieldElement::is_zero)
    }

    pub fn scaled(&self, lambda: &FieldElement) -> Self {
        let s = |v: &[FieldElement]| v.iter().map(|e| e.checked_mul(lambda).unwrap()).collect();
        Self {
            u: s(&self.u),
            u_dual: s(&self.u_dual),
        }
    }
}

/// ⟨u, v∨⟩ + ⟨v, u∨⟩ on encoded coordinates (u, u∨) and (v, v∨).
#[inline]
pub(crate) fn cross_pairing(field: &crate::field::FieldSpec, x: &[u8], y: &[u8]) -> u8 {
    let d = x.len() / 2;
    let a = field.dot(&x[..d], &y[d..]);
    let b = field.dot(&y[..d], &x[d..]);
    field.add(a, b)
}

pub fn expected_count(d: u32, q: u32) -> u64 {
    let q = q as u64;
    q.pow(2 * d - 1) + q.pow(d) - q.pow(d - 1)
}

/// The enumerated cone for a given d and field, with its scaling orbits.
#[derive(Clone)]
pub struct QuadricSet {
    d: usize,
    ctx: CharacterContext,
    points: Arc<IndexedSet>,
    scaling: Arc<OrbitPartition>,
}

impl fmt::Debug for QuadricSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadricSet(d={}, {}, {} points)", self.d, self.ctx.field(), self.len())
    }
}

pub(crate) fn lex_vectors(q: u32, len: usize) -> impl Iterator<Item = Vec<u8>> {
    let total = (q as u64).pow(len as u32);
    (0..total).map(move |mut code| {
        let mut v = vec![0u8; len];
        for slot in v.iter_mut().rev() {
            *slot = (code % q as u64) as u8;
            code /= q as u64;
        }
        v
    })
}

/// Orbits of x ↦ λx on a set closed under scaling by F_q^×.
pub(crate) fn scaling_partition(set: &IndexedSet) -> OrbitPartition {
    let field = set.field().clone();
    orbit_partition(set.len(), |i| {
        let x = set.point(i);
        field
            .units()
            .iter()
            .map(|l| {
                let y: Vec<u8> = x.iter().map(|&c| field.mul(l.raw(), c)).collect();
                set.index_of(&y).expect("set closed under scaling")
            })
            .collect()
    })
    .expect("scaling orbits partition the set")
}

/// Enumerates X(F_q) in lexicographic order of (u, u∨), refusing sizes over budget.
pub fn enumerate_quadric(d: usize, ctx: &CharacterContext, budget: u64) -> Result<QuadricSet> {
    let q = ctx.q();
    if !(1..=4).contains(&d) {
        return Err(Error::Unsupported(format!("quadric dimension d = {d} (supported: 1..=4)")));
    }
    if d == 4 && q > 5 {
        return Err(Error::Unsupported(format!("d = 4 requires q ≤ 5, got q = {q}")));
    }
    let required = expected_count(d as u32, q);
    if required > budget {
        return Err(Error::OverBudget {
            what: format!("quadric cone d={d} over F_{q}"),
            required,
            budget,
        });
    }
    let field = ctx.field().clone();
    let mut coords = Vec::with_capacity(required as usize * 2 * d);
    for u in lex_vectors(q, d) {
        for w in lex_vectors(q, d) {
            if field.dot(&u, &w) == 0 {
                coords.extend_from_slice(&u);
                coords.extend_from_slice(&w);
            }
        }
    }
    let points = Arc::new(IndexedSet::new(format!("X(d={d}, F_{q})"), &field, 2 * d, coords)?);
    debug_assert_eq!(points.len() as u64, required);
    let scaling = Arc::new(scaling_partition(&points));
    Ok(QuadricSet {
        d,
        ctx: ctx.clone(),
        points,
        scaling,
    })
}

impl QuadricSet {
    pub fn d(&self) -> usize {
        self.d
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

    pub fn prime(&self) -> u32 {
        self.ctx.prime()
    }

    pub fn point(&self, i: usize) -> QuadricPoint {
        QuadricPoint::from_raw(self.ctx.field(), self.points.point(i))
    }

    pub fn index_of(&self, x: &QuadricPoint) -> Option<usize> {
        if x.dim() != self.d || x.u[0].spec() != self.ctx.field() {
            return None;
        }
        self.points.index_of(&x.raw())
    }

    pub fn zero_index(&self) -> usize {
        self.points.index_of(&vec![0; 2 * self.d]).expect("origin is on the cone")
    }

    pub fn scaling_orbits(&self) -> &OrbitPartition {
        &self.scaling
    }

    pub fn kernel_arg(&self, x: usize, y: usize) -> u8 {
        cross_pairing(self.ctx.field(), self.points.point(x), self.points.point(y))
    }

    /// The transform of f ↦ Σ_x f(x) K(x, ·) as a kernel operator, scale 1.
    pub fn kernel_operator(&self) -> KernelOperator {
        let field = self.ctx.field().clone();
        let class: Arc<ClassFn> = Arc::new(move |x, y| cross_pairing(&field, x, y) as usize);
        KernelOperator::pairing(
            &self.points,
            &self.points,
            self.prime(),
            class,
            self.ctx.kloosterman_table().to_vec(),
            Rational::one(),
        )
    }

    pub fn special_projector(&self) -> KernelOperator {
        KernelOperator::new(
            &self.points,
            &self.points,
            self.prime(),
            Kernel::Projector(self.scaling.clone()),
            Rational::one(),
        )
    }

    /// P δ_x for the special projector P.
    pub fn special_generator(&self, x: usize) -> FunctionOnSet {
        let delta = FunctionOnSet::delta(&self.points, self.prime(), x);
        self.special_projector().apply(&delta).expect("same set")
    }

    pub fn is_special(&self, f: &FunctionOnSet) -> Result<bool> {
        Ok(&project_special(self, f)? == f)
    }
}

/// K(x, y) = Kl(⟨u, v∨⟩ + ⟨v, u∨⟩).
pub fn quadric_kernel(ctx: &CharacterContext, x: &QuadricPoint, y: &QuadricPoint) -> Result<CyclotomicNumber> {
    if x.dim() != y.dim() {
        return Err(Error::ShapeMismatch(format!(
            "points of dimensions {} and {}",
            x.dim(),
            y.dim()
        )));
    }
    if x.u[0].spec() != ctx.field() || y.u[0].spec() != ctx.field() {
        return Err(Error::FieldMismatch);
    }
    let arg = cross_pairing(ctx.field(), &x.raw(), &y.raw());
    Ok(ctx.kloosterman_table()[arg as usize].clone())
}

pub fn project_special(set: &QuadricSet, f: &FunctionOnSet) -> Result<FunctionOnSet> {
    set.special_projector().apply(f)
}

/// F(f)(y) = Σ_x f(x) K(x, y).
pub fn fourier_raw(set: &QuadricSet, f: &FunctionOnSet) -> Result<FunctionOnSet> {
    fourier_raw_with(set, f, Execution::default())
}

pub fn fourier_raw_with(set: &QuadricSet, f: &FunctionOnSet, exec: Execution) -> Result<FunctionOnSet> {
    let op = set.kernel_operator();
    if !op.domain().same_as(f.set()) {
        return op.apply_with(f, exec);
    }
    let n = 2 * set.d;
    let q = set.ctx.q() as f64;
    let sparse_cost = f.support().len() as f64 * set.len() as f64;
    let spectral_cost = n as f64 * q.powi(n as i32 + 1);
    if sparse_cost > spectral_cost {
        if let Some(values) = spectral_apply(set, f, exec) {
            return FunctionOnSet::new(&set.points, set.prime(), values);
        }
    }
    op.apply_with(f, exec)
}

/// The q^{-d}-normalized transform.
pub fn fourier_normalized(set: &QuadricSet, f: &FunctionOnSet) -> Result<FunctionOnSet> {
    let raw = fourier_raw(set, f)?;
    let q = BigInt::from(set.ctx.q());
    Ok(raw.scale_rational(&Rational::new(BigInt::one(), q.pow(set.d as u32))))
}

/// Evaluates the transform through the additive Fourier transform on F_q^{2d}.
///
/// With f̂(ξ) = Σ_x f(x) ψ(ξ·x) and ỹ = (v∨, v), grouping x by the value a of
/// ⟨u, v∨⟩ + ⟨v, u∨⟩ = x·ỹ gives F(f)(y) = Σ_t κ(t) f̂(tỹ), where
/// κ(t) = q⁻¹ Σ_a Kl(a) ψ(−ta).
fn spectral_apply(set: &QuadricSet, f: &FunctionOnSet, exec: Execution) -> Option<Vec<CyclotomicNumber>> {
    let ctx = &set.ctx;
    let field = ctx.field();
    let p = ctx.prime() as usize;
    let q = ctx.q() as usize;
    let n = 2 * set.d;
    let lat = Lattice::from_values(ctx.prime(), f.values())?;

    let inv_q = Rational::new(BigInt::one(), BigInt::from(q));
    let kappa: Vec<CyclotomicNumber> = (0..q as u8)
        .map(|t| {
            let mt = field.neg(t);
            (0..q as u8)
                .fold(CyclotomicNumber::zero(ctx.prime()), |acc, a| {
                    acc + &ctx.kloosterman_table()[a as usize] * &ctx.psi_table()[field.mul(mt, a) as usize]
                })
                .scale(&inv_q)
        })
        .collect();
    let (kappa_int, kmax) = lattice::integer_table(ctx.prime(), &kappa)?;
    if lat.max_abs * (q as f64).powi(n as i32 + 1) * kmax * p as f64 > ACC_LIMIT {
        return None;
    }

    let grid_len = q.pow(n as u32);
    let mut grid = vec![0i128; grid_len * p];
    for i in lat.support() {
        let g = grid_index(q as u64, set.points.point(i));
        for (k, &c) in lat.row(i).iter().enumerate() {
            grid[g * p + k] = c;
        }
    }
    let phase: Vec<usize> = (0..q * q)
        .map(|i| ctx.phase(field.mul((i / q) as u8, (i % q) as u8)))
        .collect();
    let mut line = vec![0i128; q * p];
    for axis in 0..n {
        let stride = q.pow(axis as u32);
        for base in 0..grid_len {
            if !(base / stride).is_multiple_of(q) {
                continue;
            }
            line.iter_mut().for_each(|c| *c = 0);
            for x in 0..q {
                let src = (base + x * stride) * p;
                if grid[src..src + p].iter().all(|&c| c == 0) {
                    continue;
                }
                for xi in 0..q {
                    let k = phase[xi * q + x];
                    lattice::shift_add(&mut line[xi * p..(xi + 1) * p], &grid[src..src + p], k);
                }
            }
            for xi in 0..q {
                let dst = (base + xi * stride) * p;
                grid[dst..dst + p].copy_from_slice(&line[xi * p..(xi + 1) * p]);
            }
        }
    }

    let d = set.d;
    let rows = map_indices(exec, set.len(), |y| {
        let pt = set.points.point(y);
        let mut acc = vec![0i128; p];
        let mut scaled = vec![0u8; n];
        for t in 0..q as u8 {
            if kappa_int[t as usize * p..(t as usize + 1) * p].iter().all(|&c| c == 0) {
                continue;
            }
            for j in 0..d {
                scaled[j] = field.mul(t, pt[d + j]);
                scaled[d + j] = field.mul(t, pt[j]);
            }
            let g = grid_index(q as u64, &scaled);
            lattice::conv_add(
                &mut acc,
                &kappa_int[t as usize * p..(t as usize + 1) * p],
                &grid[g * p..(g + 1) * p],
            );
        }
        acc
    });
    Some(
        rows.iter()
            .map(|r| lattice::cyclic_to_number(ctx.prime(), r, &lat.denom, &Rational::one()))
            .collect(),
    )
}

/// The six rows of the double-kernel-sum table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stratum {
    OriginBoth,
    EqualNonzero,
    ProportionalDistinct,
    OneZero,
    NonPropOrthogonal,
    NonPropGeneric,
}

impl Stratum {
    pub const ALL: [Stratum; 6] = [
        Stratum::OriginBoth,
        Stratum::EqualNonzero,
        Stratum::ProportionalDistinct,
        Stratum::OneZero,
        Stratum::NonPropOrthogonal,
        Stratum::NonPropGeneric,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Stratum::OriginBoth => "origin_both",
            Stratum::EqualNonzero => "equal_nonzero",
            Stratum::ProportionalDistinct => "proportional_distinct",
            Stratum::OneZero => "one_zero",
            Stratum::NonPropOrthogonal => "nonprop_orthogonal",
            Stratum::NonPropGeneric => "nonprop_generic",
        }
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn classify_raw(field: &crate::field::FieldSpec, x: &[u8], z: &[u8]) -> Stratum {
    let xz = x.iter().all(|&c| c == 0);
    let zz = z.iter().all(|&c| c == 0);
    match (xz, zz) {
        (true, true) => return Stratum::OriginBoth,
        (true, false) | (false, true) => return Stratum::OneZero,
        _ => {}
    }
    if x == z {
        return Stratum::EqualNonzero;
    }
    // z = λx forces λ = z_k / x_k at the first nonzero x_k
    let k = x.iter().position(|&c| c != 0).unwrap();
    let lambda = field.mul(z[k], field.inv_raw(x[k]));
    if lambda != 0 && x.iter().zip(z).all(|(&a, &b)| field.mul(lambda, a) == b) {
        return Stratum::ProportionalDistinct;
    }
    if cross_pairing(field, x, z) == 0 {
        Stratum::NonPropOrthogonal
    } else {
        Stratum::NonPropGeneric
    }
}

pub fn classify_pair(x: &QuadricPoint, z: &QuadricPoint) -> Result<Stratum> {
    if x.dim() != z.dim() {
        return Err(Error::ShapeMismatch("points lie on different quadrics".into()));
    }
    let field = x.u[0].spec();
    if z.u[0].spec() != field {
        return Err(Error::FieldMismatch);
    }
    Ok(classify_raw(field, &x.raw(), &z.raw()))
}

pub fn classify_indices(set: &QuadricSet, x: usize, z: usize) -> Stratum {
    classify_raw(set.ctx.field(), set.points.point(x), set.points.point(z))
}

/// Closed form of Σ_y K(x, y) K(y, z) on a stratum.
pub fn case_sum_formula(stratum: Stratum, d: u32, q: u32) -> Rational {
    let q = BigInt::from(q);
    let pw = |e: u32| q.pow(e);
    let v = match stratum {
        Stratum::OriginBoth => pw(2 * d - 1) + pw(d) - pw(d - 1),
        Stratum::EqualNonzero => pw(2 * d) - pw(2 * d - 1) + pw(d) - pw(d - 1),
        Stratum::ProportionalDistinct => -pw(2 * d - 1) + pw(d) - pw(d - 1),
        Stratum::OneZero | Stratum::NonPropOrthogonal => pw(d) - pw(d - 1),
        Stratum::NonPropGeneric => -pw(d - 1),
    };
    Rational::from_integer(v)
}

/// Σ_y K(x, y) K(y, z) by direct summation over y ∈ X.
pub fn double_kernel_sum(set: &QuadricSet, x: usize, z: usize) -> CyclotomicNumber {
    let q = set.ctx.q() as usize;
    // count y by the pair of kernel arguments, then weight by Kl(a) Kl(b)
    let mut counts = vec![0u64; q * q];
    for y in 0..set.len() {
        let a = set.kernel_arg(x, y) as usize;
        let b = set.kernel_arg(y, z) as usize;
        counts[a * q + b] += 1;
    }
    let p = set.prime() as usize;
    let mut acc = vec![0i128; p];
    let mut prod = vec![0i128; p];
    for a in 0..q {
        for b in 0..q {
            let n = counts[a * q + b];
            if n == 0 {
                continue;
            }
            prod.iter_mut().for_each(|c| *c = 0);
            let kb: Vec<i128> = set.ctx.kl_row(b as u8).iter().map(|&c| c * n as i128).collect();
            lattice::conv_add(&mut prod, set.ctx.kl_row(a as u8), &kb);
            acc.iter_mut().zip(&prod).for_each(|(s, &c)| *s += c);
        }
    }
    lattice::cyclic_to_number(set.prime(), &acc, &BigInt::one(), &Rational::one())
}

/// Σ_{λ ∈ F_q^×} K(x, λy).
pub fn scaled_kernel_sum(set: &QuadricSet, x: usize, y: usize) -> CyclotomicNumber {
    let field = set.ctx.field();
    let yc = set.points.point(y);
    field
        .units()
        .iter()
        .fold(CyclotomicNumber::zero(set.prime()), |acc, l| {
            let ly: Vec<u8> = yc.iter().map(|&c| field.mul(l.raw(), c)).collect();
            let arg = cross_pairing(field, set.points.point(x), &ly);
            acc + &set.ctx.kloosterman_table()[arg as usize]
        })
}

/// Number of ordered pairs in each stratum.
pub fn stratum_sizes(set: &QuadricSet) -> Vec<(Stratum, u64)> {
    let n = set.len() as u64;
    let q = set.ctx.q() as u64;
    let nz = n - 1;
    let equal = nz;
    let prop = nz * (q - 2);
    let one_zero = 2 * nz;
    let mut ortho = 0u64;
    let mut generic = 0u64;
    for x in 0..set.len() {
        for z in 0..set.len() {
            match classify_indices(set, x, z) {
                Stratum::NonPropOrthogonal => ortho += 1,
                Stratum::NonPropGeneric => generic += 1,
                _ => {}
            }
        }
    }
    vec![
        (Stratum::OriginBoth, 1),
        (Stratum::EqualNonzero, equal),
        (Stratum::ProportionalDistinct, prop),
        (Stratum::OneZero, one_zero),
        (Stratum::NonPropOrthogonal, ortho),
        (Stratum::NonPropGeneric, generic),
    ]
}

/// Pairs in a stratum: all of them when there are at most `limit`, otherwise
/// `limit` distinct pairs drawn with `rng`.
pub fn stratum_pairs<R: Rng>(set: &QuadricSet, stratum: Stratum, limit: usize, rng: &mut R) -> Vec<(usize, usize)> {
    let field = set.ctx.field();
    let zero = set.zero_index();
    let nonzero: Vec<usize> = (0..set.len()).filter(|&i| i != zero).collect();
    let scale = |x: usize, l: u8| -> usize {
        let y: Vec<u8> = set.points.point(x).iter().map(|&c| field.mul(l, c)).collect();
        set.points.index_of(&y).unwrap()
    };
    let all: Option<Vec<(usize, usize)>> = match stratum {
        Stratum::OriginBoth => Some(vec![(zero, zero)]),
        Stratum::EqualNonzero => Some(nonzero.iter().map(|&x| (x, x)).collect()),
        Stratum::ProportionalDistinct => Some(
            nonzero
                .iter()
                .flat_map(|&x| (2..set.ctx.q() as u8).map(move |l| (x, l)))
                .map(|(x, l)| (x, scale(x, l)))
                .collect(),
        ),
        Stratum::OneZero => Some(
            nonzero
                .iter()
                .flat_map(|&x| [(x, zero), (zero, x)])
                .collect(),
        ),
        _ => None,
    };
    if let Some(mut pairs) = all {
        if pairs.len() > limit {
            pairs.shuffle(rng);
            pairs.truncate(limit);
            pairs.sort_unstable();
        }
        return pairs;
    }
    let n = set.len();
    if n * n <= limit.max(1000).saturating_mul(4) {
        let mut pairs: Vec<(usize, usize)> = (0..n * n)
            .map(|i| (i / n, i % n))
            .filter(|&(x, z)| classify_indices(set, x, z) == stratum)
            .collect();
        if pairs.len() > limit {
            pairs.shuffle(rng);
            pairs.truncate(limit);
            pairs.sort_unstable();
        }
        return pairs;
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut attempts = 0usize;
    while seen.len() < limit && attempts < limit.saturating_mul(10_000) {
        attempts += 1;
        let x = nonzero[rng.gen_range(0..nonzero.len())];
        let z = nonzero[rng.gen_range(0..nonzero.len())];
        if classify_indices(set, x, z) == stratum {
            seen.insert((x, z));
        }
    }
    seen.into_iter().collect()
}

pub(crate) fn q_inverse_power(q: u32, e: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(q).pow(e))
}
