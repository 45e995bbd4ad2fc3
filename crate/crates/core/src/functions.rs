//! Exact-valued functions on enumerated finite sets and kernel operators between them.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::lattice::{self, Lattice, ACC_LIMIT};
use crate::scalars::{CyclotomicNumber, Rational};
use crate::{map_indices, Execution};

const DENSE_LOOKUP_LIMIT: u64 = 1 << 24;

enum Lookup {
    Dense(Vec<u32>),
    Map(HashMap<Vec<u8>, u32>),
}

/// A finite set of points in F_q^k, indexed 0..len in a fixed order.
pub struct IndexedSet {
    label: String,
    field: FieldSpec,
    arity: usize,
    coords: Vec<u8>,
    lookup: Lookup,
}

impl fmt::Debug for IndexedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndexedSet({}, {} points)", self.label, self.len())
    }
}

impl IndexedSet {
    /// Builds the set from flattened encoded coordinates, `arity` per point.
    pub fn new(label: impl Into<String>, field: &FieldSpec, arity: usize, coords: Vec<u8>) -> Result<Self> {
        let label = label.into();
        if arity == 0 || !coords.len().is_multiple_of(arity) {
            return Err(Error::ShapeMismatch(format!(
                "{} coordinates do not split into points of arity {arity}",
                coords.len()
            )));
        }
        let q = field.q() as u64;
        if coords.iter().any(|&c| c as u64 >= q) {
            return Err(Error::InvalidField(format!("coordinate outside F_{q}")));
        }
        let n = coords.len() / arity;
        let grid = q.checked_pow(arity as u32).unwrap_or(u64::MAX);
        let lookup = if grid <= DENSE_LOOKUP_LIMIT {
            let mut table = vec![u32::MAX; grid as usize];
            for i in 0..n {
                let key = grid_index(q, &coords[i * arity..(i + 1) * arity]);
                if table[key] != u32::MAX {
                    return Err(Error::ShapeMismatch(format!("duplicate point {i} in {label}")));
                }
                table[key] = i as u32;
            }
            Lookup::Dense(table)
        } else {
            let mut map = HashMap::with_capacity(n);
            for i in 0..n {
                if map
                    .insert(coords[i * arity..(i + 1) * arity].to_vec(), i as u32)
                    .is_some()
                {
                    return Err(Error::ShapeMismatch(format!("duplicate point {i} in {label}")));
                }
            }
            Lookup::Map(map)
        };
        Ok(Self {
            label,
            field: field.clone(),
            arity,
            coords,
            lookup,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Encoded coordinates of point i (decode).
    #[inline]
    pub fn point(&self, i: usize) -> &[u8] {
        &self.coords[i * self.arity..(i + 1) * self.arity]
    }

    pub fn point_elements(&self, i: usize) -> Vec<FieldElement> {
        self.point(i).iter().map(|&c| self.field.wrap(c)).collect()
    }

    /// Index of a point given by encoded coordinates (encode).
    #[inline]
    pub fn index_of(&self, coords: &[u8]) -> Option<usize> {
        if coords.len() != self.arity {
            return None;
        }
        match &self.lookup {
            Lookup::Dense(t) => {
                let q = self.field.q() as u64;
                if coords.iter().any(|&c| c as u64 >= q) {
                    return None;
                }
                let v = t[grid_index(q, coords)];
                (v != u32::MAX).then_some(v as usize)
            }
            Lookup::Map(m) => m.get(coords).map(|&v| v as usize),
        }
    }

    pub fn index_of_elements(&self, point: &[FieldElement]) -> Option<usize> {
        if point.iter().any(|e| e.spec() != &self.field) {
            return None;
        }
        let coords: Vec<u8> = point.iter().map(|e| e.raw()).collect();
        self.index_of(&coords)
    }

    pub(crate) fn same_as(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
            || (self.label == other.label
                && self.arity == other.arity
                && self.field == other.field
                && self.coords == other.coords)
    }
}

pub(crate) fn grid_index(q: u64, coords: &[u8]) -> usize {
    coords.iter().rev().fold(0u64, |acc, &c| acc * q + c as u64) as usize
}

fn check_set(expected: &IndexedSet, found: &IndexedSet) -> Result<()> {
    if expected.same_as(found) {
        Ok(())
    } else {
        Err(Error::SetMismatch {
            expected: expected.label().to_string(),
            found: found.label().to_string(),
        })
    }
}

/// A function from an indexed set to Q(ζ_p), stored densely.
#[derive(Clone)]
pub struct FunctionOnSet {
    set: Arc<IndexedSet>,
    prime: u32,
    values: Vec<CyclotomicNumber>,
}

impl fmt::Debug for FunctionOnSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FunctionOnSet({}, support {})", self.set.label(), self.support().len())
    }
}

impl PartialEq for FunctionOnSet {
    fn eq(&self, other: &Self) -> bool {
        self.set.same_as(&other.set) && self.prime == other.prime && self.values == other.values
    }
}

impl FunctionOnSet {
    pub fn new(set: &Arc<IndexedSet>, prime: u32, values: Vec<CyclotomicNumber>) -> Result<Self> {
        if values.len() != set.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a set of {} points",
                values.len(),
                set.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| v.prime() != prime) {
            return Err(Error::PrimeMismatch {
                left: prime,
                right: v.prime(),
            });
        }
        Ok(Self {
            set: set.clone(),
            prime,
            values,
        })
    }

    pub fn zero(set: &Arc<IndexedSet>, prime: u32) -> Self {
        Self {
            set: set.clone(),
            prime,
            values: vec![CyclotomicNumber::zero(prime); set.len()],
        }
    }

    pub fn delta(set: &Arc<IndexedSet>, prime: u32, index: usize) -> Self {
        let mut f = Self::zero(set, prime);
        f.values[index] = CyclotomicNumber::one(prime);
        f
    }

    pub fn from_fn<F>(set: &Arc<IndexedSet>, prime: u32, f: F) -> Self
    where
        F: FnMut(usize) -> CyclotomicNumber,
    {
        let values = (0..set.len()).map(f).collect();
        Self {
            set: set.clone(),
            prime,
            values,
        }
    }

    pub fn set(&self) -> &Arc<IndexedSet> {
        &self.set
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn values(&self) -> &[CyclotomicNumber] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &CyclotomicNumber {
        &self.values[i]
    }

    pub fn into_values(self) -> Vec<CyclotomicNumber> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(CyclotomicNumber::is_zero)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| !self.values[i].is_zero())
            .collect()
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        check_set(&self.set, &other.set)?;
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch {
                left: self.prime,
                right: other.prime,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self {
            values,
            ..self.clone_shell()
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self {
            values,
            ..self.clone_shell()
        })
    }

    pub fn scale(&self, c: &CyclotomicNumber) -> Self {
        let values = self.values.iter().map(|v| v * c).collect();
        Self {
            values,
            ..self.clone_shell()
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        let values = self.values.iter().map(|v| v.scale(r)).collect();
        Self {
            values,
            ..self.clone_shell()
        }
    }

    fn clone_shell(&self) -> Self {
        Self {
            set: self.set.clone(),
            prime: self.prime,
            values: Vec::new(),
        }
    }

    /// Reindexes onto another set of the same size: result(σ(i)) = self(i).
    pub fn transport<F>(&self, target: &Arc<IndexedSet>, sigma: F) -> Result<Self>
    where
        F: Fn(usize) -> usize,
    {
        if target.len() != self.set.len() {
            return Err(Error::ShapeMismatch(format!(
                "cannot transport {} points onto {}",
                self.set.len(),
                target.len()
            )));
        }
        let mut values = vec![CyclotomicNumber::zero(self.prime); target.len()];
        for (i, v) in self.values.iter().enumerate() {
            values[sigma(i)] = v.clone();
        }
        Self::new(target, self.prime, values)
    }

    pub fn to_json(&self) -> FunctionJson {
        FunctionJson {
            set: self.set.label().to_string(),
            size: self.set.len(),
            prime: self.prime,
            values: self
                .support()
                .into_iter()
                .map(|i| {
                    let coeffs = self.values[i].coeffs().iter().map(|c| c.to_string()).collect();
                    (i, coeffs)
                })
                .collect(),
        }
    }

    pub fn from_json(set: &Arc<IndexedSet>, json: &FunctionJson) -> Result<Self> {
        if json.set != set.label() || json.size != set.len() {
            return Err(Error::SetMismatch {
                expected: set.label().to_string(),
                found: json.set.clone(),
            });
        }
        let mut f = Self::zero(set, json.prime);
        for (i, coeffs) in &json.values {
            if *i >= set.len() {
                return Err(Error::PointNotInSet(set.label().to_string()));
            }
            let parsed = coeffs
                .iter()
                .map(|s| {
                    s.parse::<Rational>()
                        .map_err(|_| Error::ShapeMismatch(format!("bad rational `{s}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            f.values[*i] = CyclotomicNumber::new(json.prime, parsed)?;
        }
        Ok(f)
    }
}

/// Serialized function: nonzero values as (index, coefficient strings) pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionJson {
    pub set: String,
    pub size: usize,
    pub prime: u32,
    pub values: Vec<(usize, Vec<String>)>,
}

pub type ClassFn = dyn Fn(&[u8], &[u8]) -> usize + Send + Sync;
pub type KernelFn = dyn Fn(usize, usize) -> CyclotomicNumber + Send + Sync;

/// Orbits of a group action, as a partition of the index set.
#[derive(Clone, Debug)]
pub struct OrbitPartition {
    orbit_of: Vec<u32>,
    orbits: Vec<Vec<u32>>,
}

impl OrbitPartition {
    pub fn orbit_of(&self, i: usize) -> usize {
        self.orbit_of[i] as usize
    }

    pub fn members(&self, orbit: usize) -> &[u32] {
        &self.orbits[orbit]
    }

    pub fn count(&self) -> usize {
        self.orbits.len()
    }
}

#[derive(Clone)]
pub enum Kernel {
    /// K(x, y) = table[class(x, y)], with class computed from encoded coordinates.
    Pairing {
        class: Arc<ClassFn>,
        table: Arc<Vec<CyclotomicNumber>>,
    },
    Function(Arc<KernelFn>),
    /// Row-major |domain| × |codomain| values.
    Matrix(Arc<Vec<CyclotomicNumber>>),
    /// Kernel of f ↦ f − (orbit average of f).
    Projector(Arc<OrbitPartition>),
    /// Operators applied left to right.
    Chain(Vec<KernelOperator>),
}

/// (op f)(y) = scale · Σ_x f(x) · kernel(x, y).
#[derive(Clone)]
pub struct KernelOperator {
    domain: Arc<IndexedSet>,
    codomain: Arc<IndexedSet>,
    prime: u32,
    kernel: Kernel,
    scale: Rational,
}

impl fmt::Debug for KernelOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "KernelOperator({} -> {}, scale {})",
            self.domain.label(),
            self.codomain.label(),
            self.scale
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompositionMode {
    Materialized,
    Lazy,
}

impl KernelOperator {
    pub fn new(
        domain: &Arc<IndexedSet>,
        codomain: &Arc<IndexedSet>,
        prime: u32,
        kernel: Kernel,
        scale: Rational,
    ) -> Self {
        Self {
            domain: domain.clone(),
            codomain: codomain.clone(),
            prime,
            kernel,
            scale,
        }
    }

    pub fn pairing(
        domain: &Arc<IndexedSet>,
        codomain: &Arc<IndexedSet>,
        prime: u32,
        class: Arc<ClassFn>,
        table: Vec<CyclotomicNumber>,
        scale: Rational,
    ) -> Self {
        Self::new(
            domain,
            codomain,
            prime,
            Kernel::Pairing {
                class,
                table: Arc::new(table),
            },
            scale,
        )
    }

    pub fn from_fn<F>(domain: &Arc<IndexedSet>, codomain: &Arc<IndexedSet>, prime: u32, kernel: F, scale: Rational) -> Self
    where
        F: Fn(usize, usize) -> CyclotomicNumber + Send + Sync + 'static,
    {
        Self::new(domain, codomain, prime, Kernel::Function(Arc::new(kernel)), scale)
    }

    pub fn identity(set: &Arc<IndexedSet>, prime: u32) -> Self {
        Self::from_fn(
            set,
            set,
            prime,
            move |x, y| {
                if x == y {
                    CyclotomicNumber::one(prime)
                } else {
                    CyclotomicNumber::zero(prime)
                }
            },
            Rational::one(),
        )
    }

    pub fn domain(&self) -> &Arc<IndexedSet> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<IndexedSet> {
        &self.codomain
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// The unscaled kernel value K(x, y).
    pub fn kernel_value(&self, x: usize, y: usize) -> CyclotomicNumber {
        match &self.kernel {
            Kernel::Pairing { class, table } => {
                table[class(self.domain.point(x), self.codomain.point(y))].clone()
            }
            Kernel::Function(k) => k(x, y),
            Kernel::Matrix(m) => m[x * self.codomain.len() + y].clone(),
            Kernel::Projector(part) => {
                let p = self.prime;
                let mut v = CyclotomicNumber::zero(p);
                if x == y {
                    v = CyclotomicNumber::one(p);
                }
                let o = part.orbit_of(y);
                if part.orbit_of(x) == o {
                    let n = part.members(o).len() as i64;
                    v = v - CyclotomicNumber::from_rational(p, crate::scalars::rational(1, n));
                }
                v
            }
            Kernel::Chain(ops) => {
                let delta = FunctionOnSet::delta(&self.domain, self.prime, x);
                let out = ops
                    .iter()
                    .try_fold(delta, |f, op| op.apply_with(&f, Execution::Sequential))
                    .expect("chained operators are compatible");
                out.values[y].clone()
            }
        }
    }

    pub fn apply(&self, f: &FunctionOnSet) -> Result<FunctionOnSet> {
        self.apply_with(f, Execution::default())
    }

    pub fn apply_with(&self, f: &FunctionOnSet, exec: Execution) -> Result<FunctionOnSet> {
        check_set(&self.domain, &f.set)?;
        if f.prime != self.prime {
            return Err(Error::PrimeMismatch {
                left: self.prime,
                right: f.prime,
            });
        }
        let values = match &self.kernel {
            Kernel::Pairing { class, table } => match self.apply_pairing_fast(f, class, table, exec) {
                Some(v) => v,
                None => self.apply_generic(f, exec),
            },
            Kernel::Projector(part) => apply_projector(part, f, &self.scale),
            Kernel::Chain(ops) => {
                let mut g = f.clone();
                for op in ops {
                    g = op.apply_with(&g, exec)?;
                }
                let scale = self.scale.clone();
                g.values.into_iter().map(|v| v.scale(&scale)).collect()
            }
            _ => self.apply_generic(f, exec),
        };
        Ok(FunctionOnSet {
            set: self.codomain.clone(),
            prime: self.prime,
            values,
        })
    }

    fn apply_generic(&self, f: &FunctionOnSet, exec: Execution) -> Vec<CyclotomicNumber> {
        let support = f.support();
        map_indices(exec, self.codomain.len(), |y| {
            let acc = support
                .iter()
                .fold(CyclotomicNumber::zero(self.prime), |acc, &x| {
                    acc + &f.values[x] * &self.kernel_value(x, y)
                });
            acc.scale(&self.scale)
        })
    }

    fn apply_pairing_fast(
        &self,
        f: &FunctionOnSet,
        class: &Arc<ClassFn>,
        table: &[CyclotomicNumber],
        exec: Execution,
    ) -> Option<Vec<CyclotomicNumber>> {
        let p = self.prime as usize;
        let lat = Lattice::from_values(self.prime, &f.values)?;
        let (tab, tmax) = lattice::integer_table(self.prime, table)?;
        let support = lat.support();
        if lat.max_abs * support.len() as f64 * tmax * p as f64 > ACC_LIMIT {
            return None;
        }
        let w = lat.width;
        let classes = table.len();
        let rows = map_indices(exec, self.codomain.len(), |y| {
            let yc = self.codomain.point(y);
            let mut buckets = vec![0i128; classes * w];
            let mut used = vec![false; classes];
            for &x in &support {
                let c = class(self.domain.point(x), yc);
                used[c] = true;
                for (b, &v) in buckets[c * w..(c + 1) * w].iter_mut().zip(lat.row(x)) {
                    *b += v;
                }
            }
            let mut acc = vec![0i128; p];
            for c in (0..classes).filter(|&c| used[c]) {
                lattice::conv_add(&mut acc, &tab[c * p..(c + 1) * p], &buckets[c * w..(c + 1) * w]);
            }
            acc
        });
        Some(
            rows.iter()
                .map(|r| lattice::cyclic_to_number(self.prime, r, &lat.denom, &self.scale))
                .collect(),
        )
    }
}

fn apply_projector(part: &OrbitPartition, f: &FunctionOnSet, scale: &Rational) -> Vec<CyclotomicNumber> {
    let p = f.prime;
    let averages: Vec<CyclotomicNumber> = part
        .orbits
        .iter()
        .map(|members| {
            let sum = members
                .iter()
                .fold(CyclotomicNumber::zero(p), |acc, &i| acc + &f.values[i as usize]);
            sum.scale(&Rational::new(BigInt::one(), BigInt::from(members.len())))
        })
        .collect();
    f.values
        .iter()
        .enumerate()
        .map(|(i, v)| (v - &averages[part.orbit_of(i)]).scale(scale))
        .collect()
}

/// The operator "first, then second".
pub fn compose(first: &KernelOperator, second: &KernelOperator, mode: CompositionMode) -> Result<KernelOperator> {
    check_set(&second.domain, &first.codomain)?;
    if first.prime != second.prime {
        return Err(Error::PrimeMismatch {
            left: first.prime,
            right: second.prime,
        });
    }
    match mode {
        CompositionMode::Lazy => Ok(KernelOperator::new(
            &first.domain,
            &second.codomain,
            first.prime,
            Kernel::Chain(vec![first.clone(), second.clone()]),
            Rational::one(),
        )),
        CompositionMode::Materialized => {
            let (n, m, k) = (first.domain.len(), first.codomain.len(), second.codomain.len());
            let scale = &first.scale * &second.scale;
            let left: Vec<CyclotomicNumber> = (0..n * m).map(|i| first.kernel_value(i / m, i % m)).collect();
            let right: Vec<CyclotomicNumber> = (0..m * k).map(|i| second.kernel_value(i / k, i % k)).collect();
            let prime = first.prime;
            let values = map_indices(Execution::default(), n * k, |idx| {
                let (x, z) = (idx / k, idx % k);
                (0..m)
                    .filter(|&y| !left[x * m + y].is_zero())
                    .fold(CyclotomicNumber::zero(prime), |acc, y| {
                        acc + &left[x * m + y] * &right[y * k + z]
                    })
                    .scale(&scale)
            });
            Ok(KernelOperator::new(
                &first.domain,
                &second.codomain,
                prime,
                Kernel::Matrix(Arc::new(values)),
                Rational::one(),
            ))
        }
    }
}

/// Whether a and b agree exactly on every function in span.
pub fn operators_equal_on(span: &[FunctionOnSet], a: &KernelOperator, b: &KernelOperator) -> Result<bool> {
    check_set(&a.domain, &b.domain)?;
    check_set(&a.codomain, &b.codomain)?;
    for f in span {
        if a.apply(f)? != b.apply(f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// P f(x) = f(x) − |orbit(x)|⁻¹ Σ_{y ∈ orbit(x)} f(y).
///
/// The orbit map must describe a partition: x ∈ orbit(x), and every member of
/// orbit(x) has the same orbit.
pub fn group_averaging_projector<F>(set: &Arc<IndexedSet>, prime: u32, orbit: F) -> Result<KernelOperator>
where
    F: Fn(usize) -> Vec<usize>,
{
    let part = orbit_partition(set.len(), orbit)?;
    Ok(KernelOperator::new(
        set,
        set,
        prime,
        Kernel::Projector(Arc::new(part)),
        Rational::one(),
    ))
}

pub fn orbit_partition<F>(n: usize, orbit: F) -> Result<OrbitPartition>
where
    F: Fn(usize) -> Vec<usize>,
{
    let mut orbit_of = vec![u32::MAX; n];
    let mut orbits: Vec<Vec<u32>> = Vec::new();
    for x in 0..n {
        let mut o = orbit(x);
        if o.is_empty() {
            return Err(Error::EmptyOrbit(x));
        }
        o.sort_unstable();
        o.dedup();
        if o.iter().any(|&y| y >= n) || o.binary_search(&x).is_err() {
            return Err(Error::InconsistentOrbit(x));
        }
        if orbit_of[x] != u32::MAX {
            let known = &orbits[orbit_of[x] as usize];
            if known.len() != o.len() || known.iter().zip(&o).any(|(&a, &b)| a as usize != b) {
                return Err(Error::InconsistentOrbit(x));
            }
            continue;
        }
        let id = orbits.len() as u32;
        for &y in &o {
            if orbit_of[y] != u32::MAX {
                return Err(Error::InconsistentOrbit(y));
            }
            orbit_of[y] = id;
        }
        orbits.push(o.into_iter().map(|y| y as u32).collect());
    }
    Ok(OrbitPartition { orbit_of, orbits })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(q: u32) -> Arc<IndexedSet> {
        let f = FieldSpec::prime(q).unwrap();
        Arc::new(IndexedSet::new("line", &f, 1, (0..q as u8).collect()).unwrap())
    }

    #[test]
    fn encode_decode_round_trip() {
        let s = line(5);
        for i in 0..s.len() {
            assert_eq!(s.index_of(s.point(i)), Some(i));
        }
        assert_eq!(s.index_of(&[7]), None);
    }

    #[test]
    fn identity_and_zero() {
        let s = line(3);
        let id = KernelOperator::identity(&s, 3);
        let f = FunctionOnSet::from_fn(&s, 3, |i| CyclotomicNumber::zeta_pow(3, i as i64));
        assert_eq!(id.apply(&f).unwrap(), f);
        let z = FunctionOnSet::zero(&s, 3);
        assert!(id.apply(&z).unwrap().is_zero());
    }

    #[test]
    fn set_mismatch_rejected() {
        let a = line(3);
        let f = FieldSpec::prime(3).unwrap();
        let b = Arc::new(IndexedSet::new("other", &f, 1, vec![0, 1, 2]).unwrap());
        let id = KernelOperator::identity(&a, 3);
        let g = FunctionOnSet::zero(&b, 3);
        assert!(matches!(id.apply(&g), Err(Error::SetMismatch { .. })));
    }

    #[test]
    fn projector_validation() {
        let s = line(5);
        assert_eq!(
            group_averaging_projector(&s, 5, |_| vec![]).unwrap_err(),
            Error::EmptyOrbit(0)
        );
        // orbit(0) = {0, 1} but orbit(1) = {1}
        let bad = group_averaging_projector(&s, 5, |x| if x == 0 { vec![0, 1] } else { vec![x] });
        assert!(matches!(bad, Err(Error::InconsistentOrbit(_))));
    }

    #[test]
    fn json_round_trip() {
        let s = line(3);
        let f = FunctionOnSet::from_fn(&s, 3, |i| {
            CyclotomicNumber::zeta_pow(3, i as i64).scale(&crate::scalars::rational(1, 2))
        });
        let json = serde_json::to_string(&f.to_json()).unwrap();
        let back: FunctionJson = serde_json::from_str(&json).unwrap();
        assert_eq!(FunctionOnSet::from_json(&s, &back).unwrap(), f);
    }
}
