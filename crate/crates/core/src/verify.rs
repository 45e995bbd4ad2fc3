//! Verification suites, machine-readable reports and CSV tables.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::characters::CharacterContext;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::functions::FunctionOnSet;
use crate::matrix::RectMatrix;
use crate::mirabolic::{self, MirabolicSpaces};
use crate::quadric::{self, cross_pairing, enumerate_quadric, QuadricSet, Stratum};
use crate::sampling::{self, random_function, random_invertible, random_special_linear, random_unit, SuiteRng};
use crate::scalars::{CyclotomicNumber, Rational};
use crate::sl2::{self, Plane};
use crate::sl3::{self, Sl3Space, WeylWord};
use crate::sp4::{self, SiegelSet};
use crate::{map_indices, Execution};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub details: String,
}

/// Observations that are recorded but not judged.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Note {
    pub name: String,
    pub details: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldInfo {
    pub p: u32,
    pub m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

impl FieldInfo {
    pub fn of(field: &FieldSpec) -> Self {
        Self {
            p: field.p(),
            m: field.m(),
            modulus: field.modulus().map(<[u32]>::to_vec),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub d: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    pub seed: u64,
    pub budget: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteReport {
    pub suite: String,
    pub field: FieldInfo,
    pub parameters: Parameters,
    pub status: Status,
    pub checks: Vec<Check>,
    #[serde(default)]
    pub notes: Vec<Note>,
    pub wall_time_ms: u64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AggregateReport {
    pub schema_version: u32,
    pub status: Status,
    pub reports: Vec<SuiteReport>,
}

impl AggregateReport {
    pub fn new(reports: Vec<SuiteReport>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            status: Status::from_bool(reports.iter().all(SuiteReport::passed)),
            reports,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(s).map_err(|e| Error::Unsupported(format!("report JSON: {e}")))?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::Unsupported(format!("schema version {}", r.schema_version)));
        }
        Ok(r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Charsums,
    Sl2,
    Mirabolic,
    Quadric,
    Sl3,
    Sp4,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Charsums,
        Suite::Sl2,
        Suite::Mirabolic,
        Suite::Quadric,
        Suite::Sl3,
        Suite::Sp4,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Charsums => "charsums",
            Suite::Sl2 => "sl2",
            Suite::Mirabolic => "mirabolic",
            Suite::Quadric => "quadric",
            Suite::Sl3 => "sl3",
            Suite::Sp4 => "sp4",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub budget: u64,
    pub exec: Execution,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            d: None,
            n: None,
            samples: None,
            seed: 0,
            budget: quadric::DEFAULT_BUDGET,
            exec: Execution::default(),
        }
    }
}

struct Recorder {
    checks: Vec<Check>,
    notes: Vec<Note>,
    parameters: Parameters,
}

impl Recorder {
    fn new(opts: &SuiteOptions) -> Self {
        Self {
            checks: Vec::new(),
            notes: Vec::new(),
            parameters: Parameters {
                samples: opts.samples,
                seed: opts.seed,
                budget: opts.budget,
                ..Parameters::default()
            },
        }
    }

    fn check(&mut self, name: impl Into<String>, ok: bool, details: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: Status::from_bool(ok),
            details: details.into(),
        });
    }

    fn note(&mut self, name: impl Into<String>, details: impl Into<String>) {
        self.notes.push(Note {
            name: name.into(),
            details: details.into(),
        });
    }
}

/// Tallies a property over a family of cases and records one check.
struct Tally {
    total: usize,
    failures: usize,
    first_failure: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Self {
            total: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn push(&mut self, ok: bool, label: impl FnOnce() -> String) {
        self.total += 1;
        if !ok {
            self.failures += 1;
            self.first_failure.get_or_insert_with(label);
        }
    }

    fn record(self, rec: &mut Recorder, name: impl Into<String>, what: &str) {
        let details = match &self.first_failure {
            None if self.total == 0 => format!("no {what} to check (vacuous)"),
            None => format!("{} {what}, all exact", self.total),
            Some(f) => format!("{} of {} {what} failed; first: {f}", self.failures, self.total),
        };
        rec.check(name, self.failures == 0, details);
    }
}

/// Runs one suite; precondition failures such as an exceeded budget are errors.
pub fn run_suite(suite: Suite, field: &FieldSpec, opts: &SuiteOptions) -> Result<SuiteReport> {
    let start = Instant::now();
    let ctx = CharacterContext::new(field);
    let mut rng = sampling::rng(opts.seed);
    let mut rec = Recorder::new(opts);
    match suite {
        Suite::Charsums => charsums_suite(&ctx, &mut rec),
        Suite::Sl2 => sl2_suite(&ctx, opts, &mut rng, &mut rec)?,
        Suite::Mirabolic => mirabolic_suite(&ctx, opts, &mut rng, &mut rec)?,
        Suite::Quadric => quadric_suite(&ctx, opts, &mut rng, &mut rec)?,
        Suite::Sl3 => sl3_suite(&ctx, opts, &mut rng, &mut rec)?,
        Suite::Sp4 => sp4_suite(&ctx, opts, &mut rng, &mut rec)?,
    }
    let status = Status::from_bool(rec.checks.iter().all(|c| c.status == Status::Pass));
    Ok(SuiteReport {
        suite: suite.name().to_string(),
        field: FieldInfo::of(field),
        parameters: rec.parameters,
        status,
        checks: rec.checks,
        notes: rec.notes,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

/// A report for a suite that could not run, with the reason as a failing check.
pub fn precondition_report(suite: Suite, field: &FieldSpec, opts: &SuiteOptions, err: &Error) -> SuiteReport {
    let mut rec = Recorder::new(opts);
    rec.check("precondition", false, err.to_string());
    SuiteReport {
        suite: suite.name().to_string(),
        field: FieldInfo::of(field),
        parameters: rec.parameters,
        status: Status::Fail,
        checks: rec.checks,
        notes: rec.notes,
        wall_time_ms: 0,
    }
}

pub fn is_precondition_error(err: &Error) -> bool {
    matches!(
        err,
        Error::OverBudget { .. } | Error::Unsupported(_) | Error::InvalidField(_) | Error::NotPrime(_)
    )
}

fn pick<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    if k >= n {
        return (0..n).collect();
    }
    let mut v = sample(rng, n, k).into_vec();
    v.sort_unstable();
    v
}

fn charsums_suite(ctx: &CharacterContext, rec: &mut Recorder) {
    let field = ctx.field();
    let q = ctx.q();
    let table = ctx.kloosterman_table();
    rec.check("kl_zero", table[0] == CyclotomicNumber::from_integer(ctx.prime(), -1), format!("Kl(0) = {}", table[0]));
    let sum = table.iter().fold(CyclotomicNumber::zero(ctx.prime()), |a, b| a + b);
    rec.check("kl_sum_zero", sum.is_zero(), format!("Σ_a Kl(a) = {sum}"));

    let mut conj = Tally::new();
    let mut direct = Tally::new();
    let mut worst = 0f64;
    for a in field.elements() {
        let k = &table[a.enc() as usize];
        conj.push(&k.conj() == k, || format!("a = {a}"));
        direct.push(&ctx.kloosterman(&a) == k, || format!("a = {a}"));
        worst = worst.max(k.to_complex().norm());
    }
    conj.record(rec, "kl_conjugation_fixed", "values");
    direct.record(rec, "kl_table_matches_direct_sum", "values");
    let bound = 2.0 * (q as f64).sqrt();
    rec.check(
        "weil_bound",
        worst <= bound + 1e-6,
        format!("max |Kl(a)| = {worst:.6} ≤ 2√q = {bound:.6} (tolerance 1e-6)"),
    );

    let psi = ctx.psi_table();
    let mut hom = Tally::new();
    for x in 0..q as u8 {
        for y in 0..q as u8 {
            let lhs = &psi[field.add(x, y) as usize];
            hom.push(lhs == &(&psi[x as usize] * &psi[y as usize]), || format!("x = {x}, y = {y}"));
        }
    }
    hom.record(rec, "psi_additive", "pairs");
    let total = psi.iter().fold(CyclotomicNumber::zero(ctx.prime()), |a, b| a + b);
    rec.check("psi_sum_zero", total.is_zero(), format!("Σ_x ψ(x) = {total}"));
}

fn sl2_suite(ctx: &CharacterContext, opts: &SuiteOptions, rng: &mut SuiteRng, rec: &mut Recorder) -> Result<()> {
    let field = ctx.field();
    let q = ctx.q();
    let plane = Plane::new(ctx);
    let op = plane.fourier_operator();
    let prime = ctx.prime();
    let pts = plane.points();

    let mut inv = Tally::new();
    for x in 0..plane.len() {
        let d = FunctionOnSet::delta(pts, prime, x);
        let twice = op.apply_with(&op.apply_with(&d, opts.exec)?, opts.exec)?;
        inv.push(twice == d, || format!("δ at {:?}", plane.point(x)));
    }
    inv.record(rec, "involution_all_deltas", "deltas");

    let zero = pts.index_of(&[0, 0]).expect("origin");
    let out = op.apply(&FunctionOnSet::delta(pts, prime, zero))?;
    let third = CyclotomicNumber::from_rational(prime, quadric::q_inverse_power(q, 1));
    rec.check("delta_origin", out.values().iter().all(|v| v == &third), "F(δ_0) = 1/q everywhere");
    let ones = FunctionOnSet::from_fn(pts, prime, |_| CyclotomicNumber::one(prime));
    let expected = FunctionOnSet::delta(pts, prime, zero).scale_rational(&Rational::from_integer(q.into()));
    rec.check("constant_function", op.apply(&ones)? == expected, "F(1) = q·δ_0");

    let samples = opts.samples.unwrap_or(10);
    let f = random_function(pts, prime, rng);
    let ff = op.apply_with(&f, opts.exec)?;
    let mut equiv = Tally::new();
    let mut comp = Tally::new();
    let mut diag = Tally::new();
    let mut factor = Tally::new();
    let mut left = Tally::new();
    for _ in 0..samples {
        let g = random_special_linear(field, 2, rng);
        let h = random_special_linear(field, 2, rng);
        let lhs = op.apply_with(&sl2::sl2_action(&plane, &g, &f)?, opts.exec)?;
        equiv.push(lhs == sl2::sl2_action(&plane, &g, &ff)?, || format!("g = {g}"));
        let gh = g.checked_mul(&h)?;
        comp.push(
            sl2::sl2_action(&plane, &gh, &f)? == sl2::sl2_action(&plane, &g, &sl2::sl2_action(&plane, &h, &f)?)?,
            || format!("g = {g}, h = {h}"),
        );
        diag.push(sl2::sl2_pairing(&g, &g)?.enc() == 1, || format!("g = {g}"));
        let x = plane.index_of(&sl2::model_point(&g)).expect("plane point");
        let y = plane.index_of(&sl2::model_point_op(&h)).expect("plane point");
        factor.push(
            op.kernel_value(x, y) == ctx.psi(&sl2::sl2_pairing(&g, &h)?),
            || format!("g = {g}, h = {h}"),
        );
        let k = random_special_linear(field, 2, rng);
        left.push(
            sl2::sl2_pairing(&k.checked_mul(&g)?, &k.checked_mul(&h)?)? == sl2::sl2_pairing(&g, &h)?,
            || format!("k = {k}"),
        );
    }
    equiv.record(rec, "equivariance", "random g");
    comp.record(rec, "action_composition", "random pairs");
    diag.record(rec, "pairing_diagonal_is_one", "random g");
    factor.record(rec, "kernel_factors_through_pairing", "random pairs");
    left.record(rec, "pairing_left_invariance", "random triples");

    let mut torus = Tally::new();
    for t in field.units() {
        let lhs = op.apply(&sl2::torus_action(&plane, &t, &f)?)?;
        let rhs = sl2::torus_action(&plane, &t.inv()?, &ff)?;
        torus.push(lhs == rhs, || format!("t = {t}"));
    }
    torus.record(rec, "torus_covariance", "units");
    rec.parameters.samples = Some(samples);
    Ok(())
}

fn mirabolic_suite(ctx: &CharacterContext, opts: &SuiteOptions, rng: &mut SuiteRng, rec: &mut Recorder) -> Result<()> {
    let q = ctx.q();
    let field = ctx.field();
    let prime = ctx.prime();
    let ns = match opts.n {
        Some(n) => vec![n],
        None if q <= 3 => vec![2, 3],
        None => vec![2],
    };
    let samples = opts.samples.unwrap_or(20);
    rec.parameters.n = ns.clone();
    rec.parameters.samples = Some(samples);
    for &n in &ns {
        let spaces = MirabolicSpaces::new(n, ctx, opts.budget)?;
        let fwd = spaces.forward_operator();
        let bwd = spaces.backward_operator();
        let dom = spaces.domain();
        let cod = spaces.codomain();
        let exhaustive = n == 2;
        let chosen = if exhaustive {
            (0..dom.len()).collect()
        } else {
            pick(rng, dom.len(), samples)
        };
        let mut inv = Tally::new();
        let mut inv_op = Tally::new();
        for &x in &chosen {
            let d = FunctionOnSet::delta(dom, prime, x);
            inv.push(bwd.apply_with(&fwd.apply_with(&d, opts.exec)?, opts.exec)? == d, || {
                format!("M = {}", spaces.domain_matrix(x))
            });
            let e = FunctionOnSet::delta(cod, prime, x);
            inv_op.push(fwd.apply_with(&bwd.apply_with(&e, opts.exec)?, opts.exec)? == e, || {
                format!("N = {}", spaces.codomain_matrix(x))
            });
        }
        let how = if exhaustive { "deltas (exhaustive)" } else { "sampled deltas" };
        inv.record(rec, format!("inverse_after_forward_n{n}"), how);
        inv_op.record(rec, format!("forward_after_inverse_n{n}"), how);

        let zero = dom.index_of(&vec![0; n * (n - 1)]).expect("origin");
        let c = CyclotomicNumber::from_rational(prime, spaces.normalization());
        let out = fwd.apply(&FunctionOnSet::delta(dom, prime, zero))?;
        rec.check(
            format!("delta_origin_n{n}"),
            out.values().iter().all(|v| v == &c),
            format!("F(δ_0) = {c} everywhere"),
        );

        let f = random_function(dom, prime, rng);
        let ff = fwd.apply_with(&f, opts.exec)?;
        let mut equiv = Tally::new();
        let mut diag = Tally::new();
        for _ in 0..10 {
            let g = random_special_linear(field, n, rng);
            let m = random_invertible(field, n - 1, rng);
            let lhs = fwd.apply_with(&mirabolic::mirabolic_action(&spaces, &g, &m, &f)?, opts.exec)?;
            equiv.push(lhs == mirabolic::mirabolic_action_op(&spaces, &g, &m, &ff)?, || {
                format!("g = {g}, m = {m}")
            });
            let s = mirabolic::slipper_mirabolic(&mirabolic::model(&g), &mirabolic::model_op(&g)?)?;
            diag.push(s.is_identity(), || format!("g = {g}"));
        }
        equiv.record(rec, format!("equivariance_n{n}"), "random (g, m)");
        diag.record(rec, format!("slipper_diagonal_identity_n{n}"), "random g");

        if n == 2 {
            let plane = Plane::new(ctx);
            let h = random_function(plane.points(), prime, rng);
            let on_plane = sl2::sl2_fourier(&plane, &h)?;
            let moved = h.transport(dom, |i| dom.index_of(plane.points().point(i)).expect("same coordinates"))?;
            let out = fwd.apply(&moved)?;
            let mut agree = Tally::new();
            for i in 0..plane.len() {
                let (b, d) = (plane.points().point(i)[0], plane.points().point(i)[1]);
                let j = cod.index_of(&[d, field.neg(b)]).expect("codomain point");
                agree.push(out.value(j) == on_plane.value(i), || format!("(b, d) = ({b}, {d})"));
            }
            agree.record(rec, "agrees_with_sl2", "points under N = (d, −b)");
        }
    }
    Ok(())
}

fn quadric_dims(q: u32, opts: &SuiteOptions) -> Vec<usize> {
    match opts.d {
        Some(d) => vec![d],
        None if quadric::expected_count(3, q) <= opts.budget => vec![2, 3],
        None => vec![2],
    }
}

/// Checks F² = q^{2d}·id on special generators P δ_x.
pub fn klinv_check(set: &QuadricSet, points: &[usize], exec: Execution) -> Result<(usize, Option<usize>)> {
    let q2d = Rational::from_integer(BigInt::from(set.ctx().q()).pow(2 * set.d() as u32));
    let mut checked = 0;
    for &x in points {
        let g = set.special_generator(x);
        let twice = quadric::fourier_raw_with(set, &quadric::fourier_raw_with(set, &g, exec)?, exec)?;
        checked += 1;
        if twice != g.scale_rational(&q2d) {
            return Ok((checked, Some(x)));
        }
    }
    Ok((checked, None))
}

fn quadric_suite(ctx: &CharacterContext, opts: &SuiteOptions, rng: &mut SuiteRng, rec: &mut Recorder) -> Result<()> {
    let q = ctx.q();
    let prime = ctx.prime();
    let dims = quadric_dims(q, opts);
    rec.parameters.d = dims.clone();
    for &d in &dims {
        let set = enumerate_quadric(d, ctx, opts.budget)?;
        let expected = quadric::expected_count(d as u32, q);
        rec.check(
            format!("point_count_d{d}"),
            set.len() as u64 == expected,
            format!("|X| = {} (q^(2d−1) + q^d − q^(d−1) = {expected})", set.len()),
        );

        let zero = set.zero_index();
        let nonzero: Vec<usize> = (0..set.len()).filter(|&i| i != zero).collect();
        let exhaustive = set.len() <= 300;
        let gens: Vec<usize> = if exhaustive {
            nonzero.clone()
        } else {
            let k = opts.samples.unwrap_or(25);
            pick(rng, nonzero.len(), k).into_iter().map(|i| nonzero[i]).collect()
        };
        let (n, bad) = klinv_check(&set, &gens, opts.exec)?;
        rec.check(
            format!("kl_inversion_d{d}"),
            bad.is_none(),
            match bad {
                None => format!(
                    "F² = q^{} on {n} special generators ({})",
                    2 * d,
                    if exhaustive { "exhaustive" } else { "seeded sample" }
                ),
                Some(x) => format!("fails at generator for {:?}", set.point(x)),
            },
        );

        let limit = if set.len() <= 200 { usize::MAX } else { opts.samples.unwrap_or(200) };
        for s in Stratum::ALL {
            let pairs = quadric::stratum_pairs(&set, s, limit, rng);
            let formula = quadric::case_sum_formula(s, d as u32, q);
            let target = CyclotomicNumber::from_rational(prime, formula.clone());
            let sums = map_indices(opts.exec, pairs.len(), |i| quadric::double_kernel_sum(&set, pairs[i].0, pairs[i].1));
            let bad = pairs.iter().zip(&sums).find(|(_, v)| *v != &target);
            let ok = bad.is_none() && !pairs.is_empty();
            let details = match bad {
                None if pairs.is_empty() => "stratum is empty".to_string(),
                None => format!("{} pairs, every double sum = {formula}", pairs.len()),
                Some(((x, z), v)) => format!("pair ({x}, {z}) gives {v}, formula {formula}"),
            };
            rec.check(format!("casesfor_d{d}_{}", s.name()), ok, details);
        }

        let mut sym = Tally::new();
        let units = ctx.field().units();
        for _ in 0..opts.samples.unwrap_or(200) {
            let x = rng.gen_range(0..set.len());
            let y = rng.gen_range(0..set.len());
            sym.push(set.kernel_arg(x, y) == set.kernel_arg(y, x), || format!("({x}, {y})"));
            let l = units[rng.gen_range(0..units.len())].raw();
            let scale = |i: usize| {
                let c: Vec<u8> = set.points().point(i).iter().map(|&e| ctx.field().mul(l, e)).collect();
                set.points().index_of(&c).expect("closed under scaling")
            };
            sym.push(set.kernel_arg(scale(x), y) == set.kernel_arg(x, scale(y)), || format!("λ on ({x}, {y})"));
        }
        sym.record(rec, format!("kernel_symmetries_d{d}"), "sampled identities");

        let ones = FunctionOnSet::from_fn(set.points(), prime, |_| CyclotomicNumber::one(prime));
        let f1 = quadric::fourier_raw_with(&set, &ones, opts.exec)?;
        rec.check(
            format!("constant_at_origin_d{d}"),
            f1.value(zero) == &CyclotomicNumber::from_integer(prime, -(set.len() as i64)),
            format!("F(1)(0) = {}", f1.value(zero)),
        );
        let x = nonzero[rng.gen_range(0..nonzero.len())];
        let fx = quadric::fourier_raw_with(&set, &FunctionOnSet::delta(set.points(), prime, x), opts.exec)?;
        let ok = (0..set.len()).all(|y| fx.value(y) == &ctx.kloosterman_table()[set.kernel_arg(x, y) as usize]);
        rec.check(format!("delta_expansion_d{d}"), ok, format!("F(δ_x) = K(x, ·) at x = {:?}", set.point(x)));
    }
    Ok(())
}

fn sl3_suite(ctx: &CharacterContext, opts: &SuiteOptions, rng: &mut SuiteRng, rec: &mut Recorder) -> Result<()> {
    let q = ctx.q();
    let prime = ctx.prime();
    let field = ctx.field();
    let space = Sl3Space::new(ctx, opts.budget)?;
    let exec = opts.exec;
    rec.parameters.d = vec![3];
    let expected = quadric::expected_count(3, q);
    rec.check(
        "point_count",
        space.len() as u64 == expected,
        format!("|X| = {} (q^5 + q^3 − q^2 = {expected})", space.len()),
    );

    let basis = sl3::sprime_basis(&space);
    let dim = basis.dimension();
    rec.note(
        "sprime_dimension",
        format!(
            "dim S′ = {dim}; {} nonzero projected deltas{}",
            basis.spanning_count,
            if dim == 0 { "; S′ = 0, so the relations below hold vacuously" } else { "" }
        ),
    );
    let exhaustive = space.len() <= 4000;
    let chosen = if exhaustive {
        (0..dim).collect()
    } else {
        pick(rng, dim, opts.samples.unwrap_or(25))
    };
    let how = if exhaustive { "basis functions of S′" } else { "sampled basis functions of S′" };
    let q3 = quadric::q_inverse_power(q, 3);
    let mut t_s1 = Tally::new();
    let mut t_s2 = Tally::new();
    let mut t_pres = Tally::new();
    let mut t_braid = Tally::new();
    let mut t_compat = Tally::new();
    let mut t_triple = Tally::new();
    for &i in &chosen {
        let f = &basis.functions[i];
        let label = || format!("P′δ_x at {:?}", space.quadric().point(basis.points[i]));
        let s1f = sl3::bk_transform_vec_with(&space, f, exec)?;
        let s2f = sl3::bk_transform_covec_with(&space, f, exec)?;
        let inside = space.in_sprime(&s1f)? && space.in_sprime(&s2f)?;
        t_s1.push(inside && &sl3::bk_transform_vec_with(&space, &s1f, exec)? == f, label);
        t_s2.push(inside && &sl3::bk_transform_covec_with(&space, &s2f, exec)? == f, label);
        let s2s1 = sl3::bk_transform_covec_with(&space, &s1f, exec)?;
        let s1s2 = sl3::bk_transform_vec_with(&space, &s2f, exec)?;
        let long1 = sl3::bk_transform_vec_with(&space, &s2s1, exec)?;
        let long2 = sl3::bk_transform_covec_with(&space, &s1s2, exec)?;
        let preserved = [&s1f, &s2f, &s2s1, &s1s2, &long1, &long2]
            .into_iter()
            .map(|g| space.in_sprime(g))
            .collect::<Result<Vec<_>>>()?;
        t_pres.push(preserved.iter().all(|&b| b), label);
        t_braid.push(long1 == long2, label);
        let kl = quadric::fourier_raw_with(space.quadric(), f, exec)?.scale_rational(&q3);
        t_compat.push(long1 == kl, label);
        t_triple.push(sl3::composite_triple_sum_with(&space, f, exec)? == long1, label);
    }
    t_s1.record(rec, "s1_squared_is_identity", how);
    t_s2.record(rec, "s2_squared_is_identity", how);
    t_pres.record(rec, "sprime_preserved", how);
    t_braid.record(rec, "braid_relation", how);
    t_compat.record(rec, "longest_element_is_kloosterman", how);
    t_triple.record(rec, "triple_sum_equals_chain", how);

    let word: WeylWord = "".parse()?;
    let id_ok = basis
        .functions
        .first()
        .map(|f| sl3::weyl_action(&space, &word, f).map(|g| &g == f))
        .transpose()?
        .unwrap_or(true);
    rec.check("empty_word_is_identity", id_ok, "weyl_action(e, f) = f");

    if dim > 0 {
        let pts = space.quadric().points();
        let e3 = |a: u8, c: u8| pts.index_of(&[a, c, 0, 0, 0, 1]).expect("fiber point");
        let f = sl3::project_sprime(&space, &FunctionOnSet::delta(pts, prime, e3(1, 0)))?;
        let out = sl3::bk_transform_vec_with(&space, &f, exec)?;
        let plane = Plane::new(ctx);
        let restricted = FunctionOnSet::from_fn(plane.points(), prime, |i| {
            let p = plane.points().point(i);
            f.value(e3(p[0], p[1])).clone()
        });
        let expected = sl2::sl2_fourier(&plane, &restricted)?;
        let ok = (0..plane.len()).all(|i| {
            let p = plane.points().point(i);
            out.value(e3(p[0], p[1])) == expected.value(i)
        });
        rec.check("fiber_matches_sl2", ok, "vector-slot transform on the fiber over (0,0,1) equals the plane transform");
    }

    let zero = space.quadric().zero_index();
    let nonzero: Vec<usize> = (0..space.len()).filter(|&i| i != zero).collect();
    let gens: Vec<usize> = if space.len() <= 300 {
        nonzero
    } else {
        pick(rng, nonzero.len(), opts.samples.unwrap_or(25)).into_iter().map(|i| nonzero[i]).collect()
    };
    let mut inv = Tally::new();
    for &x in &gens {
        let g = space.quadric().special_generator(x);
        let twice = sl3::sl3_kloosterman_with(&space, &sl3::sl3_kloosterman_with(&space, &g, exec)?, exec)?;
        inv.push(twice == g, || format!("x = {:?}", space.quadric().point(x)));
    }
    inv.record(rec, "kloosterman_involution_on_special", "special generators");

    let f = random_function(space.quadric().points(), prime, rng);
    let kf = sl3::sl3_kloosterman_with(&space, &f, exec)?;
    let mut equiv = Tally::new();
    let mut models = Tally::new();
    let mut diag = Tally::new();
    for _ in 0..10 {
        let g = random_special_linear(field, 3, rng);
        let lhs = sl3::sl3_kloosterman_with(&space, &sl3::sl3_action(&space, &g, &f)?, exec)?;
        equiv.push(lhs == sl3::sl3_action(&space, &g, &kf)?, || format!("g = {g}"));
        let x = sl3::sl3_model(&g)?;
        let y = sl3::sl3_model_op(&g)?;
        let u = sampling::random_upper_unipotent(field, 3, rng);
        let ok = x.pairing().is_zero()
            && sl3::sl3_model(&g.checked_mul(&u)?)? == x
            && sl3::sl3_model_op(&g.checked_mul(&u.transpose())?)? == y;
        models.push(ok, || format!("g = {g}"));
        diag.push(sl3::slipper_sl3(&x, &y)?.is_identity(), || format!("g = {g}"));
    }
    equiv.record(rec, "kloosterman_equivariance", "random g");
    models.record(rec, "models_on_quadric_and_unipotent_invariant", "random g");
    diag.record(rec, "slipper_diagonal_is_identity", "random g");

    let mut compat = Tally::new();
    for _ in 0..opts.samples.unwrap_or(200) {
        let (i, j) = (rng.gen_range(0..space.len()), rng.gen_range(0..space.len()));
        let (x, y) = (space.quadric().point(i), space.quadric().point(j));
        let s = sl3::slipper_sl3(&x, &y)?;
        let k = quadric::quadric_kernel(ctx, &x, &y)?;
        compat.push(ctx.kloosterman(&s.a.checked_add(&s.b)?) == k, || format!("({i}, {j})"));
    }
    compat.record(rec, "slipper_matches_kernel", "sampled pairs");
    rec.parameters.samples = Some(chosen.len());
    Ok(())
}

fn sp4_suite(ctx: &CharacterContext, opts: &SuiteOptions, rng: &mut SuiteRng, rec: &mut Recorder) -> Result<()> {
    let q = ctx.q();
    let prime = ctx.prime();
    let field = ctx.field();
    let set = SiegelSet::new(ctx, opts.budget)?;
    let quad = enumerate_quadric(4, ctx, opts.budget)?;
    rec.parameters.d = vec![4];
    let expected = quadric::expected_count(4, q);
    rec.check(
        "point_count",
        set.len() as u64 == expected && quad.len() == set.len(),
        format!("|X| = {} (q^7 + q^4 − q^3 = {expected})", set.len()),
    );

    let image: Vec<Option<usize>> = (0..set.len())
        .map(|i| quad.points().index_of(&set.quadric_coords(i)))
        .collect();
    let mut hit = vec![false; quad.len()];
    image.iter().flatten().for_each(|&j| hit[j] = true);
    let bijective = image.iter().all(Option::is_some) && hit.iter().all(|&h| h);
    rec.check("coordinate_map_bijective", bijective, "(v₁, v₂) ↦ (v₁, ω(e_·, v₂)) onto the d = 4 quadric");
    if !bijective {
        return Ok(());
    }
    let image: Vec<usize> = image.into_iter().map(Option::unwrap).collect();
    let n = set.len();
    let mismatches: usize = map_indices(opts.exec, n, |i| {
        let qi = quad.points().point(image[i]);
        (0..n)
            .filter(|&j| set.kernel_arg(i, j) != cross_pairing(field, qi, quad.points().point(image[j])))
            .count()
    })
    .into_iter()
    .sum();
    rec.check(
        "kernel_equals_quadric_exhaustive",
        mismatches == 0,
        format!("{} pairs compared, {mismatches} mismatches", n * n),
    );

    let zero = set.index_of(&set.point(0)).expect("origin");
    let nonzero: Vec<usize> = (0..n).filter(|&i| i != zero).collect();
    let samples = opts.samples.unwrap_or(10);
    let gens: Vec<usize> = pick(rng, nonzero.len(), samples).into_iter().map(|i| nonzero[i]).collect();
    let q4 = quadric::q_inverse_power(q, 4);
    let mut inv = Tally::new();
    let mut transported = Tally::new();
    for &x in &gens {
        let g = set.special_generator(x);
        let once = sp4::sp4_fourier_with(&set, &g, opts.exec)?;
        inv.push(sp4::sp4_fourier_with(&set, &once, opts.exec)? == g, || format!("x = {:?}", set.point(x)));
        let moved = g.transport(quad.points(), |i| image[i])?;
        let via = quadric::fourier_raw_with(&quad, &moved, opts.exec)?.scale_rational(&q4);
        transported.push((0..n).all(|i| once.value(i) == via.value(image[i])), || format!("x = {:?}", set.point(x)));
    }
    inv.record(rec, "involution_on_special", "sampled special generators");
    transported.record(rec, "transform_equals_quadric_transform", "sampled special generators");

    let mut levi = Tally::new();
    for _ in 0..20 {
        let (a, b) = (random_invertible(field, 2, rng), random_invertible(field, 2, rng));
        let ea = sp4::embed_levi(&a)?;
        let ok = sp4::is_symplectic(&ea) && sp4::embed_levi(&a.checked_mul(&b)?)? == ea.checked_mul(&sp4::embed_levi(&b)?)?;
        levi.push(ok, || format!("m = {a}"));
    }
    levi.record(rec, "levi_embedding_symplectic_homomorphism", "random m");

    let f = random_function(set.points(), prime, rng);
    let ff = sp4::sp4_fourier_with(&set, &f, opts.exec)?;
    let mut equiv = Tally::new();
    for _ in 0..5 {
        let g = sp4::random_symplectic(field, rng);
        let m = random_invertible(field, 2, rng);
        let lhs = sp4::sp4_fourier_with(&set, &sp4::sp4_action(&set, &g, &m, &f)?, opts.exec)?;
        equiv.push(lhs == sp4::sp4_action_op(&set, &g, &m, &ff)?, || format!("g = {g}, m = {m}"));
    }
    equiv.record(rec, "equivariance", "random (g, m)");

    let mut models = Tally::new();
    let mut block = Tally::new();
    for _ in 0..20 {
        let g = sp4::random_symplectic(field, rng);
        let h = sp4::random_symplectic(field, rng);
        let x = sp4::siegel_model(&g)?;
        let (a, b, c) = (
            sampling::random_element(field, rng),
            sampling::random_element(field, rng),
            sampling::random_element(field, rng),
        );
        let u = sp4::siegel_unipotent_upper(&a, &b, &c);
        models.push(
            sp4::omega(x.v1(), x.v2())?.is_zero() && sp4::siegel_model(&g.checked_mul(&u)?)? == x,
            || format!("g = {g}"),
        );
        let s = sp4::slipper_sp4(&x, &sp4::siegel_model_op(&h)?)?;
        block.push(s == sp4::levi_block(&g, &h)?.neg(), || format!("g = {g}, h = {h}"));
    }
    models.record(rec, "siegel_model_on_cone_and_unipotent_invariant", "random g");
    block.record(rec, "slipper_is_negated_levi_block", "random (g, h)");

    let mut scal = Tally::new();
    for _ in 0..20 {
        let x = set.point(rng.gen_range(0..n));
        let l = random_unit(field, rng);
        scal.push(sp4::to_quadric_coords(&x.scaled(&l)) == sp4::to_quadric_coords(&x).scaled(&l), || {
            format!("x = {x:?}")
        });
    }
    scal.record(rec, "coordinate_map_scaling_equivariant", "random points");

    let mut trace = Tally::new();
    let mut sign_differs = 0usize;
    let pairs = opts.samples.unwrap_or(200).max(200);
    for _ in 0..pairs {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let s = sp4::slipper_sp4(&set.point(i), &set.point(j))?;
        let arg = field.wrap(set.kernel_arg(i, j));
        let tr = s.trace()?;
        trace.push(tr == arg.neg(), || format!("({i}, {j})"));
        if ctx.kloosterman(&tr) != ctx.kloosterman(&arg) {
            sign_differs += 1;
        }
    }
    trace.record(rec, "slipper_trace_is_negated_kernel_argument", "sampled pairs");
    let id = RectMatrix::identity(field, 4);
    let diag = sp4::slipper_sp4(&sp4::siegel_model(&id)?, &sp4::siegel_model_op(&id)?)?;
    rec.note(
        "slipper_sign",
        format!(
            "slipper on the diagonal (g = h = 1) is {}; Kl(tr 𝔖) differs from the kernel Kl(ω(v₁,w₂)+ω(w₁,v₂)) on {sign_differs} of {pairs} sampled pairs; the transform uses the explicit kernel",
            if diag == RectMatrix::identity(field, 2).neg() { "−Id" } else { "not −Id" }
        ),
    );
    rec.parameters.samples = Some(samples);
    Ok(())
}

/// CSV of Kl(a) for every a ∈ F_q: power-basis coefficients, then the complex embedding.
pub fn kloosterman_csv(ctx: &CharacterContext) -> String {
    let p = ctx.prime() as usize;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["a".to_string()];
    header.extend((0..p - 1).map(|k| format!("c{k}")));
    header.extend(["re".to_string(), "im".to_string()]);
    w.write_record(&header).expect("in-memory write");
    for a in ctx.field().elements() {
        let k = &ctx.kloosterman_table()[a.enc() as usize];
        let z = k.to_complex();
        let mut row = vec![a.enc().to_string()];
        row.extend(k.coeffs().iter().map(ToString::to_string));
        row.extend([format!("{:.12}", z.re + 0.0), format!("{:.12}", z.im + 0.0)]);
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// CSV comparing brute-force double kernel sums with the closed forms, one row per stratum.
pub fn casesfor_csv(set: &QuadricSet, samples: usize, rng: &mut SuiteRng, exec: Execution) -> String {
    let q = set.ctx().q();
    let prime = set.prime();
    let limit = if set.len() <= 200 { usize::MAX } else { samples };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["stratum", "formula", "brute_force", "match", "pairs_checked"])
        .expect("in-memory write");
    for s in Stratum::ALL {
        let pairs = quadric::stratum_pairs(set, s, limit, rng);
        let formula = quadric::case_sum_formula(s, set.d() as u32, q);
        let sums = map_indices(exec, pairs.len(), |i| quadric::double_kernel_sum(set, pairs[i].0, pairs[i].1));
        let target = CyclotomicNumber::from_rational(prime, formula.clone());
        let agree = !sums.is_empty() && sums.iter().all(|v| v == &target);
        let brute = match sums.first() {
            Some(v) if sums.iter().all(|u| u == v) => v.to_string(),
            Some(_) => "mixed".to_string(),
            None => String::new(),
        };
        w.write_record([
            s.name().to_string(),
            formula.to_string(),
            brute,
            agree.to_string(),
            pairs.len().to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}
