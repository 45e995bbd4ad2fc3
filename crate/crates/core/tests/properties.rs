use proptest::prelude::*;

use parafourier::quadric::{enumerate_quadric, fourier_raw, project_special, quadric_kernel, scaled_kernel_sum};
use parafourier::sampling::{random_cyclotomic, random_element, random_function, random_invertible, random_special_linear, random_unit, rng};
use parafourier::sl2::sl2_pairing;
use parafourier::verify::{AggregateReport, Check, FieldInfo, Note, Parameters, Status, SuiteReport};
use parafourier::{CharacterContext, CyclotomicNumber, FieldSpec, FunctionOnSet, QuadricSet};

const QS: [u32; 9] = [2, 3, 4, 5, 7, 8, 9, 11, 25];

fn field(q: u32) -> FieldSpec {
    match q {
        25 => FieldSpec::extension(5, &[2, 1, 1]).unwrap(),
        _ => FieldSpec::with_q(q, None).unwrap(),
    }
}

fn quadric(d: usize, q: u32) -> QuadricSet {
    enumerate_quadric(d, &CharacterContext::new(&field(q)), 20_000).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(qi in 0..QS.len(), seed: u64) {
        let f = field(QS[qi]);
        let mut r = rng(seed);
        let (a, b, c) = (random_element(&f, &mut r), random_element(&f, &mut r), random_element(&f, &mut r));
        let ab = a.checked_mul(&b).unwrap();
        prop_assert_eq!(ab.checked_mul(&c).unwrap(), a.checked_mul(&b.checked_mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.checked_mul(&b.checked_add(&c).unwrap()).unwrap(),
            ab.checked_add(&a.checked_mul(&c).unwrap()).unwrap()
        );
        let u = random_unit(&f, &mut r);
        prop_assert_eq!(u.checked_mul(&u.inv().unwrap()).unwrap(), f.one());
        prop_assert_eq!(a.pow(f.q() as u64), a.clone());
        let p = f.p() as u64;
        prop_assert_eq!(a.checked_add(&b).unwrap().pow(p), a.pow(p).checked_add(&b.pow(p)).unwrap());
        prop_assert_eq!(a.checked_add(&b).unwrap().trace(), a.trace().checked_add(&b.trace()).unwrap());
        prop_assert!(a.trace().enc() < f.p());
    }

    #[test]
    fn cyclotomic_ring(pi in 0..4usize, seed: u64) {
        let p = [2, 3, 5, 7][pi];
        let mut r = rng(seed);
        let (a, b, c) = (random_cyclotomic(p, &mut r), random_cyclotomic(p, &mut r), random_cyclotomic(p, &mut r));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        prop_assert_eq!(a.conj().conj(), a.clone());
        let z = (a.to_complex() * b.to_complex() - (&a * &b).to_complex()).norm();
        prop_assert!(z < 1e-9);
        prop_assert_eq!(CyclotomicNumber::zeta(p).pow(p), CyclotomicNumber::one(p));
    }

    #[test]
    fn kloosterman_frobenius_and_units(qi in 0..QS.len(), seed: u64) {
        let f = field(QS[qi]);
        let ctx = CharacterContext::new(&f);
        let mut r = rng(seed);
        let a = random_element(&f, &mut r);
        prop_assert_eq!(ctx.kloosterman(&a.pow(f.p() as u64)), ctx.kloosterman(&a));
        let x = random_element(&f, &mut r);
        let y = random_element(&f, &mut r);
        prop_assert_eq!(ctx.psi(&x.checked_add(&y).unwrap()), &ctx.psi(&x) * &ctx.psi(&y));
        prop_assert!(ctx.kloosterman(&a).is_algebraic_integer());
    }

    #[test]
    fn quadric_kernel_symmetry_and_scaling(di in 0..2usize, qi in 0..3usize, seed: u64) {
        let q = [3, 4, 5][qi];
        let set = quadric(2 + di, q);
        if set.len() > 4000 {
            return Ok(());
        }
        let f = field(q);
        let mut r = rng(seed);
        let x = set.point(rand::Rng::gen_range(&mut r, 0..set.len()));
        let y = set.point(rand::Rng::gen_range(&mut r, 0..set.len()));
        let ctx = set.ctx();
        prop_assert_eq!(quadric_kernel(ctx, &x, &y).unwrap(), quadric_kernel(ctx, &y, &x).unwrap());
        let l = random_unit(&f, &mut r);
        prop_assert_eq!(
            quadric_kernel(ctx, &x.scaled(&l), &y).unwrap(),
            quadric_kernel(ctx, &x, &y.scaled(&l)).unwrap()
        );
    }

    #[test]
    fn scaled_kernel_sum_values(qi in 0..3usize, seed: u64) {
        let q = [3, 4, 5][qi];
        let set = quadric(2, q);
        let mut r = rng(seed);
        let x = rand::Rng::gen_range(&mut r, 0..set.len());
        let y = rand::Rng::gen_range(&mut r, 0..set.len());
        let arg = set.kernel_arg(x, y);
        let expected = if arg == 0 { 1 - q as i64 } else { 1 };
        prop_assert_eq!(scaled_kernel_sum(&set, x, y), CyclotomicNumber::from_integer(set.prime(), expected));
    }

    #[test]
    fn transform_preserves_special_functions(qi in 0..2usize, seed: u64) {
        let q = [3, 5][qi];
        let set = quadric(2, q);
        let h = random_function(set.points(), set.prime(), &mut rng(seed));
        let s = project_special(&set, &h).unwrap();
        prop_assert!(set.is_special(&s).unwrap());
        let fs = fourier_raw(&set, &s).unwrap();
        prop_assert!(set.is_special(&fs).unwrap());
        prop_assert_eq!(project_special(&set, &fs).unwrap(), fs);
        prop_assert_eq!(project_special(&set, &s).unwrap(), s);
    }

    #[test]
    fn sl2_pairing_invariance(qi in 0..QS.len(), seed: u64) {
        let f = field(QS[qi]);
        let mut r = rng(seed);
        let g = random_special_linear(&f, 2, &mut r);
        let h = random_special_linear(&f, 2, &mut r);
        let k = random_special_linear(&f, 2, &mut r);
        prop_assert_eq!(sl2_pairing(&g, &g).unwrap(), f.one());
        prop_assert_eq!(
            sl2_pairing(&k.checked_mul(&g).unwrap(), &k.checked_mul(&h).unwrap()).unwrap(),
            sl2_pairing(&g, &h).unwrap()
        );
        let m = random_invertible(&f, 2, &mut r);
        prop_assert!(m.det().unwrap().inv().is_ok());
    }

    #[test]
    fn function_json_round_trip(seed: u64) {
        let set = quadric(2, 3);
        let h = random_function(set.points(), 3, &mut rng(seed));
        let json = serde_json::to_string(&h.to_json()).unwrap();
        let back = FunctionOnSet::from_json(set.points(), &serde_json::from_str(&json).unwrap()).unwrap();
        prop_assert_eq!(back, h);
    }

    #[test]
    fn report_json_round_trip(
        names in proptest::collection::vec("[a-z_]{1,12}", 0..5),
        pass in proptest::collection::vec(any::<bool>(), 5),
        seed: u64,
        ms: u64,
    ) {
        let checks: Vec<Check> = names
            .iter()
            .zip(&pass)
            .map(|(n, &ok)| Check {
                name: n.clone(),
                status: if ok { Status::Pass } else { Status::Fail },
                details: format!("{n} details"),
            })
            .collect();
        let status = if checks.iter().all(|c| c.status == Status::Pass) { Status::Pass } else { Status::Fail };
        let report = AggregateReport::new(vec![SuiteReport {
            suite: "quadric".into(),
            field: FieldInfo { p: 3, m: 2, modulus: Some(vec![1, 0, 1]) },
            parameters: Parameters { d: vec![2], n: vec![], samples: Some(4), seed, budget: 100 },
            status,
            checks,
            notes: vec![Note { name: "n".into(), details: "d".into() }],
            wall_time_ms: ms,
        }]);
        let text = report.to_json();
        let back = AggregateReport::from_json(&text).unwrap();
        prop_assert_eq!(&back, &report);
        prop_assert_eq!(back.to_json(), text);
        prop_assert_eq!(back.status, status);
    }
}

#[test]
fn report_rejects_unknown_fields_and_versions() {
    let good = AggregateReport::new(vec![]).to_json();
    assert!(AggregateReport::from_json(&good).is_ok());
    assert!(AggregateReport::from_json(&good.replace("\"reports\"", "\"extra\": 1, \"reports\"")).is_err());
    assert!(AggregateReport::from_json(&good.replace("\"schema_version\": 1", "\"schema_version\": 2")).is_err());
}
