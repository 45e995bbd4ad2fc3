use parafourier::sampling::{random_special_linear, random_upper_unipotent, rng};
use parafourier::sl2::{sl2_fourier, Plane};
use parafourier::sl3::*;
use parafourier::{CharacterContext, FieldSpec, FunctionOnSet, RectMatrix};

fn space(q: u32) -> Sl3Space {
    let f = FieldSpec::with_q(q, None).unwrap();
    Sl3Space::new(&CharacterContext::new(&f), 100_000).unwrap()
}

fn word(s: &str) -> WeylWord {
    s.parse().unwrap()
}

#[test]
fn model_of_identity() {
    let f = FieldSpec::prime(3).unwrap();
    let x = sl3_model(&RectMatrix::identity(&f, 3)).unwrap();
    let enc = |v: &[parafourier::FieldElement]| v.iter().map(|e| e.enc()).collect::<Vec<_>>();
    assert_eq!(enc(x.u()), vec![1, 0, 0]);
    assert_eq!(enc(x.u_dual()), vec![0, 0, 1]);
    let bad = RectMatrix::from_ints(&f, 3, 3, &[2, 0, 0, 0, 1, 0, 0, 0, 1]).unwrap();
    assert!(sl3_model(&bad).is_err());
}

#[test]
fn models_are_unipotent_invariant_and_on_quadric() {
    let f = FieldSpec::prime(3).unwrap();
    let mut r = rng(7);
    for _ in 0..50 {
        let g = random_special_linear(&f, 3, &mut r);
        let x = sl3_model(&g).unwrap();
        assert!(x.pairing().is_zero());
        let gu = g.checked_mul(&random_upper_unipotent(&f, 3, &mut r)).unwrap();
        assert_eq!(sl3_model(&gu).unwrap(), x);
        let gl = g.checked_mul(&random_upper_unipotent(&f, 3, &mut r).transpose()).unwrap();
        assert_eq!(sl3_model_op(&gl).unwrap(), sl3_model_op(&g).unwrap());
        let s = slipper_sl3(&x, &sl3_model_op(&g).unwrap()).unwrap();
        assert!(s.is_identity());
    }
}

#[test]
fn model_matches_inverse_rows() {
    let f = FieldSpec::prime(5).unwrap();
    let mut r = rng(3);
    for _ in 0..20 {
        let g = random_special_linear(&f, 3, &mut r);
        let ginv = g.inverse().unwrap();
        assert_eq!(sl3_model(&g).unwrap().u_dual(), ginv.row(2).as_slice());
        assert_eq!(sl3_model_op(&g).unwrap().u_dual(), ginv.row(0).as_slice());
    }
}

#[test]
fn bk_relations_on_sprime_basis() {
    for q in [4, 5] {
        let s = space(q);
        let basis = sprime_basis(&s);
        let expected = if q == 4 { 210 } else { 1116 };
        assert_eq!(basis.dimension(), expected, "q = {q}");
        let q3 = parafourier::Rational::new(1.into(), (q as i64).pow(3).into());
        for f in basis.functions.iter().step_by(if q == 4 { 1 } else { 7 }) {
            assert!(s.in_sprime(f).unwrap());
            let v = bk_transform_vec(&s, f).unwrap();
            assert!(s.in_sprime(&v).unwrap());
            assert_eq!(&bk_transform_vec(&s, &v).unwrap(), f);
            let c = bk_transform_covec(&s, f).unwrap();
            assert_eq!(&bk_transform_covec(&s, &c).unwrap(), f);
            let long = weyl_action(&s, &word("s1s2s1"), f).unwrap();
            assert_eq!(long, weyl_action(&s, &word("s2s1s2"), f).unwrap());
            assert_eq!(long, composite_triple_sum(&s, f).unwrap());
            let kl = parafourier::quadric::fourier_raw(s.quadric(), f).unwrap().scale_rational(&q3);
            assert_eq!(long, kl);
        }
    }
}

#[test]
fn fiber_transform_matches_plane_transform() {
    let s = space(5);
    let pts = s.quadric().points().clone();
    let e = |v: [u32; 6]| pts.index_of(&v.map(|c| c as u8)).unwrap();
    let f = project_sprime(&s, &FunctionOnSet::delta(&pts, 5, e([1, 0, 0, 0, 0, 1]))).unwrap();
    let out = bk_transform_vec(&s, &f).unwrap();
    let plane = Plane::new(s.ctx());
    let restricted = FunctionOnSet::from_fn(plane.points(), 5, |i| {
        let a = plane.points().point(i);
        f.value(e([a[0] as u32, a[1] as u32, 0, 0, 0, 1])).clone()
    });
    let expected = sl2_fourier(&plane, &restricted).unwrap();
    for i in 0..plane.len() {
        let a = plane.points().point(i);
        assert_eq!(out.value(e([a[0] as u32, a[1] as u32, 0, 0, 0, 1])), expected.value(i));
    }
}

#[test]
fn kloosterman_is_equivariant() {
    let s = space(3);
    let f = FieldSpec::prime(3).unwrap();
    let mut r = rng(11);
    let h = parafourier::sampling::random_function(s.quadric().points(), 3, &mut r);
    for _ in 0..10 {
        let g = random_special_linear(&f, 3, &mut r);
        let lhs = sl3_kloosterman(&s, &sl3_action(&s, &g, &h).unwrap()).unwrap();
        let rhs = sl3_action(&s, &g, &sl3_kloosterman(&s, &h).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        let x = s.quadric().point(17);
        let gx = act_on_point(&g, &x).unwrap();
        assert!(gx.pairing().is_zero());
    }
}

#[test]
fn slipper_matches_kernel_argument() {
    let s = space(3);
    let ctx = s.ctx();
    for i in (0..s.len()).step_by(13) {
        for j in (0..s.len()).step_by(7) {
            let (x, y) = (s.quadric().point(i), s.quadric().point(j));
            let w = slipper_sl3(&x, &y).unwrap();
            let arg = w.a.checked_add(&w.b).unwrap();
            assert_eq!(
                ctx.kloosterman(&arg),
                parafourier::quadric::quadric_kernel(ctx, &x, &y).unwrap()
            );
        }
    }
    let zero = s.quadric().point(s.quadric().zero_index());
    let w = slipper_sl3(&zero, &s.quadric().point(5)).unwrap();
    assert!(w.a.is_zero() && w.b.is_zero());
}

#[test]
fn projectors_commute_and_cut_constraints() {
    let s = space(4);
    let mut r = rng(5);
    let ops = s.sprime_projectors();
    let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for _ in 0..3 {
        let h = parafourier::sampling::random_function(s.quadric().points(), 2, &mut r);
        let outs: Vec<_> = orders
            .iter()
            .map(|o| o.iter().fold(h.clone(), |g, &k| ops[k].apply(&g).unwrap()))
            .collect();
        assert!(outs.iter().all(|g| g == &outs[0]));
        let p = project_sprime(&s, &h).unwrap();
        assert_eq!(p, outs[0]);
        assert!(s.in_sprime(&p).unwrap());
        assert_eq!(project_sprime(&s, &p).unwrap(), p);
        for i in 0..s.len() {
            let x = s.quadric().point(i);
            if x.u().iter().all(|e| e.is_zero()) || x.u_dual().iter().all(|e| e.is_zero()) {
                assert!(p.value(i).is_zero());
            }
        }
    }
}
