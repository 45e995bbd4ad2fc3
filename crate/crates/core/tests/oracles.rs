//! Independent reimplementations: schoolbook polynomial arithmetic for F_q and
//! floating-point character sums, compared against the exact library values.

use std::f64::consts::PI;

use num_complex::Complex64;
use parafourier::mirabolic::MirabolicSpaces;
use parafourier::quadric::{case_sum_formula, double_kernel_sum, enumerate_quadric, expected_count, fourier_raw};
use parafourier::sampling::{random_function, rng};
use parafourier::sl2::{sl2_fourier, sl2_pairing, Plane};
use parafourier::{CharacterContext, CyclotomicNumber, FieldSpec, FunctionOnSet, Rational, RectMatrix, Stratum};

/// F_p[x]/(modulus) on little-endian coefficient vectors; encodings are base-p digits.
struct PolyField {
    p: u32,
    modulus: Vec<u32>,
}

impl PolyField {
    fn m(&self) -> usize {
        self.modulus.len() - 1
    }

    fn q(&self) -> u32 {
        self.p.pow(self.m() as u32)
    }

    fn decode(&self, mut e: u32) -> Vec<u32> {
        (0..self.m())
            .map(|_| {
                let c = e % self.p;
                e /= self.p;
                c
            })
            .collect()
    }

    fn encode(&self, c: &[u32]) -> u32 {
        c.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.decode(a), self.decode(b));
        let s: Vec<u32> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.encode(&s)
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.decode(a), self.decode(b));
        let m = self.m();
        let mut prod = vec![0u32; 2 * m];
        for i in 0..m {
            for j in 0..m {
                prod[i + j] = (prod[i + j] + x[i] * y[j]) % self.p;
            }
        }
        for k in (m..2 * m).rev() {
            let top = prod[k];
            if top != 0 {
                for (i, &c) in self.modulus.iter().enumerate().take(m) {
                    let idx = k - m + i;
                    prod[idx] = (prod[idx] + self.p * self.p - top * c % self.p) % self.p;
                }
                prod[k] = 0;
            }
        }
        self.encode(&prod[..m])
    }

    fn pow(&self, a: u32, e: u32) -> u32 {
        (0..e).fold(self.encode(&[1]), |acc, _| self.mul(acc, a))
    }

    fn inv(&self, a: u32) -> u32 {
        (1..self.q()).find(|&b| self.mul(a, b) == 1).unwrap()
    }

    /// Tr(a) = a + a^p + … + a^{p^{m−1}}, returned as an integer in [0, p).
    fn trace(&self, a: u32) -> u32 {
        let mut t = 0;
        let mut x = a;
        for _ in 0..self.m() {
            t = self.add(t, x);
            x = self.pow(x, self.p);
        }
        assert!(t < self.p, "trace must land in the prime field");
        t
    }

    fn psi(&self, a: u32) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * self.trace(a) as f64 / self.p as f64)
    }

    fn kloosterman(&self, a: u32) -> Complex64 {
        (1..self.q()).map(|t| self.psi(self.add(self.mul(a, self.inv(t)), t))).sum()
    }
}

fn oracle_for(field: &FieldSpec) -> PolyField {
    let modulus = field.modulus().map(<[u32]>::to_vec).unwrap_or_else(|| vec![0, 1]);
    PolyField { p: field.p(), modulus }
}

fn fields() -> Vec<FieldSpec> {
    let mut v: Vec<FieldSpec> = [2, 3, 4, 5, 7, 8, 9, 11, 13].iter().map(|&q| FieldSpec::with_q(q, None).unwrap()).collect();
    v.push(FieldSpec::extension(2, &[1, 1, 0, 0, 1]).unwrap());
    v.push(FieldSpec::extension(5, &[2, 1, 1]).unwrap());
    v.push(FieldSpec::extension(3, &[1, 2, 0, 1]).unwrap());
    v.push(FieldSpec::extension(7, &[3, 1, 1]).unwrap());
    v
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < 1e-9
}

#[test]
fn field_tables_match_polynomial_arithmetic() {
    for f in fields() {
        let o = oracle_for(&f);
        let q = f.q();
        assert_eq!(o.q(), q);
        for a in 0..q {
            for b in 0..q {
                assert_eq!(f.add(a as u8, b as u8) as u32, o.add(a, b), "q = {q}: {a} + {b}");
                assert_eq!(f.mul(a as u8, b as u8) as u32, o.mul(a, b), "q = {q}: {a} · {b}");
            }
            assert_eq!(f.trace_raw(a as u8) as u32, o.trace(a), "q = {q}: Tr({a})");
        }
    }
}

#[test]
fn characters_match_floating_point_sums() {
    for f in fields() {
        let o = oracle_for(&f);
        let ctx = CharacterContext::new(&f);
        for a in 0..f.q() {
            assert!(close(ctx.psi_table()[a as usize].to_complex(), o.psi(a)));
            assert!(close(ctx.kloosterman_table()[a as usize].to_complex(), o.kloosterman(a)), "q = {}", f.q());
        }
    }
}

#[test]
fn small_kloosterman_tables() {
    let ints = |q: u32| {
        let ctx = CharacterContext::new(&FieldSpec::with_q(q, None).unwrap());
        ctx.kloosterman_table().iter().map(|k| k.as_integer().unwrap().to_string()).collect::<Vec<_>>()
    };
    assert_eq!(ints(2), ["-1", "1"]);
    assert_eq!(ints(3), ["-1", "-1", "2"]);
}

#[test]
fn casesfor_rows() {
    let row = |s: Stratum, d: u32, q: i64| -> i64 {
        let p = |e: u32| q.pow(e);
        match s {
            Stratum::OriginBoth => p(2 * d - 1) + p(d) - p(d - 1),
            Stratum::EqualNonzero => p(2 * d) - p(2 * d - 1) + p(d) - p(d - 1),
            Stratum::ProportionalDistinct => -p(2 * d - 1) + p(d) - p(d - 1),
            Stratum::OneZero | Stratum::NonPropOrthogonal => p(d) - p(d - 1),
            Stratum::NonPropGeneric => -p(d - 1),
        }
    };
    for d in 1..=4 {
        for q in [2, 3, 4, 5, 7] {
            for s in Stratum::ALL {
                assert_eq!(case_sum_formula(s, d, q), Rational::from_integer(row(s, d, q as i64).into()));
            }
        }
    }
    let got: Vec<i64> = Stratum::ALL.iter().map(|&s| row(s, 2, 3)).collect();
    assert_eq!(got, [33, 60, -21, 6, 6, -3]);
}

#[test]
fn double_sum_examples() {
    let ctx = CharacterContext::new(&FieldSpec::prime(3).unwrap());
    let set = enumerate_quadric(2, &ctx, 20_000).unwrap();
    let z = set.zero_index();
    assert_eq!(double_kernel_sum(&set, z, z), CyclotomicNumber::from_integer(3, 33));
    let x = (0..set.len()).find(|&i| i != z).unwrap();
    assert_eq!(double_kernel_sum(&set, x, x), CyclotomicNumber::from_integer(3, 60));
    let two_x: Vec<u8> = set.points().point(x).iter().map(|&c| (2 * c) % 3).collect();
    let y = set.points().index_of(&two_x).unwrap();
    assert_eq!(double_kernel_sum(&set, x, y), CyclotomicNumber::from_integer(3, -21));
}

#[test]
fn point_counts_by_brute_force() {
    for f in fields().into_iter().filter(|f| f.q() <= 7) {
        let o = oracle_for(&f);
        let q = f.q();
        for d in 1..=3usize {
            let mut count = 0u64;
            for code in 0..(q as u64).pow(2 * d as u32) {
                let v: Vec<u32> = (0..2 * d).map(|i| (code / (q as u64).pow(i as u32) % q as u64) as u32).collect();
                let s = (0..d).fold(0, |acc, i| o.add(acc, o.mul(v[i], v[d + i])));
                count += (s == 0) as u64;
            }
            assert_eq!(count, expected_count(d as u32, q), "d = {d}, q = {q}");
        }
    }
}

/// Direct O(|X|²) floating-point evaluation of the quadric transform.
#[test]
fn quadric_transform_matches_direct_sum() {
    for (d, q) in [(2, 3), (2, 4), (2, 5), (3, 3)] {
        let f = FieldSpec::with_q(q, None).unwrap();
        let o = oracle_for(&f);
        let ctx = CharacterContext::new(&f);
        let set = enumerate_quadric(d, &ctx, 20_000).unwrap();
        let kl: Vec<Complex64> = (0..q).map(|a| o.kloosterman(a)).collect();
        let h = random_function(set.points(), f.p(), &mut rng(d as u64 + q as u64));
        let exact = fourier_raw(&set, &h).unwrap();
        let hv: Vec<Complex64> = h.values().iter().map(|v| v.to_complex()).collect();
        for y in 0..set.len() {
            let w = set.points().point(y);
            let mut acc = Complex64::new(0.0, 0.0);
            for x in 0..set.len() {
                let u = set.points().point(x);
                let arg = (0..d).fold(0, |s, i| {
                    let t = o.add(o.mul(u[i] as u32, w[d + i] as u32), o.mul(w[i] as u32, u[d + i] as u32));
                    o.add(s, t)
                });
                acc += kl[arg as usize] * hv[x];
            }
            assert!((exact.value(y).to_complex() - acc).norm() < 1e-6, "(d, q) = ({d}, {q}) at {y}");
        }
    }
}

#[test]
fn sl2_transform_matches_direct_sum() {
    for q in [3, 4, 5] {
        let f = FieldSpec::with_q(q, None).unwrap();
        let o = oracle_for(&f);
        let plane = Plane::new(&CharacterContext::new(&f));
        let h = random_function(plane.points(), f.p(), &mut rng(q as u64));
        let exact = sl2_fourier(&plane, &h).unwrap();
        let neg = |a: u32| o.mul(a, o.encode(&[f.p() - 1]));
        for y in 0..plane.len() {
            let (b, dd) = (plane.points().point(y)[0] as u32, plane.points().point(y)[1] as u32);
            let acc: Complex64 = (0..plane.len())
                .map(|x| {
                    let (a, c) = (plane.points().point(x)[0] as u32, plane.points().point(x)[1] as u32);
                    o.psi(o.add(o.mul(a, dd), neg(o.mul(b, c)))) * h.value(x).to_complex()
                })
                .sum::<Complex64>()
                / q as f64;
            assert!((exact.value(y).to_complex() - acc).norm() < 1e-9);
        }
    }
    let f = FieldSpec::prime(5).unwrap();
    let id = RectMatrix::identity(&f, 2);
    assert_eq!(sl2_pairing(&id, &id).unwrap().enc(), 1);
}

#[test]
fn mirabolic_forward_matches_direct_sum() {
    for n in [2, 3] {
        let f = FieldSpec::prime(3).unwrap();
        let o = oracle_for(&f);
        let spaces = MirabolicSpaces::new(n, &CharacterContext::new(&f), 20_000).unwrap();
        let dom = spaces.domain();
        let cod = spaces.codomain();
        let h = random_function(dom, 3, &mut rng(n as u64));
        let exact = spaces.forward_operator().apply(&h).unwrap();
        let c = 3f64.powi(-((n * (n - 1) / 2) as i32));
        for y in 0..cod.len() {
            let nn = cod.point(y);
            let acc: Complex64 = (0..dom.len())
                .map(|x| {
                    let m = dom.point(x);
                    // tr(NM) with M n×(n−1), N (n−1)×n, both row-major
                    let mut t = 0;
                    for i in 0..n - 1 {
                        for k in 0..n {
                            t = o.add(t, o.mul(nn[i * n + k] as u32, m[k * (n - 1) + i] as u32));
                        }
                    }
                    o.psi(t) * h.value(x).to_complex()
                })
                .sum::<Complex64>()
                * c;
            assert!((exact.value(y).to_complex() - acc).norm() < 1e-9, "n = {n}");
        }
        let zero = dom.index_of(&vec![0; n * (n - 1)]).unwrap();
        let d0 = spaces.forward_operator().apply(&FunctionOnSet::delta(dom, 3, zero)).unwrap();
        assert!(d0.values().iter().all(|v| (v.to_complex() - Complex64::new(c, 0.0)).norm() < 1e-12));
    }
}
