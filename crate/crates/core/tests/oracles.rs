//! Independent oracles for computed values: hand-coded closed forms,
//! brute-force minors and direct evaluation.

use horn_core::adisc::{self, PointConfig};
use horn_core::fixtures;
use horn_core::gale;
use horn_core::horn::{self, recognize, semantic_eq, FactoredComponent, FactoredMap, LinearFactor};
use horn_core::linalg::{self, rat, rat_vec, Int, IntMatrix, Rat};
use horn_core::mldeg::{self, MlDegreeOptions, Var};
use horn_core::mle::{self, CountVector};
use horn_core::poly::{parse_poly, MultiPoly};
use horn_core::random::{self, TEST_SEED};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

fn vars(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// gcd of all `k x k` minors by brute force.
fn minor_gcd(m: &IntMatrix, k: usize) -> Int {
    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut out = subsets(n - 1, k);
        for mut s in subsets(n - 1, k - 1) {
            s.push(n - 1);
            out.push(s);
        }
        out
    }
    let mut g = Int::zero();
    for r in subsets(m.rows(), k) {
        for c in subsets(m.cols(), k) {
            let d = linalg::det_bareiss(&m.select_rows(&r).select_cols(&c)).unwrap();
            g = g.gcd(&d);
        }
    }
    g
}

#[test]
fn invariant_factors_match_minor_gcds() {
    let mut rng = random::rng(TEST_SEED);
    for _ in 0..40 {
        let r = rng.random_range(1..=3);
        let c = rng.random_range(1..=4);
        let m = random::int_matrix(&mut rng, r, c, -9, 9);
        let f = linalg::invariant_factors(&m);
        let mut prod = Int::one();
        for k in 1..=r.min(c) {
            prod *= f.get(k - 1).cloned().unwrap_or_else(Int::zero);
            assert_eq!(prod, minor_gcd(&m, k), "{m:?}");
        }
    }
}

#[test]
fn independence_configuration_is_unimodular() {
    let a = fixtures::independence_a();
    assert_eq!(minor_gcd(&a, 1), Int::one());
    assert_eq!(minor_gcd(&a, 2), Int::one());
    assert!(linalg::all_invariant_factors_one(&a));
    let k = linalg::right_kernel_basis(&a);
    assert_eq!((k.rows(), k.cols()), (5, 3));
    assert!(a.mul(&k).unwrap().is_zero());
    assert_eq!(linalg::invariant_factors(&k), vec![Int::one(); 3]);
}

#[test]
fn independence_saturation_factors_b() {
    let b = fixtures::independence_b();
    assert_eq!(linalg::rank(&b), 3);
    let (bsat, c) = linalg::saturate_column_span(&b);
    assert_eq!((bsat.rows(), bsat.cols(), c.rows(), c.cols()), (5, 3, 3, 4));
    assert_eq!(bsat.mul(&c).unwrap(), b);
    let l = linalg::left_kernel_basis(&b);
    assert_eq!(linalg::rank(&l), 2);
    assert!(l.mul(&b).unwrap().is_zero());
}

/// `u0+ u+0 / u++^2` and friends, coded directly.
fn independence_oracle(u: &[u64]) -> Vec<Rat> {
    let r = |x: u64| Rat::from_integer(Int::from(x));
    let (r0, r1) = (r(u[0] + u[1]), r(u[2] + u[3]));
    let (c0, c1) = (r(u[0] + u[2]), r(u[1] + u[3]));
    let n2 = r(u.iter().sum::<u64>()).pow(2);
    vec![
        &r0 * &c0 / &n2,
        &r0 * &c1 / &n2,
        &r1 * &c0 / &n2,
        &r1 * &c1 / &n2,
    ]
}

#[test]
fn independence_estimator_matches_marginal_formula() {
    let model = mle::independence_model();
    let mut rng = random::rng(TEST_SEED);
    for _ in 0..50 {
        let u: Vec<u64> = (0..4).map(|_| rng.random_range(1..=60)).collect();
        let est = mle::estimate(&model, &CountVector::new(u.clone()).unwrap()).unwrap();
        assert_eq!(est.p_hat, independence_oracle(&u));
        assert!(est.simplex && est.on_model && est.critical);
        let scaled: Vec<u64> = u.iter().map(|x| 3 * x).collect();
        let again = mle::estimate(&model, &CountVector::new(scaled).unwrap()).unwrap();
        assert_eq!(again.p_hat, est.p_hat);
    }
}

#[test]
fn independence_estimate_at_small_table() {
    let est = mle::estimate(
        &mle::independence_model(),
        &CountVector::new(vec![4, 2, 3, 1]).unwrap(),
    )
    .unwrap();
    assert_eq!(
        est.p_hat,
        vec![rat(21, 50), rat(9, 50), rat(7, 25), rat(3, 25)]
    );
    let det = &est.p_hat[0] * &est.p_hat[3] - &est.p_hat[1] * &est.p_hat[2];
    assert!(det.is_zero());
}

#[test]
fn independence_linear_forms_at_small_table() {
    let r = fixtures::independence_b()
        .mul_rat_vec(&rat_vec(&[4, 2, 3, 1]))
        .unwrap();
    assert_eq!(r, rat_vec(&[6, 4, -20, 7, 3]));
}

#[test]
fn constant_map_presentations_agree() {
    let mut rng = random::rng(TEST_SEED);
    for m in 1..=4 {
        let p = random::nonzero_rat_vector(&mut rng, m, 9);
        let two = fixtures::constant_map_two_rows(&p);
        let three = fixtures::constant_map_three_rows(&p);
        for _ in 0..5 {
            let u = horn::random_point_off_base_locus(&mut rng, &[&two, &three], -9, 9).unwrap();
            assert_eq!(two.eval(&u).unwrap(), p);
            assert_eq!(three.eval(&u).unwrap(), p);
        }
        let a = recognize(&two.to_factored()).unwrap().unwrap();
        let b = recognize(&three.to_factored()).unwrap().unwrap();
        assert!(semantic_eq(&a, &b, TEST_SEED));
    }
}

#[test]
fn asymmetric_factored_map_is_rejected() {
    // (u1/u2, u1/u2): d log Psi_1/du2 = -1/u2 but d log Psi_2/du1 = 1/u1
    let comp = FactoredComponent {
        constant: Rat::one(),
        factors: vec![
            LinearFactor {
                form: vec![Int::one(), Int::zero()],
                exponent: 1,
            },
            LinearFactor {
                form: vec![Int::zero(), Int::one()],
                exponent: -1,
            },
        ],
    };
    let f = FactoredMap {
        components: vec![comp.clone(), comp],
    };
    assert_eq!(recognize(&f).unwrap(), None);
}

#[test]
fn pushforward_commutes_with_monomial_map() {
    let mut rng = random::rng(TEST_SEED);
    for _ in 0..30 {
        let m = rng.random_range(1..=3);
        let l = rng.random_range(m..=m + 2);
        let n = rng.random_range(2..=5);
        let h = random::horn_map(&mut rng, m, n, 4);
        let c = random::full_row_rank_matrix(&mut rng, m, l, -3, 3);
        let pushed = horn::pushforward(&h, &c).unwrap();
        let v = horn::random_point_off_base_locus(&mut rng, &[&pushed], -9, 9).unwrap();
        let cv = c.mul_rat_vec(&v).unwrap();
        let lhs = horn_core::monomial::monomial_apply(&c, &h.eval(&cv).unwrap()).unwrap();
        assert_eq!(lhs, pushed.eval(&v).unwrap());
    }
}

#[test]
fn gale_data_for_independence_pair() {
    let g = gale::gale_from_pair(&fixtures::independence_a(), &fixtures::independence_b()).unwrap();
    assert!(gale::verify_exactness(&g).passed());
    let computed = gale::gale_from_B(&fixtures::independence_b()).unwrap();
    assert!(gale::row_span_eq(&computed.a, &fixtures::independence_a()));
}

#[test]
fn quadratic_singular_points_are_double_roots() {
    let p = PointConfig::new(fixtures::quadratic_a()).unwrap();
    let mut rng = random::rng(TEST_SEED);
    for _ in 0..10 {
        let (v, t) = adisc::sample_parameters(&p, &mut rng);
        let (q, cert) = adisc::singular_point_param(&p, &v, &t).unwrap();
        assert!(cert.passed());
        // q1 + q2 x + q3 x^2 = q3 (x - t)^2
        assert_eq!(&q[1], &(-&q[2] * &t[0] * Rat::from_integer(Int::from(2))));
        assert_eq!(&q[0], &(&q[2] * &t[0] * &t[0]));
    }
}

#[test]
fn independence_singular_points_lie_on_known_discriminant() {
    let p = PointConfig::new(fixtures::independence_a()).unwrap();
    let names = vars(&["q0p", "q1p", "qpp", "qp0", "qp1"]);
    let expected = parse_poly("qpp^2 - 4*(q0p + q1p)*(qp0 + qp1)", &names).unwrap();
    let computed = adisc::discriminant_univariate(&p).unwrap();
    assert_eq!(computed.poly, expected);
    assert!(adisc::discriminant_vanishes(&p, &expected, 20, TEST_SEED)
        .unwrap()
        .passed());
}

#[test]
fn cubic_discriminant_is_classical() {
    // b^2 c^2 - 4 a c^3 - 4 b^3 d - 27 a^2 d^2 + 18 abcd for a t^3 + b t^2 + c t + d
    let names = vars(&["q1", "q2", "q3", "q4"]);
    let classical = parse_poly(
        "q3^2*q2^2 - 4*q4*q2^3 - 4*q3^3*q1 - 27*q4^2*q1^2 + 18*q4*q3*q2*q1",
        &names,
    )
    .unwrap();
    let p = PointConfig::new(fixtures::cubic_a()).unwrap();
    assert_eq!(adisc::discriminant_univariate(&p).unwrap().poly, classical);
}

#[test]
fn quadratic_resultant_expansion() {
    let names = vars(&["q1", "q2", "q3", "t"]);
    let f = parse_poly("q1 + q2*t + q3*t^2", &names).unwrap();
    let res = horn_core::poly::sylvester_resultant(&f, &f.partial(3), 3).unwrap();
    assert_eq!(res, parse_poly("q3*(4*q1*q3 - q2^2)", &names).unwrap());
}

fn plane(s: &str) -> MultiPoly {
    parse_poly(s, &vars(&["p1", "p2"])).unwrap()
}

#[test]
fn circle_critical_points_match_hand_solution() {
    // p1^2 = u1/(u1+u2), p2^2 = u2/(u1+u2): four sign choices
    for u in [(3, 5), (17, 2), (40, 41)] {
        let pts = mldeg::critical_points(&plane("p1^2 + p2^2 - 1"), u, Var::P2, mldeg::FILTER_TOL)
            .unwrap();
        assert_eq!(pts.len(), 4);
        let s = (u.0 + u.1) as f64;
        for pt in &pts {
            assert!((pt.p1[0].abs() - (u.0 as f64 / s).sqrt()).abs() < 1e-10);
            assert!((pt.p2[0].abs() - (u.1 as f64 / s).sqrt()).abs() < 1e-10);
            assert!(pt.residual_f < mldeg::POLISH_TOL && pt.residual_g < mldeg::POLISH_TOL);
        }
    }
}

#[test]
fn elimination_order_does_not_change_counts() {
    for (f, want) in [
        ("p1^2 + p2^2 - 1", 4),
        ("p1 + p2 - 1", 1),
        ("p1 - (p2 + 1)^2", 1),
    ] {
        for elim in [Var::P1, Var::P2] {
            let r = mldeg::ml_degree_plane(
                &plane(f),
                TEST_SEED,
                MlDegreeOptions {
                    eliminate: elim,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(r.ml_degree, Some(want), "{f}, eliminating {elim:?}");
            assert!(r.stable);
        }
    }
}

#[test]
fn horn_estimators_hit_critical_points_exactly() {
    for (h, f) in [
        (fixtures::line_map(), "p1 + p2 - 1"),
        (fixtures::parabola_map(), "p1 - (p2 + 1)^2"),
    ] {
        let cert = mldeg::mldeg_cross_check_horn(&h, &plane(f), TEST_SEED).unwrap();
        assert!(cert.passed(), "{cert:?}");
    }
}

#[test]
fn squared_circle_is_the_line() {
    // pushing the circle through (p1, p2) -> (p1^2, p2^2) lands on p1 + p2 = 1,
    // whose estimator is the line model
    let line = fixtures::line_map();
    let mut rng = random::rng(TEST_SEED);
    for _ in 0..10 {
        let u = horn::random_point_off_base_locus(&mut rng, &[&line], 1, 100).unwrap();
        let p = line.eval(&u).unwrap();
        assert!(plane("p1 + p2 - 1").eval(&p).unwrap().is_zero());
        assert!(p.iter().all(|x| x.is_positive()));
    }
}
