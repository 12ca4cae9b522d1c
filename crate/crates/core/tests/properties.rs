//! Property tests over seeded random inputs.

use horn_core::gale;
use horn_core::horn::{self, pushforward, recognize, semantic_eq, HornMap};
use horn_core::linalg::{self, Int, IntMatrix, Rat};
use horn_core::monomial;
use horn_core::poly::{self, MultiPoly};
use horn_core::random::{self, TEST_SEED};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(TEST_SEED),
        failure_persistence: None,
        ..Config::default()
    }
}

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(-9i64..=9, r * c).prop_map(move |e| {
            IntMatrix::new(r, c, e.into_iter().map(Int::from).collect()).unwrap()
        })
    })
}

fn is_staircase(h: &IntMatrix) -> bool {
    let mut last: Option<usize> = None;
    let mut seen_zero = false;
    for i in 0..h.rows() {
        match h.row(i).iter().position(|x| !x.is_zero()) {
            None => seen_zero = true,
            Some(p) => {
                if seen_zero || last.is_some_and(|l| p <= l) || !h[(i, p)].is_positive() {
                    return false;
                }
                if (0..i).any(|k| h[(k, p)].is_negative() || h[(k, p)] >= h[(i, p)]) {
                    return false;
                }
                last = Some(p);
            }
        }
    }
    true
}

fn is_unimodular(u: &IntMatrix) -> bool {
    linalg::det_bareiss(u)
        .map(|d| d.abs().is_one())
        .unwrap_or(false)
}

fn column_lattice_hnf(m: &IntMatrix) -> IntMatrix {
    linalg::hnf(&m.transpose()).0
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn hnf_postconditions(m in matrix(5, 5)) {
        let (h, u) = linalg::hnf(&m);
        prop_assert_eq!(u.mul(&m).unwrap(), h.clone());
        prop_assert!(is_unimodular(&u));
        prop_assert!(is_staircase(&h));
    }

    #[test]
    fn snf_postconditions(m in matrix(5, 5)) {
        let (s, u, v) = linalg::snf(&m);
        prop_assert_eq!(u.mul(&m).unwrap().mul(&v).unwrap(), s.clone());
        prop_assert!(is_unimodular(&u) && is_unimodular(&v));
        let diag: Vec<Int> = (0..s.rows().min(s.cols())).map(|i| s[(i, i)].clone()).collect();
        for i in 0..s.rows() {
            for j in 0..s.cols() {
                prop_assert!(i == j || s[(i, j)].is_zero());
            }
        }
        prop_assert!(diag.iter().all(|x| !x.is_negative()));
        for w in diag.windows(2) {
            prop_assert!(w[1].is_zero() || (!w[0].is_zero() && (&w[1] % &w[0]).is_zero()));
        }
    }

    #[test]
    fn kernels(m in matrix(5, 6)) {
        let k = linalg::right_kernel_basis(&m);
        prop_assert_eq!(linalg::rank(&m) + k.cols(), m.cols());
        if k.cols() > 0 {
            prop_assert!(m.mul(&k).unwrap().is_zero());
            prop_assert!(linalg::all_invariant_factors_one(&k));
        }
        let l = linalg::left_kernel_basis(&m);
        if l.rows() > 0 {
            prop_assert!(l.mul(&m).unwrap().is_zero());
        }
        prop_assert_eq!(linalg::rank(&m) + l.rows(), m.rows());
    }

    #[test]
    fn saturation(m in matrix(5, 4)) {
        prop_assume!(!m.is_zero());
        let (bsat, c) = linalg::saturate_column_span(&m);
        prop_assert_eq!(bsat.mul(&c).unwrap(), m.clone());
        prop_assert!(linalg::all_invariant_factors_one(&bsat));
        prop_assert_eq!(linalg::rank(&c), linalg::rank(&m));
        let (again, _) = linalg::saturate_column_span(&bsat);
        prop_assert_eq!(column_lattice_hnf(&again), column_lattice_hnf(&bsat));
    }
}

// ---- polynomials

fn small_poly(nvars: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((prop::collection::vec(0u32..=2, nvars), -5i64..=5), 0..5).prop_map(
        move |terms| {
            MultiPoly::from_terms(
                nvars,
                terms
                    .into_iter()
                    .map(|(e, c)| (e, Rat::from_integer(Int::from(c)))),
            )
            .unwrap()
        },
    )
}

fn univariate(max_deg: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(-6i64..=6, 2..=max_deg + 1).prop_filter_map("positive degree", |c| {
        let c: Vec<Rat> = c
            .into_iter()
            .map(|x| Rat::from_integer(Int::from(x)))
            .collect();
        let p = MultiPoly::from_dense(1, 0, &c);
        (p.degree_in(0).unwrap_or(0) > 0).then_some(p)
    })
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn ring_axioms(a in small_poly(2), b in small_poly(2), c in small_poly(2)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a + &(-&a)).is_zero());
        let pt = [Rat::new(Int::from(2), Int::from(3)), Rat::from_integer(Int::from(-5))];
        prop_assert_eq!((&a + &b).eval(&pt).unwrap(), a.eval(&pt).unwrap() + b.eval(&pt).unwrap());
        prop_assert_eq!((&a * &b).eval(&pt).unwrap(), a.eval(&pt).unwrap() * b.eval(&pt).unwrap());
    }

    #[test]
    fn resultant_symmetry_and_multiplicativity(a in univariate(3), b in univariate(3), c in univariate(2)) {
        let da = a.degree_in(0).unwrap();
        let db = b.degree_in(0).unwrap();
        let rab = poly::sylvester_resultant(&a, &b, 0).unwrap();
        let rba = poly::sylvester_resultant(&b, &a, 0).unwrap();
        let sign = if (da * db) % 2 == 1 { -Rat::one() } else { Rat::one() };
        prop_assert_eq!(rab.clone(), rba.scale(&sign));
        let rabc = poly::sylvester_resultant(&a, &(&b * &c), 0).unwrap();
        let rac = poly::sylvester_resultant(&a, &c, 0).unwrap();
        prop_assert_eq!(rabc, &rab * &rac);
    }

    #[test]
    fn repeated_root_iff_discriminant_vanishes(a in univariate(4)) {
        prop_assume!(a.degree_in(0).unwrap() >= 2);
        let res = poly::sylvester_resultant(&a, &a.partial(0), 0).unwrap();
        let sf = poly::squarefree_part(&a).unwrap();
        prop_assert_eq!(res.is_zero(), sf.degree_in(0) < a.degree_in(0));
    }
}

// ---- Horn maps

fn horn_and_point(seed: u64) -> (HornMap, Vec<Rat>) {
    let mut rng = random::rng(seed);
    let m = 1 + (seed % 5) as usize;
    let n = 2 + (seed % 6) as usize;
    let h = random::horn_map(&mut rng, m, n, 5);
    let u = horn::random_point_off_base_locus(&mut rng, &[&h], -20, 20).unwrap();
    (h, u)
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn criticality_identities(seed in any::<u64>()) {
        let (h, u) = horn_and_point(seed);
        let cert = horn::certify_criticality(&h, &u).unwrap();
        prop_assert!(cert.passed(), "{:?}", cert);
    }

    #[test]
    fn scale_invariance(seed in any::<u64>(), num in 1i64..=9, den in 1i64..=9, neg in any::<bool>()) {
        let (h, u) = horn_and_point(seed);
        let lambda = Rat::new(Int::from(if neg { -num } else { num }), Int::from(den));
        let scaled: Vec<Rat> = u.iter().map(|x| x * &lambda).collect();
        prop_assert_eq!(h.eval(&scaled).unwrap(), h.eval(&u).unwrap());
    }

    #[test]
    fn recognize_presentations(seed in any::<u64>()) {
        let (h, _) = horn_and_point(seed);
        let back = recognize(&h.to_factored()).unwrap().expect("Horn maps are symmetric");
        prop_assert!(semantic_eq(&h, &back, seed));
    }

    #[test]
    fn pushforward_composes(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let m = 1 + (seed % 3) as usize;
        let h = random::horn_map(&mut rng, m, 3, 4);
        let c1 = random::full_row_rank_matrix(&mut rng, m, m + 1, -2, 2);
        let c2 = random::full_row_rank_matrix(&mut rng, m + 1, m + 2, -2, 2);
        let two_steps = pushforward(&pushforward(&h, &c1).unwrap(), &c2).unwrap();
        let one_step = pushforward(&h, &c1.mul(&c2).unwrap()).unwrap();
        prop_assert!(semantic_eq(&two_steps, &one_step, seed));
    }

    #[test]
    fn monomial_maps_stay_in_torus(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let c = random::int_matrix(&mut rng, 3, 4, -4, 4);
        let p = random::nonzero_rat_vector(&mut rng, 3, 9);
        let out = monomial::monomial_apply(&c, &p).unwrap();
        prop_assert!(out.iter().all(|x| !x.is_zero()));
    }

    #[test]
    fn gale_round_trip(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let n = 3 + (seed % 4) as usize;
        let m = 1 + (seed % 4) as usize;
        let b = random::zero_colsum_matrix(&mut rng, n, m, 5);
        prop_assume!(!b.is_zero());
        let g = gale::gale_from_B(&b).unwrap();
        let cert = gale::verify_exactness(&g);
        prop_assert!(cert.passed(), "{:?}", cert);
        let k = gale::kernel_gale(&g.a).unwrap();
        prop_assert_eq!(column_lattice_hnf(&k), column_lattice_hnf(&g.bsat));
        let h = HornMap::new(random::nonzero_rat_vector(&mut rng, m, 9), b).unwrap();
        let u = horn::random_point_off_base_locus(&mut rng, &[&h], -20, 20).unwrap();
        prop_assert!(gale::horn_factorization_holds(&g, &h, &u).unwrap());
    }
}
