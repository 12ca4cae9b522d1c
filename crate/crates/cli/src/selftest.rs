//! Small worked examples with known answers, run by `horn selftest`.

use horn_core::adisc::{self, PointConfig};
use horn_core::fixtures;
use horn_core::gale;
use horn_core::horn::{self, HornMap};
use horn_core::linalg::{self, int, rat, rat_vec, IntMatrix};
use horn_core::mldeg;
use horn_core::mle::{self, CountVector};
use horn_core::monomial::{self, LemmaInstance};
use horn_core::poly::{self, parse_poly, MultiPoly};
use horn_core::{Certificate, Result};
use num_traits::{Signed, Zero};

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

type Section = fn(&mut Certificate, u64) -> Result<()>;

pub fn run(seed: u64) -> Certificate {
    let mut cert = Certificate::new();
    let sections: [(&str, Section); 7] = [
        ("linalg: ", linear_algebra),
        ("poly: ", polynomials),
        ("horn: ", horn_maps),
        ("monomial: ", monomial_maps),
        ("gale: ", gale_duality),
        ("adisc: ", discriminants),
        ("mldeg/mle: ", likelihood),
    ];
    for (prefix, section) in sections {
        let mut part = Certificate::new();
        if let Err(e) = section(&mut part, seed) {
            part.check_with("section ran without error", false, e.to_string());
        }
        cert.absorb(prefix, part);
    }
    cert
}

fn linear_algebra(cert: &mut Certificate, _seed: u64) -> Result<()> {
    let id = IntMatrix::identity(3);
    let (h, u) = linalg::hnf(&id);
    cert.check("HNF(I) = I with U = I", h == id && u == id);
    let zero = IntMatrix::zeros(2, 3);
    cert.check("HNF(0) = 0", linalg::hnf(&zero).0 == zero);
    cert.check("SNF(I) = I", linalg::snf(&id).0 == id);
    cert.check(
        "ker [1 1] = span (1, -1)",
        linalg::right_kernel_basis(&IntMatrix::from_rows(&[[1, 1]]))
            == IntMatrix::from_rows(&[[1], [-1]]),
    );
    cert.check(
        "ker I is trivial",
        linalg::right_kernel_basis(&id).cols() == 0,
    );
    cert.check(
        "left kernel of (1, -1)^T is span [1 1]",
        linalg::left_kernel_basis(&IntMatrix::from_rows(&[[1], [-1]]))
            == IntMatrix::from_rows(&[[1, 1]]),
    );
    let b = fixtures::independence_b();
    let (bsat, _) = linalg::saturate_column_span(&b);
    let (again, _) = linalg::saturate_column_span(&bsat);
    cert.check(
        "saturation is idempotent",
        linalg::hnf(&again.transpose()).0 == linalg::hnf(&bsat.transpose()).0,
    );
    let e1 = [int(1), int(0), int(0)];
    cert.check("extending e1 to a basis of Z^3 works", {
        let l = linalg::extend_primitive_to_basis(&id, &e1)?;
        l.col(0) == e1.to_vec() && linalg::det_bareiss(&l)?.abs() == int(1)
    });
    let twice = [int(2), int(0), int(0)];
    cert.check(
        "extending 2·e1 is rejected as non-primitive",
        linalg::extend_primitive_to_basis(&id, &twice).is_err(),
    );
    cert.check("det(I) = 1", linalg::det_bareiss(&id)? == int(1));
    Ok(())
}

fn polynomials(cert: &mut Certificate, _seed: u64) -> Result<()> {
    let xy = names(&["x", "y"]);
    let p = parse_poly("x^2 - 3*x*y + 2", &xy)?;
    cert.check("p + (-p) = 0", (&p + &(-&p)).is_zero());
    let x = MultiPoly::var(2, 0);
    let y = MultiPoly::var(2, 1);
    cert.check(
        "(x + y)(x - y) = x^2 - y^2",
        &(&x + &y) * &(&x - &y) == parse_poly("x^2 - y^2", &xy)?,
    );
    cert.check(
        "d/dx (x^2 - 3xy + 2) = 2x - 3y",
        p.partial(0) == parse_poly("2*x - 3*y", &xy)?,
    );
    let t = names(&["t"]);
    let g = poly::gcd_univariate(&parse_poly("t^2 - 1", &t)?, &parse_poly("t - 1", &t)?)?;
    cert.check(
        "gcd(t^2 - 1, t - 1) has degree 1 and root 1",
        g.degree_in(0) == Some(1) && g.eval(&[rat(1, 1)])?.is_zero(),
    );
    let cube = parse_poly("(t - 2)^3", &t)?;
    let sf = poly::squarefree_part(&cube)?;
    cert.check(
        "squarefree part of (t - 2)^3 is t - 2 up to scale",
        sf.degree_in(0) == Some(1) && sf.eval(&[rat(2, 1)])?.is_zero(),
    );
    let tab = names(&["t", "a", "b"]);
    let res =
        poly::sylvester_resultant(&parse_poly("t - a", &tab)?, &parse_poly("t - b", &tab)?, 0)?;
    cert.check(
        "Res_t(t - a, t - b) = ±(b - a)",
        res == parse_poly("b - a", &tab)? || res == parse_poly("a - b", &tab)?,
    );
    Ok(())
}

fn horn_maps(cert: &mut Certificate, seed: u64) -> Result<()> {
    let p = rat_vec(&[3, 5]);
    let c2 = fixtures::constant_map_two_rows(&p);
    let u = rat_vec(&[2, 7]);
    cert.check("two-row constant map evaluates to p", c2.eval(&u)? == p);
    let jac = c2.log_jacobian(&u)?;
    cert.check(
        "constant map has zero log-Jacobian",
        jac.iter().flatten().all(Zero::is_zero),
    );
    let ind = fixtures::independence_map();
    let u4 = rat_vec(&[4, 2, 3, 1]);
    let j = ind.log_jacobian(&u4)?;
    let sym = (0..j.len()).all(|a| (0..j.len()).all(|b| j[a][b] == j[b][a]));
    cert.check("log-Jacobian of the independence map is symmetric", sym);
    cert.check(
        "random certificate passes on the independence map",
        horn::certify_random(&ind, 5, seed)?.passed(),
    );
    cert.check(
        "constant map certificate passes",
        horn::certify_criticality(&c2, &u)?.passed(),
    );
    let doubled = HornMap::new(
        ind.d().iter().map(|x| x * rat(2, 1)).collect(),
        ind.b().clone(),
    )?;
    cert.check(
        "doubling d changes the map",
        !horn::semantic_eq(&ind, &doubled, seed),
    );
    cert.check(
        "pushforward along the identity is the same map",
        horn::pushforward(&ind, &IntMatrix::identity(ind.m()))? == ind,
    );
    Ok(())
}

fn monomial_maps(cert: &mut Certificate, seed: u64) -> Result<()> {
    let id = IntMatrix::identity(3);
    let p = rat_vec(&[2, -3, 5]);
    cert.check("p^I = p", monomial::monomial_apply(&id, &p)? == p);
    cert.check("I·v = v", monomial::linear_apply(&id, &p)? == p);
    let c = IntMatrix::from_rows(&[[1, 2], [3, -1], [0, 4]]);
    cert.check(
        "C·0 = 0",
        monomial::linear_apply(&c, &rat_vec(&[0, 0]))?
            .iter()
            .all(Zero::is_zero),
    );
    cert.check(
        "a ∘ 1 = a",
        monomial::hadamard(&p, &rat_vec(&[1, 1, 1]))? == p,
    );
    cert.check(
        "(2, 3) ∘ (1/2, 1/3) = (1, 1)",
        monomial::hadamard(&rat_vec(&[2, 3]), &[rat(1, 2), rat(1, 3)])? == rat_vec(&[1, 1]),
    );
    let x = LemmaInstance {
        b: IntMatrix::from_rows(&[[1, 0], [0, 1], [-1, -1]]),
        c: IntMatrix::identity(2),
        v: rat_vec(&[2, 5]),
        r: rat_vec(&[3, -1, 7]),
        d: rat_vec(&[4, 9]),
        r2: vec![rat(1, 2), rat(-2, 3)],
    };
    cert.check(
        "composition identities with C = I",
        monomial::check_lemma_identities(&x, seed, 10)?.passed(),
    );
    Ok(())
}

fn gale_duality(cert: &mut Certificate, _seed: u64) -> Result<()> {
    let b = IntMatrix::from_rows(&[[1], [-1]]);
    let g = gale::gale_from_B(&b)?;
    cert.check(
        "B = (1, -1)^T gives A = [1 1]",
        g.a == IntMatrix::from_rows(&[[1, 1]]),
    );
    cert.check(
        "its Gale data verifies",
        gale::verify_exactness(&g).passed(),
    );
    let mut broken = g.clone();
    broken.c = IntMatrix::zeros(0, 1);
    cert.check(
        "dropping C is detected",
        !gale::verify_exactness(&broken).passed(),
    );
    cert.check("kernel of [1 1] is (1, -1)^T up to sign", {
        let k = gale::kernel_gale(&IntMatrix::from_rows(&[[1, 1]]))?;
        k == b || k == IntMatrix::from_rows(&[[-1], [1]])
    });
    cert.check(
        "A = [1] has an empty kernel",
        gale::kernel_gale(&IntMatrix::from_rows(&[[1]]))?.cols() == 0,
    );
    Ok(())
}

fn discriminants(cert: &mut Certificate, seed: u64) -> Result<()> {
    let p = PointConfig::new(IntMatrix::from_rows(&[[1, 1]]))?;
    let (q, c) = adisc::singular_point_param(&p, &rat_vec(&[1]), &[])?;
    cert.check(
        "k = 1: the parametrization is singular at (1)",
        c.passed() && q.len() == 2,
    );
    let quad = PointConfig::new(fixtures::quadratic_a())?;
    cert.check(
        "reduced point is invariant under t and v -> 2v",
        adisc::reduced_point_invariance(&quad, 5, seed)?.passed(),
    );
    let d = adisc::discriminant_univariate(&quad)?;
    cert.check(
        "quadratic discriminant is q2^2 - 4 q1 q3",
        d.poly == parse_poly("q2^2 - 4*q1*q3", &names(&["q1", "q2", "q3"]))?,
    );
    Ok(())
}

fn likelihood(cert: &mut Certificate, seed: u64) -> Result<()> {
    let t = names(&["t"]);
    let two = mldeg::complex_roots(&poly_coeffs(&parse_poly("t^2 - 1", &t)?)?, mldeg::ROOT_TOL)?;
    cert.check(
        "roots of t^2 - 1 are ±1",
        two.len() == 2
            && two
                .iter()
                .all(|z| (z.re.abs() - 1.0).abs() < 1e-12 && z.im.abs() < 1e-12),
    );
    let i = mldeg::complex_roots(&poly_coeffs(&parse_poly("t^2 + 1", &t)?)?, mldeg::ROOT_TOL)?;
    cert.check(
        "roots of t^2 + 1 are ±i",
        i.len() == 2
            && i.iter()
                .all(|z| z.re.abs() < 1e-12 && (z.im.abs() - 1.0).abs() < 1e-12),
    );
    let model = mle::independence_model();
    let est = mle::estimate(&model, &CountVector::new(vec![5, 5, 5, 5])?)?;
    cert.check(
        "uniform counts give the uniform estimate",
        est.p_hat == vec![rat(1, 4); 4],
    );
    let (c, _) = mle::loglik_compare(
        &model,
        &CountVector::new(vec![4, 2, 3, 1])?,
        &mle::estimate(&model, &CountVector::new(vec![4, 2, 3, 1])?)?.p_hat,
        seed,
    )?;
    cert.check("no sampled model point beats the estimate", c.passed());
    Ok(())
}

fn poly_coeffs(p: &MultiPoly) -> Result<Vec<num_complex::Complex64>> {
    use num_traits::ToPrimitive;
    Ok(p.to_dense(0)?
        .iter()
        .map(|c| num_complex::Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0))
        .collect())
}
