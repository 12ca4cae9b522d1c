//! A-discriminants of Laurent families `F(t) = sum_i q_i t^(omega_i)`.
//!
//! Singular points of `{F = 0}` in the torus are parametrized by the kernel
//! of `A`: for `r = ℬv` and a torus point `t`, the coefficients
//! `q_i = r_i t^(-omega_i)` make `F` and all its torus-logarithmic
//! derivatives vanish at `t`. Quotienting by the torus action sends such
//! `q` to `(ℬv)^ℬ`, a Horn map in `v`.

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cert::Certificate;
use crate::error::{Error, Result};
use crate::gale;
use crate::horn::format_linear_form;
use crate::linalg::{IntMatrix, Rat, RatVector};
use crate::monomial::{self, small_exponent};
use crate::poly::{self, MultiPoly};
use crate::random;

/// A point configuration: the columns `omega_i` of `A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "IntMatrix", into = "IntMatrix")]
pub struct PointConfig {
    a: IntMatrix,
    kernel: IntMatrix,
}

impl TryFrom<IntMatrix> for PointConfig {
    type Error = Error;

    fn try_from(a: IntMatrix) -> Result<Self> {
        PointConfig::new(a)
    }
}

impl From<PointConfig> for IntMatrix {
    fn from(p: PointConfig) -> Self {
        p.a
    }
}

impl PointConfig {
    pub fn new(a: IntMatrix) -> Result<Self> {
        let kernel = gale::kernel_gale(&a)?;
        Ok(Self { a, kernel })
    }

    pub fn a(&self) -> &IntMatrix {
        &self.a
    }

    /// `ℬ`, a lattice basis of `ker A` as columns.
    pub fn kernel(&self) -> &IntMatrix {
        &self.kernel
    }

    pub fn k(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    fn kernel_point(&self, v: &[Rat]) -> Result<RatVector> {
        if v.len() != self.kernel.cols() {
            return Err(Error::Shape(format!(
                "v has length {} but ker A has rank {}",
                v.len(),
                self.kernel.cols()
            )));
        }
        let r = self.kernel.mul_rat_vec(v)?;
        if let Some(i) = r.iter().position(Zero::is_zero) {
            return Err(Error::BaseLocus {
                row: i,
                form: format_linear_form(self.kernel.row(i), "v"),
            });
        }
        Ok(r)
    }

    /// `(1, t)^omega_i` for every column.
    fn torus_monomials(&self, t: &[Rat]) -> Result<RatVector> {
        if t.len() + 1 != self.k() {
            return Err(Error::Shape(format!(
                "t has length {} but A has {} rows",
                t.len(),
                self.k()
            )));
        }
        if let Some(i) = t.iter().position(Zero::is_zero) {
            return Err(Error::ZeroCoordinate(i));
        }
        let full: RatVector = std::iter::once(Rat::one())
            .chain(t.iter().cloned())
            .collect();
        monomial::monomial_apply(&self.a, &full)
    }
}

/// Coefficients `q` whose Laurent polynomial is singular at `(1, t)`,
/// together with an exact certificate of the vanishing conditions.
pub fn singular_point_param(
    p: &PointConfig,
    v: &[Rat],
    t: &[Rat],
) -> Result<(RatVector, Certificate)> {
    let r = p.kernel_point(v)?;
    let mono = p.torus_monomials(t)?;
    let q: RatVector = r.iter().zip(&mono).map(|(ri, mi)| ri / mi).collect();
    let cert = singular_certificate(p, &q, t)?;
    Ok((q, cert))
}

/// Checks `F(q, t) = 0` and `sum_i a_ji q_i t^omega_i = 0` for every row `j`.
pub fn singular_certificate(p: &PointConfig, q: &[Rat], t: &[Rat]) -> Result<Certificate> {
    let mono = p.torus_monomials(t)?;
    let terms: RatVector = q.iter().zip(&mono).map(|(a, b)| a * b).collect();
    let mut cert = Certificate::new();
    let f = terms.iter().fold(Rat::zero(), |a, x| a + x);
    cert.check("F(q, t) = 0", f.is_zero());
    for j in 0..p.k() {
        let s =
            p.a.row(j)
                .iter()
                .zip(&terms)
                .fold(Rat::zero(), |acc, (a, x)| {
                    acc + x * Rat::from_integer(a.clone())
                });
        cert.check(
            format!("weighted derivative {} vanishes", j + 1),
            s.is_zero(),
        );
    }
    Ok(cert)
}

/// `(ℬv)^ℬ`, a point of the torus of dimension `n - k`.
pub fn reduced_horn_point(p: &PointConfig, v: &[Rat]) -> Result<RatVector> {
    let r = p.kernel_point(v)?;
    monomial::monomial_apply(&p.kernel, &r)
}

/// The reduced point read off from `q` directly: `q^ℬ`.
pub fn reduce_coefficients(p: &PointConfig, q: &[Rat]) -> Result<RatVector> {
    monomial::monomial_apply(&p.kernel, q)
}

/// Seeded `(v, t)` avoiding the base locus of `v -> ℬv`.
pub fn sample_parameters(p: &PointConfig, rng: &mut impl Rng) -> (RatVector, RatVector) {
    loop {
        let v = random::nonzero_rat_vector(rng, p.kernel.cols(), 9);
        if p.kernel_point(&v).is_ok() {
            let t = random::nonzero_rat_vector(rng, p.k() - 1, 9);
            return (v, t);
        }
    }
}

/// The discriminant of a one-variable family, expressed in `q_1..q_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnivariateDiscriminant {
    /// Polynomial in `n` variables, one per column of `A`.
    pub poly: MultiPoly,
    /// Discriminant in one variable per distinct exponent, before the
    /// grouped substitution.
    pub distinct: MultiPoly,
    /// Distinct exponents after translating the smallest to zero.
    pub exponents: Vec<u32>,
}

/// `Disc_t(F)` for `k = 2`: the resultant `Res_t(F, F')` with the sign
/// `(-1)^(D(D-1)/2)`, monomial content and rational content removed.
/// Repeated columns share a variable in the distinct-exponent
/// discriminant, which is then substituted by the sum of their `q_i`.
pub fn discriminant_univariate(p: &PointConfig) -> Result<UnivariateDiscriminant> {
    if p.k() != 2 {
        return Err(Error::Invalid(format!(
            "univariate discriminant needs k = 2, got k = {}",
            p.k()
        )));
    }
    let raw: Vec<i32> =
        p.a.row(1)
            .iter()
            .map(small_exponent)
            .collect::<Result<_>>()?;
    let lo = *raw.iter().min().expect("A has columns");
    let shifted: Vec<u32> = raw.iter().map(|&e| (e - lo) as u32).collect();
    let mut exponents = shifted.clone();
    exponents.sort_unstable();
    exponents.dedup();
    let degree = *exponents.last().expect("nonempty");
    if degree < 2 {
        return Err(Error::Invalid(
            "the family has degree below 2 and no singular points in the torus".into(),
        ));
    }

    let nd = exponents.len();
    let tvar = nd;
    let mut f = MultiPoly::zero(nd + 1);
    for (s, &e) in exponents.iter().enumerate() {
        let mut m = vec![0; nd + 1];
        m[s] = 1;
        m[tvar] = e;
        f = &f + &MultiPoly::term(nd + 1, poly::Monomial(m), Rat::one());
    }
    let res = poly::sylvester_resultant(&f, &f.partial(tvar), tvar)?;
    let sign = if (degree * (degree - 1) / 2) % 2 == 1 {
        -Rat::one()
    } else {
        Rat::one()
    };
    let distinct = res.scale(&sign).strip_monomial_content().primitive();

    let n = p.n();
    let mut images: Vec<MultiPoly> = exponents
        .iter()
        .map(|&e| {
            shifted
                .iter()
                .enumerate()
                .filter(|(_, &x)| x == e)
                .fold(MultiPoly::zero(n), |acc, (i, _)| {
                    &acc + &MultiPoly::var(n, i)
                })
        })
        .collect();
    images.push(MultiPoly::zero(n));
    let poly = distinct.compose(&images)?;

    // the distinct-exponent polynomial lives in nd + 1 variables; drop t
    let distinct = distinct.compose(
        &(0..nd)
            .map(|i| MultiPoly::var(nd, i))
            .chain(std::iter::once(MultiPoly::zero(nd)))
            .collect::<Vec<_>>(),
    )?;
    Ok(UnivariateDiscriminant {
        poly,
        distinct,
        exponents,
    })
}

/// Evaluates `disc` at `samples` seeded singular coefficient vectors.
pub fn discriminant_vanishes(
    p: &PointConfig,
    disc: &MultiPoly,
    samples: usize,
    seed: u64,
) -> Result<Certificate> {
    let mut rng = random::rng(seed);
    let mut failures = 0;
    let mut singular_ok = true;
    for _ in 0..samples {
        let (v, t) = sample_parameters(p, &mut rng);
        let (q, cert) = singular_point_param(p, &v, &t)?;
        singular_ok &= cert.passed();
        if !disc.eval(&q)?.is_zero() {
            failures += 1;
        }
    }
    let mut cert = Certificate::new();
    cert.check("sampled coefficients are singular", singular_ok);
    cert.check_with(
        "discriminant vanishes at sampled singular coefficients",
        failures == 0,
        format!("{failures} of {samples} samples nonzero"),
    );
    Ok(cert)
}

/// `t`-invariance and `v`-homogeneity of the reduced point at seeded samples.
pub fn reduced_point_invariance(p: &PointConfig, samples: usize, seed: u64) -> Result<Certificate> {
    let mut rng = random::rng(seed);
    let (mut t_inv, mut scale_inv, mut singular) = (true, true, true);
    for _ in 0..samples {
        let (v, t) = sample_parameters(p, &mut rng);
        let reduced = reduced_horn_point(p, &v)?;
        for _ in 0..3 {
            let t2 = random::nonzero_rat_vector(&mut rng, t.len(), 9);
            let (q, cert) = singular_point_param(p, &v, &t2)?;
            singular &= cert.passed();
            t_inv &= reduce_coefficients(p, &q)? == reduced;
        }
        let c = random::nonzero_rat(&mut rng, 9);
        let scaled: RatVector = v.iter().map(|x| x * &c).collect();
        scale_inv &= reduced_horn_point(p, &scaled)? == reduced;
    }
    let mut cert = Certificate::new();
    cert.check(
        "singular coefficients satisfy all vanishing conditions",
        singular,
    );
    cert.check("reduced point is independent of t", t_inv);
    cert.check("reduced point is invariant under scaling v", scale_inv);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::{rat, rat_vec};
    use crate::poly::parse_poly;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn quadratic_double_root() {
        let p = PointConfig::new(fixtures::quadratic_a()).unwrap();
        let (q, cert) = singular_point_param(&p, &rat_vec(&[1]), &[rat(3, 1)]).unwrap();
        assert!(cert.passed());
        // F = q1 + q2 t + q3 t^2 is a multiple of (t - 3)^2
        assert_eq!(&q[1] / &q[2], rat(-6, 1));
        assert_eq!(&q[0] / &q[2], rat(9, 1));
    }

    #[test]
    fn quadratic_reduced_point() {
        let p = PointConfig::new(fixtures::quadratic_a()).unwrap();
        for v in [1, -3, 7] {
            assert_eq!(
                reduced_horn_point(&p, &rat_vec(&[v])).unwrap(),
                vec![rat(1, 4)]
            );
        }
    }

    #[test]
    fn homogenizing_row_only() {
        let p = PointConfig::new(IntMatrix::from_rows(&[[1, 1, 1]])).unwrap();
        let (q, cert) = singular_point_param(&p, &rat_vec(&[2, 5]), &[]).unwrap();
        assert!(cert.passed());
        assert_eq!(q.iter().fold(Rat::zero(), |a, x| a + x), Rat::zero());
    }

    #[test]
    fn quadratic_discriminant() {
        let p = PointConfig::new(fixtures::quadratic_a()).unwrap();
        let d = discriminant_univariate(&p).unwrap();
        let vars = names(&["q1", "q2", "q3"]);
        assert_eq!(d.poly, parse_poly("q2^2 - 4*q1*q3", &vars).unwrap());
    }

    #[test]
    fn independence_discriminant() {
        let p = PointConfig::new(fixtures::independence_a()).unwrap();
        let d = discriminant_univariate(&p).unwrap();
        let vars = names(&["q0p", "q1p", "qpp", "qp0", "qp1"]);
        let expected = parse_poly("qpp^2 - 4*(q0p + q1p)*(qp0 + qp1)", &vars).unwrap();
        assert_eq!(d.poly, expected);
        assert!(discriminant_vanishes(&p, &d.poly, 10, 4).unwrap().passed());
    }

    #[test]
    fn cubic_discriminant() {
        let p = PointConfig::new(fixtures::cubic_a()).unwrap();
        let d = discriminant_univariate(&p).unwrap();
        assert_eq!(d.poly.total_degree(), Some(4));
        assert_eq!(d.poly.num_terms(), 5);
        assert_eq!(d.poly.coeff(&[2, 0, 0, 2]), rat(-27, 1));
        assert_eq!(d.poly.coeff(&[1, 1, 1, 1]), rat(18, 1));
        assert!(discriminant_vanishes(&p, &d.poly, 20, 11).unwrap().passed());
    }

    #[test]
    fn invariance() {
        let p = PointConfig::new(fixtures::independence_a()).unwrap();
        assert!(reduced_point_invariance(&p, 5, 2).unwrap().passed());
    }

    #[test]
    fn errors() {
        let p = PointConfig::new(fixtures::quadratic_a()).unwrap();
        assert!(singular_point_param(&p, &rat_vec(&[1]), &[rat(0, 1)]).is_err());
        assert!(matches!(
            reduced_horn_point(&p, &rat_vec(&[0])),
            Err(Error::BaseLocus { .. })
        ));
        let k1 = PointConfig::new(IntMatrix::from_rows(&[[1, 1, 1]])).unwrap();
        assert!(discriminant_univariate(&k1).is_err());
        assert!(PointConfig::new(IntMatrix::from_rows(&[[1, 1, 1], [0, 2, 4]])).is_err());
    }
}
