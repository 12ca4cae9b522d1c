//! Horn uniformizations `Psi(u) = d ∘ (B u)^B`.
//!
//! A [`HornMap`] is the pair `(d, B)`: `d` a vector of nonzero rationals of
//! length `m` and `B` an `n x m` integer matrix whose columns sum to zero.
//! Its components are
//!
//! ```text
//! Psi_k(u) = d_k * prod_i (sum_j b_ij u_j)^(b_ik)
//! ```
//!
//! which are homogeneous of degree zero in `u`. Besides evaluation this
//! module computes the logarithmic Jacobian in closed form and certifies
//! the symmetry and annihilation identities that characterize estimators
//! of maximum likelihood degree one.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cert::Certificate;
use crate::error::{Error, Result};
use crate::linalg::{self, format_rat, parse_rat, Int, IntMatrix, Rat, RatVector};
use crate::monomial::{self, small_exponent};
use crate::poly::MultiPoly;
use crate::random;

/// Pretty form of the linear form `sum_j coeffs_j var_j`.
pub fn format_linear_form(coeffs: &[Int], var: &str) -> String {
    let c: Vec<Rat> = coeffs.iter().cloned().map(Rat::from_integer).collect();
    let names: Vec<String> = (1..=coeffs.len()).map(|i| format!("{var}{i}")).collect();
    MultiPoly::linear(&c).display_with(&names).to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HornMapJson", into = "HornMapJson")]
pub struct HornMap {
    d: RatVector,
    b: IntMatrix,
}

#[derive(Serialize, Deserialize)]
struct HornMapJson {
    d: Vec<String>,
    #[serde(rename = "B")]
    b: IntMatrix,
}

impl TryFrom<HornMapJson> for HornMap {
    type Error = Error;

    /// Only shapes are checked here so that invalid maps can still be
    /// loaded and certified; use [`HornMap::validate`] before relying on
    /// the invariants.
    fn try_from(j: HornMapJson) -> Result<Self> {
        let d =
            j.d.iter()
                .map(|s| parse_rat(s))
                .collect::<Result<Vec<_>>>()?;
        HornMap::new_unchecked(d, j.b)
    }
}

impl From<HornMap> for HornMapJson {
    fn from(h: HornMap) -> Self {
        HornMapJson {
            d: h.d.iter().map(format_rat).collect(),
            b: h.b,
        }
    }
}

impl HornMap {
    pub fn new(d: RatVector, b: IntMatrix) -> Result<Self> {
        let h = Self::new_unchecked(d, b)?;
        h.validate()?;
        Ok(h)
    }

    /// Checks shapes only. Column sums and nonzero `d` are not enforced.
    pub fn new_unchecked(d: RatVector, b: IntMatrix) -> Result<Self> {
        if d.len() != b.cols() {
            return Err(Error::Shape(format!(
                "d has length {} but B has {} columns",
                d.len(),
                b.cols()
            )));
        }
        if d.is_empty() {
            return Err(Error::Invalid("a Horn map needs m >= 1".into()));
        }
        Ok(Self { d, b })
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(k) = self.d.iter().position(Zero::is_zero) {
            return Err(Error::Invalid(format!("d_{} is zero", k + 1)));
        }
        if let Some(j) = self.b.column_sums().iter().position(|s| !s.is_zero()) {
            return Err(Error::Invalid(format!(
                "column {} of B does not sum to zero",
                j + 1
            )));
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn m(&self) -> usize {
        self.b.cols()
    }

    pub fn n(&self) -> usize {
        self.b.rows()
    }

    pub fn d(&self) -> &[Rat] {
        &self.d
    }

    pub fn b(&self) -> &IntMatrix {
        &self.b
    }

    fn check_point(&self, u: &[Rat]) -> Result<RatVector> {
        if u.len() != self.m() {
            return Err(Error::Shape(format!(
                "data vector of length {} for a map with m = {}",
                u.len(),
                self.m()
            )));
        }
        if random::is_zero_vec(u) {
            return Err(Error::ZeroVector);
        }
        let r = self.b.mul_rat_vec(u)?;
        for (i, ri) in r.iter().enumerate() {
            if ri.is_zero() && !self.b.is_row_zero(i) {
                return Err(Error::BaseLocus {
                    row: i,
                    form: format_linear_form(self.b.row(i), "u"),
                });
            }
        }
        Ok(r)
    }

    pub fn is_off_base_locus(&self, u: &[Rat]) -> bool {
        self.check_point(u).is_ok()
    }

    /// `Psi(u)`.
    pub fn eval(&self, u: &[Rat]) -> Result<RatVector> {
        let r = self.check_point(u)?;
        (0..self.m())
            .map(|k| {
                let mut acc = self.d[k].clone();
                for (i, ri) in r.iter().enumerate() {
                    let e = &self.b[(i, k)];
                    if !e.is_zero() {
                        acc *= ri.pow(small_exponent(e)?);
                    }
                }
                Ok(acc)
            })
            .collect()
    }

    /// Closed-form logarithmic Jacobian, `J[k][j] = d log Psi_k / d u_j =
    /// sum_i b_ik b_ij / (B u)_i`.
    pub fn log_jacobian(&self, u: &[Rat]) -> Result<Vec<RatVector>> {
        let r = self.check_point(u)?;
        let m = self.m();
        let mut j = vec![vec![Rat::zero(); m]; m];
        for (i, ri) in r.iter().enumerate() {
            if self.b.is_row_zero(i) {
                continue;
            }
            let inv = ri.recip();
            let row = self.b.row(i);
            for k in 0..m {
                if row[k].is_zero() {
                    continue;
                }
                for l in 0..m {
                    if !row[l].is_zero() {
                        j[k][l] += &inv * Rat::from_integer(&row[k] * &row[l]);
                    }
                }
            }
        }
        Ok(j)
    }

    /// Evaluates `Psi` and its directional derivative along `dir` by
    /// forward-mode differentiation of the product formula.
    pub fn eval_with_derivative(&self, u: &[Rat], dir: &[Rat]) -> Result<(RatVector, RatVector)> {
        let r = self.check_point(u)?;
        let dr = self.b.mul_rat_vec(dir)?;
        let mut vals = Vec::with_capacity(self.m());
        let mut ders = Vec::with_capacity(self.m());
        for k in 0..self.m() {
            let mut acc = Dual::constant(self.d[k].clone());
            for i in 0..self.n() {
                let e = &self.b[(i, k)];
                if e.is_zero() {
                    continue;
                }
                acc = acc.mul(
                    &Dual {
                        re: r[i].clone(),
                        eps: dr[i].clone(),
                    }
                    .powi(small_exponent(e)?),
                );
            }
            vals.push(acc.re);
            ders.push(acc.eps);
        }
        Ok((vals, ders))
    }

    /// Logarithmic Jacobian computed column by column from directional
    /// derivatives of `Psi` itself.
    pub fn log_jacobian_forward(&self, u: &[Rat]) -> Result<Vec<RatVector>> {
        let m = self.m();
        let mut j = vec![vec![Rat::zero(); m]; m];
        for l in 0..m {
            let mut e = vec![Rat::zero(); m];
            e[l] = Rat::one();
            let (vals, ders) = self.eval_with_derivative(u, &e)?;
            for k in 0..m {
                j[k][l] = &ders[k] / &vals[k];
            }
        }
        Ok(j)
    }

    /// One factor `(row_i . u)^(b_ik)` per nonzero exponent.
    pub fn to_factored(&self) -> FactoredMap {
        let components = (0..self.m())
            .map(|k| FactoredComponent {
                constant: self.d[k].clone(),
                factors: (0..self.n())
                    .filter(|&i| !self.b[(i, k)].is_zero())
                    .map(|i| LinearFactor {
                        form: self.b.row(i).to_vec(),
                        exponent: i64::try_from(&self.b[(i, k)]).expect("small exponent"),
                    })
                    .collect(),
            })
            .collect();
        FactoredMap { components }
    }
}

#[derive(Clone, Debug)]
struct Dual {
    re: Rat,
    eps: Rat,
}

impl Dual {
    fn constant(re: Rat) -> Self {
        Dual {
            re,
            eps: Rat::zero(),
        }
    }

    fn mul(&self, o: &Dual) -> Dual {
        Dual {
            re: &self.re * &o.re,
            eps: &self.re * &o.eps + &self.eps * &o.re,
        }
    }

    /// `(a + b eps)^e = a^e + e a^(e-1) b eps`, valid for `a != 0`.
    fn powi(&self, e: i32) -> Dual {
        let pm1 = self.re.pow(e - 1);
        Dual {
            re: &pm1 * &self.re,
            eps: pm1 * &self.eps * Rat::from_integer(Int::from(e)),
        }
    }
}

fn transpose(j: &[RatVector]) -> Vec<RatVector> {
    let m = j.len();
    (0..m)
        .map(|k| (0..m).map(|l| j[l][k].clone()).collect())
        .collect()
}

fn mat_vec(j: &[RatVector], u: &[Rat]) -> RatVector {
    j.iter()
        .map(|row| row.iter().zip(u).fold(Rat::zero(), |a, (x, y)| a + x * y))
        .collect()
}

/// Certifies, exactly at `u`, the identities satisfied by an estimator of
/// maximum likelihood degree one: the closed-form Jacobian agrees with
/// forward differentiation, `J = J^T`, `J^T u = 0` and `J u = 0`.
pub fn certify_criticality(h: &HornMap, u: &[Rat]) -> Result<Certificate> {
    let j = h.log_jacobian(u)?;
    let jf = h.log_jacobian_forward(u)?;
    let jt = transpose(&j);
    let zero = vec![Rat::zero(); h.m()];
    let mut cert = Certificate::new();
    let sums = h.b.column_sums();
    cert.check_with(
        "column sums of B vanish",
        sums.iter().all(Zero::is_zero),
        format!(
            "{:?}",
            sums.iter().map(|s| s.to_string()).collect::<Vec<_>>()
        ),
    );
    cert.check(
        "closed-form log-Jacobian matches forward derivative",
        j == jf,
    );
    cert.check("symmetry: J = J^T", j == jt);
    cert.check("criticality: J^T u = 0", mat_vec(&jt, u) == zero);
    cert.check("Euler relation: J u = 0", mat_vec(&j, u) == zero);
    Ok(cert)
}

/// Draws integer data vectors in `[lo, hi]^m` off the base loci of all maps.
pub fn random_point_off_base_locus(
    rng: &mut impl Rng,
    maps: &[&HornMap],
    lo: i64,
    hi: i64,
) -> Result<RatVector> {
    let m = maps[0].m();
    for _ in 0..10_000 {
        let u = random::rat_int_vector(rng, m, lo, hi);
        if maps.iter().all(|h| h.is_off_base_locus(&u)) {
            return Ok(u);
        }
    }
    Err(Error::Invalid(
        "could not sample a point off the base locus".into(),
    ))
}

/// Runs [`certify_criticality`] at `trials` seeded random data vectors and
/// merges the results check by check.
pub fn certify_random(h: &HornMap, trials: usize, seed: u64) -> Result<Certificate> {
    let mut rng = random::rng(seed);
    let mut merged: Vec<(String, bool, usize)> = Vec::new();
    for _ in 0..trials {
        let u = random_point_off_base_locus(&mut rng, &[h], -20, 20)?;
        for c in certify_criticality(h, &u)?.checks {
            match merged.iter_mut().find(|(n, _, _)| *n == c.name) {
                Some(e) => {
                    e.1 &= c.passed;
                    e.2 += usize::from(!c.passed);
                }
                None => merged.push((c.name, c.passed, usize::from(!c.passed))),
            }
        }
    }
    let mut cert = Certificate::new();
    for (name, ok, fails) in merged {
        cert.check_with(name, ok, format!("{fails} of {trials} trials failed"));
    }
    Ok(cert)
}

/// `Psi'(v) = d^C ∘ (BC v)^(BC)`; requires `rank C = m`.
pub fn pushforward(h: &HornMap, c: &IntMatrix) -> Result<HornMap> {
    if c.rows() != h.m() {
        return Err(Error::Shape(format!(
            "C has {} rows but the map has m = {}",
            c.rows(),
            h.m()
        )));
    }
    let r = linalg::rank(c);
    if r < h.m() {
        return Err(Error::RankDeficient {
            required: h.m(),
            actual: r,
        });
    }
    let d = monomial::monomial_apply(c, &h.d)?;
    let b = h.b.mul(c)?;
    HornMap::new(d, b)
}

pub const SEMANTIC_EQ_SAMPLES: usize = 16;
pub const SEMANTIC_EQ_RANGE: i64 = 50;

/// Compares two maps as functions at 16 seeded points in `[-50, 50]^m`
/// avoiding both base loci. False positives are possible in principle.
pub fn semantic_eq(h1: &HornMap, h2: &HornMap, seed: u64) -> bool {
    if h1.m() != h2.m() {
        return false;
    }
    let mut rng = random::rng(seed);
    for _ in 0..SEMANTIC_EQ_SAMPLES {
        let Ok(u) =
            random_point_off_base_locus(&mut rng, &[h1, h2], -SEMANTIC_EQ_RANGE, SEMANTIC_EQ_RANGE)
        else {
            return false;
        };
        match (h1.eval(&u), h2.eval(&u)) {
            (Ok(a), Ok(b)) if a == b => {}
            _ => return false,
        }
    }
    true
}

// ---- factored maps and recognition

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LinearFactorJson", into = "LinearFactorJson")]
pub struct LinearFactor {
    pub form: Vec<Int>,
    pub exponent: i64,
}

#[derive(Serialize, Deserialize)]
struct LinearFactorJson {
    form: Vec<String>,
    exponent: i64,
}

impl TryFrom<LinearFactorJson> for LinearFactor {
    type Error = Error;

    fn try_from(j: LinearFactorJson) -> Result<Self> {
        let form = j
            .form
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<Int>()
                    .map_err(|_| Error::Parse(format!("bad integer {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LinearFactor {
            form,
            exponent: j.exponent,
        })
    }
}

impl From<LinearFactor> for LinearFactorJson {
    fn from(f: LinearFactor) -> Self {
        LinearFactorJson {
            form: f.form.iter().map(|x| x.to_string()).collect(),
            exponent: f.exponent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredComponent {
    #[serde(with = "rat_string")]
    pub constant: Rat,
    pub factors: Vec<LinearFactor>,
}

/// A rational map whose `k`-th component is
/// `constant_k * prod (linear form)^exponent`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredMap {
    pub components: Vec<FactoredComponent>,
}

mod rat_string {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::linalg::{format_rat, parse_rat, Rat};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

impl FactoredMap {
    pub fn m(&self) -> usize {
        self.components.len()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.m();
        if m == 0 {
            return Err(Error::Invalid("factored map has no components".into()));
        }
        for (k, comp) in self.components.iter().enumerate() {
            if comp.constant.is_zero() {
                return Err(Error::Invalid(format!(
                    "component {} has zero constant",
                    k + 1
                )));
            }
            for f in &comp.factors {
                if f.form.len() != m {
                    return Err(Error::Shape(format!(
                        "linear form of length {} in a map with m = {m}",
                        f.form.len()
                    )));
                }
                if f.form.iter().all(Zero::is_zero) {
                    return Err(Error::Invalid(format!(
                        "component {} has a zero linear form",
                        k + 1
                    )));
                }
            }
            if comp.factors.iter().map(|f| f.exponent).sum::<i64>() != 0 {
                return Err(Error::Invalid(format!(
                    "component {} is not homogeneous of degree zero",
                    k + 1
                )));
            }
        }
        Ok(())
    }

    pub fn eval(&self, u: &[Rat]) -> Result<RatVector> {
        self.components
            .iter()
            .map(|comp| {
                let mut acc = comp.constant.clone();
                for f in &comp.factors {
                    let val = f.form.iter().zip(u).fold(Rat::zero(), |a, (c, x)| {
                        a + x * Rat::from_integer(c.clone())
                    });
                    if val.is_zero() {
                        return Err(Error::BaseLocus {
                            row: 0,
                            form: format_linear_form(&f.form, "u"),
                        });
                    }
                    acc *= val.pow(i32::try_from(f.exponent).map_err(|_| {
                        Error::Invalid(format!("exponent {} is too large", f.exponent))
                    })?);
                }
                Ok(acc)
            })
            .collect()
    }
}

/// Splits a nonzero integer vector into `(scale, primitive)` with the
/// first nonzero entry of `primitive` positive.
fn primitive_part(v: &[Int]) -> (Int, Vec<Int>) {
    let g = v.iter().fold(Int::zero(), |g, x| g.gcd(x));
    let first_neg = v
        .iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| x.is_negative());
    let s = if first_neg { -g } else { g };
    (s.clone(), v.iter().map(|x| x / &s).collect())
}

/// Recovers Horn data `(d, B)` from a degree-zero map given as products of
/// linear forms, or returns `None` if its logarithmic Jacobian is not
/// symmetric (in which case no Horn presentation exists).
pub fn recognize(f: &FactoredMap) -> Result<Option<HornMap>> {
    f.validate()?;
    let m = f.m();

    // distinct linear forms up to scaling
    let mut forms: Vec<Vec<Int>> = Vec::new();
    // exponents[i][k]: total exponent of form i in component k
    let mut exponents: Vec<Vec<i64>> = Vec::new();
    let mut scalars: Vec<Rat> = f.components.iter().map(|c| c.constant.clone()).collect();
    for (k, comp) in f.components.iter().enumerate() {
        for fac in &comp.factors {
            let (c, prim) = primitive_part(&fac.form);
            let i = match forms.iter().position(|g| *g == prim) {
                Some(i) => i,
                None => {
                    forms.push(prim);
                    exponents.push(vec![0; m]);
                    forms.len() - 1
                }
            };
            exponents[i][k] += fac.exponent;
            let e = i32::try_from(fac.exponent)
                .map_err(|_| Error::Invalid("exponent too large".into()))?;
            scalars[k] *= Rat::from_integer(c).pow(e);
        }
    }

    if !log_jacobian_symmetric(&forms, &exponents, m) {
        return Ok(None);
    }

    let mut rows: Vec<Vec<Int>> = Vec::new();
    let mut lambdas: Vec<Int> = Vec::new();
    for (form, ex) in forms.iter().zip(&exponents) {
        if ex.iter().all(|&e| e == 0) {
            continue;
        }
        let ex: Vec<Int> = ex.iter().map(|&e| Int::from(e)).collect();
        // the exponent row must be an integer multiple of the primitive form
        let j0 = form
            .iter()
            .position(|x| !x.is_zero())
            .expect("nonzero form");
        if !ex[j0].is_multiple_of(&form[j0]) {
            return Ok(None);
        }
        let lambda = &ex[j0] / &form[j0];
        if form.iter().zip(&ex).any(|(a, e)| a * &lambda != *e) {
            return Ok(None);
        }
        lambdas.push(lambda);
        rows.push(ex);
    }

    let d: RatVector = (0..m)
        .map(|k| {
            let mut dk = scalars[k].clone();
            for (row, lambda) in rows.iter().zip(&lambdas) {
                let e = small_exponent(&row[k])?;
                if e != 0 {
                    dk *= Rat::from_integer(lambda.clone()).pow(-e);
                }
            }
            Ok(dk)
        })
        .collect::<Result<_>>()?;
    let b = if rows.is_empty() {
        // constant map: a single zero row, read with 0^0 = 1
        IntMatrix::zeros(1, m)
    } else {
        IntMatrix::from_int_rows(rows, m)?
    };
    let h = HornMap::new(d, b)?;

    let mut rng = random::rng(random::TEST_SEED);
    for _ in 0..8 {
        let u = random_point_off_base_locus(&mut rng, &[&h], -50, 50)?;
        if let Ok(direct) = f.eval(&u) {
            if direct != h.eval(&u)? {
                return Err(Error::Invalid(
                    "recognized map disagrees with the factored map".into(),
                ));
            }
        }
    }
    Ok(Some(h))
}

/// Clears denominators in `d log Psi_k / d u_j` by the product of all
/// distinct forms and compares the numerators as polynomials.
fn log_jacobian_symmetric(forms: &[Vec<Int>], exponents: &[Vec<i64>], m: usize) -> bool {
    let polys: Vec<MultiPoly> = forms
        .iter()
        .map(|f| {
            let c: Vec<Rat> = f.iter().cloned().map(Rat::from_integer).collect();
            MultiPoly::linear(&c)
        })
        .collect();
    let cofactors: Vec<MultiPoly> = (0..polys.len())
        .map(|i| {
            polys
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(MultiPoly::one(m), |acc, (_, p)| &acc * p)
        })
        .collect();
    let numerator = |k: usize, j: usize| {
        let mut acc = MultiPoly::zero(m);
        for i in 0..forms.len() {
            let e = exponents[i][k];
            if e == 0 || forms[i][j].is_zero() {
                continue;
            }
            let c = Rat::from_integer(Int::from(e) * &forms[i][j]);
            acc = &acc + &cofactors[i].scale(&c);
        }
        acc
    };
    (0..m).all(|k| (k + 1..m).all(|j| numerator(k, j) == numerator(j, k)))
}
