//! Monomial torus maps `p -> p^C`, linear projections `v -> C v` and
//! Hadamard products.
//!
//! Orientation follows the exponent matrix: for an `m x l` matrix `C`,
//! `p^C` consumes a length-`m` torus point and produces a length-`l` one,
//! whose `j`-th coordinate is `prod_i p_i^{c_ij}`.

use num_traits::Zero;
use rand::Rng;

use crate::cert::Certificate;
use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, Rat, RatVector};
use crate::random;

/// The torus homomorphism `p -> p^C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialMap {
    pub c: IntMatrix,
}

impl MonomialMap {
    pub fn new(c: IntMatrix) -> Self {
        Self { c }
    }

    pub fn apply(&self, p: &[Rat]) -> Result<RatVector> {
        monomial_apply(&self.c, p)
    }

    pub fn source_dim(&self) -> usize {
        self.c.rows()
    }

    pub fn target_dim(&self) -> usize {
        self.c.cols()
    }
}

fn check_torus(p: &[Rat]) -> Result<()> {
    match p.iter().position(Zero::is_zero) {
        Some(i) => Err(Error::ZeroCoordinate(i)),
        None => Ok(()),
    }
}

pub(crate) fn small_exponent(e: &crate::linalg::Int) -> Result<i32> {
    i32::try_from(e).map_err(|_| Error::Invalid(format!("exponent {e} is too large")))
}

/// `p^C`.
pub fn monomial_apply(c: &IntMatrix, p: &[Rat]) -> Result<RatVector> {
    if p.len() != c.rows() {
        return Err(Error::Shape(format!(
            "point of length {} for a {}x{} exponent matrix",
            p.len(),
            c.rows(),
            c.cols()
        )));
    }
    check_torus(p)?;
    (0..c.cols())
        .map(|j| {
            let mut acc = Rat::from_integer(1.into());
            for (i, pi) in p.iter().enumerate() {
                let e = &c[(i, j)];
                if !e.is_zero() {
                    acc *= pi.pow(small_exponent(e)?);
                }
            }
            Ok(acc)
        })
        .collect()
}

/// `C v`.
pub fn linear_apply(c: &IntMatrix, v: &[Rat]) -> Result<RatVector> {
    c.mul_rat_vec(v)
}

/// Entrywise product.
pub fn hadamard(a: &[Rat], b: &[Rat]) -> Result<RatVector> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "Hadamard product of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).map(|(x, y)| x * y).collect())
}

/// Row-wise `p^C` for a stack of torus points.
pub fn monomial_apply_rows(c: &IntMatrix, rows: &[RatVector]) -> Result<Vec<RatVector>> {
    rows.iter().map(|r| monomial_apply(c, r)).collect()
}

/// `C V` for a rational matrix `V` given as rows.
pub fn linear_apply_matrix(c: &IntMatrix, v_rows: &[RatVector]) -> Result<Vec<RatVector>> {
    let cols = v_rows.first().map_or(0, Vec::len);
    if v_rows.len() != c.cols() || v_rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Shape("incompatible matrix product".into()));
    }
    Ok((0..c.rows())
        .map(|i| {
            (0..cols)
                .map(|j| {
                    (0..c.cols()).fold(Rat::zero(), |acc, k| {
                        acc + &v_rows[k][j] * Rat::from_integer(c[(i, k)].clone())
                    })
                })
                .collect()
        })
        .collect())
}

/// Inputs for one instance of the three identities
/// `B(Cv) = (BC)v`, `(r^B)^C = r^(BC)`, `(d∘r)^C = d^C ∘ r^C`.
///
/// Shapes: `B` is `n x m`, `C` is `m x l`, `v` has length `l`, `r` has
/// length `n` for the second identity, and `d`, `r2` have length `m` for
/// the third.
#[derive(Debug, Clone)]
pub struct LemmaInstance {
    pub b: IntMatrix,
    pub c: IntMatrix,
    pub v: RatVector,
    pub r: RatVector,
    pub d: RatVector,
    pub r2: RatVector,
}

fn check_instance(cert: &mut Certificate, tag: &str, x: &LemmaInstance) -> Result<()> {
    let bc = x.b.mul(&x.c)?;

    let lhs = linear_apply(&x.b, &linear_apply(&x.c, &x.v)?)?;
    let rhs = linear_apply(&bc, &x.v)?;
    cert.check(format!("{tag}linear composition B(Cv) = (BC)v"), lhs == rhs);

    let lhs = monomial_apply(&x.c, &monomial_apply(&x.b, &x.r)?)?;
    let rhs = monomial_apply(&bc, &x.r)?;
    cert.check(
        format!("{tag}monomial composition (r^B)^C = r^(BC)"),
        lhs == rhs,
    );

    let lhs = monomial_apply(&x.c, &hadamard(&x.d, &x.r2)?)?;
    let rhs = hadamard(&monomial_apply(&x.c, &x.d)?, &monomial_apply(&x.c, &x.r2)?)?;
    cert.check(
        format!("{tag}Hadamard compatibility (d∘r)^C = d^C∘r^C"),
        lhs == rhs,
    );
    Ok(())
}

/// Matrix-argument forms: `v`, `r`, `d` replaced by matrices (stacks of
/// points, one per row for the torus identities and one per column for
/// the linear one).
fn check_matrix_forms(
    cert: &mut Certificate,
    b: &IntMatrix,
    c: &IntMatrix,
    rng: &mut impl Rng,
    width: usize,
) -> Result<()> {
    let (n, m, l) = (b.rows(), b.cols(), c.cols());
    let bc = b.mul(c)?;

    let v_rows: Vec<RatVector> = (0..l)
        .map(|_| random::nonzero_rat_vector(rng, width, 9))
        .collect();
    let lhs = linear_apply_matrix(b, &linear_apply_matrix(c, &v_rows)?)?;
    let rhs = linear_apply_matrix(&bc, &v_rows)?;
    cert.check("matrix form: B(CV) = (BC)V", lhs == rhs);

    let r_rows: Vec<RatVector> = (0..width)
        .map(|_| random::nonzero_rat_vector(rng, n, 9))
        .collect();
    let lhs = monomial_apply_rows(c, &monomial_apply_rows(b, &r_rows)?)?;
    let rhs = monomial_apply_rows(&bc, &r_rows)?;
    cert.check("matrix form: (R^B)^C = R^(BC)", lhs == rhs);

    let d_rows: Vec<RatVector> = (0..width)
        .map(|_| random::nonzero_rat_vector(rng, m, 9))
        .collect();
    let r2_rows: Vec<RatVector> = (0..width)
        .map(|_| random::nonzero_rat_vector(rng, m, 9))
        .collect();
    let mut ok = true;
    for (d, r2) in d_rows.iter().zip(&r2_rows) {
        let lhs = monomial_apply(c, &hadamard(d, r2)?)?;
        let rhs = hadamard(&monomial_apply(c, d)?, &monomial_apply(c, r2)?)?;
        ok &= lhs == rhs;
    }
    cert.check("matrix form: (D∘R)^C = D^C∘R^C", ok);
    Ok(())
}

/// Checks the three composition identities on the given data, on
/// `trials` seeded random instances of the same shapes, and in their
/// matrix-argument forms.
pub fn check_lemma_identities(x: &LemmaInstance, seed: u64, trials: usize) -> Result<Certificate> {
    let mut cert = Certificate::new();
    check_instance(&mut cert, "given: ", x)?;
    let mut rng = random::rng(seed);
    let (n, m, l) = (x.b.rows(), x.b.cols(), x.c.cols());
    let mut all = Certificate::new();
    for _ in 0..trials {
        let inst = LemmaInstance {
            b: random::int_matrix(&mut rng, n, m, -5, 5),
            c: random::int_matrix(&mut rng, m, l, -5, 5),
            v: random::nonzero_rat_vector(&mut rng, l, 9),
            r: random::nonzero_rat_vector(&mut rng, n, 9),
            d: random::nonzero_rat_vector(&mut rng, m, 9),
            r2: random::nonzero_rat_vector(&mut rng, m, 9),
        };
        check_instance(&mut all, "", &inst)?;
        check_matrix_forms(&mut all, &inst.b, &inst.c, &mut rng, 3)?;
    }
    if trials > 0 {
        let mut tally: Vec<(String, bool)> = Vec::new();
        for ch in all.checks {
            match tally.iter_mut().find(|(n, _)| *n == ch.name) {
                Some(t) => t.1 &= ch.passed,
                None => tally.push((ch.name, ch.passed)),
            }
        }
        for (name, ok) in tally {
            cert.check_with(format!("random: {name}"), ok, format!("{trials} instances"));
        }
    }
    Ok(cert)
}
