//! Constructive Gale duality.
//!
//! From an exponent matrix `B` (columns summing to zero) we build the
//! saturated lattice `Bsat` spanned by its columns, the factorization
//! `B = Bsat·C`, and a point configuration `A` with all-ones first row
//! whose row lattice is the left kernel of `Bsat`. The Horn map of `B`
//! then factors through the Horn map of `Bsat` followed by the finite
//! monomial map `p -> p^C`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cert::Certificate;
use crate::error::{Error, Result};
use crate::horn::HornMap;
use crate::linalg::{self, Int, IntMatrix, Rat, RatVector};
use crate::monomial;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaleData {
    #[serde(rename = "B")]
    pub b: IntMatrix,
    #[serde(rename = "Bsat")]
    pub bsat: IntMatrix,
    #[serde(rename = "C")]
    pub c: IntMatrix,
    #[serde(rename = "A")]
    pub a: IntMatrix,
}

impl GaleData {
    pub fn n(&self) -> usize {
        self.b.rows()
    }

    pub fn k(&self) -> usize {
        self.a.rows()
    }
}

fn check_zero_column_sums(b: &IntMatrix) -> Result<()> {
    if b.is_zero() {
        return Err(Error::Invalid("B is the zero matrix".into()));
    }
    if let Some(j) = b.column_sums().iter().position(|s| !s.is_zero()) {
        return Err(Error::Invalid(format!(
            "column {} of B does not sum to zero",
            j + 1
        )));
    }
    Ok(())
}

/// Rows spanning the same lattice as `a`, in a deterministic form: the
/// all-ones row first, then the Hermite normal form of the remaining
/// rows after clearing their first entries with the all-ones row.
pub fn normalize_configuration(a: &IntMatrix) -> Result<IntMatrix> {
    let n = a.cols();
    if a.rows() == 0 || a.row(0).iter().any(|x| !x.is_one()) {
        return Err(Error::Invalid("first row of A must be all ones".into()));
    }
    let rest: Vec<Vec<Int>> = (1..a.rows())
        .map(|i| {
            let row = a.row(i);
            let lead = row[0].clone();
            row.iter().map(|x| x - &lead).collect()
        })
        .collect();
    let mut rows = vec![vec![Int::one(); n]];
    if !rest.is_empty() {
        let (h, _) = linalg::hnf(&IntMatrix::from_int_rows(rest, n)?);
        rows.extend(
            h.row_vecs()
                .into_iter()
                .filter(|r| r.iter().any(|x| !x.is_zero())),
        );
    }
    IntMatrix::from_int_rows(rows, n)
}

/// Realizes `(A, Bsat, C)` for an exponent matrix `B` with zero column sums.
#[allow(non_snake_case)]
pub fn gale_from_B(b: &IntMatrix) -> Result<GaleData> {
    check_zero_column_sums(b)?;
    let n = b.rows();
    let (bsat, c) = linalg::saturate_column_span(b);
    let l = linalg::left_kernel_basis(&bsat);
    let ones = vec![Int::one(); n];
    // zero column sums put (1,...,1) in the saturated left kernel, where it is primitive
    let basis = linalg::extend_primitive_to_basis(&l.transpose(), &ones)
        .expect("all-ones vector is a primitive element of the left kernel");
    let a = normalize_configuration(&basis.transpose())?;
    Ok(GaleData {
        b: b.clone(),
        bsat,
        c,
        a,
    })
}

/// Gale data for a given configuration `A` and exponent matrix `B` with
/// `AB = 0`: `Bsat` is the kernel basis of `A` and `C` solves `B = Bsat·C`.
pub fn gale_from_pair(a: &IntMatrix, b: &IntMatrix) -> Result<GaleData> {
    check_zero_column_sums(b)?;
    let bsat = kernel_gale(a)?;
    let mut c = IntMatrix::zeros(bsat.cols(), b.cols());
    for j in 0..b.cols() {
        let col: RatVector = b.col(j).into_iter().map(Rat::from_integer).collect();
        let x = linalg::solve_exact(&bsat, &col).ok_or(Error::NotInSpan)?;
        for (i, xi) in x.into_iter().enumerate() {
            if !xi.is_integer() {
                return Err(Error::NotInSpan);
            }
            c[(i, j)] = xi.to_integer();
        }
    }
    Ok(GaleData {
        b: b.clone(),
        bsat,
        c,
        a: a.clone(),
    })
}

/// `ℬ`: a lattice basis of `ker A`, as columns.
pub fn kernel_gale(a: &IntMatrix) -> Result<IntMatrix> {
    if a.rows() == 0 || a.row(0).iter().any(|x| !x.is_one()) {
        return Err(Error::Invalid("first row of A must be all ones".into()));
    }
    if !linalg::all_invariant_factors_one(a) {
        return Err(Error::Invalid(
            "columns of A do not generate the full lattice".into(),
        ));
    }
    Ok(linalg::right_kernel_basis(a))
}

/// True when the rows of `x` and `y` generate the same lattice.
pub fn row_lattice_eq(x: &IntMatrix, y: &IntMatrix) -> bool {
    if x.cols() != y.cols() {
        return false;
    }
    let trim = |m: &IntMatrix| {
        linalg::hnf(m)
            .0
            .row_vecs()
            .into_iter()
            .filter(|r| r.iter().any(|v| !v.is_zero()))
            .collect::<Vec<_>>()
    };
    trim(x) == trim(y)
}

/// True when the rows of `x` and `y` span the same rational subspace.
pub fn row_span_eq(x: &IntMatrix, y: &IntMatrix) -> bool {
    if x.cols() != y.cols() {
        return false;
    }
    let r = linalg::rank(x);
    let stacked: Vec<Vec<Int>> = x.row_vecs().into_iter().chain(y.row_vecs()).collect();
    let both = IntMatrix::from_int_rows(stacked, x.cols()).expect("same width");
    r == linalg::rank(y) && r == linalg::rank(&both)
}

/// Checks every invariant of [`GaleData`] and reports each.
pub fn verify_exactness(g: &GaleData) -> Certificate {
    let mut cert = Certificate::new();
    let n = g.b.rows();
    let is_zero = |r: Result<IntMatrix>| r.map(|m| m.is_zero()).unwrap_or(false);

    cert.check("A·B = 0", is_zero(g.a.mul(&g.b)));
    cert.check("A·Bsat = 0", is_zero(g.a.mul(&g.bsat)));
    cert.check(
        "B = Bsat·C",
        g.bsat.mul(&g.c).map(|p| p == g.b).unwrap_or(false),
    );
    cert.check(
        "first row of A is all ones",
        g.a.rows() > 0 && g.a.row(0).iter().all(One::is_one),
    );
    cert.check(
        "columns of Bsat sum to zero",
        g.bsat.column_sums().iter().all(Zero::is_zero),
    );
    cert.check(
        "SNF(A) has all invariant factors 1",
        linalg::all_invariant_factors_one(&g.a),
    );
    cert.check(
        "SNF(Bsat) has all invariant factors 1",
        linalg::all_invariant_factors_one(&g.bsat),
    );
    let k = g.a.rows();
    let rank_bsat = linalg::rank(&g.bsat);
    cert.check_with(
        "rank(Bsat) = n - k",
        k <= n && rank_bsat == n - k && g.bsat.cols() == rank_bsat,
        format!("rank {rank_bsat}, n = {n}, k = {k}"),
    );
    cert.check(
        "rank additivity: rank(A) + rank(Bsat) = n",
        linalg::rank(&g.a) + rank_bsat == n,
    );
    cert
}

/// Checks `Psi(u) = d ∘ (Psi~(C u))^C` where `Psi~` is the Horn map of
/// `Bsat` with unit coefficients.
pub fn horn_factorization_holds(g: &GaleData, h: &HornMap, u: &[Rat]) -> Result<bool> {
    if h.b() != &g.b {
        return Err(Error::Invalid(
            "Horn map and Gale data use different B".into(),
        ));
    }
    let inner = HornMap::new(vec![Rat::one(); g.bsat.cols()], g.bsat.clone())?;
    let w = monomial::linear_apply(&g.c, u)?;
    let lifted = monomial::monomial_apply(&g.c, &inner.eval(&w)?)?;
    let rhs = monomial::hadamard(h.d(), &lifted)?;
    Ok(h.eval(u)? == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::rat_vec;

    #[test]
    fn rank_one_example() {
        let g = gale_from_B(&IntMatrix::from_rows(&[[1], [-1]])).unwrap();
        assert_eq!(g.bsat, IntMatrix::from_rows(&[[1], [-1]]));
        assert_eq!(g.c, IntMatrix::from_rows(&[[1]]));
        assert_eq!(g.a, IntMatrix::from_rows(&[[1, 1]]));
        assert!(verify_exactness(&g).passed());
    }

    #[test]
    fn repeated_column_example() {
        let g = gale_from_B(&IntMatrix::from_rows(&[[1, 1], [1, 1], [-2, -2]])).unwrap();
        assert_eq!(g.bsat, IntMatrix::from_rows(&[[1], [1], [-2]]));
        assert_eq!(g.c, IntMatrix::from_rows(&[[1, 1]]));
        assert_eq!(g.a.row(0), &[Int::one(), Int::one(), Int::one()][..]);
        assert!(verify_exactness(&g).passed());
    }

    #[test]
    fn independence_configuration() {
        let g = gale_from_B(&fixtures::independence_b()).unwrap();
        assert_eq!(g.k(), 2);
        assert!(verify_exactness(&g).passed(), "{:?}", verify_exactness(&g));
        assert!(row_span_eq(&g.a, &fixtures::independence_a()));
        assert_eq!(g.a, fixtures::independence_a());

        let h = fixtures::independence_map();
        assert!(horn_factorization_holds(&g, &h, &rat_vec(&[4, 2, 3, 1])).unwrap());
    }

    #[test]
    fn independence_pair_passes() {
        let g = gale_from_pair(&fixtures::independence_a(), &fixtures::independence_b()).unwrap();
        assert!(verify_exactness(&g).passed());
    }

    #[test]
    fn dropped_row_of_c_fails() {
        let mut g = gale_from_B(&fixtures::independence_b()).unwrap();
        let keep: Vec<usize> = (0..g.c.rows() - 1).collect();
        g.c = g.c.select_rows(&keep);
        let cert = verify_exactness(&g);
        assert!(!cert.get("B = Bsat·C").unwrap().passed);
    }

    #[test]
    fn kernel_gale_examples() {
        assert_eq!(
            kernel_gale(&IntMatrix::from_rows(&[[1, 1]])).unwrap(),
            IntMatrix::from_rows(&[[1], [-1]])
        );
        let a = fixtures::independence_a();
        let k = kernel_gale(&a).unwrap();
        assert_eq!((k.rows(), k.cols()), (5, 3));
        assert!(a.mul(&k).unwrap().is_zero());
        assert_eq!(
            kernel_gale(&IntMatrix::from_rows(&[[1]])).unwrap().cols(),
            0
        );
        assert!(kernel_gale(&IntMatrix::from_rows(&[[1, 2]])).is_err());
        assert!(kernel_gale(&IntMatrix::from_rows(&[[1, 1, 1], [0, 2, 4]])).is_err());
    }

    #[test]
    fn invalid_b() {
        assert!(gale_from_B(&IntMatrix::from_rows(&[[1], [1]])).is_err());
        assert!(gale_from_B(&IntMatrix::zeros(2, 2)).is_err());
    }
}
