//! Seeded sampling helpers shared by the certificate routines and the tests.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{Int, IntMatrix, Rat, RatVector};

/// Seed used by every randomized test in this workspace.
pub const TEST_SEED: u64 = 20_130_717;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn int_vector(rng: &mut impl Rng, len: usize, lo: i64, hi: i64) -> Vec<i64> {
    (0..len).map(|_| rng.random_range(lo..=hi)).collect()
}

pub fn int_matrix(rng: &mut impl Rng, rows: usize, cols: usize, lo: i64, hi: i64) -> IntMatrix {
    let e = int_vector(rng, rows * cols, lo, hi);
    IntMatrix::new(rows, cols, e.into_iter().map(Int::from).collect()).expect("shape")
}

/// A random `rows x cols` matrix with entries in `[-bound, bound]` whose
/// columns each sum to zero. Columns are drawn by rejection: the first
/// `rows - 1` entries are uniform and the last one balances the sum.
pub fn zero_colsum_matrix(rng: &mut impl Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    assert!(rows >= 2, "need at least two rows to balance a column");
    let mut m = IntMatrix::zeros(rows, cols);
    for j in 0..cols {
        loop {
            let head = int_vector(rng, rows - 1, -bound, bound);
            let last = -head.iter().sum::<i64>();
            if last.abs() <= bound {
                for (i, v) in head.iter().chain(std::iter::once(&last)).enumerate() {
                    m[(i, j)] = Int::from(*v);
                }
                break;
            }
        }
    }
    m
}

/// Nonzero rational with numerator in `[-bound, bound]` and denominator in `[1, bound]`.
pub fn nonzero_rat(rng: &mut impl Rng, bound: i64) -> Rat {
    loop {
        let n: i64 = rng.random_range(-bound..=bound);
        if n != 0 {
            let d: i64 = rng.random_range(1..=bound);
            return Rat::new(Int::from(n), Int::from(d));
        }
    }
}

pub fn nonzero_rat_vector(rng: &mut impl Rng, len: usize, bound: i64) -> RatVector {
    (0..len).map(|_| nonzero_rat(rng, bound)).collect()
}

/// Integer-valued rational vector with entries in `[lo, hi]`, not all zero.
pub fn rat_int_vector(rng: &mut impl Rng, len: usize, lo: i64, hi: i64) -> RatVector {
    loop {
        let v = int_vector(rng, len, lo, hi);
        if v.iter().any(|&x| x != 0) || len == 0 {
            return v
                .into_iter()
                .map(|x| Rat::from_integer(Int::from(x)))
                .collect();
        }
    }
}

pub fn is_zero_vec(v: &[Rat]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// A valid Horn map with `n` rows and `m` columns: `B` has entries in
/// `[-bound, bound]` and zero column sums, `d` has nonzero entries.
pub fn horn_map(rng: &mut impl Rng, m: usize, n: usize, bound: i64) -> crate::horn::HornMap {
    let b = zero_colsum_matrix(rng, n, m, bound);
    let d = nonzero_rat_vector(rng, m, 9);
    crate::horn::HornMap::new(d, b).expect("zero column sums by construction")
}

/// A `rows x cols` integer matrix of rank `rows` (requires `rows <= cols`).
pub fn full_row_rank_matrix(
    rng: &mut impl Rng,
    rows: usize,
    cols: usize,
    lo: i64,
    hi: i64,
) -> IntMatrix {
    assert!(rows <= cols, "rank cannot exceed the number of columns");
    loop {
        let c = int_matrix(rng, rows, cols, lo, hi);
        if crate::linalg::rank(&c) == rows {
            return c;
        }
    }
}
