//! Named matrices and maps used throughout the crate, its tests and the CLI.

use crate::horn::HornMap;
use crate::linalg::{rat_vec, IntMatrix};

/// Exponent matrix of the 2x2 independence estimator. Rows are the linear
/// forms `u0+, u1+, u++, u+0, u+1` (the `u++` row carries exponent -2).
pub fn independence_b() -> IntMatrix {
    IntMatrix::from_rows(&[
        [1, 1, 0, 0],
        [0, 0, 1, 1],
        [-2, -2, -2, -2],
        [1, 0, 1, 0],
        [0, 1, 0, 1],
    ])
}

/// Point configuration Gale dual to `independence_b`, in the normalized
/// form returned by `gale::gale_from_B`.
pub fn independence_a() -> IntMatrix {
    IntMatrix::from_rows(&[[1, 1, 1, 1, 1], [0, 0, 1, 2, 2]])
}

pub fn independence_map() -> HornMap {
    HornMap::new(rat_vec(&[4, 4, 4, 4]), independence_b()).expect("valid fixture")
}

/// The complete model on two outcomes: `u -> (u1/(u1+u2), u2/(u1+u2))`.
/// The last row contributes `(-(u1+u2))^-1`, hence `d = (-1, -1)`.
pub fn line_map() -> HornMap {
    HornMap::new(
        rat_vec(&[-1, -1]),
        IntMatrix::from_rows(&[[1, 0], [0, 1], [-1, -1]]),
    )
    .expect("valid fixture")
}

/// Parametrizes the parabola `p1 = (p2 + 1)^2`.
pub fn parabola_map() -> HornMap {
    HornMap::new(
        rat_vec(&[1, 1]),
        IntMatrix::from_rows(&[[2, 0], [0, 1], [-2, -1]]),
    )
    .expect("valid fixture")
}

/// Constant map onto the point `p`, presented with rows `(1..1), (-1..-1)`.
pub fn constant_map_two_rows(p: &[crate::linalg::Rat]) -> HornMap {
    let m = p.len();
    let d = p.iter().map(|x| -x.clone()).collect();
    let b = IntMatrix::from_rows(&[vec![1; m], vec![-1; m]]);
    HornMap::new(d, b).expect("valid fixture")
}

/// The same constant map presented with rows `(1..1), (2..2), (-3..-3)`
/// and `d = -(27/4) p`.
pub fn constant_map_three_rows(p: &[crate::linalg::Rat]) -> HornMap {
    let m = p.len();
    let scale = -crate::linalg::rat(27, 4);
    let d = p.iter().map(|x| x * &scale).collect();
    let b = IntMatrix::from_rows(&[vec![1; m], vec![2; m], vec![-3; m]]);
    HornMap::new(d, b).expect("valid fixture")
}

/// Quadratic family `q1 + q2 t + q3 t^2`.
pub fn quadratic_a() -> IntMatrix {
    IntMatrix::from_rows(&[[1, 1, 1], [0, 1, 2]])
}

/// Cubic family `q1 + q2 t + q3 t^2 + q4 t^3`.
pub fn cubic_a() -> IntMatrix {
    IntMatrix::from_rows(&[[1, 1, 1, 1], [0, 1, 2, 3]])
}
