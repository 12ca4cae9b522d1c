//! Exact integer and rational linear algebra.
//!
//! Everything here works over `Int` (arbitrary precision) and `Rat`, and
//! every lattice routine is built on two normal forms: the row-echelon
//! Hermite normal form and the Smith normal form. Kernels and saturations
//! are read off from the unimodular transforms those produce, so their
//! outputs are lattice bases (not merely rational bases).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;
pub type RatVector = Vec<Rat>;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_int(v: impl Into<Int>) -> Rat {
    Rat::from_integer(v.into())
}

pub fn rat_vec(v: &[i64]) -> RatVector {
    v.iter().map(|&x| rat_int(x)).collect()
}

/// Parses `"num/den"` or `"num"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: Int = n
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    let d: Int = d
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(n, d))
}

pub fn format_rat(r: &Rat) -> String {
    r.to_string()
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Int>,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<String>,
}

impl TryFrom<MatrixJson> for IntMatrix {
    type Error = Error;

    fn try_from(m: MatrixJson) -> Result<Self> {
        let entries = m
            .entries
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<Int>()
                    .map_err(|_| Error::Parse(format!("bad integer {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        IntMatrix::new(m.rows, m.cols, entries)
    }
}

impl From<IntMatrix> for MatrixJson {
    fn from(m: IntMatrix) -> Self {
        MatrixJson {
            rows: m.rows,
            cols: m.cols,
            entries: m.entries.iter().map(|e| e.to_string()).collect(),
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Int>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    /// Builds a matrix from small integer rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            entries.extend(r.as_ref().iter().map(|&x| Int::from(x)));
        }
        Self {
            rows: rows.len(),
            cols,
            entries,
        }
    }

    /// Builds a matrix with `cols` columns from rows of big integers.
    pub fn from_int_rows(rows: Vec<Vec<Int>>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::Shape("ragged rows".into()));
            }
            entries.extend(r);
        }
        Self::new(n, cols, entries)
    }

    pub fn column_vector(v: &[Int]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            entries: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Int] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Exact product with a rational column vector.
    pub fn mul_rat_vec(&self, v: &[Rat]) -> Result<RatVector> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "vector of length {} for a matrix with {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(Rat::zero(), |acc, (a, x)| acc + x * a)
            })
            .collect())
    }

    pub fn column_sums(&self) -> Vec<Int> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| &self[(i, j)]).sum())
            .collect()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            entries.extend_from_slice(self.row(i));
        }
        Self {
            rows: idx.len(),
            cols: self.cols,
            entries,
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                out[(i, jj)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn is_row_zero(&self, i: usize) -> bool {
        self.row(i).iter().all(Zero::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] -= q * row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = self[(src, j)].clone();
            if !s.is_zero() {
                self[(dst, j)] -= q * s;
            }
        }
    }

    /// col[dst] -= q * col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = self[(i, src)].clone();
            if !s.is_zero() {
                self[(i, dst)] -= q * s;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self[(i, j)]);
            self[(i, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = Int;

    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.entries[i * self.cols + j]
    }
}

/// Row-style Hermite normal form: returns `(H, U)` with `H = U·M`, `U`
/// unimodular, `H` in row echelon form with positive pivots, entries above
/// each pivot reduced into `[0, pivot)`, zero rows at the bottom.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut pr = 0;
    for c in 0..m.cols {
        if pr == m.rows {
            break;
        }
        loop {
            // smallest nonzero |entry| at or below the pivot row
            let best = (pr..m.rows)
                .filter(|&i| !h[(i, c)].is_zero())
                .min_by(|&a, &b| h[(a, c)].abs().cmp(&h[(b, c)].abs()));
            let Some(best) = best else { break };
            h.swap_rows(pr, best);
            u.swap_rows(pr, best);
            let mut clean = true;
            for i in pr + 1..m.rows {
                if h[(i, c)].is_zero() {
                    continue;
                }
                let q = h[(i, c)].div_floor(&h[(pr, c)]);
                h.row_axpy(i, pr, &q);
                u.row_axpy(i, pr, &q);
                if !h[(i, c)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h[(pr, c)].is_zero() {
            continue;
        }
        if h[(pr, c)].is_negative() {
            h.negate_row(pr);
            u.negate_row(pr);
        }
        for i in 0..pr {
            let q = h[(i, c)].div_floor(&h[(pr, c)]);
            h.row_axpy(i, pr, &q);
            u.row_axpy(i, pr, &q);
        }
        pr += 1;
    }
    (h, u)
}

/// Smith normal form: returns `(S, U, V)` with `S = U·M·V`, `U` and `V`
/// unimodular, `S` diagonal with non-negative entries `s1 | s2 | ...`.
pub fn snf(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut s = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let n = m.rows.min(m.cols);
    let mut t = 0;
    while t < n {
        // pivot: smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m.rows {
            for j in t..m.cols {
                if s[(i, j)].is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| s[(i, j)].abs() < s[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..m.rows {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let q = s[(i, t)].div_floor(&s[(t, t)]);
                s.row_axpy(i, t, &q);
                u.row_axpy(i, t, &q);
                if !s[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..m.cols {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let q = s[(t, j)].div_floor(&s[(t, t)]);
                s.col_axpy(j, t, &q);
                v.col_axpy(j, t, &q);
                if !s[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // move the smallest remaining entry of row/column t to the pivot
                let mut best = (t, t);
                for i in t + 1..m.rows {
                    if !s[(i, t)].is_zero() && s[(i, t)].abs() < s[best].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..m.cols {
                    if !s[(t, j)].is_zero() && s[(t, j)].abs() < s[best].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    s.swap_rows(t, best.0);
                    u.swap_rows(t, best.0);
                } else if best.1 != t {
                    s.swap_cols(t, best.1);
                    v.swap_cols(t, best.1);
                }
                continue;
            }
            // divisibility: fold an offending row into row t and go again
            let piv = s[(t, t)].clone();
            let offender =
                (t + 1..m.rows).find(|&i| (t + 1..m.cols).any(|j| !s[(i, j)].is_multiple_of(&piv)));
            match offender {
                Some(i) => {
                    let minus_one = -Int::one();
                    s.row_axpy(t, i, &minus_one);
                    u.row_axpy(t, i, &minus_one);
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    (s, u, v)
}

/// Diagonal of a Smith form, including zeros up to `min(rows, cols)`.
pub fn invariant_factors(m: &IntMatrix) -> Vec<Int> {
    let (s, _, _) = snf(m);
    (0..m.rows.min(m.cols)).map(|i| s[(i, i)].clone()).collect()
}

/// True when the columns of `m` span a saturated lattice of rank
/// `min(rows, cols)`, i.e. every invariant factor is one.
pub fn all_invariant_factors_one(m: &IntMatrix) -> bool {
    invariant_factors(m).iter().all(One::is_one)
}

/// Fraction-free (Bareiss) determinant.
pub fn det_bareiss(m: &IntMatrix) -> Result<Int> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(Int::one());
    }
    let mut a = m.clone();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(i) => {
                    a.swap_rows(k, i);
                    sign = -sign;
                }
                None => return Ok(Int::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[(k, k)] * &a[(i, j)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                a[(i, j)] = v;
            }
        }
        prev = a[(k, k)].clone();
    }
    Ok(sign * &a[(n - 1, n - 1)])
}

/// Rank via fraction-free elimination.
pub fn rank(m: &IntMatrix) -> usize {
    let mut a = m.clone();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(p) = (r..m.rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(r, p);
        for i in r + 1..m.rows {
            if a[(i, c)].is_zero() {
                continue;
            }
            let (piv, lead) = (a[(r, c)].clone(), a[(i, c)].clone());
            let g = piv.gcd(&lead);
            let (fp, fl) = (&piv / &g, &lead / &g);
            for j in c..m.cols {
                let v = &fp * &a[(i, j)] - &fl * &a[(r, j)];
                a[(i, j)] = v;
            }
        }
        r += 1;
    }
    r
}

/// Solves `M·x = b` exactly over the rationals. Returns `None` when the
/// system is inconsistent; free variables are set to zero.
pub fn solve_exact(m: &IntMatrix, b: &[Rat]) -> Option<RatVector> {
    if b.len() != m.rows {
        return None;
    }
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<Vec<Rat>> = (0..rows)
        .map(|i| {
            let mut r: Vec<Rat> = m
                .row(i)
                .iter()
                .map(|e| Rat::from_integer(e.clone()))
                .collect();
            r.push(b[i].clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            let pivot_row = a[r].clone();
            for (x, p) in a[i][c..].iter_mut().zip(&pivot_row[c..]) {
                *x -= p * &f;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Rat::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = a[i][cols].clone();
    }
    Some(x)
}

/// Inverse of a unimodular matrix.
pub fn inverse_unimodular(m: &IntMatrix) -> Result<IntMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    let mut out = IntMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![Rat::zero(); n];
        e[j] = Rat::one();
        let x = solve_exact(m, &e).ok_or_else(|| Error::Invalid("singular matrix".into()))?;
        for (i, xi) in x.into_iter().enumerate() {
            if !xi.is_integer() {
                return Err(Error::Invalid("matrix is not unimodular".into()));
            }
            out[(i, j)] = xi.to_integer();
        }
    }
    Ok(out)
}

fn nonzero_prefix_rows(h: &IntMatrix) -> usize {
    (0..h.rows).take_while(|&i| !h.is_row_zero(i)).count()
}

/// Columns form a basis of the lattice `ker(M) ∩ Z^cols`, normalized so
/// that the transpose is in Hermite normal form.
pub fn right_kernel_basis(m: &IntMatrix) -> IntMatrix {
    let (h, u) = hnf(&m.transpose());
    let r = nonzero_prefix_rows(&h);
    let kernel_rows = u.select_rows(&(r..u.rows).collect::<Vec<_>>());
    hnf(&kernel_rows).0.transpose()
}

/// Rows form a basis of the lattice `{x : x·M = 0}`.
pub fn left_kernel_basis(m: &IntMatrix) -> IntMatrix {
    right_kernel_basis(&m.transpose()).transpose()
}

/// Returns `(Bsat, C)` where the columns of `Bsat` are a basis of the
/// saturation of the column span of `M` and `M = Bsat·C`.
pub fn saturate_column_span(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (s, u, _) = snf(m);
    let r = (0..m.rows.min(m.cols))
        .take_while(|&i| !s[(i, i)].is_zero())
        .count();
    let u_inv = inverse_unimodular(&u).expect("SNF transform is unimodular");
    let raw = u_inv.select_cols(&(0..r).collect::<Vec<_>>());
    // canonical representative of the same lattice
    let bsat = hnf(&raw.transpose()).0.transpose();
    let mut c = IntMatrix::zeros(r, m.cols);
    for j in 0..m.cols {
        let col: Vec<Rat> = m.col(j).into_iter().map(Rat::from_integer).collect();
        let x = solve_exact(&bsat, &col).expect("column lies in its own saturation");
        for (i, xi) in x.into_iter().enumerate() {
            debug_assert!(xi.is_integer());
            c[(i, j)] = xi.to_integer();
        }
    }
    (bsat, c)
}

/// Changes the lattice basis given by the columns of `L` so that its first
/// element is the primitive lattice vector `w`.
pub fn extend_primitive_to_basis(l: &IntMatrix, w: &[Int]) -> Result<IntMatrix> {
    if w.len() != l.rows {
        return Err(Error::Shape(format!(
            "vector of length {} for a basis of {}-vectors",
            w.len(),
            l.rows
        )));
    }
    let target: Vec<Rat> = w.iter().cloned().map(Rat::from_integer).collect();
    let coeffs = solve_exact(l, &target).ok_or(Error::NotInSpan)?;
    if coeffs.iter().any(|c| !c.is_integer()) {
        return Err(Error::NotInSpan);
    }
    let coeffs: Vec<Int> = coeffs.into_iter().map(|c| c.to_integer()).collect();
    // the solution is unique because L has full column rank
    let g = coeffs.iter().fold(Int::zero(), |g, c| g.gcd(c));
    if !g.is_one() {
        return Err(Error::NotPrimitive(g));
    }
    let (_, v) = hnf(&IntMatrix::column_vector(&coeffs));
    let v_inv = inverse_unimodular(&v)?;
    l.mul(&v_inv)
}
