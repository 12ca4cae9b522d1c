//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vector under graded
//! lexicographic order, so equality, hashing and serialization are
//! canonical. Resultants are Bareiss determinants of Sylvester matrices
//! whose entries are themselves polynomials; the exact division that
//! Bareiss needs is ordinary multivariate division by a leading term.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{format_rat, parse_rat, Int, Rat};

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        Self::term(nvars, Monomial::one(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    /// The variable `x_i` in a ring of `nvars` variables.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::term(nvars, Monomial(e), Rat::one())
    }

    pub fn term(nvars: usize, exps: Monomial, c: Rat) -> Self {
        assert_eq!(exps.0.len(), nvars, "exponent vector length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Self { nvars, terms }
    }

    /// Collects terms, merging repeated exponent vectors.
    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, Rat)>,
    ) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Shape(format!(
                    "exponent vector of length {} in a ring of {nvars} variables",
                    e.len()
                )));
            }
            p.add_term(Monomial(e), c);
        }
        Ok(p)
    }

    /// Linear form `sum c_i x_i`.
    pub fn linear(coeffs: &[Rat]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(Monomial(e), c.clone());
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rat {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, x)| (k.mul(m), x * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn check_same_ring(&self, other: &Self) {
        assert_eq!(
            self.nvars, other.nvars,
            "polynomials live in different rings"
        );
    }

    pub fn eval(&self, point: &[Rat]) -> Result<Rat> {
        if point.len() != self.nvars {
            return Err(Error::Shape(format!(
                "point of length {} for a polynomial in {} variables",
                point.len(),
                self.nvars
            )));
        }
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= x.pow(e as i32);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Formal partial derivative with respect to `x_var`.
    pub fn partial(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[var] -= 1;
            out.add_term(m2, c * Rat::from_integer(Int::from(e)));
        }
        out
    }

    /// Substitutes `images[i]` for `x_i`; all images must share one ring.
    pub fn compose(&self, images: &[MultiPoly]) -> Result<MultiPoly> {
        if images.len() != self.nvars {
            return Err(Error::Shape(format!(
                "{} images for {} variables",
                images.len(),
                self.nvars
            )));
        }
        let target = images.first().map_or(0, |p| p.nvars);
        if images.iter().any(|p| p.nvars != target) {
            return Err(Error::Shape("images live in different rings".into()));
        }
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(target, c.clone());
            for (img, &e) in images.iter().zip(&m.0) {
                if e > 0 {
                    t = &t * &img.pow(e);
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Coefficients as polynomials in the other variables, indexed by the
    /// power of `x_var`.
    pub fn coefficients_in(&self, var: usize) -> Vec<MultiPoly> {
        let deg = self.degree_in(var).unwrap_or(0) as usize;
        let mut out = vec![MultiPoly::zero(self.nvars); deg + 1];
        for (m, c) in &self.terms {
            let k = m.0[var] as usize;
            let mut m2 = m.clone();
            m2.0[var] = 0;
            out[k].add_term(m2, c.clone());
        }
        out
    }

    /// Exact quotient `self / d`; fails when `d` does not divide `self`.
    pub fn div_exact(&self, d: &MultiPoly) -> Result<MultiPoly> {
        self.check_same_ring(d);
        let (lm_d, lc_d) = d.leading_term().ok_or(Error::InexactDivision)?;
        let (lm_d, lc_d) = (lm_d.clone(), lc_d.clone());
        let mut rem = self.clone();
        let mut q = MultiPoly::zero(self.nvars);
        while let Some((lm, lc)) = rem.leading_term() {
            if !lm_d.divides(lm) {
                return Err(Error::InexactDivision);
            }
            let m = lm.div(&lm_d);
            let c = lc / &lc_d;
            for (dm, dc) in &d.terms {
                rem.add_term(dm.mul(&m), -(dc * &c));
            }
            q.add_term(m, c);
        }
        Ok(q)
    }

    /// Componentwise minimum exponent over all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one(self.nvars);
        };
        let mut g = first.0.clone();
        for m in it {
            for (a, &b) in g.iter_mut().zip(&m.0) {
                *a = (*a).min(b);
            }
        }
        Monomial(g)
    }

    pub fn strip_monomial_content(&self) -> MultiPoly {
        let g = self.monomial_content();
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.div(&g), c.clone()))
                .collect(),
        }
    }

    /// Scales to integer coefficients with gcd one, keeping the sign of
    /// every coefficient.
    pub fn primitive(&self) -> MultiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let lcm = self
            .terms
            .values()
            .fold(Int::one(), |l, c| l.lcm(c.denom()));
        let g = self
            .terms
            .values()
            .fold(Int::zero(), |g, c| g.gcd(&(c.numer() * (&lcm / c.denom()))));
        self.scale(&Rat::new(lcm, g))
    }

    /// Variables that occur with positive exponent.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    /// Dense coefficients in `x_var`, lowest power first. Fails if any
    /// other variable occurs.
    pub fn to_dense(&self, var: usize) -> Result<Vec<Rat>> {
        if self.support_vars().iter().any(|&v| v != var) {
            return Err(Error::NotUnivariate);
        }
        let deg = self.degree_in(var).unwrap_or(0) as usize;
        let mut out = vec![Rat::zero(); if self.is_zero() { 0 } else { deg + 1 }];
        for (m, c) in &self.terms {
            out[m.0[var] as usize] = c.clone();
        }
        Ok(out)
    }

    pub fn from_dense(nvars: usize, var: usize, coeffs: &[Rat]) -> MultiPoly {
        let mut p = MultiPoly::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; nvars];
            e[var] = k as u32;
            p.add_term(Monomial(e), c.clone());
        }
        p
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }

    pub fn default_names(nvars: usize) -> Vec<String> {
        (1..=nvars).map(|i| format!("x{i}")).collect()
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_same_ring(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_same_ring(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_same_ring(rhs);
        let mut out = MultiPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $f(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a MultiPoly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> =
                m.0.iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        if e == 1 {
                            self.names[i].clone()
                        } else {
                            format!("{}^{}", self.names[i], e)
                        }
                    })
                    .collect();
            if vars.is_empty() {
                write!(f, "{}", format_rat(&a))?;
            } else {
                if !a.is_one() {
                    write!(f, "{}*", format_rat(&a))?;
                }
                write!(f, "{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = MultiPoly::default_names(self.nvars);
        write!(f, "{}", self.display_with(&names))
    }
}

// ---- univariate machinery on dense coefficient vectors (lowest power first)

fn trim(mut v: Vec<Rat>) -> Vec<Rat> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn dense_rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let f = r.last().unwrap() / lb;
        for (i, bi) in b.iter().enumerate() {
            let v = bi * &f;
            r[shift + i] -= v;
        }
        r = trim(r);
    }
    r
}

fn dense_div(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    if r.len() <= db {
        return Vec::new();
    }
    let mut q = vec![Rat::zero(); r.len() - db];
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let f = r.last().unwrap() / &b[db];
        for (i, bi) in b.iter().enumerate() {
            let v = bi * &f;
            r[shift + i] -= v;
        }
        q[shift] = f;
        r = trim(r);
    }
    q
}

fn monic(v: Vec<Rat>) -> Vec<Rat> {
    match v.last().cloned() {
        Some(l) => v.into_iter().map(|c| c / &l).collect(),
        None => v,
    }
}

fn dense_gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = dense_rem(&a, &b);
        a = b;
        b = r;
    }
    monic(a)
}

fn dense_derivative(a: &[Rat]) -> Vec<Rat> {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * Rat::from_integer(Int::from(k)))
        .collect()
}

fn common_univariate_var(a: &MultiPoly, b: &MultiPoly) -> Result<usize> {
    let mut vars = a.support_vars();
    vars.extend(b.support_vars());
    vars.sort_unstable();
    vars.dedup();
    match vars.len() {
        0 => Ok(0),
        1 => Ok(vars[0]),
        _ => Err(Error::NotUnivariate),
    }
}

/// Monic gcd of two polynomials in which only one (shared) variable occurs.
pub fn gcd_univariate(a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly> {
    a.check_same_ring(b);
    let var = common_univariate_var(a, b)?;
    let g = dense_gcd(&a.to_dense(var)?, &b.to_dense(var)?);
    Ok(MultiPoly::from_dense(a.nvars, var, &g))
}

/// `a / gcd(a, a')`, made monic.
pub fn squarefree_part(a: &MultiPoly) -> Result<MultiPoly> {
    let var = common_univariate_var(a, a)?;
    let d = a.to_dense(var)?;
    if d.is_empty() {
        return Ok(a.clone());
    }
    let g = dense_gcd(&d, &dense_derivative(&d));
    let q = if g.is_empty() { d } else { dense_div(&d, &g) };
    Ok(MultiPoly::from_dense(a.nvars, var, &monic(q)))
}

/// Fraction-free determinant of a square matrix of polynomials.
pub fn det_bareiss_poly(mut a: Vec<Vec<MultiPoly>>, nvars: usize) -> Result<MultiPoly> {
    let n = a.len();
    if n == 0 {
        return Ok(MultiPoly::one(nvars));
    }
    let mut negate = false;
    let mut prev = MultiPoly::one(nvars);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            // prefer the sparsest available pivot
            let p = (k + 1..n)
                .filter(|&i| !a[i][k].is_zero())
                .min_by_key(|&i| a[i][k].num_terms());
            match p {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(MultiPoly::zero(nvars)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev)?;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if negate { -d } else { d })
}

/// Sylvester matrix of `a` and `b` with respect to `x_elim`: `deg b` shifted
/// rows of `a`'s coefficients followed by `deg a` shifted rows of `b`'s,
/// leading coefficients first.
pub fn sylvester_matrix(a: &MultiPoly, b: &MultiPoly, elim: usize) -> Result<Vec<Vec<MultiPoly>>> {
    a.check_same_ring(b);
    let ca = a.coefficients_in(elim);
    let cb = b.coefficients_in(elim);
    let (da, db) = (ca.len() - 1, cb.len() - 1);
    if a.is_zero() || da == 0 {
        return Err(Error::DegreeZero(elim));
    }
    if b.is_zero() || db == 0 {
        return Err(Error::DegreeZero(elim));
    }
    let size = da + db;
    let zero = MultiPoly::zero(a.nvars);
    let mut m = vec![vec![zero; size]; size];
    for i in 0..db {
        for (k, c) in ca.iter().rev().enumerate() {
            m[i][i + k] = c.clone();
        }
    }
    for i in 0..da {
        for (k, c) in cb.iter().rev().enumerate() {
            m[db + i][i + k] = c.clone();
        }
    }
    Ok(m)
}

/// `Res_{x_elim}(a, b)` as a polynomial in the remaining variables.
pub fn sylvester_resultant(a: &MultiPoly, b: &MultiPoly, elim: usize) -> Result<MultiPoly> {
    let m = sylvester_matrix(a, b, elim)?;
    det_bareiss_poly(m, a.nvars)
}

// ---- JSON and text formats

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub exps: Vec<u32>,
}

/// `{"vars": [...], "terms": [{"coeff": "num/den", "exps": [...]}, ...]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

impl PolyJson {
    /// Terms are written leading term first.
    pub fn from_poly(p: &MultiPoly, vars: &[String]) -> Self {
        assert_eq!(vars.len(), p.nvars, "one name per variable");
        PolyJson {
            vars: vars.to_vec(),
            terms: p
                .terms
                .iter()
                .rev()
                .map(|(m, c)| TermJson {
                    coeff: format_rat(c),
                    exps: m.0.clone(),
                })
                .collect(),
        }
    }

    pub fn to_poly(&self) -> Result<MultiPoly> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((t.exps.clone(), parse_rat(&t.coeff)?)))
            .collect::<Result<Vec<_>>>()?;
        MultiPoly::from_terms(self.vars.len(), terms)
    }
}

/// Parses an expression such as `p1^2 + p2^2 - 1` or `3/2*x*(y - 1)^2`
/// over the given variable names.
pub fn parse_poly(src: &str, vars: &[String]) -> Result<MultiPoly> {
    let mut p = Parser {
        s: src.as_bytes(),
        pos: 0,
        vars,
    };
    let out = p.sum()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {}", self.pos))
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<MultiPoly> {
        let n = self.vars.len();
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -self.product()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.product()?
            }
            _ => self.product()?,
        };
        debug_assert_eq!(acc.nvars, n);
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.product()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<MultiPoly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    if !d.is_constant() || d.is_zero() {
                        return Err(self.err("division only by nonzero constants"));
                    }
                    let c = d.coeff(&vec![0; self.vars.len()]);
                    acc = acc.scale(&c.recip());
                }
                // implicit multiplication: `2x`, `x(y+1)`
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.ws();
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let e: u32 = std::str::from_utf8(&self.s[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.err("expected a non-negative integer exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let n = self.vars.len();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.power()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let v: Int = std::str::from_utf8(&self.s[start..self.pos])
                    .unwrap()
                    .parse()
                    .map_err(|_| self.err("bad integer"))?;
                Ok(MultiPoly::constant(n, Rat::from_integer(v)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                let i = self
                    .vars
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable {name:?}")))?;
                Ok(MultiPoly::var(n, i))
            }
            _ => Err(self.err("expected a number, variable or '('")),
        }
    }
}
