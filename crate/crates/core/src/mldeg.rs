//! Maximum likelihood degree of plane curves in the 2-torus.
//!
//! For `X = {f = 0}` and data `u`, the critical points of
//! `u1 log p1 + u2 log p2` on the smooth part of `X` are the solutions of
//! `f = g = 0` with `g = u2 p1 df/dp1 - u1 p2 df/dp2`, away from the
//! coordinate axes and the singular points of `X`. We eliminate one
//! variable with a resultant, find the roots of the squarefree part
//! numerically, pair each root with the solutions of `f` in the other
//! variable, and keep pairs that pass residual, torus and smoothness
//! filters. Genericity of `u` is handled by repetition and a modal rule.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::cert::Certificate;
use crate::error::{Error, Result};
use crate::horn::{self, HornMap};
use crate::linalg::{Int, Rat};
use crate::poly::{self, MultiPoly};
use crate::random;

/// Residual accepted from the root finder (backward error).
pub const ROOT_TOL: f64 = 1e-10;
/// Pairing, torus and smoothness threshold.
pub const FILTER_TOL: f64 = 1e-6;
/// Residual required after Newton polishing.
pub const POLISH_TOL: f64 = 1e-8;
pub const DEFAULT_DRAWS: usize = 5;
/// Data vectors are drawn from `[1, U_MAX]^2`.
pub const U_MAX: i64 = 100;

/// A plane curve with a data vector.
#[derive(Debug, Clone)]
pub struct PlaneCurveProblem {
    pub f: MultiPoly,
    pub u: (i64, i64),
}

impl PlaneCurveProblem {
    pub fn new(f: MultiPoly, u: (i64, i64)) -> Result<Self> {
        validate_curve(&f)?;
        if u.0 == 0 || u.1 == 0 {
            return Err(Error::Invalid("data vector entries must be nonzero".into()));
        }
        Ok(Self { f, u })
    }

    pub fn critical_system(&self) -> (MultiPoly, MultiPoly) {
        critical_system(&self.f, self.u)
    }
}

/// Rejects constants, monomials and curves with a repeated component.
///
/// A repeated factor `h^2` has degree at least two in some variable `x`,
/// and then `Res_x(f, df/dx)` vanishes identically.
pub fn validate_curve(f: &MultiPoly) -> Result<()> {
    if f.nvars() != 2 {
        return Err(Error::Shape(format!(
            "plane curves live in 2 variables, got {}",
            f.nvars()
        )));
    }
    if f.is_constant() || f.is_monomial() {
        return Err(Error::Invalid(
            "the curve equation must not be a constant or a monomial".into(),
        ));
    }
    for var in 0..2 {
        if f.degree_in(var).unwrap_or(0) >= 2
            && poly::sylvester_resultant(f, &f.partial(var), var)?.is_zero()
        {
            return Err(Error::Invalid(
                "the curve equation has a repeated factor".into(),
            ));
        }
    }
    Ok(())
}

/// `(f, g)` with `g = u2 p1 df/dp1 - u1 p2 df/dp2`.
pub fn critical_system(f: &MultiPoly, u: (i64, i64)) -> (MultiPoly, MultiPoly) {
    let n = f.nvars();
    let c = |x: i64| Rat::from_integer(Int::from(x));
    let t1 = &MultiPoly::var(n, 0) * &f.partial(0);
    let t2 = &MultiPoly::var(n, 1) * &f.partial(1);
    let g = &t1.scale(&c(u.1)) - &t2.scale(&c(u.0));
    (f.clone(), g)
}

// ---- floating-point polynomial evaluation

fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A polynomial with `f64` coefficients for fast complex evaluation.
#[derive(Debug, Clone)]
struct FloatPoly {
    terms: Vec<(Vec<u32>, f64)>,
}

impl FloatPoly {
    fn new(p: &MultiPoly) -> Self {
        FloatPoly {
            terms: p.terms().map(|(m, c)| (m.0.clone(), to_f64(c))).collect(),
        }
    }

    /// Value and the backward-error scale `sum |c| |x^e|`.
    fn eval(&self, x: &[Complex64]) -> (Complex64, f64) {
        let mut v = Complex64::zero();
        let mut s = 0.0;
        for (e, c) in &self.terms {
            let mut m = Complex64::new(*c, 0.0);
            for (xi, &k) in x.iter().zip(e) {
                m *= xi.powu(k);
            }
            s += m.norm();
            v += m;
        }
        (v, s)
    }

    fn relative(&self, x: &[Complex64]) -> f64 {
        let (v, s) = self.eval(x);
        if s == 0.0 {
            0.0
        } else {
            v.norm() / s
        }
    }
}

// ---- univariate root finding

fn horner(a: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    let mut scale = 0.0;
    let r = z.norm();
    for c in a.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
        scale = scale * r + c.norm();
    }
    (p, dp, scale)
}

/// Backward-error residual `|a(z)| / sum |a_k| |z|^k`.
pub fn relative_residual(a: &[Complex64], z: Complex64) -> f64 {
    let (p, _, s) = horner(a, z);
    if s == 0.0 {
        0.0
    } else {
        p.norm() / s
    }
}

const ABERTH_MAX_ITER: usize = 2000;
const START_SEED: u64 = 0x0ABE_27A1;

/// All roots of `sum a_k z^k` (lowest power first) by Aberth–Ehrlich
/// simultaneous iteration from a deterministic start on a circle.
pub fn complex_roots(a: &[Complex64], tol: f64) -> Result<Vec<Complex64>> {
    let mut a = a.to_vec();
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    if a.is_empty() {
        return Err(Error::Invalid(
            "the zero polynomial has no isolated roots".into(),
        ));
    }
    let deg = a.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = a[deg];
    for c in &mut a {
        *c /= lead;
    }
    // zero roots are exact: divide them out
    let zeros = a.iter().take_while(|c| c.is_zero()).count();
    let b = &a[zeros..];
    let d = b.len() - 1;
    let mut roots = vec![Complex64::zero(); zeros];
    if d == 0 {
        return Ok(roots);
    }

    let radius = (0..d)
        .map(|k| b[k].norm().powf(1.0 / (d - k) as f64))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut rng = random::rng(START_SEED);
    let offset: f64 = rng.random_range(0.0..(2.0 * PI / d as f64));
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius, offset + 2.0 * PI * k as f64 / d as f64))
        .collect();

    let mut converged = vec![false; d];
    for _ in 0..ABERTH_MAX_ITER {
        let mut all = true;
        for i in 0..d {
            if converged[i] {
                continue;
            }
            let (p, dp, scale) = horner(b, z[i]);
            if p.norm() <= f64::EPSILON * scale {
                converged[i] = true;
                continue;
            }
            all = false;
            let ratio = p / dp;
            let s: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                if w.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(1e-300) {
                    converged[i] = true;
                }
            } else {
                // coincident iterates: nudge apart deterministically
                z[i] += Complex64::from_polar(radius * 1e-3, i as f64);
            }
        }
        if all {
            break;
        }
    }

    let worst = z
        .iter()
        .map(|&zi| relative_residual(b, zi))
        .fold(0.0, f64::max);
    if worst >= tol || !worst.is_finite() {
        return Err(Error::NoConvergence(format!(
            "root finder stopped with relative residual {worst:.3e} (tolerance {tol:.1e}) on a degree-{d} polynomial"
        )));
    }
    roots.extend(z);
    Ok(roots)
}

/// Exact univariate polynomial to `f64` coefficients, scaled so the
/// largest coefficient has modulus one before conversion.
fn dense_complex(p: &MultiPoly, var: usize) -> Result<Vec<Complex64>> {
    let d = p.to_dense(var)?;
    let big = d
        .iter()
        .map(|c| c.abs())
        .max()
        .filter(|m| !m.is_zero())
        .ok_or_else(|| Error::Invalid("zero polynomial".into()))?;
    Ok(d.iter()
        .map(|c| Complex64::new(to_f64(&(c / &big)), 0.0))
        .collect())
}

// ---- critical points

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    P1,
    P2,
}

impl Var {
    fn index(self) -> usize {
        match self {
            Var::P1 => 0,
            Var::P2 => 1,
        }
    }

    fn other(self) -> Var {
        match self {
            Var::P1 => Var::P2,
            Var::P2 => Var::P1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalPoint {
    pub p1: [f64; 2],
    pub p2: [f64; 2],
    pub residual_f: f64,
    pub residual_g: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DrawReport {
    pub u: [i64; 2],
    pub eliminated: Var,
    pub count: usize,
    pub solutions: Vec<CriticalPoint>,
}

#[derive(Debug, Clone, Copy)]
pub struct MlDegreeOptions {
    pub draws: usize,
    pub tol: f64,
    pub eliminate: Var,
}

impl Default for MlDegreeOptions {
    fn default() -> Self {
        Self {
            draws: DEFAULT_DRAWS,
            tol: FILTER_TOL,
            eliminate: Var::P2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MlDegreeReport {
    /// The modal count, or `None` when several draws were taken and no
    /// count occurs more than once.
    pub ml_degree: Option<usize>,
    pub agreeing_draws: usize,
    pub stable: bool,
    pub rule: String,
    pub draws: Vec<DrawReport>,
}

impl MlDegreeReport {
    /// Solutions of the first draw attaining the modal count.
    pub fn solutions(&self) -> &[CriticalPoint] {
        self.ml_degree
            .and_then(|n| self.draws.iter().find(|d| d.count == n))
            .map_or(&[], |d| &d.solutions)
    }
}

/// Newton's method on the square system `(f, g)`.
fn newton_polish(
    f: &FloatPoly,
    g: &FloatPoly,
    jac: &[FloatPoly; 4],
    mut x: [Complex64; 2],
) -> [Complex64; 2] {
    for _ in 0..8 {
        let (fv, _) = f.eval(&x);
        let (gv, _) = g.eval(&x);
        let [a, b, c, d] = [0, 1, 2, 3].map(|i| jac[i].eval(&x).0);
        let det = a * d - b * c;
        if det.norm() == 0.0 || !det.is_finite() {
            break;
        }
        let dx = (d * fv - b * gv) / det;
        let dy = (a * gv - c * fv) / det;
        x = [x[0] - dx, x[1] - dy];
        if f.relative(&x) < 1e-15 && g.relative(&x) < 1e-15 {
            break;
        }
    }
    x
}

/// Critical points for one data vector, eliminating `elim` first.
pub fn critical_points(
    f: &MultiPoly,
    u: (i64, i64),
    elim: Var,
    tol: f64,
) -> Result<Vec<CriticalPoint>> {
    // a curve that does not involve the chosen variable is eliminated the other way
    let elim = if f.degree_in(elim.index()).unwrap_or(0) == 0 {
        elim.other()
    } else {
        elim
    };
    let (e, k) = (elim.index(), elim.other().index());
    let (f, g) = critical_system(f, u);
    let res = poly::sylvester_resultant(&f, &g, e)?;
    if res.is_zero() {
        return Err(Error::Invalid(
            "the critical equations share a component; u is not generic".into(),
        ));
    }
    let reduced = poly::squarefree_part(&res.strip_monomial_content())?;
    let alphas = complex_roots(&dense_complex(&reduced, k)?, ROOT_TOL)?;

    let ff = FloatPoly::new(&f);
    let gf = FloatPoly::new(&g);
    let jac = [
        FloatPoly::new(&f.partial(0)),
        FloatPoly::new(&f.partial(1)),
        FloatPoly::new(&g.partial(0)),
        FloatPoly::new(&g.partial(1)),
    ];
    let p1f = FloatPoly::new(&(&MultiPoly::var(2, 0) * &f.partial(0)));
    let p2f = FloatPoly::new(&(&MultiPoly::var(2, 1) * &f.partial(1)));
    let coeffs: Vec<FloatPoly> = f.coefficients_in(e).iter().map(FloatPoly::new).collect();

    let max_alpha = alphas.iter().map(|a| a.norm()).fold(1.0, f64::max);
    let mut kept: Vec<[Complex64; 2]> = Vec::new();
    for &alpha in &alphas {
        if alpha.norm() < tol * max_alpha {
            continue;
        }
        let mut at = [Complex64::zero(); 2];
        at[k] = alpha;
        let mut h: Vec<Complex64> = coeffs.iter().map(|c| c.eval(&at).0).collect();
        let hmax = h.iter().map(|c| c.norm()).fold(0.0, f64::max);
        while h.last().is_some_and(|c| c.norm() <= 1e-12 * hmax) {
            h.pop();
        }
        if h.len() < 2 {
            continue;
        }
        let betas = match complex_roots(&h, ROOT_TOL) {
            Ok(b) => b,
            // a degenerate fiber contributes no simple solutions
            Err(Error::NoConvergence(_)) => complex_roots(&h, 1e-6)?,
            Err(err) => return Err(err),
        };
        for beta in betas {
            let mut x = [Complex64::zero(); 2];
            x[k] = alpha;
            x[e] = beta;
            if gf.relative(&x) >= tol {
                continue;
            }
            let x = newton_polish(&ff, &gf, &jac, x);
            let scale = x[0].norm().max(x[1].norm()).max(1.0);
            if x.iter().any(|c| c.norm() < tol * scale) {
                continue;
            }
            // smooth points: (p1 df/dp1, p2 df/dp2) is nonzero in the torus
            let (a1, s1) = p1f.eval(&x);
            let (a2, s2) = p2f.eval(&x);
            if a1.norm().max(a2.norm()) < tol * s1.max(s2).max(f64::MIN_POSITIVE) {
                continue;
            }
            if ff.relative(&x) >= POLISH_TOL || gf.relative(&x) >= POLISH_TOL {
                continue;
            }
            let dup = kept
                .iter()
                .any(|y| (y[0] - x[0]).norm().max((y[1] - x[1]).norm()) < tol * scale);
            if !dup {
                kept.push(x);
            }
        }
    }

    let mut out: Vec<CriticalPoint> = kept
        .into_iter()
        .map(|x| CriticalPoint {
            p1: [x[0].re, x[0].im],
            p2: [x[1].re, x[1].im],
            residual_f: ff.relative(&x),
            residual_g: gf.relative(&x),
        })
        .collect();
    out.sort_by(|a, b| {
        a.p1.partial_cmp(&b.p1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.p2.partial_cmp(&b.p2).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(out)
}

/// ML degree by the modal count over seeded random data vectors.
pub fn ml_degree_plane(f: &MultiPoly, seed: u64, opts: MlDegreeOptions) -> Result<MlDegreeReport> {
    validate_curve(f)?;
    let mut rng = random::rng(seed);
    let mut draws = Vec::with_capacity(opts.draws);
    for _ in 0..opts.draws {
        let u = (rng.random_range(1..=U_MAX), rng.random_range(1..=U_MAX));
        let solutions = critical_points(f, u, opts.eliminate, opts.tol)?;
        draws.push(DrawReport {
            u: [u.0, u.1],
            eliminated: if f.degree_in(opts.eliminate.index()).unwrap_or(0) == 0 {
                opts.eliminate.other()
            } else {
                opts.eliminate
            },
            count: solutions.len(),
            solutions,
        });
    }
    let mut tally: BTreeMap<usize, usize> = BTreeMap::new();
    for d in &draws {
        *tally.entry(d.count).or_default() += 1;
    }
    // most frequent count; ties go to the smaller count
    let (mode, freq) = tally
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(c, n)| (*c, *n))
        .unwrap_or((0, 0));
    let determinate = freq > 1 || opts.draws == 1;
    Ok(MlDegreeReport {
        ml_degree: determinate.then_some(mode),
        agreeing_draws: freq,
        stable: freq + 1 >= opts.draws,
        rule: format!(
            "modal count over {} random data vectors in [1, {U_MAX}]^2",
            opts.draws
        ),
        draws,
    })
}

/// Checks that a Horn map with `m = 2` parametrizes `{f = 0}` and lands on
/// the critical point exactly, and that the numeric ML degree is one.
pub fn mldeg_cross_check_horn(h: &HornMap, f: &MultiPoly, seed: u64) -> Result<Certificate> {
    if h.m() != 2 || f.nvars() != 2 {
        return Err(Error::Shape(
            "cross-check needs m = 2 and a plane curve".into(),
        ));
    }
    let mut rng = random::rng(seed);
    let mut on_curve = true;
    let mut critical = true;
    for _ in 0..20 {
        let u = horn::random_point_off_base_locus(&mut rng, &[h], 1, U_MAX)?;
        let p = h.eval(&u)?;
        on_curve &= f.eval(&p)?.is_zero();
        let ui = (u[0].to_integer().try_into(), u[1].to_integer().try_into());
        let (Ok(u1), Ok(u2)) = ui else {
            unreachable!("sampled data are small integers")
        };
        let (_, g) = critical_system(f, (u1, u2));
        critical &= g.eval(&p)?.is_zero();
    }
    if !on_curve {
        return Err(Error::Invalid(
            "the image of the Horn map is not contained in the curve".into(),
        ));
    }
    let report = ml_degree_plane(f, seed, MlDegreeOptions::default())?;
    let mut cert = Certificate::new();
    cert.check("image lies on the curve (exact, 20 data vectors)", on_curve);
    cert.check(
        "estimate solves the critical equations (exact, 20 data vectors)",
        critical,
    );
    cert.check_with(
        "numeric ML degree is one",
        report.ml_degree == Some(1),
        format!("{:?}", report.ml_degree),
    );
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::poly::parse_poly;

    fn curve(s: &str) -> MultiPoly {
        parse_poly(s, &["p1".to_string(), "p2".to_string()]).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_roots(found: Vec<Complex64>, want: &[Complex64]) {
        assert_eq!(found.len(), want.len());
        for w in want {
            assert!(
                found.iter().any(|z| (z - w).norm() < 1e-12),
                "{w} not in {found:?}"
            );
        }
    }

    #[test]
    fn critical_system_examples() {
        let (_, g) = critical_system(&curve("p1^2 + p2^2 - 1"), (3, 5));
        assert_eq!(g, curve("2*(5*p1^2 - 3*p2^2)"));
        let (_, g) = critical_system(&curve("p1 + p2 - 1"), (1, 1));
        assert_eq!(g, curve("p1 - p2"));
        let (_, g) = critical_system(&curve("p1 - (p2 + 1)^2"), (3, 5));
        assert_eq!(g, curve("5*p1 + 6*p2*(p2 + 1)"));
    }

    #[test]
    fn roots_of_small_polynomials() {
        let r = complex_roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], ROOT_TOL).unwrap();
        assert_roots(r, &[c(1.0, 0.0), c(-1.0, 0.0)]);
        let r = complex_roots(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], ROOT_TOL).unwrap();
        assert_roots(r, &[c(0.0, 1.0), c(0.0, -1.0)]);
        let r = complex_roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)], ROOT_TOL).unwrap();
        let s = 0.5f64.sqrt();
        assert_roots(r, &[c(s, 0.0), c(-s, 0.0)]);
        assert_eq!(
            complex_roots(&[c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)], ROOT_TOL)
                .unwrap()
                .len(),
            2
        );
    }

    #[test]
    fn circle_has_degree_four() {
        let r = ml_degree_plane(&curve("p1^2 + p2^2 - 1"), 7, MlDegreeOptions::default()).unwrap();
        assert_eq!(r.ml_degree, Some(4));
        assert_eq!(r.agreeing_draws, 5);
        // hand oracle: p1^2 = u1/(u1+u2)
        for d in &r.draws {
            let want = d.u[0] as f64 / (d.u[0] + d.u[1]) as f64;
            for s in &d.solutions {
                let p1 = Complex64::new(s.p1[0], s.p1[1]);
                assert!((p1 * p1 - want).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn degree_one_curves() {
        for f in ["p1 + p2 - 1", "p1 - (p2 + 1)^2"] {
            for elim in [Var::P1, Var::P2] {
                let opts = MlDegreeOptions {
                    eliminate: elim,
                    ..Default::default()
                };
                let r = ml_degree_plane(&curve(f), 7, opts).unwrap();
                assert_eq!(r.ml_degree, Some(1), "{f} eliminating {elim:?}");
            }
        }
    }

    #[test]
    fn line_solution_matches_hand_solve() {
        let pts = critical_points(&curve("p1 + p2 - 1"), (3, 7), Var::P2, FILTER_TOL).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0].p1[0] - 0.3).abs() < 1e-12 && (pts[0].p2[0] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(validate_curve(&curve("p1*p2")).is_err());
        assert!(validate_curve(&curve("(p1 + p2 - 1)^2")).is_err());
        assert!(validate_curve(&curve("(p1 - 2)^2*(p2 + 1)")).is_err());
        assert!(validate_curve(&curve("p1^2 + p2^2 - 1")).is_ok());
    }

    #[test]
    fn horn_cross_checks() {
        let line = mldeg_cross_check_horn(&fixtures::line_map(), &curve("p1 + p2 - 1"), 7).unwrap();
        assert!(line.passed(), "{line:?}");
        let parabola =
            mldeg_cross_check_horn(&fixtures::parabola_map(), &curve("p1 - (p2 + 1)^2"), 7)
                .unwrap();
        assert!(parabola.passed(), "{parabola:?}");
        assert!(
            mldeg_cross_check_horn(&fixtures::line_map(), &curve("p1^2 + p2^2 - 1"), 7).is_err()
        );
    }
}
