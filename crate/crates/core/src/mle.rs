//! Closed-form maximum likelihood estimation for models of ML degree one.
//!
//! A [`ModelSpec`] bundles a Horn map with the facts needed to certify its
//! output: whether the model lies in the probability simplex and which
//! polynomial equations cut it out. [`estimate`] evaluates the Horn map on
//! count data and certifies the result exactly; [`loglik_compare`] probes
//! maximality numerically against random points of the model.

use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cert::Certificate;
use crate::error::{Error, Result};
use crate::fixtures;
use crate::horn::{self, HornMap};
use crate::linalg::{Int, IntMatrix, Rat, RatVector};
use crate::poly::{parse_poly, MultiPoly, PolyJson};
use crate::random;

/// How [`loglik_compare`] draws competitors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Sampler {
    /// Products of independent row and column marginals of an
    /// `rows x cols` table, flattened row by row.
    Independence { rows: usize, cols: usize },
    /// Images of perturbed data vectors under the model's Horn map.
    #[default]
    Horn,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub name: String,
    pub map: HornMap,
    pub simplex: bool,
    pub vars: Vec<String>,
    pub equations: Vec<MultiPoly>,
    pub sampler: Sampler,
    /// Point configuration whose discriminant describes the model, if known.
    pub configuration: Option<IntMatrix>,
    pub discriminant: Option<MultiPoly>,
}

#[derive(Serialize, Deserialize)]
struct ModelSpecJson {
    name: String,
    map: HornMap,
    simplex: bool,
    #[serde(default)]
    equations: Vec<PolyJson>,
    #[serde(default)]
    sampler: Sampler,
    #[serde(default, rename = "A", skip_serializing_if = "Option::is_none")]
    configuration: Option<IntMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    discriminant: Option<PolyJson>,
}

impl Serialize for ModelSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let qvars: Vec<String> = (1..=self.map.n()).map(|i| format!("q{i}")).collect();
        ModelSpecJson {
            name: self.name.clone(),
            map: self.map.clone(),
            simplex: self.simplex,
            equations: self
                .equations
                .iter()
                .map(|e| PolyJson::from_poly(e, &self.vars))
                .collect(),
            sampler: self.sampler.clone(),
            configuration: self.configuration.clone(),
            discriminant: self.discriminant.as_ref().map(|d| {
                let names = if d.nvars() == qvars.len() {
                    qvars.clone()
                } else {
                    MultiPoly::default_names(d.nvars())
                };
                PolyJson::from_poly(d, &names)
            }),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModelSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ModelSpecJson::deserialize(d)?;
        let vars = j
            .equations
            .first()
            .map(|e| e.vars.clone())
            .unwrap_or_else(|| default_vars(j.map.m()));
        let equations = j
            .equations
            .iter()
            .map(PolyJson::to_poly)
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        let discriminant = j
            .discriminant
            .map(|p| p.to_poly())
            .transpose()
            .map_err(serde::de::Error::custom)?;
        ModelSpec::new(ModelSpec {
            name: j.name,
            map: j.map,
            simplex: j.simplex,
            vars,
            equations,
            sampler: j.sampler,
            configuration: j.configuration,
            discriminant,
        })
        .map_err(serde::de::Error::custom)
    }
}

fn default_vars(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("p{i}")).collect()
}

/// Seeded data vectors used to validate a model at load time.
const LOAD_CHECKS: usize = 8;
const LOAD_SEED: u64 = 0x10AD;

impl ModelSpec {
    /// Validates the map, the simplex claim and the equations at seeded
    /// random data vectors.
    pub fn new(spec: ModelSpec) -> Result<Self> {
        spec.map.validate()?;
        let m = spec.map.m();
        if spec.vars.len() != m {
            return Err(Error::Shape(format!(
                "{} variable names for a model with m = {m}",
                spec.vars.len()
            )));
        }
        if let Some(e) = spec.equations.iter().find(|e| e.nvars() != m) {
            return Err(Error::Shape(format!(
                "equation in {} variables for a model with m = {m}",
                e.nvars()
            )));
        }
        if let Sampler::Independence { rows, cols } = spec.sampler {
            if rows * cols != m {
                return Err(Error::Shape(format!(
                    "a {rows}x{cols} table does not have {m} cells"
                )));
            }
        }
        let mut rng = random::rng(LOAD_SEED);
        for _ in 0..LOAD_CHECKS {
            let u = horn::random_point_off_base_locus(&mut rng, &[&spec.map], 1, 50)?;
            let p = spec.map.eval(&u)?;
            if spec.simplex && p.iter().fold(Rat::zero(), |a, x| a + x) != Rat::one() {
                return Err(Error::Invalid(format!(
                    "model {:?} is declared simplex but its estimates do not sum to one",
                    spec.name
                )));
            }
            for e in &spec.equations {
                if !e.eval(&p)?.is_zero() {
                    return Err(Error::Invalid(format!(
                        "model {:?}: estimate does not satisfy {}",
                        spec.name,
                        e.display_with(&spec.vars)
                    )));
                }
            }
        }
        Ok(spec)
    }

    pub fn m(&self) -> usize {
        self.map.m()
    }
}

/// The 2x2 independence model. Cells are ordered `00, 01, 10, 11`.
pub fn independence_model() -> ModelSpec {
    let vars: Vec<String> = ["p00", "p01", "p10", "p11"].map(String::from).to_vec();
    let qvars: Vec<String> = ["q0p", "q1p", "qpp", "qp0", "qp1"]
        .map(String::from)
        .to_vec();
    ModelSpec::new(ModelSpec {
        name: "independence".into(),
        map: fixtures::independence_map(),
        simplex: true,
        equations: vec![parse_poly("p00*p11 - p01*p10", &vars).expect("fixed equation")],
        vars,
        sampler: Sampler::Independence { rows: 2, cols: 2 },
        configuration: Some(fixtures::independence_a()),
        discriminant: Some(
            parse_poly("qpp^2 - 4*(q0p + q1p)*(qp0 + qp1)", &qvars).expect("fixed polynomial"),
        ),
    })
    .expect("valid fixture")
}

/// The complete model on two outcomes.
pub fn line_model() -> ModelSpec {
    ModelSpec::new(ModelSpec {
        name: "line".into(),
        map: fixtures::line_map(),
        simplex: true,
        vars: default_vars(2),
        equations: Vec::new(),
        sampler: Sampler::Horn,
        configuration: None,
        discriminant: None,
    })
    .expect("valid fixture")
}

/// An immutable collection of models, looked up by name.
#[derive(Debug, Clone)]
pub struct Registry {
    models: Vec<ModelSpec>,
}

impl Registry {
    pub fn builtin() -> Self {
        Registry {
            models: vec![independence_model(), line_model()],
        }
    }

    /// Parses a JSON list of models; every model is validated on load.
    pub fn from_json(src: &str) -> Result<Self> {
        let models: Vec<ModelSpec> =
            serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(Registry { models })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.models).expect("serializable")
    }

    pub fn get(&self, name: &str) -> Option<&ModelSpec> {
        self.models.iter().find(|m| m.name == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.models.iter().map(|m| m.name.as_str()).collect()
    }
}

/// Nonnegative integer counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountVector(Vec<u64>);

impl CountVector {
    pub fn new(u: Vec<u64>) -> Result<Self> {
        if u.iter().all(|&x| x == 0) {
            return Err(Error::ZeroVector);
        }
        Ok(CountVector(u))
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn to_rat(&self) -> RatVector {
        self.0
            .iter()
            .map(|&x| Rat::from_integer(Int::from(x)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Estimate {
    pub p_hat: RatVector,
    /// The estimate sums to one.
    pub simplex: bool,
    /// Every model equation vanishes at the estimate.
    pub on_model: bool,
    /// The criticality identities hold at the data vector.
    pub critical: bool,
    pub certificate: Certificate,
}

/// `p̂ = Psi(u)` with exact certificates.
pub fn estimate(model: &ModelSpec, u: &CountVector) -> Result<Estimate> {
    if u.0.len() != model.m() {
        return Err(Error::Shape(format!(
            "{} counts for a model with m = {}",
            u.0.len(),
            model.m()
        )));
    }
    let ur = u.to_rat();
    let p_hat = model.map.eval(&ur)?;
    let sum = p_hat.iter().fold(Rat::zero(), |a, x| a + x);
    let simplex = sum == Rat::one();
    let mut on_model = true;
    let mut cert = Certificate::new();
    if model.simplex {
        cert.check("estimate sums to one", simplex);
    }
    for e in &model.equations {
        let ok = e.eval(&p_hat)?.is_zero();
        on_model &= ok;
        cert.check(format!("{} = 0", e.display_with(&model.vars)), ok);
    }
    let crit = horn::certify_criticality(&model.map, &ur)?;
    let critical = crit.passed();
    cert.absorb("", crit);
    Ok(Estimate {
        p_hat,
        simplex,
        on_model,
        critical,
        certificate: cert,
    })
}

/// `sum u_i log p_i`.
pub fn loglik(u: &[u64], p: &[f64]) -> f64 {
    u.iter()
        .zip(p)
        .filter(|(&ui, _)| ui > 0)
        .map(|(&ui, &pi)| ui as f64 * pi.ln())
        .sum()
}

pub const LOGLIK_SAMPLES: usize = 200;

#[derive(Debug, Clone, Serialize)]
pub struct LoglikReport {
    pub loglik_hat: f64,
    pub samples: usize,
    /// `min (loglik(p̂) - loglik(p))` over the samples.
    pub margin: f64,
    pub violations: usize,
}

fn independence_sample(rng: &mut impl Rng, rows: usize, cols: usize) -> Vec<f64> {
    let simplex = |rng: &mut dyn rand::RngCore, k: usize| {
        let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..1.0)).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect::<Vec<_>>()
    };
    let a = simplex(rng, rows);
    let b = simplex(rng, cols);
    a.iter()
        .flat_map(|ai| b.iter().map(move |bj| ai * bj))
        .collect()
}

fn horn_sample(rng: &mut impl Rng, model: &ModelSpec, u: &[u64]) -> Option<Vec<f64>> {
    let v: RatVector = u
        .iter()
        .map(|&x| {
            let num: i64 = rng.random_range(1..=200);
            Rat::from_integer(Int::from(x.max(1))) * Rat::new(Int::from(num), Int::from(100))
        })
        .collect();
    let p = model.map.eval(&v).ok()?;
    let p: Vec<f64> = p.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    p.iter().all(|&x| x > 0.0).then_some(p)
}

/// Compares the log-likelihood of `p̂` with [`LOGLIK_SAMPLES`] seeded
/// points of the model. This is numerical evidence of maximality, not a
/// proof.
pub fn loglik_compare(
    model: &ModelSpec,
    u: &CountVector,
    p_hat: &[Rat],
    seed: u64,
) -> Result<(Certificate, LoglikReport)> {
    let one = p_hat.iter().fold(Rat::zero(), |a, x| a + x);
    if p_hat.iter().any(|x| x <= &Rat::zero()) || one != Rat::one() {
        return Err(Error::Invalid(
            "the estimate must be strictly positive and sum to one".into(),
        ));
    }
    let ph: Vec<f64> = p_hat
        .iter()
        .map(|x| x.to_f64().unwrap_or(f64::NAN))
        .collect();
    let l_hat = loglik(u.counts(), &ph);
    let mut rng = random::rng(seed);
    let mut margin = f64::INFINITY;
    let mut violations = 0;
    let mut drawn = 0;
    let mut attempts = 0;
    while drawn < LOGLIK_SAMPLES && attempts < 50 * LOGLIK_SAMPLES {
        attempts += 1;
        let p = match model.sampler {
            Sampler::Independence { rows, cols } => independence_sample(&mut rng, rows, cols),
            Sampler::Horn => match horn_sample(&mut rng, model, u.counts()) {
                Some(p) => p,
                None => continue,
            },
        };
        drawn += 1;
        let diff = l_hat - loglik(u.counts(), &p);
        margin = margin.min(diff);
        // rounding in the logarithms is the only admissible slack
        if diff < -1e-9 * l_hat.abs().max(1.0) {
            violations += 1;
        }
    }
    let mut cert = Certificate::new();
    cert.check_with(
        "estimate dominates sampled model points",
        violations == 0 && drawn == LOGLIK_SAMPLES,
        format!("{drawn} samples, {violations} violations, margin {margin:.6e}"),
    );
    Ok((
        cert,
        LoglikReport {
            loglik_hat: l_hat,
            samples: drawn,
            margin,
            violations,
        },
    ))
}
