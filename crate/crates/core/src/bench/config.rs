use serde::Serialize;
use toml::{Table, Value};

use crate::error::{Error, Result};

/// Every suite `verify` knows, in execution order.
pub const SUITES: &[&str] = &[
    "factorization",
    "matrix-schatten",
    "matrix-continuity",
    "gabor-reconstruction",
    "window-bound",
    "op-factorization",
    "op-schatten",
    "op-continuity",
    "wigner",
    "convolution",
];

/// Instance counts per suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trials {
    pub factorization: usize,
    pub hilbert_schmidt: usize,
    /// Instances per exponent in the Schatten embedding.
    pub embedding: usize,
    /// Instances per exponent above 2.
    pub embedding_probe: usize,
    /// Matrices per exponent tuple.
    pub continuity_matrices: usize,
    /// Vectors per matrix.
    pub continuity_vectors: usize,
    pub reconstruction: usize,
    pub op_symbols: usize,
    pub op_functions: usize,
    pub identities: usize,
    pub convolution: usize,
    /// Members of each fixed family in the stability checks.
    pub family: usize,
}

impl Default for Trials {
    fn default() -> Self {
        Trials {
            factorization: 1000,
            hilbert_schmidt: 200,
            embedding: 200,
            embedding_probe: 20,
            continuity_matrices: 20,
            continuity_vectors: 10,
            reconstruction: 50,
            op_symbols: 20,
            op_functions: 20,
            identities: 10,
            convolution: 10,
            family: 4,
        }
    }
}

/// Problem sizes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sizes {
    pub factorization_max_n: usize,
    pub embedding_max_n: usize,
    pub gabor_n: Vec<usize>,
    pub gabor_steps: Vec<usize>,
    pub op_n: usize,
    pub op_step: usize,
    pub involution_n: usize,
    pub convolution_n: usize,
    /// Grid sizes for stability checks that prefer even `N`.
    pub stability_even: Vec<usize>,
    /// Grid sizes for stability checks that prefer odd `N`.
    pub stability_odd: Vec<usize>,
    pub convolution_stability: Vec<usize>,
}

impl Default for Sizes {
    fn default() -> Self {
        Sizes {
            factorization_max_n: 64,
            embedding_max_n: 32,
            gabor_n: vec![64, 128],
            gabor_steps: vec![4, 8],
            op_n: 64,
            op_step: 4,
            involution_n: 63,
            convolution_n: 63,
            stability_even: vec![32, 64, 128],
            stability_odd: vec![33, 63, 127],
            convolution_stability: vec![33, 63],
        }
    }
}

/// Normative tolerances. A config may lower them, never raise them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub factorization_product: f64,
    pub norm_law: f64,
    pub multcont_slack: f64,
    pub hilbert_schmidt: f64,
    pub embedding_slack: f64,
    pub continuity_slack: f64,
    pub reconstruction: f64,
    pub commutation: f64,
    pub op_factorization: f64,
    pub op_identity: f64,
    pub rank_one: f64,
    pub covariance: f64,
    pub involution: f64,
    pub hs_bridge: f64,
    pub convolution: f64,
    pub stability_factor: f64,
    pub convolution_stability_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            factorization_product: 1e-12,
            norm_law: 1e-10,
            multcont_slack: 1e-10,
            hilbert_schmidt: 1e-10,
            embedding_slack: 1e-10,
            continuity_slack: 1e-10,
            reconstruction: 1e-8,
            commutation: 1e-10,
            op_factorization: 1e-6,
            op_identity: 1e-8,
            rank_one: 1e-10,
            covariance: 1e-12,
            involution: 1e-12,
            hs_bridge: 1e-10,
            convolution: 1e-8,
            stability_factor: 4.0,
            convolution_stability_factor: 2.0,
        }
    }
}

/// Everything a `verify` run depends on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub suites: Vec<String>,
    pub seed: u64,
    pub trials: Trials,
    pub sizes: Sizes,
    pub tolerances: Tolerances,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            suites: Vec::new(),
            seed: 1,
            trials: Trials::default(),
            sizes: Sizes::default(),
            tolerances: Tolerances::default(),
        }
    }
}

fn cfg_err(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        reason: reason.into(),
    }
}

fn as_usize(field: &str, v: &Value) -> Result<usize> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        _ => Err(cfg_err(field, "expected a nonnegative integer")),
    }
}

fn as_positive(field: &str, v: &Value) -> Result<usize> {
    let n = as_usize(field, v)?;
    if n == 0 {
        return Err(cfg_err(field, "must be positive"));
    }
    Ok(n)
}

fn as_size_list(field: &str, v: &Value) -> Result<Vec<usize>> {
    match v {
        Value::Array(a) if !a.is_empty() => a.iter().map(|x| as_positive(field, x)).collect(),
        _ => Err(cfg_err(field, "expected a nonempty array of positive integers")),
    }
}

fn as_f64(field: &str, v: &Value) -> Result<f64> {
    let x = match v {
        Value::Float(f) => *f,
        Value::Integer(i) => *i as f64,
        _ => return Err(cfg_err(field, "expected a number")),
    };
    if !x.is_finite() {
        return Err(cfg_err(field, "must be finite"));
    }
    Ok(x)
}

fn table<'a>(field: &str, v: &'a Value) -> Result<&'a Table> {
    v.as_table().ok_or_else(|| cfg_err(field, "expected a table"))
}

impl ExperimentConfig {
    /// Parses the flat TOML format: top-level `seed` and `suites`, plus
    /// optional `[trials]`, `[sizes]` and `[tolerances]` tables.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let root: Table = text.parse().map_err(|e: toml::de::Error| cfg_err("<file>", e.message().to_string()))?;
        let mut cfg = ExperimentConfig::default();
        for (key, v) in &root {
            match key.as_str() {
                "seed" => {
                    cfg.seed = match v {
                        Value::Integer(i) if *i >= 0 => *i as u64,
                        _ => return Err(cfg_err("seed", "expected a nonnegative integer")),
                    }
                }
                "suites" => {
                    let a = v.as_array().ok_or_else(|| cfg_err("suites", "expected an array of names"))?;
                    cfg.suites = a
                        .iter()
                        .map(|s| s.as_str().map(str::to_string).ok_or_else(|| cfg_err("suites", "expected strings")))
                        .collect::<Result<_>>()?;
                }
                "trials" => cfg.apply_trials(table("trials", v)?)?,
                "sizes" => cfg.apply_sizes(table("sizes", v)?)?,
                "tolerances" => cfg.apply_tolerances(table("tolerances", v)?)?,
                other => return Err(cfg_err(other, "unknown key")),
            }
        }
        cfg.suites = expand_suites(&cfg.suites)?;
        Ok(cfg)
    }

    fn apply_trials(&mut self, t: &Table) -> Result<()> {
        let tr = &mut self.trials;
        for (key, v) in t {
            let field = format!("trials.{key}");
            let slot = match key.as_str() {
                "factorization" => &mut tr.factorization,
                "hilbert_schmidt" => &mut tr.hilbert_schmidt,
                "embedding" => &mut tr.embedding,
                "embedding_probe" => &mut tr.embedding_probe,
                "continuity_matrices" => &mut tr.continuity_matrices,
                "continuity_vectors" => &mut tr.continuity_vectors,
                "reconstruction" => &mut tr.reconstruction,
                "op_symbols" => &mut tr.op_symbols,
                "op_functions" => &mut tr.op_functions,
                "identities" => &mut tr.identities,
                "convolution" => &mut tr.convolution,
                "family" => &mut tr.family,
                _ => return Err(cfg_err(field, "unknown key")),
            };
            *slot = as_positive(&field, v)?;
        }
        Ok(())
    }

    fn apply_sizes(&mut self, t: &Table) -> Result<()> {
        let s = &mut self.sizes;
        for (key, v) in t {
            let field = format!("sizes.{key}");
            match key.as_str() {
                "factorization_max_n" => s.factorization_max_n = as_positive(&field, v)?,
                "embedding_max_n" => s.embedding_max_n = as_positive(&field, v)?,
                "op_n" => s.op_n = as_positive(&field, v)?,
                "op_step" => s.op_step = as_positive(&field, v)?,
                "involution_n" => s.involution_n = as_positive(&field, v)?,
                "convolution_n" => s.convolution_n = as_positive(&field, v)?,
                "gabor_n" => s.gabor_n = as_size_list(&field, v)?,
                "gabor_steps" => s.gabor_steps = as_size_list(&field, v)?,
                "stability_even" => s.stability_even = as_size_list(&field, v)?,
                "stability_odd" => s.stability_odd = as_size_list(&field, v)?,
                "convolution_stability" => s.convolution_stability = as_size_list(&field, v)?,
                _ => return Err(cfg_err(field, "unknown key")),
            }
        }
        if s.factorization_max_n < 2 || s.embedding_max_n < 2 {
            return Err(cfg_err("sizes", "matrix sizes must be at least 2"));
        }
        if s.involution_n.is_multiple_of(2) {
            return Err(cfg_err("sizes.involution_n", "must be odd"));
        }
        if !s.op_n.is_multiple_of(s.op_step) {
            return Err(cfg_err("sizes.op_step", "must divide sizes.op_n"));
        }
        Ok(())
    }

    fn apply_tolerances(&mut self, t: &Table) -> Result<()> {
        let defaults = Tolerances::default();
        let tol = &mut self.tolerances;
        for (key, v) in t {
            let field = format!("tolerances.{key}");
            let (slot, default) = match key.as_str() {
                "factorization_product" => (&mut tol.factorization_product, defaults.factorization_product),
                "norm_law" => (&mut tol.norm_law, defaults.norm_law),
                "multcont_slack" => (&mut tol.multcont_slack, defaults.multcont_slack),
                "hilbert_schmidt" => (&mut tol.hilbert_schmidt, defaults.hilbert_schmidt),
                "embedding_slack" => (&mut tol.embedding_slack, defaults.embedding_slack),
                "continuity_slack" => (&mut tol.continuity_slack, defaults.continuity_slack),
                "reconstruction" => (&mut tol.reconstruction, defaults.reconstruction),
                "commutation" => (&mut tol.commutation, defaults.commutation),
                "op_factorization" => (&mut tol.op_factorization, defaults.op_factorization),
                "op_identity" => (&mut tol.op_identity, defaults.op_identity),
                "rank_one" => (&mut tol.rank_one, defaults.rank_one),
                "covariance" => (&mut tol.covariance, defaults.covariance),
                "involution" => (&mut tol.involution, defaults.involution),
                "hs_bridge" => (&mut tol.hs_bridge, defaults.hs_bridge),
                "convolution" => (&mut tol.convolution, defaults.convolution),
                "stability_factor" => (&mut tol.stability_factor, defaults.stability_factor),
                "convolution_stability_factor" => {
                    (&mut tol.convolution_stability_factor, defaults.convolution_stability_factor)
                }
                _ => return Err(cfg_err(field, "unknown key")),
            };
            let x = as_f64(&field, v)?;
            let floor = if key.ends_with("factor") { 1.0 } else { 1e-15 };
            if x > default {
                return Err(cfg_err(field, format!("may only tighten the default {default:e}")));
            }
            if x < floor {
                return Err(cfg_err(field, format!("below the floor {floor:e}")));
            }
            *slot = x;
        }
        Ok(())
    }
}

/// Resolves `all` and rejects unknown names, keeping execution order.
pub fn expand_suites(names: &[String]) -> Result<Vec<String>> {
    let mut picked = vec![false; SUITES.len()];
    for name in names {
        if name == "all" {
            picked.iter_mut().for_each(|p| *p = true);
            continue;
        }
        match SUITES.iter().position(|s| s == name) {
            Some(i) => picked[i] = true,
            None => return Err(Error::UnknownSuite(name.clone())),
        }
    }
    Ok(SUITES
        .iter()
        .zip(picked)
        .filter(|(_, p)| *p)
        .map(|(s, _)| s.to_string())
        .collect())
}
