//! Run configuration: JSON parsing, defaults, validation.
//!
//! Rationals appear as `"p/q"` strings (or plain integers); numbers are
//! also accepted and are converted exactly from their binary expansion in
//! exact mode.

use std::fmt;

use qaw_core::deformation::NumVal;
use qaw_core::scalar::parse_rational;
use qaw_core::Block;
use serde::Deserialize;
use serde_json::Value;

/// Scalar ring selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arithmetic {
    Exact,
    Float64,
}

impl Arithmetic {
    pub fn as_str(self) -> &'static str {
        match self {
            Arithmetic::Exact => "exact",
            Arithmetic::Float64 => "float64",
        }
    }
}

/// The verification suites, in their fixed report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Fock,
    Wick,
    Dual,
    Conjugate,
    Bounds,
    Modular,
    Classify,
    Basechange,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Fock,
        Suite::Wick,
        Suite::Dual,
        Suite::Conjugate,
        Suite::Bounds,
        Suite::Modular,
        Suite::Classify,
        Suite::Basechange,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Fock => "fock",
            Suite::Wick => "wick",
            Suite::Dual => "dual",
            Suite::Conjugate => "conjugate",
            Suite::Bounds => "bounds",
            Suite::Modular => "modular",
            Suite::Classify => "classify",
            Suite::Basechange => "basechange",
        }
    }

    pub fn from_str(s: &str) -> Option<Suite> {
        Suite::ALL.iter().copied().find(|x| x.as_str() == s)
    }
}

/// A configuration problem; always maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Fully validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub q: NumVal,
    pub blocks: Vec<Block>,
    pub arithmetic: Arithmetic,
    pub truncation: usize,
    pub suites: Vec<Suite>,
    pub tolerance: f64,
    pub seed: u64,
    pub m_max: usize,
    /// Continued-fraction cutoff for the float classifier.
    pub max_denominator: u64,
    /// Tolerance for the float classifier's log-ratio test.
    pub cf_tolerance: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    q: Option<Value>,
    blocks: Option<Vec<RawBlock>>,
    arithmetic: Option<String>,
    truncation: Option<usize>,
    suites: Option<Vec<String>>,
    tolerance: Option<f64>,
    seed: Option<u64>,
    m_max: Option<usize>,
    max_denominator: Option<u64>,
    cf_tolerance: Option<f64>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
enum RawBlock {
    #[serde(rename = "fixed")]
    Fixed { dim: usize },
    #[serde(rename = "rotation")]
    Rotation {
        lambda: Value,
        #[serde(default = "one_usize")]
        count: usize,
    },
}

fn one_usize() -> usize {
    1
}

/// Parse a rational-or-number JSON value into a `NumVal`. In exact mode a
/// float converts through its (exact) binary expansion; a value with no
/// exact meaning is rejected later by the deformation builder.
fn parse_numval(v: &Value, field: &str, arithmetic: Arithmetic) -> Result<NumVal, ConfigError> {
    match v {
        Value::String(s) => parse_rational(s)
            .map(NumVal::Rational)
            .ok_or_else(|| ConfigError(format!("field '{field}': cannot parse rational '{s}'"))),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(NumVal::Rational(qaw_core::Rational::from(
                    num_bigint_from_i64(i),
                )))
            } else if let Some(x) = n.as_f64() {
                match arithmetic {
                    Arithmetic::Exact => num_rational_from_f64(x)
                        .map(NumVal::Rational)
                        .ok_or_else(|| {
                            ConfigError(format!("field '{field}': {x} is not finite"))
                        }),
                    Arithmetic::Float64 => Ok(NumVal::Real(x)),
                }
            } else {
                Err(ConfigError(format!("field '{field}': unreadable number")))
            }
        }
        _ => Err(ConfigError(format!(
            "field '{field}': expected a \"p/q\" string or a number"
        ))),
    }
}

fn num_bigint_from_i64(i: i64) -> num_bigint::BigInt {
    num_bigint::BigInt::from(i)
}

fn num_rational_from_f64(x: f64) -> Option<qaw_core::Rational> {
    qaw_core::Rational::from_float(x)
}

impl Default for RunConfig {
    /// d = 2, one rotation block with λ = 2, q = 1/2, exact, N = 5.
    fn default() -> Self {
        RunConfig {
            q: NumVal::Rational(qaw_core::Rational::new(1.into(), 2.into())),
            blocks: vec![Block::Rotation {
                lambda: NumVal::Rational(qaw_core::Rational::from(num_bigint_from_i64(2))),
                count: 1,
            }],
            arithmetic: Arithmetic::Exact,
            truncation: 5,
            suites: Suite::ALL.to_vec(),
            tolerance: 1e-9,
            seed: 1,
            m_max: 3,
            max_denominator: 1000,
            cf_tolerance: 1e-9,
        }
    }
}

impl RunConfig {
    /// Parse a JSON document, starting from the defaults.
    pub fn from_json(text: &str) -> Result<RunConfig, ConfigError> {
        let raw: RawConfig = serde_json::from_str(text)
            .map_err(|e| ConfigError(format!("invalid JSON config: {e}")))?;
        let mut cfg = RunConfig::default();

        if let Some(a) = &raw.arithmetic {
            cfg.arithmetic = match a.as_str() {
                "exact" => Arithmetic::Exact,
                "float64" => Arithmetic::Float64,
                other => {
                    return Err(ConfigError(format!(
                        "field 'arithmetic': expected \"exact\" or \"float64\", got \"{other}\""
                    )))
                }
            };
        }
        if let Some(q) = &raw.q {
            cfg.q = parse_numval(q, "q", cfg.arithmetic)?;
        }
        if let Some(blocks) = &raw.blocks {
            cfg.blocks = blocks
                .iter()
                .map(|b| match b {
                    RawBlock::Fixed { dim } => Ok(Block::Fixed { dim: *dim }),
                    RawBlock::Rotation { lambda, count } => Ok(Block::Rotation {
                        lambda: parse_numval(lambda, "blocks[].lambda", cfg.arithmetic)?,
                        count: *count,
                    }),
                })
                .collect::<Result<_, ConfigError>>()?;
        }
        if let Some(n) = raw.truncation {
            cfg.truncation = n;
        }
        if let Some(ss) = &raw.suites {
            let mut suites = Vec::new();
            for s in ss {
                let suite = Suite::from_str(s).ok_or_else(|| {
                    ConfigError(format!("field 'suites': unknown suite \"{s}\""))
                })?;
                if !suites.contains(&suite) {
                    suites.push(suite);
                }
            }
            suites.sort(); // fixed report order regardless of listing order
            cfg.suites = suites;
        }
        if let Some(t) = raw.tolerance {
            cfg.tolerance = t;
        }
        if let Some(s) = raw.seed {
            cfg.seed = s;
        }
        if let Some(m) = raw.m_max {
            cfg.m_max = m;
        }
        if let Some(q) = raw.max_denominator {
            cfg.max_denominator = q;
        }
        if let Some(e) = raw.cf_tolerance {
            cfg.cf_tolerance = e;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.blocks.is_empty() || self.blocks.iter().map(Block::dim).sum::<usize>() == 0 {
            return Err(ConfigError("field 'blocks': empty deformation".into()));
        }
        if self.truncation < 1 {
            return Err(ConfigError("field 'truncation': must be at least 1".into()));
        }
        let needs_two = self
            .suites
            .iter()
            .any(|s| matches!(s, Suite::Dual | Suite::Conjugate | Suite::Basechange));
        if needs_two && self.truncation < 2 {
            return Err(ConfigError(
                "field 'truncation': dual/conjugate/basechange suites need N >= 2".into(),
            ));
        }
        if !(self.tolerance > 0.0) {
            return Err(ConfigError("field 'tolerance': must be positive".into()));
        }
        if self.m_max < 1 {
            return Err(ConfigError("field 'm_max': must be at least 1".into()));
        }
        if self.max_denominator < 1 {
            return Err(ConfigError(
                "field 'max_denominator': must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Largest shell cap usable on this truncation (`2m − 1 ≤ N`).
    pub fn effective_m_max(&self) -> usize {
        self.m_max.min((self.truncation + 1) / 2).max(1)
    }

    /// Config echo for the report (canonical: rationals as "p/q" strings).
    pub fn to_value(&self) -> Value {
        let blocks: Vec<Value> = self
            .blocks
            .iter()
            .map(|b| match b {
                Block::Fixed { dim } => serde_json::json!({"kind": "fixed", "dim": dim}),
                Block::Rotation { lambda, count } => {
                    serde_json::json!({"kind": "rotation", "lambda": numval_to_value(lambda), "count": count})
                }
            })
            .collect();
        serde_json::json!({
            "q": numval_to_value(&self.q),
            "blocks": blocks,
            "arithmetic": self.arithmetic.as_str(),
            "truncation": self.truncation,
            "suites": self.suites.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
            "tolerance": self.tolerance,
            "seed": self.seed,
            "m_max": self.m_max,
            "max_denominator": self.max_denominator,
            "cf_tolerance": self.cf_tolerance,
        })
    }
}

/// Canonical JSON form of a rational-or-real value.
pub fn numval_to_value(v: &NumVal) -> Value {
    match v {
        NumVal::Rational(r) => Value::String(format!("{}/{}", r.numer(), r.denom())),
        NumVal::Real(x) => serde_json::json!(x),
    }
}
