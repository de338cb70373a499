//! Run configuration: TOML with exact-number strings.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::Gq;
use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;

/// An exact entry: an integer or a string such as `"3/2"`, `"1.5"` or `"1+2i"`.
/// Bare TOML floats are rejected because they are already rounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exact {
    Int(i64),
    Str(String),
}

impl Exact {
    pub fn to_gq(&self) -> Result<Gq> {
        match self {
            Exact::Int(v) => Ok(Gq::int(*v)),
            Exact::Str(s) => s.parse().map_err(|e: crate::arith::ParseGqError| Error::ValidationError(e.to_string())),
        }
    }
}

impl From<&Gq> for Exact {
    fn from(q: &Gq) -> Self {
        Exact::Str(q.to_string())
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exact::Int(v) => s.serialize_i64(*v),
            Exact::Str(v) => s.serialize_str(v),
        }
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Exact;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or an exact number string such as \"3/2\" or \"1+2i\"")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exact, E> {
                Ok(Exact::Int(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exact, E> {
                i64::try_from(v).map(Exact::Int).map_err(|_| E::custom("integer out of range; quote it as a string"))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exact, E> {
                Err(E::custom(format!("float {v} is inexact; write it as a string, e.g. \"{v}\"")))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exact, E> {
                v.parse::<Gq>().map_err(E::custom)?;
                Ok(Exact::Str(v.to_string()))
            }
        }
        d.deserialize_any(V)
    }
}

pub type ExactRows = Vec<Vec<Exact>>;

pub fn matrix_from(rows: &ExactRows) -> Result<ExactMatrix> {
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(Error::ValidationError("matrix rows must be nonempty and of equal length".into()));
    }
    let rows: Vec<Vec<Gq>> = rows.iter().map(|r| r.iter().map(Exact::to_gq).collect()).collect::<Result<_>>()?;
    Ok(ExactMatrix::from_rows(rows))
}

pub fn vector_from(v: &[Exact]) -> Result<Vec<Gq>> {
    v.iter().map(Exact::to_gq).collect()
}

pub fn rows_of(m: &ExactMatrix) -> ExactRows {
    (0..m.rows()).map(|i| m.row(i).iter().map(Exact::from).collect()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Degrees,
    Jordan,
    Relative,
    Cesaro,
    Green,
    Iterate,
    Mixing,
    Chain,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Degrees => "degrees",
            Command::Jordan => "jordan",
            Command::Relative => "relative",
            Command::Cesaro => "cesaro",
            Command::Green => "green",
            Command::Iterate => "iterate",
            Command::Mixing => "mixing",
            Command::Chain => "chain",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CupEntry {
    pub p: usize,
    pub i: usize,
    pub q: usize,
    pub j: usize,
    /// Coordinates of `b_{p,i} ∪ b_{q,j}` in `H^{p+q,p+q}`.
    pub product: Vec<Exact>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", try_from = "ModelFields")]
pub enum ModelConfig {
    Torus {
        #[serde(rename = "A")]
        a: ExactRows,
    },
    Mazur {
        k: usize,
        word: Vec<usize>,
    },
    Raw {
        blocks: Vec<ExactRows>,
        kahler_class: Vec<Vec<Exact>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pushforward_blocks: Option<Vec<ExactRows>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cup: Option<Vec<CupEntry>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ModelType {
    Torus,
    Mazur,
    Raw,
}

// Flat form of the model table; deserializing through it keeps entry-level
// error positions, which an internally tagged enum loses.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFields {
    #[serde(rename = "type")]
    kind: ModelType,
    #[serde(rename = "A")]
    a: Option<ExactRows>,
    k: Option<usize>,
    word: Option<Vec<usize>>,
    blocks: Option<Vec<ExactRows>>,
    kahler_class: Option<Vec<Vec<Exact>>>,
    pushforward_blocks: Option<Vec<ExactRows>>,
    cup: Option<Vec<CupEntry>>,
}

impl TryFrom<ModelFields> for ModelConfig {
    type Error = String;

    fn try_from(f: ModelFields) -> std::result::Result<Self, String> {
        let need = |ok: bool, what: &str| if ok { Ok(()) } else { Err(format!("{what} is not allowed for this model type")) };
        let missing = |name: &str| format!("missing field `{name}`");
        match f.kind {
            ModelType::Torus => {
                need(f.k.is_none() && f.word.is_none(), "k/word")?;
                need(f.blocks.is_none() && f.kahler_class.is_none() && f.pushforward_blocks.is_none() && f.cup.is_none(), "raw data")?;
                Ok(ModelConfig::Torus { a: f.a.ok_or_else(|| missing("A"))? })
            }
            ModelType::Mazur => {
                need(f.a.is_none(), "A")?;
                need(f.blocks.is_none() && f.kahler_class.is_none() && f.pushforward_blocks.is_none() && f.cup.is_none(), "raw data")?;
                Ok(ModelConfig::Mazur { k: f.k.ok_or_else(|| missing("k"))?, word: f.word.ok_or_else(|| missing("word"))? })
            }
            ModelType::Raw => {
                need(f.a.is_none() && f.k.is_none() && f.word.is_none(), "A/k/word")?;
                Ok(ModelConfig::Raw {
                    blocks: f.blocks.ok_or_else(|| missing("blocks"))?,
                    kahler_class: f.kahler_class.ok_or_else(|| missing("kahler_class"))?,
                    pushforward_blocks: f.pushforward_blocks,
                    cup: f.cup,
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Slack for inequality checks (submultiplicativity, mass bound, eigen-equations).
    #[serde(default = "default_check")]
    pub check: f64,
    /// Minimum distance between subsequential limits to call a sequence divergent.
    #[serde(default = "default_separation")]
    pub separation: f64,
}

fn default_check() -> f64 {
    1e-9
}

fn default_separation() -> f64 {
    1e-3
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { check: default_check(), separation: default_separation() }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JordanSection {
    /// Matrix to analyse; defaults to the model block `block`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<ExactRows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreesSection {
    /// Also report `d_{p,n}` for this `p` and `n = 1..=n_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence_p: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    Fundamental,
    Dominant,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelativeSection {
    pub class: ClassKind,
    #[serde(default)]
    pub s: usize,
    /// Coordinates and eigenvalue of an explicit rational class.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Exact>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalue: Option<Exact>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CesaroSection {
    pub s: usize,
    /// Defaults to `[ω^s]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<Vec<Exact>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub freq: Vec<i64>,
    pub coeff: Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterateSection {
    /// Integer matrix of `g(x) = Gx mod 1`.
    pub g: Vec<Vec<i64>>,
    pub lambda: ExactRows,
    /// One trigonometric polynomial per component of `u`.
    pub u: Vec<Vec<TrigTerm>>,
    #[serde(default = "default_nu")]
    pub nu: f64,
    /// Component of `v` whose Hölder exponent is estimated.
    #[serde(default)]
    pub holder_component: usize,
}

fn default_nu() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixingSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_prime: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<TrigTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<TrigTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_range: Option<[u64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default = "default_precision")]
    pub precision_bits: u32,
    #[serde(default = "default_n")]
    pub n_max: u64,
    #[serde(default = "default_n", rename = "N_max")]
    pub big_n_max: u64,
    #[serde(default = "default_budget")]
    pub digit_budget: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<DegreesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jordan: Option<JordanSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative: Option<RelativeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cesaro: Option<CesaroSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterate: Option<IterateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixing: Option<MixingSection>,
}

fn default_precision() -> u32 {
    crate::jordan::DEFAULT_PRECISION
}

fn default_n() -> u64 {
    200
}

fn default_budget() -> usize {
    crate::jordan::DEFAULT_DIGIT_BUDGET
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        Error::ParseError { line, column, message: e.message().to_string() }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::ValidationError(s));
        if self.precision_bits < 64 {
            return bad(format!("precision_bits = {} must be at least 64", self.precision_bits));
        }
        if self.n_max == 0 || self.big_n_max == 0 {
            return bad("n_max and N_max must be positive".into());
        }
        if let Some(model) = &self.model {
            match model {
                ModelConfig::Torus { a } => {
                    matrix_from(a)?;
                }
                ModelConfig::Mazur { k, word } => {
                    if *k < 2 {
                        return bad(format!("mazur model needs k ≥ 2, got {k}"));
                    }
                    if let Some(w) = word.iter().find(|&&w| w == 0 || w > k + 1) {
                        return bad(format!("word letter {w} outside 1..={}", k + 1));
                    }
                }
                ModelConfig::Raw { blocks, kahler_class, pushforward_blocks, cup } => {
                    for b in blocks.iter().chain(pushforward_blocks.iter().flatten()) {
                        matrix_from(b)?;
                    }
                    for v in kahler_class {
                        vector_from(v)?;
                    }
                    for c in cup.iter().flatten() {
                        vector_from(&c.product)?;
                    }
                }
            }
        }
        if let Some(r) = self.grid.resolution {
            if r < 8 {
                return bad(format!("grid resolution {r} is below 8"));
            }
        }
        if let Some(it) = &self.iterate {
            if !(it.nu > 0.0 && it.nu <= 1.0) {
                return bad(format!("nu = {} must lie in (0, 1]", it.nu));
            }
            matrix_from(&it.lambda)?;
            for t in it.u.iter().flatten() {
                t.coeff.to_gq()?;
            }
        }
        if let Some(mx) = &self.mixing {
            if mx.m.is_some() != mx.m_prime.is_some() {
                return bad("mixing needs both m and m_prime".into());
            }
            if mx.phi.is_some() != mx.psi.is_some() {
                return bad("mixing needs both phi and psi".into());
            }
            if let Some([a, b]) = mx.n_range {
                if a == 0 || a > b {
                    return bad(format!("n_range [{a}, {b}] must satisfy 1 ≤ a ≤ b"));
                }
            }
        }
        if let Some(rel) = &self.relative {
            if rel.class == ClassKind::Explicit && (rel.coords.is_none() || rel.eigenvalue.is_none()) {
                return bad("an explicit class needs coords and eigenvalue".into());
            }
        }
        Ok(())
    }

    /// Fixes the command and the CLI overrides.
    pub fn resolve(
        mut self,
        command: Command,
        output: Option<String>,
        format: Option<Format>,
        precision: Option<u32>,
    ) -> Result<RunConfig> {
        if let Some(c) = self.command {
            if c != command {
                return Err(Error::ValidationError(format!(
                    "config is for `{}` but `{}` was requested",
                    c.name(),
                    command.name()
                )));
            }
        }
        self.command = Some(command);
        if let Some(p) = output {
            self.output.path = Some(p);
        }
        if let Some(f) = format {
            self.output.format = f;
        }
        if let Some(p) = precision {
            self.precision_bits = p;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}

/// The raw-model description of an action, so any model can be re-run from plain matrices.
pub fn raw_model_of(action: &crate::cohomology::GradedCohomologyAction) -> ModelConfig {
    let raw = action.to_raw();
    ModelConfig::Raw {
        blocks: raw.blocks.iter().map(rows_of).collect(),
        kahler_class: raw.kahler_class.iter().map(|v| v.iter().map(Exact::from).collect()).collect(),
        pushforward_blocks: raw.pushforward_blocks.as_ref().map(|bs| bs.iter().map(rows_of).collect()),
        cup: raw.cup.as_ref().map(|c| {
            c.entries()
                .map(|(&(p, i, q, j), v)| {
                    let mut product = vec![Exact::Int(0); c.dims[p + q]];
                    for (idx, x) in v {
                        product[*idx] = Exact::from(x);
                    }
                    CupEntry { p, i, q, j, product }
                })
                .collect()
        }),
    }
}
