//! Problem documents and option resolution.
//!
//! A problem document is a JSON object
//! `{"p": ["3/10", ...], "q": ["1/8", ...], "options": {...}}` where both
//! weight vectors are fraction strings. Command-line flags may supply or
//! override any field; flags always win over the file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use barysimplex::{parse_rational, validate_stochastic_vector, StochasticVector};

/// Raw JSON problem document, prior to validation.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemInput {
    /// Barycenter weights, as fraction strings.
    pub p: Option<Vec<String>>,
    /// Vertex weights, as fraction strings.
    pub q: Option<Vec<String>>,
    /// Optional knobs; commands ignore the ones they do not use.
    #[serde(default)]
    pub options: Options,
}

/// Optional settings shared by the subcommands.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Transformation family for `synth`: `"uniform"` (default) or `"beta"`.
    pub family: Option<String>,
    /// Base distribution for `synth`: `"normal"` (default) or
    /// `"empirical:<sample-file>"`.
    pub base: Option<String>,
    /// Points in the unit-interval grid used for coherence checks and the
    /// z table.
    pub z_grid: Option<usize>,
    /// Points in the x grid of the synthesized-CDF table.
    pub x_grid: Option<usize>,
    /// Largest dimension `oracle` hands to the exact simplex.
    pub oracle_cap: Option<usize>,
    /// Coherence residual tolerance.
    pub tolerance: Option<f64>,
    /// When set, `synth` writes the z table as CSV here instead of embedding
    /// it in the report.
    pub z_table: Option<PathBuf>,
    /// When set, `synth` writes the x table as CSV here instead of embedding
    /// it in the report.
    pub x_table: Option<PathBuf>,
}

impl Options {
    /// Default coherence / z-table grid size.
    pub const DEFAULT_Z_GRID: usize = 1001;
    /// Default synthesized-table grid size.
    pub const DEFAULT_X_GRID: usize = 513;
    /// Default cap on the dimension accepted by `oracle`.
    pub const DEFAULT_ORACLE_CAP: usize = 8;

    /// Overlays `over` (command-line flags) on `self` (file values); any
    /// field present in `over` wins.
    pub fn merge(self, over: Options) -> Options {
        Options {
            family: over.family.or(self.family),
            base: over.base.or(self.base),
            z_grid: over.z_grid.or(self.z_grid),
            x_grid: over.x_grid.or(self.x_grid),
            oracle_cap: over.oracle_cap.or(self.oracle_cap),
            tolerance: over.tolerance.or(self.tolerance),
            z_table: over.z_table.or(self.z_table),
            x_table: over.x_table.or(self.x_table),
        }
    }
}

impl ProblemInput {
    /// Reads and parses a problem document; parse errors carry the
    /// line/column reported by the JSON parser.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// A validated problem: both weight vectors are stochastic and conforming.
#[derive(Debug, Clone)]
pub struct Problem {
    pub p: StochasticVector,
    pub q: StochasticVector,
    pub options: Options,
}

/// Splits an inline weight list such as `"3/10, 2/5, 1/10, 1/5"`.
pub fn split_inline_vector(text: &str) -> Vec<String> {
    text.split(',').map(|s| s.trim().to_string()).collect()
}

/// Parses and validates one weight vector, labelling errors with the vector
/// name and a 1-based position.
pub fn parse_vector(label: &str, entries: &[String]) -> Result<StochasticVector> {
    let mut parsed = Vec::with_capacity(entries.len());
    for (k, text) in entries.iter().enumerate() {
        let value = parse_rational(text).with_context(|| format!("{label}[{}]", k + 1))?;
        parsed.push(value);
    }
    validate_stochastic_vector(parsed).with_context(|| format!("validating {label}"))
}

/// Combines an optional document with inline flag overrides into a
/// [`Problem`].
pub fn resolve(
    document: Option<ProblemInput>,
    inline_p: Option<&str>,
    inline_q: Option<&str>,
    flag_options: Options,
) -> Result<Problem> {
    let document = document.unwrap_or_default();
    let p_entries = match inline_p {
        Some(text) => split_inline_vector(text),
        None => document.p.unwrap_or_default(),
    };
    let q_entries = match inline_q {
        Some(text) => split_inline_vector(text),
        None => document.q.unwrap_or_default(),
    };
    if p_entries.is_empty() {
        bail!("no barycenter weights: pass --p or an input file with a \"p\" array");
    }
    if q_entries.is_empty() {
        bail!("no vertex weights: pass --q or an input file with a \"q\" array");
    }
    let p = parse_vector("p", &p_entries)?;
    let q = parse_vector("q", &q_entries)?;
    if p.len() != q.len() {
        bail!("p has {} entries but q has {}", p.len(), q.len());
    }
    let options = document.options.merge(flag_options);
    Ok(Problem { p, q, options })
}
