//! JSON encoding of exact values, certificates, and tables.
//!
//! Schema `barysimplex/1`: exact rationals are fraction strings (`"10/3"`,
//! or a bare integer string like `"1"`), matrices are row-major arrays of
//! such strings, floats are JSON numbers serialized so they round-trip
//! exactly, and **all indices are 1-based**.

use barysimplex::cdf_synth::{CoherenceReport, GridTable};
use barysimplex::closed_form::{ClassificationReport, DualSolution, UniquenessReport};
use barysimplex::kkt::{KktCertificate, Violation};
use barysimplex::{
    format_rational, GeneralMatrix, Rational, StochasticMatrix, StochasticVector,
};
use serde_json::{json, Value};

/// Identifier stamped on every report this crate emits.
pub const SCHEMA: &str = "barysimplex/1";

/// Encodes one exact rational as a fraction string.
pub fn fraction(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

/// Encodes a slice of rationals as an array of fraction strings.
pub fn fraction_slice(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(fraction).collect())
}

/// Encodes a stochastic vector.
pub fn vector(v: &StochasticVector) -> Value {
    fraction_slice(v.as_slice())
}

/// Encodes a matrix as row-major arrays of fraction strings.
pub fn matrix(m: &GeneralMatrix) -> Value {
    Value::Array(m.rows().map(fraction_slice).collect())
}

/// Encodes a stochastic matrix.
pub fn stochastic(m: &StochasticMatrix) -> Value {
    matrix(m.as_general())
}

fn index_list(xs: &[usize]) -> Value {
    Value::Array(xs.iter().map(|&i| Value::from(i + 1)).collect())
}

fn pair_list(ps: &[(usize, usize)]) -> Value {
    Value::Array(ps.iter().map(|&(i, j)| json!([i + 1, j + 1])).collect())
}

/// Encodes the exact dual triple and its objective.
pub fn dual(d: &DualSolution) -> Value {
    json!({
        "alpha": fraction_slice(&d.alpha),
        "beta": fraction_slice(&d.beta),
        "gamma": matrix(&d.gamma),
        "objective": fraction(&d.objective),
    })
}

/// Encodes the inverse-matrix classification verdicts.
pub fn classification(c: &ClassificationReport) -> Value {
    json!({
        "v_is_z_matrix": c.v_is_z_matrix,
        "v_is_m_matrix": c.v_is_m_matrix,
        "u_is_inverse_m_matrix": c.u_is_inverse_m_matrix,
        "v_determinant": fraction(&c.v_determinant),
        "positive_off_diagonal": pair_list(&c.positive_off_diagonal),
        "negative_inverse_entries": pair_list(&c.negative_inverse_entries),
        "products_are_identity": c.products_are_identity,
    })
}

/// Encodes the uniqueness report; the witness is `null` when the optimum is
/// unique.
pub fn uniqueness(u: &UniquenessReport) -> Value {
    json!({
        "unique": u.unique,
        "partition": {
            "greater": index_list(&u.partition.greater),
            "equal": index_list(&u.partition.equal),
            "less": index_list(&u.partition.less),
        },
        "witness": u.witness.as_ref().map(|w| json!({
            "direction": matrix(&w.direction),
            "step": fraction(&w.step),
            "alternate": stochastic(&w.alternate),
        })),
    })
}

fn violation(v: &Violation) -> Value {
    match v {
        Violation::Stationarity { row, col, residual } => json!({
            "condition": "stationarity",
            "row": row + 1,
            "col": col + 1,
            "amount": format_rational(residual),
        }),
        Violation::BarycenterMismatch { col, residual } => json!({
            "condition": "barycenter_mismatch",
            "col": col + 1,
            "amount": format_rational(residual),
        }),
        Violation::RowSumMismatch { row, residual } => json!({
            "condition": "row_sum_mismatch",
            "row": row + 1,
            "amount": format_rational(residual),
        }),
        Violation::NegativePrimalEntry { row, col, value } => json!({
            "condition": "negative_primal_entry",
            "row": row + 1,
            "col": col + 1,
            "amount": format_rational(value),
        }),
        Violation::NegativeDualEntry { row, col, value } => json!({
            "condition": "negative_dual_entry",
            "row": row + 1,
            "col": col + 1,
            "amount": format_rational(value),
        }),
        Violation::SlacknessResidual { row, col, product } => json!({
            "condition": "slackness_residual",
            "row": row + 1,
            "col": col + 1,
            "amount": format_rational(product),
        }),
    }
}

/// Encodes a KKT certificate with its full violation list.
pub fn kkt(cert: &KktCertificate) -> Value {
    json!({
        "stationarity": cert.stationarity,
        "primal_feasibility": cert.primal_feasibility,
        "dual_feasibility": cert.dual_feasibility,
        "complementary_slackness": cert.complementary_slackness,
        "satisfied": cert.satisfied,
        "violations": cert.violations.iter().map(violation).collect::<Vec<_>>(),
    })
}

/// Encodes a coherence report.
pub fn coherence(r: &CoherenceReport) -> Value {
    json!({
        "pass": r.pass,
        "max_residual": r.max_residual,
        "grid_size": r.grid_size,
        "tolerance": r.tolerance,
        "monotonicity_violations": Value::Array(
            r.monotonicity_violations
                .iter()
                .map(|&(member, point)| json!({"member": member + 1, "grid_point": point + 1}))
                .collect(),
        ),
        "endpoint_violations": Value::Array(
            r.endpoint_violations
                .iter()
                .map(|(member, which)| json!({"member": member + 1, "which": which}))
                .collect(),
        ),
    })
}

/// Embeds a grid table (column names plus float rows) in a report.
pub fn grid_table(t: &GridTable) -> Value {
    json!({
        "columns": t.columns,
        "rows": t.rows,
    })
}

/// Flattens a report into `(key, value)` rows for the CSV rendition.
///
/// Keys are dotted paths with 1-based bracketed indices, e.g.
/// `u_bar[1][2]` or `kkt.satisfied`; scalars become strings, `null` an
/// empty string.
pub fn flatten(value: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    walk(value, String::new(), &mut out);
    out
}

fn walk(value: &Value, path: String, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (key, child) in map {
                let next = if path.is_empty() {
                    key.clone()
                } else {
                    format!("{path}.{key}")
                };
                walk(child, next, out);
            }
        }
        Value::Array(items) => {
            for (k, child) in items.iter().enumerate() {
                walk(child, format!("{path}[{}]", k + 1), out);
            }
        }
        Value::Null => out.push((path, String::new())),
        Value::Bool(b) => out.push((path, b.to_string())),
        Value::Number(x) => out.push((path, x.to_string())),
        Value::String(s) => out.push((path, s.clone())),
    }
}
