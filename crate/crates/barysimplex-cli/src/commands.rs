//! The four subcommands as library functions.
//!
//! Each command returns a [`CommandOutcome`]: the JSON report plus the list
//! of failed certificates. A failed certificate is always *reported* — the
//! caller turns it into a nonzero exit status, never a silent pass.

use std::fs;

use anyhow::{bail, Context, Result};
use barysimplex::cdf_synth::{
    self, BaseCdf, GridTable, TransformFamily, DEFAULT_COHERENCE_TOLERANCE,
};
use barysimplex::closed_form;
use barysimplex::kkt;
use barysimplex::lp_oracle;
use barysimplex::permutation_opt;
use barysimplex::{determinant, format_rational, rat, trace, Rational};
use serde_json::{json, Value};

use crate::input::{Options, Problem};
use crate::report;
use crate::tables;

/// A finished command: the report to emit plus its certification status.
#[derive(Debug, Clone)]
pub struct CommandOutcome {
    /// The full JSON report.
    pub report: Value,
    /// `true` iff every certificate in the report passed.
    pub certified: bool,
    /// One line per failed certificate, for stderr.
    pub failures: Vec<String>,
}

impl CommandOutcome {
    fn new(report: Value, failures: Vec<String>) -> Self {
        CommandOutcome {
            certified: failures.is_empty(),
            report,
            failures,
        }
    }
}

fn abs(x: Rational) -> Rational {
    if x < rat(0, 1) {
        -x
    } else {
        x
    }
}

/// `solve`: closed-form optimum with inverse, exact dual, eigenvalues,
/// classification, uniqueness report, and a KKT certificate.
pub fn cmd_solve(problem: &Problem) -> Result<CommandOutcome> {
    let Problem { p, q, .. } = problem;
    let u = closed_form::build_optimal_primal(p, q)?;
    let v = closed_form::build_inverse(p, q)?;
    let dual = closed_form::build_dual(p, q)?;
    let eigen_u = closed_form::eigenvalues(p, q, false)?;
    let eigen_v = closed_form::eigenvalues(p, q, true)?;
    let classification = closed_form::classify(p, q)?;
    let uniqueness = closed_form::uniqueness(p, q)?;
    let certificate = kkt::certify(u.as_general(), p, q, &dual.alpha, &dual.beta, &dual.gamma)?;

    let mut failures = Vec::new();
    if !certificate.satisfied {
        failures.push(format!(
            "KKT certificate rejected the closed-form pair ({} violations)",
            certificate.violations.len()
        ));
    }
    if !classification.products_are_identity {
        failures.push("inverse check failed: ŪV̄ or V̄Ū is not the identity".to_string());
    }
    if !(classification.v_is_z_matrix
        && classification.v_is_m_matrix
        && classification.u_is_inverse_m_matrix)
    {
        failures.push("matrix classification failed for the inverse pair".to_string());
    }

    let trace_u = trace(u.as_general());
    let report = json!({
        "schema": report::SCHEMA,
        "command": "solve",
        "n": p.len(),
        "p": report::vector(p),
        "q": report::vector(q),
        "u_bar": report::stochastic(&u),
        "trace": report::fraction(&trace_u),
        "absdet": report::fraction(&abs(determinant(u.as_general()))),
        "v_bar": report::matrix(&v),
        "eigenvalues": report::fraction_slice(&eigen_u),
        "eigenvalues_of_inverse": report::fraction_slice(&eigen_v),
        "dual": report::dual(&dual),
        "classification": report::classification(&classification),
        "uniqueness": report::uniqueness(&uniqueness),
        "kkt": report::kkt(&certificate),
    });
    Ok(CommandOutcome::new(report, failures))
}

/// `perm`: solve the relabeled problem; report the optimal permutation (as
/// the 1-based row reading of M̂), the reassembled coupling, traces,
/// absolute determinants, and the vertex lists of both couplings.
pub fn cmd_perm(problem: &Problem) -> Result<CommandOutcome> {
    let Problem { p, q, .. } = problem;
    let result = permutation_opt::solve_p_perm(p, q)?;
    let base = closed_form::build_optimal_primal(p, q)?;

    let mut failures = Vec::new();
    if result.trace_perm < result.trace_base {
        failures.push(format!(
            "relaxation dominance failed: permuted trace {} is below base trace {}",
            format_rational(&result.trace_perm),
            format_rational(&result.trace_base)
        ));
    }

    let m_hat: Vec<usize> = result.m_hat.mapping().iter().map(|&j| j + 1).collect();
    let vertices_base: Vec<Value> = permutation_opt::simplex_vertices(&base)
        .iter()
        .map(|row| report::fraction_slice(row))
        .collect();
    let vertices_perm: Vec<Value> = permutation_opt::simplex_vertices(&result.u_hat)
        .iter()
        .map(|row| report::fraction_slice(row))
        .collect();

    let report = json!({
        "schema": report::SCHEMA,
        "command": "perm",
        "n": p.len(),
        "p": report::vector(p),
        "q": report::vector(q),
        "m_hat": m_hat,
        "u_hat": report::stochastic(&result.u_hat),
        "trace_perm": report::fraction(&result.trace_perm),
        "trace_base": report::fraction(&result.trace_base),
        "absdet_perm": report::fraction(&result.absdet_perm),
        "absdet_base": report::fraction(&result.absdet_base),
        "vertices_base": vertices_base,
        "vertices_perm": vertices_perm,
    });
    Ok(CommandOutcome::new(report, failures))
}

/// `oracle`: run the exact simplex on the primal and dual encodings and
/// compare both optima against the closed-form trace.
pub fn cmd_oracle(problem: &Problem) -> Result<CommandOutcome> {
    let Problem { p, q, options } = problem;
    let cap = options.oracle_cap.unwrap_or(Options::DEFAULT_ORACLE_CAP);
    let n = p.len();
    if n > cap {
        bail!("dimension {n} exceeds the oracle cap {cap}; raise oracle_cap to override");
    }

    let (primal_value, primal_matrix) = lp_oracle::solve_primal(p, q)?;
    let oracle_dual = lp_oracle::solve_dual(p, q)?;
    let closed = closed_form::build_optimal_primal(p, q)?;
    let closed_trace = trace(closed.as_general());
    let member = kkt::is_member(primal_matrix.as_general(), p, q)?;

    let primal_agrees = primal_value == closed_trace;
    let dual_agrees = oracle_dual.value == closed_trace;

    let mut failures = Vec::new();
    if !primal_agrees {
        failures.push(format!(
            "primal oracle value {} differs from the closed-form trace {}",
            format_rational(&primal_value),
            format_rational(&closed_trace)
        ));
    }
    if !dual_agrees {
        failures.push(format!(
            "dual oracle value {} differs from the closed-form trace {}",
            format_rational(&oracle_dual.value),
            format_rational(&closed_trace)
        ));
    }
    if !member {
        failures.push("oracle primal solution is not in the candidate set".to_string());
    }

    let report = json!({
        "schema": report::SCHEMA,
        "command": "oracle",
        "n": n,
        "p": report::vector(p),
        "q": report::vector(q),
        "oracle_cap": cap,
        "primal_value": report::fraction(&primal_value),
        "dual_value": report::fraction(&oracle_dual.value),
        "closed_form_trace": report::fraction(&closed_trace),
        "agrees_with_closed_form": primal_agrees && dual_agrees,
        "primal_matrix": report::stochastic(&primal_matrix),
        "primal_is_member": member,
        "dual": {
            "alpha": report::fraction_slice(&oracle_dual.alpha),
            "beta": report::fraction_slice(&oracle_dual.beta),
            "gamma": report::matrix(&oracle_dual.gamma),
            "value": report::fraction(&oracle_dual.value),
        },
    });
    Ok(CommandOutcome::new(report, failures))
}

fn parse_family(name: &str, n: usize) -> Result<TransformFamily> {
    match name {
        "uniform" => Ok(cdf_synth::uniform_family(n)?),
        "beta" => Ok(cdf_synth::beta_family(n)?),
        other => bail!("unknown family {other:?}: expected \"uniform\" or \"beta\""),
    }
}

fn parse_base(spec: &str) -> Result<BaseCdf> {
    if spec == "normal" {
        return Ok(BaseCdf::standard_normal());
    }
    if let Some(path) = spec.strip_prefix("empirical:") {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading sample file {path}"))?;
        let mut samples = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            for token in line.split([',', ' ', '\t']) {
                let token = token.trim();
                if token.is_empty() {
                    continue;
                }
                let x: f64 = token.parse().with_context(|| {
                    format!("sample file {path}, line {}: bad number {token:?}", line_no + 1)
                })?;
                samples.push(x);
            }
        }
        return Ok(BaseCdf::empirical(samples)?);
    }
    bail!("unknown base {spec:?}: expected \"normal\" or \"empirical:<path>\"")
}

/// `synth`: build the requested transformation family, push it through the
/// optimal coupling, check coherence of both the source (against `p`) and
/// the mapped image (against `q`), report consecutive Wasserstein spacings,
/// and tabulate the transforms plus the synthesized conditional CDFs.
pub fn cmd_synth(problem: &Problem) -> Result<CommandOutcome> {
    let Problem { p, q, options } = problem;
    let n = p.len();

    let family_name = options.family.as_deref().unwrap_or("uniform");
    let source = parse_family(family_name, n)?;
    let base_name = options.base.as_deref().unwrap_or("normal");
    let base = parse_base(base_name)?;
    let z_grid_size = options.z_grid.unwrap_or(Options::DEFAULT_Z_GRID);
    let x_grid_size = options.x_grid.unwrap_or(Options::DEFAULT_X_GRID);
    if x_grid_size < 2 {
        bail!("x_grid must be at least 2, got {x_grid_size}");
    }
    let tolerance = options.tolerance.unwrap_or(DEFAULT_COHERENCE_TOLERANCE);

    let u = closed_form::build_optimal_primal(p, q)?;
    let mapped = cdf_synth::apply_matrix(&u, &source)?;

    let p_float: Vec<f64> = p.iter().map(cdf_synth::to_float).collect();
    let q_float: Vec<f64> = q.iter().map(cdf_synth::to_float).collect();
    let source_coherence =
        cdf_synth::check_coherence_with_tolerance(&source, &p_float, z_grid_size, tolerance)?;
    let mapped_coherence =
        cdf_synth::check_coherence_with_tolerance(&mapped, &q_float, z_grid_size, tolerance)?;

    let mut failures = Vec::new();
    if !source_coherence.pass {
        failures.push(format!(
            "source family \"{family_name}\" is incoherent for p (max residual {:e} on a \
             {z_grid_size}-point grid)",
            source_coherence.max_residual
        ));
    }
    if !mapped_coherence.pass {
        failures.push(format!(
            "mapped family is incoherent for q (max residual {:e} on a \
             {z_grid_size}-point grid)",
            mapped_coherence.max_residual
        ));
    }

    // Consecutive Wasserstein spacings, with the family's nominal spacing
    // (1/n for uniform segments, 1/(n+1) for the beta family) for reference.
    let source_spacings = cdf_synth::wasserstein_consecutive(&source);
    let mapped_spacings = cdf_synth::wasserstein_consecutive(&mapped);
    let expected_spacing = match family_name {
        "uniform" => 1.0 / n as f64,
        _ => 1.0 / (n as f64 + 1.0),
    };
    let max_source_deviation = source_spacings
        .iter()
        .map(|s| (s - expected_spacing).abs())
        .fold(0.0_f64, f64::max);

    // z table: the unit grid with both families evaluated on it.
    let z_points = cdf_synth::unit_grid(z_grid_size)?;
    let mut z_columns = vec!["z".to_string()];
    z_columns.extend((1..=n).map(|i| format!("S_{i}")));
    z_columns.extend((1..=n).map(|i| format!("T_{i}")));
    let z_rows: Vec<Vec<f64>> = z_points
        .iter()
        .map(|&z| {
            let mut row = vec![z];
            row.extend(source.evaluate_all(z));
            row.extend(mapped.evaluate_all(z));
            row
        })
        .collect();
    let z_table = GridTable {
        columns: z_columns,
        rows: z_rows,
    };

    // x table: synthesized conditional CDFs of the mapped family over the
    // base distribution, spanning its [1e-4, 1 − 1e-4] quantile range.
    let lo = base.quantile(1e-4);
    let hi = base.quantile(1.0 - 1e-4);
    let x_points: Vec<f64> = if hi > lo {
        (0..x_grid_size)
            .map(|k| lo + (hi - lo) * k as f64 / (x_grid_size - 1) as f64)
            .collect()
    } else {
        // Degenerate empirical sample: every quantile coincides.
        vec![lo]
    };
    let x_table = cdf_synth::synthesize(&mapped, &base, &x_points)?;

    let z_value = match &options.z_table {
        Some(path) => {
            tables::write_grid_table(path, &z_table)?;
            json!({ "path": path.display().to_string(), "rows": z_table.rows.len() })
        }
        None => report::grid_table(&z_table),
    };
    let x_value = match &options.x_table {
        Some(path) => {
            tables::write_grid_table(path, &x_table)?;
            json!({ "path": path.display().to_string(), "rows": x_table.rows.len() })
        }
        None => report::grid_table(&x_table),
    };

    let report = json!({
        "schema": report::SCHEMA,
        "command": "synth",
        "n": n,
        "p": report::vector(p),
        "q": report::vector(q),
        "family": family_name,
        "base": base_name,
        "z_grid": z_grid_size,
        "x_grid": x_grid_size,
        "x_range": [x_points.first().copied(), x_points.last().copied()],
        "source_coherence": report::coherence(&source_coherence),
        "mapped_coherence": report::coherence(&mapped_coherence),
        "wasserstein": {
            "source_spacings": source_spacings,
            "mapped_spacings": mapped_spacings,
            "expected_source_spacing": expected_spacing,
            "max_source_deviation": max_source_deviation,
        },
        "z_table": z_value,
        "x_table": x_value,
    });
    Ok(CommandOutcome::new(report, failures))
}
