//! Acceptance suite: nine end-to-end criteria, one test per criterion.
//!
//! Every test prints exactly one `criterion N: PASS|FAIL — summary` line
//! (visible with `--nocapture`, and always shown when a test fails) and then
//! asserts that no clause failed, listing every failed clause. Tolerances,
//! seeds, instance counts, and time budgets are pinned as constants next to
//! the tests that use them.
//!
//! The worked 4-dimensional instances used throughout:
//! instance A: p = [3/10, 2/5, 1/10, 1/5], q = [1/8, 3/8, 3/10, 1/5]
//! instance B: p = [1/4, 1/4, 1/4, 1/4],   q = [1/3, 1/9, 1/2, 1/18]

use std::process::Command;
use std::time::{Duration, Instant};

use barysimplex::cdf_synth::{
    apply_matrix, beta_family, check_coherence, to_float, uniform_family,
    wasserstein_consecutive, BaseCdf,
};
use barysimplex::closed_form::{build_dual, build_inverse, build_optimal_primal, uniqueness};
use barysimplex::kkt::{certify, is_member};
use barysimplex::lp_oracle::{
    encode_primal, primal_variable_index, solve, solve_dual, solve_primal, LpStatus,
};
use barysimplex::permutation_opt::{assignment_costs, solve_assignment, solve_p_perm};
use barysimplex::test_support::{assignment_relaxation_lp, random_stochastic_vector};
use barysimplex::{
    determinant, format_rational, mat_mul, parse_rational, rat, trace, validate_stochastic_vector,
    GeneralMatrix, Rational, StochasticVector,
};
use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

/// Denominator bound for the seeded random instances.
const DENOMINATOR_BOUND: i64 = 40;
/// Instance stream shared by criteria 3 and 4 ("the same 500 instances").
const ORACLE_SUITE_SEED: u64 = 0xBA3F_0304;
const UNIQUENESS_SEED: u64 = 0xBA3F_0005;
const ASSIGNMENT_SEED: u64 = 0xBA3F_0006;
const COHERENCE_SEED: u64 = 0xBA3F_0008;

// ---------------------------------------------------------------------------
// Harness
// ---------------------------------------------------------------------------

/// Collects clause failures for one numbered criterion and prints the single
/// PASS/FAIL line when finished.
struct Criterion {
    number: u32,
    summary: &'static str,
    failures: Vec<String>,
}

impl Criterion {
    fn new(number: u32, summary: &'static str) -> Self {
        Criterion {
            number,
            summary,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, clause: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(clause());
        }
    }

    fn budget(&mut self, started: Instant, budget: Duration) {
        let elapsed = started.elapsed();
        self.check(elapsed <= budget, || {
            format!("time budget exceeded: {elapsed:?} > {budget:?}")
        });
    }

    fn finish(self) {
        if self.failures.is_empty() {
            println!("criterion {}: PASS — {}", self.number, self.summary);
        } else {
            println!("criterion {}: FAIL — {}", self.number, self.summary);
            for failure in &self.failures {
                println!("  clause failed: {failure}");
            }
            panic!(
                "criterion {} failed {} clause(s): {}",
                self.number,
                self.failures.len(),
                self.failures.join(" | ")
            );
        }
    }
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_barysimplex"))
        .args(args)
        .output()
        .expect("the CLI binary runs");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8(output.stdout).expect("stdout is UTF-8"),
        String::from_utf8(output.stderr).expect("stderr is UTF-8"),
    )
}

fn fraction(text: &str) -> Rational {
    parse_rational(text).expect("literal fraction")
}

fn fractions(rows: &[&[&str]]) -> Vec<Vec<Rational>> {
    rows.iter()
        .map(|row| row.iter().map(|s| fraction(s)).collect())
        .collect()
}

/// Parses a matrix of fraction strings out of a JSON report.
fn json_matrix(value: &Value) -> Vec<Vec<Rational>> {
    value
        .as_array()
        .expect("matrix is a JSON array")
        .iter()
        .map(|row| {
            row.as_array()
                .expect("matrix row is a JSON array")
                .iter()
                .map(|cell| fraction(cell.as_str().expect("fraction string")))
                .collect()
        })
        .collect()
}

fn json_fraction(value: &Value) -> Rational {
    fraction(value.as_str().expect("fraction string"))
}

fn random_pair(rng: &mut ChaCha8Rng, n: usize) -> (StochasticVector, StochasticVector) {
    (
        random_stochastic_vector(rng, n, DENOMINATOR_BOUND),
        random_stochastic_vector(rng, n, DENOMINATOR_BOUND),
    )
}

fn describe(p: &StochasticVector, q: &StochasticVector) -> String {
    let fmt = |v: &StochasticVector| {
        v.iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .join(",")
    };
    format!("p=[{}] q=[{}]", fmt(p), fmt(q))
}

// ---------------------------------------------------------------------------
// Criterion 1
// ---------------------------------------------------------------------------

/// Budget for each worked-instance reproduction (criteria 1 and 2).
const WORKED_INSTANCE_BUDGET: Duration = Duration::from_secs(1);

#[test]
fn criterion_1_first_worked_instance_reproduced_end_to_end() {
    let mut c = Criterion::new(
        1,
        "instance A: solve emits the exact optimum with trace 10/3 and |det| 1/3; \
         perm emits trace 19/5 and |det| 4/5 with the expected coupling",
    );
    let started = Instant::now();
    let p = "3/10,2/5,1/10,1/5";
    let q = "1/8,3/8,3/10,1/5";

    let (code, stdout, stderr) = run_cli(&["solve", "--p", p, "--q", q]);
    c.check(code == 0, || format!("solve exited {code}: {stderr}"));
    let solve_report: Value = serde_json::from_str(&stdout).expect("solve emits JSON");
    let expected_u = fractions(&[
        &["1", "0", "0", "0"],
        &["0", "1", "0", "0"],
        &["7/12", "1/12", "1/3", "0"],
        &["0", "0", "0", "1"],
    ]);
    c.check(json_matrix(&solve_report["u_bar"]) == expected_u, || {
        format!("u_bar mismatch: {}", solve_report["u_bar"])
    });
    c.check(json_fraction(&solve_report["trace"]) == rat(10, 3), || {
        format!("trace is {}, expected 10/3", solve_report["trace"])
    });
    c.check(json_fraction(&solve_report["absdet"]) == rat(1, 3), || {
        format!("absdet is {}, expected 1/3", solve_report["absdet"])
    });

    let (code, stdout, stderr) = run_cli(&["perm", "--p", p, "--q", q]);
    c.check(code == 0, || format!("perm exited {code}: {stderr}"));
    let perm_report: Value = serde_json::from_str(&stdout).expect("perm emits JSON");
    c.check(
        json_fraction(&perm_report["trace_perm"]) == rat(19, 5),
        || format!("trace_perm is {}, expected 19/5", perm_report["trace_perm"]),
    );
    c.check(
        json_fraction(&perm_report["absdet_perm"]) == rat(4, 5),
        || format!("absdet_perm is {}, expected 4/5", perm_report["absdet_perm"]),
    );
    // The assignment optimum is unique for this instance, so the reassembled
    // coupling is tie-break independent.
    let expected_u_hat = fractions(&[
        &["0", "1/5", "4/5", "0"],
        &["0", "1", "0", "0"],
        &["1", "0", "0", "0"],
        &["0", "0", "0", "1"],
    ]);
    c.check(json_matrix(&perm_report["u_hat"]) == expected_u_hat, || {
        format!("u_hat mismatch: {}", perm_report["u_hat"])
    });
    c.check(
        perm_report["m_hat"] == serde_json::json!([3, 2, 1, 4]),
        || format!("m_hat is {}, expected [3,2,1,4]", perm_report["m_hat"]),
    );

    c.budget(started, WORKED_INSTANCE_BUDGET);
    c.finish();
}

// ---------------------------------------------------------------------------
// Criterion 2
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_second_worked_instance_exact_reproduction() {
    let mut c = Criterion::new(
        2,
        "instance B: optimum and permuted coupling match their pinned matrices; \
         non-unique with a feasible, trace-equal alternate",
    );
    let started = Instant::now();
    let p = "1/4,1/4,1/4,1/4";
    let q = "1/3,1/9,1/2,1/18";

    let (code, stdout, stderr) = run_cli(&["solve", "--p", p, "--q", q]);
    c.check(code == 0, || format!("solve exited {code}: {stderr}"));
    let solve_report: Value = serde_json::from_str(&stdout).expect("solve emits JSON");
    let expected_u = fractions(&[
        &["3/4", "5/48", "0", "7/48"],
        &["0", "1", "0", "0"],
        &["0", "5/24", "1/2", "7/24"],
        &["0", "0", "0", "1"],
    ]);
    c.check(json_matrix(&solve_report["u_bar"]) == expected_u, || {
        format!("u_bar mismatch: {}", solve_report["u_bar"])
    });

    // Non-uniqueness and the constructive alternate.
    let uniqueness = &solve_report["uniqueness"];
    c.check(
        uniqueness["unique"] == Value::Bool(false),
        || "instance reported as unique, expected non-unique".to_string(),
    );
    let witness = &uniqueness["witness"];
    c.check(!witness.is_null(), || "missing witness".to_string());
    if !witness.is_null() {
        let alternate = json_matrix(&witness["alternate"]);
        let pv = validate_stochastic_vector(vec![rat(1, 4); 4]).unwrap();
        let qv = validate_stochastic_vector(vec![
            rat(1, 3),
            rat(1, 9),
            rat(1, 2),
            rat(1, 18),
        ])
        .unwrap();
        let alt = GeneralMatrix::from_rows(alternate.clone()).unwrap();
        let feasible = is_member(&alt, &pv, &qv).unwrap();
        c.check(feasible, || "alternate optimum is not feasible".to_string());
        let alt_trace = trace(&alt);
        c.check(alt_trace == rat(13, 4), || {
            format!(
                "alternate trace {} differs from the optimal value 13/4",
                format_rational(&alt_trace)
            )
        });
        c.check(
            alternate != json_matrix(&solve_report["u_bar"]),
            || "alternate optimum coincides with the optimum".to_string(),
        );
    }

    // Pinned reference for the permuted coupling on this instance.
    let (code, stdout, stderr) = run_cli(&["perm", "--p", p, "--q", q]);
    c.check(code == 0, || format!("perm exited {code}: {stderr}"));
    let perm_report: Value = serde_json::from_str(&stdout).expect("perm emits JSON");
    let pinned_u_hat = fractions(&[
        &["0", "0", "3/4", "1/4"],
        &["0", "0", "0", "1"],
        &["7/18", "1/2", "0", "1/9"],
        &["1", "0", "0", "0"],
    ]);
    // Known divergence, kept faithful rather than forced green: with uniform
    // p the assignment costs are constant within every row, so all n!
    // relabelings are optimal and the documented lexicographic tie-break
    // selects the identity, making u_hat equal u_bar (trace 13/4, the same
    // optimal value). The pinned matrix above is a different optimal vertex
    // (row reading (3,4,2,1)) whose off-diagonal mass is split in
    // non-proportional amounts, so no relabeling followed by the
    // proportional-split reassembly can produce it. The clause below
    // therefore fails by construction and is reported honestly.
    c.check(json_matrix(&perm_report["u_hat"]) == pinned_u_hat, || {
        format!(
            "u_hat does not match the pinned matrix: the emitted coupling is {} \
             (identity relabeling selected by the lexicographic tie-break, so \
             u_hat = u_bar); the pinned matrix is a different optimal vertex \
             that the documented construction cannot emit for any relabeling",
            perm_report["u_hat"]
        )
    });

    c.budget(started, WORKED_INSTANCE_BUDGET);
    c.finish();
}

// ---------------------------------------------------------------------------
// Criterion 3
// ---------------------------------------------------------------------------

const ORACLE_SUITE_INSTANCES: usize = 500;
const ORACLE_SUITE_BUDGET: Duration = Duration::from_secs(60);

#[test]
fn criterion_3_oracle_equivalence_on_500_instances() {
    let mut c = Criterion::new(
        3,
        "500 random instances: simplex primal and dual optima equal the \
         closed-form trace and the KKT certificate passes",
    );
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SUITE_SEED);
    for k in 0..ORACLE_SUITE_INSTANCES {
        let n = 2 + k % 5;
        let (p, q) = random_pair(&mut rng, n);
        let u = build_optimal_primal(&p, &q).unwrap();
        let closed_trace = trace(u.as_general());

        let (primal_value, _) = solve_primal(&p, &q).unwrap();
        c.check(primal_value == closed_trace, || {
            format!(
                "instance {k} ({}): primal oracle {} ≠ closed form {}",
                describe(&p, &q),
                format_rational(&primal_value),
                format_rational(&closed_trace)
            )
        });

        let dual = solve_dual(&p, &q).unwrap();
        c.check(dual.value == closed_trace, || {
            format!(
                "instance {k} ({}): dual oracle {} ≠ closed form {}",
                describe(&p, &q),
                format_rational(&dual.value),
                format_rational(&closed_trace)
            )
        });

        let exact_dual = build_dual(&p, &q).unwrap();
        let certificate = certify(
            u.as_general(),
            &p,
            &q,
            &exact_dual.alpha,
            &exact_dual.beta,
            &exact_dual.gamma,
        )
        .unwrap();
        c.check(certificate.satisfied, || {
            format!(
                "instance {k} ({}): KKT certificate rejected with {} violations",
                describe(&p, &q),
                certificate.violations.len()
            )
        });
    }
    c.budget(started, ORACLE_SUITE_BUDGET);
    c.finish();
}

// ---------------------------------------------------------------------------
// Criterion 4
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_inverse_and_classification_suite() {
    let mut c = Criterion::new(
        4,
        "same 500 instances: ŪV̄ = V̄Ū = I, V̄ is a Z-matrix with unit row sums, \
         V̄ᵀ carries p onto q, and every diagonal entry of Ū is an eigenvalue",
    );
    // Same seed as criterion 3: the two suites run over the same stream.
    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SUITE_SEED);
    for k in 0..ORACLE_SUITE_INSTANCES {
        let n = 2 + k % 5;
        let (p, q) = random_pair(&mut rng, n);
        let u = build_optimal_primal(&p, &q).unwrap();
        let v = build_inverse(&p, &q).unwrap();
        let identity = GeneralMatrix::identity(n);

        let uv = mat_mul(u.as_general(), &v).unwrap();
        let vu = mat_mul(&v, u.as_general()).unwrap();
        c.check(uv == identity && vu == identity, || {
            format!("instance {k} ({}): ŪV̄ or V̄Ū is not the identity", describe(&p, &q))
        });

        let mut off_diagonals_nonpositive = true;
        for i in 0..n {
            for j in 0..n {
                if i != j && v.get(i, j) > &rat(0, 1) {
                    off_diagonals_nonpositive = false;
                }
            }
        }
        c.check(off_diagonals_nonpositive, || {
            format!(
                "instance {k} ({}): V̄ has a positive off-diagonal entry",
                describe(&p, &q)
            )
        });

        let row_sums_unit = (0..n).all(|i| {
            let sum: Rational = v.row(i).iter().cloned().sum();
            sum == rat(1, 1)
        });
        c.check(row_sums_unit, || {
            format!("instance {k} ({}): V̄1 ≠ 1", describe(&p, &q))
        });

        // Mapping identity for the inverse. V̄ᵀ sends the barycenter weights
        // p back onto the vertex weights q (the forward coupling satisfies
        // Ūᵀq = p; its inverse transports the weights the other way). The
        // reversed orientation is falsified by instance A, where
        // V̄ᵀq has a negative first coordinate — see the library's
        // regression test for that computation.
        let vt_p = v.transpose().mat_vec(p.as_slice()).unwrap();
        c.check(vt_p == q.as_slice().to_vec(), || {
            format!("instance {k} ({}): V̄ᵀp ≠ q", describe(&p, &q))
        });

        // Each diagonal entry of Ū is an eigenvalue: det(Ū − ū_ii·I) = 0.
        for i in 0..n {
            let mut shifted = u.as_general().clone();
            let lambda = u.get(i, i).clone();
            for d in 0..n {
                let value = shifted.get(d, d).clone() - lambda.clone();
                shifted.set(d, d, value);
            }
            let det = determinant(&shifted);
            c.check(det == rat(0, 1), || {
                format!(
                    "instance {k} ({}): det(Ū − ū_{{{i}{i}}}·I) = {} ≠ 0",
                    describe(&p, &q),
                    format_rational(&det)
                )
            });
        }
    }
    c.finish();
}

// ---------------------------------------------------------------------------
// Criterion 5
// ---------------------------------------------------------------------------

const UNIQUENESS_INSTANCES: usize = 200;

#[test]
fn criterion_5_uniqueness_theorem_both_directions() {
    let mut c = Criterion::new(
        5,
        "200 instances: unique side re-solves to the same matrix under a \
         perturbed objective; non-unique side yields a feasible, distinct, \
         trace-equal alternate",
    );
    let mut rng = ChaCha8Rng::seed_from_u64(UNIQUENESS_SEED);
    let mut unique_seen = 0usize;
    let mut non_unique_seen = 0usize;

    for k in 0..UNIQUENESS_INSTANCES {
        let n = 2 + k % 5;
        let (p, q) = random_pair(&mut rng, n);
        let u = build_optimal_primal(&p, &q).unwrap();
        let report = uniqueness(&p, &q).unwrap();

        if report.unique {
            unique_seen += 1;
            // Perturb each diagonal objective coefficient by a distinct
            // exact rational ε_i = 1/(10¹² + i) ≤ 1/10⁶. The total objective
            // shift over the feasible set is at most n·10⁻¹², far below the
            // gap to the second-best vertex, so the perturbed re-solve must
            // return Ū itself when the optimum is unique.
            let mut lp = encode_primal(&p, &q).unwrap();
            for i in 0..n {
                let column = primal_variable_index(n, i, i);
                lp.objective[column] += rat(1, 1_000_000_000_000_i64 + i as i64);
            }
            let solution = solve(&lp).unwrap();
            c.check(solution.status == LpStatus::Optimal, || {
                format!(
                    "instance {k} ({}): perturbed LP is not optimal",
                    describe(&p, &q)
                )
            });
            let values = solution.values.expect("optimal LP carries values");
            let mut same = true;
            for i in 0..n {
                for j in 0..n {
                    if values[primal_variable_index(n, i, j)] != *u.get(i, j) {
                        same = false;
                    }
                }
            }
            c.check(same, || {
                format!(
                    "instance {k} ({}): perturbed re-solve found a different matrix",
                    describe(&p, &q)
                )
            });
        } else {
            non_unique_seen += 1;
            let witness = report.witness.expect("non-unique instances carry a witness");
            let feasible = is_member(witness.alternate.as_general(), &p, &q).unwrap();
            c.check(feasible, || {
                format!("instance {k} ({}): alternate is infeasible", describe(&p, &q))
            });
            c.check(witness.alternate.as_general() != u.as_general(), || {
                format!("instance {k} ({}): alternate equals Ū", describe(&p, &q))
            });
            let alt_trace = trace(witness.alternate.as_general());
            let u_trace = trace(u.as_general());
            c.check(alt_trace == u_trace, || {
                format!(
                    "instance {k} ({}): alternate trace {} ≠ {}",
                    describe(&p, &q),
                    format_rational(&alt_trace),
                    format_rational(&u_trace)
                )
            });
        }
    }

    // Both directions of the theorem must actually be exercised.
    c.check(unique_seen > 0 && non_unique_seen > 0, || {
        format!("one-sided sample: {unique_seen} unique, {non_unique_seen} non-unique")
    });
    c.finish();
}

// ---------------------------------------------------------------------------
// Criterion 6
// ---------------------------------------------------------------------------

const ASSIGNMENT_INSTANCES: usize = 200;
const ASSIGNMENT_BUDGET: Duration = Duration::from_secs(120);

#[test]
fn criterion_6_assignment_integrality() {
    let mut c = Criterion::new(
        6,
        "200 random cost matrices: the augmenting-path optimum equals the LP \
         relaxation; for n ≤ 5 the relabeled trace equals the brute-force \
         maximum over all n! relabelings",
    );
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(ASSIGNMENT_SEED);
    for k in 0..ASSIGNMENT_INSTANCES {
        let n = 2 + k % 5;
        let (p, q) = random_pair(&mut rng, n);
        let costs = assignment_costs(&p, &q).unwrap();
        let sigma = solve_assignment(&costs);
        let combinatorial: Rational = (0..n).map(|i| costs.get(i, sigma.apply(i)).clone()).sum();

        let relaxation = solve(&assignment_relaxation_lp(&costs)).unwrap();
        c.check(relaxation.status == LpStatus::Optimal, || {
            format!("instance {k} ({}): relaxation not optimal", describe(&p, &q))
        });
        let lp_value = relaxation.value.expect("optimal LP carries a value");
        c.check(lp_value == combinatorial, || {
            format!(
                "instance {k} ({}): LP relaxation {} ≠ combinatorial optimum {}",
                describe(&p, &q),
                format_rational(&lp_value),
                format_rational(&combinatorial)
            )
        });

        if n <= 5 {
            let result = solve_p_perm(&p, &q).unwrap();
            let brute = (0..n)
                .permutations(n)
                .map(|mapping| {
                    let permuted_q = validate_stochastic_vector(
                        mapping.iter().map(|&j| q.get(j).clone()).collect(),
                    )
                    .unwrap();
                    trace(build_optimal_primal(&p, &permuted_q).unwrap().as_general())
                })
                .max()
                .unwrap();
            c.check(result.trace_perm == brute, || {
                format!(
                    "instance {k} ({}): relabeled trace {} ≠ brute-force {}",
                    describe(&p, &q),
                    format_rational(&result.trace_perm),
                    format_rational(&brute)
                )
            });
        }
    }
    c.budget(started, ASSIGNMENT_BUDGET);
    c.finish();
}

// ---------------------------------------------------------------------------
// Criterion 7
// ---------------------------------------------------------------------------

/// Exact piecewise-linear integration must hit 1/n to this accuracy.
const UNIFORM_SPACING_TOLERANCE: f64 = 1e-14;
/// Adaptive quadrature must hit 1/(n+1) to this accuracy.
const BETA_SPACING_TOLERANCE: f64 = 1e-9;

#[test]
fn criterion_7_wasserstein_spacings() {
    let mut c = Criterion::new(
        7,
        "consecutive 1-Wasserstein spacings: exactly 1/n for the uniform \
         family (n ≤ 12), 1/(n+1) for the beta family (n ≤ 10)",
    );
    for n in 2..=12 {
        let family = uniform_family(n).unwrap();
        let spacings = wasserstein_consecutive(&family);
        let expected = 1.0 / n as f64;
        for (i, spacing) in spacings.iter().enumerate() {
            c.check((spacing - expected).abs() <= UNIFORM_SPACING_TOLERANCE, || {
                format!(
                    "uniform n={n}: spacing {i} is {spacing:.17e}, expected {expected:.17e}"
                )
            });
        }
        c.check(spacings.len() == n - 1, || {
            format!("uniform n={n}: {} spacings, expected {}", spacings.len(), n - 1)
        });
    }
    for n in 2..=10 {
        let family = beta_family(n).unwrap();
        let spacings = wasserstein_consecutive(&family);
        let expected = 1.0 / (n as f64 + 1.0);
        for (i, spacing) in spacings.iter().enumerate() {
            c.check((spacing - expected).abs() <= BETA_SPACING_TOLERANCE, || {
                format!(
                    "beta n={n}: spacing {i} is {spacing:.17e}, expected {expected:.17e}"
                )
            });
        }
    }
    c.finish();
}

// ---------------------------------------------------------------------------
// Criterion 8
// ---------------------------------------------------------------------------

const COHERENCE_INSTANCES: usize = 100;
const COHERENCE_GRID: usize = 1001;
const COHERENCE_RESIDUAL_TOLERANCE: f64 = 1e-9;

#[test]
fn criterion_8_coherence_of_built_in_and_mapped_families() {
    let mut c = Criterion::new(
        8,
        "100 random instances: both built-in families (under the equal \
         weights they are constructed for) and their coupling-mapped images \
         stay coherent to 1e-9 on a 1001-point grid",
    );
    let mut rng = ChaCha8Rng::seed_from_u64(COHERENCE_SEED);
    for k in 0..COHERENCE_INSTANCES {
        let n = 2 + k % 5;
        // The built-in families satisfy the mixture law for equal weights,
        // so the source side of each instance is the uniform vector; the
        // target side is random. The coupling then transports coherence
        // from (p, S) to (q, ŪᵀS-mixture) — checked on both families.
        let p = StochasticVector::uniform(n);
        let q = random_stochastic_vector(&mut rng, n, DENOMINATOR_BOUND);
        let u = build_optimal_primal(&p, &q).unwrap();
        let p_float: Vec<f64> = p.iter().map(to_float).collect();
        let q_float: Vec<f64> = q.iter().map(to_float).collect();

        for (name, family) in [
            ("uniform", uniform_family(n).unwrap()),
            ("beta", beta_family(n).unwrap()),
        ] {
            let source = check_coherence(&family, &p_float, COHERENCE_GRID).unwrap();
            c.check(
                source.pass && source.max_residual <= COHERENCE_RESIDUAL_TOLERANCE,
                || {
                    format!(
                        "instance {k} ({}), {name} source: residual {:e}, \
                         {} monotonicity / {} endpoint violations",
                        describe(&p, &q),
                        source.max_residual,
                        source.monotonicity_violations.len(),
                        source.endpoint_violations.len()
                    )
                },
            );

            let mapped = apply_matrix(&u, &family).unwrap();
            let image = check_coherence(&mapped, &q_float, COHERENCE_GRID).unwrap();
            c.check(
                image.pass && image.max_residual <= COHERENCE_RESIDUAL_TOLERANCE,
                || {
                    format!(
                        "instance {k} ({}), {name} mapped: residual {:e}, \
                         {} monotonicity / {} endpoint violations",
                        describe(&p, &q),
                        image.max_residual,
                        image.monotonicity_violations.len(),
                        image.endpoint_violations.len()
                    )
                },
            );
        }
    }
    c.finish();
}

// ---------------------------------------------------------------------------
// Criterion 9
// ---------------------------------------------------------------------------

const NORMAL_CDF_TOLERANCE: f64 = 1e-12;

#[test]
fn criterion_9_standard_normal_evaluator() {
    let mut c = Criterion::new(
        9,
        "Φ matches high-precision reference values to 1e-12 at \
         x ∈ {0, ±0.5, ±1, ±2, ±4}, with Φ(0) = 1/2 exactly",
    );
    let normal = BaseCdf::standard_normal();
    // Reference values keep their full published 25-digit precision.
    #[allow(clippy::excessive_precision)]
    let table: &[(f64, f64)] = &[
        (0.0, 0.5),
        (0.5, 0.691_462_461_274_013_103_637_704_6),
        (-0.5, 0.308_537_538_725_986_896_362_295_4),
        (1.0, 0.841_344_746_068_542_948_585_232_5),
        (-1.0, 0.158_655_253_931_457_051_414_767_5),
        (2.0, 0.977_249_868_051_820_792_799_717_4),
        (-2.0, 0.022_750_131_948_179_207_200_282_64),
        (4.0, 0.999_968_328_758_166_880_078_746_2),
        (-4.0, 0.000_031_671_241_833_119_921_253_770_76),
    ];
    for &(x, reference) in table {
        let value = normal.cdf(x);
        c.check((value - reference).abs() <= NORMAL_CDF_TOLERANCE, || {
            format!("Φ({x}) = {value:.17e}, reference {reference:.17e}")
        });
    }
    c.check(normal.cdf(0.0) == 0.5, || {
        format!("Φ(0) = {:.17e}, expected exactly 0.5", normal.cdf(0.0))
    });
    c.finish();
}
