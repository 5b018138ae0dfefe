use hcm_core::kinematics::{
    enumerate_solutions_with, forward_presets, forward_residual, inverse_residual,
    to_local_frame, Enumeration, LimbVars,
};
use hcm_core::nalgebra::Vector3;
use hcm_core::{find_case, reference_cases, CaseKind, Corrector, ReferenceCase};

use crate::compare::{bench_compare, solution_distance, Comparison};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::report::{BenchRecord, Cell, Report, TraceRecord};

/// Initial guesses `(theta1 deg, theta2 deg, L)` that should all reach the
/// first inverse root.
pub const INITIAL_GUESSES: [[f64; 3]; 4] = [
    [1.0, 10.0, 1.5],
    [5729.0, 85.94, 0.5],
    [-150.0, -81.0, 10.0],
    [-0.05, 0.45, 100.0],
];

const TIMING_NOTE: &str = "Runtime is the median tracking time over the repeats; problem setup and I/O are excluded.";

fn cases_of(kind: CaseKind) -> Vec<ReferenceCase> {
    reference_cases().into_iter().filter(|c| c.kind == kind).collect()
}

fn status(converged: bool) -> Cell {
    Cell::text(if converged { "converged" } else { "diverged" })
}

fn reduction_cell(record: &BenchRecord) -> Cell {
    record.reduction_percent.map_or_else(|| Cell::text(""), Cell::num)
}

/// Reproduces one of the four result tables.
pub fn run_table(table: u8, config: &RunConfig) -> CliResult<Report> {
    config.validate()?;
    match table {
        1 => Ok(comparison_table(CaseKind::Inverse, config)?.0),
        2 => Ok(comparison_table(CaseKind::Forward, config)?.0),
        3 => table3(config),
        4 => table4(config),
        other => Err(CliError::Usage(format!("unknown table {other}; expected 1, 2, 3 or 4"))),
    }
}

/// Table 1 or 2: both methods per case with iterations, runtimes and reduction.
pub fn comparison_table(kind: CaseKind, config: &RunConfig) -> CliResult<(Report, Vec<Comparison>)> {
    let (title, units): (&str, [&str; 3]) = match kind {
        CaseKind::Inverse => ("Inverse kinematics", ["theta1 (deg)", "theta2 (deg)", "L"]),
        CaseKind::Forward => ("Direct kinematics", ["P", "Y", "Z"]),
    };
    let mut report = Report::new(
        format!("{title}: Newton and Ostrowski continuation"),
        &["No.", "G1, G2, G3", "Method", units[0], units[1], units[2], "Iteration", "Runtime (s)", "Reduction %", "Status"],
    );
    report.notes.push(TIMING_NOTE.into());
    let mut comparisons = Vec::new();
    for case in cases_of(kind) {
        let cmp = bench_compare(&case, config)?;
        for record in [&cmp.ostrowski, &cmp.newton] {
            let mut row = vec![Cell::int(case.row), Cell::text(case.preset().label), Cell::text(record.method.name())];
            row.extend(record.solution.iter().map(|v| Cell::num(*v)));
            row.extend([
                Cell::int(record.iterations),
                Cell::num(record.runtime_seconds),
                if record.method == Corrector::Ostrowski { reduction_cell(record) } else { Cell::text("") },
                status(record.converged),
            ]);
            report.push_row(row);
        }
        report.records.extend([cmp.ostrowski.clone(), cmp.newton.clone()]);
        report.traces.extend(cmp.traces.iter().cloned());
        report.failures.extend(cmp.violation());
        comparisons.push(cmp);
    }
    Ok((report, comparisons))
}

/// Runs every forward preset with the selected method.
pub fn enumerate(config: &RunConfig) -> CliResult<Enumeration> {
    let method = config.single_method();
    let cases = cases_of(CaseKind::Forward);
    Ok(enumerate_solutions_with(&config.params, &forward_presets(), |id| {
        config.tracker(&cases[id - 1], method)
    })?)
}

fn enumeration_traces(enumeration: &Enumeration, report: &mut Report) {
    for outcome in &enumeration.outcomes {
        if let Some(points) = &outcome.solution.report.trace {
            report.traces.push(TraceRecord {
                label: format!("forward-{}", outcome.preset_id),
                points: points.clone(),
            });
        }
    }
}

fn enumeration_failures(enumeration: &Enumeration, report: &mut Report) {
    for outcome in &enumeration.outcomes {
        if let Some(f) = &outcome.solution.report.failure {
            report.failures.push(format!("forward-{}: {:?} at t = {}", outcome.preset_id, f.kind, f.t));
        }
    }
    for (preset, root) in enumeration.duplicates() {
        report.failures.push(format!("forward-{preset}: duplicates root {}", root + 1));
    }
}

/// Table 3: every signed `(X, Y, Z)` from the forward roots.
pub fn table3(config: &RunConfig) -> CliResult<Report> {
    let enumeration = enumerate(config)?;
    let mut report = Report::new("Final solutions of the direct kinematics problem", &["Solution", "P", "X", "Y", "Z"]);
    for (i, root) in enumeration.roots.iter().enumerate() {
        if root.x_branches.is_empty() {
            report.failures.push(format!("root {} has no real X (P < Y^2 + Z^2)", i + 1));
        }
        for x in &root.x_branches {
            report.push_row(vec![Cell::int(i + 1), Cell::num(root.p), Cell::num(*x), Cell::num(root.y), Cell::num(root.z)]);
        }
    }
    enumeration_traces(&enumeration, &mut report);
    enumeration_failures(&enumeration, &mut report);
    Ok(report)
}

/// Table 4: the first inverse preset from several initial guesses.
pub fn table4(config: &RunConfig) -> CliResult<Report> {
    let case = find_case("inverse-1").expect("registered case");
    let method = config.single_method();
    let mut report = Report::new(
        format!("Initial guesses with auxiliary set 1 ({})", method.name()),
        &["No.", "theta1_0 (deg)", "theta2_0 (deg)", "L_0", "theta1 (deg)", "theta2 (deg)", "L", "Iteration", "Status"],
    );
    let tracker = config.tracker(&case, method);
    for (i, guess) in INITIAL_GUESSES.iter().enumerate() {
        let problem = case.limb_problem(&config.params, config.pose, 0, case.to_solver_units(*guess))?;
        let run = problem.run(&tracker)?;
        let mut row = vec![Cell::int(i + 1)];
        row.extend(guess.iter().chain(&run.solution).map(|v| Cell::num(*v)));
        row.extend([Cell::int(run.report.total_corrector_iterations), status(run.report.converged)]);
        report.push_row(row);
        if let Some(points) = run.report.trace {
            report.traces.push(TraceRecord { label: format!("guess-{}", i + 1), points });
        }
        if !run.report.converged {
            report.failures.push(format!("guess {} did not converge", i + 1));
        }
    }
    Ok(report)
}

/// Forward kinematics for the configured geometry, one row per preset.
pub fn forward(config: &RunConfig) -> CliResult<Report> {
    config.validate()?;
    let method = config.single_method();
    let enumeration = enumerate(config)?;
    let mut report = Report::new(
        format!("Forward kinematics ({})", method.name()),
        &["Preset", "G1, G2, G3", "P", "Y", "Z", "X", "Root", "Iteration", "Residual", "Status"],
    );
    report.notes.push("X is listed as the non-negative branch; -X is also a solution.".into());
    let presets = forward_presets();
    for (outcome, preset) in enumeration.outcomes.iter().zip(&presets) {
        let root = &outcome.solution.root;
        let r = &outcome.solution.report;
        report.push_row(vec![
            Cell::int(outcome.preset_id),
            Cell::text(preset.label),
            Cell::num(root.p),
            Cell::num(root.y),
            Cell::num(root.z),
            root.x_branches.first().map_or_else(|| Cell::text("none"), |x| Cell::num(*x)),
            outcome.root_index.map_or_else(|| Cell::text(""), |i| Cell::int(i + 1)),
            Cell::int(r.total_corrector_iterations),
            Cell::num(r.final_residual_norm),
            status(r.converged),
        ]);
    }
    enumeration_traces(&enumeration, &mut report);
    enumeration_failures(&enumeration, &mut report);
    Ok(report)
}

/// Inverse kinematics of every limb for the configured pose, with both
/// auxiliary presets.
pub fn inverse(config: &RunConfig) -> CliResult<Report> {
    config.validate()?;
    let method = config.single_method();
    let mut report = Report::new(
        format!("Inverse kinematics at pose {:?} ({})", config.pose, method.name()),
        &["Limb", "Preset", "theta1 (deg)", "theta2 (deg)", "L", "Iteration", "Residual", "Status"],
    );
    for limb in 0..config.params.limb_count() {
        for case in cases_of(CaseKind::Inverse) {
            let problem = case.limb_problem(&config.params, config.pose, limb, case.start())?;
            let run = problem.run(&config.tracker(&case, method))?;
            let mut row = vec![Cell::int(limb + 1), Cell::int(case.row)];
            row.extend(run.solution.iter().map(|v| Cell::num(*v)));
            row.extend([
                Cell::int(run.report.total_corrector_iterations),
                Cell::num(run.report.final_residual_norm),
                status(run.report.converged),
            ]);
            report.push_row(row);
            if let Some(points) = run.report.trace {
                report.traces.push(TraceRecord { label: format!("limb-{} preset-{}", limb + 1, case.row), points });
            }
            if !run.report.converged {
                report.failures.push(format!("limb {} preset {} did not converge", limb + 1, case.row));
            }
        }
    }
    Ok(report)
}

/// Paired comparison records for one case or for all of them.
pub fn bench(case_id: Option<&str>, config: &RunConfig) -> CliResult<Report> {
    config.validate()?;
    let cases = match case_id {
        Some(id) => vec![find_case(id).ok_or_else(|| CliError::Usage(format!("unknown case {id}")))?],
        None => reference_cases(),
    };
    let mut report = Report::new(
        "Newton-HCM vs Ostrowski-HCM",
        &["Case", "Method", "x1", "x2", "x3", "Iteration", "Runtime (s)", "Reduction %", "Residual", "Criterion"],
    );
    report.notes.push(TIMING_NOTE.into());
    for case in cases {
        let cmp = bench_compare(&case, config)?;
        for record in [&cmp.newton, &cmp.ostrowski] {
            let mut row = vec![Cell::text(record.case.clone()), Cell::text(record.method.name())];
            row.extend(record.solution.iter().map(|v| Cell::num(*v)));
            row.extend([
                Cell::int(record.iterations),
                Cell::num(record.runtime_seconds),
                reduction_cell(record),
                Cell::num(record.final_residual_norm),
                Cell::text(if cmp.criterion_met { "met" } else { "violated" }),
            ]);
            report.push_row(row);
        }
        report.records.extend([cmp.newton.clone(), cmp.ostrowski.clone()]);
        report.traces.extend(cmp.traces.iter().cloned());
        report.failures.extend(cmp.violation());
    }
    Ok(report)
}

/// Checks the registered cases against their published roots.
pub fn verify(config: &RunConfig) -> CliResult<Report> {
    config.validate()?;
    let mut report = Report::new("Verification", &["Check", "Result", "Detail"]);
    let check = |report: &mut Report, name: String, pass: bool, detail: String| {
        report.push_row(vec![Cell::text(name.clone()), Cell::text(if pass { "PASS" } else { "FAIL" }), Cell::text(detail.clone())]);
        if !pass {
            report.failures.push(format!("{name}: {detail}"));
        }
    };
    for case in reference_cases() {
        let cmp = bench_compare(&case, config)?;
        let o = &cmp.ostrowski;
        let off = solution_distance(case.kind, &o.solution, &case.published);
        let residual = published_residual(&case, &o.solution, config);
        check(
            &mut report,
            format!("{} root", case.id()),
            o.converged && off < 1e-3 && residual < 1e-8,
            format!("solution {:?}, off by {off:.2e}, residual {residual:.2e}", o.solution),
        );
        check(
            &mut report,
            format!("{} criterion", case.id()),
            cmp.criterion_met && o.iterations < cmp.newton.iterations,
            format!(
                "iterations {} vs {}, difference {:.2e}, residuals {:.2e} vs {:.2e}",
                o.iterations, cmp.newton.iterations, cmp.agreement, o.final_residual_norm, cmp.newton.final_residual_norm
            ),
        );
    }
    let enumeration = enumerate(config)?;
    let signed = enumeration.positions().len();
    check(
        &mut report,
        "distinct forward roots".into(),
        enumeration.roots.len() == 8 && signed == 16,
        format!("{} roots, {signed} signed solutions", enumeration.roots.len()),
    );
    Ok(report)
}

/// Residual of a published-unit solution against the case's target equations.
fn published_residual(case: &ReferenceCase, solution: &[f64; 3], config: &RunConfig) -> f64 {
    match case.kind {
        CaseKind::Forward => forward_residual(&Vector3::from(*solution), &config.params)
            .map_or(f64::INFINITY, |r| r.amax()),
        CaseKind::Inverse => {
            let local = to_local_frame(&Vector3::from(config.pose), config.params.betas[0]);
            let vars = LimbVars::from_degrees(solution[0], solution[1], solution[2]);
            inverse_residual(vars, &local, config.params.e, config.params.dr).amax()
        }
    }
}
