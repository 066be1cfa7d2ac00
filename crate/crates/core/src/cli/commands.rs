//! `solve`, `certify`, `eval-cd` and `ellipsoid`.
//!
//! Each `cmd_*` function performs its file I/O and returns the exit code
//! plus a human-readable summary; the `run_*`/`*_csv` helpers are pure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::certificate::{
    adjoint_expand, build_certificate, contact_points, default_contact_tolerance,
    validate_dual_feasibility, DualCertificate, DualViolation,
};
use crate::design::moment_vector;
use crate::geometry::{extract_ellipsoid, levelset_membership, Ellipsoid};
use crate::semialg::{grid_candidates, CandidateSet};
use crate::solver::solve;
use crate::Error;

use super::config::ProblemConfig;
use super::format::{fmt_f64, to_json_string};
use super::report::{
    CertificateSection, MonomialValue, RunReport, SolveSection, StatusSection, SupportRow,
    Timings, ValidationSection, WeightedPoint,
};
use super::{CliError, EXIT_NOT_CERTIFIED, EXIT_OK};

pub const REPORT_FILE: &str = "report.json";
pub const SUPPORT_FILE: &str = "support.csv";
pub const CD_GRID_FILE: &str = "cd_grid.csv";
pub const ELLIPSOID_FILE: &str = "ellipsoid.json";

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub exit_code: i32,
    pub summary: String,
}

fn validation_set(
    cfg: &ProblemConfig,
    resolution: usize,
    fallback: &CandidateSet,
) -> Result<CandidateSet, CliError> {
    let set = cfg.semialgebraic_set()?;
    match grid_candidates(&set, resolution) {
        Ok(v) => Ok(v),
        // no grid node inside the set: audit on the candidates
        Err(Error::EmptyCandidateSet) => Ok(fallback.clone()),
        Err(e) => Err(CliError::Usage(e.to_string())),
    }
}

fn check_resolution(resolution: usize) -> Result<(), CliError> {
    if resolution < 2 {
        return Err(CliError::Usage(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }
    Ok(())
}

/// Solves, certifies and validates `cfg`, returning the report and exit code.
pub fn run_solve(
    cfg: &ProblemConfig,
    base_dir: &Path,
    validation_resolution: Option<usize>,
) -> Result<(RunReport, i32), CliError> {
    let resolution = validation_resolution.unwrap_or_else(|| cfg.validation_resolution());
    check_resolution(resolution)?;
    let d = cfg.degree;

    let t0 = Instant::now();
    let candidates = cfg.candidate_set(base_dir)?;
    let t1 = Instant::now();
    let result = solve(&candidates, d, &cfg.solver)?;
    let t2 = Instant::now();
    let cert = build_certificate(&result, d)?;
    let moments = moment_vector(&result.design, d)?;
    let m_inv = cert.cd_polynomial().factor().inverse();
    let coeffs = adjoint_expand(&m_inv, cert.cd_polynomial().basis())?;
    let ellipsoid = if d == 1 {
        Some(extract_ellipsoid(&cert, cfg.dimension)?)
    } else {
        None
    };
    let t3 = Instant::now();
    let validation = validation_set(cfg, resolution, &candidates)?;
    let violation = validate_dual_feasibility(&cert, &validation)?;
    let t4 = Instant::now();

    let n_d = result.n_d;
    let validated = violation.max_violation <= n_d as f64 * cfg.solver.epsilon;
    let exit_code = if result.converged && validated {
        EXIT_OK
    } else {
        EXIT_NOT_CERTIFIED
    };

    let timings = cfg.output.timings.then(|| Timings {
        candidates_s: (t1 - t0).as_secs_f64(),
        solve_s: (t2 - t1).as_secs_f64(),
        certificate_s: (t3 - t2).as_secs_f64(),
        validation_s: (t4 - t3).as_secs_f64(),
    });

    let report = RunReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        n_d,
        status: StatusSection {
            converged: result.converged,
            validated,
        },
        solve: SolveSection {
            algorithm: result.config.algorithm,
            iterations: result.iterations,
            converged: result.converged,
            prune_rolled_back: result.prune_rolled_back,
            objective: result.objective,
            p_max: result.p_max,
            candidates: candidates.points().to_vec(),
            p_values: result.p_values.clone(),
            design: result
                .design
                .points()
                .iter()
                .zip(result.design.weights())
                .map(|(p, &w)| WeightedPoint {
                    point: p.clone(),
                    weight: w,
                })
                .collect(),
            trace: result.trace.clone(),
        },
        certificate: certificate_section(&cert),
        validation: validation_section(resolution, validation.len(), &violation),
        moments: moments
            .basis()
            .indices()
            .iter()
            .zip(moments.values())
            .map(|(a, &v)| MonomialValue {
                exponents: a.exponents().to_vec(),
                value: v,
            })
            .collect(),
        cd_coefficients: coeffs
            .basis2d
            .indices()
            .iter()
            .zip(&coeffs.coeffs)
            .map(|(a, &v)| MonomialValue {
                exponents: a.exponents().to_vec(),
                value: v,
            })
            .collect(),
        ellipsoid,
        timings,
    };
    Ok((report, exit_code))
}

fn certificate_section(cert: &DualCertificate) -> CertificateSection {
    let scale = cert.scale();
    let delta = default_contact_tolerance(cert.n_d);
    CertificateSection {
        x_hat: cert.x_hat.to_rows(),
        z_hat: cert.z_hat,
        primal_value: cert.primal_value,
        dual_value: cert.dual_value,
        dual_value_unscaled: cert.dual_value_unscaled,
        gap: cert.gap,
        gap_unscaled: cert.gap_unscaled,
        p_max: cert.p_max,
        complementarity_residual: cert.complementarity_residual,
        support: cert
            .support
            .iter()
            .map(|a| SupportRow {
                point: a.point.clone(),
                weight: a.weight,
                p_value: a.p_value,
                scaled_p_value: scale * a.p_value,
            })
            .collect(),
        contact_tolerance: delta,
        contact_points: contact_points(cert, delta),
    }
}

fn validation_section(resolution: usize, num_points: usize, v: &DualViolation) -> ValidationSection {
    ValidationSection {
        resolution,
        num_points,
        max_violation: v.max_violation,
        argmax_point: v.argmax_point.clone(),
    }
}

fn csv_header(n: usize, extra: &[&str]) -> Vec<String> {
    (1..=n)
        .map(|i| format!("x{i}"))
        .chain(extra.iter().map(|s| s.to_string()))
        .collect()
}

fn write_csv(rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Support table: coordinates, weight, `p`, scaled `p`.
pub fn support_csv(report: &RunReport) -> Result<String, CliError> {
    let header = csv_header(report.dimension(), &["weight", "p_value", "scaled_p_value"]);
    let rows = report.certificate.support.iter().map(|a| {
        a.point
            .iter()
            .map(|&c| fmt_f64(c))
            .chain([a.weight, a.p_value, a.scaled_p_value].map(fmt_f64))
            .collect()
    });
    write_csv(std::iter::once(header).chain(rows))
}

fn summarize_solve(report: &RunReport) -> String {
    let mut s = String::new();
    let c = &report.certificate;
    let _ = writeln!(s, "n_d                      {}", report.n_d);
    let _ = writeln!(s, "iterations               {}", report.solve.iterations);
    let _ = writeln!(s, "converged                {}", report.solve.converged);
    let _ = writeln!(s, "objective (log det M)    {}", fmt_f64(report.solve.objective));
    let _ = writeln!(s, "p_max                    {}", fmt_f64(c.p_max));
    let _ = writeln!(s, "gap                      {}", fmt_f64(c.gap));
    let _ = writeln!(s, "max validation violation {}", fmt_f64(report.validation.max_violation));
    let _ = writeln!(s, "support atoms            {}", c.support.len());
    for a in &c.support {
        let coords: Vec<String> = a.point.iter().map(|v| format!("{v:.6}")).collect();
        let _ = writeln!(s, "  ({})  w = {:.6}", coords.join(", "), a.weight);
    }
    s
}

/// `--out`, else `output.dir` resolved against the config's directory, else `.`.
fn out_dir(flag: Option<&Path>, cfg: &ProblemConfig, base_dir: &Path) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.output.dir.as_ref().map(|d| base_dir.join(d)))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn parent_dir(path: &Path) -> PathBuf {
    path.parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Writes `report.json` and `support.csv`; the report is written even when
/// the run does not certify.
pub fn cmd_solve(
    config_path: &Path,
    out: Option<&Path>,
    validation_resolution: Option<usize>,
) -> Result<CommandOutput, CliError> {
    let cfg = ProblemConfig::from_path(config_path)?;
    let base_dir = parent_dir(config_path);
    let (report, exit_code) = run_solve(&cfg, &base_dir, validation_resolution)?;
    let dir = out_dir(out, &cfg, &base_dir);
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join(REPORT_FILE), report.to_json()?)?;
    std::fs::write(dir.join(SUPPORT_FILE), support_csv(&report)?)?;
    Ok(CommandOutput {
        exit_code,
        summary: summarize_solve(&report),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifySummary {
    pub n_d: usize,
    pub epsilon: f64,
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub complementarity_residual: f64,
    pub max_violation: f64,
    pub argmax_point: Vec<f64>,
    pub gap_ok: bool,
    pub violation_ok: bool,
}

impl CertifySummary {
    pub fn exit_code(&self) -> i32 {
        if self.gap_ok && self.violation_ok {
            EXIT_OK
        } else {
            EXIT_NOT_CERTIFIED
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "primal value             {}", fmt_f64(self.primal_value));
        let _ = writeln!(s, "dual value               {}", fmt_f64(self.dual_value));
        let _ = writeln!(s, "gap                      {}", fmt_f64(self.gap));
        let _ = writeln!(s, "gap bound n_d log(1+eps) {}", fmt_f64(self.gap_bound()));
        let _ = writeln!(s, "complementarity residual {}", fmt_f64(self.complementarity_residual));
        let _ = writeln!(s, "max dual violation       {}", fmt_f64(self.max_violation));
        let coords: Vec<String> = self.argmax_point.iter().map(|&v| fmt_f64(v)).collect();
        let _ = writeln!(s, "  at                     ({})", coords.join(", "));
        let _ = writeln!(s, "gap ok                   {}", self.gap_ok);
        let _ = writeln!(s, "violation ok             {}", self.violation_ok);
        s
    }

    fn gap_bound(&self) -> f64 {
        self.n_d as f64 * self.epsilon.ln_1p()
    }
}

/// Re-derives the certificate of `report` and audits it on a fresh grid.
pub fn certify_report(report: &RunReport, resolution: usize) -> Result<CertifySummary, CliError> {
    check_resolution(resolution)?;
    let cert = report.rebuild_certificate()?;
    let cands = report.candidate_set()?;
    let validation = validation_set(&report.config, resolution, &cands)?;
    let v = validate_dual_feasibility(&cert, &validation)?;
    let epsilon = report.config.solver.epsilon;
    let n_d = cert.n_d;
    let mut summary = CertifySummary {
        n_d,
        epsilon,
        primal_value: cert.primal_value,
        dual_value: cert.dual_value,
        gap: cert.gap,
        complementarity_residual: cert.complementarity_residual,
        max_violation: v.max_violation,
        argmax_point: v.argmax_point,
        gap_ok: false,
        violation_ok: false,
    };
    summary.gap_ok = summary.gap <= summary.gap_bound();
    summary.violation_ok = summary.max_violation <= n_d as f64 * epsilon;
    Ok(summary)
}

pub fn cmd_certify(
    report_path: &Path,
    validation_resolution: Option<usize>,
) -> Result<CommandOutput, CliError> {
    let report = RunReport::from_path(report_path)?;
    let resolution = validation_resolution.unwrap_or(report.validation.resolution);
    let summary = certify_report(&report, resolution)?;
    Ok(CommandOutput {
        exit_code: summary.exit_code(),
        summary: summary.render(),
    })
}

/// CD polynomial on the membership-filtered grid: coordinates, raw `p`,
/// scaled `p`, and level-set membership.
pub fn eval_cd_csv(
    cfg: &ProblemConfig,
    report: &RunReport,
    resolution: usize,
) -> Result<String, CliError> {
    if cfg.dimension != report.dimension() || cfg.degree != report.degree() {
        return Err(CliError::Report(format!(
            "report is for n = {}, d = {} but config has n = {}, d = {}",
            report.dimension(),
            report.degree(),
            cfg.dimension,
            cfg.degree
        )));
    }
    check_resolution(resolution)?;
    let cert = report.rebuild_certificate()?;
    let grid = grid_candidates(&cfg.semialgebraic_set()?, resolution)?;
    let header = csv_header(cfg.dimension, &["p", "scaled_p", "inside_levelset"]);
    let mut rows = vec![header];
    for x in grid.points() {
        let p = cert.cd_polynomial().eval(x)?;
        let inside = levelset_membership(&cert, x)?;
        rows.push(
            x.iter()
                .map(|&c| fmt_f64(c))
                .chain([fmt_f64(p), fmt_f64(cert.scale() * p), inside.to_string()])
                .collect(),
        );
    }
    write_csv(rows)
}

/// Writes `cd_grid.csv` into `out`, or returns the table as the summary when
/// no output directory is given.
pub fn cmd_eval_cd(
    config_path: &Path,
    report_path: &Path,
    resolution: Option<usize>,
    out: Option<&Path>,
) -> Result<CommandOutput, CliError> {
    let cfg = ProblemConfig::from_path(config_path)?;
    let report = RunReport::from_path(report_path)?;
    let resolution = resolution.unwrap_or_else(|| cfg.validation_resolution());
    let table = eval_cd_csv(&cfg, &report, resolution)?;
    let summary = match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(CD_GRID_FILE);
            std::fs::write(&path, table)?;
            format!("wrote {}\n", path.display())
        }
        None => table,
    };
    Ok(CommandOutput {
        exit_code: EXIT_OK,
        summary,
    })
}

/// Extracts the enclosing ellipsoid of a degree-1 report.
pub fn report_ellipsoid(report: &RunReport) -> Result<Ellipsoid, CliError> {
    if report.degree() != 1 {
        return Err(CliError::Usage(format!(
            "ellipsoid extraction needs a degree-1 report, got degree {}",
            report.degree()
        )));
    }
    let cert = report.rebuild_certificate()?;
    Ok(extract_ellipsoid(&cert, report.dimension())?)
}

pub fn cmd_ellipsoid(report_path: &Path, out: Option<&Path>) -> Result<CommandOutput, CliError> {
    let report = RunReport::from_path(report_path)?;
    let e = report_ellipsoid(&report)?;
    let json = to_json_string(&e).map_err(|err| CliError::Io(err.to_string()))?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(ELLIPSOID_FILE), &json)?;
    }
    Ok(CommandOutput {
        exit_code: EXIT_OK,
        summary: json,
    })
}
