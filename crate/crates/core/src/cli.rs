//! The `distal-beam` command-line front-end.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::constraints::sweep;
use crate::error::Error;
use crate::export::{
    csv_field, csv_table, curves_csv, failed_row, fmt_num, report_row, Stroke, SvgPlot,
    REPORT_HEADER,
};
use crate::geometry::{
    distance_from_line, integrate_reference_curve, invariant_report, offset_convergent,
    offset_parallel, BeamConfig, SampledCurve,
};
use crate::oracle::{
    bump_perturbation, chain_from_curvature, compare_one, discrete_invariant_report,
    observed_orders, project_to_constraints, rod_lengths, OracleComparison,
};
use crate::scenario::{ConfigError, Scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const SVG_WIDTH: f64 = 720.0;

#[derive(Debug, Parser)]
#[command(
    name = "distal-beam",
    version,
    about = "Three-rod distal-stable beam: shapes, sweeps and disk-chain checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the three rod curves of the undeformed shape.
    Shape(CommonArgs),
    /// Sweep along a length-preserving direction and tabulate the invariants.
    Sweep(CommonArgs),
    /// Compare the continuum model with disk chains and run projection experiments.
    Oracle(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario JSON file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// Override the scenario's grid sample count (odd).
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Reserved; no command draws random numbers yet.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Why a command did not complete.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("i/o error: {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numerical(e.to_string())
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Io { .. } => EXIT_IO,
            Failure::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

/// Run a parsed command and return the files it wrote.
pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>, Failure> {
    match &cli.command {
        Command::Shape(args) => prepare(args).and_then(|(s, cfg)| cmd_shape(&s, &cfg, &args.out)),
        Command::Sweep(args) => prepare(args).and_then(|(s, cfg)| cmd_sweep(&s, &cfg, &args.out)),
        Command::Oracle(args) => prepare(args).and_then(|(s, cfg)| cmd_oracle(&s, &cfg, &args.out)),
    }
}

/// Run a parsed command line and return the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(&cli) {
        Ok(written) => {
            for path in written {
                println!("wrote {}", path.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn prepare(args: &CommonArgs) -> Result<(Scenario, BeamConfig), Failure> {
    let scenario = Scenario::load(&args.config)?;
    let cfg = scenario.beam_config(args.grid_n)?;
    Ok((scenario, cfg))
}

struct Outputs<'a> {
    dir: &'a Path,
    prefix: String,
    csv: bool,
    svg: bool,
    written: Vec<PathBuf>,
}

impl<'a> Outputs<'a> {
    fn new(scenario: &Scenario, dir: &'a Path) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
        Ok(Self {
            dir,
            prefix: scenario.prefix().to_string(),
            csv: scenario.output.csv,
            svg: scenario.output.svg,
            written: Vec::new(),
        })
    }

    fn write(&mut self, suffix: &str, contents: &str) -> Result<(), Failure> {
        let is_svg = suffix.ends_with(".svg");
        if (is_svg && !self.svg) || (!is_svg && !self.csv) {
            return Ok(());
        }
        let path = self.dir.join(format!("{}_{suffix}", self.prefix));
        fs::write(&path, contents).map_err(|e| Failure::Io {
            path: path.clone(),
            source: e,
        })?;
        self.written.push(path);
        Ok(())
    }
}

struct Rods {
    reference: SampledCurve,
    parallel: SampledCurve,
    convergent: SampledCurve,
}

impl Rods {
    fn csv(&self) -> String {
        curves_csv(&[
            ("r1", &self.reference),
            ("r2", &self.parallel),
            ("rc", &self.convergent),
        ])
    }
}

fn build_rods(kappa: &crate::FourierCurvature, cfg: &BeamConfig) -> crate::Result<Rods> {
    let reference = integrate_reference_curve(kappa, cfg)?;
    Ok(Rods {
        parallel: offset_parallel(&reference, cfg.a0()),
        convergent: offset_convergent(&reference, cfg.a0(), cfg.length()),
        reference,
    })
}

fn rods_plot(plot: &mut SvgPlot, rods: &Rods, opacity: f64) {
    for (curve, color) in [
        (&rods.reference, "#1f3b73"),
        (&rods.parallel, "#2a9d8f"),
        (&rods.convergent, "#e76f51"),
    ] {
        plot.polyline(
            curve.points.clone(),
            Stroke {
                opacity,
                ..Stroke::solid(color)
            },
        );
    }
}

fn base_line(tip: [f64; 2]) -> Vec<[f64; 2]> {
    [[0.0, 0.0], [1.15 * tip[0], 1.15 * tip[1]]].to_vec()
}

fn dashed() -> Stroke {
    Stroke {
        color: "#555555",
        width: 1.0,
        opacity: 1.0,
        dashed: true,
    }
}

fn cmd_shape(scenario: &Scenario, cfg: &BeamConfig, dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let kappa = scenario.initial_curvature(cfg)?;
    let report = invariant_report(&kappa, cfg, 0.0)?;
    let rods = build_rods(&kappa, cfg)?;

    let mut out = Outputs::new(scenario, dir)?;
    out.write("curves.csv", &rods.csv())?;
    out.write(
        "report.csv",
        &csv_table(&REPORT_HEADER, [report_row(&report, None)]),
    )?;
    let mut plot = SvgPlot::new(format!("{}: rod shapes", scenario.name));
    rods_plot(&mut plot, &rods, 1.0);
    plot.marker(report.tip, "#1f3b73");
    out.write("shape.svg", &plot.render(SVG_WIDTH))?;

    println!(
        "L1={} L2={} Lc={} theta(L)={} theta_bar={} y/x={}",
        fmt_num(report.l1),
        fmt_num(report.l2),
        fmt_num(report.lc),
        fmt_num(report.theta_tip),
        fmt_num(report.theta_bar),
        fmt_num(report.tip_ratio)
    );
    Ok(out.written)
}

fn cmd_sweep(scenario: &Scenario, cfg: &BeamConfig, dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let section = scenario.sweep.as_ref().ok_or_else(|| ConfigError {
        field: "sweep".into(),
        message: "the sweep command needs a `sweep` section".into(),
    })?;
    let kappa0 = scenario.initial_curvature(cfg)?;
    let direction = scenario.sweep_direction(cfg)?;
    let baseline = invariant_report(&kappa0, cfg, 0.0).ok();
    let results = sweep(&kappa0, &direction, &section.alphas, cfg)?;

    let mut out = Outputs::new(scenario, dir)?;
    let mut plot = SvgPlot::new(format!("{}: length-preserving sweep", scenario.name));
    let mut rows = Vec::with_capacity(results.len());
    let mut ok = 0;
    let n_frames = results.len().max(1) as f64;
    for (i, (alpha, result)) in section.alphas.iter().zip(&results).enumerate() {
        match result {
            Ok(report) => {
                ok += 1;
                rows.push(report_row(report, baseline.as_ref()));
                let rods = build_rods(&kappa0.perturbed(&direction, *alpha)?, cfg)?;
                out.write(&format!("frame_{i:03}.csv"), &rods.csv())?;
                rods_plot(&mut plot, &rods, 0.35 + 0.65 * (i as f64 + 1.0) / n_frames);
                plot.marker(report.tip, "#d62828");
                println!(
                    "alpha={} L1={} L2={} Lc={} theta(L)={} theta_bar={} y/x={}",
                    fmt_num(*alpha),
                    fmt_num(report.l1),
                    fmt_num(report.l2),
                    fmt_num(report.lc),
                    fmt_num(report.theta_tip),
                    fmt_num(report.theta_bar),
                    fmt_num(report.tip_ratio)
                );
            }
            Err(e) => {
                eprintln!("alpha={}: {e}", fmt_num(*alpha));
                rows.push(failed_row(*alpha, &e.to_string()));
            }
        }
    }
    if let Some(b) = &baseline {
        plot.polyline(base_line(b.tip), dashed());
    }
    out.write("sweep.csv", &csv_table(&REPORT_HEADER, rows))?;
    out.write("sweep.svg", &plot.render(SVG_WIDTH))?;
    if ok == 0 {
        return Err(Failure::Numerical("every sweep amplitude failed".into()));
    }
    Ok(out.written)
}

const ORACLE_HEADER: [&str; 8] = [
    "n_disks",
    "tip_angle_err",
    "tip_ratio_err",
    "theta_bar_err",
    "l1_err",
    "l2_err",
    "lc_err",
    "status",
];

type ErrorField = fn(&OracleComparison) -> f64;

const ORDER_HEADER: [&str; 5] = ["quantity", "n_coarse", "n_fine", "error_ratio", "order"];

const PROJECTION_HEADER: [&str; 11] = [
    "n_disks",
    "amplitude",
    "iterations",
    "residual",
    "tip_angle_change",
    "tip_ratio_change",
    "tip_line_offset",
    "l2_change",
    "lc_change",
    "max_strain",
    "status",
];

fn comparison_row(c: &OracleComparison) -> Vec<String> {
    vec![
        c.n_disks.to_string(),
        fmt_num(c.tip_angle_err),
        fmt_num(c.tip_ratio_err),
        fmt_num(c.theta_bar_err),
        fmt_num(c.l1_err),
        fmt_num(c.l2_err),
        fmt_num(c.lc_err),
        "ok".into(),
    ]
}

fn cmd_oracle(scenario: &Scenario, cfg: &BeamConfig, dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let section = scenario.oracle.as_ref().ok_or_else(|| ConfigError {
        field: "oracle".into(),
        message: "the oracle command needs an `oracle` section".into(),
    })?;
    let kappa = scenario.initial_curvature(cfg)?;
    let continuum = invariant_report(&kappa, cfg, 0.0)?;

    let mut out = Outputs::new(scenario, dir)?;
    let mut cases = 0;
    let mut failures = 0;

    let mut table = Vec::new();
    let mut converged: Vec<OracleComparison> = Vec::new();
    for &n in &section.n_disks {
        cases += 1;
        match compare_one(&kappa, cfg, &continuum, n) {
            Ok(c) => {
                table.push(comparison_row(&c));
                converged.push(c);
            }
            Err(e) => {
                failures += 1;
                eprintln!("n_disks={n}: {e}");
                let mut row = vec![n.to_string()];
                row.extend(std::iter::repeat_n(String::new(), ORACLE_HEADER.len() - 2));
                row.push(csv_field(&e.to_string()));
                table.push(row);
            }
        }
    }
    out.write("oracle.csv", &csv_table(&ORACLE_HEADER, table))?;

    let quantities: [(&str, ErrorField); 6] = [
        ("tip_angle", |c| c.tip_angle_err),
        ("tip_ratio", |c| c.tip_ratio_err),
        ("theta_bar", |c| c.theta_bar_err),
        ("l1", |c| c.l1_err),
        ("l2", |c| c.l2_err),
        ("lc", |c| c.lc_err),
    ];
    let mut order_rows = Vec::new();
    for (name, get) in quantities {
        let errors: Vec<f64> = converged.iter().map(get).collect();
        for (i, order) in observed_orders(&errors).into_iter().enumerate() {
            let ratio = errors[i] / errors[i + 1];
            order_rows.push(vec![
                name.to_string(),
                converged[i].n_disks.to_string(),
                converged[i + 1].n_disks.to_string(),
                if order.is_some() {
                    fmt_num(ratio)
                } else {
                    String::new()
                },
                order.map(fmt_num).unwrap_or_else(|| "converged".into()),
            ]);
            if let Some(o) = order {
                println!(
                    "{name}: n {} -> {}: error ratio {} order {}",
                    converged[i].n_disks,
                    converged[i + 1].n_disks,
                    fmt_num(ratio),
                    fmt_num(o)
                );
            }
        }
    }
    out.write("oracle_orders.csv", &csv_table(&ORDER_HEADER, order_rows))?;

    if let Some(p) = &section.perturbation {
        let mut plot = SvgPlot::new(format!("{}: projected disk chains", scenario.name));
        let mut rows = Vec::new();
        for &n in &p.n_disks {
            cases += 1;
            let outcome = (|| -> crate::Result<Vec<String>> {
                let chain = chain_from_curvature(&kappa, cfg, n)?;
                let before = discrete_invariant_report(&chain)?;
                let target = rod_lengths(&chain);
                let bump = bump_perturbation(&chain, p.amplitude, p.center, p.width);
                let projected = project_to_constraints(&chain, &target, &bump)?;
                let after = discrete_invariant_report(&projected.chain)?;
                plot.polyline(chain.backbone(), Stroke::solid("#1f3b73"));
                plot.polyline(projected.chain.backbone(), Stroke::solid("#d62828"));
                plot.polyline(base_line(before.tip), dashed());
                let line_offset = distance_from_line(after.tip, before.theta_bar);
                println!(
                    "n_disks={n}: {} iterations, tip angle change {}, tip line offset {}",
                    projected.iterations,
                    fmt_num(after.theta_tip - before.theta_tip),
                    fmt_num(line_offset)
                );
                Ok(vec![
                    n.to_string(),
                    fmt_num(p.amplitude),
                    projected.iterations.to_string(),
                    fmt_num(projected.residual),
                    fmt_num(after.theta_tip - before.theta_tip),
                    fmt_num(after.tip_ratio - before.tip_ratio),
                    fmt_num(line_offset),
                    fmt_num(after.l2 - before.l2),
                    fmt_num(after.lc - before.lc),
                    fmt_num(after.max_strain),
                    "ok".into(),
                ])
            })();
            match outcome {
                Ok(row) => rows.push(row),
                Err(e) => {
                    failures += 1;
                    eprintln!("projection n_disks={n}: {e}");
                    let mut row = vec![n.to_string(), fmt_num(p.amplitude)];
                    row.extend(std::iter::repeat_n(
                        String::new(),
                        PROJECTION_HEADER.len() - 3,
                    ));
                    row.push(csv_field(&e.to_string()));
                    rows.push(row);
                }
            }
        }
        out.write(
            "oracle_projection.csv",
            &csv_table(&PROJECTION_HEADER, rows),
        )?;
        out.write("oracle.svg", &plot.render(SVG_WIDTH))?;
    }

    if failures == cases {
        return Err(Failure::Numerical("every oracle case failed".into()));
    }
    Ok(out.written)
}

#[cfg(test)]
#[path = "cli_tests.rs"]
mod tests;
