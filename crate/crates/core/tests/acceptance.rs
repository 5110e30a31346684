//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::time::Instant;

use distal_beam::constraints::{
    amplitude_limit, build_constraint_matrix, fit_initial_curvature, nullspace, sweep,
};
use distal_beam::curvature::{eval_basis, BasisKind, FourierCurvature};
use distal_beam::geometry::{
    distance_from_line, integrate_reference_curve, invariant_report, length_numeric,
    offset_convergent, offset_parallel, BeamConfig, InvariantReport,
};
use distal_beam::oracle::{
    bump_perturbation, chain_from_curvature, compare_with_continuum, discrete_invariant_report,
    observed_orders, project_to_constraints, rod_lengths, REFINEMENT_N_DISKS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STRAIN_BOUND: f64 = 0.5;
const SHAPE_SEED: u64 = 20_240_517;

struct Outcome {
    pass: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            pass: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.pass &= ok;
        self.details
            .push(format!("{} {detail}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn table1() -> (BeamConfig, FourierCurvature) {
    let cfg = BeamConfig::with_default_grid(1.0, (1.00 - 0.92) / 0.52, 3).unwrap();
    let kappa = fit_initial_curvature(0.52, 0.053f64.atan(), &cfg).unwrap();
    (cfg, kappa)
}

fn table1_sweep(fractions: &[f64]) -> (f64, Vec<InvariantReport>) {
    let (cfg, kappa0) = table1();
    let basis = nullspace(&build_constraint_matrix(&cfg)).unwrap();
    let dir = basis.midspan_direction(cfg.length()).unwrap();
    let alpha_max = amplitude_limit(&kappa0, &dir, &cfg, STRAIN_BOUND).unwrap();
    let alphas: Vec<f64> = fractions.iter().map(|f| f * alpha_max).collect();
    let rows = sweep(&kappa0, &dir, &alphas, &cfg)
        .unwrap()
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .unwrap();
    (alpha_max, rows)
}

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    max - min
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let (alpha_max, rows) = table1_sweep(&[0.0, 0.5, 1.0]);
    let elapsed = start.elapsed().as_secs_f64();
    let base = &rows[0];
    let last = rows.last().unwrap();
    o.details.push(format!(
        "alpha_max = {alpha_max:.5} (strain bound {STRAIN_BOUND})"
    ));
    for r in &rows {
        o.details.push(format!(
            "alpha={:.4} L1={:.10} L2={:.10} Lc={:.7} theta(L)={:.10} theta_bar={:.7} y/x={:.6}",
            r.alpha, r.l1, r.l2, r.lc, r.theta_tip, r.theta_bar, r.tip_ratio
        ));
    }
    let l1 = spread(rows.iter().map(|r| r.l1));
    let l2 = spread(rows.iter().map(|r| r.l2));
    o.check(l1 <= 1e-8, format!("L1 spread {l1:.2e} <= 1e-8"));
    o.check(l2 <= 1e-8, format!("L2 spread {l2:.2e} <= 1e-8"));
    let tip = rows
        .iter()
        .map(|r| (r.theta_tip - 0.52).abs())
        .fold(0.0, f64::max);
    o.check(
        tip <= 1e-8,
        format!("max |theta(L) - 0.52| {tip:.2e} <= 1e-8"),
    );
    let lc = rows
        .iter()
        .map(|r| ((r.lc - base.lc) / base.lc).abs())
        .fold(0.0, f64::max);
    o.check(lc <= 5e-3, format!("Lc relative drift {lc:.2e} <= 5e-3"));
    let in_band = rows.iter().all(|r| (0.048..=0.061).contains(&r.tip_ratio));
    o.check(in_band, "y/x within [0.048, 0.061]".into());
    let drift = (last.tip_ratio - base.tip_ratio).abs();
    o.check(
        drift <= 5e-3,
        format!("y/x drift at largest amplitude {drift:.2e} <= 5e-3"),
    );
    o.check(elapsed < 1.0, format!("runtime {elapsed:.3} s < 1 s"));
    o
}

/// Composite Simpson rule with `n` (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, length: f64, n: usize) -> f64 {
    let h = length / n as f64;
    let inner: f64 = (1..n)
        .map(|i| f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    h / 3.0 * (f(0.0) + inner + f(length))
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    for (length, modes) in [(1.0, 3), (1.0, 5), (2.5, 4)] {
        let cfg = BeamConfig::with_default_grid(length, 0.1 * length, modes).unwrap();
        let a = build_constraint_matrix(&cfg);
        let mut worst: f64 = 0.0;
        let mut zeros = true;
        for j in 0..2 * modes {
            let (mode, kind) = if j < modes {
                (j + 1, BasisKind::Cos)
            } else {
                (j - modes + 1, BasisKind::Sin)
            };
            let b = |s: f64| eval_basis(mode, kind, s.min(length), length).unwrap();
            let row0 = simpson(b, length, 20_000);
            let row1 = simpson(|s| s * b(s), length, 20_000);
            worst = worst
                .max((a.row(0)[j] - row0).abs())
                .max((a.row(1)[j] - row1).abs());
            if kind == BasisKind::Cos && a.row(0)[j] != 0.0 {
                zeros = false;
            }
        }
        o.check(
            worst <= 1e-8,
            format!("L={length} M={modes}: max |analytic - quadrature| {worst:.2e} <= 1e-8"),
        );
        o.check(
            zeros,
            format!("L={length} M={modes}: cosine row-0 entries exactly 0"),
        );
    }
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    for modes in [2, 3, 5] {
        let cfg = BeamConfig::with_default_grid(1.0, 0.1, modes).unwrap();
        let a = build_constraint_matrix(&cfg);
        let basis = nullspace(&a).unwrap();
        o.check(
            basis.dim() == 2 * modes - 2,
            format!("M={modes}: dimension {} == {}", basis.dim(), 2 * modes - 2),
        );
        let residual = basis
            .vectors()
            .iter()
            .map(|v| {
                let r = a.apply(v);
                r[0].hypot(r[1])
            })
            .fold(0.0, f64::max);
        o.check(
            residual <= 1e-10,
            format!("M={modes}: max ||A v|| {residual:.2e} <= 1e-10"),
        );
        let mut ortho: f64 = 0.0;
        for (i, u) in basis.vectors().iter().enumerate() {
            for (j, v) in basis.vectors().iter().enumerate() {
                let dot: f64 = u.iter().zip(v).map(|(x, y)| x * y).sum();
                ortho = ortho.max((dot - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        o.check(
            ortho <= 1e-12,
            format!("M={modes}: orthonormality error {ortho:.2e} <= 1e-12"),
        );
    }
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let (alpha_max, rows) = table1_sweep(&[0.0, 0.2, 0.4, 0.8]);
    o.details
        .push(format!("alpha = {{0.2, 0.4, 0.8}} x {alpha_max:.5}"));
    let base = &rows[0];
    for (name, get) in [
        (
            "Lc",
            (|r: &InvariantReport| r.lc) as fn(&InvariantReport) -> f64,
        ),
        ("tip ratio", |r| r.tip_ratio),
    ] {
        let drifts: Vec<f64> = rows[1..].iter().map(|r| get(r) - get(base)).collect();
        o.details.push(format!(
            "{name} drifts {:.3e} {:.3e} {:.3e}",
            drifts[0], drifts[1], drifts[2]
        ));
        for w in drifts.windows(2) {
            let ratio = w[1] / w[0];
            o.check(
                (2.5..=6.0).contains(&ratio),
                format!("{name} drift(2a)/drift(a) = {ratio:.3} in [2.5, 6]"),
            );
        }
    }
    o
}

/// A smooth random shape scaled so that `max a0 |kappa|` equals a drawn target.
fn random_shape(rng: &mut ChaCha8Rng) -> (BeamConfig, FourierCurvature, f64) {
    let modes = rng.random_range(2..=5);
    let length = rng.random_range(0.5..2.0);
    let a0 = length * rng.random_range(0.1..0.25);
    let cfg = BeamConfig::with_default_grid(length, a0, modes).unwrap();
    let raw: Vec<f64> = (0..2 * modes)
        .map(|j| rng.random_range(-1.0..1.0) / (1 + j % modes) as f64)
        .collect();
    let kappa = FourierCurvature::new(raw.clone(), length).unwrap();
    let peak = kappa
        .sample(cfg.grid())
        .unwrap()
        .iter()
        .fold(0.0f64, |m, k| m.max(k.abs()));
    let strain = rng.random_range(0.05..=STRAIN_BOUND);
    let scale = strain / (a0 * peak);
    let kappa = FourierCurvature::new(raw.iter().map(|c| c * scale).collect(), length).unwrap();
    (cfg, kappa, strain)
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SHAPE_SEED);
    let (mut worst_l2, mut worst_lc): (f64, f64) = (0.0, 0.0);
    let mut max_strain: f64 = 0.0;
    for _ in 0..20 {
        let (cfg, kappa, _) = random_shape(&mut rng);
        let report = invariant_report(&kappa, &cfg, 0.0).unwrap();
        let reference = integrate_reference_curve(&kappa, &cfg).unwrap();
        let l2_poly = length_numeric(&offset_parallel(&reference, cfg.a0()));
        let lc_poly = length_numeric(&offset_convergent(&reference, cfg.a0(), cfg.length()));
        worst_l2 = worst_l2.max((report.l2 - l2_poly).abs() / cfg.length());
        worst_lc = worst_lc.max((report.lc - lc_poly).abs() / cfg.length());
        max_strain = max_strain.max(report.max_strain.abs());
    }
    o.details.push(format!(
        "20 shapes, seed {SHAPE_SEED}, largest a0|kappa| {max_strain:.4}"
    ));
    o.check(
        max_strain <= STRAIN_BOUND + 1e-12,
        format!("max a0|kappa| {max_strain:.4} <= {STRAIN_BOUND}"),
    );
    o.check(
        worst_l2 <= 1e-6,
        format!("max |L2 closed form - polyline| / L {worst_l2:.2e} <= 1e-6"),
    );
    o.check(
        worst_lc <= 1e-6,
        format!("max |Lc quadrature - polyline| / L {worst_lc:.2e} <= 1e-6"),
    );
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let (cfg, kappa) = table1();
    let (_, rows) = compare_with_continuum(&kappa, &cfg, &REFINEMENT_N_DISKS).unwrap();
    for (name, errors) in [
        (
            "tip angle",
            rows.iter().map(|r| r.tip_angle_err).collect::<Vec<_>>(),
        ),
        ("tip ratio", rows.iter().map(|r| r.tip_ratio_err).collect()),
    ] {
        o.details.push(format!(
            "{name} errors {}",
            errors
                .iter()
                .map(|e| format!("{e:.3e}"))
                .collect::<Vec<_>>()
                .join(" ")
        ));
        for (i, order) in observed_orders(&errors).into_iter().enumerate() {
            let pair = format!("{} -> {}", REFINEMENT_N_DISKS[i], REFINEMENT_N_DISKS[i + 1]);
            match order {
                Some(p) => o.check(p >= 1.8, format!("{name} order {pair}: {p:.3} >= 1.8")),
                None => o.check(
                    true,
                    format!("{name} {pair}: both errors at rounding level (converged)"),
                ),
            }
        }
    }

    for n in [41, 81] {
        for (amplitude, center) in [(2.0, 0.5), (-2.0, 0.3), (1.0, 0.7)] {
            let chain = chain_from_curvature(&kappa, &cfg, n).unwrap();
            let before = discrete_invariant_report(&chain).unwrap();
            let bump = bump_perturbation(&chain, amplitude, center, 0.15);
            let projected = project_to_constraints(&chain, &rod_lengths(&chain), &bump).unwrap();
            let after = discrete_invariant_report(&projected.chain).unwrap();
            let dtheta = (after.theta_tip - before.theta_tip).abs();
            let offset = distance_from_line(after.tip, before.theta_bar).abs() / cfg.length();
            o.check(
                dtheta <= 1e-3 && offset <= 1e-2,
                format!(
                    "n={n} bump {amplitude} at {center}: |d theta(L)| {dtheta:.2e} <= 1e-3, line offset {offset:.2e} <= 1e-2 L"
                ),
            );
        }
    }
    o
}

type Criterion = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Criterion); 6] = [
        ("1 reference-shape invariance sweep", criterion_1),
        ("2 constraint-matrix exactness", criterion_2),
        ("3 nullspace contract", criterion_3),
        ("4 second-order drift scaling", criterion_4),
        ("5 dual-path length oracles", criterion_5),
        ("6 disk-chain convergence and projection", criterion_6),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = run();
        println!(
            "criterion {name}: {}",
            if outcome.pass { "PASS" } else { "FAIL" }
        );
        for d in &outcome.details {
            println!("    {d}");
        }
        if !outcome.pass {
            failed += 1;
        }
    }
    println!(
        "criterion 7 stiffness measurements and robot demonstrations: OUT OF SCOPE (purely geometric model, no elasticity)"
    );
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
