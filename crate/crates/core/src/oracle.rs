//! Discrete cross-check: a chain of rigid guide disks joined by hinges.
//!
//! Disk `k` sits at reference arc length `s_k = k h`, `h = L / (n - 1)`,
//! with orientation `theta_k = phi_0 + ... + phi_{k-1}`. Consecutive disks are
//! joined by a rigid link of length `h` whose direction bisects the two disk
//! orientations, so the backbone is always exactly `L` long. Each disk holds
//! three holes on its normal line at offsets `0`, `a0` and `a0 (1 - s_k / L)`,
//! and each rod is the polyline through its holes.
//!
//! Nothing here uses the Fourier machinery except [`chain_from_curvature`],
//! which samples the closed-form tangent angle at the disk stations.

use crate::curvature::FourierCurvature;
use crate::error::{Error, Result};
use crate::geometry::{distance_from_line, invariant_report, BeamConfig, InvariantReport};

/// Default disk count.
pub const DEFAULT_N_DISKS: usize = 41;

/// Disk counts of the refinement study (intervals double each step).
pub const REFINEMENT_N_DISKS: [usize; 4] = [21, 41, 81, 161];

const PROJECTION_TOL: f64 = 1e-10;
const PROJECTION_MAX_ITER: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct DiskChain {
    length: f64,
    a0: f64,
    joint_angles: Vec<f64>,
}

/// Polyline lengths of the three rods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RodLengths {
    pub l1: f64,
    pub l2: f64,
    pub lc: f64,
}

#[derive(Debug, Clone, Copy)]
struct Station {
    backbone: [f64; 2],
    theta: f64,
}

impl DiskChain {
    pub fn new(length: f64, a0: f64, joint_angles: Vec<f64>) -> Result<Self> {
        if joint_angles.len() < 2 {
            return Err(Error::domain(format!(
                "a chain needs at least 3 disks, got {}",
                joint_angles.len() + 1
            )));
        }
        if !(length > 0.0 && a0 > 0.0) || !length.is_finite() || !a0.is_finite() {
            return Err(Error::domain("length and a0 must be positive"));
        }
        if joint_angles.iter().any(|p| !p.is_finite()) {
            return Err(Error::domain("joint angles must be finite"));
        }
        Ok(Self {
            length,
            a0,
            joint_angles,
        })
    }

    /// A straight chain.
    pub fn straight(length: f64, a0: f64, n_disks: usize) -> Result<Self> {
        Self::new(length, a0, vec![0.0; n_disks.saturating_sub(1)])
    }

    pub fn n_disks(&self) -> usize {
        self.joint_angles.len() + 1
    }

    pub fn segment_length(&self) -> f64 {
        self.length / self.joint_angles.len() as f64
    }

    pub fn joint_angles(&self) -> &[f64] {
        &self.joint_angles
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    /// Reference arc length of disk `k`.
    pub fn station(&self, k: usize) -> f64 {
        if k == self.joint_angles.len() {
            self.length
        } else {
            self.length * k as f64 / self.joint_angles.len() as f64
        }
    }

    /// Normal offsets of the (reference, parallel, convergent) holes at disk `k`.
    pub fn hole_offsets(&self, k: usize) -> [f64; 3] {
        let taper = if k == self.joint_angles.len() {
            0.0
        } else {
            self.a0 * (1.0 - self.station(k) / self.length)
        };
        [0.0, self.a0, taper]
    }

    /// Orientation of every disk.
    pub fn disk_angles(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_disks());
        let mut acc = 0.0;
        out.push(acc);
        for phi in &self.joint_angles {
            acc += phi;
            out.push(acc);
        }
        out
    }

    fn stations(&self) -> Vec<Station> {
        let h = self.segment_length();
        let angles = self.disk_angles();
        let mut out = Vec::with_capacity(angles.len());
        let mut p = [0.0, 0.0];
        out.push(Station {
            backbone: p,
            theta: 0.0,
        });
        for k in 0..self.joint_angles.len() {
            let (sin, cos) = (0.5 * (angles[k] + angles[k + 1])).sin_cos();
            p = [p[0] + h * cos, p[1] + h * sin];
            out.push(Station {
                backbone: p,
                theta: angles[k + 1],
            });
        }
        out
    }

    /// Backbone points at the disk stations.
    pub fn backbone(&self) -> Vec<[f64; 2]> {
        self.stations().iter().map(|s| s.backbone).collect()
    }

    /// Hole positions of one rod (0 reference, 1 parallel, 2 convergent).
    pub fn rod_points(&self, rod: usize) -> Vec<[f64; 2]> {
        self.stations()
            .iter()
            .enumerate()
            .map(|(k, st)| hole(st, self.hole_offsets(k)[rod]))
            .collect()
    }

    /// Joint-wise sum of the current angles and `delta`.
    pub fn perturbed(&self, delta: &[f64]) -> Result<Self> {
        if delta.len() != self.joint_angles.len() {
            return Err(Error::Shape {
                expected: self.joint_angles.len(),
                actual: delta.len(),
            });
        }
        let angles = self
            .joint_angles
            .iter()
            .zip(delta)
            .map(|(a, d)| a + d)
            .collect();
        Self::new(self.length, self.a0, angles)
    }
}

fn hole(st: &Station, offset: f64) -> [f64; 2] {
    let (sin, cos) = st.theta.sin_cos();
    [st.backbone[0] - offset * sin, st.backbone[1] + offset * cos]
}

fn polyline_length(points: &[[f64; 2]]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
        .sum()
}

/// Sample the continuum tangent field at the disk stations.
pub fn chain_from_curvature(
    kappa: &FourierCurvature,
    cfg: &BeamConfig,
    n_disks: usize,
) -> Result<DiskChain> {
    if n_disks < 3 {
        return Err(Error::domain(format!(
            "need at least 3 disks, got {n_disks}"
        )));
    }
    let chain = DiskChain::straight(cfg.length(), cfg.a0(), n_disks)?;
    let theta = (0..n_disks)
        .map(|k| kappa.tangent_angle(chain.station(k)))
        .collect::<Result<Vec<_>>>()?;
    let joints = theta.windows(2).map(|w| w[1] - w[0]).collect();
    DiskChain::new(cfg.length(), cfg.a0(), joints)
}

pub fn rod_lengths(chain: &DiskChain) -> RodLengths {
    RodLengths {
        l1: polyline_length(&chain.rod_points(0)),
        l2: polyline_length(&chain.rod_points(1)),
        lc: polyline_length(&chain.rod_points(2)),
    }
}

/// Gradient of one rod's polyline length with respect to the joint angles.
fn rod_length_gradient(chain: &DiskChain, stations: &[Station], rod: usize) -> Vec<f64> {
    let h = chain.segment_length();
    let joints = chain.joint_angles.len();
    let angles: Vec<f64> = stations.iter().map(|s| s.theta).collect();
    let holes: Vec<[f64; 2]> = stations
        .iter()
        .enumerate()
        .map(|(k, st)| hole(st, chain.hole_offsets(k)[rod]))
        .collect();

    // Per segment k: link rotation term, and the hole terms at both ends.
    let mut link = vec![0.0; joints];
    let mut far = vec![0.0; joints];
    let mut near = vec![0.0; joints];
    for k in 0..joints {
        let d = [holes[k + 1][0] - holes[k][0], holes[k + 1][1] - holes[k][1]];
        let len = d[0].hypot(d[1]);
        if len == 0.0 {
            continue;
        }
        let u = [d[0] / len, d[1] / len];
        let (sp, cp) = (0.5 * (angles[k] + angles[k + 1])).sin_cos();
        link[k] = h * (-u[0] * sp + u[1] * cp);
        let tangent_dot = |theta: f64| {
            let (s, c) = theta.sin_cos();
            u[0] * c + u[1] * s
        };
        far[k] = chain.hole_offsets(k + 1)[rod] * tangent_dot(angles[k + 1]);
        near[k] = chain.hole_offsets(k)[rod] * tangent_dot(angles[k]);
    }

    // dl/dphi_j = sum_{k>j} link_k + link_j / 2 - sum_{k>=j} far_k + sum_{k>j} near_k
    let mut grad = vec![0.0; joints];
    let (mut link_after, mut far_from, mut near_after) = (0.0, 0.0, 0.0);
    for j in (0..joints).rev() {
        far_from += far[j];
        grad[j] = link_after + 0.5 * link[j] - far_from + near_after;
        link_after += link[j];
        near_after += near[j];
    }
    grad
}

/// Jacobian rows `d l2 / d phi` and `d lc / d phi`.
pub fn constraint_jacobian(chain: &DiskChain) -> [Vec<f64>; 2] {
    let stations = chain.stations();
    [
        rod_length_gradient(chain, &stations, 1),
        rod_length_gradient(chain, &stations, 2),
    ]
}

/// Minimum-norm Gauss-Newton correction `-J^T (J J^T)^{-1} r` toward `target`.
pub fn gauss_newton_step(chain: &DiskChain, target: &RodLengths) -> Result<Vec<f64>> {
    let lengths = rod_lengths(chain);
    let r = [lengths.l2 - target.l2, lengths.lc - target.lc];
    let [g2, gc] = constraint_jacobian(chain);
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let (m00, m01, m11) = (dot(&g2, &g2), dot(&g2, &gc), dot(&gc, &gc));
    let det = m00 * m11 - m01 * m01;
    if !(det.abs() > 1e-14 * m00.max(m11).powi(2)) {
        return Err(Error::RankDeficient {
            rank: 1,
            expected: 2,
        });
    }
    let y0 = (m11 * r[0] - m01 * r[1]) / det;
    let y1 = (m00 * r[1] - m01 * r[0]) / det;
    Ok(g2
        .iter()
        .zip(&gc)
        .map(|(a, b)| -(a * y0 + b * y1))
        .collect())
}

/// Outcome of a projection onto the rod-length constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub chain: DiskChain,
    pub iterations: usize,
    pub residual: f64,
}

/// Apply `perturbation`, then restore the parallel and convergent rod
/// lengths to `target` by minimum-norm Gauss-Newton steps.
pub fn project_to_constraints(
    chain: &DiskChain,
    target: &RodLengths,
    perturbation: &[f64],
) -> Result<Projection> {
    let tol = PROJECTION_TOL * chain.length();
    let mut current = chain.perturbed(perturbation)?;
    let residual = |c: &DiskChain| {
        let l = rod_lengths(c);
        (l.l2 - target.l2).abs().max((l.lc - target.lc).abs())
    };
    let mut res = residual(&current);
    for iter in 0..PROJECTION_MAX_ITER {
        if res <= tol {
            return Ok(Projection {
                chain: current,
                iterations: iter,
                residual: res,
            });
        }
        let step = gauss_newton_step(&current, target)?;
        current = current.perturbed(&step)?;
        res = residual(&current);
        if !res.is_finite() {
            return Err(Error::NonConvergence {
                iterations: iter + 1,
                residual: res,
            });
        }
    }
    if res <= tol {
        return Ok(Projection {
            chain: current,
            iterations: PROJECTION_MAX_ITER,
            residual: res,
        });
    }
    Err(Error::NonConvergence {
        iterations: PROJECTION_MAX_ITER,
        residual: res,
    })
}

/// Smooth mid-span bump in joint angles: a Gaussian curvature bump of peak
/// `amplitude` centred at `center * L` with width `width * L`.
pub fn bump_perturbation(chain: &DiskChain, amplitude: f64, center: f64, width: f64) -> Vec<f64> {
    let h = chain.segment_length();
    let l = chain.length();
    (0..chain.joint_angles.len())
        .map(|k| {
            let s = (k as f64 + 0.5) * h;
            let z = (s - center * l) / (width * l);
            amplitude * (-z * z).exp() * h
        })
        .collect()
}

/// Invariant row for a disk chain. `alpha` is reported as zero.
pub fn discrete_invariant_report(chain: &DiskChain) -> Result<InvariantReport> {
    let stations = chain.stations();
    let tip = stations.last().expect("chain has disks").backbone;
    if tip[0].abs() < 1e-9 * chain.length() {
        return Err(Error::DegenerateTip { x: tip[0].abs() });
    }
    let lengths = rod_lengths(chain);
    let h = chain.segment_length();
    let angles: Vec<f64> = stations.iter().map(|s| s.theta).collect();
    let n = angles.len();
    let integral = h * (0.5 * (angles[0] + angles[n - 1]) + angles[1..n - 1].iter().sum::<f64>());
    let theta_bar = integral / chain.length();
    let (l, a0) = (chain.length(), chain.a0());
    let diag = l.hypot(a0);
    let max_strain = chain
        .joint_angles
        .iter()
        .map(|phi| a0 * phi / h)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(InvariantReport {
        alpha: 0.0,
        l1: lengths.l1,
        l2: lengths.l2,
        lc: lengths.lc,
        theta_tip: angles[n - 1],
        theta_bar,
        tip_ratio: tip[1] / tip[0],
        tip,
        l2_polyline: lengths.l2,
        lc_polyline: lengths.lc,
        lc_first_order: diag - a0 / diag * l * theta_bar,
        max_strain,
        tip_line_offset: distance_from_line(tip, theta_bar),
    })
}

/// Continuum-vs-discrete errors at one disk count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison {
    pub n_disks: usize,
    pub tip_angle_err: f64,
    pub tip_ratio_err: f64,
    pub theta_bar_err: f64,
    pub l1_err: f64,
    pub l2_err: f64,
    pub lc_err: f64,
}

/// Compare the continuum invariants with disk chains of each size.
pub fn compare_with_continuum(
    kappa: &FourierCurvature,
    cfg: &BeamConfig,
    disk_counts: &[usize],
) -> Result<(InvariantReport, Vec<OracleComparison>)> {
    let continuum = invariant_report(kappa, cfg, 0.0)?;
    let rows = disk_counts
        .iter()
        .map(|&n| compare_one(kappa, cfg, &continuum, n))
        .collect::<Result<Vec<_>>>()?;
    Ok((continuum, rows))
}

/// Errors of one disk chain against an already computed continuum report.
pub fn compare_one(
    kappa: &FourierCurvature,
    cfg: &BeamConfig,
    continuum: &InvariantReport,
    n_disks: usize,
) -> Result<OracleComparison> {
    let chain = chain_from_curvature(kappa, cfg, n_disks)?;
    let d = discrete_invariant_report(&chain)?;
    Ok(OracleComparison {
        n_disks,
        tip_angle_err: (d.theta_tip - continuum.theta_tip).abs(),
        tip_ratio_err: (d.tip_ratio - continuum.tip_ratio).abs(),
        theta_bar_err: (d.theta_bar - continuum.theta_bar).abs(),
        l1_err: (d.l1 - cfg.length()).abs(),
        l2_err: (d.l2 - continuum.l2).abs(),
        lc_err: (d.lc - continuum.lc).abs(),
    })
}

/// Errors below this are treated as converged to rounding.
pub const ERROR_FLOOR: f64 = 1e-12;

/// Observed order `log2(e_coarse / e_fine)` between successive rows, or
/// `None` when both errors are already at the rounding floor.
pub fn observed_orders(errors: &[f64]) -> Vec<Option<f64>> {
    errors
        .windows(2)
        .map(|w| {
            if w[0] <= ERROR_FLOOR && w[1] <= ERROR_FLOOR {
                None
            } else {
                Some((w[0] / w[1]).log2())
            }
        })
        .collect()
}
