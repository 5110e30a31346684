//! The three rods of the beam and the quantities that stay invariant when
//! their lengths are held fixed.
//!
//! The reference rod `r1(s)` is parameterized by arc length with
//! `r1(0) = (0, 0)` and `theta(0) = 0`. The second parallel rod sits at a
//! constant normal offset `a0`, and the convergent rod's offset tapers
//! linearly from `a0` at the base to zero at the tip. The normal is the left
//! normal `n = (-sin theta, cos theta)`.

use serde::{Deserialize, Serialize};

use crate::curvature::{ArcGrid, FourierCurvature, DEFAULT_GRID_N};
use crate::error::{Error, Result};

/// Tip x-coordinates below this fraction of `L` make `y/x` undefined.
const DEGENERATE_TIP_FRACTION: f64 = 1e-9;

/// Geometric constants of one beam scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamConfig {
    length: f64,
    a0: f64,
    modes: usize,
    grid: ArcGrid,
}

impl BeamConfig {
    pub fn new(length: f64, a0: f64, modes: usize, grid_n: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::domain(format!(
                "length must be positive, got {length}"
            )));
        }
        if !(a0 > 0.0) || !a0.is_finite() {
            return Err(Error::domain(format!("a0 must be positive, got {a0}")));
        }
        if a0 >= length {
            return Err(Error::domain(format!(
                "a0 = {a0} must be smaller than L = {length}"
            )));
        }
        if modes < 2 {
            return Err(Error::domain(format!(
                "need at least 2 Fourier modes, got {modes}"
            )));
        }
        let grid = ArcGrid::new(length, grid_n)?;
        Ok(Self {
            length,
            a0,
            modes,
            grid,
        })
    }

    /// `L`, `a0` and `M` on the default 2049-node grid.
    pub fn with_default_grid(length: f64, a0: f64, modes: usize) -> Result<Self> {
        Self::new(length, a0, modes, DEFAULT_GRID_N)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn grid(&self) -> &ArcGrid {
        &self.grid
    }

    /// Same beam on a different grid.
    pub fn with_grid_n(&self, grid_n: usize) -> Result<Self> {
        Self::new(self.length, self.a0, self.modes, grid_n)
    }

    fn check_curvature(&self, kappa: &FourierCurvature) -> Result<()> {
        if (kappa.length() - self.length).abs() > 1e-12 * self.length {
            return Err(Error::domain(format!(
                "curvature length {} does not match beam length {}",
                kappa.length(),
                self.length
            )));
        }
        if kappa.modes() != self.modes {
            return Err(Error::Shape {
                expected: 2 * self.modes,
                actual: kappa.coeffs().len(),
            });
        }
        Ok(())
    }
}

/// A planar curve sampled on the arc-length grid of the reference rod.
///
/// For offset rods `s` is still the reference parameter, not their own arc
/// length.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    pub s: Vec<f64>,
    pub theta: Vec<f64>,
    pub points: Vec<[f64; 2]>,
}

impl SampledCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn tip(&self) -> [f64; 2] {
        *self.points.last().expect("curve has at least three nodes")
    }

    pub fn tip_angle(&self) -> f64 {
        *self.theta.last().expect("curve has at least three nodes")
    }

    fn normal(&self, i: usize) -> [f64; 2] {
        let (sin, cos) = self.theta[i].sin_cos();
        [-sin, cos]
    }
}

/// Distal posture of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TipPosture {
    pub theta_tip: f64,
    pub tip_ratio: f64,
    pub tip: [f64; 2],
}

/// One row of the invariant table, plus the cross-check values behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub alpha: f64,
    /// Refined polyline length of the reference rod.
    pub l1: f64,
    /// Closed-form parallel-rod length `L - a0 theta(L)`.
    pub l2: f64,
    /// Convergent-rod length from quadrature of the exact integrand.
    pub lc: f64,
    pub theta_tip: f64,
    pub theta_bar: f64,
    pub tip_ratio: f64,
    pub tip: [f64; 2],
    pub l2_polyline: f64,
    pub lc_polyline: f64,
    /// First-order approximation of `lc` from the average angle.
    pub lc_first_order: f64,
    /// `max a0 kappa(s)` over the grid; must stay below one.
    pub max_strain: f64,
    /// Perpendicular distance of the tip from the line through the base at angle `theta_bar`.
    pub tip_line_offset: f64,
}

/// Integrate sampled curvature into tangent angles and positions.
pub fn integrate_curvature_samples(kappa: &[f64], grid: &ArcGrid) -> Result<SampledCurve> {
    let theta = grid.cumulative_integral(kappa)?;
    let cos: Vec<f64> = theta.iter().map(|t| t.cos()).collect();
    let sin: Vec<f64> = theta.iter().map(|t| t.sin()).collect();
    let x = grid.cumulative_integral(&cos)?;
    let y = grid.cumulative_integral(&sin)?;
    let points = x.into_iter().zip(y).map(|(x, y)| [x, y]).collect();
    Ok(SampledCurve {
        s: grid.nodes().to_vec(),
        theta,
        points,
    })
}

/// Shape of the reference rod `r1` for a curvature field.
pub fn integrate_reference_curve(
    kappa: &FourierCurvature,
    cfg: &BeamConfig,
) -> Result<SampledCurve> {
    cfg.check_curvature(kappa)?;
    integrate_curvature_samples(&kappa.sample(cfg.grid())?, cfg.grid())
}

/// Second parallel rod: `r2 = r1 + a0 n`.
pub fn offset_parallel(reference: &SampledCurve, a0: f64) -> SampledCurve {
    let points = (0..reference.len())
        .map(|i| {
            let [px, py] = reference.points[i];
            let [nx, ny] = reference.normal(i);
            [px + a0 * nx, py + a0 * ny]
        })
        .collect();
    SampledCurve {
        s: reference.s.clone(),
        theta: reference.theta.clone(),
        points,
    }
}

/// Convergent rod: `rc = r1 + a0 (1 - s/L) n`. Meets `r1` exactly at `s = L`.
///
/// The tangent angle is estimated from neighbouring points.
pub fn offset_convergent(reference: &SampledCurve, a0: f64, length: f64) -> SampledCurve {
    let n = reference.len();
    let points: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let taper = if i == n - 1 {
                0.0
            } else {
                a0 * (1.0 - reference.s[i] / length)
            };
            let [px, py] = reference.points[i];
            let [nx, ny] = reference.normal(i);
            [px + taper * nx, py + taper * ny]
        })
        .collect();
    let theta = (0..n)
        .map(|i| {
            let (lo, hi) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (points[hi][1] - points[lo][1]).atan2(points[hi][0] - points[lo][0])
        })
        .collect();
    SampledCurve {
        s: reference.s.clone(),
        theta,
        points,
    }
}

/// Largest `a0 kappa` over the grid. Fails if the parallel offset would fold.
pub fn check_offset_validity(kappa: &[f64], grid: &ArcGrid, a0: f64) -> Result<f64> {
    if kappa.len() != grid.len() {
        return Err(Error::Shape {
            expected: grid.len(),
            actual: kappa.len(),
        });
    }
    let mut worst = f64::NEG_INFINITY;
    let mut worst_s = 0.0;
    for (&k, &s) in kappa.iter().zip(grid.nodes()) {
        let strain = a0 * k;
        if strain > worst || strain.is_nan() {
            worst = strain;
            worst_s = s;
        }
    }
    if !(worst < 1.0) {
        return Err(Error::SelfIntersect {
            s: worst_s,
            strain: worst,
            alpha: None,
        });
    }
    Ok(worst)
}

/// Parallel-rod length `L - a0 theta(L)`, valid while `a0 kappa < 1` everywhere.
pub fn length_parallel_exact(kappa: &[f64], theta_tip: f64, cfg: &BeamConfig) -> Result<f64> {
    check_offset_validity(kappa, cfg.grid(), cfg.a0())?;
    Ok(cfg.length() - cfg.a0() * theta_tip)
}

/// Polyline length through the grid nodes of a curve.
pub fn length_numeric(curve: &SampledCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
        .sum()
}

/// Polyline length with one Richardson step against the every-other-node
/// polyline, cancelling the leading `h^2` chord error. Falls back to the
/// plain polyline when the node count is even.
pub fn length_numeric_refined(curve: &SampledCurve) -> f64 {
    let fine = length_numeric(curve);
    if curve.len() < 5 || curve.len().is_multiple_of(2) {
        return fine;
    }
    let coarse: f64 = curve
        .points
        .windows(3)
        .step_by(2)
        .map(|w| (w[2][0] - w[0][0]).hypot(w[2][1] - w[0][1]))
        .sum();
    (4.0 * fine - coarse) / 3.0
}

/// Convergent-rod length by quadrature of
/// `sqrt((1 - a0 (1 - s/L) kappa)^2 + (a0/L)^2)`.
pub fn length_convergent_exact(kappa: &FourierCurvature, cfg: &BeamConfig) -> Result<f64> {
    cfg.check_curvature(kappa)?;
    length_convergent_from_samples(&kappa.sample(cfg.grid())?, cfg)
}

pub(crate) fn length_convergent_from_samples(kappa: &[f64], cfg: &BeamConfig) -> Result<f64> {
    let (l, a0) = (cfg.length(), cfg.a0());
    let slope = a0 / l;
    let integrand: Vec<f64> = kappa
        .iter()
        .zip(cfg.grid().nodes())
        .map(|(&k, &s)| (1.0 - a0 * (1.0 - s / l) * k).hypot(slope))
        .collect();
    cfg.grid().definite_integral(&integrand)
}

/// First-order convergent-rod length in terms of the average angle.
pub fn length_convergent_approx(theta_bar: f64, cfg: &BeamConfig) -> f64 {
    let (l, a0) = (cfg.length(), cfg.a0());
    let diag = l.hypot(a0);
    diag - a0 / diag * l * theta_bar
}

/// Tip angle recovered from the parallel-rod length.
pub fn tip_angle_from_lengths(l2: f64, cfg: &BeamConfig) -> f64 {
    (cfg.length() - l2) / cfg.a0()
}

/// `(1/L) int_0^L theta ds`.
pub fn average_angle(theta: &[f64], cfg: &BeamConfig) -> Result<f64> {
    Ok(cfg.grid().definite_integral(theta)? / cfg.length())
}

pub fn tip_posture(curve: &SampledCurve) -> Result<TipPosture> {
    let tip = curve.tip();
    let span = *curve.s.last().expect("curve has at least three nodes");
    if tip[0].abs() < DEGENERATE_TIP_FRACTION * span {
        return Err(Error::DegenerateTip { x: tip[0].abs() });
    }
    Ok(TipPosture {
        theta_tip: curve.tip_angle(),
        tip_ratio: tip[1] / tip[0],
        tip,
    })
}

/// Distance of `p` from the line through the origin at angle `angle`.
pub fn distance_from_line(p: [f64; 2], angle: f64) -> f64 {
    let (sin, cos) = angle.sin_cos();
    (cos * p[1] - sin * p[0]).abs()
}

/// Assemble the invariant row for one curvature state.
pub fn invariant_report(
    kappa: &FourierCurvature,
    cfg: &BeamConfig,
    alpha: f64,
) -> Result<InvariantReport> {
    cfg.check_curvature(kappa)?;
    let samples = kappa.sample(cfg.grid())?;
    let max_strain = check_offset_validity(&samples, cfg.grid(), cfg.a0())?;
    let reference = integrate_curvature_samples(&samples, cfg.grid())?;
    let posture = tip_posture(&reference)?;
    let theta_bar = average_angle(&reference.theta, cfg)?;
    let l2 = length_parallel_exact(&samples, posture.theta_tip, cfg)?;
    let lc = length_convergent_from_samples(&samples, cfg)?;
    Ok(InvariantReport {
        alpha,
        l1: length_numeric_refined(&reference),
        l2,
        lc,
        theta_tip: posture.theta_tip,
        theta_bar,
        tip_ratio: posture.tip_ratio,
        tip: posture.tip,
        l2_polyline: length_numeric(&offset_parallel(&reference, cfg.a0())),
        lc_polyline: length_numeric(&offset_convergent(&reference, cfg.a0(), cfg.length())),
        lc_first_order: length_convergent_approx(theta_bar, cfg),
        max_strain,
        tip_line_offset: distance_from_line(posture.tip, theta_bar),
    })
}
