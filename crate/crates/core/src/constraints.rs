//! Length constraints as a linear system on Fourier coefficients.
//!
//! Holding the parallel rod's length fixes `int kappa ds`, and holding the
//! convergent rod's length fixes (to first order) `int s kappa ds`. Both are
//! linear in the coefficients, so the admissible curvature fluctuations are
//! the nullspace of a `2 x 2M` matrix.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::curvature::FourierCurvature;
use crate::error::{Error, Result};
use crate::geometry::{integrate_reference_curve, invariant_report, BeamConfig, InvariantReport};

/// Relative singular-value cutoff used for rank decisions.
const RANK_TOL: f64 = 1e-10;

/// Components smaller than this are skipped by the sign convention.
const SIGN_TOL: f64 = 1e-12;

/// Rows of integrals of the basis functions: `int B_i ds` and `int s B_i ds`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintMatrix {
    modes: usize,
    rows: [Vec<f64>; 2],
}

impl ConstraintMatrix {
    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Row 0 constrains the tip angle, row 1 the first moment of curvature.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(2, 2 * self.modes, |r, c| self.rows[r][c])
    }

    /// `A c` for a coefficient vector.
    pub fn apply(&self, c: &[f64]) -> [f64; 2] {
        let dot = |row: &[f64]| row.iter().zip(c).map(|(a, b)| a * b).sum();
        [dot(&self.rows[0]), dot(&self.rows[1])]
    }
}

/// Closed-form constraint matrix for the beam's length and mode count.
pub fn build_constraint_matrix(cfg: &BeamConfig) -> ConstraintMatrix {
    build_for(cfg.modes(), cfg.length())
}

fn build_for(modes: usize, length: f64) -> ConstraintMatrix {
    let mut angle = vec![0.0; 2 * modes];
    let mut moment = vec![0.0; 2 * modes];
    for n in 1..=modes {
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 }; // (-1)^n
        let npi = n as f64 * PI;
        // cos columns: int_0^L cos = 0
        moment[n - 1] = length * length / (npi * npi) * (sign - 1.0);
        angle[modes + n - 1] = length / npi * (1.0 - sign);
        moment[modes + n - 1] = -length * length * sign / npi;
    }
    ConstraintMatrix {
        modes,
        rows: [angle, moment],
    }
}

/// Orthonormal basis of length-preserving coefficient fluctuations.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationBasis {
    vectors: Vec<Vec<f64>>,
}

impl DeformationBasis {
    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Orthogonal projection of `c` onto the span of the basis.
    pub fn project(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; c.len()];
        for v in &self.vectors {
            let w: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            for (o, vi) in out.iter_mut().zip(v) {
                *o += w * vi;
            }
        }
        out
    }

    /// Unit fluctuation with the largest mid-span curvature `|dkappa(L/2)|`.
    ///
    /// This is the normalized projection of `B(L/2)` onto the kernel, so it
    /// does not depend on how the SVD happened to rotate the kernel basis.
    pub fn midspan_direction(&self, length: f64) -> Result<Vec<f64>> {
        let modes = self.vectors.first().map(|v| v.len() / 2).unwrap_or(0);
        if modes == 0 {
            return Err(Error::domain("empty deformation basis"));
        }
        let b = FourierCurvature::basis_vector(modes, 0.5 * length, length);
        let mut d = self.project(&b);
        let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < SIGN_TOL {
            return Err(Error::domain(
                "no kernel direction couples to mid-span curvature",
            ));
        }
        d.iter_mut().for_each(|x| *x /= norm);
        canonical_sign(&mut d);
        Ok(d)
    }
}

fn canonical_sign(v: &mut [f64]) {
    if let Some(first) = v.iter().copied().find(|x| x.abs() > SIGN_TOL) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Kernel of the constraint matrix from an SVD of `A` padded to square.
///
/// Vectors follow the right singular vectors in descending singular-value
/// order; each is flipped so its first non-negligible entry is positive.
pub fn nullspace(a: &ConstraintMatrix) -> Result<DeformationBasis> {
    let cols = 2 * a.modes();
    if cols < 3 {
        return Err(Error::RankDeficient {
            rank: 0,
            expected: 2,
        });
    }
    let mut padded = DMatrix::<f64>::zeros(cols, cols);
    padded.rows_mut(0, 2).copy_from(&a.to_matrix());
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");

    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sigma_max = svd.singular_values[order[0]];
    let rank = order
        .iter()
        .filter(|&&i| svd.singular_values[i] > RANK_TOL * sigma_max.max(f64::MIN_POSITIVE))
        .count();
    if rank < 2 {
        return Err(Error::RankDeficient { rank, expected: 2 });
    }

    let vectors = order[rank..]
        .iter()
        .map(|&i| {
            let mut v: Vec<f64> = v_t.row(i).iter().copied().collect();
            canonical_sign(&mut v);
            v
        })
        .collect();
    Ok(DeformationBasis { vectors })
}

/// Minimum-norm coefficients reaching a tip angle and an average angle.
///
/// Uses `int theta ds = L theta(L) - int s kappa ds`, so both targets are
/// linear in the coefficients.
pub fn fit_initial_curvature(
    theta_tip: f64,
    theta_bar: f64,
    cfg: &BeamConfig,
) -> Result<FourierCurvature> {
    let a = build_constraint_matrix(cfg);
    let l = cfg.length();
    let rhs = [theta_tip, l * theta_tip - l * theta_bar];
    let coeffs = min_norm_solve(&a, rhs)?;
    FourierCurvature::new(coeffs, l)
}

fn min_norm_solve(a: &ConstraintMatrix, rhs: [f64; 2]) -> Result<Vec<f64>> {
    let m = a.to_matrix();
    let gram = &m * m.transpose();
    let scale = gram[(0, 0)].max(gram[(1, 1)]);
    let det = gram[(0, 0)] * gram[(1, 1)] - gram[(0, 1)] * gram[(1, 0)];
    if !(det.abs() > RANK_TOL * scale * scale) {
        return Err(Error::RankDeficient {
            rank: 1,
            expected: 2,
        });
    }
    let y = gram
        .lu()
        .solve(&DVector::from_column_slice(&rhs))
        .ok_or(Error::RankDeficient {
            rank: 1,
            expected: 2,
        })?;
    Ok((m.transpose() * y).iter().copied().collect())
}

/// Invariant rows for `kappa0 + alpha * direction`, one per amplitude, in input order.
///
/// Per-amplitude failures are returned in place so a sweep can continue past
/// them.
pub fn sweep(
    kappa0: &FourierCurvature,
    direction: &[f64],
    alphas: &[f64],
    cfg: &BeamConfig,
) -> Result<Vec<Result<InvariantReport>>> {
    let a = build_constraint_matrix(cfg);
    if direction.len() != 2 * cfg.modes() {
        return Err(Error::Shape {
            expected: 2 * cfg.modes(),
            actual: direction.len(),
        });
    }
    let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [r0, r1] = a.apply(direction);
    let scale = cfg.length().max(1.0);
    if r0.hypot(r1) > 1e-8 * norm * scale * scale {
        return Err(Error::domain(
            "sweep direction is not in the constraint nullspace",
        ));
    }
    Ok(alphas
        .iter()
        .map(|&alpha| {
            let kappa = kappa0.perturbed(direction, alpha)?;
            invariant_report(&kappa, cfg, alpha).map_err(|e| e.with_alpha(alpha))
        })
        .collect())
}

/// Largest `alpha >= 0` keeping `max a0 |kappa0 + alpha d| <= bound` on the grid.
pub fn amplitude_limit(
    kappa0: &FourierCurvature,
    direction: &[f64],
    cfg: &BeamConfig,
    bound: f64,
) -> Result<f64> {
    let base = kappa0.sample(cfg.grid())?;
    let dir = FourierCurvature::new(direction.to_vec(), cfg.length())?.sample(cfg.grid())?;
    let a0 = cfg.a0();
    let strain = |alpha: f64| {
        base.iter()
            .zip(&dir)
            .map(|(k, d)| (a0 * (k + alpha * d)).abs())
            .fold(0.0, f64::max)
    };
    if strain(0.0) > bound {
        return Err(Error::domain(
            "initial shape already exceeds the strain bound",
        ));
    }
    let mut hi = 1.0;
    while strain(hi) <= bound {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::domain("direction does not change the curvature"));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if strain(mid) <= bound {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(lo)
}

/// Result of fitting coefficients to a tip pose.
#[derive(Debug, Clone, PartialEq)]
pub struct TipFit {
    pub curvature: FourierCurvature,
    pub iterations: usize,
    pub residual: f64,
}

const TIP_FIT_TOL: f64 = 1e-8;
const TIP_FIT_MAX_ITER: usize = 100;
const TIP_FIT_FD_STEP: f64 = 1e-6;

/// Fit coefficients so the reference rod ends at `tip` with angle `theta_tip`.
///
/// Gauss-Newton with minimum-norm steps and a finite-difference Jacobian,
/// started from the linear fit that matches `theta_tip` and the chord angle.
pub fn fit_tip_position(theta_tip: f64, tip: [f64; 2], cfg: &BeamConfig) -> Result<TipFit> {
    let chord_angle = tip[1].atan2(tip[0]);
    let mut c = fit_initial_curvature(theta_tip, chord_angle, cfg)?
        .coeffs()
        .to_vec();
    let residual = |c: &[f64]| -> Option<DVector<f64>> {
        let k = FourierCurvature::new(c.to_vec(), cfg.length()).ok()?;
        let curve = integrate_reference_curve(&k, cfg).ok()?;
        let [x, y] = curve.tip();
        let r = DVector::from_vec(vec![curve.tip_angle() - theta_tip, x - tip[0], y - tip[1]]);
        r.iter().all(|v| v.is_finite()).then_some(r)
    };

    let mut r = residual(&c).ok_or(Error::NonConvergence {
        iterations: 0,
        residual: f64::NAN,
    })?;
    let n = c.len();
    for iter in 0..TIP_FIT_MAX_ITER {
        let norm = r.norm();
        if norm <= TIP_FIT_TOL {
            return Ok(TipFit {
                curvature: FourierCurvature::new(c, cfg.length())?,
                iterations: iter,
                residual: norm,
            });
        }
        let mut jac = DMatrix::<f64>::zeros(3, n);
        for j in 0..n {
            let mut plus = c.clone();
            let mut minus = c.clone();
            plus[j] += TIP_FIT_FD_STEP;
            minus[j] -= TIP_FIT_FD_STEP;
            let (Some(rp), Some(rm)) = (residual(&plus), residual(&minus)) else {
                return Err(Error::NonConvergence {
                    iterations: iter,
                    residual: norm,
                });
            };
            jac.set_column(j, &((rp - rm) / (2.0 * TIP_FIT_FD_STEP)));
        }
        let pinv = jac
            .pseudo_inverse(1e-12)
            .map_err(|_| Error::NonConvergence {
                iterations: iter,
                residual: norm,
            })?;
        let step = -(pinv * &r);

        // backtrack until the residual drops
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let trial: Vec<f64> = c
                .iter()
                .zip(step.iter())
                .map(|(ci, si)| ci + t * si)
                .collect();
            if let Some(rt) = residual(&trial) {
                if rt.norm() < norm {
                    accepted = Some((trial, rt));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, rt)) => {
                c = trial;
                r = rt;
            }
            None => {
                return Err(Error::NonConvergence {
                    iterations: iter + 1,
                    residual: norm,
                })
            }
        }
    }
    let norm = r.norm();
    if norm <= TIP_FIT_TOL {
        return Ok(TipFit {
            curvature: FourierCurvature::new(c, cfg.length())?,
            iterations: TIP_FIT_MAX_ITER,
            residual: norm,
        });
    }
    Err(Error::NonConvergence {
        iterations: TIP_FIT_MAX_ITER,
        residual: norm,
    })
}
