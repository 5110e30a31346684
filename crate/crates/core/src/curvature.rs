//! Truncated Fourier series for backbone curvature and fourth-order
//! quadrature on a uniform arc-length grid.
//!
//! The curvature of the reference rod is
//!
//! ```text
//! kappa(s) = sum_{n=1..M} a_n cos(n pi s / L) + b_n sin(n pi s / L)
//! ```
//!
//! with coefficients stored as `[a_1 .. a_M, b_1 .. b_M]`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default number of grid samples (2048 intervals).
pub const DEFAULT_GRID_N: usize = 2049;

/// Slack allowed when checking that an arc length lies in `[0, L]`.
const S_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Cos,
    Sin,
}

/// Value of a single basis function, `cos(m pi s / L)` or `sin(m pi s / L)`.
pub fn eval_basis(mode: usize, kind: BasisKind, s: f64, length: f64) -> Result<f64> {
    if mode == 0 {
        return Err(Error::domain("mode index starts at 1"));
    }
    check_arc_length(s, length)?;
    let arg = mode as f64 * PI * s / length;
    Ok(match kind {
        BasisKind::Cos => arg.cos(),
        BasisKind::Sin => arg.sin(),
    })
}

fn check_arc_length(s: f64, length: f64) -> Result<()> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::domain(format!(
            "length must be positive, got {length}"
        )));
    }
    let slack = S_SLACK * length;
    if !(s >= -slack && s <= length + slack) {
        return Err(Error::domain(format!("s = {s} outside [0, {length}]")));
    }
    Ok(())
}

/// Curvature field of the reference rod as a Fourier series.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCurvature {
    coeffs: Vec<f64>,
    length: f64,
}

impl FourierCurvature {
    pub fn new(coeffs: Vec<f64>, length: f64) -> Result<Self> {
        if coeffs.is_empty() || !coeffs.len().is_multiple_of(2) {
            return Err(Error::domain(format!(
                "coefficient vector must have even positive length, got {}",
                coeffs.len()
            )));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::domain(format!(
                "length must be positive, got {length}"
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("coefficients must be finite"));
        }
        Ok(Self { coeffs, length })
    }

    pub fn zero(modes: usize, length: f64) -> Result<Self> {
        Self::new(vec![0.0; 2 * modes], length)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of Fourier modes `M`.
    pub fn modes(&self) -> usize {
        self.coeffs.len() / 2
    }

    /// `B(s)`, the basis vector at `s` in coefficient order.
    pub fn basis_vector(modes: usize, s: f64, length: f64) -> Vec<f64> {
        let mut out = vec![0.0; 2 * modes];
        for m in 1..=modes {
            let arg = m as f64 * PI * s / length;
            out[m - 1] = arg.cos();
            out[modes + m - 1] = arg.sin();
        }
        out
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        check_arc_length(s, self.length)?;
        Ok(self.eval_unchecked(s))
    }

    fn eval_unchecked(&self, s: f64) -> f64 {
        let m = self.modes();
        let (a, b) = self.coeffs.split_at(m);
        let mut acc = 0.0;
        for n in 1..=m {
            let arg = n as f64 * PI * s / self.length;
            acc += a[n - 1] * arg.cos() + b[n - 1] * arg.sin();
        }
        acc
    }

    /// Closed-form tangent angle `theta(s) = int_0^s kappa`, with `theta(0) = 0`.
    pub fn tangent_angle(&self, s: f64) -> Result<f64> {
        check_arc_length(s, self.length)?;
        let m = self.modes();
        let (a, b) = self.coeffs.split_at(m);
        let mut acc = 0.0;
        for n in 1..=m {
            let w = n as f64 * PI / self.length;
            acc += a[n - 1] * (w * s).sin() / w + b[n - 1] * (1.0 - (w * s).cos()) / w;
        }
        Ok(acc)
    }

    /// Curvature sampled at every grid node.
    pub fn sample(&self, grid: &ArcGrid) -> Result<Vec<f64>> {
        grid.check_length(self.length)?;
        Ok(grid
            .nodes()
            .iter()
            .map(|&s| self.eval_unchecked(s))
            .collect())
    }

    /// `self + alpha * direction`, the deformation update along a coefficient direction.
    pub fn perturbed(&self, direction: &[f64], alpha: f64) -> Result<Self> {
        if direction.len() != self.coeffs.len() {
            return Err(Error::Shape {
                expected: self.coeffs.len(),
                actual: direction.len(),
            });
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(direction)
            .map(|(c, d)| c + alpha * d)
            .collect();
        Self::new(coeffs, self.length)
    }
}

/// Uniform arc-length grid `s_i = i L / (n - 1)` with an odd sample count.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcGrid {
    length: f64,
    nodes: Vec<f64>,
}

impl ArcGrid {
    pub fn new(length: f64, n_samples: usize) -> Result<Self> {
        if n_samples < 3 || n_samples.is_multiple_of(2) {
            return Err(Error::domain(format!(
                "grid needs an odd sample count >= 3, got {n_samples}"
            )));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::domain(format!(
                "length must be positive, got {length}"
            )));
        }
        let intervals = (n_samples - 1) as f64;
        let mut nodes: Vec<f64> = (0..n_samples)
            .map(|i| length * (i as f64) / intervals)
            .collect();
        nodes[n_samples - 1] = length;
        Ok(Self { length, nodes })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spacing(&self) -> f64 {
        self.length / (self.nodes.len() - 1) as f64
    }

    fn check_length(&self, length: f64) -> Result<()> {
        if (self.length - length).abs() > S_SLACK * self.length {
            return Err(Error::domain(format!(
                "curvature length {length} does not match grid length {}",
                self.length
            )));
        }
        Ok(())
    }

    fn check_samples(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.nodes.len() {
            return Err(Error::Shape {
                expected: self.nodes.len(),
                actual: f.len(),
            });
        }
        Ok(())
    }

    /// Running integral with `F[0] = 0`.
    ///
    /// Each interval is integrated exactly for the cubic through the four
    /// nearest nodes (one-sided at the ends), giving fourth-order accuracy
    /// at every node. Exact for polynomials up to degree three.
    pub fn cumulative_integral(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check_samples(f)?;
        let n = f.len();
        let w = self.spacing() / 24.0;
        let mut out = Vec::with_capacity(n);
        let mut acc = 0.0;
        out.push(acc);
        for i in 0..n - 1 {
            let piece = if n < 4 {
                12.0 * (f[i] + f[i + 1])
            } else if i == 0 {
                9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]
            } else if i == n - 2 {
                9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4]
            } else {
                -f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]
            };
            acc += w * piece;
            out.push(acc);
        }
        Ok(out)
    }

    /// Integral over the whole grid, same rule as [`Self::cumulative_integral`].
    pub fn definite_integral(&self, f: &[f64]) -> Result<f64> {
        Ok(*self.cumulative_integral(f)?.last().expect("grid has nodes"))
    }

    /// Sample a closure at every node.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().map(|&s| f(s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn basis_values() {
        assert_eq!(eval_basis(1, BasisKind::Sin, 0.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            eval_basis(2, BasisKind::Cos, 1.0, 1.0).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            eval_basis(1, BasisKind::Cos, 0.5, 1.0).unwrap(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn basis_domain_errors() {
        assert!(matches!(
            eval_basis(0, BasisKind::Cos, 0.5, 1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            eval_basis(1, BasisKind::Cos, 1.5, 1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            eval_basis(1, BasisKind::Cos, -0.1, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn curvature_values() {
        let zero = FourierCurvature::zero(3, 1.0).unwrap();
        assert_eq!(zero.eval(0.37).unwrap(), 0.0);

        let a1 = FourierCurvature::new(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1.0).unwrap();
        assert_abs_diff_eq!(a1.eval(0.0).unwrap(), 1.0, epsilon = 1e-15);

        let b1 = FourierCurvature::new(vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0], 1.0).unwrap();
        assert_abs_diff_eq!(b1.eval(0.5).unwrap(), 1.0, epsilon = 1e-15);

        assert!(a1.eval(1.2).is_err());
    }

    #[test]
    fn rejects_bad_coefficients() {
        assert!(FourierCurvature::new(vec![], 1.0).is_err());
        assert!(FourierCurvature::new(vec![1.0, 2.0, 3.0], 1.0).is_err());
        assert!(FourierCurvature::new(vec![1.0, f64::NAN], 1.0).is_err());
        assert!(FourierCurvature::new(vec![1.0, 2.0], 0.0).is_err());
    }

    #[test]
    fn tangent_angle_matches_quadrature() {
        let k = FourierCurvature::new(vec![0.3, -1.1, 0.4, 0.9, 0.2, -0.7], 1.3).unwrap();
        let grid = ArcGrid::new(1.3, DEFAULT_GRID_N).unwrap();
        let theta = grid.cumulative_integral(&k.sample(&grid).unwrap()).unwrap();
        for (i, &s) in grid.nodes().iter().enumerate().step_by(97) {
            assert_abs_diff_eq!(theta[i], k.tangent_angle(s).unwrap(), epsilon = 1e-6);
        }
    }

    #[test]
    fn grid_validation() {
        assert!(ArcGrid::new(1.0, 2).is_err());
        assert!(ArcGrid::new(1.0, 4).is_err());
        assert!(ArcGrid::new(-1.0, 5).is_err());
        let g = ArcGrid::new(0.1, 3).unwrap();
        assert_eq!(g.nodes()[0], 0.0);
        assert_eq!(g.nodes()[2], 0.1);
    }

    #[test]
    fn grid_is_reproducible() {
        let a = ArcGrid::new(0.7, 1025).unwrap();
        let b = ArcGrid::new(0.7, 1025).unwrap();
        assert!(a
            .nodes()
            .iter()
            .zip(b.nodes())
            .all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn quadrature_examples() {
        let g = ArcGrid::new(1.0, DEFAULT_GRID_N).unwrap();
        let zeros = vec![0.0; g.len()];
        assert!(g
            .cumulative_integral(&zeros)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
        assert_eq!(g.definite_integral(&zeros).unwrap(), 0.0);

        let ones = vec![1.0; g.len()];
        assert_eq!(*g.cumulative_integral(&ones).unwrap().last().unwrap(), 1.0);

        let cubic = g.sample(|s| s * s * s - 2.0 * s);
        assert_abs_diff_eq!(g.definite_integral(&cubic).unwrap(), -0.75, epsilon = 1e-13);

        let lin = g.sample(|s| s);
        assert_abs_diff_eq!(
            *g.cumulative_integral(&lin).unwrap().last().unwrap(),
            0.5,
            epsilon = 1e-12
        );

        let sine = g.sample(|s| (PI * s).sin());
        assert_abs_diff_eq!(
            g.definite_integral(&sine).unwrap(),
            2.0 / PI,
            epsilon = 1e-8
        );

        let s_sine = g.sample(|s| s * (PI * s).sin());
        assert_abs_diff_eq!(
            g.definite_integral(&s_sine).unwrap(),
            1.0 / PI,
            epsilon = 1e-8
        );
    }

    #[test]
    fn quadrature_shape_error() {
        let g = ArcGrid::new(1.0, 9).unwrap();
        assert_eq!(
            g.definite_integral(&[1.0; 5]),
            Err(Error::Shape {
                expected: 9,
                actual: 5
            })
        );
        assert!(g.cumulative_integral(&[1.0; 11]).is_err());
    }

    #[test]
    fn quadrature_converges_at_least_second_order() {
        let length = 2.0;
        let exact = 2.0 * length / PI;
        let mut prev: Option<f64> = None;
        for n in [9, 17, 33, 65, 129] {
            let g = ArcGrid::new(length, n).unwrap();
            let err = (g
                .definite_integral(&g.sample(|s| (PI * s / length).sin()))
                .unwrap()
                - exact)
                .abs();
            if let Some(p) = prev {
                assert!(p / err >= 3.9, "error ratio {}", p / err);
            }
            prev = Some(err);
        }
    }

    #[test]
    fn sample_rejects_length_mismatch() {
        let k = FourierCurvature::zero(2, 1.0).unwrap();
        let g = ArcGrid::new(2.0, 9).unwrap();
        assert!(k.sample(&g).is_err());
    }
}
