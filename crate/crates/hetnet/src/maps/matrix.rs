//! Eigenstructure of the 2x2 exponent matrix of a power map.
//!
//! In log coordinates a `Full` power map is exactly multiplication by
//! its exponent matrix, so stability questions reduce to the dominant
//! eigenvalue and whether its eigenvector points into the (negative)
//! quadrant.  The closed forms here are cross-checked against a generic
//! linear-algebra backend in the tests.

use crate::error::{Error, Result};
use crate::Real;
use serde::{Deserialize, Serialize};

/// A real 2x2 matrix in row-major order:
/// `[[alpha1, beta1], [alpha2, beta2]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix<T> {
    pub alpha1: T,
    pub beta1: T,
    pub alpha2: T,
    pub beta2: T,
}

impl<T: Real> TransitionMatrix<T> {
    pub fn new(alpha1: T, beta1: T, alpha2: T, beta2: T) -> Result<Self> {
        for (v, name) in [
            (alpha1, "alpha1"),
            (beta1, "beta1"),
            (alpha2, "alpha2"),
            (beta2, "beta2"),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("{name} = {v:?}")));
            }
        }
        Ok(TransitionMatrix {
            alpha1,
            beta1,
            alpha2,
            beta2,
        })
    }

    pub fn apply(&self, x: T, y: T) -> (T, T) {
        (
            self.alpha1 * x + self.beta1 * y,
            self.alpha2 * x + self.beta2 * y,
        )
    }

    pub fn trace(&self) -> T {
        self.alpha1 + self.beta2
    }

    pub fn det(&self) -> T {
        self.alpha1 * self.beta2 - self.beta1 * self.alpha2
    }
}

/// Eigen-decomposition of a [`TransitionMatrix`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixAnalysis<T> {
    /// Eigenvalue `trace/2 + sqrt(disc)` when real; for a complex pair
    /// both fields hold the common real part `trace/2`.
    pub lambda_plus: T,
    /// Eigenvalue `trace/2 - sqrt(disc)` when real; real part if complex.
    pub lambda_minus: T,
    /// Unit eigenvector for `lambda_plus` (zero vector if complex).
    pub v_plus: [T; 2],
    /// Unit eigenvector for `lambda_minus` (zero vector if complex).
    pub v_minus: [T; 2],
    /// The eigenvalues are real and the one of largest modulus is
    /// `lambda_plus` (i.e. trace >= 0) — the configuration in which the
    /// dominant direction controls contraction.  `false` for a complex
    /// pair.
    pub dominant_real: bool,
    /// Both components of the dominant real eigenvector have the same
    /// strict sign (the eigendirection enters the quadrant).  `false`
    /// for a complex pair.
    pub v1v2_positive: bool,
    /// Imaginary part of the pair when complex, `None` when real.
    pub imag: Option<T>,
}

impl<T: Real> MatrixAnalysis<T> {
    /// The eigenvalue of largest modulus (real part for complex pairs,
    /// where both share the same modulus anyway).
    pub fn lambda_max(&self) -> T {
        if self.lambda_plus.abs() >= self.lambda_minus.abs() {
            self.lambda_plus
        } else {
            self.lambda_minus
        }
    }

    /// Eigenvector paired with [`MatrixAnalysis::lambda_max`].
    pub fn v_max(&self) -> [T; 2] {
        if self.lambda_plus.abs() >= self.lambda_minus.abs() {
            self.v_plus
        } else {
            self.v_minus
        }
    }
}

fn unit_eigenvector<T: Real>(m: &TransitionMatrix<T>, lambda: T) -> [T; 2] {
    // (A - lambda I) v = 0. Each row gives a candidate kernel vector;
    // take the one with the larger norm for conditioning.
    let r1 = [m.beta1, lambda - m.alpha1];
    let r2 = [lambda - m.beta2, m.alpha2];
    let n1 = r1[0] * r1[0] + r1[1] * r1[1];
    let n2 = r2[0] * r2[0] + r2[1] * r2[1];
    let (v, n) = if n1 >= n2 { (r1, n1) } else { (r2, n2) };
    if n == T::zero() {
        // lambda I: every vector is an eigenvector.
        return [T::one(), T::zero()];
    }
    let s = n.sqrt();
    let mut out = [v[0] / s, v[1] / s];
    // Fix the orientation: make the largest component positive so equal
    // matrices always analyze to identical vectors.
    let flip = if out[0].abs() >= out[1].abs() {
        out[0] < T::zero()
    } else {
        out[1] < T::zero()
    };
    if flip {
        out = [-out[0], -out[1]];
    }
    out
}

/// Eigenvalues and eigenvectors of a 2x2 transition matrix.
///
/// A complex pair is reported, not an error: `dominant_real` is `false`,
/// `imag` carries the imaginary part, and the eigenvector slots are zero.
pub fn analyze_transition_matrix<T: Real>(m: &TransitionMatrix<T>) -> Result<MatrixAnalysis<T>> {
    // Reject NaN/inf entries up front (constructor-bypassing literals).
    TransitionMatrix::new(m.alpha1, m.beta1, m.alpha2, m.beta2)?;
    let two = T::one() + T::one();
    let four = two + two;
    let mean = m.trace() / two;
    let disc = (m.alpha1 - m.beta2) * (m.alpha1 - m.beta2) / four + m.beta1 * m.alpha2;
    if disc < T::zero() {
        let imag = (-disc).sqrt();
        return Ok(MatrixAnalysis {
            lambda_plus: mean,
            lambda_minus: mean,
            v_plus: [T::zero(); 2],
            v_minus: [T::zero(); 2],
            dominant_real: false,
            v1v2_positive: false,
            imag: Some(imag),
        });
    }
    let root = disc.sqrt();
    let lambda_plus = mean + root;
    let lambda_minus = mean - root;
    let v_plus = unit_eigenvector(m, lambda_plus);
    let v_minus = unit_eigenvector(m, lambda_minus);
    let dominant_real = lambda_plus.abs() >= lambda_minus.abs();
    let v_dom = if dominant_real { v_plus } else { v_minus };
    let v1v2_positive = (v_dom[0] > T::zero() && v_dom[1] > T::zero())
        || (v_dom[0] < T::zero() && v_dom[1] < T::zero());
    Ok(MatrixAnalysis {
        lambda_plus,
        lambda_minus,
        v_plus,
        v_minus,
        dominant_real,
        v1v2_positive,
        imag: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::Matrix2;
    use proptest::prelude::*;

    fn residual(m: &TransitionMatrix<f64>, lambda: f64, v: [f64; 2]) -> f64 {
        let (ax, ay) = m.apply(v[0], v[1]);
        ((ax - lambda * v[0]).powi(2) + (ay - lambda * v[1]).powi(2)).sqrt()
    }

    #[test]
    fn swap_matrix_has_unit_eigenvalues() {
        let m = TransitionMatrix::new(0.0, 1.0, 1.0, 0.0).unwrap();
        let a = analyze_transition_matrix(&m).unwrap();
        assert_relative_eq!(a.lambda_plus, 1.0, max_relative = 1e-15);
        assert_relative_eq!(a.lambda_minus, -1.0, max_relative = 1e-15);
        // v+ is (1, 1) up to normalization.
        assert_relative_eq!(a.v_plus[0], a.v_plus[1], max_relative = 1e-15);
        assert!(a.dominant_real);
        assert!(a.v1v2_positive);
    }

    #[test]
    fn mixed_sign_matrix_matches_closed_form() {
        let m = TransitionMatrix::new(1.0, 2.0, 1.0, -0.5).unwrap();
        let a = analyze_transition_matrix(&m).unwrap();
        // trace/2 = 0.25, disc = (1.5)^2/4 + 2 = 2.5625, root = 1.600781...
        let root = 2.5625f64.sqrt();
        assert_relative_eq!(a.lambda_plus, 0.25 + root, max_relative = 1e-14);
        assert_relative_eq!(a.lambda_minus, 0.25 - root, max_relative = 1e-14);
        assert!((a.lambda_plus - 1.8508).abs() < 5e-5);
        assert!((a.lambda_minus - (-1.3508)).abs() < 5e-5);
        assert!(residual(&m, a.lambda_plus, a.v_plus) < 1e-13);
        assert!(residual(&m, a.lambda_minus, a.v_minus) < 1e-13);
    }

    #[test]
    fn rotation_reports_a_complex_pair() {
        let m = TransitionMatrix::new(0.0, -1.0, 1.0, 0.0).unwrap();
        let a = analyze_transition_matrix(&m).unwrap();
        assert!(!a.dominant_real);
        assert_relative_eq!(a.imag.unwrap(), 1.0, max_relative = 1e-15);
        assert_eq!(a.lambda_plus, 0.0);
    }

    #[test]
    fn wedge_step_shrinks_the_slope_interval() {
        // For a matrix with alpha1 >= 0, alpha2 > 0 and negative
        // determinant, applying it to a negative-quadrant point produces
        // another one with a smaller slope, and the slope interval
        // [y1/x1, y0/x0] maps into itself.
        let m = TransitionMatrix::new(1.0, 2.0, 1.0, -0.5).unwrap();
        assert!(m.det() < 0.0);
        let (x0, y0) = (-1.0, -1.0);
        let (x1, y1) = m.apply(x0, y0);
        assert!(x1 < 0.0 && y1 < 0.0);
        let (s0, s1) = (y0 / x0, y1 / x1);
        assert!(s1 < s0);
        // Points on the extreme slopes stay inside the slope interval.
        for s in [s1, s0, 0.5 * (s0 + s1)] {
            let (xa, ya) = m.apply(-1.0, -s);
            assert!(xa < 0.0 && ya < 0.0);
            let sa = ya / xa;
            assert!(sa >= s1 - 1e-14 && sa <= s0 + 1e-14);
        }
    }

    #[test]
    fn closed_form_agrees_with_generic_backend() {
        let cases = [
            (1.0, 2.0, 1.0, -0.5),
            (0.3, 0.9, 1.4, 0.2),
            (2.0, -0.1, 0.5, 1.0),
            (-1.0, 3.0, 0.7, -2.0),
        ];
        for (a1, b1, a2, b2) in cases {
            let m = TransitionMatrix::new(a1, b1, a2, b2).unwrap();
            let mine = analyze_transition_matrix(&m).unwrap();
            let eig = Matrix2::new(a1, b1, a2, b2).complex_eigenvalues();
            let mut re: Vec<f64> = eig.iter().map(|c| c.re).collect();
            re.sort_by(|p, q| p.partial_cmp(q).unwrap());
            let mut mine_re = [mine.lambda_minus, mine.lambda_plus];
            mine_re.sort_by(|p, q| p.partial_cmp(q).unwrap());
            assert_relative_eq!(re[0], mine_re[0], max_relative = 1e-12, epsilon = 1e-12);
            assert_relative_eq!(re[1], mine_re[1], max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        /// Matrices with alpha1 >= 0, alpha2 > 0, det < 0 always have a
        /// real pair straddling zero, the dominant one decided by the
        /// trace, and a positive eigenvector for lambda_plus.
        #[test]
        fn negative_determinant_matrices_have_straddling_real_pair(
            alpha1 in 0.0..3.0f64,
            alpha2 in 0.01..3.0f64,
            beta1 in 0.01..3.0f64,
            beta2 in -3.0..3.0f64,
        ) {
            let m = TransitionMatrix::new(alpha1, beta1, alpha2, beta2).unwrap();
            prop_assume!(m.det() < -1e-6);
            let a = analyze_transition_matrix(&m).unwrap();
            prop_assert!(a.imag.is_none());
            prop_assert!(a.lambda_plus > 0.0);
            prop_assert!(a.lambda_minus < 0.0);
            prop_assert_eq!(a.dominant_real, m.trace() >= 0.0);
            // v+ enters the quadrant: both components share a sign.
            prop_assert!(a.v_plus[0] * a.v_plus[1] > 0.0);
            prop_assert!(residual(&m, a.lambda_plus, a.v_plus) < 1e-12);
            prop_assert!(residual(&m, a.lambda_minus, a.v_minus) < 1e-12);
        }
    }
}
