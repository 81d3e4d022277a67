//! Right-hand side of the six ODEs and its analytic Jacobian.

use super::{ModelParams, State};
use crate::{Error, Result};
use nalgebra::Matrix6;

/// Evaluates the vector field
///
/// ```text
/// x1' = x1[λ1 + a1 x1² + a2(x2²+x3²) + c1 y1² + c2(y2²+y3²)] + a3 x1 x2² x3² + c3 x1 y2 y3
/// y1' = y1[λ2 + b1 y1² + b2(y2²+y3²) + c4 x1² + c5(x2²+x3²)] + b3 y1 y2² y3² + c6(y2 x3² + y3 x2²)
/// ```
///
/// and the four cyclic partners (index i takes the quintic product over the
/// other two coordinates and the c3/c6 mixed terms with indices i+1, i+2 mod 3).
pub fn evaluate_field(p: &ModelParams, s: &State) -> Result<State> {
    if !s.is_finite() {
        return Err(Error::NonFinite("state".into()));
    }
    let [x1, x2, x3, y1, y2, y3] = s.0;
    let (x1s, x2s, x3s) = (x1 * x1, x2 * x2, x3 * x3);
    let (y1s, y2s, y3s) = (y1 * y1, y2 * y2, y3 * y3);

    let f1 = x1 * (p.lambda1 + p.a1 * x1s + p.a2 * (x2s + x3s) + p.c1 * y1s + p.c2 * (y2s + y3s))
        + p.a3 * x1 * x2s * x3s
        + p.c3 * x1 * y2 * y3;
    let f2 = x2 * (p.lambda1 + p.a1 * x2s + p.a2 * (x1s + x3s) + p.c1 * y2s + p.c2 * (y1s + y3s))
        + p.a3 * x1s * x2 * x3s
        + p.c3 * x2 * y1 * y3;
    let f3 = x3 * (p.lambda1 + p.a1 * x3s + p.a2 * (x1s + x2s) + p.c1 * y3s + p.c2 * (y1s + y2s))
        + p.a3 * x1s * x2s * x3
        + p.c3 * x3 * y1 * y2;
    let f4 = y1 * (p.lambda2 + p.b1 * y1s + p.b2 * (y2s + y3s) + p.c4 * x1s + p.c5 * (x2s + x3s))
        + p.b3 * y1 * y2s * y3s
        + p.c6 * (y2 * x3s + y3 * x2s);
    let f5 = y2 * (p.lambda2 + p.b1 * y2s + p.b2 * (y1s + y3s) + p.c4 * x2s + p.c5 * (x1s + x3s))
        + p.b3 * y1s * y2 * y3s
        + p.c6 * (y3 * x1s + y1 * x3s);
    let f6 = y3 * (p.lambda2 + p.b1 * y3s + p.b2 * (y1s + y2s) + p.c4 * x3s + p.c5 * (x1s + x2s))
        + p.b3 * y1s * y2s * y3
        + p.c6 * (y1 * x2s + y2 * x1s);

    Ok(State([f1, f2, f3, f4, f5, f6]))
}

/// Analytic Jacobian of [`evaluate_field`], row i = gradient of component i.
pub fn evaluate_jacobian(p: &ModelParams, s: &State) -> Result<Matrix6<f64>> {
    if !s.is_finite() {
        return Err(Error::NonFinite("state".into()));
    }
    let [x1, x2, x3, y1, y2, y3] = s.0;
    let (x1s, x2s, x3s) = (x1 * x1, x2 * x2, x3 * x3);
    let (y1s, y2s, y3s) = (y1 * y1, y2 * y2, y3 * y3);

    // Bracket factors of the three x-rows and three y-rows.
    let p1 = p.lambda1 + p.a1 * x1s + p.a2 * (x2s + x3s) + p.c1 * y1s + p.c2 * (y2s + y3s);
    let p2 = p.lambda1 + p.a1 * x2s + p.a2 * (x1s + x3s) + p.c1 * y2s + p.c2 * (y1s + y3s);
    let p3 = p.lambda1 + p.a1 * x3s + p.a2 * (x1s + x2s) + p.c1 * y3s + p.c2 * (y1s + y2s);
    let q1 = p.lambda2 + p.b1 * y1s + p.b2 * (y2s + y3s) + p.c4 * x1s + p.c5 * (x2s + x3s);
    let q2 = p.lambda2 + p.b1 * y2s + p.b2 * (y1s + y3s) + p.c4 * x2s + p.c5 * (x1s + x3s);
    let q3 = p.lambda2 + p.b1 * y3s + p.b2 * (y1s + y2s) + p.c4 * x3s + p.c5 * (x1s + x2s);

    let m = Matrix6::from_rows(&[
        nalgebra::RowVector6::new(
            p1 + 2.0 * p.a1 * x1s + p.a3 * x2s * x3s + p.c3 * y2 * y3,
            2.0 * p.a2 * x1 * x2 + 2.0 * p.a3 * x1 * x2 * x3s,
            2.0 * p.a2 * x1 * x3 + 2.0 * p.a3 * x1 * x2s * x3,
            2.0 * p.c1 * x1 * y1,
            2.0 * p.c2 * x1 * y2 + p.c3 * x1 * y3,
            2.0 * p.c2 * x1 * y3 + p.c3 * x1 * y2,
        ),
        nalgebra::RowVector6::new(
            2.0 * p.a2 * x1 * x2 + 2.0 * p.a3 * x1 * x2 * x3s,
            p2 + 2.0 * p.a1 * x2s + p.a3 * x1s * x3s + p.c3 * y1 * y3,
            2.0 * p.a2 * x2 * x3 + 2.0 * p.a3 * x1s * x2 * x3,
            2.0 * p.c2 * x2 * y1 + p.c3 * x2 * y3,
            2.0 * p.c1 * x2 * y2,
            2.0 * p.c2 * x2 * y3 + p.c3 * x2 * y1,
        ),
        nalgebra::RowVector6::new(
            2.0 * p.a2 * x1 * x3 + 2.0 * p.a3 * x1 * x2s * x3,
            2.0 * p.a2 * x2 * x3 + 2.0 * p.a3 * x1s * x2 * x3,
            p3 + 2.0 * p.a1 * x3s + p.a3 * x1s * x2s + p.c3 * y1 * y2,
            2.0 * p.c2 * x3 * y1 + p.c3 * x3 * y2,
            2.0 * p.c2 * x3 * y2 + p.c3 * x3 * y1,
            2.0 * p.c1 * x3 * y3,
        ),
        nalgebra::RowVector6::new(
            2.0 * p.c4 * x1 * y1,
            2.0 * p.c5 * x2 * y1 + 2.0 * p.c6 * x2 * y3,
            2.0 * p.c5 * x3 * y1 + 2.0 * p.c6 * x3 * y2,
            q1 + 2.0 * p.b1 * y1s + p.b3 * y2s * y3s,
            2.0 * p.b2 * y1 * y2 + 2.0 * p.b3 * y1 * y2 * y3s + p.c6 * x3s,
            2.0 * p.b2 * y1 * y3 + 2.0 * p.b3 * y1 * y2s * y3 + p.c6 * x2s,
        ),
        nalgebra::RowVector6::new(
            2.0 * p.c5 * x1 * y2 + 2.0 * p.c6 * x1 * y3,
            2.0 * p.c4 * x2 * y2,
            2.0 * p.c5 * x3 * y2 + 2.0 * p.c6 * x3 * y1,
            2.0 * p.b2 * y1 * y2 + 2.0 * p.b3 * y1 * y2 * y3s + p.c6 * x3s,
            q2 + 2.0 * p.b1 * y2s + p.b3 * y1s * y3s,
            2.0 * p.b2 * y2 * y3 + 2.0 * p.b3 * y1s * y2 * y3 + p.c6 * x1s,
        ),
        nalgebra::RowVector6::new(
            2.0 * p.c5 * x1 * y3 + 2.0 * p.c6 * x1 * y2,
            2.0 * p.c5 * x2 * y3 + 2.0 * p.c6 * x2 * y1,
            2.0 * p.c4 * x3 * y3,
            2.0 * p.b2 * y1 * y3 + 2.0 * p.b3 * y1 * y2s * y3 + p.c6 * x2s,
            2.0 * p.b2 * y2 * y3 + 2.0 * p.b3 * y1s * y2 * y3 + p.c6 * x1s,
            q3 + 2.0 * p.b1 * y3s + p.b3 * y1s * y2s,
        ),
    ]);
    Ok(m)
}
