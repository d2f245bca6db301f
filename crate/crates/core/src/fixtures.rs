//! Fixed operators with known orthogonality and attainment structure.

use crate::operators::Operator;
use crate::scalar::Scalar;
use crate::spaces::Space;

/// `(T, A1, A2)` on Euclidean `R^3`, given by the images of the standard basis:
/// `T e1 = e1`, `T e2 = T e3 = 0`; `A1 = (e2, e1, e2)`; `A2 = (e1, e2, e1)`.
///
/// `||T|| = 1`, `M_T = {+-e1}`, `T` is orthogonal to `A1` but not to `A2`, and
/// the distance from `T` to `span{A1, A2}` is strictly below the Kolmogorov-type
/// supremum, which is at least 1 via `x = y = e1`, `B = A1`.
pub fn counterexample<S: Scalar>() -> (Operator<S>, Operator<S>, Operator<S>) {
    let e = Space::lp(3, 2.0).expect("valid space");
    let t = Operator::from_images(e, e, &[&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
    let a1 = Operator::from_images(e, e, &[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
    let a2 = Operator::from_images(e, e, &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0]]);
    (t.expect("3x3"), a1.expect("3x3"), a2.expect("3x3"))
}

/// `T(a, b) = (0, a)` on `linf^2`: `M_T = {+-(1, b) : |b| <= 1}`, two segments.
pub fn remark_shift<S: Scalar>() -> Operator<S> {
    let s = Space::linf(2).expect("valid space");
    Operator::from_f64(s, s, &[&[0.0, 0.0], &[1.0, 0.0]]).expect("2x2")
}

/// `[[1/2, 1/2], [1/2, -1/2]]` on `linf^2`: `||T(a, b)|| = (|a| + |b|) / 2`, so
/// `M_T` is the four corners `+-(1, 1), +-(1, -1)`.
pub fn four_corner<S: Scalar>() -> Operator<S> {
    let s = Space::linf(2).expect("valid space");
    Operator::from_f64(s, s, &[&[0.5, 0.5], &[0.5, -0.5]]).expect("2x2")
}
