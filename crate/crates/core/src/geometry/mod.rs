//! Convex bodies, projections, gauges and the distance penalties built on them.

mod body;
mod gauge;
mod penalty;
mod projection;

pub use body::{ConvexBody, Halfspace, MembershipFn, Shape, MEMBERSHIP_RTOL};
pub use gauge::{BISECTION_RTOL, ORACLE_GRADIENT_STEP};
pub use penalty::{euclidean_residual, gauge_curvature, Penalty, PenaltyKind, CURVATURE_SAMPLES};
pub use projection::{DYKSTRA_MAX_SWEEPS, DYKSTRA_TOL, PROJECTED_GRADIENT_MAX_ITERS};
