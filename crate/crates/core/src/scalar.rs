//! Scalar abstraction for workloads, speeds and coalition values.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real-valued scalar used for workloads, speeds and coalition values.
///
/// Implemented for `f32` and `f64`. Time is always an integer ([`crate::Time`]),
/// only the amount of work is real-valued.
pub trait Scalar:
    'static
    + Send
    + Sync
    + Float
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Default
    + Debug
    + Display
{
    /// Converts a primitive constant, panicking only for values the type cannot hold.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable in scalar type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Slack under which accumulated work is considered to meet `workload`.
    ///
    /// Work is accumulated step by step by the kernel but predicted in closed form by
    /// the solvers; the slack absorbs the rounding difference between the two.
    #[inline]
    fn work_slack(workload: Self) -> Self {
        workload.abs() * Self::epsilon() * Self::of(64.0)
    }

    /// True when `done` units of work complete a task of the given workload.
    #[inline]
    fn reaches(done: Self, workload: Self) -> bool {
        done >= workload - Self::work_slack(workload)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
