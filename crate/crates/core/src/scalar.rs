//! Floating-point abstraction used throughout the crate.
//!
//! Numerics are written against [`Scalar`], a thin alias over the num-traits
//! float hierarchy, so the same code runs at `f32` and `f64`.  Routines that
//! additionally need dense linear algebra (eigensolves, LU, SVD) require
//! [`EigenScalar`], which also demands `nalgebra::RealField`.

/// Floating-point numbers the crate can compute with.
///
/// `Float` supplies arithmetic and elementary functions, `FloatConst` the
/// mathematical constants (`π` in particular), `FromPrimitive`/`NumAssign`
/// conversions and compound assignment.  The formatting bounds let generic
/// code serialize results without knowing the concrete type.
pub trait Scalar:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + core::fmt::Debug
    + core::fmt::Display
    + core::fmt::LowerExp
    + serde::Serialize
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Scalars that can additionally drive nalgebra's dense decompositions.
///
/// Bound required by the general metric solver and the discrete solver;
/// purely combinatorial or chain-based routines stay at [`Scalar`].
pub trait EigenScalar: Scalar + nalgebra::RealField {}

impl<T: Scalar + nalgebra::RealField> EigenScalar for T {}

/// Shorthand for converting small integers and literals into `S`.
///
/// Conversions of values in the `f64` range are exact for `f64` and rounded
/// for `f32`; they cannot fail for the types implementing [`Scalar`].
pub(crate) fn cast<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("float literal representable in every Scalar type")
}

/// Converts a `usize` count into `S`, saturating at the type's maximum.
pub(crate) fn cast_usize<S: Scalar>(n: usize) -> S {
    S::from_usize(n).unwrap_or_else(S::max_value)
}
