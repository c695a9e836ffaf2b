//! Numerical toolkit for ultraholomorphic classes defined by weight sequences.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the `*F64` aliases below fix the common choice.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assoc_fn;
pub mod error;
pub mod gevrey_type;
pub mod indices;
pub mod maergoiz;
pub mod propagation;
pub mod quasi;
pub mod report;
pub mod scalar;
pub mod sequences;

pub use assoc_fn::{AssociatedFunction, ProximateOrderSpec};
pub use error::{Error, Result};
pub use gevrey_type::{SectorSpec, TypeProfile};
pub use maergoiz::{MaergoizFunction, SectorPoint};
pub use propagation::{ExpansionFit, FlatVerdict, FlatnessFit, RayTrace, TestFunction};
pub use quasi::{ClassKind, QuasiOptions, Verdict};
pub use scalar::Real;
pub use sequences::{condition_report, equivalence_estimate, ConditionReport, Family, WeightSequence};

pub type WeightSequenceF64 = WeightSequence<f64>;
pub type WeightSequenceF32 = WeightSequence<f32>;
pub type AssociatedFunctionF64 = AssociatedFunction<f64>;
pub type ProximateOrderSpecF64 = ProximateOrderSpec<f64>;
pub type MaergoizFunctionF64 = MaergoizFunction<f64>;
pub type SectorSpecF64 = SectorSpec<f64>;
pub type SectorPointF64 = SectorPoint<f64>;
pub type TypeProfileF64 = TypeProfile<f64>;
pub type TestFunctionF64 = TestFunction<f64>;
pub type FlatnessFitF64 = FlatnessFit<f64>;
pub type ExpansionFitF64 = ExpansionFit<f64>;
pub type RayTraceF64 = RayTrace<f64>;
