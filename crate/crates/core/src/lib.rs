//! Helicoidal surfaces generated by plane frontals.
//!
//! The crate is organised bottom-up: [`expr`] and [`numerics`] supply
//! symbolic and numerical plumbing, [`legendre`] holds profile curves with
//! their moving frame, [`framed`] computes invariants of arbitrary framed
//! surfaces by finite differences, [`helicoid`] gives the closed forms for
//! helicoidal surfaces, [`deform`] builds parallel and focal deformations,
//! and [`analysis`] classifies curvature boundedness near singular points.

pub mod analysis;
pub mod deform;
pub mod expr;
pub mod framed;
pub mod helicoid;
pub mod legendre;
pub mod numerics;
pub mod vec3;
