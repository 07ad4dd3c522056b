//! Exact-arithmetic toolkit for anticanonical Calabi-Yau threefolds
//! `Y ⊂ S₁×S₂` in products of del Pezzo surfaces, and for certifying
//! free finite group actions on them.
//!
//! The crate is organized bottom-up:
//!
//! - [`scalar`]: rationals, cyclotomic fields, and triangular quotient
//!   rings with decidable zero-testing;
//! - [`linalg`]: exact dense linear algebra over those rings;
//! - [`poly`]: block-graded multivariate polynomials, pullbacks,
//!   evaluation, Künneth products;
//! - [`surface`]: the del Pezzo catalog (plane, quadric, blow-ups,
//!   embedded models) with anticanonical bases and blow-up charts;
//! - [`product`]: the Fano fourfold `X = S₁×S₂`, its section space,
//!   Euler characteristics, Riemann-Roch and the divisibility bound;
//! - [`group`]: finite automorphism groups of `X` and their
//!   representation on sections;
//! - [`fixed`]: exact fixed loci of automorphisms on surfaces and
//!   products;
//! - [`hodge`]: Lefschetz traces on `H²` and Hodge diamonds of
//!   quotients;
//! - [`verify`]: freeness/smoothness certificates and the mod-p
//!   smoothness probe;
//! - [`catalog`]: the scenario catalog, case runner, and subgroup
//!   sweep backing the CLI.

pub mod catalog;
pub mod error;
pub mod fixed;
pub mod group;
pub mod hodge;
pub mod linalg;
pub mod poly;
pub mod product;
pub mod scalar;
pub mod surface;
pub mod verify;
