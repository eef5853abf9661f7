//! Random feasible bounded linear programming problems.
//!
//! Problems have the form: maximize `<c, x>` subject to `2n + 1` fixed
//! support inequalities (a hypercube with its far corner cut off) and `d`
//! random inequalities. Random inequalities are drawn, oriented so that the
//! hypercube center stays feasible, and admitted only if their hyperplane
//! lies in an annulus around the center, can affect the optimum, and is not
//! similar to any constraint already present.

// Negated float comparisons are used on purpose so that NaN fails checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cli;
pub mod generator;
pub mod geometry;
pub mod io;
pub mod model;
pub mod rng;
pub mod support;
pub mod validator;

pub use generator::{
    draw_candidate, filter_candidate, generate, generate_parallel, generate_sequential,
    CandidateVerdict, Engine, GeneratorError,
};
pub use model::{validate_params, GenerationStats, GeneratorParams, Inequality, LpInstance};
