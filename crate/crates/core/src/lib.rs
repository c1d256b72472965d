// SPDX-License-Identifier: Apache-2.0

//! Generalized geometric programming and its use in 3D integrated circuit design.
//!
//! [`expr`] and [`problem`] hold the modeling layer, [`solver`] the
//! log-domain barrier method. The design formulations build on top:
//! [`netlist`] and [`sizing`] for gate sizing, [`interconnect`] for wire
//! sizing on RC trees, [`floorplan`] for temperature-aware floorplanning,
//! and [`fit`] for fitting monomial and posynomial models to data.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod expr;
pub mod fit;
pub mod floorplan;
pub mod instances;
pub mod interconnect;
pub mod json;
pub mod netlist;
pub mod problem;
pub mod sizing;
pub mod solver;

pub use expr::{GenExpr, ModelError, Monomial, Posynomial, VarId, VarRegistry};
pub use problem::{lower_to_gp, GgpProblem, GpProblem};
pub use solver::{solve_ggp, solve_gp, GgpSolution, Solution, SolverConfig, Status};
