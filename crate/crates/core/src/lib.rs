//! Path-based coflow scheduling.
//!
//! A coflow is a weighted job made of flows; each flow pushes an integer
//! number of data units along a fixed node path, and a unit occupies every
//! node of its path during the slot it is sent in. Nodes have a per-slot
//! capacity. The goal is to minimise the weighted sum of coflow completion
//! times.
//!
//! The crate implements the LP-rounding pipeline for this problem:
//!
//!  1. [`relaxation`] solves a concurrent-open-shop style LP relaxation by
//!     cutting planes on top of the small dense simplex in [`lp`], and turns
//!     the optimal completion times into job deadlines.
//!  2. [`hyper`] expands every unit of demand into a hyperedge, builds the
//!     line graph, orients it from later to earlier deadlines and extracts
//!     kernels from the resulting acyclic orientation.
//!  3. [`scheduler`] assigns kernels to slots (unit or general capacities),
//!     validates schedules and checks the approximation guarantees.
//!
//! [`oracle`] provides exact and greedy reference schedules, [`instance`]
//! the problem model, generators and capacity reductions, and [`pipeline`]
//! glues everything together with all invariant checks.
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod graph;
pub mod hyper;
pub mod instance;
pub mod lp;
pub mod oracle;
pub mod pipeline;
pub mod rational;
pub mod relaxation;
pub mod scheduler;
pub mod tol;

pub use instance::{Capacity, Coflow, Flow, Instance, Node};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineOutcome};
