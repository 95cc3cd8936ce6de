//! capexlab: a laboratory for comparing power-sector capacity-expansion
//! model variants.
//!
//! One harmonized scenario model feeds two solver backends — a
//! full-foresight linear program and a myopic pre-ordered dispatch with an
//! evolutionary capacity search — so that the effect of individual
//! modeling features (availability factors, storage boundary levels, E2P
//! coupling, NTC vs. DCLF transmission, foresight) on optimal capacity
//! expansion can be isolated and compared.
//!
//! Start with the runnable examples in `examples/`, or the `capexlab`
//! binary for the file-based workflow.

pub mod model;
pub mod simplex;
