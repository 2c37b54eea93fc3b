//! Lattice backend: a 1+1 dimensional explicit realization of spacetimes
//! with sources, the Klein-Gordon operator, Green's operators, observable
//! classes, relative Cauchy evolution and stress-energy diagnostics.

#![allow(clippy::needless_range_loop)]

pub mod chart;
pub mod classes;
pub mod corank;
pub mod dynloc;
pub mod error;
pub mod export;
pub mod field;
pub mod hodge;
pub mod presets;
pub mod quantum;
pub mod rce;
pub mod scenarios;
pub mod region;
pub mod spacetime;
pub mod stress;

pub use classes::{class_equal, pairing, ObservableClass};
pub use error::{LatticeError, Result};
pub use field::FieldConfig;
pub use rce::{rce, Perturbation};
pub use region::{CompactRegion, Rect};
pub use spacetime::{GreenKind, LatticeGeometry, LatticeSpacetime, Metric};
