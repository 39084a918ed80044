//! Lure systems: a linear block closed by a static nonlinearity, `u = -phi(y)`.

mod nonlinearity;
mod sim;
mod system;

pub use nonlinearity::{SectorBounds, StaticNonlinearity};
pub use sim::{classify, simulate, AttractorKind, AttractorVerdict, SimOptions, SimulationTrace};
pub use system::{equilibria, Equilibrium, EquilibriumScan, EquilibriumSet, LureSystem, Stability};
