//! Monotone offline allocation rules.

mod k_unit;
mod shortest_path;
mod single_item;

pub use k_unit::{k_unit, KUnit};
pub use shortest_path::{eff_shortest_path, Edge, EffRule, Graph, PathResult};
pub use single_item::{single_item, SingleItem};
