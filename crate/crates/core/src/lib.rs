//! Yao graph construction.
//!
//! Three algorithms build the same directed graph (each point joined to its
//! nearest neighbor inside each of `k` equal cones):
//!
//! - [`sweep::build_yao_graph_sweepline`]: the `O(n log n)` plane sweep, one
//!   pass per cone, over a linked-list/AVL status ([`status`]) and a
//!   two-part event queue ([`queue`]);
//! - [`alt::grid_yao`]: spiral search over a uniform grid;
//! - [`alt::naive_yao`]: the all-pairs baseline, also used as the oracle.
//!
//! [`graph`] compares graphs and measures stretch factors, [`io`] generates
//! inputs and reads/writes the text formats.

pub mod alt;
pub mod graph;
pub mod io;
pub mod kernel;
pub mod queue;
pub mod status;
pub mod sweep;

pub use graph::{Edge, YaoGraph};
pub use kernel::{ConeSpec, KernelConfig, KernelMode, Point, Vec2};
