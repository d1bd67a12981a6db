//! Exact first homology of covers: Smith normal form, Reidemeister–Schreier
//! rewriting, low-index subgroups, and the lifted monodromy on the cover of the fiber.

pub mod fiber;
pub mod linalg;
pub mod lowindex;
pub mod matrix;
pub mod schreier;
pub mod snf;

pub use fiber::{b1_filled_cover, fixed_and_peripheral, induced_fiber_action, wang_b1, HomologyCertificate};
pub use lowindex::{low_index_subgroups, LowIndexResult};
pub use matrix::IntMatrix;
pub use schreier::{reidemeister_schreier, SubgroupPresentation};
pub use snf::{smith_normal_form, SnfResult};
