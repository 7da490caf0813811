pub mod error;
pub mod family;
pub mod gallery;
pub mod cocycle;
pub mod cohomology;
pub mod group;
pub mod iyb;
pub mod linalg;
pub mod modular;
pub mod search;
pub mod spec;
pub mod twisted;

pub use error::{Error, Result};
pub use group::{Elem, FiniteGroup, Limits, SubgroupSet};
