//! Learning to localize type errors in λML.

pub mod features;
pub mod harness;
pub mod labeler;
pub mod lang;
pub mod models;
pub mod slicer;
pub mod typecheck;
