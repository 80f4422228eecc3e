//! Exact vertical decompositions of unions and arrangements of convex regions in 3D,
//! built by lazy randomized incremental construction, and the structures built on top
//! of them: cuttings, a point-enclosure index and lower envelopes in four dimensions.

pub mod bench;
pub mod cutting;
pub mod enclosure;
pub mod envelope;
pub mod error;
pub mod exact;
pub mod general_position;
pub mod oracle;
pub mod scene;
pub mod ric;
pub mod vd;

pub use error::Error;
