//! Flux-globalization based well-balanced A-WENO schemes with local
//! characteristic decomposition of equilibrium variables.

pub mod aiweno;
pub mod harness;
pub mod lcd;
pub mod mesh;
pub mod quadrature;
pub mod scheme;
pub mod systems;
pub mod time;
pub mod vars;

pub use vars::Vars;
