//! Algebra of 2-2-2 no-signaling boxes and the OR-AND nonlocality distillation
//! protocol: wirings, copy-count optimization, the quantum Hardy family and
//! post-quantum detectors.

pub mod nsbox;
pub mod wiring;
pub mod distill;
pub mod quantum;
pub mod pqdetect;
