//! Compiles the guide's code listings as doctests. Each chapter is a module so
//! that a failing listing points at its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/states.md")]
pub mod states {}

#[doc = include_str!("../../../book/src/phase-space.md")]
pub mod phase_space {}

#[doc = include_str!("../../../book/src/chsh.md")]
pub mod chsh {}

#[doc = include_str!("../../../book/src/ch.md")]
pub mod ch {}

#[doc = include_str!("../../../book/src/optimization.md")]
pub mod optimization {}

#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}
