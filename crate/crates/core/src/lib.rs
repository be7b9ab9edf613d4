//! Effective symbolic dynamical systems and automata-based model checking.
//!
//! Systems are given by a nonemptiness oracle for clopen sets against their
//! closed subset and by computable preimages of clopen sets. Observer
//! automata read trajectories through a clopen partition; the checker
//! decides or semi-decides whether some trajectory is accepted.

pub mod automata;
pub mod checker;
pub mod clopen;
pub mod gallery;
pub mod json;
pub mod language;
pub mod system;

pub use clopen::{
    Alphabet, ClopenError, ClopenSet, Cylinder, Resolution, SetAlgebra, SpaceSpec, Sym, Window,
    Word,
};
pub use system::{Capabilities, DynSystem, EffectiveSystem, ShadowingModulus, SystemError};
