use std::sync::Arc;

use super::{clopen_space_methods, Capabilities, EffectiveSystem, SystemError};
use crate::clopen::{Alphabet, ClopenSet, SpaceSpec, Window};

/// The identity map on any space.
#[derive(Debug, Clone)]
pub struct Identity {
    space: Arc<SpaceSpec>,
}

impl Identity {
    pub fn new(space: Arc<SpaceSpec>) -> Self {
        Self { space }
    }
}

impl EffectiveSystem for Identity {
    type Set = ClopenSet;

    clopen_space_methods!();

    fn meets(&self, set: &ClopenSet) -> bool {
        !set.is_empty()
    }

    fn preimage(&self, set: &ClopenSet) -> ClopenSet {
        set.clone()
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            effectively_regular: false,
            shadowing: Some(super::ShadowingModulus::Identity),
            finite: false,
        }
    }

    fn describe(&self) -> String {
        "identity".into()
    }
}

/// `x -> 0x` on `{0,1}^N`.
#[derive(Debug, Clone)]
pub struct PrependZero {
    space: Arc<SpaceSpec>,
}

impl PrependZero {
    pub fn new() -> Self {
        Self {
            space: SpaceSpec::one_sided(Alphabet::binary()),
        }
    }

    /// Same map over an arbitrary one-sided alphabet, prepending symbol 0.
    pub fn over(space: Arc<SpaceSpec>) -> Result<Self, SystemError> {
        if space.is_two_sided() || space.tags().is_some() {
            return Err(SystemError::Spec(
                "prepend_zero needs an untagged one-sided space".into(),
            ));
        }
        Ok(Self { space })
    }
}

impl Default for PrependZero {
    fn default() -> Self {
        Self::new()
    }
}

impl EffectiveSystem for PrependZero {
    type Set = ClopenSet;

    clopen_space_methods!();

    fn meets(&self, set: &ClopenSet) -> bool {
        !set.is_empty()
    }

    fn preimage(&self, set: &ClopenSet) -> ClopenSet {
        let Some(w) = set.window() else {
            return set.clone();
        };
        let words = set
            .words(0)
            .iter()
            .filter(|w| w[0] == 0)
            .map(|w| w[1..].to_vec())
            .collect();
        let window = (w.hi > 0).then(|| Window::new(0, w.hi - 1));
        ClopenSet::from_parts(self.space.clone(), window, vec![words])
    }

    fn capabilities(&self) -> Capabilities {
        // A contraction: every pseudo-orbit is shadowed at the same precision.
        Capabilities {
            effectively_regular: false,
            shadowing: Some(super::ShadowingModulus::Identity),
            finite: false,
        }
    }

    fn describe(&self) -> String {
        "x -> 0x".into()
    }
}
