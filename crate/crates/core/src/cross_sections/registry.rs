use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::polarization::PolarizationTriple;

use super::{
    oam_closed_form, oam_oracle, rose_closed_form, rose_oracle, CaptureModel, Channel,
    ChannelCrossSection, Mode,
};

/// A way of evaluating channel cross-sections for one neutron mode.
pub trait CrossSectionMethod: Send + Sync {
    /// Short name used for lookup, e.g. `closed-form`.
    fn name(&self) -> &'static str;

    fn mode(&self) -> Mode;

    fn description(&self) -> &'static str;

    fn channel_cross_section(
        &self,
        channel: Channel,
        pol: &PolarizationTriple,
        model: &CaptureModel,
    ) -> Result<ChannelCrossSection>;

    fn cross_sections(
        &self,
        pol: &PolarizationTriple,
        model: &CaptureModel,
    ) -> Result<Vec<ChannelCrossSection>> {
        self.mode()
            .channels()
            .into_iter()
            .map(|c| self.channel_cross_section(c, pol, model))
            .collect()
    }
}

/// Printed closed-form brackets.
pub struct ClosedForm(pub Mode);

impl CrossSectionMethod for ClosedForm {
    fn name(&self) -> &'static str {
        "closed-form"
    }

    fn mode(&self) -> Mode {
        self.0
    }

    fn description(&self) -> &'static str {
        match self.0 {
            Mode::Ordinary => "singlet/triplet brackets K/4 (1 - pP_N), K/4 (3 + pP_N)",
            Mode::Oam => "J''=0,1,2 brackets in the pairwise products pP_L, pP_N, P_L P_N",
        }
    }

    fn channel_cross_section(
        &self,
        channel: Channel,
        pol: &PolarizationTriple,
        model: &CaptureModel,
    ) -> Result<ChannelCrossSection> {
        match self.0 {
            Mode::Ordinary => rose_closed_form(channel, pol, model),
            Mode::Oam => oam_closed_form(channel, pol, model),
        }
    }
}

/// Exact sum over magnetic substates with Clebsch-Gordan amplitudes.
pub struct Oracle(pub Mode);

impl CrossSectionMethod for Oracle {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn mode(&self) -> Mode {
        self.0
    }

    fn description(&self) -> &'static str {
        match self.0 {
            Mode::Ordinary => "substate sum over (m_N, mu) of populations times CG^2",
            Mode::Oam => "substate sum over (m_N, m_L, mu) with coherent j'=1/2, 3/2 paths",
        }
    }

    fn channel_cross_section(
        &self,
        channel: Channel,
        pol: &PolarizationTriple,
        model: &CaptureModel,
    ) -> Result<ChannelCrossSection> {
        match self.0 {
            Mode::Ordinary => rose_oracle(channel, pol, model),
            Mode::Oam => oam_oracle(channel, pol, model),
        }
    }
}

/// Cross-section methods keyed by `(mode, name)`.
#[derive(Default)]
pub struct MethodRegistry {
    methods: BTreeMap<(Mode, &'static str), Box<dyn CrossSectionMethod>>,
}

impl MethodRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Closed-form and oracle methods for both modes.
    pub fn with_builtin() -> Self {
        let mut registry = Self::new();
        for mode in Mode::ALL {
            registry
                .register(Box::new(ClosedForm(mode)))
                .and_then(|r| r.register(Box::new(Oracle(mode))))
                .expect("builtin method names are unique");
        }
        registry
    }

    pub fn register(&mut self, method: Box<dyn CrossSectionMethod>) -> Result<&mut Self> {
        let key = (method.mode(), method.name());
        if self.methods.contains_key(&key) {
            return Err(Error::InvalidInput(format!(
                "method {}/{} is already registered",
                key.0, key.1
            )));
        }
        self.methods.insert(key, method);
        Ok(self)
    }

    pub fn get(&self, mode: Mode, name: &str) -> Result<&dyn CrossSectionMethod> {
        self.methods
            .iter()
            .find(|((m, n), _)| *m == mode && *n == name)
            .map(|(_, method)| method.as_ref())
            .ok_or_else(|| Error::UnknownMethod(format!("{mode}/{name}")))
    }

    /// Method names available for a mode.
    pub fn names(&self, mode: Mode) -> Vec<&'static str> {
        self.methods
            .keys()
            .filter(|(m, _)| *m == mode)
            .map(|(_, n)| *n)
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn CrossSectionMethod> {
        self.methods.values().map(|m| m.as_ref())
    }
}

/// Shared registry holding the builtin methods.
pub fn builtin_methods() -> &'static MethodRegistry {
    static REGISTRY: OnceLock<MethodRegistry> = OnceLock::new();
    REGISTRY.get_or_init(MethodRegistry::with_builtin)
}
