use std::collections::BTreeMap;

use serde::Serialize;

use super::{
    besov_norm, lebesgue_norm, local_hardy_norm, mass_outside_core, triebel_norm, NormError,
};
use crate::exponent::{Family, ReciprocalExponent, SmoothnessIndex};
use crate::filters::FilterBank;
use crate::grid::GridFunction;
use crate::stft::Window;

/// Truncation diagnostics above this relative mass turn into warnings.
pub const WARN_MASS: f64 = 1e-3;

#[derive(Clone, Copy, Debug)]
pub struct NormParams {
    pub p: ReciprocalExponent,
    pub q: ReciprocalExponent,
    pub s: SmoothnessIndex,
    pub window: Window,
    /// Top shell for `B` and `F`; the largest alias-free shell when absent.
    pub jmax: Option<u32>,
}

impl NormParams {
    pub fn new(p: ReciprocalExponent, q: ReciprocalExponent, s: SmoothnessIndex) -> Self {
        Self {
            p,
            q,
            s,
            window: Window::GaussianUnit,
            jmax: None,
        }
    }

    fn bank(&self, f: &GridFunction) -> Result<FilterBank, NormError> {
        let jmax = self
            .jmax
            .unwrap_or_else(|| FilterBank::max_shells(f.spec()));
        Ok(FilterBank::new(*f.spec(), jmax)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub value: f64,
    pub mass_outside_core: f64,
    pub mass_above_top: Option<f64>,
    pub warnings: Vec<String>,
}

impl Evaluation {
    fn new(f: &GridFunction, value: f64, mass_above_top: Option<f64>) -> Self {
        let mass_outside_core = mass_outside_core(f);
        let mut warnings = Vec::new();
        if mass_outside_core >= WARN_MASS {
            warnings.push(format!(
                "{:.3e} of the L2 mass lies outside [-L/4, L/4]",
                mass_outside_core
            ));
        }
        if let Some(m) = mass_above_top.filter(|m| *m >= WARN_MASS) {
            warnings.push(format!(
                "{m:.3e} of the spectral mass lies above the top shell"
            ));
        }
        Self {
            value,
            mass_outside_core,
            mass_above_top,
            warnings,
        }
    }
}

pub trait NormEvaluator: Send + Sync {
    fn name(&self) -> &'static str;
    fn family(&self) -> Family;
    fn evaluate(&self, f: &GridFunction, params: &NormParams) -> Result<Evaluation, NormError>;
}

struct Lebesgue;
struct Wiener;
struct Modulation;
struct Besov;
struct Triebel;
struct LocalHardy;

impl NormEvaluator for Lebesgue {
    fn name(&self) -> &'static str {
        "L"
    }
    fn family(&self) -> Family {
        Family::Lebesgue
    }
    fn evaluate(&self, f: &GridFunction, params: &NormParams) -> Result<Evaluation, NormError> {
        Ok(Evaluation::new(
            f,
            lebesgue_norm(f, params.p, params.s),
            None,
        ))
    }
}

impl NormEvaluator for Wiener {
    fn name(&self) -> &'static str {
        "W"
    }
    fn family(&self) -> Family {
        Family::WienerAmalgam
    }
    fn evaluate(&self, f: &GridFunction, params: &NormParams) -> Result<Evaluation, NormError> {
        let value = super::default_grid_norm(
            f,
            params.window,
            super::MixedNormSpec::wiener(params.p, params.q, params.s),
        )?;
        Ok(Evaluation::new(f, value, None))
    }
}

impl NormEvaluator for Modulation {
    fn name(&self) -> &'static str {
        "M"
    }
    fn family(&self) -> Family {
        Family::Modulation
    }
    fn evaluate(&self, f: &GridFunction, params: &NormParams) -> Result<Evaluation, NormError> {
        let spec = super::MixedNormSpec::modulation(params.p, params.q, params.s);
        let value = super::default_grid_norm(f, params.window, spec)?;
        Ok(Evaluation::new(f, value, None))
    }
}

impl NormEvaluator for Besov {
    fn name(&self) -> &'static str {
        "B"
    }
    fn family(&self) -> Family {
        Family::Besov
    }
    fn evaluate(&self, f: &GridFunction, params: &NormParams) -> Result<Evaluation, NormError> {
        let bank = params.bank(f)?;
        let value = besov_norm(f, &bank, params.p, params.q, params.s)?;
        Ok(Evaluation::new(f, value, Some(bank.mass_above_top(f)?)))
    }
}

impl NormEvaluator for Triebel {
    fn name(&self) -> &'static str {
        "F"
    }
    fn family(&self) -> Family {
        Family::TriebelLizorkin
    }
    fn evaluate(&self, f: &GridFunction, params: &NormParams) -> Result<Evaluation, NormError> {
        let bank = params.bank(f)?;
        let value = triebel_norm(f, &bank, params.p, params.q, params.s)?;
        Ok(Evaluation::new(f, value, Some(bank.mass_above_top(f)?)))
    }
}

impl NormEvaluator for LocalHardy {
    fn name(&self) -> &'static str {
        "hp"
    }
    fn family(&self) -> Family {
        Family::LocalHardy
    }
    fn evaluate(&self, f: &GridFunction, params: &NormParams) -> Result<Evaluation, NormError> {
        Ok(Evaluation::new(f, local_hardy_norm(f, params.p)?, None))
    }
}

/// Norm evaluators looked up by short name.
pub struct NormRegistry {
    evaluators: BTreeMap<&'static str, Box<dyn NormEvaluator>>,
}

impl NormRegistry {
    pub fn empty() -> Self {
        Self {
            evaluators: BTreeMap::new(),
        }
    }

    /// `L`, `W`, `M`, `B`, `F` and `hp`.
    pub fn with_defaults() -> Self {
        let mut registry = Self::empty();
        registry.register(Box::new(Lebesgue));
        registry.register(Box::new(Wiener));
        registry.register(Box::new(Modulation));
        registry.register(Box::new(Besov));
        registry.register(Box::new(Triebel));
        registry.register(Box::new(LocalHardy));
        registry
    }

    /// Replaces any evaluator already registered under the same name.
    pub fn register(&mut self, evaluator: Box<dyn NormEvaluator>) {
        self.evaluators.insert(evaluator.name(), evaluator);
    }

    pub fn get(&self, name: &str) -> Option<&dyn NormEvaluator> {
        self.evaluators.get(name).map(|e| e.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.evaluators.keys().copied()
    }

    pub fn for_family(&self, family: Family) -> Option<&dyn NormEvaluator> {
        self.evaluators
            .values()
            .find(|e| e.family() == family)
            .map(|e| e.as_ref())
    }
}

impl Default for NormRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}
