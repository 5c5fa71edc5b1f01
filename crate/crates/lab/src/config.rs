//! Declarative experiment specifications.
//!
//! One JSON document (file or stdin) describes an experiment; command-line
//! flags are merged on top before validation. Every experiment carries an
//! explicit seed, never the wall clock, so reruns are byte-identical.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::LabError;

/// Which tool a spec drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Recover,
    Rip,
    Coherence,
    Audit,
    Phase,
    Counterexample,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Recover => "recover",
            ExperimentKind::Rip => "rip",
            ExperimentKind::Coherence => "coherence",
            ExperimentKind::Audit => "audit",
            ExperimentKind::Phase => "phase",
            ExperimentKind::Counterexample => "counterexample",
        }
    }
}

/// Sensing-matrix source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EnsembleSpec {
    Gaussian,
    Bernoulli,
    IdentityPerturbed {
        #[serde(default)]
        eps: f64,
    },
    /// Entries loaded from a matrix CSV file.
    Explicit { path: PathBuf },
}

/// Test-signal source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SignalSpec {
    Sparse {
        #[serde(default)]
        dist: ValueDistSpec,
    },
    Decaying { alpha: f64 },
    /// Loaded from a signal JSON file (1-based indices).
    File { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueDistSpec {
    #[default]
    Gaussian,
    UnitSigns,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Omp,
    Romp,
}

/// A complete experiment description. Optional fields either have per-kind
/// defaults or are required by validation for the kinds that use them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSpec {
    pub kind: Option<ExperimentKind>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub m_range: Option<Vec<usize>>,
    pub k_range: Option<Vec<usize>>,
    pub ensemble: Option<EnsembleSpec>,
    pub signal: Option<SignalSpec>,
    pub algorithm: Option<Algorithm>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    /// Recover/rip/coherence: also export the resolved matrix as CSV.
    pub dump_matrix: Option<PathBuf>,
    pub lemmas: Option<Vec<String>>,
    pub budget: Option<u64>,
    pub delta_ceiling: Option<f64>,
    /// Audit only: bypass the exact isometry computation with a fixed value.
    /// Violations this provokes are reported, never masked.
    pub delta_override: Option<f64>,
    pub max_iterations: Option<usize>,
    pub residual_tol: Option<f64>,
}

fn invalid(field: &'static str, message: impl Into<String>) -> LabError {
    LabError::Invalid { field, message: message.into() }
}

impl ExperimentSpec {
    /// Parses a spec from JSON text.
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        serde_json::from_str(text)
            .map_err(|e| LabError::Parse { what: "experiment spec".into(), message: e.to_string() })
    }

    pub fn kind(&self) -> Result<ExperimentKind, LabError> {
        self.kind.ok_or_else(|| invalid("kind", "missing experiment kind"))
    }

    pub fn seed(&self) -> Result<u64, LabError> {
        self.seed.ok_or_else(|| invalid("seed", "an explicit seed is required"))
    }

    fn require_dim(&self, field: &'static str, value: Option<usize>) -> Result<usize, LabError> {
        match value {
            Some(v) if v >= 1 => Ok(v),
            Some(_) => Err(invalid(field, "must be at least 1")),
            None => Err(invalid(field, "missing")),
        }
    }

    pub fn m(&self) -> Result<usize, LabError> {
        self.require_dim("m", self.m)
    }

    pub fn n(&self) -> Result<usize, LabError> {
        self.require_dim("n", self.n)
    }

    pub fn k(&self) -> Result<usize, LabError> {
        self.require_dim("k", self.k)
    }

    pub fn trials(&self) -> Result<u64, LabError> {
        match self.trials {
            Some(t) if t >= 1 => Ok(t),
            Some(_) => Err(invalid("trials", "must be at least 1")),
            None => Err(invalid("trials", "missing")),
        }
    }

    pub fn ensemble(&self) -> Result<&EnsembleSpec, LabError> {
        self.ensemble.as_ref().ok_or_else(|| invalid("ensemble", "missing"))
    }

    /// Full per-kind validation; every reported error names the offending
    /// field.
    pub fn validate(&self) -> Result<(), LabError> {
        let kind = self.kind()?;
        self.seed()?;
        if let Some(EnsembleSpec::IdentityPerturbed { eps }) = &self.ensemble {
            if !eps.is_finite() || *eps < 0.0 {
                return Err(invalid("ensemble.eps", "must be finite and nonnegative"));
            }
        }
        match kind {
            ExperimentKind::Recover => {
                let m = self.m()?;
                let n = self.n()?;
                self.ensemble()?;
                if let Some(EnsembleSpec::IdentityPerturbed { .. }) = &self.ensemble {
                    if m != n {
                        return Err(invalid("m", "identity_perturbed needs m == n"));
                    }
                }
                match &self.signal {
                    None | Some(SignalSpec::Sparse { .. }) | Some(SignalSpec::Decaying { .. }) => {
                        let k = self.k()?;
                        if k > n.min(m) {
                            return Err(invalid("k", "must not exceed min(m, n)"));
                        }
                        if let Some(SignalSpec::Decaying { alpha }) = &self.signal {
                            if !alpha.is_finite() || *alpha <= 1.0 {
                                return Err(invalid("signal.alpha", "must exceed 1"));
                            }
                        }
                    }
                    Some(SignalSpec::File { .. }) => {}
                }
                if let (Some(max), _) = (self.max_iterations, ()) {
                    if max == 0 {
                        return Err(invalid("max_iterations", "must be at least 1"));
                    }
                }
                if let Some(tol) = self.residual_tol {
                    if !tol.is_finite() || tol < 0.0 {
                        return Err(invalid("residual_tol", "must be finite and nonnegative"));
                    }
                }
            }
            ExperimentKind::Rip => {
                let m = self.m()?;
                let n = self.n()?;
                let k = self.k()?;
                self.ensemble()?;
                if k > n.min(m) {
                    return Err(invalid("k", "must not exceed min(m, n)"));
                }
                if let Some(t) = self.trials {
                    if t == 0 {
                        return Err(invalid("trials", "must be at least 1"));
                    }
                }
            }
            ExperimentKind::Coherence => {
                self.m()?;
                self.n()?;
                self.ensemble()?;
                if let Some(k) = self.k {
                    if k == 0 {
                        return Err(invalid("k", "must be at least 1"));
                    }
                }
            }
            ExperimentKind::Audit => {
                self.trials()?;
                let lemmas = self.lemmas.clone().unwrap_or_default();
                for lemma in &lemmas {
                    if !crate::audit::LEMMA_KEYS.contains(&lemma.as_str()) {
                        return Err(invalid(
                            "lemmas",
                            format!(
                                "unknown lemma `{lemma}` (known: {})",
                                crate::audit::LEMMA_KEYS.join(", ")
                            ),
                        ));
                    }
                }
                if let Some(d) = self.delta_override {
                    if !d.is_finite() || d < 0.0 {
                        return Err(invalid("delta_override", "must be finite and nonnegative"));
                    }
                }
            }
            ExperimentKind::Phase => {
                let n = self.n()?;
                self.trials()?;
                let m_range =
                    self.m_range.as_ref().ok_or_else(|| invalid("m_range", "missing"))?;
                let k_range =
                    self.k_range.as_ref().ok_or_else(|| invalid("k_range", "missing"))?;
                if m_range.is_empty() {
                    return Err(invalid("m_range", "must be nonempty"));
                }
                if k_range.is_empty() {
                    return Err(invalid("k_range", "must be nonempty"));
                }
                if m_range.contains(&0) {
                    return Err(invalid("m_range", "entries must be at least 1"));
                }
                if k_range.iter().any(|&k| k == 0 || k > n) {
                    return Err(invalid("k_range", "entries must be in 1..=n"));
                }
                if let Some(EnsembleSpec::IdentityPerturbed { .. }) = &self.ensemble {
                    if m_range.iter().any(|&m| m != n) {
                        return Err(invalid("m_range", "identity_perturbed needs m == n"));
                    }
                }
                if let Some(EnsembleSpec::Explicit { .. }) = &self.ensemble {
                    return Err(invalid("ensemble", "phase sweeps draw fresh matrices per trial"));
                }
            }
            ExperimentKind::Counterexample => {
                if let Some(k) = self.k {
                    if k != 2 {
                        return Err(invalid("k", "the counterexample search supports k = 2 only"));
                    }
                }
                if let Some(b) = self.budget {
                    if b == 0 {
                        return Err(invalid("budget", "must be at least 1"));
                    }
                }
                if let Some(c) = self.delta_ceiling {
                    if !c.is_finite() || c <= 0.0 {
                        return Err(invalid("delta_ceiling", "must be positive and finite"));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(kind: ExperimentKind) -> ExperimentSpec {
        ExperimentSpec {
            kind: Some(kind),
            m: Some(4),
            n: Some(4),
            k: Some(2),
            ensemble: Some(EnsembleSpec::Gaussian),
            seed: Some(1),
            trials: Some(10),
            ..Default::default()
        }
    }

    #[test]
    fn validates_recover() {
        assert!(base(ExperimentKind::Recover).validate().is_ok());
        let mut bad = base(ExperimentKind::Recover);
        bad.m = Some(0);
        match bad.validate().unwrap_err() {
            LabError::Invalid { field, .. } => assert_eq!(field, "m"),
            other => panic!("unexpected {other}"),
        }
        let mut no_seed = base(ExperimentKind::Recover);
        no_seed.seed = None;
        assert!(no_seed.validate().is_err());
    }

    #[test]
    fn validates_audit_lemmas() {
        let mut spec = base(ExperimentKind::Audit);
        spec.lemmas = Some(vec!["ip".into(), "nonsense".into()]);
        match spec.validate().unwrap_err() {
            LabError::Invalid { field, .. } => assert_eq!(field, "lemmas"),
            other => panic!("unexpected {other}"),
        }
        spec.lemmas = Some(vec!["ip".into(), "lemma37".into()]);
        assert!(spec.validate().is_ok());
        spec.trials = Some(0);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn validates_phase_ranges() {
        let mut spec = base(ExperimentKind::Phase);
        spec.m_range = Some(vec![4, 8]);
        spec.k_range = Some(vec![1, 2]);
        assert!(spec.validate().is_ok());
        spec.k_range = Some(vec![0]);
        assert!(spec.validate().is_err());
        spec.k_range = Some(vec![]);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let text = r#"{
            "kind": "recover",
            "m": 8, "n": 8, "k": 2,
            "ensemble": {"type": "identity_perturbed", "eps": 0.05},
            "signal": {"type": "sparse", "dist": "unit_signs"},
            "algorithm": "omp",
            "seed": 7
        }"#;
        let spec = ExperimentSpec::from_json(text).unwrap();
        assert_eq!(spec.kind, Some(ExperimentKind::Recover));
        assert_eq!(spec.ensemble, Some(EnsembleSpec::IdentityPerturbed { eps: 0.05 }));
        assert_eq!(spec.signal, Some(SignalSpec::Sparse { dist: ValueDistSpec::UnitSigns }));
        assert!(spec.validate().is_ok());
        let rendered = serde_json::to_string(&spec).unwrap();
        assert_eq!(ExperimentSpec::from_json(&rendered).unwrap(), spec);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(ExperimentSpec::from_json(r#"{"kind": "rip", "bogus": 1}"#).is_err());
    }
}
