use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::info::{BinningStrategy, MicNormalization, MicParams};
use crate::panel::{indicator_order, PanelDataset, DEFAULT_MIN_OVERLAP};
use crate::temporal::DEFAULT_MAX_LAG;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Pearson,
    MutualInformation,
    Granger,
    Mic,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Pearson,
        Method::MutualInformation,
        Method::Granger,
        Method::Mic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Pearson => "pearson",
            Method::MutualInformation => "mutual_information",
            Method::Granger => "granger",
            Method::Mic => "mic",
        }
    }

    /// Name of the scalar a matrix of this method reports per cell.
    pub fn scalar_name(self) -> &'static str {
        match self {
            Method::Pearson => "r",
            Method::MutualInformation => "mi_bits",
            Method::Granger => "p_value_at_best_lag",
            Method::Mic => "mic",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Battery settings, read from a flat TOML table. Every key is optional.
///
/// ```toml
/// methods = ["pearson", "mutual_information", "granger", "mic"]
/// min_overlap = 10
/// max_lag = 5
/// difference_first = false
/// reverse_granger = false
/// mi_bins = 5                  # omit for min(floor(sqrt(n)), 10)
/// mi_strategy = "equal-frequency"
/// mic_alpha = 0.6
/// mic_clumps = 15.0
/// mic_normalization = "min-entropy-grid"
/// outcomes = []                # empty: every non-taxonomy series
/// indicators = []              # empty: every taxonomy series
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatteryConfig {
    pub methods: Vec<Method>,
    pub min_overlap: usize,
    pub max_lag: usize,
    /// First-difference both series before the Granger test.
    pub difference_first: bool,
    /// Test outcome → indicator instead of indicator → outcome.
    pub reverse_granger: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mi_bins: Option<usize>,
    pub mi_strategy: BinningStrategy,
    pub mic_alpha: f64,
    pub mic_clumps: f64,
    pub mic_normalization: MicNormalization,
    pub outcomes: Vec<String>,
    pub indicators: Vec<String>,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        let mic = MicParams::default();
        BatteryConfig {
            methods: Method::ALL.to_vec(),
            min_overlap: DEFAULT_MIN_OVERLAP,
            max_lag: DEFAULT_MAX_LAG,
            difference_first: false,
            reverse_granger: false,
            mi_bins: None,
            mi_strategy: BinningStrategy::EqualFrequency,
            mic_alpha: mic.alpha,
            mic_clumps: mic.clumps,
            mic_normalization: mic.normalization,
            outcomes: Vec::new(),
            indicators: Vec::new(),
        }
    }
}

impl BatteryConfig {
    pub fn from_toml(text: &str) -> Result<BatteryConfig> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim().to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn mic_params(&self) -> MicParams {
        MicParams {
            alpha: self.mic_alpha,
            clumps: self.mic_clumps,
            normalization: self.mic_normalization,
        }
    }

    /// Checks the settings against `dataset` and fills in default code lists.
    pub fn resolve(&self, dataset: &PanelDataset) -> Result<Plan> {
        let fail = |m: String| Err(Error::Config(m));
        if self.methods.is_empty() {
            return fail("methods must not be empty".into());
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return fail(format!("method {m} listed twice"));
            }
        }
        if self.min_overlap < 3 {
            return fail(format!(
                "min_overlap must be at least 3, got {}",
                self.min_overlap
            ));
        }
        if self.max_lag < 1 {
            return fail("max_lag must be at least 1".into());
        }
        if let Some(b) = self.mi_bins {
            if b < 2 {
                return fail(format!("mi_bins must be at least 2, got {b}"));
            }
        }
        if !(self.mic_alpha > 0.0 && self.mic_alpha <= 1.0) {
            return fail(format!(
                "mic_alpha must lie in (0, 1], got {}",
                self.mic_alpha
            ));
        }
        if !(self.mic_clumps >= 1.0 && self.mic_clumps.is_finite()) {
            return fail(format!("mic_clumps must be >= 1, got {}", self.mic_clumps));
        }

        let check = |codes: &[String], what: &str| -> Result<Vec<String>> {
            let mut out: Vec<String> = Vec::new();
            for c in codes {
                if dataset.indicator(c).is_none() {
                    return Err(Error::Config(format!("unknown {what} code {c:?}")));
                }
                if !out.contains(c) {
                    out.push(c.clone());
                }
            }
            Ok(out)
        };
        let outcomes = if self.outcomes.is_empty() {
            dataset
                .indicators()
                .iter()
                .filter(|i| !i.is_builtin())
                .map(|i| i.code.clone())
                .collect()
        } else {
            check(&self.outcomes, "outcome")?
        };
        let mut indicators = if self.indicators.is_empty() {
            dataset
                .indicators()
                .iter()
                .filter(|i| i.is_builtin())
                .map(|i| i.code.clone())
                .collect()
        } else {
            check(&self.indicators, "indicator")?
        };
        indicators.sort_by(|a, b| indicator_order(a, b));
        if outcomes.is_empty() {
            return fail("dataset has no outcome series".into());
        }
        if indicators.is_empty() {
            return fail("dataset has no indicator series".into());
        }
        Ok(Plan {
            outcomes,
            indicators,
        })
    }
}

/// Outcome and indicator codes a run will use.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub outcomes: Vec<String>,
    pub indicators: Vec<String>,
}
