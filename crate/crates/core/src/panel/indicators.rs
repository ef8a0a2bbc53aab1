use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Economic,
    Education,
    Society,
    Technology,
    MentalHealth,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Economic => "Economic",
            Category::Education => "Education",
            Category::Society => "Society",
            Category::Technology => "Technology",
            Category::MentalHealth => "MentalHealth",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A variable carried by a panel: one of the built-in socioeconomic
/// indicators, or an outcome series (category `MentalHealth`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndicatorCode {
    pub code: String,
    pub name: String,
    pub category: Category,
    pub units: String,
}

impl IndicatorCode {
    pub fn new(
        code: impl Into<String>,
        name: impl Into<String>,
        category: Category,
        units: impl Into<String>,
    ) -> Self {
        IndicatorCode {
            code: code.into(),
            name: name.into(),
            category,
            units: units.into(),
        }
    }

    /// An outcome series whose display name is its code.
    pub fn outcome(code: impl Into<String>) -> Self {
        let code = code.into();
        IndicatorCode {
            name: code.clone(),
            code,
            category: Category::MentalHealth,
            units: String::new(),
        }
    }

    pub fn is_builtin(&self) -> bool {
        builtin_position(&self.code).is_some()
    }
}

const TAXONOMY: [(&str, &str, Category, &str); 18] = [
    ("E1", "GDP", Category::Economic, "Current US$"),
    ("E2", "GDP per capita", Category::Economic, "Current US$"),
    ("E3", "Inflation, consumer prices", Category::Economic, "%"),
    ("E4", "Employment in industry", Category::Economic, "%"),
    ("E5", "Employment in services", Category::Economic, "%"),
    ("E6", "Employment in agriculture", Category::Economic, "%"),
    (
        "ED1",
        "School enrollment, primary",
        Category::Education,
        "%",
    ),
    (
        "ED2",
        "School enrollment, secondary",
        Category::Education,
        "%",
    ),
    (
        "ED3",
        "School enrollment, tertiary",
        Category::Education,
        "%",
    ),
    (
        "ED4",
        "Government expenditure on education, total",
        Category::Education,
        "%",
    ),
    (
        "S1",
        "Life expectancy at birth, total",
        Category::Society,
        "Years",
    ),
    ("S2", "Unemployment, total", Category::Society, "%"),
    (
        "S3",
        "Prevalence of undernourishment",
        Category::Society,
        "%",
    ),
    (
        "T1",
        "Individuals using the Internet",
        Category::Technology,
        "%",
    ),
    (
        "T2",
        "Mobile cellular subscriptions",
        Category::Technology,
        "per 100 people",
    ),
    (
        "T3",
        "Fixed broadband subscriptions",
        Category::Technology,
        "per 100 people",
    ),
    (
        "T4",
        "Secure Internet servers",
        Category::Technology,
        "per 1 million people",
    ),
    ("T5", "ICT goods exports", Category::Technology, "%"),
];

/// The eighteen built-in socioeconomic indicators, in taxonomy order.
pub fn builtin_indicators() -> Vec<IndicatorCode> {
    TAXONOMY
        .iter()
        .map(|&(code, name, category, units)| IndicatorCode::new(code, name, category, units))
        .collect()
}

/// Position of a code in the built-in taxonomy. Column order of every
/// result matrix follows this.
pub fn builtin_position(code: &str) -> Option<usize> {
    TAXONOMY.iter().position(|t| t.0 == code)
}

/// Resolves a code (`"E2"`) or a full indicator name (`"GDP per capita"`),
/// both case-insensitively.
pub fn indicator_lookup(key: &str) -> Result<IndicatorCode> {
    let needle = key.trim().to_lowercase();
    let hit = TAXONOMY
        .iter()
        .find(|t| t.0.to_lowercase() == needle || t.1.to_lowercase() == needle);
    if let Some(&(code, name, category, units)) = hit {
        return Ok(IndicatorCode::new(code, name, category, units));
    }

    let mut ranked: Vec<(usize, &str)> = TAXONOMY
        .iter()
        .map(|t| {
            let d = levenshtein(&needle, &t.0.to_lowercase())
                .min(levenshtein(&needle, &t.1.to_lowercase()));
            (d, t.0)
        })
        .collect();
    ranked.sort();
    let suggestions = ranked.iter().take(3).map(|(_, c)| c.to_string()).collect();
    Err(Error::NotFound {
        key: key.to_string(),
        suggestions,
    })
}

fn levenshtein(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.chars().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}
