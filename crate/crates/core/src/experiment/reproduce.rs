use serde::{Deserialize, Serialize};

use super::PresetId;

/// Accuracy deviation (percentage points) above which a preset is flagged.
pub const DEVIATION_LIMIT: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetComparison {
    pub preset: PresetId,
    pub description: String,
    /// Percent.
    pub accuracy: f64,
    pub macro_f1: f64,
    pub published_accuracy: f64,
    pub published_macro_f1: f64,
    pub deviation: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimCheck {
    pub claim: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproductionReport {
    pub rows: Vec<PresetComparison>,
    pub claims: Vec<ClaimCheck>,
}

/// Compare measured (accuracy, macro-F1) fractions against the published
/// numbers. `measured` must hold one entry per preset.
pub fn compare(measured: &[(PresetId, f64, f64)]) -> ReproductionReport {
    let rows: Vec<PresetComparison> = measured
        .iter()
        .map(|&(p, acc, f1)| {
            let (pa, pf) = p.published();
            let deviation = 100.0 * acc - pa;
            PresetComparison {
                preset: p,
                description: p.description().to_string(),
                accuracy: 100.0 * acc,
                macro_f1: 100.0 * f1,
                published_accuracy: pa,
                published_macro_f1: pf,
                deviation,
                flagged: deviation.abs() > DEVIATION_LIMIT,
            }
        })
        .collect();
    let acc = |p: PresetId| rows.iter().find(|r| r.preset == p).map(|r| r.accuracy);
    let claim = |name: &str, a: PresetId, b: PresetId, strict: bool| ClaimCheck {
        claim: name.to_string(),
        holds: match (acc(a), acc(b)) {
            (Some(x), Some(y)) => {
                if strict {
                    x > y
                } else {
                    x >= y
                }
            }
            _ => false,
        },
    };
    let claims = vec![
        claim("(b) > (a)", PresetId::B, PresetId::A, true),
        claim("(f) >= (e)", PresetId::F, PresetId::E, false),
        claim("(c) >= (b)", PresetId::C, PresetId::B, false),
    ];
    ReproductionReport { rows, claims }
}

impl ReproductionReport {
    pub fn render_table(&self) -> String {
        let mut out = format!(
            "{:<3}{:<46}{:>16}{:>16}{:>8}\n",
            "", "setting", "measured", "published", "dev"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:<3}{:<46}{:>16}{:>16}{:>+8.1}{}\n",
                r.preset.letter(),
                r.description,
                format!("{:.1}% / {:.1}%", r.accuracy, r.macro_f1),
                format!("{:.1}% / {:.1}%", r.published_accuracy, r.published_macro_f1),
                r.deviation,
                if r.flagged { "  FLAG" } else { "" }
            ));
        }
        out.push('\n');
        for c in &self.claims {
            out.push_str(&format!("{:<12}{}\n", c.claim, if c.holds { "holds" } else { "does not hold" }));
        }
        out
    }
}
