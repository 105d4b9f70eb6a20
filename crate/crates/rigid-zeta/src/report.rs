//! The machine-readable result document.

use serde::{Deserialize, Serialize};

use crate::doc::SCHEMA;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrecisionReport {
    pub chi_digits: u32,
    pub delta1: u32,
    pub delta2: u32,
    pub delta: u32,
    pub f_digits: u32,
    pub n_minimal: u32,
    pub n_used: u32,
    pub margin: u32,
    pub forced: bool,
    pub e0: u32,
    pub einf: u32,
    pub setup_precision: u32,
    pub max_finite_step_loss: u32,
    pub finite_loss_bound: u32,
    pub infinite_loss: u32,
    pub infinite_loss_bound: u32,
    pub coordinate_loss: u32,
    pub losses_within_bounds: bool,
    pub frobenius_entry_floor: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuditClauseReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuditBlock {
    pub passed: bool,
    pub clauses: Vec<AuditClauseReport>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleBlock {
    pub depth: usize,
    /// #X(F_{q^i}) by enumeration, i = 1..depth.
    pub counts: Vec<String>,
    /// Counts derived from the recovered chi.
    pub pipeline_counts: Vec<String>,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, Default)]
pub struct Timings {
    pub setup_ms: u128,
    pub basis_ms: u128,
    pub frobenius_ms: u128,
    pub reduction_ms: u128,
    pub recover_ms: u128,
    pub oracle_ms: u128,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZetaBlock {
    /// chi coefficients a_0 .. a_2g as decimal strings.
    pub numerator: Vec<String>,
    pub denominator: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: String,
    pub p: String,
    pub n: usize,
    pub q: String,
    pub genus: usize,
    /// chi coefficients a_0 .. a_2g, decimal strings.
    pub chi: Vec<String>,
    pub zeta: ZetaBlock,
    /// #X(F_{q^i}) for i = 1..max(genus, oracle depth, 1).
    pub counts: Vec<String>,
    pub precision: Option<PrecisionReport>,
    pub audit: AuditBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleBlock>,
    pub timings_ms: Timings,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl ReportDocument {
    pub fn new_shell(p: String, n: usize, q: String) -> Self {
        ReportDocument {
            schema: SCHEMA.to_string(),
            p,
            n,
            q,
            genus: 0,
            chi: vec!["1".into()],
            zeta: ZetaBlock {
                numerator: vec!["1".into()],
                denominator: "(1-T)(1-qT)".into(),
            },
            counts: vec![],
            precision: None,
            audit: AuditBlock {
                passed: false,
                clauses: vec![],
            },
            oracle: None,
            timings_ms: Timings::default(),
            warnings: vec![],
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// The deterministic part (everything except timings).
    pub fn deterministic_view(&self) -> String {
        let mut clone = self.clone();
        clone.timings_ms = Timings::default();
        clone.to_json()
    }
}
