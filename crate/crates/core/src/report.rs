use serde::{Deserialize, Serialize};

use crate::regime::CaseLabel;

/// How many orders of Sobolev regularity the solution loses relative to the
/// data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "order", rename_all = "snake_case")]
pub enum RegularityLoss {
    /// Data in `H^{s+p}` gives traces in `H^s`.
    Finite(u32),
    /// No finite `p` suffices; data must lie in an exponentially weighted
    /// space.
    Infinite,
    /// The problem has an infinite-dimensional kernel and is not well posed
    /// for any data space.
    IllPosed,
}

/// Kernel of the modal operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelDescription {
    Empty,
    /// Finitely many singular modes.
    Finite { modes: Vec<KernelEntry> },
    /// Every mode past a threshold is singular; `listed` enumerates those up
    /// to the scan limit.
    InfiniteDimensional { listed: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelEntry {
    pub mode: usize,
    pub lambda: f64,
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub geometry: String,
    pub case: CaseLabel,
    pub loss: RegularityLoss,
    pub kernel: KernelDescription,
    /// Data/solution space pairing in words.
    pub statement: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
}

impl RegularityReport {
    pub fn order(&self) -> Option<u32> {
        match self.loss {
            RegularityLoss::Finite(p) => Some(p),
            _ => None,
        }
    }
}

pub(crate) fn finite_statement(p: u32) -> String {
    let shift = |k: i64| match k {
        0 => "s".to_string(),
        k if k > 0 => format!("s+{k}"),
        k => format!("s{k}"),
    };
    format!(
        "data (f, g) in H^{{{}}} x H^{{{}}} give traces (u-, u+) in H^s x H^s; {} lost",
        shift(p as i64),
        shift(p as i64 - 1),
        match p {
            0 => "no order".to_string(),
            1 => "1 order".to_string(),
            p => format!("{p} orders"),
        }
    )
}
