//! Table entries whose printed form disagrees with the brute-force oracles,
//! and the switch that selects the printed or the corrected reading.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Erratum {
    /// Third conditional member of Aut(A10): lower-left entry printed as
    /// (2d²−d−11)/d; the solved value is (2d²−d−1)/d.
    A10ThirdFamilyEntry,
    /// Aut(A11_3(0)) printed as {diag(a, 1)}; the full group is
    /// {(a b; 0 1) : a ≠ 0}, matching Der(A11_3(0)) = {(a b; 0 0)}.
    A11c3ZeroAut,
    /// Der of the split form A5_2(1, 0) falls under the generic entry {0};
    /// the derivations are {(0 0; c 0)}.
    A5c2SplitDer,
}

impl Erratum {
    pub const ALL: [Erratum; 3] = [
        Erratum::A10ThirdFamilyEntry,
        Erratum::A11c3ZeroAut,
        Erratum::A5c2SplitDer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Erratum::A10ThirdFamilyEntry => "a10-third-family-entry",
            Erratum::A11c3ZeroAut => "a11-3-zero-aut",
            Erratum::A5c2SplitDer => "a5-2-split-der",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Erratum::A10ThirdFamilyEntry => {
                "Aut(A10) third family: lower-left entry (2d^2-d-11)/d corrected to (2d^2-d-1)/d"
            }
            Erratum::A11c3ZeroAut => {
                "Aut(A11_3(0)): {diag(a,1)} corrected to {(a b; 0 1) : a != 0}"
            }
            Erratum::A5c2SplitDer => "Der(A5_2(1,0)): {0} corrected to {(0 0; c 0)}",
        }
    }
}

impl fmt::Display for Erratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Erratum {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Erratum::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Erratum::ALL.iter().map(|e| e.name()).collect();
                format!("unknown erratum '{s}' (expected one of {})", names.join(", "))
            })
    }
}

/// Which entries are read as printed. The default corrects every erratum.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reading {
    verbatim: BTreeSet<Erratum>,
}

impl Reading {
    pub fn corrected() -> Self {
        Self::default()
    }

    pub fn verbatim(errata: impl IntoIterator<Item = Erratum>) -> Self {
        Self {
            verbatim: errata.into_iter().collect(),
        }
    }

    pub fn all_verbatim() -> Self {
        Self::verbatim(Erratum::ALL)
    }

    pub fn is_verbatim(&self, e: Erratum) -> bool {
        self.verbatim.contains(&e)
    }

    pub fn verbatim_errata(&self) -> impl Iterator<Item = Erratum> + '_ {
        self.verbatim.iter().copied()
    }
}
