//! Named constants with provenance.
//!
//! The bounds in this crate depend on a handful of "universal" constants that
//! are only known to exist. Every such number flows through the ledger with a
//! provenance tag, so a certificate can always say which of its factors were
//! assumed, which were estimated from quadrature, and which were derived from
//! other entries. Derived entries are recomputed from their inputs, never set
//! by hand.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// A knob: the value is a documented assumption, not a computed fact.
    Assumed,
    /// Estimated numerically (quadrature envelope, grid extremum, fit).
    Estimated,
    /// Recomputed from other ledger entries by a fixed formula.
    Derived,
    /// Stated by the source material with an explicit value.
    Paper,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConstantEntry {
    pub value: f64,
    pub provenance: Provenance,
}

/// Key/value store for every constant a bound certificate can cite.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantsLedger {
    entries: BTreeMap<String, ConstantEntry>,
}

impl Default for ConstantsLedger {
    fn default() -> Self {
        let mut l = ConstantsLedger {
            entries: BTreeMap::new(),
        };
        // kappa: the functional-inequality constant; a configurable assumption.
        l.set("kappa", 0.5, Provenance::Assumed);
        // coefficient in the sphere isoperimetric constant C_sigma = coeff * sqrt(n-1)
        l.set("sphere_coeff", 1.0, Provenance::Assumed);
        // target constant for the small/large set split exp(-c n)
        l.set("split_c", 1.0, Provenance::Assumed);
        l.refresh_derived();
        l
    }
}

impl ConstantsLedger {
    pub fn set(&mut self, name: &str, value: f64, provenance: Provenance) {
        assert!(
            value > 0.0,
            "ledger entries must be positive: {name} = {value}"
        );
        self.entries
            .insert(name.to_string(), ConstantEntry { value, provenance });
        if name == "kappa" {
            self.refresh_derived();
        }
    }

    pub fn get(&self, name: &str) -> Result<ConstantEntry> {
        self.entries
            .get(name)
            .copied()
            .ok_or_else(|| Error::Domain(format!("ledger has no entry named '{name}'")))
    }

    pub fn value(&self, name: &str) -> Result<f64> {
        Ok(self.get(name)?.value)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &ConstantEntry)> {
        self.entries.iter()
    }

    /// kappa1 = 2(kappa^2+1)/kappa^2 and kappa2 = kappa^2/(2 sqrt 2),
    /// recomputed from the current kappa.
    fn refresh_derived(&mut self) {
        let kappa = match self.entries.get("kappa") {
            Some(e) => e.value,
            None => return,
        };
        let k2 = kappa * kappa;
        self.entries.insert(
            "kappa1".into(),
            ConstantEntry {
                value: 2.0 * (k2 + 1.0) / k2,
                provenance: Provenance::Derived,
            },
        );
        self.entries.insert(
            "kappa2".into(),
            ConstantEntry {
                value: k2 / (2.0 * 2.0_f64.sqrt()),
                provenance: Provenance::Derived,
            },
        );
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self).expect("ledger serializes")
    }
}
