//! Characteristic triples [a, q, ν] of a completely random measure
//! M(A) = a|A| + √q W(A) + P(A).

use super::jumplaw::{JumpLaw, JumpLawSpec};
use super::CRMError;
use crate::geometry::Domain;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CRMTriple {
    /// Deterministic density a.
    pub a: f64,
    /// Gaussian variance multiplier q ≥ 0.
    pub q: f64,
    /// Jump law ν; `None` means ν = 0 (no atomic part).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<JumpLawSpec>,
    pub domain: Domain,
}

impl CRMTriple {
    pub fn new(a: f64, q: f64, nu: Option<JumpLawSpec>, domain: Domain) -> Self {
        CRMTriple { a, q, nu, domain }
    }

    pub fn validate(&self) -> Result<(), CRMError> {
        if !(self.q >= 0.0 && self.q.is_finite()) {
            return Err(CRMError::NegativeVariance);
        }
        self.jump_law()?;
        Ok(())
    }

    /// Build the validated jump law with cached moments, if ν is present.
    pub fn jump_law(&self) -> Result<Option<JumpLaw>, CRMError> {
        self.nu.clone().map(JumpLaw::new).transpose().map_err(CRMError::from)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triple_json_matches_wire_format() {
        let t = CRMTriple::new(
            0.0,
            1.0,
            Some(JumpLawSpec::TwoBand { c: 1.0, inner: 1.0, outer: 2.0 }),
            Domain::torus_2pi(),
        );
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.starts_with(r#"{"a":0.0,"q":1.0,"nu":{"kind":"two_band","c":1.0,"inner":1.0,"outer":2.0},"domain":{"kind":"torus","L":6.283185307179586"#));
        let back: CRMTriple = serde_json::from_str(&s).unwrap();
        assert_eq!(t, back);
        // ν omitted on the wire → no atomic part
        let pure: CRMTriple =
            serde_json::from_str(r#"{"a":0.0,"q":1.0,"domain":{"kind":"torus","L":1.0}}"#).unwrap();
        assert!(pure.nu.is_none());
        assert!(pure.validate().is_ok());
    }

    #[test]
    fn negative_q_rejected() {
        let t = CRMTriple::new(0.0, -1.0, None, Domain::torus_2pi());
        assert_eq!(t.validate(), Err(CRMError::NegativeVariance));
    }
}
