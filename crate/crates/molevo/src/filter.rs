//! Rule-based validity pre-screen ("spam filter") rejecting
//! structurally implausible protein sequences before selection sees
//! them. Rules are transparent string-level proxies; a learned scorer
//! can be slotted in behind the same verdict interface.

use crate::error::{MolevoError, Result};
use crate::genome::Protein;
use crate::objectives::gravy;
use serde::{Deserialize, Serialize};

/// Thresholds for every filter rule.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterConfig {
    pub min_length: usize,
    pub max_length: usize,
    pub reject_truncated: bool,
    pub max_homopolymer: usize,
    /// Bits per residue.
    pub min_entropy: f64,
    pub gravy_min: f64,
    pub gravy_max: f64,
    pub require_start_met: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            min_length: 20,
            max_length: 5000,
            reject_truncated: true,
            max_homopolymer: 8,
            min_entropy: 1.5,
            gravy_min: -2.0,
            gravy_max: 2.0,
            require_start_met: false,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.min_length > self.max_length {
            return Err(format!(
                "min_length {} > max_length {}",
                self.min_length, self.max_length
            ));
        }
        let max_entropy = 20f64.log2();
        if !(0.0..=max_entropy).contains(&self.min_entropy) {
            return Err(format!(
                "min_entropy {} outside [0, log2(20)]",
                self.min_entropy
            ));
        }
        if self.gravy_min > self.gravy_max {
            return Err("gravy bounds are not well-ordered".into());
        }
        Ok(())
    }
}

/// The outcome of a filter check; `reasons` lists every rule that fired.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterVerdict {
    pub accepted: bool,
    pub reasons: Vec<String>,
}

impl FilterVerdict {
    pub fn accept() -> FilterVerdict {
        FilterVerdict {
            accepted: true,
            reasons: Vec::new(),
        }
    }
}

/// Shannon entropy of the residue composition, bits per residue.
pub fn shannon_entropy(protein: &Protein) -> Result<f64> {
    if protein.is_empty() {
        return Err(MolevoError::EmptyProtein);
    }
    let mut counts = [0usize; 26];
    for &r in protein.as_bytes() {
        counts[(r - b'A') as usize] += 1;
    }
    let n = protein.len() as f64;
    let mut h = 0.0;
    for c in counts {
        if c > 0 {
            let f = c as f64 / n;
            h -= f * f.log2();
        }
    }
    Ok(h)
}

/// Length of the longest run of a single repeated residue.
pub fn max_homopolymer_run(protein: &Protein) -> usize {
    let seq = protein.as_bytes();
    let mut best = 0;
    let mut run = 0;
    let mut prev = 0u8;
    for &r in seq {
        run = if r == prev { run + 1 } else { 1 };
        prev = r;
        best = best.max(run);
    }
    best
}

/// Apply every rule and report all failures. Rule identifiers are
/// stable strings, evaluated in fixed order.
pub fn check(protein: &Protein, cfg: &FilterConfig) -> FilterVerdict {
    let mut reasons = Vec::new();
    if protein.len() < cfg.min_length {
        reasons.push("min_length".to_string());
    }
    if protein.len() > cfg.max_length {
        reasons.push("max_length".to_string());
    }
    if cfg.reject_truncated && protein.truncated {
        reasons.push("truncated".to_string());
    }
    if max_homopolymer_run(protein) > cfg.max_homopolymer {
        reasons.push("homopolymer".to_string());
    }
    if !protein.is_empty() {
        if shannon_entropy(protein).unwrap() < cfg.min_entropy {
            reasons.push("entropy".to_string());
        }
        let g = gravy(protein).unwrap();
        if g < cfg.gravy_min || g > cfg.gravy_max {
            reasons.push("gravy".to_string());
        }
    }
    if cfg.require_start_met && protein.as_bytes().first() != Some(&b'M') {
        reasons.push("start_met".to_string());
    }
    FilterVerdict {
        accepted: reasons.is_empty(),
        reasons,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prot(s: &str) -> Protein {
        Protein::new(s).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(shannon_entropy(&prot("KKKK")).unwrap(), 0.0);
        assert!((shannon_entropy(&prot("AK")).unwrap() - 1.0).abs() < 1e-12);
        assert!((shannon_entropy(&prot("AAKK")).unwrap() - 1.0).abs() < 1e-12);
        assert!(shannon_entropy(&prot("")).is_err());
    }

    #[test]
    fn homopolymer_examples() {
        assert_eq!(max_homopolymer_run(&prot("AAKKKA")), 3);
        assert_eq!(max_homopolymer_run(&prot("")), 0);
        assert_eq!(max_homopolymer_run(&prot("K")), 1);
    }

    #[test]
    fn accepts_mixed_natural_like_sequence() {
        let p = prot("MAKEVLTRGDSINPQWFYHCAKEVLTRGDSI");
        let v = check(&p, &FilterConfig::default());
        assert!(v.accepted, "reasons: {:?}", v.reasons);
        assert!(v.reasons.is_empty());
    }

    #[test]
    fn rejects_homopolymer_and_low_entropy() {
        let p = prot(&"K".repeat(24));
        let v = check(&p, &FilterConfig::default());
        assert!(!v.accepted);
        assert!(v.reasons.contains(&"homopolymer".to_string()));
        assert!(v.reasons.contains(&"entropy".to_string()));
    }

    #[test]
    fn rejects_truncated() {
        let mut p = prot("MAKEVLTRGDSINPQWFYHCAKEVLTRGDSI");
        p.truncated = true;
        let v = check(&p, &FilterConfig::default());
        assert!(!v.accepted);
        assert_eq!(v.reasons, vec!["truncated".to_string()]);
        let lenient = FilterConfig {
            reject_truncated: false,
            ..FilterConfig::default()
        };
        assert!(check(&p, &lenient).accepted);
    }

    #[test]
    fn empty_protein_fails_min_length() {
        let v = check(&prot(""), &FilterConfig::default());
        assert!(!v.accepted);
        assert!(v.reasons.contains(&"min_length".to_string()));
    }

    #[test]
    fn start_met_rule() {
        let cfg = FilterConfig {
            require_start_met: true,
            min_length: 1,
            min_entropy: 0.0,
            ..FilterConfig::default()
        };
        assert!(check(&prot("MAKEVLTRGDSINPQWFYHCA"), &cfg).accepted);
        assert!(check(&prot("AKEVLTRGDSINPQWFYHCAM"), &cfg)
            .reasons
            .contains(&"start_met".to_string()));
    }

    #[test]
    fn gravy_bounds_rule() {
        let cfg = FilterConfig {
            min_length: 1,
            min_entropy: 0.0,
            max_homopolymer: 100,
            ..FilterConfig::default()
        };
        // poly-isoleucine has GRAVY 4.5, far above the +2.0 bound
        let v = check(&prot(&"I".repeat(30)), &cfg);
        assert!(v.reasons.contains(&"gravy".to_string()));
    }

    #[test]
    fn loosening_a_threshold_is_monotone() {
        let base = FilterConfig::default();
        let loose = FilterConfig {
            max_homopolymer: 20,
            min_entropy: 0.5,
            gravy_min: -4.0,
            gravy_max: 4.0,
            min_length: 5,
            ..base.clone()
        };
        for seq in [
            "MAKEVLTRGDSINPQWFYHCAKEVLTRGDSI",
            "KKKKKKKKKKKKKKKKKKKKKKKK",
            "MAKWVTFISLLFLFSSAYS",
        ] {
            let p = prot(seq);
            if check(&p, &base).accepted {
                assert!(check(&p, &loose).accepted);
            }
        }
    }

    #[test]
    fn config_validation() {
        let bad = FilterConfig {
            min_length: 10,
            max_length: 5,
            ..FilterConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(FilterConfig::default().validate().is_ok());
    }
}
