//! Protein property calculators and similarity measures composing the
//! multi-objective fitness vector. All objectives are maximized;
//! target-style objectives report negative absolute deviation.

use crate::error::{MolevoError, Result};
use crate::genome::Protein;
use crate::grammar::{self, MotifPattern};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Kyte-Doolittle hydropathy value for one residue.
pub fn hydropathy(residue: u8) -> f64 {
    match residue {
        b'A' => 1.8,
        b'R' => -4.5,
        b'N' => -3.5,
        b'D' => -3.5,
        b'C' => 2.5,
        b'Q' => -3.5,
        b'E' => -3.5,
        b'G' => -0.4,
        b'H' => -3.2,
        b'I' => 4.5,
        b'L' => 3.8,
        b'K' => -3.9,
        b'M' => 1.9,
        b'F' => 2.8,
        b'P' => -1.6,
        b'S' => -0.8,
        b'T' => -0.7,
        b'W' => -0.9,
        b'Y' => -1.3,
        b'V' => 4.2,
        _ => unreachable!("non-standard residue"),
    }
}

/// Grand average of hydropathy: mean Kyte-Doolittle value per residue.
pub fn gravy(protein: &Protein) -> Result<f64> {
    if protein.is_empty() {
        return Err(MolevoError::EmptyProtein);
    }
    let sum: f64 = protein.as_bytes().iter().map(|&r| hydropathy(r)).sum();
    Ok(sum / protein.len() as f64)
}

/// Side-chain and terminal pKa values used by the charge model.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PkaSet {
    pub n_term: f64,
    pub c_term: f64,
    pub cys: f64,
    pub asp: f64,
    pub glu: f64,
    pub his: f64,
    pub lys: f64,
    pub arg: f64,
    pub tyr: f64,
}

impl Default for PkaSet {
    /// EMBOSS pKa values.
    fn default() -> Self {
        PkaSet {
            n_term: 8.6,
            c_term: 3.6,
            cys: 8.5,
            asp: 3.9,
            glu: 4.1,
            his: 6.5,
            lys: 10.8,
            arg: 12.5,
            tyr: 10.1,
        }
    }
}

impl PkaSet {
    pub fn validate(&self) -> std::result::Result<(), String> {
        for (name, v) in [
            ("n_term", self.n_term),
            ("c_term", self.c_term),
            ("cys", self.cys),
            ("asp", self.asp),
            ("glu", self.glu),
            ("his", self.his),
            ("lys", self.lys),
            ("arg", self.arg),
            ("tyr", self.tyr),
        ] {
            if !(0.0 < v && v < 14.0) {
                return Err(format!("pKa {name} must be in (0,14), got {v}"));
            }
        }
        Ok(())
    }
}

/// Henderson-Hasselbalch net charge at the given pH. Termini are
/// counted once each for a nonempty protein.
pub fn net_charge_at_ph(protein: &Protein, ph: f64, pka: &PkaSet) -> Result<f64> {
    if protein.is_empty() {
        return Err(MolevoError::EmptyProtein);
    }
    let count = |residue: u8| protein.as_bytes().iter().filter(|&&r| r == residue).count() as f64;
    let positive = |pka: f64, n: f64| n / (1.0 + 10f64.powf(ph - pka));
    let negative = |pka: f64, n: f64| n / (1.0 + 10f64.powf(pka - ph));
    let pos = positive(pka.n_term, 1.0)
        + positive(pka.lys, count(b'K'))
        + positive(pka.arg, count(b'R'))
        + positive(pka.his, count(b'H'));
    let neg = negative(pka.c_term, 1.0)
        + negative(pka.asp, count(b'D'))
        + negative(pka.glu, count(b'E'))
        + negative(pka.cys, count(b'C'))
        + negative(pka.tyr, count(b'Y'));
    Ok(pos - neg)
}

/// Result of an isoelectric point search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isoelectric {
    pub ph: f64,
    /// No sign change existed in [0,14]; `ph` is the clamped endpoint.
    pub clamped: bool,
}

/// pH where the net charge is zero, by bisection on [0,14] to
/// |charge| < 1e-6 or interval width < 1e-9.
pub fn isoelectric_point(protein: &Protein, pka: &PkaSet) -> Result<Isoelectric> {
    let charge = |ph: f64| net_charge_at_ph(protein, ph, pka);
    let (mut lo, mut hi) = (0.0f64, 14.0f64);
    let (c_lo, c_hi) = (charge(lo)?, charge(hi)?);
    if c_lo == 0.0 {
        return Ok(Isoelectric { ph: lo, clamped: false });
    }
    if c_hi == 0.0 {
        return Ok(Isoelectric { ph: hi, clamped: false });
    }
    if c_lo.signum() == c_hi.signum() {
        // net charge is monotone decreasing, so pick the endpoint closer to zero
        let ph = if c_lo > 0.0 { hi } else { lo };
        return Ok(Isoelectric { ph, clamped: true });
    }
    loop {
        let mid = 0.5 * (lo + hi);
        let c = charge(mid)?;
        if c.abs() < 1e-6 || hi - lo < 1e-9 {
            return Ok(Isoelectric { ph: mid, clamped: false });
        }
        if c > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Fraction of residues that are K, R, D or E.
pub fn charged_fraction(protein: &Protein) -> Result<f64> {
    if protein.is_empty() {
        return Err(MolevoError::EmptyProtein);
    }
    let n = protein
        .as_bytes()
        .iter()
        .filter(|&&r| matches!(r, b'K' | b'R' | b'D' | b'E'))
        .count();
    Ok(n as f64 / protein.len() as f64)
}

/// Count of opposite-charge residue pairs within `window` positions of
/// each other, normalized by protein length. A sequence-proximity proxy
/// for salt-bridge formation.
pub fn salt_bridge_score(protein: &Protein, window: usize) -> Result<f64> {
    if protein.is_empty() {
        return Err(MolevoError::EmptyProtein);
    }
    assert!(window >= 1);
    let seq = protein.as_bytes();
    let is_pos = |r: u8| matches!(r, b'K' | b'R');
    let is_neg = |r: u8| matches!(r, b'D' | b'E');
    let mut pairs = 0usize;
    for i in 0..seq.len() {
        for j in (i + 1)..seq.len().min(i + window + 1) {
            if (is_pos(seq[i]) && is_neg(seq[j])) || (is_neg(seq[i]) && is_pos(seq[j])) {
                pairs += 1;
            }
        }
    }
    Ok(pairs as f64 / seq.len() as f64)
}

/// Levenshtein distance with unit costs.
pub fn edit_distance(a: &Protein, b: &Protein) -> usize {
    levenshtein(a.as_bytes(), b.as_bytes())
}

pub(crate) fn levenshtein(a: &[u8], b: &[u8]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Normalized edit similarity: 1 - d/max(len). Requires a nonempty target.
pub fn consensus_similarity(a: &Protein, target: &Protein) -> f64 {
    assert!(!target.is_empty());
    let d = edit_distance(a, target);
    1.0 - d as f64 / a.len().max(target.len()) as f64
}

/// Jaccard index over k-mer sets. Two empty sets score 1.0, exactly one
/// empty set 0.0.
pub fn kmer_similarity(a: &Protein, reference: &Protein, k: usize) -> f64 {
    assert!(k >= 1);
    fn kmers(p: &Protein, k: usize) -> HashSet<&[u8]> {
        if p.len() < k {
            HashSet::new()
        } else {
            p.as_bytes().windows(k).collect()
        }
    }
    let sa = kmers(a, k);
    let sb = kmers(reference, k);
    if sa.is_empty() && sb.is_empty() {
        return 1.0;
    }
    if sa.is_empty() || sb.is_empty() {
        return 0.0;
    }
    let inter = sa.intersection(&sb).count();
    let union = sa.len() + sb.len() - inter;
    inter as f64 / union as f64
}

fn default_window() -> usize {
    4
}
fn default_k() -> usize {
    3
}
fn default_tau() -> f64 {
    0.7
}

/// One configured fitness component. Serialized as a tagged record
/// `{"kind": ..., params...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    /// Negative absolute deviation of GRAVY from `target`.
    GravyTarget { target: f64 },
    /// Negative absolute deviation of pI from `target`.
    IsoelectricTarget { target: f64 },
    /// Fraction of K/R/D/E residues.
    ChargedFraction,
    /// Windowed opposite-charge pair count per residue.
    SaltBridge {
        #[serde(default = "default_window")]
        window: usize,
    },
    /// Graded match of a consensus pattern.
    MotifScore { pattern: String },
    /// Normalized edit similarity to a target protein.
    ConsensusSimilarity { target: String },
    /// Jaccard k-mer similarity to a reference protein.
    KmerSimilarity {
        reference: String,
        #[serde(default = "default_k")]
        k: usize,
    },
    /// 0 above the similarity floor tau, -(tau - similarity) below it.
    IdentityFloorPenalty {
        source: String,
        #[serde(default = "default_tau")]
        tau: f64,
    },
}

/// An ObjectiveSpec with its string parameters parsed once.
#[derive(Debug, Clone)]
pub enum CompiledObjective {
    GravyTarget(f64),
    IsoelectricTarget(f64),
    ChargedFraction,
    SaltBridge(usize),
    MotifScore(MotifPattern),
    ConsensusSimilarity(Protein),
    KmerSimilarity(Protein, usize),
    IdentityFloorPenalty(Protein, f64),
}

impl ObjectiveSpec {
    pub fn compile(&self, pka: &PkaSet) -> Result<CompiledObjective> {
        let _ = pka;
        let cfg_err = |field: &str, message: String| MolevoError::Config {
            field: format!("objectives.{field}"),
            message,
        };
        Ok(match self {
            ObjectiveSpec::GravyTarget { target } => CompiledObjective::GravyTarget(*target),
            ObjectiveSpec::IsoelectricTarget { target } => {
                if !(0.0..=14.0).contains(target) {
                    return Err(cfg_err("target", format!("pI target {target} outside [0,14]")));
                }
                CompiledObjective::IsoelectricTarget(*target)
            }
            ObjectiveSpec::ChargedFraction => CompiledObjective::ChargedFraction,
            ObjectiveSpec::SaltBridge { window } => {
                if *window < 1 {
                    return Err(cfg_err("window", "window must be >= 1".into()));
                }
                CompiledObjective::SaltBridge(*window)
            }
            ObjectiveSpec::MotifScore { pattern } => {
                CompiledObjective::MotifScore(grammar::parse_pattern(pattern)?)
            }
            ObjectiveSpec::ConsensusSimilarity { target } => {
                let p = Protein::new(target)?;
                if p.is_empty() {
                    return Err(cfg_err("target", "consensus target must be nonempty".into()));
                }
                CompiledObjective::ConsensusSimilarity(p)
            }
            ObjectiveSpec::KmerSimilarity { reference, k } => {
                if *k < 1 {
                    return Err(cfg_err("k", "k must be >= 1".into()));
                }
                CompiledObjective::KmerSimilarity(Protein::new(reference)?, *k)
            }
            ObjectiveSpec::IdentityFloorPenalty { source, tau } => {
                if !(0.0..=1.0).contains(tau) {
                    return Err(cfg_err("tau", format!("tau {tau} outside [0,1]")));
                }
                let p = Protein::new(source)?;
                if p.is_empty() {
                    return Err(cfg_err("source", "source must be nonempty".into()));
                }
                CompiledObjective::IdentityFloorPenalty(p, *tau)
            }
        })
    }
}

/// Compile a full objective list, preserving order.
pub fn compile_objectives(specs: &[ObjectiveSpec], pka: &PkaSet) -> Result<Vec<CompiledObjective>> {
    specs.iter().map(|s| s.compile(pka)).collect()
}

/// Ordered real-valued objective scores, one per configured objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector(pub Vec<f64>);

impl ObjectiveVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl CompiledObjective {
    pub fn score(&self, protein: &Protein, pka: &PkaSet) -> Result<f64> {
        Ok(match self {
            CompiledObjective::GravyTarget(target) => -(gravy(protein)? - target).abs(),
            CompiledObjective::IsoelectricTarget(target) => {
                -(isoelectric_point(protein, pka)?.ph - target).abs()
            }
            CompiledObjective::ChargedFraction => charged_fraction(protein)?,
            CompiledObjective::SaltBridge(window) => salt_bridge_score(protein, *window)?,
            CompiledObjective::MotifScore(pattern) => grammar::best_match_score(pattern, protein),
            CompiledObjective::ConsensusSimilarity(target) => consensus_similarity(protein, target),
            CompiledObjective::KmerSimilarity(reference, k) => {
                kmer_similarity(protein, reference, *k)
            }
            CompiledObjective::IdentityFloorPenalty(source, tau) => {
                let sim = consensus_similarity(protein, source);
                if sim >= *tau {
                    0.0
                } else {
                    -(tau - sim)
                }
            }
        })
    }
}

/// Evaluate all objectives in order. Any component error (e.g. empty
/// protein) propagates; the engine maps failures to its worst-case
/// vector.
pub fn evaluate(
    protein: &Protein,
    objectives: &[CompiledObjective],
    pka: &PkaSet,
) -> Result<ObjectiveVector> {
    assert!(!objectives.is_empty());
    let mut values = Vec::with_capacity(objectives.len());
    for o in objectives {
        let v = o.score(protein, pka)?;
        debug_assert!(v.is_finite());
        values.push(v);
    }
    Ok(ObjectiveVector(values))
}
