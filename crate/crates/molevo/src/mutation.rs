//! Variation operators over DNA: point substitution with
//! transition/transversion bias, bounded indels, and single-point
//! recombination.

use crate::genome::{Dna, DNA_ALPHABET};
use crate::rng::RngStream;
use serde::{Deserialize, Serialize};

/// Per-generation mutation parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutationRates {
    /// Substitution probability per nucleotide per generation.
    #[serde(default = "default_point_rate")]
    pub point_rate: f64,
    /// Insertion probability per sequence per generation.
    #[serde(default = "default_indel_rate")]
    pub insertion_rate: f64,
    /// Deletion probability per sequence per generation.
    #[serde(default = "default_indel_rate")]
    pub deletion_rate: f64,
    /// Transition/transversion rate ratio.
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    /// Cap on indel length.
    #[serde(default = "default_indel_max")]
    pub indel_max: usize,
    /// Probability a reproduction event performs recombination.
    #[serde(default = "default_crossover_prob")]
    pub crossover_prob: f64,
    /// Restrict crossover cut points to codon boundaries.
    #[serde(default)]
    pub codon_aligned_crossover: bool,
}

fn default_point_rate() -> f64 {
    1e-3
}
fn default_indel_rate() -> f64 {
    0.02
}
fn default_kappa() -> f64 {
    2.0
}
fn default_indel_max() -> usize {
    9
}
fn default_crossover_prob() -> f64 {
    0.9
}

impl Default for MutationRates {
    fn default() -> Self {
        MutationRates {
            point_rate: default_point_rate(),
            insertion_rate: default_indel_rate(),
            deletion_rate: default_indel_rate(),
            kappa: default_kappa(),
            indel_max: default_indel_max(),
            crossover_prob: default_crossover_prob(),
            codon_aligned_crossover: false,
        }
    }
}

impl MutationRates {
    pub fn validate(&self) -> Result<(), String> {
        for (name, p) in [
            ("point_rate", self.point_rate),
            ("insertion_rate", self.insertion_rate),
            ("deletion_rate", self.deletion_rate),
            ("crossover_prob", self.crossover_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("{name} must be in [0,1], got {p}"));
            }
        }
        if !(self.kappa > 0.0) {
            return Err(format!("kappa must be > 0, got {}", self.kappa));
        }
        if self.indel_max < 1 {
            return Err("indel_max must be >= 1".into());
        }
        Ok(())
    }
}

/// Transition partner of a base (A<->G, C<->T).
fn transition(base: u8) -> u8 {
    match base {
        b'A' => b'G',
        b'G' => b'A',
        b'C' => b'T',
        b'T' => b'C',
        _ => unreachable!(),
    }
}

/// The two transversion partners of a base.
fn transversions(base: u8) -> [u8; 2] {
    match base {
        b'A' | b'G' => [b'C', b'T'],
        b'C' | b'T' => [b'A', b'G'],
        _ => unreachable!(),
    }
}

/// Substitute a base: transition with probability kappa/(kappa+2),
/// each transversion with probability 1/(kappa+2). Never returns the
/// original base.
fn substitute(base: u8, kappa: f64, rng: &mut RngStream) -> u8 {
    let p_transition = kappa / (kappa + 2.0);
    if rng.chance(p_transition) {
        transition(base)
    } else {
        transversions(base)[rng.below(2)]
    }
}

/// Independently mutate each position with probability `point_rate`.
/// Output length always equals input length.
pub fn point_mutate(dna: &Dna, rates: &MutationRates, rng: &mut RngStream) -> Dna {
    if rates.point_rate == 0.0 {
        return dna.clone();
    }
    let mut bytes = dna.as_bytes().to_vec();
    for b in bytes.iter_mut() {
        if rng.chance(rates.point_rate) {
            *b = substitute(*b, rates.kappa, rng);
        }
    }
    Dna::from_valid_bytes(bytes)
}

/// Draw an indel length from a truncated geometric (p = 0.5) on
/// 1..=cap, the tail mass folded onto the cap.
fn indel_length(cap: usize, rng: &mut RngStream) -> usize {
    let mut len = 1;
    while len < cap && rng.chance(0.5) {
        len += 1;
    }
    len
}

/// With probability `insertion_rate`, insert a random-length block of
/// uniform random bases at a uniform position.
pub fn insert(dna: &Dna, rates: &MutationRates, rng: &mut RngStream) -> Dna {
    if !rng.chance(rates.insertion_rate) {
        return dna.clone();
    }
    let pos = rng.below(dna.len() + 1);
    let len = indel_length(rates.indel_max, rng);
    let mut bytes = dna.as_bytes().to_vec();
    let block: Vec<u8> = (0..len).map(|_| DNA_ALPHABET[rng.below(4)]).collect();
    bytes.splice(pos..pos, block);
    Dna::from_valid_bytes(bytes)
}

/// With probability `deletion_rate`, remove a random-length contiguous
/// block at a uniform start. No-op on empty input.
pub fn delete(dna: &Dna, rates: &MutationRates, rng: &mut RngStream) -> Dna {
    if dna.is_empty() || !rng.chance(rates.deletion_rate) {
        return dna.clone();
    }
    let len = indel_length(rates.indel_max, rng).min(dna.len());
    let start = rng.below(dna.len() - len + 1);
    let mut bytes = dna.as_bytes().to_vec();
    bytes.drain(start..start + len);
    Dna::from_valid_bytes(bytes)
}

/// Single-point crossover. The cut point is uniform in
/// [1, min(len_a, len_b) - 1]; parents shorter than 2 at the minimum
/// are returned unchanged.
pub fn recombine(parent_a: &Dna, parent_b: &Dna, rng: &mut RngStream) -> (Dna, Dna) {
    let min_len = parent_a.len().min(parent_b.len());
    if min_len < 2 {
        return (parent_a.clone(), parent_b.clone());
    }
    let k = 1 + rng.below(min_len - 1);
    crossover_at(parent_a, parent_b, k)
}

/// Crossover restricted to codon boundaries (cut points that are
/// multiples of 3). Falls back to returning the parents when no such
/// interior cut exists.
pub fn recombine_codon_aligned(parent_a: &Dna, parent_b: &Dna, rng: &mut RngStream) -> (Dna, Dna) {
    let min_len = parent_a.len().min(parent_b.len());
    let n_cuts = if min_len >= 1 { (min_len - 1) / 3 } else { 0 };
    if n_cuts == 0 {
        return (parent_a.clone(), parent_b.clone());
    }
    let k = 3 * (1 + rng.below(n_cuts));
    crossover_at(parent_a, parent_b, k)
}

fn crossover_at(a: &Dna, b: &Dna, k: usize) -> (Dna, Dna) {
    let (ab, bb) = (a.as_bytes(), b.as_bytes());
    let mut c1 = ab[..k].to_vec();
    c1.extend_from_slice(&bb[k..]);
    let mut c2 = bb[..k].to_vec();
    c2.extend_from_slice(&ab[k..]);
    (Dna::from_valid_bytes(c1), Dna::from_valid_bytes(c2))
}

/// Apply the full per-individual variation pass in fixed order:
/// point substitutions, then at most one insertion, then at most one
/// deletion.
pub fn mutate_individual(dna: &Dna, rates: &MutationRates, rng: &mut RngStream) -> Dna {
    let d = point_mutate(dna, rates, rng);
    let d = insert(&d, rates, rng);
    delete(&d, rates, rng)
}
