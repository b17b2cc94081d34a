//! DNA and protein sequences, the standard genetic code, translation,
//! and FASTA I/O.

use crate::error::{MolevoError, Result};
use crate::rng::RngStream;
use serde::{Deserialize, Serialize};
use std::fmt;

pub const DNA_ALPHABET: [u8; 4] = [b'A', b'C', b'G', b'T'];
pub const PROTEIN_ALPHABET: &[u8; 20] = b"ACDEFGHIKLMNPQRSTVWY";

/// A DNA sequence over {A,C,G,T}, uppercase canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dna {
    bases: String,
    pub id: Option<String>,
}

impl Dna {
    /// Validate and canonicalize a DNA string. Lowercase input is accepted
    /// and uppercased; anything outside ACGT is an error carrying the
    /// offending position.
    pub fn new(text: &str) -> Result<Dna> {
        let mut bases = String::with_capacity(text.len());
        for (i, ch) in text.chars().enumerate() {
            let up = ch.to_ascii_uppercase();
            match up {
                'A' | 'C' | 'G' | 'T' => bases.push(up),
                _ => return Err(MolevoError::InvalidBase { base: ch, position: i }),
            }
        }
        Ok(Dna { bases, id: None })
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Dna {
        self.id = Some(id.into());
        self
    }

    /// Construct from bytes already known to be uppercase ACGT.
    pub(crate) fn from_valid_bytes(bytes: Vec<u8>) -> Dna {
        debug_assert!(bytes.iter().all(|b| DNA_ALPHABET.contains(b)));
        Dna {
            bases: String::from_utf8(bytes).unwrap(),
            id: None,
        }
    }

    pub fn bases(&self) -> &str {
        &self.bases
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.bases.as_bytes()
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }
}

impl fmt::Display for Dna {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bases)
    }
}

/// A protein sequence over the 20 standard one-letter codes.
///
/// `truncated` is set when translation hit a stop codon with residues
/// remaining downstream; the string itself never contains a stop symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Protein {
    residues: String,
    pub truncated: bool,
}

impl Protein {
    pub fn new(text: &str) -> Result<Protein> {
        for (i, ch) in text.chars().enumerate() {
            if !PROTEIN_ALPHABET.contains(&(ch as u8)) {
                return Err(MolevoError::InvalidResidue {
                    id: String::new(),
                    residue: ch,
                    position: i,
                });
            }
        }
        Ok(Protein {
            residues: text.to_string(),
            truncated: false,
        })
    }

    pub fn residues(&self) -> &str {
        &self.residues
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.residues.as_bytes()
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }
}

impl fmt::Display for Protein {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.residues)
    }
}

/// One entry of a genetic code: an amino acid or a stop signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodonProduct {
    AminoAcid(u8),
    Stop,
}

/// A total mapping from the 64 codons to amino acids or STOP.
///
/// Only the standard code (NCBI translation table 1) is provided.
#[derive(Debug, Clone)]
pub struct GeneticCode {
    table: [CodonProduct; 64],
}

fn base_index(b: u8) -> usize {
    match b {
        b'A' => 0,
        b'C' => 1,
        b'G' => 2,
        b'T' => 3,
        _ => unreachable!("non-ACGT base in codon"),
    }
}

impl GeneticCode {
    /// The standard genetic code. TAA, TAG and TGA are stops.
    pub fn standard() -> &'static GeneticCode {
        use std::sync::OnceLock;
        static CODE: OnceLock<GeneticCode> = OnceLock::new();
        CODE.get_or_init(|| {
            let mut table = [CodonProduct::Stop; 64];
            for &b0 in &DNA_ALPHABET {
                for &b1 in &DNA_ALPHABET {
                    for &b2 in &DNA_ALPHABET {
                        let idx = base_index(b0) * 16 + base_index(b1) * 4 + base_index(b2);
                        table[idx] = standard_codon_product([b0, b1, b2]);
                    }
                }
            }
            GeneticCode { table }
        })
    }

    pub fn product(&self, codon: [u8; 3]) -> CodonProduct {
        self.table[base_index(codon[0]) * 16 + base_index(codon[1]) * 4 + base_index(codon[2])]
    }

    pub fn entries(&self) -> impl Iterator<Item = (String, CodonProduct)> + '_ {
        DNA_ALPHABET.iter().flat_map(move |&b0| {
            DNA_ALPHABET.iter().flat_map(move |&b1| {
                DNA_ALPHABET.iter().map(move |&b2| {
                    (
                        String::from_utf8(vec![b0, b1, b2]).unwrap(),
                        self.product([b0, b1, b2]),
                    )
                })
            })
        })
    }
}

fn standard_codon_product(c: [u8; 3]) -> CodonProduct {
    use CodonProduct::*;
    let aa = |x: u8| AminoAcid(x);
    match (c[0], c[1], c[2]) {
        (b'T', b'T', b'T' | b'C') => aa(b'F'),
        (b'T', b'T', b'A' | b'G') => aa(b'L'),
        (b'C', b'T', _) => aa(b'L'),
        (b'A', b'T', b'G') => aa(b'M'),
        (b'A', b'T', _) => aa(b'I'),
        (b'G', b'T', _) => aa(b'V'),
        (b'T', b'C', _) => aa(b'S'),
        (b'C', b'C', _) => aa(b'P'),
        (b'A', b'C', _) => aa(b'T'),
        (b'G', b'C', _) => aa(b'A'),
        (b'T', b'A', b'T' | b'C') => aa(b'Y'),
        (b'T', b'A', b'A' | b'G') => Stop,
        (b'C', b'A', b'T' | b'C') => aa(b'H'),
        (b'C', b'A', b'A' | b'G') => aa(b'Q'),
        (b'A', b'A', b'T' | b'C') => aa(b'N'),
        (b'A', b'A', b'A' | b'G') => aa(b'K'),
        (b'G', b'A', b'T' | b'C') => aa(b'D'),
        (b'G', b'A', b'A' | b'G') => aa(b'E'),
        (b'T', b'G', b'T' | b'C') => aa(b'C'),
        (b'T', b'G', b'A') => Stop,
        (b'T', b'G', b'G') => aa(b'W'),
        (b'C', b'G', _) => aa(b'R'),
        (b'A', b'G', b'T' | b'C') => aa(b'S'),
        (b'A', b'G', b'A' | b'G') => aa(b'R'),
        (b'G', b'G', _) => aa(b'G'),
        _ => unreachable!(),
    }
}

/// Translate `dna` starting at `frame_offset`, reading codons in steps
/// of 3. Translation stops at the first stop codon; if residues remain
/// after an internal stop the result is flagged truncated. A trailing
/// partial codon is ignored.
pub fn translate(dna: &Dna, frame_offset: usize) -> Protein {
    debug_assert!(frame_offset < 3);
    let code = GeneticCode::standard();
    let bytes = dna.as_bytes();
    let mut residues = Vec::new();
    let mut truncated = false;
    let mut i = frame_offset;
    while i + 3 <= bytes.len() {
        let codon = [bytes[i], bytes[i + 1], bytes[i + 2]];
        match code.product(codon) {
            CodonProduct::AminoAcid(a) => residues.push(a),
            CodonProduct::Stop => {
                // At least one further full codon means an internal stop;
                // a 1-2 nt partial tail still counts as terminal.
                truncated = bytes.len() - (i + 3) >= 3;
                break;
            }
        }
        i += 3;
    }
    Protein {
        residues: String::from_utf8(residues).unwrap(),
        truncated,
    }
}

/// Draw a uniform random DNA sequence of the given length.
pub fn random_dna(length: usize, rng: &mut RngStream) -> Result<Dna> {
    if length == 0 {
        return Err(MolevoError::ZeroLength);
    }
    let bytes = (0..length).map(|_| DNA_ALPHABET[rng.below(4)]).collect();
    Ok(Dna::from_valid_bytes(bytes))
}

/// A parsed FASTA record.
pub type FastaRecord = (String, String);

/// Parse a FASTA document. Sequence lines are concatenated with
/// whitespace stripped and uppercased. The sequence alphabet is not
/// checked here; callers validate against DNA or protein alphabets as
/// appropriate.
pub fn parse_fasta(text: &str) -> Result<Vec<FastaRecord>> {
    let mut records: Vec<FastaRecord> = Vec::new();
    for line in text.lines() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('>') {
            records.push((header.trim().to_string(), String::new()));
        } else {
            let rec = records
                .last_mut()
                .ok_or_else(|| MolevoError::Fasta("sequence data before first '>' header".into()))?;
            for ch in line.chars() {
                if ch.is_whitespace() {
                    continue;
                }
                rec.1.push(ch.to_ascii_uppercase());
            }
        }
    }
    Ok(records)
}

/// Parse FASTA and validate every sequence against an alphabet,
/// reporting the record id and offending character on failure.
pub fn parse_fasta_checked(text: &str, alphabet: &[u8]) -> Result<Vec<FastaRecord>> {
    let records = parse_fasta(text)?;
    for (id, seq) in &records {
        for (i, ch) in seq.chars().enumerate() {
            if !alphabet.contains(&(ch as u8)) {
                return Err(MolevoError::InvalidResidue {
                    id: id.clone(),
                    residue: ch,
                    position: i,
                });
            }
        }
    }
    Ok(records)
}

/// Write FASTA with LF line endings, wrapping sequence lines at `wrap`
/// characters. Inverse of `parse_fasta` for valid record lists.
pub fn write_fasta(records: &[FastaRecord], wrap: usize) -> Result<String> {
    assert!(wrap >= 1);
    let mut out = String::new();
    for (id, seq) in records {
        if id.is_empty() {
            return Err(MolevoError::EmptyId);
        }
        assert!(!id.contains('\n'), "newline in record id");
        out.push('>');
        out.push_str(id);
        out.push('\n');
        let bytes = seq.as_bytes();
        for chunk in bytes.chunks(wrap) {
            out.push_str(std::str::from_utf8(chunk).unwrap());
            out.push('\n');
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng_stream;

    #[test]
    fn translate_basic() {
        let p = translate(&Dna::new("ATGGCTAAA").unwrap(), 0);
        assert_eq!(p.residues(), "MAK");
        assert!(!p.truncated);
    }

    #[test]
    fn translate_empty() {
        let p = translate(&Dna::new("").unwrap(), 0);
        assert_eq!(p.residues(), "");
        assert!(!p.truncated);
    }

    #[test]
    fn translate_internal_stop_flags_truncated() {
        let p = translate(&Dna::new("ATGTGAGCT").unwrap(), 0);
        assert_eq!(p.residues(), "M");
        assert!(p.truncated);
    }

    #[test]
    fn translate_terminal_stop_not_truncated() {
        let p = translate(&Dna::new("ATGTGA").unwrap(), 0);
        assert_eq!(p.residues(), "M");
        assert!(!p.truncated);
        // a 1-2 nt tail after the stop still counts as terminal
        let p = translate(&Dna::new("ATGTGAGC").unwrap(), 0);
        assert_eq!(p.residues(), "M");
        assert!(!p.truncated);
    }

    #[test]
    fn translate_frame_offsets() {
        // offset 1 of "AATGGCT" reads ATG GCT
        let p = translate(&Dna::new("AATGGCT").unwrap(), 1);
        assert_eq!(p.residues(), "MA");
    }

    #[test]
    fn genetic_code_structure() {
        let code = GeneticCode::standard();
        let entries: Vec<_> = code.entries().collect();
        assert_eq!(entries.len(), 64);
        let stops: Vec<String> = entries
            .iter()
            .filter(|(_, p)| *p == CodonProduct::Stop)
            .map(|(c, _)| c.clone())
            .collect();
        assert_eq!(stops.len(), 3);
        for s in ["TAA", "TAG", "TGA"] {
            assert!(stops.contains(&s.to_string()));
        }
        // every one of the 20 amino acids appears
        for &aa in PROTEIN_ALPHABET {
            assert!(entries
                .iter()
                .any(|(_, p)| *p == CodonProduct::AminoAcid(aa)));
        }
    }

    #[test]
    fn trailing_partial_codon_ignored() {
        for tail in ["", "G", "GC"] {
            let s = format!("ATGGCT{tail}");
            let p = translate(&Dna::new(&s).unwrap(), 0);
            assert_eq!(p.residues(), "MA");
            assert!(!p.truncated);
        }
    }

    #[test]
    fn random_dna_contract() {
        let mut rng = derive_rng_stream(7, 0, 0);
        let d = random_dna(6, &mut rng).unwrap();
        assert_eq!(d.len(), 6);
        assert!(d.bases().chars().all(|c| "ACGT".contains(c)));
        let d1 = random_dna(1, &mut rng).unwrap();
        assert!(["A", "C", "G", "T"].contains(&d1.bases()));
        assert!(matches!(
            random_dna(0, &mut rng),
            Err(MolevoError::ZeroLength)
        ));
    }

    #[test]
    fn random_dna_uniform_frequencies() {
        let mut rng = derive_rng_stream(11, 0, 0);
        let mut counts = [0usize; 4];
        let n = 100_000;
        for _ in 0..n {
            let d = random_dna(1, &mut rng).unwrap();
            let idx = DNA_ALPHABET
                .iter()
                .position(|&b| b == d.as_bytes()[0])
                .unwrap();
            counts[idx] += 1;
        }
        for c in counts {
            let f = c as f64 / n as f64;
            assert!((0.2475..=0.2525).contains(&f), "frequency {f} out of band");
        }
    }

    #[test]
    fn random_dna_deterministic() {
        let mut a = derive_rng_stream(5, 2, 9);
        let mut b = derive_rng_stream(5, 2, 9);
        assert_eq!(
            random_dna(50, &mut a).unwrap(),
            random_dna(50, &mut b).unwrap()
        );
    }

    #[test]
    fn fasta_parse_basic() {
        let recs = parse_fasta(">g1\nATG\nGCT\n").unwrap();
        assert_eq!(recs, vec![("g1".to_string(), "ATGGCT".to_string())]);
        let recs = parse_fasta(">a\nATG\n>b\nTTT\n").unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].0, "a");
        assert_eq!(recs[1].0, "b");
    }

    #[test]
    fn fasta_crlf_and_case() {
        let recs = parse_fasta(">g\r\natg\r\nGCT\r\n").unwrap();
        assert_eq!(recs[0].1, "ATGGCT");
    }

    #[test]
    fn fasta_no_header_rejected() {
        assert!(parse_fasta("ATG\n").is_err());
    }

    #[test]
    fn fasta_checked_names_offender() {
        let err = parse_fasta_checked(">g1\nACGU\n", &DNA_ALPHABET).unwrap_err();
        match err {
            MolevoError::InvalidResidue { id, residue, position } => {
                assert_eq!(id, "g1");
                assert_eq!(residue, 'U');
                assert_eq!(position, 3);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn fasta_write_basic() {
        let recs = vec![("g1".to_string(), "ATGGCT".to_string())];
        assert_eq!(write_fasta(&recs, 60).unwrap(), ">g1\nATGGCT\n");
    }

    #[test]
    fn fasta_wrap_arithmetic() {
        let seq: String = std::iter::repeat('A').take(130).collect();
        let recs = vec![("long".to_string(), seq)];
        let out = write_fasta(&recs, 60).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1].len(), 60);
        assert_eq!(lines[2].len(), 60);
        assert_eq!(lines[3].len(), 10);
    }

    #[test]
    fn fasta_empty_id_rejected() {
        let recs = vec![("".to_string(), "ATG".to_string())];
        assert!(matches!(write_fasta(&recs, 60), Err(MolevoError::EmptyId)));
    }

    #[test]
    fn validate_dna_cases() {
        assert_eq!(Dna::new("acgt").unwrap().bases(), "ACGT");
        match Dna::new("ACGU").unwrap_err() {
            MolevoError::InvalidBase { base, position } => {
                assert_eq!(base, 'U');
                assert_eq!(position, 3);
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(Dna::new("").unwrap().is_empty());
    }
}
