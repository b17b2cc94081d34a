//! Parser and matcher for PROSITE-style consensus patterns.
//!
//! Pattern syntax: elements separated by '-'; an element core is a
//! residue letter, a set `[ACD]`, a negated set `{P}`, or the wildcard
//! `x`; an optional count suffix `(n)` or `(n,m)` bounds repetition.
//! A leading '<' anchors the match to the sequence start, a trailing
//! '>' to the end. Example: `C-x(2,4)-C`.

use crate::error::{MolevoError, Result};
use crate::genome::{Protein, PROTEIN_ALPHABET};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementKind {
    Literal(u8),
    /// Any residue in the set.
    Set(Vec<u8>),
    /// Any residue not in the set.
    NegatedSet(Vec<u8>),
    /// Any residue.
    Wildcard,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternElement {
    pub kind: ElementKind,
    pub min_repeat: usize,
    pub max_repeat: usize,
}

impl PatternElement {
    fn matches(&self, residue: u8) -> bool {
        match &self.kind {
            ElementKind::Literal(a) => *a == residue,
            ElementKind::Set(s) => s.contains(&residue),
            ElementKind::NegatedSet(s) => !s.contains(&residue),
            ElementKind::Wildcard => true,
        }
    }

    /// Mandatory elements (min_repeat >= 1) count toward partial scores.
    fn is_mandatory(&self) -> bool {
        self.min_repeat >= 1
    }
}

/// A parsed consensus pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotifPattern {
    pub elements: Vec<PatternElement>,
    pub anchored_start: bool,
    pub anchored_end: bool,
    pub source_text: String,
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(MolevoError::Pattern {
            position: self.pos,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek();
        if b.is_some() {
            self.pos += 1;
        }
        b
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        match self.bump() {
            Some(x) if x == b => Ok(()),
            _ => self.err(format!("expected '{}'", b as char)),
        }
    }

    fn residue(&mut self) -> Result<u8> {
        match self.bump() {
            Some(b) if PROTEIN_ALPHABET.contains(&b) => Ok(b),
            Some(b) => {
                self.pos -= 1;
                self.err(format!("unknown residue letter '{}'", b as char))
            }
            None => self.err("unexpected end of pattern"),
        }
    }

    fn number(&mut self) -> Result<usize> {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected a number");
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| MolevoError::Pattern {
                position: start,
                message: "number out of range".into(),
            })
    }

    fn element(&mut self) -> Result<PatternElement> {
        let kind = match self.peek() {
            None => return self.err("empty element"),
            Some(b'x') => {
                self.bump();
                ElementKind::Wildcard
            }
            Some(b'[') => {
                self.bump();
                let set = self.residue_run(b']')?;
                ElementKind::Set(set)
            }
            Some(b'{') => {
                self.bump();
                let set = self.residue_run(b'}')?;
                ElementKind::NegatedSet(set)
            }
            Some(b) if PROTEIN_ALPHABET.contains(&b) => {
                self.bump();
                ElementKind::Literal(b)
            }
            Some(b) => return self.err(format!("unexpected character '{}'", b as char)),
        };
        let (min_repeat, max_repeat) = if self.peek() == Some(b'(') {
            self.bump();
            let n = self.number()?;
            let m = if self.peek() == Some(b',') {
                self.bump();
                let m = self.number()?;
                if m < n {
                    return self.err(format!("max repeat {m} < min repeat {n}"));
                }
                m
            } else {
                n
            };
            self.expect(b')')?;
            (n, m)
        } else {
            (1, 1)
        };
        Ok(PatternElement {
            kind,
            min_repeat,
            max_repeat,
        })
    }

    fn residue_run(&mut self, close: u8) -> Result<Vec<u8>> {
        let mut set = Vec::new();
        loop {
            match self.peek() {
                Some(b) if b == close => {
                    self.bump();
                    break;
                }
                Some(_) => {
                    let r = self.residue()?;
                    if !set.contains(&r) {
                        set.push(r);
                    }
                }
                None => return self.err(format!("unbalanced bracket, expected '{}'", close as char)),
            }
        }
        if set.is_empty() {
            return self.err("empty residue set");
        }
        set.sort_unstable();
        Ok(set)
    }
}

/// Parse a pattern string into an AST.
pub fn parse_pattern(text: &str) -> Result<MotifPattern> {
    if text.is_empty() {
        return Err(MolevoError::Pattern {
            position: 0,
            message: "empty pattern".into(),
        });
    }
    if let Some(i) = text.bytes().position(|b| b.is_ascii_whitespace()) {
        return Err(MolevoError::Pattern {
            position: i,
            message: "whitespace is not allowed in patterns".into(),
        });
    }
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let anchored_start = if p.peek() == Some(b'<') {
        p.bump();
        true
    } else {
        false
    };
    let mut elements = vec![p.element()?];
    let mut anchored_end = false;
    loop {
        match p.peek() {
            None => break,
            Some(b'-') => {
                p.bump();
                if p.peek().is_none() {
                    return p.err("trailing '-'");
                }
                elements.push(p.element()?);
            }
            Some(b'>') => {
                p.bump();
                if p.peek().is_some() {
                    return p.err("'>' must end the pattern");
                }
                anchored_end = true;
                break;
            }
            Some(b) => return p.err(format!("unexpected character '{}'", b as char)),
        }
    }
    Ok(MotifPattern {
        elements,
        anchored_start,
        anchored_end,
        source_text: text.to_string(),
    })
}

/// Render the canonical text of a pattern. Parsing the result yields a
/// structurally equal AST.
pub fn pattern_to_string(p: &MotifPattern) -> String {
    let mut out = String::new();
    if p.anchored_start {
        out.push('<');
    }
    for (i, el) in p.elements.iter().enumerate() {
        if i > 0 {
            out.push('-');
        }
        match &el.kind {
            ElementKind::Literal(a) => out.push(*a as char),
            ElementKind::Set(s) => {
                out.push('[');
                out.extend(s.iter().map(|&b| b as char));
                out.push(']');
            }
            ElementKind::NegatedSet(s) => {
                out.push('{');
                out.extend(s.iter().map(|&b| b as char));
                out.push('}');
            }
            ElementKind::Wildcard => out.push('x'),
        }
        if (el.min_repeat, el.max_repeat) != (1, 1) {
            if el.min_repeat == el.max_repeat {
                out.push_str(&format!("({})", el.min_repeat));
            } else {
                out.push_str(&format!("({},{})", el.min_repeat, el.max_repeat));
            }
        }
    }
    if p.anchored_end {
        out.push('>');
    }
    out
}

impl MotifPattern {
    /// Smallest end position of a match starting at `pos`, trying repeat
    /// counts in increasing order (minimal-first backtracking). Honors
    /// the end anchor.
    fn try_match(&self, seq: &[u8], elem: usize, pos: usize) -> Option<usize> {
        if elem == self.elements.len() {
            if self.anchored_end && pos != seq.len() {
                return None;
            }
            return Some(pos);
        }
        let el = &self.elements[elem];
        // verify the first min_repeat residues, then extend one at a time
        let mut end = pos;
        for _ in 0..el.min_repeat {
            if end >= seq.len() || !el.matches(seq[end]) {
                return None;
            }
            end += 1;
        }
        let mut reps = el.min_repeat;
        loop {
            if let Some(m) = self.try_match(seq, elem + 1, end) {
                return Some(m);
            }
            if reps == el.max_repeat || end >= seq.len() || !el.matches(seq[end]) {
                return None;
            }
            end += 1;
            reps += 1;
        }
    }
}

/// All leftmost-starting, shortest-per-start, non-overlapping match
/// spans, 0-based half-open, in left-to-right order.
pub fn scan(p: &MotifPattern, protein: &Protein) -> Vec<(usize, usize)> {
    let seq = protein.as_bytes();
    let mut spans = Vec::new();
    let mut i = 0;
    while i <= seq.len() {
        if p.anchored_start && i > 0 {
            break;
        }
        if let Some(end) = p.try_match(seq, 0, i) {
            spans.push((i, end));
            i = if end > i { end } else { i + 1 };
        } else {
            i += 1;
        }
    }
    spans
}

/// Graded motif fitness in [0,1]: 1.0 on any full match, otherwise the
/// best fraction of mandatory elements satisfied over all alignments.
/// Alignments place mandatory elements sequentially at their minimal
/// widths; an element scores when every residue it covers satisfies it.
pub fn best_match_score(p: &MotifPattern, protein: &Protein) -> f64 {
    if protein.is_empty() {
        return 0.0;
    }
    if !scan(p, protein).is_empty() {
        return 1.0;
    }
    let mandatory: Vec<&PatternElement> =
        p.elements.iter().filter(|e| e.is_mandatory()).collect();
    if mandatory.is_empty() {
        return 0.0;
    }
    let seq = protein.as_bytes();
    let mut best = 0usize;
    let last_start = if p.anchored_start { 0 } else { seq.len() - 1 };
    for offset in 0..=last_start {
        let mut cursor = offset;
        let mut matched = 0usize;
        for el in &mandatory {
            let end = cursor + el.min_repeat;
            if end <= seq.len() && seq[cursor..end].iter().all(|&r| el.matches(r)) {
                matched += 1;
            }
            cursor = end;
        }
        best = best.max(matched);
    }
    best as f64 / mandatory.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prot(s: &str) -> Protein {
        Protein::new(s).unwrap()
    }

    #[test]
    fn parse_basic() {
        let p = parse_pattern("C-x(2,4)-C").unwrap();
        assert_eq!(p.elements.len(), 3);
        assert_eq!(p.elements[0].kind, ElementKind::Literal(b'C'));
        assert_eq!(p.elements[1].kind, ElementKind::Wildcard);
        assert_eq!((p.elements[1].min_repeat, p.elements[1].max_repeat), (2, 4));
        assert_eq!(p.elements[2].kind, ElementKind::Literal(b'C'));
        assert!(!p.anchored_start && !p.anchored_end);
    }

    #[test]
    fn parse_anchors() {
        let p = parse_pattern("<M-x(0,2)-K").unwrap();
        assert!(p.anchored_start);
        assert_eq!(p.elements[0].kind, ElementKind::Literal(b'M'));
        assert_eq!((p.elements[1].min_repeat, p.elements[1].max_repeat), (0, 2));
        let p = parse_pattern("A-C>").unwrap();
        assert!(p.anchored_end);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_pattern("A-x(3,1)").is_err());
        assert!(parse_pattern("").is_err());
        assert!(parse_pattern("A-").is_err());
        assert!(parse_pattern("A--C").is_err());
        assert!(parse_pattern("[AC").is_err());
        assert!(parse_pattern("B").is_err()); // B is not an amino acid
        assert!(parse_pattern("A C").is_err());
        assert!(parse_pattern("[]").is_err());
        assert!(parse_pattern("A>C").is_err());
    }

    #[test]
    fn parse_error_positions() {
        match parse_pattern("AC").unwrap_err() {
            MolevoError::Pattern { position, .. } => assert_eq!(position, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn print_round_trip() {
        for text in [
            "C-x(2,4)-C",
            "<M-x(0,2)-K",
            "x",
            "{P}-[ACD]-x(3)>",
            "<A-A-A-A>",
        ] {
            let p = parse_pattern(text).unwrap();
            let printed = pattern_to_string(&p);
            let reparsed = parse_pattern(&printed).unwrap();
            assert_eq!(p.elements, reparsed.elements);
            assert_eq!(p.anchored_start, reparsed.anchored_start);
            assert_eq!(p.anchored_end, reparsed.anchored_end);
            assert_eq!(pattern_to_string(&reparsed), printed);
        }
    }

    #[test]
    fn wildcard_unit_repeat_prints_bare() {
        let p = parse_pattern("x(1,1)").unwrap();
        assert_eq!(pattern_to_string(&p), "x");
        let p = parse_pattern("{P}").unwrap();
        assert_eq!(pattern_to_string(&p), "{P}");
    }

    #[test]
    fn scan_set_and_wildcard() {
        let p = parse_pattern("[AG]-x(2)-C").unwrap();
        assert_eq!(scan(&p, &prot("GTTC")), vec![(0, 4)]);
    }

    #[test]
    fn scan_non_overlapping() {
        let p = parse_pattern("A-x-A").unwrap();
        assert_eq!(scan(&p, &prot("AGAGA")), vec![(0, 3)]);
    }

    #[test]
    fn scan_start_anchor() {
        let p = parse_pattern("<M-K").unwrap();
        assert!(scan(&p, &prot("AKMK")).is_empty());
        assert_eq!(scan(&p, &prot("MKMK")), vec![(0, 2)]);
    }

    #[test]
    fn scan_end_anchor() {
        let p = parse_pattern("M-K>").unwrap();
        assert_eq!(scan(&p, &prot("AAMK")), vec![(2, 4)]);
        assert!(scan(&p, &prot("MKAA")).is_empty());
    }

    #[test]
    fn scan_shortest_per_start() {
        // x(1,3)-C could match (0,2) or (0,4) on "ACAC"; shortest wins
        let p = parse_pattern("x(1,3)-C").unwrap();
        assert_eq!(scan(&p, &prot("ACAC")), vec![(0, 2), (2, 4)]);
    }

    #[test]
    fn scan_negated_set() {
        let p = parse_pattern("{P}-G").unwrap();
        assert_eq!(scan(&p, &prot("PGAG")), vec![(2, 4)]);
    }

    #[test]
    fn score_full_match_is_one() {
        let p = parse_pattern("A-x-C").unwrap();
        assert_eq!(best_match_score(&p, &prot("KAGCK")), 1.0);
    }

    #[test]
    fn score_partial_alignment() {
        let p = parse_pattern("A-A-A-A").unwrap();
        assert!((best_match_score(&p, &prot("AAGA")) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn score_empty_protein() {
        let p = parse_pattern("A").unwrap();
        assert_eq!(best_match_score(&p, &prot("")), 0.0);
    }

    #[test]
    fn score_bounds_and_scan_consistency() {
        let patterns = ["A-C", "<M-x(0,2)-K", "[KR]-x(2,3)-[DE]>", "{G}-{G}"];
        let proteins = ["MAKC", "GGGG", "KRDEKRDE", "M"];
        for pt in patterns {
            let p = parse_pattern(pt).unwrap();
            for s in proteins {
                let prot = prot(s);
                let score = best_match_score(&p, &prot);
                assert!((0.0..=1.0).contains(&score));
                assert_eq!(score == 1.0, !scan(&p, &prot).is_empty());
            }
        }
    }

    #[test]
    fn appending_preserves_unanchored_match() {
        let p = parse_pattern("A-x-C").unwrap();
        let base = "KAGC";
        let spans = scan(&p, &prot(base));
        assert!(!spans.is_empty());
        let extended = format!("{base}KKK");
        let extended_spans = scan(&p, &prot(&extended));
        assert!(extended_spans.contains(&spans[0]));
    }
}
