//! Free products of cyclic groups and their normal forms.
//!
//! A presentation such as `Z5*Z5` or `Z*Z*Z2` names a free product whose
//! factors are cyclic groups `Z_m` (m >= 2) or the infinite cyclic group `Z`.
//! Every element has a unique reduced word: a sequence of syllables whose
//! factor indices alternate and whose exponents are nonzero in their factor.
//! The Cayley graph uses right multiplication by the generators `a^{±1}` of
//! each factor (a single self-inverse generator for `Z2`).

use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::splitmix64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("malformed presentation `{0}`: expected factors `Z` or `Z<m>` joined by `*`")]
    Malformed(String),
    #[error("invalid cyclic order {0}: orders must be at least 2")]
    InvalidOrder(u64),
    #[error("factor index {index} out of range for a product of {factors} factors")]
    FactorOutOfRange { index: usize, factors: usize },
    #[error("cannot parse word `{0}`")]
    BadWord(String),
}

/// One free factor of the product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Factor {
    Cyclic(u32),
    Infinite,
}

impl Factor {
    /// Canonical exponent: `0..m` for `Z_m`, unchanged for `Z`.
    pub fn reduce(self, exp: i64) -> i64 {
        match self {
            Factor::Cyclic(m) => exp.rem_euclid(m as i64),
            Factor::Infinite => exp,
        }
    }

    /// Word length of `g^exp` inside the factor with generators `g^{±1}`.
    pub fn syllable_length(self, exp: i64) -> u32 {
        match self {
            Factor::Cyclic(m) => {
                let e = exp.rem_euclid(m as i64) as u32;
                e.min(m - e)
            }
            Factor::Infinite => exp.unsigned_abs() as u32,
        }
    }

    fn generator_exponents(self) -> &'static [i64] {
        match self {
            Factor::Cyclic(2) => &[1],
            _ => &[1, -1],
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Cyclic(m) => write!(f, "Z{m}"),
            Factor::Infinite => write!(f, "Z"),
        }
    }
}

/// A Cayley-graph generator: `letter^exponent` in one factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Generator {
    pub factor: usize,
    pub exponent: i64,
}

/// A free product presentation together with its generating set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    factors: Vec<Factor>,
    labels: Vec<char>,
    generators: Vec<Generator>,
    inverse: Vec<usize>,
}

impl GroupSpec {
    pub fn new(factors: Vec<Factor>) -> Result<Self, GroupError> {
        if factors.is_empty() {
            return Err(GroupError::Malformed(String::new()));
        }
        if factors.len() > 26 {
            return Err(GroupError::Malformed(format!(
                "{} factors (at most 26 supported)",
                factors.len()
            )));
        }
        for f in &factors {
            if let Factor::Cyclic(m) = f {
                if *m < 2 {
                    return Err(GroupError::InvalidOrder(*m as u64));
                }
            }
        }
        let labels = (0..factors.len()).map(|i| (b'a' + i as u8) as char).collect();
        let mut generators = Vec::new();
        for (i, f) in factors.iter().enumerate() {
            for &e in f.generator_exponents() {
                generators.push(Generator { factor: i, exponent: f.reduce(e) });
            }
        }
        let inverse = generators
            .iter()
            .map(|g| {
                let f = factors[g.factor];
                let inv = f.reduce(-g.exponent);
                generators
                    .iter()
                    .position(|h| h.factor == g.factor && h.exponent == inv)
                    .expect("generating set is closed under inverses")
            })
            .collect();
        Ok(Self { factors, labels, generators, inverse })
    }

    /// Parses `factor (* factor)*` with `factor` one of `Z` or `Z<m>`.
    pub fn parse(text: &str) -> Result<Self, GroupError> {
        let malformed = || GroupError::Malformed(text.to_string());
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Err(malformed());
        }
        let mut factors = Vec::new();
        for part in trimmed.split('*') {
            let part = part.trim();
            let rest = part.strip_prefix('Z').ok_or_else(malformed)?;
            if rest.is_empty() {
                factors.push(Factor::Infinite);
                continue;
            }
            if !rest.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed());
            }
            let m: u64 = rest.parse().map_err(|_| malformed())?;
            if m < 2 {
                return Err(GroupError::InvalidOrder(m));
            }
            let m = u32::try_from(m).map_err(|_| malformed())?;
            factors.push(Factor::Cyclic(m));
        }
        Self::new(factors)
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Index of the inverse of generator `k`.
    pub fn inverse_of(&self, k: usize) -> usize {
        self.inverse[k]
    }

    pub fn degree(&self) -> usize {
        self.generators.len()
    }

    /// Degree at most 2 means the group is finite cyclic, `Z`, or infinite dihedral.
    pub fn is_amenable(&self) -> bool {
        self.degree() <= 2
    }

    /// The Cayley graph is a tree exactly when no factor contributes a cycle.
    pub fn is_tree(&self) -> bool {
        self.factors
            .iter()
            .all(|f| matches!(f, Factor::Infinite | Factor::Cyclic(2)))
    }

    /// Girth read off the presentation: the smallest cyclic order >= 3.
    pub fn structural_girth(&self) -> Option<u32> {
        self.factors
            .iter()
            .filter_map(|f| match f {
                Factor::Cyclic(m) if *m >= 3 => Some(*m),
                _ => None,
            })
            .min()
    }

    /// Reduces an arbitrary syllable sequence to its normal form.
    pub fn normal_form(&self, syllables: &[(usize, i64)]) -> Result<Word, GroupError> {
        let mut out: Vec<(usize, i64)> = Vec::with_capacity(syllables.len());
        for &(f, e) in syllables {
            let factor = *self.factors.get(f).ok_or(GroupError::FactorOutOfRange {
                index: f,
                factors: self.factors.len(),
            })?;
            push_syllable(&mut out, factor, f, e, &self.factors);
        }
        Ok(Word { syllables: out })
    }

    /// `x · g_k`.
    pub fn mul_generator(&self, word: &Word, k: usize) -> Word {
        let g = self.generators[k];
        let mut syllables = word.syllables.clone();
        push_syllable(&mut syllables, self.factors[g.factor], g.factor, g.exponent, &self.factors);
        Word { syllables }
    }

    pub fn mul(&self, left: &Word, right: &Word) -> Word {
        let mut syllables = left.syllables.clone();
        for &(f, e) in &right.syllables {
            push_syllable(&mut syllables, self.factors[f], f, e, &self.factors);
        }
        Word { syllables }
    }

    pub fn inverse(&self, word: &Word) -> Word {
        let syllables = word
            .syllables
            .iter()
            .rev()
            .map(|&(f, e)| (f, self.factors[f].reduce(-e)))
            .collect();
        Word { syllables }
    }

    /// Graph distance from the identity.
    pub fn word_length(&self, word: &Word) -> u32 {
        word.syllables
            .iter()
            .map(|&(f, e)| self.factors[f].syllable_length(e))
            .sum()
    }

    pub fn distance(&self, x: &Word, y: &Word) -> u32 {
        self.word_length(&self.mul(&self.inverse(x), y))
    }

    /// Renders a word using the factor letters, e.g. `a^2b^-1`; identity is `e`.
    pub fn format_word(&self, word: &Word) -> String {
        if word.is_identity() {
            return "e".to_string();
        }
        let mut s = String::new();
        for &(f, e) in &word.syllables {
            s.push(self.labels[f]);
            if e != 1 {
                s.push('^');
                s.push_str(&e.to_string());
            }
        }
        s
    }

    /// Inverse of [`format_word`](Self::format_word); accepts unreduced input.
    pub fn parse_word(&self, text: &str) -> Result<Word, GroupError> {
        let bad = || GroupError::BadWord(text.to_string());
        let t = text.trim();
        if t == "e" || t.is_empty() {
            return Ok(Word::identity());
        }
        let bytes: Vec<char> = t.chars().collect();
        let mut i = 0;
        let mut syllables = Vec::new();
        while i < bytes.len() {
            let c = bytes[i];
            let f = self.labels.iter().position(|&l| l == c).ok_or_else(bad)?;
            i += 1;
            let mut e = 1i64;
            if i < bytes.len() && bytes[i] == '^' {
                i += 1;
                let start = i;
                if i < bytes.len() && bytes[i] == '-' {
                    i += 1;
                }
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let num: String = bytes[start..i].iter().collect();
                e = num.parse().map_err(|_| bad())?;
            }
            syllables.push((f, e));
        }
        self.normal_form(&syllables)
    }

    /// A word of length `r` built by alternating the first generators of two
    /// factors (or powers of the single factor).
    pub fn geodesic_word(&self, r: u32) -> Word {
        let syllables: Vec<(usize, i64)> = if self.factors.len() >= 2 {
            (0..r).map(|i| ((i % 2) as usize, 1)).collect()
        } else {
            vec![(0, r as i64)]
        };
        self.normal_form(&syllables).expect("factor indices are valid")
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join("*"))
    }
}

fn push_syllable(out: &mut Vec<(usize, i64)>, factor: Factor, f: usize, e: i64, factors: &[Factor]) {
    let e = factor.reduce(e);
    if e == 0 {
        return;
    }
    match out.last_mut() {
        Some(last) if last.0 == f => {
            let merged = factors[f].reduce(last.1 + e);
            if merged == 0 {
                out.pop();
            } else {
                last.1 = merged;
            }
        }
        _ => out.push((f, e)),
    }
}

/// Reduced word; the empty word is the identity (root vertex).
#[derive(Debug, Clone, PartialEq, Eq, Default, PartialOrd, Ord)]
pub struct Word {
    syllables: Vec<(usize, i64)>,
}

impl Hash for Word {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.fingerprint());
    }
}

impl Word {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syllables
    }

    /// Stable 64-bit digest of the normal form. Keys percolation edge variables.
    pub fn fingerprint(&self) -> u64 {
        let mut h = 0x6a09_e667_f3bc_c908u64;
        for &(f, e) in &self.syllables {
            h = splitmix64(h ^ (f as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            h = splitmix64(h ^ (e as u64));
        }
        splitmix64(h ^ self.syllables.len() as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_free_group_of_rank_two() {
        let g = GroupSpec::parse("Z*Z").unwrap();
        assert_eq!(g.factors(), &[Factor::Infinite, Factor::Infinite]);
        assert_eq!(g.degree(), 4);
        assert!(g.is_tree());
    }

    #[test]
    fn involutions_give_degree_three() {
        let g = GroupSpec::parse("Z2*Z2*Z2").unwrap();
        assert_eq!(g.degree(), 3);
        for k in 0..3 {
            assert_eq!(g.inverse_of(k), k);
        }
    }

    #[test]
    fn rejects_bad_presentations() {
        assert_eq!(GroupSpec::parse("Z1*Z5"), Err(GroupError::InvalidOrder(1)));
        assert_eq!(GroupSpec::parse("Z0"), Err(GroupError::InvalidOrder(0)));
        assert!(matches!(GroupSpec::parse(""), Err(GroupError::Malformed(_))));
        assert!(matches!(GroupSpec::parse("Z**Z"), Err(GroupError::Malformed(_))));
        assert!(matches!(GroupSpec::parse("Zx"), Err(GroupError::Malformed(_))));
        assert!(matches!(GroupSpec::parse("Y3"), Err(GroupError::Malformed(_))));
    }

    #[test]
    fn accepts_whitespace() {
        let g = GroupSpec::parse(" Z5 * Z5 ").unwrap();
        assert_eq!(g.to_string(), "Z5*Z5");
    }

    #[test]
    fn single_factor_is_amenable() {
        assert!(GroupSpec::parse("Z").unwrap().is_amenable());
        assert!(GroupSpec::parse("Z7").unwrap().is_amenable());
        assert!(GroupSpec::parse("Z2*Z2").unwrap().is_amenable());
        assert!(!GroupSpec::parse("Z2*Z").unwrap().is_amenable());
    }

    #[test]
    fn free_cancellation() {
        let g = GroupSpec::parse("Z*Z").unwrap();
        let w = g.normal_form(&[(0, 1), (0, -1)]).unwrap();
        assert!(w.is_identity());
    }

    #[test]
    fn cyclic_exponent_wraps() {
        let g = GroupSpec::parse("Z5*Z5").unwrap();
        let w = g.normal_form(&[(0, 6)]).unwrap();
        assert_eq!(w.syllables(), &[(0, 1)]);
    }

    #[test]
    fn relator_then_merge() {
        let g = GroupSpec::parse("Z5*Z5").unwrap();
        let w = g.normal_form(&[(0, 1), (1, 1), (1, 4), (0, 1)]).unwrap();
        assert_eq!(w.syllables(), &[(0, 2)]);
    }

    #[test]
    fn factor_index_checked() {
        let g = GroupSpec::parse("Z*Z").unwrap();
        assert_eq!(
            g.normal_form(&[(2, 1)]),
            Err(GroupError::FactorOutOfRange { index: 2, factors: 2 })
        );
    }

    #[test]
    fn word_length_uses_short_way_round() {
        let g = GroupSpec::parse("Z5*Z5").unwrap();
        let w = g.normal_form(&[(0, 3), (1, 1)]).unwrap();
        assert_eq!(g.word_length(&w), 3);
    }

    #[test]
    fn word_format_round_trip() {
        let g = GroupSpec::parse("Z*Z5*Z2").unwrap();
        let w = g.normal_form(&[(0, -2), (1, 3), (2, 1), (0, 1)]).unwrap();
        let s = g.format_word(&w);
        assert_eq!(s, "a^-2b^3ca");
        assert_eq!(g.parse_word(&s).unwrap(), w);
        assert_eq!(g.format_word(&Word::identity()), "e");
    }

    #[test]
    fn geodesic_word_has_requested_length() {
        for spec in ["Z*Z", "Z5*Z5", "Z2*Z2*Z2", "Z"] {
            let g = GroupSpec::parse(spec).unwrap();
            for r in 0..8 {
                assert_eq!(g.word_length(&g.geodesic_word(r)), r, "{spec} r={r}");
            }
        }
    }

    #[test]
    fn structural_girth() {
        assert_eq!(GroupSpec::parse("Z*Z").unwrap().structural_girth(), None);
        assert_eq!(GroupSpec::parse("Z7*Z5*Z").unwrap().structural_girth(), Some(5));
    }
}
