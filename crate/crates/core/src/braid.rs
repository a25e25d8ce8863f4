//! Braid words in the Artin generators.

use std::fmt;

use crate::error::{Error, Result};

/// One generator `σ_index^sign`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub index: usize,
    pub sign: i8,
}

impl Letter {
    pub fn new(index: usize, sign: i8) -> Self {
        assert!(sign == 1 || sign == -1, "letter sign must be ±1");
        Letter { index, sign }
    }

    pub fn inverse(self) -> Self {
        Letter { index: self.index, sign: -self.sign }
    }
}

/// A word on `strands` strands. Letters are stored in reading order, which is
/// also the order in which they act.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<Letter>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<Letter>) -> Result<Self> {
        if strands < 3 {
            return Err(Error::TooFewStrands(strands));
        }
        for l in &letters {
            if l.index == 0 || l.index >= strands {
                return Err(Error::IndexOutOfRange { index: l.index, strands });
            }
        }
        Ok(BraidWord { strands, letters })
    }

    pub fn identity(strands: usize) -> Result<Self> {
        Self::new(strands, Vec::new())
    }

    /// Whitespace-separated signed integers, e.g. `"1 -2"` for `σ₁σ₂⁻¹`.
    pub fn parse(text: &str, strands: usize) -> Result<Self> {
        if strands < 3 {
            return Err(Error::TooFewStrands(strands));
        }
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let k: i64 = tok.parse().map_err(|_| Error::BadToken(tok.to_string()))?;
            if k == 0 {
                return Err(Error::BadToken(tok.to_string()));
            }
            let index = k.unsigned_abs() as usize;
            letters.push(Letter { index, sign: if k > 0 { 1 } else { -1 } });
        }
        Self::new(strands, letters)
    }

    /// Word from `(index, exponent)` pairs: `[(2, -3)]` is `σ₂⁻³`.
    pub fn from_powers(strands: usize, powers: &[(usize, i32)]) -> Result<Self> {
        let mut letters = Vec::new();
        for &(index, e) in powers {
            let sign = if e >= 0 { 1 } else { -1 };
            letters.extend(std::iter::repeat_n(Letter { index, sign }, e.unsigned_abs() as usize));
        }
        Self::new(strands, letters)
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn render(&self) -> String {
        let toks: Vec<String> =
            self.letters.iter().map(|l| (l.index as i64 * l.sign as i64).to_string()).collect();
        toks.join(" ")
    }

    /// Acting by the result equals acting by `self`, then by `other`.
    pub fn compose(&self, other: &BraidWord) -> Result<BraidWord> {
        if self.strands != other.strands {
            return Err(Error::StrandMismatch(self.strands, other.strands));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord { strands: self.strands, letters })
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn power(&self, m: usize) -> BraidWord {
        BraidWord { strands: self.strands, letters: self.letters.repeat(m) }
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "id");
        }
        for l in &self.letters {
            write!(f, "s{}", l.index)?;
            if l.sign < 0 {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

pub fn parse_braid(text: &str, strands: usize) -> Result<BraidWord> {
    BraidWord::parse(text, strands)
}

/// One line of a braid file: `n=<strands>` followed by signed integers.
pub fn parse_braid_line(line: &str) -> Result<BraidWord> {
    let mut toks = line.split_whitespace();
    let head = toks.next().ok_or_else(|| Error::Parse("empty braid line".into()))?;
    let n = head
        .strip_prefix("n=")
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| Error::Parse(format!("expected n=<strands>, got {head:?}")))?;
    let rest: Vec<&str> = toks.collect();
    BraidWord::parse(&rest.join(" "), n)
}

/// Parse a braid file, skipping blank lines and `#` comments. Each entry keeps
/// its 1-based line number.
pub fn parse_braid_file(text: &str) -> Vec<(usize, Result<BraidWord>)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| (i + 1, parse_braid_line(l)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render() {
        let w = BraidWord::parse("1 -2", 3).unwrap();
        assert_eq!(w.letters(), &[Letter::new(1, 1), Letter::new(2, -1)]);
        assert_eq!(w.render(), "1 -2");
        assert_eq!(BraidWord::parse(&w.render(), 3).unwrap(), w);
        assert!(BraidWord::parse("", 4).unwrap().is_empty());
        let f3 = BraidWord::parse("-3 2 -1", 4).unwrap();
        assert_eq!(f3.letters()[0], Letter::new(3, -1));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(BraidWord::parse("1 0", 3), Err(Error::BadToken(_))));
        assert!(matches!(BraidWord::parse("3", 3), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(BraidWord::parse("1", 2), Err(Error::TooFewStrands(2))));
        assert!(matches!(BraidWord::parse("1 x", 3), Err(Error::BadToken(_))));
    }

    #[test]
    fn inverse_and_compose() {
        let w = BraidWord::parse("1 -2", 3).unwrap();
        assert_eq!(w.inverse().render(), "2 -1");
        assert_eq!(w.inverse().inverse(), w);
        let id = BraidWord::identity(3).unwrap();
        assert_eq!(w.compose(&id).unwrap(), w);
        assert!(w.compose(&BraidWord::identity(4).unwrap()).is_err());
        assert_eq!(BraidWord::from_powers(4, &[(2, -3), (1, 1)]).unwrap().render(), "-2 -2 -2 1");
    }

    #[test]
    fn braid_file_lines() {
        let parsed = parse_braid_file("# c\nn=3 1 -2\n\nn=4 1 2 3\nbad\n");
        assert_eq!(parsed.len(), 3);
        assert_eq!(parsed[0].0, 2);
        assert_eq!(parsed[1].1.as_ref().unwrap().strands(), 4);
        assert!(parsed[2].1.is_err());
    }
}
