//! Levenshtein edit distance and spelling variability.
//!
//! Unit costs: copying a letter is free, adding, deleting or substituting a
//! letter costs 1. Strings are compared as sequences of Unicode scalar values
//! after NFC normalization and lowercasing, so Middle English letters such
//! as `þ` count as single symbols.

use std::fmt;

use serde::Serialize;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::frechet::{minimize_over_candidates_with, FrechetOptions, FrechetResult};
use crate::metric::Metric;

pub use crate::datasets::word_forms as builtin_dataset;

/// A spelling, normalized at ingest.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct WordForm(String);

impl WordForm {
    /// NFC-normalizes, lowercases and trims `text`. Empty forms are rejected.
    pub fn ingest(text: &str) -> Result<Self> {
        let form: String = text.trim().nfc().collect::<String>().to_lowercase();
        if form.is_empty() {
            return Err(Error::EmptyWordForm);
        }
        Ok(WordForm(form.nfc().collect()))
    }

    /// Wraps `text` as-is: no normalization, case-sensitive, may be empty.
    pub fn verbatim(text: impl Into<String>) -> Self {
        WordForm(text.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.chars().count()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for WordForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One step of an edit script.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EditOp {
    Copy(char),
    Add(char),
    Delete(char),
    Substitute { from: char, to: char },
}

impl EditOp {
    pub fn cost(self) -> usize {
        match self {
            EditOp::Copy(_) => 0,
            _ => 1,
        }
    }
}

/// The full dynamic-programming grid. Row `i` holds the cost of turning the
/// first `i` letters of the source into each prefix of the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpTable {
    source: Vec<char>,
    target: Vec<char>,
    cells: Vec<usize>,
}

impl DpTable {
    pub fn new(source: &str, target: &str) -> Self {
        let source: Vec<char> = source.chars().collect();
        let target: Vec<char> = target.chars().collect();
        let width = target.len() + 1;
        let mut cells = vec![0; (source.len() + 1) * width];
        for (j, cell) in cells.iter_mut().enumerate().take(width) {
            *cell = j;
        }
        for i in 1..=source.len() {
            cells[i * width] = i;
            for j in 1..width {
                let sub = usize::from(source[i - 1] != target[j - 1]);
                cells[i * width + j] = (cells[i * width + j - 1] + 1)
                    .min(cells[(i - 1) * width + j] + 1)
                    .min(cells[(i - 1) * width + j - 1] + sub);
            }
        }
        DpTable { source, target, cells }
    }

    pub fn rows(&self) -> usize {
        self.source.len() + 1
    }

    pub fn cols(&self) -> usize {
        self.target.len() + 1
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.cells[i * self.cols() + j]
    }

    pub fn distance(&self) -> usize {
        self.get(self.source.len(), self.target.len())
    }

    /// Walks back from the bottom-right cell. Diagonal moves win ties, then
    /// additions (moving right), then deletions (moving down).
    pub fn script(&self) -> Vec<EditOp> {
        let (mut i, mut j) = (self.source.len(), self.target.len());
        let mut ops = Vec::with_capacity(i.max(j));
        while i > 0 || j > 0 {
            let here = self.get(i, j);
            if i > 0 && j > 0 {
                let (a, b) = (self.source[i - 1], self.target[j - 1]);
                let sub = usize::from(a != b);
                if here == self.get(i - 1, j - 1) + sub {
                    ops.push(if sub == 0 {
                        EditOp::Copy(a)
                    } else {
                        EditOp::Substitute { from: a, to: b }
                    });
                    i -= 1;
                    j -= 1;
                    continue;
                }
            }
            if j > 0 && here == self.get(i, j - 1) + 1 {
                ops.push(EditOp::Add(self.target[j - 1]));
                j -= 1;
            } else {
                ops.push(EditOp::Delete(self.source[i - 1]));
                i -= 1;
            }
        }
        ops.reverse();
        ops
    }
}

/// Unit-cost edit distance between two strings.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (short, long) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    let mut prev: Vec<usize> = (0..=short.len()).collect();
    let mut cur = vec![0; short.len() + 1];
    for (i, &lc) in long.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &sc) in short.iter().enumerate() {
            let sub = usize::from(lc != sc);
            cur[j + 1] = (cur[j] + 1).min(prev[j + 1] + 1).min(prev[j] + sub);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[short.len()]
}

/// A cost-minimal script of copy/add/delete/substitute steps from `a` to `b`.
pub fn edit_script(a: &str, b: &str) -> Vec<EditOp> {
    DpTable::new(a, b).script()
}

/// Applies `script` to `source`. Returns `None` when a copy, delete or
/// substitution does not match the letter it consumes.
pub fn replay(source: &str, script: &[EditOp]) -> Option<String> {
    let mut input = source.chars();
    let mut out = String::new();
    for op in script {
        match *op {
            EditOp::Copy(c) => {
                if input.next()? != c {
                    return None;
                }
                out.push(c);
            }
            EditOp::Add(c) => out.push(c),
            EditOp::Delete(c) => {
                if input.next()? != c {
                    return None;
                }
            }
            EditOp::Substitute { from, to } => {
                if input.next()? != from {
                    return None;
                }
                out.push(to);
            }
        }
    }
    input.next().is_none().then_some(out)
}

/// Edit distance as a [`Metric`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Levenshtein;

impl Metric<WordForm> for Levenshtein {
    fn distance(&self, a: &WordForm, b: &WordForm) -> f64 {
        levenshtein(&a.0, &b.0) as f64
    }

    fn exact_distance(&self, a: &WordForm, b: &WordForm) -> Option<u64> {
        Some(levenshtein(&a.0, &b.0) as u64)
    }
}

impl Metric<String> for Levenshtein {
    fn distance(&self, a: &String, b: &String) -> f64 {
        levenshtein(a, b) as f64
    }

    fn exact_distance(&self, a: &String, b: &String) -> Option<u64> {
        Some(levenshtein(a, b) as u64)
    }
}

/// Distinct forms in order of first appearance.
pub fn distinct_forms(forms: &[WordForm]) -> Vec<WordForm> {
    let mut seen = std::collections::HashSet::new();
    forms
        .iter()
        .filter(|f| seen.insert(*f))
        .cloned()
        .collect()
}

/// Fréchet median (p = 1) or mean (p = 2) of a corpus of spellings, over
/// the distinct observed forms. Repeated forms weight the functional.
pub fn spelling_variability(forms: &[WordForm], p: f64) -> Result<FrechetResult<WordForm>> {
    spelling_variability_with(forms, None, FrechetOptions::new(p))
}

/// As [`spelling_variability`], optionally over an explicit candidate set.
pub fn spelling_variability_with(
    forms: &[WordForm],
    candidates: Option<&[WordForm]>,
    opts: FrechetOptions,
) -> Result<FrechetResult<WordForm>> {
    if forms.is_empty() {
        return Err(Error::EmptySample);
    }
    match candidates {
        Some(c) => minimize_over_candidates_with(forms, c, &Levenshtein, opts),
        None => minimize_over_candidates_with(forms, &distinct_forms(forms), &Levenshtein, opts),
    }
}

/// Parses a word list: one form per line, `#` starts a comment.
pub fn parse_word_list(text: &str) -> Result<Vec<WordForm>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.split_whitespace().count() > 1 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected one form per line, got {line:?}"),
            });
        }
        out.push(WordForm::ingest(line)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn forms(xs: &[&str]) -> Vec<WordForm> {
        xs.iter().map(|s| WordForm::ingest(s).unwrap()).collect()
    }

    #[test]
    fn distances() {
        assert_eq!(levenshtein("OLD", "HALDE"), 3);
        assert_eq!(levenshtein("abc", "abc"), 0);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("abc", ""), 3);
        assert_eq!(levenshtein("olde", "oold"), 2);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("þe", "the"), 2);
    }

    #[test]
    fn old_to_halde_table() {
        let t = DpTable::new("OLD", "HALDE");
        let expected = [
            [0, 1, 2, 3, 4, 5],
            [1, 1, 2, 3, 4, 5],
            [2, 2, 2, 2, 3, 4],
            [3, 3, 3, 3, 2, 3],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(t.get(i, j), v, "cell ({i},{j})");
            }
        }
        let script = t.script();
        assert_eq!(
            script,
            vec![
                EditOp::Add('H'),
                EditOp::Substitute { from: 'O', to: 'A' },
                EditOp::Copy('L'),
                EditOp::Copy('D'),
                EditOp::Add('E'),
            ]
        );
        assert_eq!(script.iter().map(|op| op.cost()).sum::<usize>(), 3);
        assert_eq!(replay("OLD", &script).as_deref(), Some("HALDE"));
    }

    #[test]
    fn identical_strings_copy_only() {
        let s = edit_script("hoolde", "hoolde");
        assert!(s.iter().all(|op| matches!(op, EditOp::Copy(_))));
        assert!(edit_script("", "").is_empty());
    }

    #[test]
    fn replay_rejects_mismatch() {
        assert_eq!(replay("ab", &[EditOp::Copy('b')]), None);
        assert_eq!(replay("ab", &[EditOp::Copy('a')]), None);
    }

    #[test]
    fn ingest_normalizes() {
        assert_eq!(WordForm::ingest("  Þe ").unwrap().as_str(), "þe");
        // decomposed e + combining acute composes to one scalar
        assert_eq!(WordForm::ingest("e\u{301}").unwrap().len(), 1);
        assert_eq!(WordForm::ingest("   "), Err(Error::EmptyWordForm));
    }

    #[test]
    fn word_list_parsing() {
        let f = parse_word_list("# forms\nOld\n\nholde  # comment\n").unwrap();
        assert_eq!(f, forms(&["old", "holde"]));
        assert!(matches!(parse_word_list("old holde\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn variability_examples() {
        let one = forms(&["eld"]);
        let r = spelling_variability(&one, 2.0).unwrap();
        assert_eq!(r.minimizers, one);
        assert_eq!(r.value, 0.0);

        let lalme = builtin_dataset("lalme_old").unwrap();
        let r = spelling_variability(&lalme, 1.0).unwrap();
        assert_eq!(r.minimizers, forms(&["hold", "old"]));
        assert_eq!(r.exact_sum, Some(48));
        let r = spelling_variability(&lalme, 2.0).unwrap();
        assert_eq!(r.minimizers, forms(&["hold"]));
        assert_eq!(r.exact_sum, Some(108));
    }

    #[test]
    fn multiplicity_weights_the_functional() {
        // three copies of "hold" outweigh a single "old"
        let f = forms(&["hold", "hold", "hold", "old"]);
        let r = spelling_variability(&f, 1.0).unwrap();
        assert_eq!(r.minimizers, forms(&["hold"]));
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn unknown_dataset_lists_valid_names() {
        let err = builtin_dataset("beowulf").unwrap_err();
        assert!(err.to_string().contains("lalme_old, chaucer_old"));
    }
}
