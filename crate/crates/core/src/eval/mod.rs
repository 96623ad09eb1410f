//! Linking metrics.
//!
//! Mentions whose gold entity is NIL are left out of every numerator and
//! denominator. Recall counts a mention when its gold title appears among
//! the (ranked) candidates; accuracy when the selected title equals gold.

mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{EntityType, MentionRecord};
use crate::normalize::{normalize, RuleSet};
use crate::wiki::{AnchorStat, TitleMap};

pub use report::{render_table, EvalReport};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no linkable mentions to evaluate")]
    Empty,
    #[error("k must be at least 1")]
    InvalidK,
    #[error("coverage is zero; recall/coverage ratio is undefined")]
    UndefinedRatio,
    #[error("result {index}: {message}")]
    Mismatch { index: usize, message: String },
    #[error("results line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkResult {
    #[serde(flatten)]
    pub mention: MentionRecord,
    /// Ranked English titles.
    pub candidates: Vec<String>,
    /// `None` is a NIL link.
    pub selected: Option<String>,
}

impl LinkResult {
    pub fn validate(&self) -> Result<(), String> {
        match &self.selected {
            Some(s) if !self.candidates.contains(s) => Err(format!("selected {s:?} is not among the candidates")),
            _ => Ok(()),
        }
    }

    fn gold(&self) -> Option<&str> {
        self.mention.gold.as_deref()
    }

    /// 1-based position of the gold title among the candidates.
    pub fn gold_position(&self) -> Option<usize> {
        let gold = self.gold()?;
        self.candidates.iter().position(|c| c == gold).map(|p| p + 1)
    }

    pub fn is_correct(&self) -> bool {
        matches!((self.gold(), self.selected.as_deref()), (Some(g), Some(s)) if g == s)
    }
}

pub fn write_results(path: impl AsRef<Path>, results: &[LinkResult]) -> Result<(), EvalError> {
    let mut out = Vec::new();
    for r in results {
        serde_json::to_writer(&mut out, r).map_err(|e| EvalError::Mismatch {
            index: 0,
            message: e.to_string(),
        })?;
        out.push(b'\n');
    }
    let mut file = File::create(path)?;
    file.write_all(&out)?;
    Ok(())
}

pub fn read_results(path: impl AsRef<Path>) -> Result<Vec<LinkResult>, EvalError> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parse = |message: String| EvalError::Parse { line: idx + 1, message };
        let r: LinkResult = serde_json::from_str(&line).map_err(|e| parse(e.to_string()))?;
        r.validate().map_err(parse)?;
        out.push(r);
    }
    Ok(out)
}

/// Replace each result's gold with the dataset's, checking that the two
/// files describe the same mentions in the same order.
pub fn align_with_gold(results: &mut [LinkResult], gold: &[MentionRecord]) -> Result<(), EvalError> {
    if results.len() != gold.len() {
        return Err(EvalError::Mismatch {
            index: results.len().min(gold.len()),
            message: format!("{} results for {} dataset mentions", results.len(), gold.len()),
        });
    }
    for (index, (r, g)) in results.iter_mut().zip(gold).enumerate() {
        if r.mention.doc_id != g.doc_id || r.mention.surface != g.surface {
            return Err(EvalError::Mismatch {
                index,
                message: format!(
                    "result ({}, {:?}) vs dataset ({}, {:?})",
                    r.mention.doc_id, r.mention.surface, g.doc_id, g.surface
                ),
            });
        }
        r.mention.gold = g.gold.clone();
        r.mention.entity_type = g.entity_type;
    }
    Ok(())
}

/// Integer counts behind every metric. Tallies of disjoint result slices
/// merge into the tally of their union.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub total: usize,
    pub linkable: usize,
    pub correct: usize,
    /// Gold position (1-based) to number of mentions.
    pub gold_positions: BTreeMap<usize, usize>,
    /// Per type: (linkable, correct).
    pub per_type: BTreeMap<EntityType, (usize, usize)>,
    pub longest_list: usize,
}

impl Tally {
    pub fn add(&mut self, r: &LinkResult) {
        self.total += 1;
        self.longest_list = self.longest_list.max(r.candidates.len());
        if r.gold().is_none() {
            return;
        }
        self.linkable += 1;
        let correct = r.is_correct();
        self.correct += usize::from(correct);
        if let Some(pos) = r.gold_position() {
            *self.gold_positions.entry(pos).or_insert(0) += 1;
        }
        let slot = self.per_type.entry(r.mention.entity_type).or_insert((0, 0));
        slot.0 += 1;
        slot.1 += usize::from(correct);
    }

    pub fn of(results: &[LinkResult]) -> Self {
        let mut t = Tally::default();
        results.iter().for_each(|r| t.add(r));
        t
    }

    pub fn merge(mut self, other: Tally) -> Self {
        self.total += other.total;
        self.linkable += other.linkable;
        self.correct += other.correct;
        self.longest_list = self.longest_list.max(other.longest_list);
        for (pos, n) in other.gold_positions {
            *self.gold_positions.entry(pos).or_insert(0) += n;
        }
        for (ty, (l, c)) in other.per_type {
            let slot = self.per_type.entry(ty).or_insert((0, 0));
            slot.0 += l;
            slot.1 += c;
        }
        self
    }

    fn fraction(&self, numerator: usize) -> Result<f64, EvalError> {
        if self.linkable == 0 {
            return Err(EvalError::Empty);
        }
        Ok(numerator as f64 / self.linkable as f64)
    }

    pub fn recall_at(&self, k: usize) -> Result<f64, EvalError> {
        if k == 0 {
            return Err(EvalError::InvalidK);
        }
        self.fraction(self.gold_positions.range(..=k).map(|(_, n)| n).sum())
    }

    pub fn recall(&self) -> Result<f64, EvalError> {
        self.fraction(self.gold_positions.values().sum())
    }

    pub fn accuracy(&self) -> Result<f64, EvalError> {
        self.fraction(self.correct)
    }

    pub fn per_type_accuracy(&self) -> BTreeMap<EntityType, f64> {
        self.per_type
            .iter()
            .filter(|(_, (l, _))| *l > 0)
            .map(|(ty, (l, c))| (*ty, *c as f64 / *l as f64))
            .collect()
    }
}

/// Fraction of linkable mentions whose gold title is among the candidates.
pub fn gold_candidate_recall(results: &[LinkResult]) -> Result<f64, EvalError> {
    Tally::of(results).recall()
}

/// Recall over candidate lists cut to their first `k` entries.
pub fn recall_at_k(results: &[LinkResult], k: usize) -> Result<f64, EvalError> {
    Tally::of(results).recall_at(k)
}

pub fn linking_accuracy(results: &[LinkResult]) -> Result<f64, EvalError> {
    Tally::of(results).accuracy()
}

/// Accuracy per entity type; types without linkable mentions are omitted.
pub fn per_type_accuracy(results: &[LinkResult]) -> BTreeMap<EntityType, f64> {
    Tally::of(results).per_type_accuracy()
}

pub fn coverage_ratio(recall: f64, coverage: f64) -> Result<f64, EvalError> {
    if coverage == 0.0 {
        return Err(EvalError::UndefinedRatio);
    }
    Ok(recall / coverage)
}

/// Tokens of mapped SL titles and of anchors whose target is mapped.
pub fn covered_tokens(titles: &TitleMap, anchors: &[AnchorStat]) -> BTreeSet<String> {
    let mut tokens: BTreeSet<String> = BTreeSet::new();
    for (sl, _) in titles.pairs() {
        tokens.extend(sl.split_whitespace().map(str::to_string));
    }
    for a in anchors.iter().filter(|a| titles.get(&a.sl_target).is_some()) {
        tokens.extend(a.surface.split_whitespace().map(str::to_string));
    }
    tokens
}

/// Fraction of linkable mentions with at least one normalized token that
/// occurs in a mapped title or a mapped anchor.
pub fn mention_token_coverage(
    mentions: &[MentionRecord],
    titles: &TitleMap,
    anchors: &[AnchorStat],
    rules: &RuleSet,
) -> Result<f64, EvalError> {
    let vocab = covered_tokens(titles, anchors);
    let linkable: Vec<&MentionRecord> = mentions.iter().filter(|m| m.gold.is_some()).collect();
    if linkable.is_empty() {
        return Err(EvalError::Empty);
    }
    let covered = linkable
        .iter()
        .filter(|m| {
            normalize(&m.surface, rules)
                .split_whitespace()
                .any(|t| vocab.contains(t))
        })
        .count();
    Ok(covered as f64 / linkable.len() as f64)
}
