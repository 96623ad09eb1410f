//! Word-to-word translation baseline built from title pairs.
//!
//! Equal-length title pairs align token by token; otherwise each source token
//! receives a `1/|EN tokens|` share of every English token. Counts are then
//! normalized per source token. A mention is translated with each token's
//! best entry and kept only if the result is an existing English title.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::search::{Candidate, Source};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TransTable {
    /// Per source token, English tokens by descending score (ties by token).
    pub entries: BTreeMap<String, Vec<(String, f64)>>,
}

impl TransTable {
    pub fn best(&self, token: &str) -> Option<&str> {
        self.entries
            .get(token)
            .and_then(|row| row.first())
            .map(|(en, _)| en.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn build_translation_table<S: AsRef<str>, T: AsRef<str>>(title_pairs: &[(S, T)]) -> TransTable {
    let mut counts: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    for (sl, en) in title_pairs {
        let sl: Vec<&str> = sl.as_ref().split_whitespace().collect();
        let en: Vec<&str> = en.as_ref().split_whitespace().collect();
        if sl.is_empty() || en.is_empty() {
            continue;
        }
        if sl.len() == en.len() {
            for (s, e) in sl.iter().zip(&en) {
                *counts
                    .entry(s.to_string())
                    .or_default()
                    .entry(e.to_string())
                    .or_insert(0.0) += 1.0;
            }
        } else {
            let share = 1.0 / en.len() as f64;
            for s in &sl {
                let row = counts.entry(s.to_string()).or_default();
                for e in &en {
                    *row.entry(e.to_string()).or_insert(0.0) += share;
                }
            }
        }
    }

    let entries = counts
        .into_iter()
        .map(|(sl, row)| {
            let total: f64 = row.values().sum();
            let mut scored: Vec<(String, f64)> = row.into_iter().map(|(en, c)| (en, c / total)).collect();
            scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            (sl, scored)
        })
        .collect();
    TransTable { entries }
}

/// Translate token by token; any unknown token yields no candidate.
pub fn translation_candidates(table: &TransTable, mention: &str, en_titles: &BTreeSet<String>) -> Vec<Candidate> {
    let tokens: Vec<&str> = mention.split_whitespace().collect();
    if tokens.is_empty() {
        return Vec::new();
    }
    let Some(translated) = tokens.iter().map(|t| table.best(t)).collect::<Option<Vec<&str>>>() else {
        return Vec::new();
    };
    let joined = translated.join(" ");
    if en_titles.contains(&joined) {
        // table lookup; the source set has no dedicated baseline member
        vec![Candidate::new(joined, Source::PrTM)]
    } else {
        Vec::new()
    }
}
