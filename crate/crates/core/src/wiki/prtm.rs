use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AnchorStat, Page, TitleMap};
use crate::normalize::{canonical, normalize, RuleSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrEntry {
    pub entity: String,
    pub count: u64,
    pub prob: f64,
}

/// Probabilistic mention to English entity table.
///
/// Rows are ordered by descending probability, ties by entity title.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PrTable {
    rows: BTreeMap<String, Vec<PrEntry>>,
}

impl PrTable {
    /// Build from raw `(mention, entity) -> count` totals. Zero counts are ignored.
    pub fn from_counts(counts: BTreeMap<String, BTreeMap<String, u64>>) -> Self {
        let rows = counts
            .into_iter()
            .filter_map(|(mention, entities)| {
                let total: u64 = entities.values().sum();
                if total == 0 {
                    return None;
                }
                let mut row: Vec<PrEntry> = entities
                    .into_iter()
                    .filter(|(_, c)| *c > 0)
                    .map(|(entity, count)| PrEntry {
                        entity,
                        count,
                        prob: count as f64 / total as f64,
                    })
                    .collect();
                row.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.entity.cmp(&b.entity)));
                Some((mention, row))
            })
            .collect();
        PrTable { rows }
    }

    pub fn row(&self, mention: &str) -> &[PrEntry] {
        self.rows.get(mention).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[PrEntry])> {
        self.rows.iter().map(|(m, r)| (m.as_str(), r.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn prob(&self, mention: &str, entity: &str) -> f64 {
        self.row(mention)
            .iter()
            .find(|e| e.entity == entity)
            .map_or(0.0, |e| e.prob)
    }
}

/// Aggregate anchors over non-redirect pages. Surfaces are normalized with
/// `rules`; pages are counted in parallel and merged in key order.
pub fn collect_anchors(pages: &[Page], rules: &RuleSet) -> Vec<AnchorStat> {
    let merged = pages
        .par_iter()
        .map(|page| {
            let mut local: BTreeMap<(String, String), u64> = BTreeMap::new();
            for ((anchor, target), n) in page.anchor_counts() {
                *local.entry((normalize(&anchor, rules), target)).or_insert(0) += n;
            }
            local
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, n) in b {
                *a.entry(k).or_insert(0) += n;
            }
            a
        });
    merged
        .into_iter()
        .map(|((surface, sl_target), count)| AnchorStat {
            surface,
            sl_target,
            count,
        })
        .collect()
}

/// Mention table: anchor surface → SL page → EN page, plus every mapped SL
/// title as a self-mention with count 1. Anchors whose SL target has no
/// English interlanguage link contribute nothing.
pub fn build_prtm(anchors: &[AnchorStat], titles: &TitleMap, sl_pages: &[Page]) -> PrTable {
    let mut counts: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    for anchor in anchors {
        if anchor.count == 0 {
            continue;
        }
        if let Some(en) = titles.get(&anchor.sl_target) {
            *counts
                .entry(anchor.surface.clone())
                .or_default()
                .entry(en.to_string())
                .or_insert(0) += anchor.count;
        }
    }
    for page in sl_pages {
        if let Some(en) = titles.get(&page.title) {
            *counts
                .entry(canonical(&page.title))
                .or_default()
                .entry(en.to_string())
                .or_insert(0) += 1;
        }
    }
    PrTable::from_counts(counts)
}

/// Exact-key lookup. Empty when the mention is unseen.
pub fn prtm_candidates(table: &PrTable, mention: &str) -> Vec<(String, f64)> {
    table.row(mention).iter().map(|e| (e.entity.clone(), e.prob)).collect()
}
