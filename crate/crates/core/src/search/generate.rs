use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{
    filter_wiki_pages, make_query, resolve_to_english, script_pivot, Candidate, GenConfig, GenError, GeoProvider,
    ProviderError, SearchProvider, Source, WikiPageHit,
};
use crate::dataset::MentionRecord;
use crate::normalize::{normalize, RuleSet};
use crate::wiki::{prtm_candidates, PrTable, TitleMap};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFailure {
    pub source: Source,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Generation {
    pub candidates: Vec<Candidate>,
    pub failures: Vec<SourceFailure>,
}

/// Ask the map provider for the English surface of a location mention.
pub fn map_candidates(provider: &dyn GeoProvider, mention: &str) -> Result<Option<String>, ProviderError> {
    provider.locate(mention)
}

/// Provider call bookkeeping for one mention.
#[derive(Default)]
struct Calls {
    attempted: usize,
    failures: Vec<SourceFailure>,
}

impl Calls {
    fn record<T>(&mut self, source: Source, outcome: Result<T, ProviderError>) -> Option<T> {
        self.attempted += 1;
        match outcome {
            Ok(v) => Some(v),
            Err(e) => {
                self.failures.push(SourceFailure {
                    source,
                    message: e.to_string(),
                });
                None
            }
        }
    }
}

fn search_hits(
    search: &dyn SearchProvider,
    query: &str,
    k: usize,
    source: Source,
    calls: &mut Calls,
) -> Vec<WikiPageHit> {
    calls
        .record(source, search.search(query))
        .map(|results| filter_wiki_pages(&results, k))
        .unwrap_or_default()
}

fn resolved(hits: &[WikiPageHit], titles: &TitleMap, source: Source) -> Vec<Candidate> {
    hits.iter()
        .filter_map(|hit| resolve_to_english(hit, titles).map(|en| Candidate::new(en, source).with_rank(hit.rank)))
        .collect()
}

fn pivotable<'h>(hits: &'h [WikiPageHit], cfg: &GenConfig, titles: &TitleMap) -> impl Iterator<Item = &'h WikiPageHit> {
    let langs = cfg.pivot_langs.clone();
    let sl = titles.lang.clone();
    hits.iter()
        .filter(move |h| h.lang != "en" && h.lang != sl && langs.contains(&h.lang))
}

/// Re-search the titles of Wikipedia hits in pivot languages and resolve
/// what comes back. One hop only: pivotable hits of the second search are
/// not followed.
pub fn pivot_candidates(
    hits: &[WikiPageHit],
    cfg: &GenConfig,
    search: &dyn SearchProvider,
    titles: &TitleMap,
) -> Vec<Candidate> {
    let mut calls = Calls::default();
    pivot_with(hits, cfg, search, titles, &mut calls)
}

fn pivot_with(
    hits: &[WikiPageHit],
    cfg: &GenConfig,
    search: &dyn SearchProvider,
    titles: &TitleMap,
    calls: &mut Calls,
) -> Vec<Candidate> {
    if !cfg.use_pivot {
        return Vec::new();
    }
    let mut out = Vec::new();
    for hit in pivotable(hits, cfg, titles) {
        let second = search_hits(search, &hit.page_title, cfg.k, Source::Pivot, calls);
        out.extend(resolved(&second, titles, Source::Pivot));
    }
    out
}

/// Everything needed to generate candidates for mentions of one language.
pub struct CandidateGenerator<'a> {
    pub table: &'a PrTable,
    pub titles: &'a TitleMap,
    pub rules: &'a RuleSet,
    pub search: Option<&'a dyn SearchProvider>,
    pub geo: Option<&'a dyn GeoProvider>,
    pub cfg: &'a GenConfig,
    /// Used by `Augment::Country`.
    pub country: Option<&'a str>,
}

impl CandidateGenerator<'_> {
    /// Union of search, map, pivot and table candidates, merged per entity.
    ///
    /// Order: search rank, then map results, then pivot results, then table
    /// probability. Fails only when every provider call failed; otherwise
    /// failures are reported alongside the candidates.
    pub fn generate(&self, mention: &MentionRecord) -> Result<Generation, GenError> {
        let cfg = self.cfg;
        let normalized = normalize(&mention.surface, self.rules);
        let mut calls = Calls::default();
        let mut lists: Vec<Vec<Candidate>> = Vec::with_capacity(4);

        let mut primary_hits = Vec::new();
        if let Some(search) = self.search.filter(|_| cfg.use_search || cfg.use_pivot) {
            let surface = if cfg.script_blocks.is_empty() {
                normalized.clone()
            } else {
                script_pivot(&normalized, &cfg.script_blocks)
            };
            let query = make_query(&surface, cfg.augment, self.country)?;
            primary_hits = search_hits(search, &query, cfg.k, Source::SearchTop, &mut calls);
        }
        if cfg.use_search {
            lists.push(resolved(&primary_hits, self.titles, Source::SearchTop));
        }

        if cfg.use_map && mention.entity_type.is_geo() {
            if let (Some(geo), Some(search)) = (self.geo, self.search) {
                let located = calls.record(Source::MapSearch, map_candidates(geo, &normalized));
                if let Some(Some(english)) = located {
                    let query = make_query(&english, cfg.augment, self.country)?;
                    let hits = search_hits(search, &query, cfg.k, Source::MapSearch, &mut calls);
                    lists.push(resolved(&hits, self.titles, Source::MapSearch));
                }
            }
        }

        if let Some(search) = self.search {
            lists.push(pivot_with(&primary_hits, cfg, search, self.titles, &mut calls));
        }

        if cfg.use_prtm {
            lists.push(
                prtm_candidates(self.table, &normalized)
                    .into_iter()
                    .map(|(entity, prob)| Candidate::new(entity, Source::PrTM).with_prob(prob))
                    .collect(),
            );
        }

        if calls.attempted > 0 && calls.failures.len() == calls.attempted {
            let notes: Vec<String> = calls.failures.iter().map(|f| f.message.clone()).collect();
            return Err(GenError::AllProvidersFailed(notes.join("; ")));
        }

        let mut merged: IndexMap<String, Candidate> = IndexMap::new();
        for candidate in lists.into_iter().flatten() {
            match merged.get_mut(&candidate.entity) {
                Some(existing) => existing.absorb(candidate),
                None => {
                    merged.insert(candidate.entity.clone(), candidate);
                }
            }
        }
        let mut candidates: Vec<Candidate> = merged.into_values().collect();
        candidates.truncate(cfg.max_candidates);
        Ok(Generation {
            candidates,
            failures: calls.failures,
        })
    }
}
