use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::Duration;

use anyhow::Context;
use rayon::prelude::*;
use serde::Deserialize;
use xel_core::baseline::{build_translation_table, translation_candidates, TransTable};
use xel_core::dataset::MentionRecord;
use xel_core::eval::LinkResult;
use xel_core::normalize::{load_rules, normalize, RuleSet};
use xel_core::rank::{
    rank_and_select, split_sentences, BuiltinEmbedder, ContextBundle, ContextMode, Embedder, ExternalEmbedder,
    DEFAULT_DELIMITERS,
};
use xel_core::search::{
    CachedSearch, Candidate, CandidateGenerator, FixtureGeo, FixtureSearch, GenConfig, GeoProvider, SearchProvider,
};
use xel_core::wiki::{load_index, WikiIndex};

use crate::config::RunConfig;
use crate::exit::{existing, usage};

const EMBEDDER_TIMEOUT: Duration = Duration::from_secs(30);

/// Everything `link` needs besides the generation switches.
pub struct Resources {
    pub index: WikiIndex,
    pub rules: RuleSet,
    pub search: Option<Box<dyn SearchProvider>>,
    pub geo: Option<Box<dyn GeoProvider>>,
    pub summaries: BTreeMap<String, Vec<String>>,
    pub embedder: Box<dyn Embedder>,
    pub context: ContextMode,
    pub country: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Summary {
    Text(String),
    Sentences(Vec<String>),
}

pub fn load_summaries(path: &Path) -> anyhow::Result<BTreeMap<String, Vec<String>>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let raw: BTreeMap<String, Summary> =
        serde_json::from_str(&text).with_context(|| format!("parsing summaries {}", path.display()))?;
    Ok(raw
        .into_iter()
        .map(|(title, s)| {
            let sentences = match s {
                Summary::Text(t) => split_sentences(&t, DEFAULT_DELIMITERS),
                Summary::Sentences(v) => v,
            };
            (title, sentences)
        })
        .collect())
}

/// Rules for `lang` from an optional rules file; empty when absent.
pub fn rules_for(path: Option<&Path>, lang: &str) -> anyhow::Result<RuleSet> {
    let Some(path) = path else {
        return Ok(RuleSet::empty(lang));
    };
    let path = existing(Some(path), "--rules")?;
    let mut all = load_rules(path).with_context(|| format!("loading rules {}", path.display()))?;
    Ok(all.remove(lang).unwrap_or_else(|| RuleSet::empty(lang)))
}

pub fn open_embedder(selector: Option<&str>) -> anyhow::Result<Box<dyn Embedder>> {
    match selector.unwrap_or("builtin") {
        "builtin" => Ok(Box::new(BuiltinEmbedder)),
        other => match other.strip_prefix("external:") {
            Some(addr) if !addr.is_empty() => {
                let ext = ExternalEmbedder::connect(addr, EMBEDDER_TIMEOUT)
                    .with_context(|| format!("connecting to embedder at {addr}"))?;
                log::info!("external embedder {} (dim {})", ext.health().model, ext.health().dim);
                Ok(Box::new(ext))
            }
            _ => Err(usage(format!(
                "--embedder must be `builtin` or `external:<addr>`, got `{other}`"
            ))),
        },
    }
}

fn with_cache<P: SearchProvider + 'static>(inner: P, cache: Option<&Path>) -> Box<dyn SearchProvider> {
    match cache {
        Some(dir) => Box::new(CachedSearch::new(inner, dir)),
        None => Box::new(inner),
    }
}

fn open_search(run: &RunConfig) -> anyhow::Result<Option<Box<dyn SearchProvider>>> {
    let cache = run.cache.as_deref();
    match (&run.search_fixture, &run.search_endpoint) {
        (Some(_), Some(_)) => Err(usage("give either --search-fixture or --search-endpoint, not both")),
        (Some(path), None) => {
            let path = existing(Some(path), "--search-fixture")?;
            Ok(Some(with_cache(FixtureSearch::load(path)?, cache)))
        }
        (None, Some(template)) => live_search(template).map(|p| Some(with_cache(p, cache))),
        (None, None) => Ok(None),
    }
}

fn open_geo(run: &RunConfig) -> anyhow::Result<Option<Box<dyn GeoProvider>>> {
    match (&run.geo_fixture, &run.geo_endpoint) {
        (Some(_), Some(_)) => Err(usage("give either --geo-fixture or --geo-endpoint, not both")),
        (Some(path), None) => {
            let path = existing(Some(path), "--geo-fixture")?;
            Ok(Some(Box::new(FixtureGeo::load(path)?)))
        }
        (None, Some(template)) => live_geo(template).map(Some),
        (None, None) => Ok(None),
    }
}

#[cfg(feature = "live")]
fn live_search(template: &str) -> anyhow::Result<xel_core::search::live::HttpSearch> {
    Ok(xel_core::search::live::HttpSearch::new("http-search", template)?)
}

#[cfg(not(feature = "live"))]
fn live_search(_: &str) -> anyhow::Result<FixtureSearch> {
    Err(usage("--search-endpoint needs a build with the `live` feature"))
}

#[cfg(feature = "live")]
fn live_geo(template: &str) -> anyhow::Result<Box<dyn GeoProvider>> {
    Ok(Box::new(xel_core::search::live::HttpGeo::new("http-geo", template)?))
}

#[cfg(not(feature = "live"))]
fn live_geo(_: &str) -> anyhow::Result<Box<dyn GeoProvider>> {
    Err(usage("--geo-endpoint needs a build with the `live` feature"))
}

impl Resources {
    pub fn open(run: &RunConfig) -> anyhow::Result<Self> {
        let index_path = existing(run.index.as_deref(), "--index")?;
        let index = load_index(index_path).with_context(|| format!("loading index {}", index_path.display()))?;
        let lang = run.lang.clone().unwrap_or_else(|| index.titles.lang.clone());
        if lang != index.titles.lang {
            return Err(usage(format!(
                "--lang {lang} does not match the index language {}",
                index.titles.lang
            )));
        }
        let summaries = match &run.summaries {
            Some(p) => load_summaries(existing(Some(p), "--summaries")?)?,
            None => BTreeMap::new(),
        };
        Ok(Resources {
            rules: rules_for(run.rules.as_deref(), &lang)?,
            search: open_search(run)?,
            geo: open_geo(run)?,
            embedder: open_embedder(run.embedder.as_deref())?,
            context: run.context.unwrap_or_default(),
            country: run.country.clone(),
            summaries,
            index,
        })
    }

    fn rank(&self, mention: &MentionRecord, candidates: Vec<Candidate>) -> anyhow::Result<LinkResult> {
        if candidates.is_empty() {
            return Ok(LinkResult {
                mention: mention.clone(),
                candidates: Vec::new(),
                selected: None,
            });
        }
        let ctx = ContextBundle::for_mention(mention, &candidates, &self.summaries, DEFAULT_DELIMITERS);
        let ranking = rank_and_select(&candidates, mention, &ctx, self.embedder.as_ref(), self.context)?;
        Ok(LinkResult {
            mention: mention.clone(),
            candidates: ranking.scored.into_iter().map(|s| s.candidate.entity).collect(),
            selected: Some(ranking.selected),
        })
    }

    fn link_one(&self, cfg: &GenConfig, mention: &MentionRecord) -> anyhow::Result<LinkResult> {
        let generator = CandidateGenerator {
            table: &self.index.table,
            titles: &self.index.titles,
            rules: &self.rules,
            search: self.search.as_deref(),
            geo: self.geo.as_deref(),
            cfg,
            country: self.country.as_deref(),
        };
        let generation = generator.generate(mention)?;
        for failure in &generation.failures {
            log::warn!(
                "{} {:?}: {} failed: {}",
                mention.doc_id,
                mention.surface,
                failure.source,
                failure.message
            );
        }
        self.rank(mention, generation.candidates)
    }

    /// Link every mention; the output order is the input order.
    pub fn link_all(&self, cfg: &GenConfig, mentions: &[MentionRecord]) -> anyhow::Result<Vec<LinkResult>> {
        mentions
            .par_iter()
            .enumerate()
            .map(|(i, m)| {
                self.link_one(cfg, m)
                    .with_context(|| format!("mention {} ({}, {:?})", i + 1, m.doc_id, m.surface))
            })
            .collect()
    }

    pub fn translation_table(&self) -> TransTable {
        let pairs: Vec<(&str, &str)> = self.index.titles.pairs().collect();
        build_translation_table(&pairs)
    }

    /// Word-by-word translation baseline, ranked like every other method.
    pub fn translate_all(&self, table: &TransTable, mentions: &[MentionRecord]) -> anyhow::Result<Vec<LinkResult>> {
        let en_titles: BTreeSet<String> = self.index.titles.english_titles();
        mentions
            .par_iter()
            .map(|m| {
                let normalized = normalize(&m.surface, &self.rules);
                self.rank(m, translation_candidates(table, &normalized, &en_titles))
            })
            .collect()
    }
}

/// Rows of the ablation table: search depth, map and table switches, with
/// pivoting off unless `with_pivot`.
pub fn ablation_rows(base: &GenConfig, with_pivot: bool) -> Vec<(String, GenConfig)> {
    let row = |k: usize, map: bool, prtm: bool, pivot: bool| GenConfig {
        k,
        use_search: true,
        use_map: map,
        use_prtm: prtm,
        use_pivot: pivot,
        ..base.clone()
    };
    let mut rows = vec![
        ("Google top1 w/o Google Map".to_string(), row(1, false, false, false)),
        ("Google top1".to_string(), row(1, true, false, false)),
        ("Google top5".to_string(), row(5, true, false, false)),
        ("Google top1 + PrTM".to_string(), row(1, true, true, false)),
        ("Google top5 + PrTM".to_string(), row(5, true, true, false)),
    ];
    if with_pivot {
        rows.push(("Google top5 + PrTM + pivot".to_string(), row(5, true, true, true)));
    }
    rows
}
