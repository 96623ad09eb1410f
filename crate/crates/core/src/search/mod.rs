//! Candidate generation from search and map providers.
//!
//! A normalized mention is sent to a search provider; the top-k Wikipedia
//! page results are resolved to English titles. Geo mentions also go through
//! a map provider whose English surface is searched again. Wikipedia hits in
//! related languages are searched once more (pivoting), and the mention table
//! contributes its own candidates.

mod cache;
mod generate;
#[cfg(feature = "live")]
pub mod live;
mod provider;
mod script;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use percent_encoding::percent_decode_str;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use url::Url;

use crate::wiki::{normalize_title, TitleMap};

pub use cache::CachedSearch;
pub use generate::{map_candidates, pivot_candidates, CandidateGenerator, Generation, SourceFailure};
pub use provider::{FixtureGeo, FixtureSearch, GeoProvider, ProviderError, SearchProvider};
pub use script::{script_pivot, BlockPair};

pub const DEFAULT_MAX_CANDIDATES: usize = 16;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("query augmentation by country needs a country name")]
    MissingCountry,
    #[error("every provider call failed: {0}")]
    AllProvidersFailed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub url: String,
    pub title: String,
    pub rank: u32,
}

/// A search result on a `<lang>.wikipedia.org` page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WikiPageHit {
    pub lang: String,
    pub page_title: String,
    pub rank: u32,
}

/// Where a candidate came from. The declaration order is the tie-break
/// priority used when ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Source {
    SearchTop,
    MapSearch,
    Pivot,
    PrTM,
}

impl Source {
    pub const ALL: [Source; 4] = [Source::SearchTop, Source::MapSearch, Source::Pivot, Source::PrTM];
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub entity: String,
    pub sources: BTreeSet<Source>,
    pub prtm_prob: Option<f64>,
    pub best_rank: Option<u32>,
}

impl Candidate {
    pub fn new(entity: impl Into<String>, source: Source) -> Self {
        Candidate {
            entity: entity.into(),
            sources: BTreeSet::from([source]),
            prtm_prob: None,
            best_rank: None,
        }
    }

    pub fn with_rank(mut self, rank: u32) -> Self {
        self.best_rank = Some(rank);
        self
    }

    pub fn with_prob(mut self, prob: f64) -> Self {
        self.prtm_prob = Some(prob);
        self
    }

    /// Fold another hypothesis for the same entity into this one.
    pub fn absorb(&mut self, other: Candidate) {
        debug_assert_eq!(self.entity, other.entity);
        self.sources.extend(other.sources);
        self.best_rank = match (self.best_rank, other.best_rank) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.prtm_prob = match (self.prtm_prob, other.prtm_prob) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
    }

    /// Highest-priority source.
    pub fn top_source(&self) -> Source {
        *self.sources.first().expect("candidate has at least one source")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Augment {
    #[default]
    None,
    Wiki,
    Country,
}

impl FromStr for Augment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Augment::None),
            "wiki" => Ok(Augment::Wiki),
            "country" => Ok(Augment::Country),
            other => Err(format!("unknown augment mode `{other}` (none, wiki, country)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub k: usize,
    pub use_search: bool,
    pub use_map: bool,
    pub use_prtm: bool,
    pub use_pivot: bool,
    pub augment: Augment,
    pub pivot_langs: Vec<String>,
    pub script_blocks: Vec<BlockPair>,
    pub max_candidates: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            k: 1,
            use_search: true,
            use_map: true,
            use_prtm: true,
            use_pivot: true,
            augment: Augment::None,
            pivot_langs: Vec::new(),
            script_blocks: Vec::new(),
            max_candidates: DEFAULT_MAX_CANDIDATES,
        }
    }
}

impl GenConfig {
    pub fn enabled(&self, source: Source) -> bool {
        match source {
            Source::SearchTop => self.use_search,
            Source::MapSearch => self.use_map,
            Source::Pivot => self.use_pivot,
            Source::PrTM => self.use_prtm,
        }
    }

    pub fn set_enabled(&mut self, source: Source, on: bool) {
        match source {
            Source::SearchTop => self.use_search = on,
            Source::MapSearch => self.use_map = on,
            Source::Pivot => self.use_pivot = on,
            Source::PrTM => self.use_prtm = on,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.k == 0 {
            return Err("k must be at least 1".into());
        }
        if self.max_candidates == 0 {
            return Err("max_candidates must be at least 1".into());
        }
        Ok(())
    }
}

/// Build the search string for a normalized mention.
pub fn make_query(mention: &str, augment: Augment, country: Option<&str>) -> Result<String, GenError> {
    match augment {
        Augment::None => Ok(mention.to_string()),
        Augment::Wiki => Ok(format!("{mention} wiki")),
        Augment::Country => match country.map(str::trim) {
            Some(c) if !c.is_empty() => Ok(format!("{mention} {c}")),
            _ => Err(GenError::MissingCountry),
        },
    }
}

/// Parse a `https://<lang>.wikipedia.org/wiki/<Title>` URL.
pub fn parse_wiki_url(raw: &str) -> Option<(String, String)> {
    let url = Url::parse(raw).ok()?;
    let host = url.host_str()?.to_ascii_lowercase();
    let lang = host.strip_suffix(".wikipedia.org")?;
    if !crate::wiki::is_lang_code(lang) {
        return None;
    }
    let encoded = url.path().strip_prefix("/wiki/")?;
    let decoded = percent_decode_str(encoded).decode_utf8().ok()?;
    let title = normalize_title(&decoded);
    (!title.is_empty()).then(|| (lang.to_string(), title))
}

/// Keep the first `k` results that are Wikipedia article pages.
pub fn filter_wiki_pages(results: &[SearchResult], k: usize) -> Vec<WikiPageHit> {
    let mut sorted: Vec<&SearchResult> = results.iter().collect();
    sorted.sort_by_key(|r| r.rank);
    let mut seen_ranks = BTreeSet::new();
    sorted
        .into_iter()
        .filter(|r| seen_ranks.insert(r.rank))
        .filter_map(|r| {
            parse_wiki_url(&r.url).map(|(lang, page_title)| WikiPageHit {
                lang,
                page_title,
                rank: r.rank,
            })
        })
        .take(k)
        .collect()
}

/// English hits are already English titles; source-language hits go
/// through the interlanguage map. Anything else resolves to nothing.
pub fn resolve_to_english(hit: &WikiPageHit, titles: &TitleMap) -> Option<String> {
    if hit.lang == "en" {
        Some(hit.page_title.clone())
    } else if hit.lang == titles.lang {
        titles.get(&hit.page_title).map(str::to_string)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(url: &str, rank: u32) -> SearchResult {
        SearchResult {
            url: url.into(),
            title: String::new(),
            rank,
        }
    }

    #[test]
    fn query_forms() {
        assert_eq!(
            make_query("Chilika hrada", Augment::None, None).unwrap(),
            "Chilika hrada"
        );
        assert_eq!(
            make_query("Chilika hrada", Augment::Wiki, None).unwrap(),
            "Chilika hrada wiki"
        );
        assert_eq!(
            make_query("Nawala", Augment::Country, Some("Sri Lanka")).unwrap(),
            "Nawala Sri Lanka"
        );
        assert!(matches!(
            make_query("Nawala", Augment::Country, None),
            Err(GenError::MissingCountry)
        ));
    }

    #[test]
    fn keeps_only_wikipedia_hosts() {
        let results = vec![
            result("https://blog.example.com/chilika", 1),
            result("https://en.wikipedia.org/wiki/Chilika_Lake", 2),
        ];
        assert_eq!(
            filter_wiki_pages(&results, 1),
            vec![WikiPageHit {
                lang: "en".into(),
                page_title: "Chilika Lake".into(),
                rank: 2
            }]
        );
    }

    #[test]
    fn no_wikipedia_hosts() {
        let results = vec![
            result("https://example.org/wiki/X", 1),
            result("https://wikipedia.org/wiki/X", 2),
        ];
        assert!(filter_wiki_pages(&results, 5).is_empty());
    }

    #[test]
    fn truncates_to_k() {
        let results: Vec<_> = (1..=7)
            .map(|r| result(&format!("https://en.wikipedia.org/wiki/P{r}"), r))
            .collect();
        let hits = filter_wiki_pages(&results, 5);
        assert_eq!(hits.len(), 5);
        assert_eq!(hits.iter().map(|h| h.rank).collect::<Vec<_>>(), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn percent_decoding_and_language() {
        let hits = filter_wiki_pages(
            &[result(
                "https://am.wikipedia.org/wiki/%E1%8A%A2%E1%89%B5%E1%8B%AE%E1%8C%B5%E1%8B%AB",
                1,
            )],
            1,
        );
        assert_eq!(hits[0].lang, "am");
        assert_eq!(hits[0].page_title, "ኢትዮጵያ");
        assert!(parse_wiki_url("https://en.wikipedia.org/w/index.php?title=X").is_none());
    }

    #[test]
    fn resolution() {
        let mut titles = TitleMap::new("om");
        titles.entries.insert("Itoophiyaa".into(), "Ethiopia".into());
        let hit = |lang: &str, t: &str| WikiPageHit {
            lang: lang.into(),
            page_title: t.into(),
            rank: 1,
        };
        assert_eq!(
            resolve_to_english(&hit("en", "Chilika Lake"), &titles).as_deref(),
            Some("Chilika Lake")
        );
        assert_eq!(
            resolve_to_english(&hit("om", "Itoophiyaa"), &titles).as_deref(),
            Some("Ethiopia")
        );
        assert_eq!(resolve_to_english(&hit("om", "Chilika"), &titles), None);
        assert_eq!(resolve_to_english(&hit("am", "Itoophiyaa"), &titles), None);
    }

    #[test]
    fn absorb_unions_sources() {
        let mut a = Candidate::new("X", Source::PrTM).with_prob(0.5);
        a.absorb(Candidate::new("X", Source::SearchTop).with_rank(3));
        assert_eq!(a.sources.len(), 2);
        assert_eq!(a.top_source(), Source::SearchTop);
        assert_eq!(a.best_rank, Some(3));
        assert_eq!(a.prtm_prob, Some(0.5));
    }
}
