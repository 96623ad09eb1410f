use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{IndexError, Page};

/// Source-language title to English title, via interlanguage links.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TitleMap {
    pub lang: String,
    pub entries: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TitleMapStats {
    pub direct: usize,
    pub via_redirect: usize,
    /// Redirects whose target is itself a redirect; dropped.
    pub chains_dropped: usize,
}

impl TitleMap {
    pub fn new(lang: impl Into<String>) -> Self {
        TitleMap {
            lang: lang.into(),
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, sl_title: &str) -> Option<&str> {
        self.entries.get(sl_title).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Keep only entries whose English title exists in `en_titles`.
    pub fn retain_english(&mut self, en_titles: &BTreeSet<String>) {
        self.entries.retain(|_, en| en_titles.contains(en));
    }

    /// English titles mapped to, deduplicated.
    pub fn english_titles(&self) -> BTreeSet<String> {
        self.entries.values().cloned().collect()
    }

    /// `(SL title, EN title)` pairs in key order.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

pub fn build_title_map(sl_pages: &[Page]) -> Result<TitleMap, IndexError> {
    build_title_map_with_stats(sl_pages).map(|(map, _)| map)
}

/// Map every page with an `en` interlanguage target; redirects are followed
/// exactly one hop.
pub fn build_title_map_with_stats(sl_pages: &[Page]) -> Result<(TitleMap, TitleMapStats), IndexError> {
    let lang = sl_pages.first().map(|p| p.lang.clone()).unwrap_or_default();
    let mut by_title: HashMap<&str, &Page> = HashMap::with_capacity(sl_pages.len());
    for page in sl_pages {
        if page.lang != lang {
            return Err(IndexError::MixedLanguages(lang, page.lang.clone()));
        }
        if by_title.insert(page.title.as_str(), page).is_some() {
            return Err(IndexError::DuplicateTitle {
                lang: lang.clone(),
                title: page.title.clone(),
                line: None,
            });
        }
    }

    let mut map = TitleMap::new(lang);
    let mut stats = TitleMapStats::default();
    for page in sl_pages {
        match &page.redirect_target {
            None => {
                if let Some(en) = page.english_target() {
                    map.entries.insert(page.title.clone(), en.to_string());
                    stats.direct += 1;
                }
            }
            Some(target) => match by_title.get(target.as_str()) {
                Some(t) if t.is_redirect() => stats.chains_dropped += 1,
                Some(t) => {
                    if let Some(en) = t.english_target() {
                        map.entries.insert(page.title.clone(), en.to_string());
                        stats.via_redirect += 1;
                    }
                }
                None => {}
            },
        }
    }
    if stats.chains_dropped > 0 {
        log::warn!(
            "{}: dropped {} redirect chains longer than one hop",
            map.lang,
            stats.chains_dropped
        );
    }
    Ok((map, stats))
}
