//! Wikipedia-derived resources: dump ingestion, interlanguage title maps,
//! anchor statistics and the probabilistic mention table.

mod dump;
mod links;
mod prtm;
mod store;
mod title_map;
#[cfg(feature = "xml")]
pub mod xml;
#[cfg(feature = "xml")]
pub use xml::parse_xml_dump;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dump::{parse_dump, parse_dump_all};
pub(crate) use links::is_lang_code;
pub use links::{extract_links, normalize_title, WikiLink};
pub use prtm::{build_prtm, collect_anchors, prtm_candidates, PrEntry, PrTable};
pub use store::{decode_index, encode_index, load_index, save_index, WikiIndex, INDEX_HEADER};
pub use title_map::{build_title_map, build_title_map_with_stats, TitleMap, TitleMapStats};

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("dump line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("duplicate title `{title}` in language `{lang}`{}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    DuplicateTitle {
        lang: String,
        title: String,
        line: Option<usize>,
    },
    #[error("pages mix languages `{0}` and `{1}`")]
    MixedLanguages(String, String),
    #[error("index version mismatch: expected `{expected}`, found `{found}`")]
    Version { expected: String, found: String },
    #[error("index checksum failure: {0}")]
    Checksum(String),
    #[error("index line {line}: {message}")]
    Corrupt { line: usize, message: String },
    #[cfg(feature = "xml")]
    #[error("xml: {0}")]
    Xml(String),
}

/// One wiki page as ingested from a dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page {
    pub title: String,
    pub lang: String,
    pub wikitext: String,
    /// Interlanguage links, language code to title in that language.
    pub interlang_targets: BTreeMap<String, String>,
    pub redirect_target: Option<String>,
}

impl Page {
    pub fn new(lang: &str, title: &str) -> Self {
        Page {
            title: normalize_title(title),
            lang: lang.to_string(),
            wikitext: String::new(),
            interlang_targets: BTreeMap::new(),
            redirect_target: None,
        }
    }

    pub fn is_redirect(&self) -> bool {
        self.redirect_target.is_some()
    }

    pub fn english_target(&self) -> Option<&str> {
        self.interlang_targets.get("en").map(String::as_str)
    }

    /// Article links found in the wikitext, in document order.
    pub fn links(&self) -> Vec<WikiLink> {
        extract_links(&self.wikitext)
    }

    /// Occurrence counts of `(anchor text, target title)` pairs on this page.
    /// Redirect pages expose none.
    pub fn anchor_counts(&self) -> BTreeMap<(String, String), u64> {
        let mut counts = BTreeMap::new();
        if self.is_redirect() {
            return counts;
        }
        for link in self.links() {
            *counts.entry((link.anchor, link.target)).or_insert(0) += 1;
        }
        counts
    }
}

/// Anchor statistic aggregated over a page set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AnchorStat {
    pub surface: String,
    pub sl_target: String,
    pub count: u64,
}
