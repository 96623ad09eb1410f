//! Run configuration: command-line flags layered over an optional TOML file.
//!
//! Every flag has a same-named key (dashes become underscores). A flag given
//! on the command line replaces the file's value.

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use serde::{Deserialize, Serialize};
use xel_core::rank::ContextMode;
use xel_core::search::{Augment, BlockPair, GenConfig};

use crate::exit::usage;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub lang: Option<String>,
    pub dump: Option<PathBuf>,
    pub xml: Option<bool>,
    pub index: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    pub results: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub search_fixture: Option<PathBuf>,
    pub geo_fixture: Option<PathBuf>,
    pub search_endpoint: Option<String>,
    pub geo_endpoint: Option<String>,
    pub cache: Option<PathBuf>,
    pub summaries: Option<PathBuf>,
    pub out: Option<PathBuf>,

    pub k: Option<usize>,
    pub no_search: Option<bool>,
    pub no_map: Option<bool>,
    pub no_prtm: Option<bool>,
    pub no_pivot: Option<bool>,
    pub augment: Option<Augment>,
    pub country: Option<String>,
    pub pivot_langs: Option<Vec<String>>,
    pub script_pivot: Option<Vec<BlockPair>>,
    pub max_candidates: Option<usize>,

    pub embedder: Option<String>,
    pub context: Option<ContextMode>,
    pub per_type: Option<bool>,
    pub recall_k: Option<Vec<usize>>,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct RunFlags {
    /// TOML file with defaults for any of the flags below.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Source-language code (e.g. `om`).
    #[arg(long, global = true)]
    pub lang: Option<String>,
    /// Wikipedia dump in TinyDump (or, with --xml, XML) format.
    #[arg(long, global = true)]
    pub dump: Option<PathBuf>,
    /// Read the dump as MediaWiki XML.
    #[arg(long, global = true)]
    pub xml: bool,
    /// Index file written by `build-index`.
    #[arg(long, global = true)]
    pub index: Option<PathBuf>,
    /// Mentions, one JSON object per line.
    #[arg(long, global = true)]
    pub dataset: Option<PathBuf>,
    /// Link results, one JSON object per line.
    #[arg(long, global = true)]
    pub results: Option<PathBuf>,
    /// Normalization rules file.
    #[arg(long, global = true)]
    pub rules: Option<PathBuf>,
    #[arg(long, global = true)]
    pub search_fixture: Option<PathBuf>,
    #[arg(long, global = true)]
    pub geo_fixture: Option<PathBuf>,
    /// HTTP search endpoint with a `{query}` placeholder (needs the `live` feature).
    #[arg(long, global = true)]
    pub search_endpoint: Option<String>,
    /// HTTP geocoding endpoint with a `{query}` placeholder (needs the `live` feature).
    #[arg(long, global = true)]
    pub geo_endpoint: Option<String>,
    /// Directory for cached search responses.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// JSON map from English title to summary text.
    #[arg(long, global = true)]
    pub summaries: Option<PathBuf>,
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,

    /// Number of Wikipedia search hits kept per query.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true)]
    pub no_search: bool,
    #[arg(long, global = true)]
    pub no_map: bool,
    #[arg(long, global = true)]
    pub no_prtm: bool,
    #[arg(long, global = true)]
    pub no_pivot: bool,
    /// Query augmentation: none, wiki or country.
    #[arg(long, global = true)]
    pub augment: Option<Augment>,
    /// Country name used by `--augment country`.
    #[arg(long, global = true)]
    pub country: Option<String>,
    /// Languages whose Wikipedia hits are re-searched.
    #[arg(long, global = true, value_delimiter = ',')]
    pub pivot_langs: Option<Vec<String>>,
    /// Code point block pairs, e.g. `0B00-0B7F:0900-097F`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub script_pivot: Option<Vec<BlockPair>>,
    #[arg(long, global = true)]
    pub max_candidates: Option<usize>,

    /// `builtin` or `external:<host:port>`.
    #[arg(long, global = true)]
    pub embedder: Option<String>,
    /// How the cosine enters the score: raw or shifted.
    #[arg(long, global = true)]
    pub context: Option<ContextMode>,
    /// Add accuracy rows per entity type.
    #[arg(long, global = true)]
    pub per_type: bool,
    /// Recall cut-offs to report, e.g. `1,5`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub recall_k: Option<Vec<usize>>,
}

fn flag(set: bool) -> Option<bool> {
    set.then_some(true)
}

impl RunFlags {
    fn into_config(self) -> RunConfig {
        RunConfig {
            lang: self.lang,
            dump: self.dump,
            xml: flag(self.xml),
            index: self.index,
            dataset: self.dataset,
            results: self.results,
            rules: self.rules,
            search_fixture: self.search_fixture,
            geo_fixture: self.geo_fixture,
            search_endpoint: self.search_endpoint,
            geo_endpoint: self.geo_endpoint,
            cache: self.cache,
            summaries: self.summaries,
            out: self.out,
            k: self.k,
            no_search: flag(self.no_search),
            no_map: flag(self.no_map),
            no_prtm: flag(self.no_prtm),
            no_pivot: flag(self.no_pivot),
            augment: self.augment,
            country: self.country,
            pivot_langs: self.pivot_langs,
            script_pivot: self.script_pivot,
            max_candidates: self.max_candidates,
            embedder: self.embedder,
            context: self.context,
            per_type: flag(self.per_type),
            recall_k: self.recall_k,
        }
    }

    /// Flags over the config file (if any).
    pub fn resolve(self) -> anyhow::Result<RunConfig> {
        let file = match &self.config {
            Some(path) => RunConfig::load(crate::exit::existing(Some(path), "--config")?)?,
            None => RunConfig::default(),
        };
        Ok(self.into_config().over(file))
    }
}

macro_rules! layer {
    ($top:ident, $base:ident, $($field:ident),* $(,)?) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    /// Field-wise: `self` where set, `base` otherwise.
    pub fn over(self, base: RunConfig) -> RunConfig {
        let top = self;
        layer!(
            top,
            base,
            lang,
            dump,
            xml,
            index,
            dataset,
            results,
            rules,
            search_fixture,
            geo_fixture,
            search_endpoint,
            geo_endpoint,
            cache,
            summaries,
            out,
            k,
            no_search,
            no_map,
            no_prtm,
            no_pivot,
            augment,
            country,
            pivot_langs,
            script_pivot,
            max_candidates,
            embedder,
            context,
            per_type,
            recall_k,
        )
    }

    pub fn gen_config(&self) -> anyhow::Result<GenConfig> {
        let defaults = GenConfig::default();
        let cfg = GenConfig {
            k: self.k.unwrap_or(defaults.k),
            use_search: !self.no_search.unwrap_or(false),
            use_map: !self.no_map.unwrap_or(false),
            use_prtm: !self.no_prtm.unwrap_or(false),
            use_pivot: !self.no_pivot.unwrap_or(false),
            augment: self.augment.unwrap_or(defaults.augment),
            pivot_langs: self.pivot_langs.clone().unwrap_or(defaults.pivot_langs),
            script_blocks: self.script_pivot.clone().unwrap_or(defaults.script_blocks),
            max_candidates: self.max_candidates.unwrap_or(defaults.max_candidates),
        };
        cfg.validate().map_err(usage)?;
        Ok(cfg)
    }

    /// Set the switches of `cfg` on this config.
    pub fn with_gen_config(mut self, cfg: &GenConfig) -> RunConfig {
        self.k = Some(cfg.k);
        self.no_search = Some(!cfg.use_search);
        self.no_map = Some(!cfg.use_map);
        self.no_prtm = Some(!cfg.use_prtm);
        self.no_pivot = Some(!cfg.use_pivot);
        self.augment = Some(cfg.augment);
        self.pivot_langs = Some(cfg.pivot_langs.clone());
        self.script_pivot = Some(cfg.script_blocks.clone());
        self.max_candidates = Some(cfg.max_candidates);
        self
    }

    pub fn recall_ks(&self) -> anyhow::Result<Vec<usize>> {
        let ks = self.recall_k.clone().unwrap_or_else(|| vec![5]);
        if ks.contains(&0) {
            return Err(usage("--recall-k values must be at least 1"));
        }
        Ok(ks)
    }
}
