use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use super::SearchResult;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ProviderError {
    /// Timeouts, rate limits, unreachable hosts. Distinct from "no result".
    #[error("{provider}: transient failure: {message}")]
    Transient { provider: String, message: String },
    #[error("{provider}: {message}")]
    Invalid { provider: String, message: String },
}

pub trait SearchProvider: Send + Sync {
    fn id(&self) -> &str;

    /// Rank-ordered results for `query`. An unknown query is an empty list.
    fn search(&self, query: &str) -> Result<Vec<SearchResult>, ProviderError>;
}

pub trait GeoProvider: Send + Sync {
    fn id(&self) -> &str;

    /// English surface of a location, if the provider knows it.
    fn locate(&self, mention: &str) -> Result<Option<String>, ProviderError>;
}

impl<T: SearchProvider + ?Sized> SearchProvider for &T {
    fn id(&self) -> &str {
        (**self).id()
    }

    fn search(&self, query: &str) -> Result<Vec<SearchResult>, ProviderError> {
        (**self).search(query)
    }
}

impl<T: SearchProvider + ?Sized> SearchProvider for Box<T> {
    fn id(&self) -> &str {
        (**self).id()
    }

    fn search(&self, query: &str) -> Result<Vec<SearchResult>, ProviderError> {
        (**self).search(query)
    }
}

impl<T: GeoProvider + ?Sized> GeoProvider for Box<T> {
    fn id(&self) -> &str {
        (**self).id()
    }

    fn locate(&self, mention: &str) -> Result<Option<String>, ProviderError> {
        (**self).locate(mention)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum FixtureEntry<T> {
    Hit(T),
    Failure { error: String },
}

fn read_fixture<T: for<'de> Deserialize<'de>>(
    path: &Path,
    provider: &str,
) -> Result<BTreeMap<String, FixtureEntry<T>>, ProviderError> {
    let invalid = |message: String| ProviderError::Invalid {
        provider: provider.to_string(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

/// Search provider backed by a JSON map `query -> [{url, title, rank}]`.
/// A value `{"error": "..."}` simulates a transient failure for that query.
#[derive(Debug, Clone)]
pub struct FixtureSearch {
    id: String,
    entries: BTreeMap<String, FixtureEntry<Vec<SearchResult>>>,
}

impl FixtureSearch {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ProviderError> {
        let id = "fixture-search".to_string();
        let entries = read_fixture(path.as_ref(), &id)?;
        Ok(FixtureSearch { id, entries })
    }

    pub fn from_json(json: &str) -> Result<Self, ProviderError> {
        let id = "fixture-search".to_string();
        let entries = serde_json::from_str(json).map_err(|e| ProviderError::Invalid {
            provider: id.clone(),
            message: e.to_string(),
        })?;
        Ok(FixtureSearch { id, entries })
    }

    pub fn empty() -> Self {
        FixtureSearch {
            id: "fixture-search".into(),
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, query: &str, results: Vec<SearchResult>) {
        self.entries.insert(query.to_string(), FixtureEntry::Hit(results));
    }

    pub fn insert_failure(&mut self, query: &str, message: &str) {
        self.entries.insert(
            query.to_string(),
            FixtureEntry::Failure {
                error: message.to_string(),
            },
        );
    }
}

impl SearchProvider for FixtureSearch {
    fn id(&self) -> &str {
        &self.id
    }

    fn search(&self, query: &str) -> Result<Vec<SearchResult>, ProviderError> {
        match self.entries.get(query) {
            None => Ok(Vec::new()),
            Some(FixtureEntry::Hit(results)) => {
                let mut results = results.clone();
                results.sort_by_key(|r| r.rank);
                Ok(results)
            }
            Some(FixtureEntry::Failure { error }) => Err(ProviderError::Transient {
                provider: self.id.clone(),
                message: error.clone(),
            }),
        }
    }
}

/// Map provider backed by a JSON map `mention -> English surface`.
#[derive(Debug, Clone)]
pub struct FixtureGeo {
    id: String,
    entries: BTreeMap<String, FixtureEntry<String>>,
}

impl FixtureGeo {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ProviderError> {
        let id = "fixture-geo".to_string();
        let entries = read_fixture(path.as_ref(), &id)?;
        Ok(FixtureGeo { id, entries })
    }

    pub fn empty() -> Self {
        FixtureGeo {
            id: "fixture-geo".into(),
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, mention: &str, surface: &str) {
        self.entries
            .insert(mention.to_string(), FixtureEntry::Hit(surface.to_string()));
    }

    pub fn insert_failure(&mut self, mention: &str, message: &str) {
        self.entries.insert(
            mention.to_string(),
            FixtureEntry::Failure {
                error: message.to_string(),
            },
        );
    }
}

impl GeoProvider for FixtureGeo {
    fn id(&self) -> &str {
        &self.id
    }

    fn locate(&self, mention: &str) -> Result<Option<String>, ProviderError> {
        match self.entries.get(mention) {
            None => Ok(None),
            Some(FixtureEntry::Hit(surface)) => Ok(Some(surface.clone())),
            Some(FixtureEntry::Failure { error }) => Err(ProviderError::Transient {
                provider: self.id.clone(),
                message: error.clone(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_json_with_failures() {
        let search = FixtureSearch::from_json(
            r#"{"Chilika hrada": [{"url": "https://en.wikipedia.org/wiki/Chilika_Lake", "title": "Chilika Lake", "rank": 2},
                                   {"url": "https://x.org", "title": "x", "rank": 1}],
                "slow": {"error": "timeout"}}"#,
        )
        .unwrap();
        let results = search.search("Chilika hrada").unwrap();
        assert_eq!(results[0].rank, 1);
        assert!(search.search("unknown").unwrap().is_empty());
        assert!(matches!(search.search("slow"), Err(ProviderError::Transient { .. })));
    }

    #[test]
    fn geo_lookup() {
        let mut geo = FixtureGeo::empty();
        geo.insert("Chilika hrada", "Chilika Lake");
        geo.insert_failure("Nawala", "timeout");
        assert_eq!(geo.locate("Chilika hrada").unwrap().as_deref(), Some("Chilika Lake"));
        assert_eq!(geo.locate("elsewhere").unwrap(), None);
        assert!(matches!(geo.locate("Nawala"), Err(ProviderError::Transient { .. })));
    }
}
