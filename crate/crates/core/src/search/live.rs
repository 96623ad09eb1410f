//! HTTP-backed providers. Each provider is configured with a URL template
//! holding a `{query}` placeholder; the endpoint answers with the same JSON
//! shapes the fixture files use.

use std::time::Duration;

use reqwest::blocking::Client;

use super::{GeoProvider, ProviderError, SearchProvider, SearchResult};
use percent_encoding::{utf8_percent_encode, NON_ALPHANUMERIC};

fn client(provider: &str) -> Result<Client, ProviderError> {
    Client::builder()
        .timeout(Duration::from_secs(20))
        .build()
        .map_err(|e| ProviderError::Invalid {
            provider: provider.to_string(),
            message: e.to_string(),
        })
}

fn get_json<T: serde::de::DeserializeOwned>(
    client: &Client,
    provider: &str,
    template: &str,
    query: &str,
) -> Result<T, ProviderError> {
    let url = template.replace("{query}", &utf8_percent_encode(query, NON_ALPHANUMERIC).to_string());
    let transient = |message: String| ProviderError::Transient {
        provider: provider.to_string(),
        message,
    };
    let response = client.get(&url).send().map_err(|e| transient(e.to_string()))?;
    let status = response.status();
    if status.is_server_error() || status.as_u16() == 429 {
        return Err(transient(format!("HTTP {status}")));
    }
    if !status.is_success() {
        return Err(ProviderError::Invalid {
            provider: provider.to_string(),
            message: format!("HTTP {status} for {url}"),
        });
    }
    response.json().map_err(|e| ProviderError::Invalid {
        provider: provider.to_string(),
        message: e.to_string(),
    })
}

/// Endpoint returns `[{url, title, rank}]`.
pub struct HttpSearch {
    id: String,
    template: String,
    client: Client,
}

impl HttpSearch {
    pub fn new(id: &str, template: &str) -> Result<Self, ProviderError> {
        Ok(HttpSearch {
            id: id.to_string(),
            template: template.to_string(),
            client: client(id)?,
        })
    }
}

impl SearchProvider for HttpSearch {
    fn id(&self) -> &str {
        &self.id
    }

    fn search(&self, query: &str) -> Result<Vec<SearchResult>, ProviderError> {
        let mut results: Vec<SearchResult> = get_json(&self.client, &self.id, &self.template, query)?;
        results.sort_by_key(|r| r.rank);
        Ok(results)
    }
}

/// Endpoint returns a JSON string or `null`.
pub struct HttpGeo {
    id: String,
    template: String,
    client: Client,
}

impl HttpGeo {
    pub fn new(id: &str, template: &str) -> Result<Self, ProviderError> {
        Ok(HttpGeo {
            id: id.to_string(),
            template: template.to_string(),
            client: client(id)?,
        })
    }
}

impl GeoProvider for HttpGeo {
    fn id(&self) -> &str {
        &self.id
    }

    fn locate(&self, mention: &str) -> Result<Option<String>, ProviderError> {
        get_json(&self.client, &self.id, &self.template, mention)
    }
}
