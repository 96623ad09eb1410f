use crate::normalize::canonical;

/// An article link `[[target|anchor]]` or `[[target]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WikiLink {
    pub target: String,
    pub anchor: String,
}

const NAMESPACES: &[&str] = &[
    "category",
    "file",
    "help",
    "image",
    "media",
    "mediawiki",
    "module",
    "portal",
    "special",
    "talk",
    "template",
    "user",
    "wikipedia",
    "wp",
    "draft",
];

/// Canonical page title: NFC, underscores as spaces, collapsed whitespace,
/// first letter upper-cased.
pub fn normalize_title(raw: &str) -> String {
    let spaced = canonical(&raw.replace('_', " "));
    let mut chars = spaced.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => spaced,
    }
}

/// Language-code shaped prefix such as `en`, `om`, `zh-yue`.
pub(crate) fn is_lang_code(prefix: &str) -> bool {
    let mut parts = prefix.split('-');
    let head = parts.next().unwrap_or_default();
    (2..=3).contains(&head.len())
        && head.bytes().all(|b| b.is_ascii_lowercase())
        && parts.all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_lowercase()))
}

/// Splits `[[...]]` bodies out of wikitext. Nested openings restart the scan
/// at the innermost `[[`.
fn link_bodies(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find("[[") {
        let after = &rest[open + 2..];
        let Some(close) = after.find("]]") else {
            break;
        };
        let body = &after[..close];
        if let Some(inner) = body.rfind("[[") {
            rest = &after[inner..];
            continue;
        }
        out.push(body);
        rest = &after[close + 2..];
    }
    out
}

/// Interlanguage links written inline as `[[xx:Title]]`.
#[cfg_attr(not(feature = "xml"), allow(dead_code))]
pub(crate) fn extract_interlanguage(text: &str) -> Vec<(String, String)> {
    link_bodies(text)
        .into_iter()
        .filter_map(|body| {
            let (prefix, title) = body.split_once(':')?;
            if body.contains('|') || !is_lang_code(prefix.trim()) {
                return None;
            }
            let title = normalize_title(title);
            (!title.is_empty()).then(|| (prefix.trim().to_string(), title))
        })
        .collect()
}

/// Article links in document order. Namespaced, interlanguage, leading-colon
/// and same-page section links are skipped; `#section` suffixes are dropped.
pub fn extract_links(text: &str) -> Vec<WikiLink> {
    link_bodies(text)
        .into_iter()
        .filter_map(|body| {
            let (raw_target, raw_anchor) = match body.split_once('|') {
                Some((t, a)) => (t, Some(a)),
                None => (body, None),
            };
            let raw_target = raw_target.trim();
            if raw_target.starts_with(':') {
                return None;
            }
            if let Some((prefix, _)) = raw_target.split_once(':') {
                let prefix = prefix.trim();
                if is_lang_code(prefix) || NAMESPACES.contains(&prefix.to_lowercase().as_str()) {
                    return None;
                }
            }
            let page = raw_target.split('#').next().unwrap_or_default();
            let target = normalize_title(page);
            if target.is_empty() {
                return None;
            }
            let anchor = match raw_anchor {
                Some(a) => canonical(a),
                None => canonical(raw_target),
            };
            if anchor.is_empty() {
                return None;
            }
            Some(WikiLink { target, anchor })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piped_and_plain_links() {
        let links = extract_links("Magaalaan [[Itoophiyaa|Itoophiyaatti]] fi [[Afrikaa]] keessa.");
        assert_eq!(
            links,
            vec![
                WikiLink {
                    target: "Itoophiyaa".into(),
                    anchor: "Itoophiyaatti".into()
                },
                WikiLink {
                    target: "Afrikaa".into(),
                    anchor: "Afrikaa".into()
                },
            ]
        );
    }

    #[test]
    fn skips_namespaces_and_language_links() {
        let text = "[[File:Map.png|thumb|a [[Itoophiyaa|map]]]] [[Category:Biyyoota]] [[en:Ethiopia]] [[:Category:X]]";
        let links = extract_links(text);
        assert_eq!(links.len(), 1);
        assert_eq!(links[0].target, "Itoophiyaa");
        assert_eq!(links[0].anchor, "map");
    }

    #[test]
    fn section_links_and_title_case() {
        let links = extract_links("[[finfinnee#Seenaa|Finfinnee]] [[#Local]] [[Chilika_hrada]]");
        assert_eq!(links[0].target, "Finfinnee");
        assert_eq!(links[1].target, "Chilika hrada");
        assert_eq!(links.len(), 2);
    }

    #[test]
    fn unterminated_link_is_ignored() {
        assert!(extract_links("broken [[Itoophiyaa").is_empty());
    }

    #[test]
    fn inline_interlanguage() {
        assert_eq!(
            extract_interlanguage("x [[en:Ethiopia]] [[am:ኢትዮጵያ]] [[Itoophiyaa]]"),
            vec![("en".into(), "Ethiopia".into()), ("am".into(), "ኢትዮጵያ".into())]
        );
    }

    #[test]
    fn lang_codes() {
        assert!(is_lang_code("om"));
        assert!(is_lang_code("zh-yue"));
        assert!(!is_lang_code("Category"));
        assert!(!is_lang_code("e"));
    }
}
