//! TinyDump: the line-oriented dump format.
//!
//! ```text
//! page\t<lang>\t<title>
//! ill\t<lang>=<title>
//! redirect\t<title>
//! text\t<wikitext>
//! ```
//!
//! `ill`, `redirect` and `text` lines attach to the most recent `page`.
//! Repeated `text` lines are joined with newlines. Blank lines and lines
//! starting with `#` are ignored.

use std::collections::HashSet;
use std::io::BufRead;

use super::links::normalize_title;
use super::{IndexError, Page};

/// Parse a TinyDump stream, keeping pages in language `lang`.
pub fn parse_dump<R: BufRead>(stream: R, lang: &str) -> Result<Vec<Page>, IndexError> {
    Ok(parse_dump_all(stream)?.into_iter().filter(|p| p.lang == lang).collect())
}

/// Parse every page of a TinyDump stream regardless of language.
pub fn parse_dump_all<R: BufRead>(stream: R) -> Result<Vec<Page>, IndexError> {
    let mut pages: Vec<Page> = Vec::new();
    let mut seen: HashSet<(String, String)> = HashSet::new();

    for (idx, line) in stream.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = |message: String| IndexError::Malformed { line: line_no, message };
        let (tag, rest) = line
            .split_once('\t')
            .ok_or_else(|| malformed(format!("expected `<tag>\\t...`, got {line:?}")))?;

        if tag == "page" {
            let (lang, title) = rest
                .split_once('\t')
                .ok_or_else(|| malformed("page line needs `<lang>\\t<title>`".into()))?;
            let page = Page::new(lang.trim(), title);
            if page.lang.is_empty() || page.title.is_empty() {
                return Err(malformed("page line has an empty language or title".into()));
            }
            if !seen.insert((page.lang.clone(), page.title.clone())) {
                return Err(IndexError::DuplicateTitle {
                    lang: page.lang,
                    title: page.title,
                    line: Some(line_no),
                });
            }
            pages.push(page);
            continue;
        }

        let page = pages
            .last_mut()
            .ok_or_else(|| malformed(format!("`{tag}` line before any page")))?;
        match tag {
            "ill" => {
                let (lang, title) = rest
                    .split_once('=')
                    .ok_or_else(|| malformed("ill line needs `<lang>=<title>`".into()))?;
                let (lang, title) = (lang.trim(), normalize_title(title));
                if lang.is_empty() || title.is_empty() {
                    return Err(malformed("ill line has an empty language or title".into()));
                }
                page.interlang_targets.insert(lang.to_string(), title);
            }
            "redirect" => {
                let target = normalize_title(rest);
                if target.is_empty() {
                    return Err(malformed("redirect line has an empty target".into()));
                }
                page.redirect_target = Some(target);
            }
            "text" => {
                if !page.wikitext.is_empty() {
                    page.wikitext.push('\n');
                }
                page.wikitext.push_str(rest);
            }
            other => return Err(malformed(format!("unknown tag `{other}`"))),
        }
    }
    Ok(pages)
}
