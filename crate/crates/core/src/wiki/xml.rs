//! MediaWiki XML export front-end producing the same [`Page`] values as the
//! TinyDump reader. Interlanguage links are read from inline `[[xx:Title]]`
//! links; redirects from the `<redirect title=".."/>` element or a leading
//! `#REDIRECT [[...]]`.

use std::collections::HashSet;
use std::io::BufRead;

use quick_xml::events::Event;
use quick_xml::Reader;

use super::links::{extract_interlanguage, extract_links};
use super::{IndexError, Page};

#[derive(Default)]
struct Partial {
    title: String,
    ns: String,
    redirect: Option<String>,
    text: String,
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Other,
    Title,
    Ns,
    Text,
}

fn xml_err(e: impl std::fmt::Display) -> IndexError {
    IndexError::Xml(e.to_string())
}

/// Parse main-namespace pages from a MediaWiki XML export.
pub fn parse_xml_dump<R: BufRead>(stream: R, lang: &str) -> Result<Vec<Page>, IndexError> {
    let mut reader = Reader::from_reader(stream);
    let mut buf = Vec::new();
    let mut pages = Vec::new();
    let mut seen = HashSet::new();
    let mut current: Option<Partial> = None;
    let mut field = Field::Other;

    loop {
        match reader.read_event_into(&mut buf).map_err(xml_err)? {
            Event::Start(e) => match e.name().as_ref() {
                b"page" => current = Some(Partial::default()),
                b"title" => field = Field::Title,
                b"ns" => field = Field::Ns,
                b"text" => field = Field::Text,
                _ => field = Field::Other,
            },
            Event::Empty(e) if e.name().as_ref() == b"redirect" => {
                if let Some(page) = current.as_mut() {
                    for attr in e.attributes() {
                        let attr = attr.map_err(xml_err)?;
                        if attr.key.as_ref() == b"title" {
                            page.redirect = Some(attr.unescape_value().map_err(xml_err)?.into_owned());
                        }
                    }
                }
            }
            Event::Text(t) => {
                if let Some(page) = current.as_mut() {
                    let text = t.unescape().map_err(xml_err)?;
                    match field {
                        Field::Title => page.title.push_str(&text),
                        Field::Ns => page.ns.push_str(&text),
                        Field::Text => page.text.push_str(&text),
                        Field::Other => {}
                    }
                }
            }
            Event::CData(t) => {
                if let (Some(page), Field::Text) = (current.as_mut(), field) {
                    page.text.push_str(&String::from_utf8_lossy(&t));
                }
            }
            Event::End(e) => {
                field = Field::Other;
                if e.name().as_ref() == b"page" {
                    if let Some(partial) = current.take() {
                        if let Some(page) = finish(partial, lang) {
                            if !seen.insert(page.title.clone()) {
                                return Err(IndexError::DuplicateTitle {
                                    lang: lang.to_string(),
                                    title: page.title,
                                    line: None,
                                });
                            }
                            pages.push(page);
                        }
                    }
                }
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    Ok(pages)
}

fn finish(partial: Partial, lang: &str) -> Option<Page> {
    if !(partial.ns.is_empty() || partial.ns.trim() == "0") {
        return None;
    }
    let mut page = Page::new(lang, &partial.title);
    if page.title.is_empty() {
        return None;
    }
    let redirect = partial.redirect.or_else(|| {
        let head = partial.text.trim_start();
        head.get(..9)
            .filter(|h| h.eq_ignore_ascii_case("#redirect"))
            .and_then(|_| extract_links(head).into_iter().next())
            .map(|l| l.target)
    });
    page.redirect_target = redirect.map(|r| super::normalize_title(&r));
    for (code, title) in extract_interlanguage(&partial.text) {
        if code != lang {
            page.interlang_targets.entry(code).or_insert(title);
        }
    }
    page.wikitext = partial.text;
    Some(page)
}
