//! On-disk index: a TSV file with a version header, one section per
//! structure, and a SHA-256 trailer over every preceding byte.
//!
//! ```text
//! #prtm-v1
//! #titles <lang> <n>
//! <sl title>\t<en title>
//! #anchors <n>
//! <surface>\t<sl target>\t<count>
//! #prtm <n>
//! <mention>\t<entity>\t<count>
//! #sha256 <hex>
//! ```
//!
//! Probabilities are not stored; they are recomputed from counts, which
//! reproduces the in-memory table bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{AnchorStat, IndexError, PrTable, TitleMap};

pub const INDEX_HEADER: &str = "#prtm-v1";
const CHECKSUM_TAG: &str = "#sha256\t";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WikiIndex {
    pub titles: TitleMap,
    pub anchors: Vec<AnchorStat>,
    pub table: PrTable,
}

fn escape(field: &str) -> String {
    let mut out = String::with_capacity(field.len());
    for c in field.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(field: &str) -> Result<String, String> {
    let mut out = String::with_capacity(field.len());
    let mut chars = field.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            other => {
                return Err(format!(
                    "bad escape `\\{}`",
                    other.map(String::from).unwrap_or_default()
                ))
            }
        }
    }
    Ok(out)
}

/// Serialize an index. Anchors are sorted, so equal content in any input
/// order yields identical bytes.
pub fn encode_index(index: &WikiIndex) -> Vec<u8> {
    let mut body = String::new();
    body.push_str(INDEX_HEADER);
    body.push('\n');

    body.push_str(&format!(
        "#titles\t{}\t{}\n",
        escape(&index.titles.lang),
        index.titles.len()
    ));
    for (sl, en) in index.titles.pairs() {
        body.push_str(&format!("{}\t{}\n", escape(sl), escape(en)));
    }

    let mut anchors = index.anchors.clone();
    anchors.sort();
    body.push_str(&format!("#anchors\t{}\n", anchors.len()));
    for a in &anchors {
        body.push_str(&format!(
            "{}\t{}\t{}\n",
            escape(&a.surface),
            escape(&a.sl_target),
            a.count
        ));
    }

    let n_entries: usize = index.table.rows().map(|(_, r)| r.len()).sum();
    body.push_str(&format!("#prtm\t{n_entries}\n"));
    for (mention, row) in index.table.rows() {
        for entry in row {
            body.push_str(&format!(
                "{}\t{}\t{}\n",
                escape(mention),
                escape(&entry.entity),
                entry.count
            ));
        }
    }

    let digest = hex::encode(Sha256::digest(body.as_bytes()));
    body.push_str(CHECKSUM_TAG);
    body.push_str(&digest);
    body.push('\n');
    body.into_bytes()
}

pub fn decode_index(bytes: &[u8]) -> Result<WikiIndex, IndexError> {
    let header_end = bytes.iter().position(|&b| b == b'\n').unwrap_or(bytes.len());
    let header = String::from_utf8_lossy(&bytes[..header_end]);
    if header.starts_with("#prtm-") && header != INDEX_HEADER {
        return Err(IndexError::Version {
            expected: INDEX_HEADER.into(),
            found: header.into_owned(),
        });
    }

    let body_end = find_trailer(bytes).ok_or_else(|| IndexError::Checksum("missing checksum trailer".into()))?;
    let (body, trailer) = bytes.split_at(body_end);
    let stored = std::str::from_utf8(&trailer[CHECKSUM_TAG.len()..])
        .map_err(|_| IndexError::Checksum("trailer is not UTF-8".into()))?
        .trim_end_matches('\n');
    let actual = hex::encode(Sha256::digest(body));
    if stored != actual {
        return Err(IndexError::Checksum(format!("expected {stored}, computed {actual}")));
    }
    if header != INDEX_HEADER {
        return Err(IndexError::Version {
            expected: INDEX_HEADER.into(),
            found: header.into_owned(),
        });
    }

    let text = std::str::from_utf8(body).map_err(|e| IndexError::Corrupt {
        line: 0,
        message: e.to_string(),
    })?;
    parse_body(text)
}

/// Offset of the `#sha256` trailer line, which must be the final line.
fn find_trailer(bytes: &[u8]) -> Option<usize> {
    if !bytes.ends_with(b"\n") {
        return None;
    }
    let without_nl = &bytes[..bytes.len() - 1];
    let start = without_nl.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
    bytes[start..].starts_with(CHECKSUM_TAG.as_bytes()).then_some(start)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Titles,
    Anchors,
    Prtm,
}

fn parse_body(text: &str) -> Result<WikiIndex, IndexError> {
    let mut titles = TitleMap::default();
    let mut anchors = Vec::new();
    let mut counts: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    let mut section = Section::None;
    let mut expected: BTreeMap<&'static str, usize> = BTreeMap::new();

    for (idx, line) in text.lines().enumerate().skip(1) {
        let line_no = idx + 1;
        let corrupt = |message: String| IndexError::Corrupt { line: line_no, message };
        let fields: Vec<&str> = line.split('\t').collect();
        let count_field = |s: &str| s.parse::<usize>().map_err(|e| corrupt(format!("bad count `{s}`: {e}")));

        if line.starts_with('#') {
            match fields.as_slice() {
                ["#titles", lang, n] => {
                    titles.lang = unescape(lang).map_err(corrupt)?;
                    expected.insert("titles", count_field(n)?);
                    section = Section::Titles;
                }
                ["#anchors", n] => {
                    expected.insert("anchors", count_field(n)?);
                    section = Section::Anchors;
                }
                ["#prtm", n] => {
                    expected.insert("prtm", count_field(n)?);
                    section = Section::Prtm;
                }
                _ => return Err(corrupt(format!("unknown section line {line:?}"))),
            }
            continue;
        }

        let field = |i: usize| unescape(fields[i]).map_err(&corrupt);
        let entry_count = |s: &str| s.parse::<u64>().map_err(|e| corrupt(format!("bad count `{s}`: {e}")));
        match (section, fields.len()) {
            (Section::Titles, 2) => {
                titles.entries.insert(field(0)?, field(1)?);
            }
            (Section::Anchors, 3) => anchors.push(AnchorStat {
                surface: field(0)?,
                sl_target: field(1)?,
                count: entry_count(fields[2])?,
            }),
            (Section::Prtm, 3) => {
                counts
                    .entry(field(0)?)
                    .or_default()
                    .insert(field(1)?, entry_count(fields[2])?);
            }
            _ => return Err(corrupt(format!("unexpected line {line:?}"))),
        }
    }

    let n_prtm: usize = counts.values().map(BTreeMap::len).sum();
    for (name, got) in [("titles", titles.len()), ("anchors", anchors.len()), ("prtm", n_prtm)] {
        let want = expected.get(name).copied().unwrap_or(0);
        if want != got {
            return Err(IndexError::Corrupt {
                line: 0,
                message: format!("section {name}: header says {want} entries, found {got}"),
            });
        }
    }

    Ok(WikiIndex {
        titles,
        anchors,
        table: PrTable::from_counts(counts),
    })
}

pub fn save_index(index: &WikiIndex, path: impl AsRef<Path>) -> Result<(), IndexError> {
    fs::write(path, encode_index(index))?;
    Ok(())
}

pub fn load_index(path: impl AsRef<Path>) -> Result<WikiIndex, IndexError> {
    decode_index(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wiki::build_prtm;

    fn sample() -> WikiIndex {
        let mut titles = TitleMap::new("om");
        titles.entries.insert("A".into(), "EnA".into());
        titles.entries.insert("B".into(), "EnB".into());
        let anchors = vec![
            AnchorStat {
                surface: "Foo".into(),
                sl_target: "A".into(),
                count: 2,
            },
            AnchorStat {
                surface: "Foo".into(),
                sl_target: "B".into(),
                count: 1,
            },
            AnchorStat {
                surface: "Tab\there".into(),
                sl_target: "B".into(),
                count: 1,
            },
        ];
        let table = build_prtm(&anchors, &titles, &[]);
        WikiIndex { titles, anchors, table }
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("index.tsv");
        let index = sample();
        save_index(&index, &path).unwrap();
        assert_eq!(load_index(&path).unwrap(), index);
    }

    #[test]
    fn truncated_file_fails_checksum() {
        let bytes = encode_index(&sample());
        for cut in [0, 5, bytes.len() / 2, bytes.len() - 3] {
            assert!(
                matches!(decode_index(&bytes[..cut]), Err(IndexError::Checksum(_))),
                "cut at {cut}"
            );
        }
    }

    #[test]
    fn flipped_byte_fails_checksum() {
        let mut bytes = encode_index(&sample());
        let pos = bytes.iter().position(|&b| b == b'F').unwrap();
        bytes[pos] = b'G';
        assert!(matches!(decode_index(&bytes), Err(IndexError::Checksum(_))));
    }

    #[test]
    fn empty_index_round_trips() {
        let bytes = encode_index(&WikiIndex::default());
        let loaded = decode_index(&bytes).unwrap();
        assert!(loaded.table.is_empty());
        assert_eq!(loaded, WikiIndex::default());
    }

    #[test]
    fn other_version_is_reported() {
        let text = encode_index(&WikiIndex::default());
        let text = String::from_utf8(text).unwrap().replace("#prtm-v1", "#prtm-v9");
        assert!(matches!(decode_index(text.as_bytes()), Err(IndexError::Version { .. })));
    }

    #[test]
    fn anchor_order_does_not_change_bytes() {
        let mut reversed = sample();
        reversed.anchors.reverse();
        assert_eq!(encode_index(&sample()), encode_index(&reversed));
    }
}
