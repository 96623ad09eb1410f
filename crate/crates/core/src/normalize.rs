//! Language-configurable morphological normalization.
//!
//! Mentions are normalized before table lookup and before they are sent to a
//! search provider. Normalization is NFC composition, whitespace collapse and
//! then the language's [`RuleSet`], iterated until the surface stops changing.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

/// Upper bound on rule passes. Every strip shrinks the string, so only
/// replacement rules that feed each other can run into it.
const MAX_PASSES: usize = 64;

#[derive(Debug, Error)]
pub enum RulesError {
    #[error("rules file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("rules line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("rules line {line}: language `{lang}` already has a block")]
    DuplicateLanguage { line: usize, lang: String },
}

/// Normalization rules for one language.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSet {
    pub lang: String,
    pub strip_suffixes: Vec<String>,
    pub strip_prefixes: Vec<String>,
    pub replacements: Vec<(String, String)>,
}

impl RuleSet {
    pub fn empty(lang: impl Into<String>) -> Self {
        RuleSet {
            lang: lang.into(),
            ..Default::default()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.strip_suffixes.is_empty() && self.strip_prefixes.is_empty() && self.replacements.is_empty()
    }

    pub fn with_suffix(mut self, suffix: &str) -> Self {
        self.strip_suffixes.push(nfc(suffix));
        self
    }

    pub fn with_prefix(mut self, prefix: &str) -> Self {
        self.strip_prefixes.push(nfc(prefix));
        self
    }

    pub fn with_replacement(mut self, from: &str, to: &str) -> Self {
        self.replacements.push((nfc(from), nfc(to)));
        self
    }

    /// One pass: replacements in order, then the longest matching prefix and
    /// the longest matching suffix are stripped once each.
    fn apply_once(&self, surface: &str) -> String {
        let mut out = surface.to_string();
        for (from, to) in &self.replacements {
            if !from.is_empty() {
                out = out.replace(from.as_str(), to);
            }
        }
        if let Some(prefix) = longest_match(&self.strip_prefixes, |p| out.starts_with(p)) {
            out = out[prefix.len()..].to_string();
        }
        if let Some(suffix) = longest_match(&self.strip_suffixes, |s| out.ends_with(s)) {
            out.truncate(out.len() - suffix.len());
        }
        collapse_whitespace(&nfc(&out))
    }
}

fn longest_match(candidates: &[String], hit: impl Fn(&str) -> bool) -> Option<&str> {
    candidates
        .iter()
        .filter(|c| !c.is_empty() && hit(c))
        .max_by_key(|c| c.len())
        .map(String::as_str)
}

fn nfc(s: &str) -> String {
    s.nfc().collect()
}

pub fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// NFC plus whitespace collapse, no language rules.
pub fn canonical(surface: &str) -> String {
    collapse_whitespace(&nfc(surface))
}

/// Normalize a mention surface under `rules`.
///
/// Rules are applied to a fixed point so the result is stable under a second
/// application. When the rules would consume the whole surface, the pre-rule
/// canonical form is returned instead.
pub fn normalize(surface: &str, rules: &RuleSet) -> String {
    let base = canonical(surface);
    if rules.is_empty() {
        return base;
    }
    let mut current = base.clone();
    for _ in 0..MAX_PASSES {
        let next = rules.apply_once(&current);
        if next.is_empty() {
            return base;
        }
        if next == current {
            return current;
        }
        if next.len() > 4 * base.len() + 64 {
            log::warn!("normalization of {surface:?} keeps growing; rules are not convergent");
            return current;
        }
        current = next;
    }
    log::warn!("normalization of {surface:?} did not settle after {MAX_PASSES} passes");
    current
}

/// Parse a rules file. See [`parse_rules`] for the format.
pub fn load_rules(path: impl AsRef<Path>) -> Result<BTreeMap<String, RuleSet>, RulesError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| RulesError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_rules(&text)
}

/// Rules text: `suffix <lang> <s>`, `prefix <lang> <s>`, `replace <lang> <from> <to>`,
/// optional `lang <lang>` block headers, `#` comments.
///
/// Lines for one language form a single contiguous block; a language that
/// reappears after another language's block is rejected.
pub fn parse_rules(text: &str) -> Result<BTreeMap<String, RuleSet>, RulesError> {
    let mut rules: BTreeMap<String, RuleSet> = BTreeMap::new();
    let mut open: Option<String> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse_err = |message: &str| RulesError::Parse {
            line: line_no,
            message: message.to_string(),
        };
        let (kind, lang) = match fields.as_slice() {
            [kind, lang, ..] => (*kind, *lang),
            _ => return Err(parse_err("expected `<kind> <lang> ...`")),
        };

        let header = kind == "lang";
        if open.as_deref() != Some(lang) || header {
            if rules.contains_key(lang) {
                return Err(RulesError::DuplicateLanguage {
                    line: line_no,
                    lang: lang.to_string(),
                });
            }
            rules.insert(lang.to_string(), RuleSet::empty(lang));
            open = Some(lang.to_string());
        }
        let set = rules.get_mut(lang).expect("block opened above");

        match (kind, &fields[2..]) {
            ("lang", []) => {}
            ("suffix", [s]) => set.strip_suffixes.push(nfc(s)),
            ("prefix", [p]) => set.strip_prefixes.push(nfc(p)),
            ("replace", [from, to]) if to.contains(from) => {
                return Err(parse_err("replacement output contains its own pattern"))
            }
            ("replace", [from, to]) => set.replacements.push((nfc(from), nfc(to))),
            ("replace", [from]) => set.replacements.push((nfc(from), String::new())),
            ("lang" | "suffix" | "prefix" | "replace", _) => {
                return Err(parse_err(&format!("wrong number of fields for `{kind}`")))
            }
            _ => return Err(parse_err(&format!("unknown rule kind `{kind}`"))),
        }
    }
    Ok(rules)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oromo() -> RuleSet {
        RuleSet::empty("om").with_suffix("tti")
    }

    #[test]
    fn strips_configured_suffix() {
        assert_eq!(normalize("Itoophiyaatti", &oromo()), "Itoophiyaa");
    }

    #[test]
    fn identity_under_empty_rules() {
        assert_eq!(normalize("Ethiopia", &RuleSet::empty("en")), "Ethiopia");
    }

    #[test]
    fn collapses_whitespace() {
        assert_eq!(normalize("  Chilika   Lake ", &RuleSet::empty("or")), "Chilika Lake");
    }

    #[test]
    fn longest_suffix_wins() {
        let rules = RuleSet::empty("om").with_suffix("i").with_suffix("tti");
        assert_eq!(normalize("Finfinneetti", &rules), "Finfinnee");
    }

    #[test]
    fn never_empties_a_surface() {
        let rules = RuleSet::empty("om").with_suffix("tti");
        assert_eq!(normalize("tti", &rules), "tti");
        assert_eq!(normalize("ttitti", &rules), "ttitti");
    }

    #[test]
    fn composes_decomposed_input() {
        // e + combining acute
        assert_eq!(normalize("Caf\u{65}\u{301}", &RuleSet::empty("fr")), "Caf\u{e9}");
    }

    #[test]
    fn prefix_and_replacement() {
        let rules = RuleSet::empty("so").with_prefix("al-").with_replacement("aa", "a");
        assert_eq!(normalize("al-Soomaal", &rules), "Soomal");
    }

    #[test]
    fn parses_single_suffix_line() {
        let rules = parse_rules("suffix om tti\n").unwrap();
        assert_eq!(rules.len(), 1);
        assert_eq!(rules["om"], RuleSet::empty("om").with_suffix("tti"));
    }

    #[test]
    fn empty_file_is_empty_map() {
        assert!(parse_rules("").unwrap().is_empty());
        assert!(parse_rules("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn duplicate_language_block_is_rejected() {
        let text = "suffix om tti\nsuffix so ka\nsuffix om f\n";
        match parse_rules(text) {
            Err(RulesError::DuplicateLanguage { line, lang }) => {
                assert_eq!(line, 3);
                assert_eq!(lang, "om");
            }
            other => panic!("expected duplicate error, got {other:?}"),
        }
        assert!(matches!(
            parse_rules("lang om\nlang om\n"),
            Err(RulesError::DuplicateLanguage { line: 2, .. })
        ));
    }

    #[test]
    fn bad_lines_name_their_number() {
        assert!(matches!(
            parse_rules("# c\nsuffix om\n"),
            Err(RulesError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_rules("strip om x\n"),
            Err(RulesError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn self_feeding_replacement_is_rejected() {
        assert!(matches!(
            parse_rules("replace om a aa\n"),
            Err(RulesError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn contiguous_block_accumulates() {
        let rules = parse_rules("lang om\nsuffix om tti\nprefix om ha\nreplace om x y\n").unwrap();
        let om = &rules["om"];
        assert_eq!(om.strip_suffixes, vec!["tti"]);
        assert_eq!(om.strip_prefixes, vec!["ha"]);
        assert_eq!(om.replacements, vec![("x".into(), "y".into())]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rule_set() -> impl Strategy<Value = RuleSet> {
            (
                prop::collection::vec("[a-c]{1,3}", 0..3),
                prop::collection::vec("[a-c]{1,3}", 0..3),
                // shrinking replacements only; growing ones need not converge
                prop::collection::vec(("[a-c]{2}", "[a-c]{0,1}"), 0..2),
            )
                .prop_map(|(suffixes, prefixes, reps)| {
                    let mut r = RuleSet::empty("xx");
                    for s in suffixes {
                        r = r.with_suffix(&s);
                    }
                    for p in prefixes {
                        r = r.with_prefix(&p);
                    }
                    for (f, t) in reps {
                        r = r.with_replacement(&f, &t);
                    }
                    r
                })
        }

        proptest! {
            #[test]
            fn idempotent(s in "[a-c ]{1,12}", rules in rule_set()) {
                prop_assume!(!s.trim().is_empty());
                let once = normalize(&s, &rules);
                prop_assert_eq!(normalize(&once, &rules), once);
            }

            #[test]
            fn never_empty(s in "\\PC{1,12}", rules in rule_set()) {
                prop_assume!(!s.trim().is_empty());
                prop_assert!(!normalize(&s, &rules).is_empty());
            }
        }
    }
}
