use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{coverage_ratio, EvalError, LinkResult, Tally};
use crate::dataset::EntityType;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_mentions: usize,
    pub n_linkable: usize,
    pub gold_candidate_recall: f64,
    /// Requested cut-offs plus the longest candidate list length.
    pub recall_at: BTreeMap<usize, f64>,
    pub linking_accuracy: f64,
    pub mention_token_coverage: Option<f64>,
    pub coverage_ratio: Option<f64>,
    pub per_type_accuracy: BTreeMap<EntityType, f64>,
    /// Linkable mentions per type, the weights behind `per_type_accuracy`.
    pub per_type_count: BTreeMap<EntityType, usize>,
}

impl EvalReport {
    pub fn from_tally(tally: &Tally, recall_ks: &[usize], coverage: Option<f64>) -> Result<Self, EvalError> {
        let recall = tally.recall()?;
        let mut recall_at = BTreeMap::new();
        for &k in recall_ks.iter().chain([&tally.longest_list.max(1)]) {
            recall_at.insert(k, tally.recall_at(k)?);
        }
        let coverage_ratio = match coverage {
            Some(c) => Some(coverage_ratio(recall, c)?),
            None => None,
        };
        Ok(EvalReport {
            n_mentions: tally.total,
            n_linkable: tally.linkable,
            gold_candidate_recall: recall,
            recall_at,
            linking_accuracy: tally.accuracy()?,
            mention_token_coverage: coverage,
            coverage_ratio,
            per_type_accuracy: tally.per_type_accuracy(),
            per_type_count: tally.per_type.iter().map(|(t, (l, _))| (*t, *l)).collect(),
        })
    }

    pub fn compute(results: &[LinkResult], recall_ks: &[usize], coverage: Option<f64>) -> Result<Self, EvalError> {
        Self::from_tally(&Tally::of(results), recall_ks, coverage)
    }
}

fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

/// Aligned text table, one row per labelled report: `Accu`, one `Rec@k`
/// column per requested cut-off, and `Rec@n` (uncut recall). With
/// `per_type`, a second block has one accuracy row per entity type.
pub fn render_table(rows: &[(String, &EvalReport)], recall_ks: &[usize], per_type: bool) -> String {
    let mut header: Vec<String> = vec!["Method".into(), "Accu".into()];
    header.extend(recall_ks.iter().map(|k| format!("Rec@{k}")));
    header.push("Rec@n".into());
    let any_coverage = rows.iter().any(|(_, r)| r.mention_token_coverage.is_some());
    if any_coverage {
        header.push("Cover".into());
        header.push("Ratio".into());
    }

    let mut table: Vec<Vec<String>> = vec![header];
    for (label, r) in rows {
        let mut line = vec![label.clone(), pct(r.linking_accuracy)];
        line.extend(
            recall_ks
                .iter()
                .map(|k| r.recall_at.get(k).map_or("-".into(), |v| pct(*v))),
        );
        line.push(pct(r.gold_candidate_recall));
        if any_coverage {
            line.push(r.mention_token_coverage.map_or("-".into(), pct));
            line.push(r.coverage_ratio.map_or("-".into(), |v| format!("{v:.3}")));
        }
        table.push(line);
    }
    let mut out = align(&table);

    if per_type {
        let mut block: Vec<Vec<String>> = vec![std::iter::once("Type".to_string())
            .chain(rows.iter().map(|(label, _)| label.clone()))
            .collect()];
        for ty in EntityType::ALL {
            let mut line = vec![ty.as_str().to_string()];
            line.extend(
                rows.iter()
                    .map(|(_, r)| r.per_type_accuracy.get(&ty).map_or("-".into(), |v| pct(*v))),
            );
            block.push(line);
        }
        out.push('\n');
        out.push_str(&align(&block));
    }
    out
}

fn align(table: &[Vec<String>]) -> String {
    let cols = table.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            table
                .iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in table {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            let pad = widths[c] - cell.chars().count();
            if c == 0 {
                let _ = write!(line, "{cell}{}", " ".repeat(pad));
            } else {
                let _ = write!(line, "  {}{cell}", " ".repeat(pad));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::tests::result;
    use EntityType::*;

    fn sample() -> Vec<LinkResult> {
        vec![
            result(Gpe, Some("A"), &["A", "B"], Some("A")),
            result(Gpe, Some("C"), &["B", "C"], Some("B")),
            result(Loc, Some("L"), &["X"], Some("X")),
            result(Per, None, &["P"], Some("P")),
        ]
    }

    #[test]
    fn report_fields() {
        let report = EvalReport::compute(&sample(), &[1, 5], Some(0.75)).unwrap();
        assert_eq!(report.n_mentions, 4);
        assert_eq!(report.n_linkable, 3);
        assert!((report.gold_candidate_recall - 2.0 / 3.0).abs() < 1e-15);
        assert!((report.linking_accuracy - 1.0 / 3.0).abs() < 1e-15);
        assert!((report.recall_at[&1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(report.recall_at[&2], report.gold_candidate_recall);
        assert_eq!(report.per_type_accuracy, BTreeMap::from([(Gpe, 0.5), (Loc, 0.0)]));
        assert!((report.coverage_ratio.unwrap() - (2.0 / 3.0) / 0.75).abs() < 1e-12);
    }

    #[test]
    fn table_layout() {
        let report = EvalReport::compute(&sample(), &[5], None).unwrap();
        let text = render_table(&[("fixture".to_string(), &report)], &[5], true);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0].split_whitespace().collect::<Vec<_>>(),
            vec!["Method", "Accu", "Rec@5", "Rec@n"]
        );
        assert_eq!(
            lines[1].split_whitespace().collect::<Vec<_>>(),
            vec!["fixture", "33.33", "66.67", "66.67"]
        );
        let rows: Vec<Vec<&str>> = lines[3..].iter().map(|l| l.split_whitespace().collect()).collect();
        assert_eq!(rows[0], ["Type", "fixture"]);
        assert_eq!(rows[1], ["GPE", "50.00"]);
        assert_eq!(rows[2], ["LOC", "0.00"]);
        assert_eq!(rows[3], ["PER", "-"]);
        assert_eq!(rows[4], ["ORG", "-"]);
    }
}
