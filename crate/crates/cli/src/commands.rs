use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::Path;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use xel_core::dataset::{load_dataset, MentionRecord};
use xel_core::eval::{
    align_with_gold, gold_candidate_recall, mention_token_coverage, read_results, render_table, write_results,
    EvalReport, LinkResult, Tally,
};
use xel_core::normalize::RuleSet;
use xel_core::wiki::{
    build_prtm, build_title_map_with_stats, collect_anchors, load_index, parse_dump, save_index, Page, WikiIndex,
};

use crate::config::{RunConfig, RunFlags};
use crate::exit::{existing, usage};
use crate::pipeline::{ablation_rows, rules_for, Resources};

#[derive(Debug, Parser)]
#[command(name = "xel", version, about = "Cross-lingual entity linking into English Wikipedia")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: RunFlags,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the title map and mention table from a dump (--dump, --lang, --out).
    BuildIndex,
    /// Generate and rank candidates for a dataset (--index, --dataset).
    Link,
    /// Score link results against gold (--results, --dataset).
    Evaluate,
    /// Mention token coverage of a dataset (--index, --dataset, optional --results).
    Coverage,
    /// Run the ablation rows over a dataset (--index, --dataset).
    Ablate(AblateArgs),
    /// Print the effective configuration as TOML.
    Config,
}

#[derive(Debug, Clone, Default, Args)]
pub struct AblateArgs {
    /// Add a row with pivoting enabled.
    #[arg(long)]
    pub with_pivot: bool,
    /// Add the word-by-word translation baseline row.
    #[arg(long)]
    pub translation: bool,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let run = cli.flags.resolve()?;
    match cli.command {
        Command::BuildIndex => build_index(&run),
        Command::Link => link(&run),
        Command::Evaluate => evaluate(&run),
        Command::Coverage => coverage(&run),
        Command::Ablate(args) => ablate(&run, &args),
        Command::Config => {
            let cfg = run.gen_config()?;
            print!("{}", run.with_gen_config(&cfg).to_toml());
            Ok(())
        }
    }
}

/// Write to `--out`, or stdout when it is absent.
fn emit(out: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn dataset(run: &RunConfig) -> anyhow::Result<Vec<MentionRecord>> {
    let path = existing(run.dataset.as_deref(), "--dataset")?;
    load_dataset(path).with_context(|| format!("loading dataset {}", path.display()))
}

fn read_pages(path: &Path, lang: &str, xml: bool) -> anyhow::Result<Vec<Page>> {
    let reader = BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?);
    if xml {
        read_xml(reader, lang)
    } else {
        Ok(parse_dump(reader, lang)?)
    }
}

#[cfg(feature = "xml")]
fn read_xml(reader: BufReader<File>, lang: &str) -> anyhow::Result<Vec<Page>> {
    Ok(xel_core::wiki::parse_xml_dump(reader, lang)?)
}

#[cfg(not(feature = "xml"))]
fn read_xml(_: BufReader<File>, _: &str) -> anyhow::Result<Vec<Page>> {
    Err(usage("--xml needs a build with the `xml` feature"))
}

fn build_index(run: &RunConfig) -> anyhow::Result<()> {
    let dump = existing(run.dump.as_deref(), "--dump")?;
    let lang = run.lang.as_deref().ok_or_else(|| usage("--lang is required"))?;
    let out = run.out.as_deref().ok_or_else(|| usage("--out is required"))?;
    let rules = rules_for(run.rules.as_deref(), lang)?;

    let pages =
        read_pages(dump, lang, run.xml.unwrap_or(false)).with_context(|| format!("parsing dump {}", dump.display()))?;
    let (titles, stats) = build_title_map_with_stats(&pages)?;
    if stats.chains_dropped > 0 {
        log::warn!(
            "{} redirect chains longer than one hop were dropped",
            stats.chains_dropped
        );
    }
    let anchors = collect_anchors(&pages, &rules);
    let table = build_prtm(&anchors, &titles, &pages);
    let index = WikiIndex { titles, anchors, table };
    save_index(&index, out).with_context(|| format!("writing index {}", out.display()))?;

    println!("pages: {}", pages.len());
    println!("title-map entries: {}", index.titles.len());
    println!("prtm rows: {}", index.table.len());
    Ok(())
}

fn results_bytes(results: &[LinkResult]) -> anyhow::Result<Vec<u8>> {
    let mut out = Vec::new();
    for r in results {
        serde_json::to_writer(&mut out, r)?;
        out.push(b'\n');
    }
    Ok(out)
}

fn link(run: &RunConfig) -> anyhow::Result<()> {
    let cfg = run.gen_config()?;
    let mentions = dataset(run)?;
    let resources = Resources::open(run)?;
    let results = resources.link_all(&cfg, &mentions)?;
    match run.out.as_deref() {
        Some(path) => write_results(path, &results).with_context(|| format!("writing {}", path.display())),
        None => emit(None, &results_bytes(&results)?),
    }
}

fn tally(results: &[LinkResult]) -> Tally {
    results
        .par_chunks(256)
        .map(Tally::of)
        .reduce(Tally::default, Tally::merge)
}

fn aligned_results(run: &RunConfig, gold: &[MentionRecord]) -> anyhow::Result<Vec<LinkResult>> {
    let path = existing(run.results.as_deref(), "--results")?;
    let mut results = read_results(path).with_context(|| format!("reading results {}", path.display()))?;
    align_with_gold(&mut results, gold).context("results do not match the dataset")?;
    Ok(results)
}

fn evaluate(run: &RunConfig) -> anyhow::Result<()> {
    let ks = run.recall_ks()?;
    let gold = dataset(run)?;
    let results = aligned_results(run, &gold)?;
    let report = EvalReport::from_tally(&tally(&results), &ks, None)?;
    print!(
        "{}",
        render_table(&[("results".to_string(), &report)], &ks, run.per_type.unwrap_or(false))
    );
    if let Some(out) = run.out.as_deref() {
        let json = serde_json::to_string_pretty(&report)? + "\n";
        emit(Some(out), json.as_bytes())?;
    }
    Ok(())
}

fn coverage_inputs(run: &RunConfig) -> anyhow::Result<(WikiIndex, RuleSet)> {
    let path = existing(run.index.as_deref(), "--index")?;
    let index = load_index(path).with_context(|| format!("loading index {}", path.display()))?;
    let rules = rules_for(run.rules.as_deref(), &index.titles.lang)?;
    Ok((index, rules))
}

fn coverage(run: &RunConfig) -> anyhow::Result<()> {
    let mentions = dataset(run)?;
    let (index, rules) = coverage_inputs(run)?;
    let cov = mention_token_coverage(&mentions, &index.titles, &index.anchors, &rules)?;
    println!("coverage: {cov}");
    if run.results.is_some() {
        let results = aligned_results(run, &mentions)?;
        let recall = gold_candidate_recall(&results)?;
        println!("recall: {recall}");
        println!("ratio: {}", xel_core::eval::coverage_ratio(recall, cov)?);
    }
    Ok(())
}

fn ablate(run: &RunConfig, args: &AblateArgs) -> anyhow::Result<()> {
    let base = run.gen_config()?;
    let ks = run.recall_ks()?;
    let mentions = dataset(run)?;
    let resources = Resources::open(run)?;
    let coverage = mention_token_coverage(
        &mentions,
        &resources.index.titles,
        &resources.index.anchors,
        &resources.rules,
    )
    .ok()
    .filter(|c| *c > 0.0);

    let mut reports: Vec<(String, EvalReport)> = Vec::new();
    if args.translation {
        let table = resources.translation_table();
        let results = resources.translate_all(&table, &mentions)?;
        reports.push((
            "Translation".to_string(),
            EvalReport::from_tally(&tally(&results), &ks, coverage)?,
        ));
    }
    for (label, cfg) in ablation_rows(&base, args.with_pivot) {
        let results = resources
            .link_all(&cfg, &mentions)
            .with_context(|| format!("ablation row `{label}`"))?;
        let report = EvalReport::from_tally(&tally(&results), &ks, coverage)?;
        reports.push((label, report));
    }

    let rows: Vec<(String, &EvalReport)> = reports.iter().map(|(l, r)| (l.clone(), r)).collect();
    print!("{}", render_table(&rows, &ks, run.per_type.unwrap_or(false)));
    if let Some(out) = run.out.as_deref() {
        let json: Vec<serde_json::Value> = reports
            .iter()
            .map(|(label, r)| serde_json::json!({ "method": label, "report": r }))
            .collect();
        emit(Some(out), (serde_json::to_string_pretty(&json)? + "\n").as_bytes())?;
    }
    Ok(())
}
