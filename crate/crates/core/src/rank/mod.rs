//! Zero-shot candidate ranking.
//!
//! Each candidate scores `w = w_source * w_context`, where `w_source` is the
//! number of generators that proposed it and `w_context` is the cosine
//! between the mention's context embedding and the candidate's mean
//! embedding over its summary sentences. The highest score wins; exact ties
//! fall back to source priority, then best search rank, then title.

mod embed;
pub mod external;
mod sentence;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::MentionRecord;
use crate::search::Candidate;

pub use embed::{context_sentences, embed_candidate, BuiltinEmbedder, EmbedError, Embedder, BUILTIN_DIM};
pub use external::{ExternalEmbedder, Health};
pub use sentence::{mention_sentence, split_sentences, DEFAULT_DELIMITERS};

#[derive(Debug, Error)]
pub enum RankError {
    #[error("no candidates")]
    NoCandidates,
    #[error("vector dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

/// How the cosine enters the score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContextMode {
    /// Cosine as is, in [-1, 1].
    #[default]
    Raw,
    /// `(1 + cos) / 2`, in [0, 1].
    Shifted,
}

impl FromStr for ContextMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "raw" => Ok(ContextMode::Raw),
            "shifted" => Ok(ContextMode::Shifted),
            other => Err(format!("unknown context mode `{other}` (raw, shifted)")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextBundle {
    pub mention_sentence: String,
    /// English title to summary sentences.
    pub candidate_summaries: BTreeMap<String, Vec<String>>,
}

impl ContextBundle {
    /// Context for `mention`: the sentence holding the surface, plus the
    /// summaries of every candidate that has one.
    pub fn for_mention(
        mention: &MentionRecord,
        candidates: &[Candidate],
        summaries: &BTreeMap<String, Vec<String>>,
        delimiters: &[char],
    ) -> Self {
        ContextBundle {
            mention_sentence: mention_sentence(&mention.sentence, &mention.surface, delimiters),
            candidate_summaries: candidates
                .iter()
                .filter_map(|c| summaries.get(&c.entity).map(|s| (c.entity.clone(), s.clone())))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCandidate {
    pub candidate: Candidate,
    pub w_source: u32,
    pub w_context: f64,
    pub w: f64,
}

impl ScoredCandidate {
    pub fn new(candidate: Candidate, w_context: f64) -> Self {
        let w_source = multiplicity_weight(&candidate);
        ScoredCandidate {
            w: f64::from(w_source) * w_context,
            candidate,
            w_source,
            w_context,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub selected: String,
    pub scored: Vec<ScoredCandidate>,
}

pub fn multiplicity_weight(c: &Candidate) -> u32 {
    c.sources.len() as u32
}

/// Cosine similarity; zero when either side is the zero vector.
pub fn context_score(v_m: &[f64], v_c: &[f64]) -> Result<f64, RankError> {
    if v_m.len() != v_c.len() {
        return Err(RankError::DimensionMismatch(v_m.len(), v_c.len()));
    }
    let dot: f64 = v_m.iter().zip(v_c).map(|(a, b)| a * b).sum();
    let nm = v_m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nc = v_c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nm == 0.0 || nc == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (nm * nc)).clamp(-1.0, 1.0))
}

/// Ranking order: score descending, then source priority, then best search
/// rank (unranked last), then entity title. Total over distinct entities.
pub fn compare_scored(a: &ScoredCandidate, b: &ScoredCandidate) -> Ordering {
    b.w.total_cmp(&a.w)
        .then_with(|| a.candidate.top_source().cmp(&b.candidate.top_source()))
        .then_with(|| match (a.candidate.best_rank, b.candidate.best_rank) {
            (Some(x), Some(y)) => x.cmp(&y),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        })
        .then_with(|| a.candidate.entity.cmp(&b.candidate.entity))
}

pub fn sort_scored(scored: &mut [ScoredCandidate]) {
    scored.sort_by(compare_scored);
}

/// Score every candidate against the mention context and pick the best.
pub fn rank_and_select(
    cands: &[Candidate],
    mention: &MentionRecord,
    ctx: &ContextBundle,
    embedder: &dyn Embedder,
    mode: ContextMode,
) -> Result<Ranking, RankError> {
    if cands.is_empty() {
        return Err(RankError::NoCandidates);
    }
    let v_m = embed::checked(embedder, &mention.surface, &ctx.mention_sentence)?;
    let score = |c: &Candidate| -> Result<ScoredCandidate, RankError> {
        let summary = ctx.candidate_summaries.get(&c.entity).map(Vec::as_slice).unwrap_or(&[]);
        let v_c = embed_candidate(embedder, &c.entity, summary)?;
        let cos = context_score(&v_m, &v_c)?;
        let w_context = match mode {
            ContextMode::Raw => cos,
            ContextMode::Shifted => (1.0 + cos) / 2.0,
        };
        Ok(ScoredCandidate::new(c.clone(), w_context))
    };
    let mut scored: Vec<ScoredCandidate> = if embedder.single_flight() {
        cands.iter().map(score).collect::<Result<_, _>>()?
    } else {
        cands.par_iter().map(score).collect::<Result<_, _>>()?
    };
    sort_scored(&mut scored);
    Ok(Ranking {
        selected: scored[0].candidate.entity.clone(),
        scored,
    })
}
