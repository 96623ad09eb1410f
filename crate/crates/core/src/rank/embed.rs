use std::hash::Hasher;

use fnv::FnvHasher;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("embedder unavailable: {0}")]
    Unavailable(String),
    #[error("embedder protocol error: {0}")]
    Protocol(String),
    #[error("embedder returned {got} dimensions, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("embedder returned a non-finite value")]
    NonFinite,
}

/// Contextual embedding of a unit (mention or entity) within a sentence.
///
/// Implementations are deterministic for fixed inputs and return vectors of
/// a constant dimension.
pub trait Embedder: Send + Sync {
    fn dim(&self) -> usize;

    fn embed(&self, unit: &str, sentence: &str) -> Result<Vec<f64>, EmbedError>;

    /// When true the ranker never calls `embed` concurrently.
    fn single_flight(&self) -> bool {
        false
    }
}

impl<E: Embedder + ?Sized> Embedder for &E {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn embed(&self, unit: &str, sentence: &str) -> Result<Vec<f64>, EmbedError> {
        (**self).embed(unit, sentence)
    }

    fn single_flight(&self) -> bool {
        (**self).single_flight()
    }
}

pub const BUILTIN_DIM: usize = 256;
const BUILTIN_SEED: u64 = 0x5eed_c0de_2024_0001;
const JOINER: char = '‖';

/// Hashed bag of character trigrams over `unit ‖ sentence`, L2-normalized.
#[derive(Debug, Clone, Copy, Default)]
pub struct BuiltinEmbedder;

impl BuiltinEmbedder {
    fn bucket(gram: &[char]) -> usize {
        let mut hasher = FnvHasher::with_key(BUILTIN_SEED);
        for c in gram {
            hasher.write_u32(*c as u32);
        }
        (hasher.finish() % BUILTIN_DIM as u64) as usize
    }
}

impl Embedder for BuiltinEmbedder {
    fn dim(&self) -> usize {
        BUILTIN_DIM
    }

    fn embed(&self, unit: &str, sentence: &str) -> Result<Vec<f64>, EmbedError> {
        let mut v = vec![0.0; BUILTIN_DIM];
        if unit.is_empty() && sentence.is_empty() {
            return Ok(v);
        }
        let chars: Vec<char> = unit.chars().chain([JOINER]).chain(sentence.chars()).collect();
        if chars.len() < 3 {
            v[Self::bucket(&chars)] += 1.0;
        } else {
            for gram in chars.windows(3) {
                v[Self::bucket(gram)] += 1.0;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        Ok(v)
    }
}

/// Sentences of `summary` mentioning `entity`, case-insensitively. Falls
/// back to the whole summary when none do.
pub fn context_sentences<'s>(entity: &str, summary: &'s [String]) -> Vec<&'s str> {
    let needle = entity.to_lowercase();
    let hits: Vec<&str> = summary
        .iter()
        .filter(|s| s.to_lowercase().contains(&needle))
        .map(String::as_str)
        .collect();
    if hits.is_empty() {
        summary.iter().map(String::as_str).collect()
    } else {
        hits
    }
}

/// Mean embedding of the entity over its context sentences; the entity
/// title alone when the summary is empty.
pub fn embed_candidate(embedder: &dyn Embedder, entity: &str, summary: &[String]) -> Result<Vec<f64>, EmbedError> {
    let sentences = context_sentences(entity, summary);
    if sentences.is_empty() {
        return checked(embedder, entity, entity);
    }
    let mut sum = vec![0.0; embedder.dim()];
    for sentence in &sentences {
        let v = checked(embedder, entity, sentence)?;
        sum.iter_mut().zip(&v).for_each(|(acc, x)| *acc += x);
    }
    let n = sentences.len() as f64;
    sum.iter_mut().for_each(|x| *x /= n);
    Ok(sum)
}

pub(crate) fn checked(embedder: &dyn Embedder, unit: &str, sentence: &str) -> Result<Vec<f64>, EmbedError> {
    let v = embedder.embed(unit, sentence)?;
    if v.len() != embedder.dim() {
        return Err(EmbedError::Dimension {
            expected: embedder.dim(),
            got: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(EmbedError::NonFinite);
    }
    Ok(v)
}
