/// Sentence delimiters: Latin, Devanagari danda, Ethiopic full stop.
pub const DEFAULT_DELIMITERS: &[char] = &['.', '?', '!', '।', '።'];

/// Split after a delimiter that is followed by whitespace or the end of the
/// text. Pieces are trimmed; empty pieces are dropped.
pub fn split_sentences(text: &str, delimiters: &[char]) -> Vec<String> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if !delimiters.contains(&c) {
            continue;
        }
        let boundary = match chars.peek() {
            None => true,
            Some((_, next)) => next.is_whitespace(),
        };
        if boundary {
            let end = i + c.len_utf8();
            push_trimmed(&mut out, &text[start..end]);
            start = end;
        }
    }
    push_trimmed(&mut out, &text[start..]);
    out
}

fn push_trimmed(out: &mut Vec<String>, piece: &str) {
    let piece = piece.trim();
    if !piece.is_empty() {
        out.push(piece.to_string());
    }
}

/// The first sentence of `text` containing `surface`, or the whole text
/// when segmentation splits the surface apart.
pub fn mention_sentence(text: &str, surface: &str, delimiters: &[char]) -> String {
    split_sentences(text, delimiters)
        .into_iter()
        .find(|s| s.contains(surface))
        .unwrap_or_else(|| text.trim().to_string())
}
