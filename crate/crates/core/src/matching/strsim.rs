//! String similarity primitives for record matching.

use std::collections::BTreeMap;

use crate::canon::tokenize;

/// Classic dynamic-programming Levenshtein distance over characters.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut current = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        current[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let substitution = prev[j] + usize::from(ca != cb);
            current[j + 1] = substitution.min(prev[j + 1] + 1).min(current[j] + 1);
        }
        std::mem::swap(&mut prev, &mut current);
    }
    prev[b.len()]
}

/// Normalized edit similarity: 1 - d / max(len). Both empty -> 1.
pub fn edit_similarity(a: &str, b: &str) -> f64 {
    let len = a.chars().count().max(b.chars().count());
    if len == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / len as f64
}

fn count_vector(items: Vec<String>) -> BTreeMap<String, f64> {
    let mut counts = BTreeMap::new();
    for item in items {
        *counts.entry(item).or_insert(0.0) += 1.0;
    }
    counts
}

fn cosine(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    if a == b {
        // equal count vectors are exactly parallel; skip the square roots so
        // identical strings score exactly 1
        return 1.0;
    }
    let dot: f64 = a
        .iter()
        .filter_map(|(k, va)| b.get(k).map(|vb| va * vb))
        .sum();
    let norm = |m: &BTreeMap<String, f64>| m.values().map(|v| v * v).sum::<f64>().sqrt();
    let denom = norm(a) * norm(b);
    if denom == 0.0 {
        0.0
    } else {
        (dot / denom).clamp(0.0, 1.0)
    }
}

/// Character trigrams of the normalized string; strings shorter than three
/// characters contribute themselves as a single gram.
fn trigrams(s: &str) -> Vec<String> {
    let chars: Vec<char> = s.chars().collect();
    if chars.is_empty() {
        return Vec::new();
    }
    if chars.len() < 3 {
        return vec![chars.iter().collect()];
    }
    chars.windows(3).map(|w| w.iter().collect()).collect()
}

/// Cosine similarity between two strings on token-unigram count vectors,
/// backing off to character trigrams when either side has fewer than two
/// tokens (acronyms, single-word names).
pub fn text_cosine(a: &str, b: &str) -> f64 {
    let tokens_a = tokenize(a);
    let tokens_b = tokenize(b);
    if tokens_a.len() < 2 || tokens_b.len() < 2 {
        let ga = count_vector(trigrams(&tokens_a.join(" ")));
        let gb = count_vector(trigrams(&tokens_b.join(" ")));
        return cosine(&ga, &gb);
    }
    cosine(&count_vector(tokens_a), &count_vector(tokens_b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_distances() {
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("", ""), 0);
        assert_eq!(levenshtein("abc", ""), 3);
        assert_eq!(levenshtein("abc", "abc"), 0);
        assert_eq!(levenshtein("flaw", "lawn"), 2);
    }

    /// Independent oracle: breadth-first search over the graph of strings of
    /// length <= max_len, where edges are single edits. Deletions can be
    /// ordered before substitutions before insertions without changing the
    /// optimal count, so restricting intermediates to max(len) loses nothing.
    pub fn bfs_edit_distance(
        start: &str,
        alphabet: &[char],
        max_len: usize,
    ) -> BTreeMap<String, usize> {
        let mut dist: BTreeMap<String, usize> = BTreeMap::new();
        let mut frontier = vec![start.to_string()];
        dist.insert(start.to_string(), 0);
        let mut depth = 0usize;
        while !frontier.is_empty() {
            depth += 1;
            let mut next = Vec::new();
            for s in &frontier {
                let chars: Vec<char> = s.chars().collect();
                let mut push = |candidate: String| {
                    if !dist.contains_key(&candidate) {
                        dist.insert(candidate.clone(), depth);
                        next.push(candidate);
                    }
                };
                // deletions
                for i in 0..chars.len() {
                    let mut c = chars.clone();
                    c.remove(i);
                    push(c.iter().collect());
                }
                // substitutions
                for i in 0..chars.len() {
                    for &letter in alphabet {
                        if chars[i] != letter {
                            let mut c = chars.clone();
                            c[i] = letter;
                            push(c.iter().collect());
                        }
                    }
                }
                // insertions (capped)
                if chars.len() < max_len {
                    for i in 0..=chars.len() {
                        for &letter in alphabet {
                            let mut c = chars.clone();
                            c.insert(i, letter);
                            push(c.iter().collect());
                        }
                    }
                }
            }
            frontier = next;
        }
        dist
    }

    fn all_strings(alphabet: &[char], max_len: usize) -> Vec<String> {
        let mut out = vec![String::new()];
        let mut level = vec![String::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for s in &level {
                for &c in alphabet {
                    let mut t = s.clone();
                    t.push(c);
                    next.push(t);
                }
            }
            out.extend(next.iter().cloned());
            level = next;
        }
        out
    }

    #[test]
    fn dp_matches_bfs_oracle_on_short_strings() {
        // Spot-check here on length <= 4; the acceptance suite runs the full
        // length-6 sweep.
        let alphabet = ['a', 'b', 'c'];
        let strings = all_strings(&alphabet, 4);
        for a in &strings {
            let oracle = bfs_edit_distance(a, &alphabet, 4);
            for b in &strings {
                assert_eq!(
                    levenshtein(a, b),
                    oracle[b],
                    "distance({a:?}, {b:?})"
                );
            }
        }
    }

    #[test]
    fn edit_similarity_normalizes_by_longer_string() {
        // levenshtein(kitten, sitting) = 3, max len 7
        let sim = edit_similarity("kitten", "sitting");
        assert!((sim - (1.0 - 3.0 / 7.0)).abs() < 1e-12);
        assert_eq!(edit_similarity("", ""), 1.0);
        assert_eq!(edit_similarity("abc", ""), 0.0);
    }

    #[test]
    fn cosine_on_published_title_pair() {
        // "Senior Software Engineer" vs "Software Engineer": dot 2 over
        // sqrt(3)*sqrt(2)
        let sim = text_cosine("Senior Software Engineer", "Software Engineer");
        assert!((sim - 2.0 / 6.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cosine_extremes() {
        assert!((text_cosine("Acme Corp", "Acme Corp") - 1.0).abs() < 1e-12);
        assert_eq!(text_cosine("Acme Corp", "Globex LLC"), 0.0);
    }

    #[test]
    fn cosine_backs_off_to_trigrams_for_short_strings() {
        // single-token side: trigram backoff; close acronym-ish strings score
        // between 0 and 1
        let sim = text_cosine("Engineering", "Engineer");
        assert!(sim > 0.5 && sim < 1.0, "sim {sim}");
        assert_eq!(text_cosine("", "Engineer"), 0.0);
    }

    #[test]
    fn similarity_is_symmetric() {
        let mut rng = crate::rng::Rng::new(5);
        let alphabet: Vec<char> = "abcde ".chars().collect();
        for _ in 0..200 {
            let n = rng.below(10) as usize;
            let m = rng.below(10) as usize;
            let a: String = (0..n).map(|_| *rng.choose(&alphabet)).collect();
            let b: String = (0..m).map(|_| *rng.choose(&alphabet)).collect();
            assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
            assert!((text_cosine(&a, &b) - text_cosine(&b, &a)).abs() < 1e-12);
        }
    }
}
