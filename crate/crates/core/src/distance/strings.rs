//! Baseline string metrics over unicode scalar values.

/// Unit-cost edit distance (insert, delete, substitute).
pub fn levenshtein(x: &str, y: &str) -> usize {
    let a: Vec<char> = x.chars().collect();
    let b: Vec<char> = y.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Mismatched positions over the common prefix length, plus the length
/// difference: positions past the end of the shorter string all differ.
pub fn hamming(x: &str, y: &str) -> usize {
    let mut a = x.chars();
    let mut b = y.chars();
    let mut d = 0;
    loop {
        match (a.next(), b.next()) {
            (Some(p), Some(q)) => d += usize::from(p != q),
            (Some(_), None) | (None, Some(_)) => d += 1,
            (None, None) => return d,
        }
    }
}

/// [`hamming`] divided by the longer length; two empty strings are at 0.
pub fn hamming_ratio(x: &str, y: &str) -> f64 {
    let longest = x.chars().count().max(y.chars().count());
    if longest == 0 {
        return 0.0;
    }
    hamming(x, y) as f64 / longest as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Textbook full-table recurrence, kept separate from the two-row version.
    fn levenshtein_table(x: &str, y: &str) -> usize {
        let a: Vec<char> = x.chars().collect();
        let b: Vec<char> = y.chars().collect();
        let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
        for (i, row) in t.iter_mut().enumerate() {
            row[0] = i;
        }
        for j in 0..=b.len() {
            t[0][j] = j;
        }
        for i in 1..=a.len() {
            for j in 1..=b.len() {
                let cost = if a[i - 1] == b[j - 1] { 0 } else { 1 };
                t[i][j] = (t[i - 1][j] + 1)
                    .min(t[i][j - 1] + 1)
                    .min(t[i - 1][j - 1] + cost);
            }
        }
        t[a.len()][b.len()]
    }

    #[test]
    fn levenshtein_examples() {
        assert_eq!(levenshtein_table("kitten", "sitting"), 3);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("flaw", "flaw"), 0);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("abc", ""), 3);
        assert_eq!(levenshtein("née", "nee"), 1);
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming("karolin", "kathrin"), 3);
        assert_eq!(hamming("same", "same"), 0);
        assert_eq!(hamming("ab", "abcd"), 2);
        assert_eq!(hamming("", ""), 0);
    }

    #[test]
    fn hamming_ratio_examples() {
        assert_eq!(hamming_ratio("ab", "abcd"), 0.5);
        assert_eq!(hamming_ratio("xyz", "xyz"), 0.0);
        assert_eq!(hamming_ratio("abc", "xyz"), 1.0);
        assert_eq!(hamming_ratio("", ""), 0.0);
    }

    proptest! {
        #[test]
        fn levenshtein_matches_table(a in "[a-c]{0,12}", b in "[a-c]{0,12}") {
            prop_assert_eq!(levenshtein(&a, &b), levenshtein_table(&a, &b));
        }

        #[test]
        fn levenshtein_is_a_metric(a in "\\PC{0,8}", b in "\\PC{0,8}", c in "\\PC{0,8}") {
            prop_assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
            prop_assert_eq!(levenshtein(&a, &b) == 0, a == b);
            prop_assert!(levenshtein(&a, &c) <= levenshtein(&a, &b) + levenshtein(&b, &c));
        }

        #[test]
        fn hamming_bounds(a in "[ab]{0,10}", b in "[ab]{0,10}") {
            let r = hamming_ratio(&a, &b);
            prop_assert!((0.0..=1.0).contains(&r));
            prop_assert!(levenshtein(&a, &b) <= hamming(&a, &b));
            prop_assert_eq!(hamming(&a, &b), hamming(&b, &a));
        }
    }
}
