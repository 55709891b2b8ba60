//! Indel similarity ratio used for entity fuzzy matching.

/// Similarity percentage in 0..=100 between two strings.
///
/// This is the indel ratio: `100 * (|a| + |b| - d) / (|a| + |b|)` rounded
/// half-up, where `d` is the minimal number of single-character insertions
/// and deletions turning `a` into `b` (substitutions cost 2, i.e. they are
/// never cheaper than delete + insert). Two empty strings are defined as
/// identical (100).
pub fn similarity_ratio(a: &str, b: &str) -> u32 {
    let ac: Vec<char> = a.chars().collect();
    let bc: Vec<char> = b.chars().collect();
    let (n, m) = (ac.len(), bc.len());
    if n + m == 0 {
        return 100;
    }
    let d = indel_distance(&ac, &bc);
    let kept = n + m - d;
    // round(100 * kept / (n + m)) half-up, in integers
    ((200 * kept + (n + m)) / (2 * (n + m))) as u32
}

/// Insert/delete edit distance via the LCS identity `d = n + m - 2*lcs`.
fn indel_distance(a: &[char], b: &[char]) -> usize {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return n + m;
    }
    let mut prev = vec![0usize; m + 1];
    let mut curr = vec![0usize; m + 1];
    for i in 1..=n {
        for j in 1..=m {
            curr[j] = if a[i - 1] == b[j - 1] {
                prev[j - 1] + 1
            } else {
                prev[j].max(curr[j - 1])
            };
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    n + m - 2 * prev[m]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Full O(nm) edit-distance table with substitution cost 2; independent
    /// of the LCS shortcut in the implementation.
    #[allow(clippy::needless_range_loop)]
    fn dp_oracle(a: &str, b: &str) -> usize {
        let ac: Vec<char> = a.chars().collect();
        let bc: Vec<char> = b.chars().collect();
        let (n, m) = (ac.len(), bc.len());
        let mut dp = vec![vec![0usize; m + 1]; n + 1];
        for i in 0..=n {
            dp[i][0] = i;
        }
        for j in 0..=m {
            dp[0][j] = j;
        }
        for i in 1..=n {
            for j in 1..=m {
                let sub = dp[i - 1][j - 1] + if ac[i - 1] == bc[j - 1] { 0 } else { 2 };
                dp[i][j] = sub.min(dp[i - 1][j] + 1).min(dp[i][j - 1] + 1);
            }
        }
        dp[n][m]
    }

    fn oracle_ratio(a: &str, b: &str) -> u32 {
        let (n, m) = (a.chars().count(), b.chars().count());
        if n + m == 0 {
            return 100;
        }
        let d = dp_oracle(a, b);
        ((200 * (n + m - d) + (n + m)) / (2 * (n + m))) as u32
    }

    #[test]
    fn identical_strings_are_100() {
        assert_eq!(similarity_ratio("cardiomyopathy", "cardiomyopathy"), 100);
        assert_eq!(similarity_ratio("", ""), 100);
    }

    #[test]
    fn disjoint_equal_length_is_0() {
        assert_eq!(similarity_ratio("abcd", "wxyz"), 0);
    }

    #[test]
    fn proximal_weakness_variants_cluster() {
        let r = similarity_ratio("proximal weakness", "proximal muscle weakness");
        assert_eq!(r, oracle_ratio("proximal weakness", "proximal muscle weakness"));
        assert!(r >= 80, "got {r}");
    }

    proptest! {
        #[test]
        fn matches_dp_oracle(a in "[a-e ]{0,12}", b in "[a-e ]{0,12}") {
            prop_assert_eq!(similarity_ratio(&a, &b), oracle_ratio(&a, &b));
        }

        #[test]
        fn symmetric(a in "[a-z ]{0,10}", b in "[a-z ]{0,10}") {
            prop_assert_eq!(similarity_ratio(&a, &b), similarity_ratio(&b, &a));
        }

        #[test]
        fn bounded(a in ".{0,8}", b in ".{0,8}") {
            prop_assert!(similarity_ratio(&a, &b) <= 100);
        }
    }
}
