//! Longest-common-subsequence measures over token texts.

/// Above this many DP cells the alignment switches to linear-space recursion.
const FULL_TABLE_CELLS: usize = 1 << 22;

fn trim<'x, T: PartialEq>(a: &'x [T], b: &'x [T]) -> (usize, &'x [T], &'x [T], usize) {
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[prefix..], &b[prefix..]);
    let suffix = a
        .iter()
        .rev()
        .zip(b.iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    (
        prefix,
        &a[..a.len() - suffix],
        &b[..b.len() - suffix],
        suffix,
    )
}

/// Last row of the LCS length table of `a` against every prefix of `b`.
fn lcs_row<T: PartialEq>(a: &[T], b: &[T]) -> Vec<usize> {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev
}

/// Length of the longest common subsequence.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (prefix, a, b, suffix) = trim(a, b);
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    prefix + suffix + lcs_row(long, short)[short.len()]
}

/// `2·|LCS(a,b)| / (|a|+|b|)`; two empty sequences are identical.
pub fn similarity<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    2.0 * lcs_len(a, b) as f64 / (a.len() + b.len()) as f64
}

/// Fraction of `needle` found, in order, inside `hay`. Zero for an empty needle.
pub fn containment<T: PartialEq>(needle: &[T], hay: &[T]) -> f64 {
    if needle.is_empty() {
        return 0.0;
    }
    lcs_len(needle, hay) as f64 / needle.len() as f64
}

/// For each element of `b`, whether it belongs to one fixed longest common
/// subsequence of `a` and `b`.
pub fn lcs_mask<T: PartialEq>(a: &[T], b: &[T]) -> Vec<bool> {
    let mut mask = vec![false; b.len()];
    let (prefix, ta, tb, suffix) = trim(a, b);
    mask[..prefix].iter_mut().for_each(|m| *m = true);
    let n = b.len();
    mask[n - suffix..].iter_mut().for_each(|m| *m = true);
    align(ta, tb, &mut mask[prefix..n - suffix]);
    mask
}

fn align<T: PartialEq>(a: &[T], b: &[T], mask: &mut [bool]) {
    if a.is_empty() || b.is_empty() {
        return;
    }
    if (a.len() + 1) * (b.len() + 1) <= FULL_TABLE_CELLS {
        align_table(a, b, mask);
        return;
    }
    // Hirschberg split
    let mid = a.len() / 2;
    let left = lcs_row(&a[..mid], b);
    let ra: Vec<&T> = a[mid..].iter().rev().collect();
    let rb: Vec<&T> = b.iter().rev().collect();
    let right = lcs_row(&ra, &rb);
    let split = (0..=b.len())
        .max_by_key(|&j| (left[j] + right[b.len() - j], std::cmp::Reverse(j)))
        .unwrap_or(0);
    let (mask_l, mask_r) = mask.split_at_mut(split);
    align(&a[..mid], &b[..split], mask_l);
    align(&a[mid..], &b[split..], mask_r);
}

fn align_table<T: PartialEq>(a: &[T], b: &[T], mask: &mut [bool]) {
    let w = b.len() + 1;
    let mut table = vec![0u32; (a.len() + 1) * w];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            table[i * w + j] = if a[i - 1] == b[j - 1] {
                table[(i - 1) * w + j - 1] + 1
            } else {
                table[(i - 1) * w + j].max(table[i * w + j - 1])
            };
        }
    }
    let (mut i, mut j) = (a.len(), b.len());
    while i > 0 && j > 0 {
        if a[i - 1] == b[j - 1] {
            mask[j - 1] = true;
            i -= 1;
            j -= 1;
        } else if table[(i - 1) * w + j] >= table[i * w + j - 1] {
            i -= 1;
        } else {
            j -= 1;
        }
    }
}

/// Elements of `new` outside one longest common subsequence with `old`.
pub fn added<'x, T: PartialEq>(old: &[T], new: &'x [T]) -> Vec<&'x T> {
    lcs_mask(old, new)
        .iter()
        .zip(new)
        .filter(|(m, _)| !**m)
        .map(|(_, t)| t)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Exhaustive oracle: longest subsequence of `a` (by bitmask) that is also a subsequence of `b`.
    fn brute_lcs(a: &[u8], b: &[u8]) -> usize {
        fn is_subseq(s: &[u8], b: &[u8]) -> bool {
            let mut it = b.iter();
            s.iter().all(|x| it.any(|y| y == x))
        }
        (0u32..1 << a.len())
            .filter_map(|mask| {
                let s: Vec<u8> = a
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &x)| x)
                    .collect();
                is_subseq(&s, b).then_some(s.len())
            })
            .max()
            .unwrap_or(0)
    }

    fn is_common_subsequence(a: &[u8], b: &[u8], mask: &[bool]) -> bool {
        let picked: Vec<u8> = b
            .iter()
            .zip(mask)
            .filter(|(_, m)| **m)
            .map(|(x, _)| *x)
            .collect();
        let mut it = a.iter();
        picked.iter().all(|x| it.any(|y| y == x))
    }

    #[test]
    fn worked_examples() {
        let a = ["return", "a", "+", "b", ";"];
        let b = ["return", "a", "*", "b", ";"];
        assert_eq!(lcs_len(&a, &b), 4);
        assert!((similarity(&a, &b) - 0.8).abs() < 1e-12);
        assert_eq!(similarity::<&str>(&[], &[]), 1.0);
        assert_eq!(similarity(&["x"], &[]), 0.0);
        assert_eq!(added(&a, &b), [&"*"]);
        assert_eq!(containment(&["a", "b"], &a), 1.0);
        assert_eq!(containment::<&str>(&[], &a), 0.0);
    }

    #[test]
    fn hirschberg_matches_table_on_large_input() {
        let a: Vec<u32> = (0..3000).map(|i| (i * 7 % 13) as u32).collect();
        let b: Vec<u32> = (0..2500).map(|i| (i * 5 % 11) as u32).collect();
        let mut m1 = vec![false; b.len()];
        align(&a, &b, &mut m1);
        let count = m1.iter().filter(|m| **m).count();
        assert_eq!(count, lcs_len(&a, &b));
        let picked: Vec<u32> = b
            .iter()
            .zip(&m1)
            .filter(|(_, m)| **m)
            .map(|(x, _)| *x)
            .collect();
        let mut it = a.iter();
        assert!(picked.iter().all(|x| it.any(|y| y == x)));
    }

    proptest! {
        #[test]
        fn lcs_matches_brute_force(a in proptest::collection::vec(0u8..4, 0..9), b in proptest::collection::vec(0u8..4, 0..12)) {
            let expected = brute_lcs(&a, &b);
            prop_assert_eq!(lcs_len(&a, &b), expected);
            prop_assert_eq!(lcs_len(&b, &a), expected);
            let mask = lcs_mask(&a, &b);
            prop_assert_eq!(mask.iter().filter(|m| **m).count(), expected);
            prop_assert!(is_common_subsequence(&a, &b, &mask));
        }

        #[test]
        fn similarity_is_symmetric_and_bounded(a in proptest::collection::vec(0u8..6, 0..40), b in proptest::collection::vec(0u8..6, 0..40)) {
            let s = similarity(&a, &b);
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert_eq!(s, similarity(&b, &a));
            prop_assert_eq!(similarity(&a, &a), 1.0);
        }
    }
}
