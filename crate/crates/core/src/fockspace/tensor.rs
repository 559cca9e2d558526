//! Multi-index bookkeeping for rank-n tensors over grid nodes.
//!
//! A rank-n tensor over N nodes is stored flat in row-major order: the
//! multi-index (i_1, …, i_n) has offset Σ_k i_k N^{n−k}.

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // Next lexicographic permutation.
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot has a successor");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// Pairs (i, j) with i < j and σ(i) > σ(j).
pub fn inversions(sigma: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..sigma.len() {
        for j in i + 1..sigma.len() {
            if sigma[i] > sigma[j] {
                out.push((i, j));
            }
        }
    }
    out
}

/// Sign of a permutation.
pub fn sign(sigma: &[usize]) -> f64 {
    if inversions(sigma).len() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Inverse permutation.
pub fn inverse(sigma: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; sigma.len()];
    for (i, &s) in sigma.iter().enumerate() {
        inv[s] = i;
    }
    inv
}

/// n!
pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Flat offset of a multi-index.
#[inline]
pub fn flat_index(idx: &[usize], n_points: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n_points + i)
}

/// Multi-index of a flat offset, written into `out` (whose length is the rank).
#[inline]
pub fn unflatten(mut flat: usize, n_points: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = flat % n_points;
        flat /= n_points;
    }
}

/// Number of entries of a rank-n tensor over `n_points` nodes.
pub fn tensor_len(n_points: usize, rank: usize) -> usize {
    n_points.pow(rank as u32)
}

/// Non-decreasing multi-indices of the given rank, in lexicographic order.
pub fn sorted_multi_indices(n_points: usize, rank: usize) -> Vec<Vec<usize>> {
    fn rec(n_points: usize, rank: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == rank {
            out.push(cur.clone());
            return;
        }
        for i in start..n_points {
            cur.push(i);
            rec(n_points, rank, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n_points, rank, 0, &mut Vec::with_capacity(rank), &mut out);
    out
}
