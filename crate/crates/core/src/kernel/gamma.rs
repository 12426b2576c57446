//! Index sets `Γ(r) = {(ξ, i) : ξ ≤ r, 1 ≤ i ≤ n}` and
//! `Γ(r, s) = {(ξ, u, i) : ξ ≤ r, u ≤ s, 1 ≤ i ≤ n}` in left-lexicographic order.

use std::cmp::Ordering;

/// `Γ(r)` for width `n`, lexicographically sorted.
pub fn gamma(r: usize, n: usize) -> Vec<(usize, usize)> {
    (0..=r).flat_map(|xi| (1..=n).map(move |i| (xi, i))).collect()
}

/// `Γ(r, s)` for width `n`, lexicographically sorted.
pub fn gamma2(r: usize, s: usize, n: usize) -> Vec<(usize, usize, usize)> {
    (0..=r)
        .flat_map(|xi| (0..=s).flat_map(move |u| (1..=n).map(move |i| (xi, u, i))))
        .collect()
}

/// Left-lexicographic comparison of index tuples.
pub fn lex<T: Ord>(a: &[T], b: &[T]) -> Ordering {
    a.cmp(b)
}

/// The product order on `ℕ₀ × ℕ₀`: `(ξ, u) ≤ (τ, v)` iff both coordinates are.
pub fn product_le(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 <= b.0 && a.1 <= b.1
}
