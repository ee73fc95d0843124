//! Exponent vectors and Grassmann index sets.

use std::cmp::Ordering;
use std::fmt;

pub const MAX_DIM: usize = 6;

/// Exponent multi-index over at most [`MAX_DIM`] commuting variables.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Exps(pub [u8; MAX_DIM]);

impl Exps {
    pub const ZERO: Exps = Exps([0; MAX_DIM]);

    pub fn unit(i: usize) -> Self {
        let mut e = [0; MAX_DIM];
        e[i] = 1;
        Exps(e)
    }

    pub fn from_slice(s: &[u8]) -> Self {
        let mut e = [0; MAX_DIM];
        e[..s.len()].copy_from_slice(s);
        Exps(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&a| a as u32).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn add(&self, o: &Exps) -> Exps {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(o.0.iter()) {
            *a += b;
        }
        Exps(e)
    }

    pub fn checked_sub(&self, o: &Exps) -> Option<Exps> {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(o.0.iter()) {
            if *a < *b {
                return None;
            }
            *a -= b;
        }
        Some(Exps(e))
    }

    pub fn inc(&self, i: usize) -> Exps {
        let mut e = self.0;
        e[i] += 1;
        Exps(e)
    }

    pub fn dec(&self, i: usize) -> Option<Exps> {
        if self.0[i] == 0 {
            return None;
        }
        let mut e = self.0;
        e[i] -= 1;
        Some(Exps(e))
    }

    /// α! = Π αᵢ!
    pub fn factorial(&self) -> u64 {
        self.0
            .iter()
            .map(|&a| (1..=a as u64).product::<u64>())
            .product()
    }

    /// All β ≤ self componentwise, in lexicographic order.
    pub fn sub_indices(&self, dim: usize) -> Vec<Exps> {
        let mut out = vec![Exps::ZERO];
        for i in 0..dim {
            let mut next = Vec::with_capacity(out.len() * (self.0[i] as usize + 1));
            for b in &out {
                for k in 0..=self.0[i] {
                    let mut e = b.0;
                    e[i] = k;
                    next.push(Exps(e));
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    /// All exponent vectors in `dim` variables of total degree exactly `deg`.
    pub fn of_degree(dim: usize, deg: u32) -> Vec<Exps> {
        fn rec(i: usize, dim: usize, left: u32, cur: &mut [u8; MAX_DIM], out: &mut Vec<Exps>) {
            if i + 1 == dim {
                cur[i] = left as u8;
                out.push(Exps(*cur));
                cur[i] = 0;
                return;
            }
            for k in 0..=left {
                cur[i] = k as u8;
                rec(i + 1, dim, left - k, cur, out);
            }
            cur[i] = 0;
        }
        let mut out = Vec::new();
        rec(0, dim, deg, &mut [0; MAX_DIM], &mut out);
        out.sort();
        out
    }

    /// All exponent vectors of total degree ≤ `deg`.
    pub fn up_to_degree(dim: usize, deg: u32) -> Vec<Exps> {
        (0..=deg).flat_map(|d| Exps::of_degree(dim, d)).collect()
    }

    pub fn fmt_dim(&self, dim: usize) -> String {
        let parts: Vec<String> = self.0[..dim].iter().map(|a| a.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

impl fmt::Debug for Exps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Binomial-type coefficient α!/(β!(α−β)!) for β ≤ α.
pub fn multi_binom(alpha: &Exps, beta: &Exps) -> u64 {
    let mut r = 1u64;
    for i in 0..MAX_DIM {
        r *= binom(alpha.0[i] as u64, beta.0[i] as u64);
    }
    r
}

pub fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r = 1u64;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// A subset of `{0..MAX_DIM}` indexing anticommuting generators, kept as a bitmask.
/// Ordered lexicographically as sorted index sequences.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GSet(pub u8);

impl GSet {
    pub const EMPTY: GSet = GSet(0);

    pub fn single(i: usize) -> Self {
        GSet(1 << i)
    }

    pub fn from_indices(ix: &[usize]) -> Self {
        GSet(ix.iter().fold(0u8, |m, &i| m | (1 << i)))
    }

    pub fn len(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..8).filter(|&i| self.contains(i)).collect()
    }

    /// Number of elements strictly below `i`.
    pub fn count_below(&self, i: usize) -> u32 {
        (self.0 & ((1u16 << i) as u8).wrapping_sub(1)).count_ones()
    }

    /// Number of elements strictly above `i`.
    pub fn count_above(&self, i: usize) -> u32 {
        (self.0 >> (i + 1)).count_ones()
    }

    pub fn without(&self, i: usize) -> GSet {
        GSet(self.0 & !(1 << i))
    }

    pub fn with(&self, i: usize) -> GSet {
        GSet(self.0 | (1 << i))
    }

    /// ξ_S · ξ_T = sign · ξ_{S∪T}, or `None` if S ∩ T ≠ ∅.
    pub fn wedge(&self, o: &GSet) -> Option<(GSet, bool)> {
        if self.0 & o.0 != 0 {
            return None;
        }
        // sign: number of pairs (s in S, t in T) with s > t
        let mut inv = 0u32;
        for t in o.indices() {
            inv += self.count_above(t);
        }
        Some((GSet(self.0 | o.0), inv % 2 == 1))
    }

    /// All subsets of `{0..dim}` of size `k`, in lexicographic order.
    pub fn of_size(dim: usize, k: usize) -> Vec<GSet> {
        let mut out: Vec<GSet> = (0u16..(1 << dim))
            .map(|m| GSet(m as u8))
            .filter(|s| s.len() as usize == k)
            .collect();
        out.sort();
        out
    }

    pub fn fmt_one_based(&self) -> String {
        let parts: Vec<String> = self.indices().iter().map(|i| (i + 1).to_string()).collect();
        parts.join(",")
    }
}

impl Ord for GSet {
    fn cmp(&self, o: &Self) -> Ordering {
        self.indices().cmp(&o.indices())
    }
}

impl PartialOrd for GSet {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for GSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.fmt_one_based())
    }
}
