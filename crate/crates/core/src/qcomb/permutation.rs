use std::fmt;

use crate::error::{Error, Result};

/// Largest `m` for which [`enumerate_permutations`] will list `S_m`.
pub const DEFAULT_PERMUTATION_CAP: usize = 8;

/// A permutation of `{0..m}` stored by its images.
///
/// `images[i]` is `π(i)`. The 1-based one-line notation is available
/// through [`Permutation::one_line`].
/// Acting on tensors, `π` sends `f` to `π(f)(t_1..t_m) = f(t_{π(1)}..t_{π(m)})`,
/// which makes `π ↦ π(·)` a homomorphism: applying `σ` then `ρ` equals
/// applying `ρ.compose(&σ)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from 0-based images, checking bijectivity.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let m = images.len();
        let mut seen = vec![false; m];
        for &v in &images {
            if v >= m || seen[v] {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a bijection of 0..{m}"
                )));
            }
            seen[v] = true;
        }
        Ok(Self { images })
    }

    /// Builds a permutation from 1-based one-line notation.
    pub fn from_one_line(one_line: &[usize]) -> Result<Self> {
        if one_line.contains(&0) {
            return Err(Error::InvalidPermutation(format!(
                "{one_line:?}: one-line entries are 1-based"
            )));
        }
        Self::new(one_line.iter().map(|&v| v - 1).collect())
    }

    pub fn identity(m: usize) -> Self {
        Self {
            images: (0..m).collect(),
        }
    }

    /// The order-reversing permutation `i ↦ m-1-i`.
    pub fn reversal(m: usize) -> Self {
        Self {
            images: (0..m).rev().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// 0-based images.
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn image(&self, i: usize) -> usize {
        self.images[i]
    }

    /// 1-based one-line notation.
    pub fn one_line(&self) -> Vec<usize> {
        self.images.iter().map(|&v| v + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Self { images: inv }
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::InvalidPermutation(format!(
                "cannot compose permutations of sizes {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Self {
            images: other.images.iter().map(|&v| self.images[v]).collect(),
        })
    }

    /// `self ⊕ other`: `self` on the first block, `other` shifted onto the second.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let k = self.len();
        let mut images = self.images.clone();
        images.extend(other.images.iter().map(|&v| v + k));
        Self { images }
    }

    /// Embeds `self` acting on positions `offset..offset+len` of `0..total`.
    pub fn embed(&self, offset: usize, total: usize) -> Result<Self> {
        if offset + self.len() > total {
            return Err(Error::OutOfRange {
                what: "embedding offset",
                value: offset,
                range: format!("0..={}", total - self.len().min(total)),
            });
        }
        let mut images: Vec<usize> = (0..total).collect();
        for (i, &v) in self.images.iter().enumerate() {
            images[offset + i] = offset + v;
        }
        Ok(Self { images })
    }

    /// Number of pairs `i < j` with `π(i) > π(j)`.
    pub fn inversions(&self) -> usize {
        let p = &self.images;
        let mut count = 0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Advances to the lexicographically next permutation; false at the last one.
    fn advance(&mut self) -> bool {
        let p = &mut self.images;
        let n = p.len();
        if n < 2 {
            return false;
        }
        let mut i = n - 1;
        while i > 0 && p[i - 1] >= p[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = n - 1;
        while p[j] <= p[i - 1] {
            j -= 1;
        }
        p.swap(i - 1, j);
        p[i..].reverse();
        true
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.one_line())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_line().iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn inversions(p: &Permutation) -> usize {
    p.inversions()
}

/// Lexicographic stream over `S_m`.
#[derive(Debug, Clone)]
pub struct Permutations {
    next: Option<Permutation>,
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut following = current.clone();
        if following.advance() {
            self.next = Some(following);
        }
        Some(current)
    }
}

/// All `m!` permutations of `S_m` in lexicographic order of one-line notation.
pub fn enumerate_permutations(m: usize) -> Result<Permutations> {
    enumerate_permutations_capped(m, DEFAULT_PERMUTATION_CAP)
}

pub fn enumerate_permutations_capped(m: usize, cap: usize) -> Result<Permutations> {
    if m > cap {
        return Err(Error::EnumerationCap {
            what: "permutation enumeration (m! terms)",
            size: m,
            cap,
        });
    }
    Ok(Permutations {
        next: Some(Permutation::identity(m)),
    })
}

/// Minimal-length representatives of the left cosets `π (S_k × S_{m-k})`.
///
/// These are the `(k, m-k)`-shuffles: one-line notation increasing on
/// positions `0..k` and on `k..m`. They are streamed in lexicographic order
/// of the image set of the first block.
#[derive(Debug, Clone)]
pub struct Shuffles {
    k: usize,
    m: usize,
    subset: Option<Vec<usize>>,
}

impl Shuffles {
    fn build(&self, subset: &[usize]) -> Permutation {
        let mut chosen = vec![false; self.m];
        for &v in subset {
            chosen[v] = true;
        }
        let mut images = subset.to_vec();
        images.extend((0..self.m).filter(|&v| !chosen[v]));
        Permutation { images }
    }
}

impl Iterator for Shuffles {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let subset = self.subset.take()?;
        let item = self.build(&subset);
        // next k-subset of 0..m in lexicographic order
        let (k, m) = (self.k, self.m);
        let mut s = subset;
        let mut i = k;
        while i > 0 && s[i - 1] == m - k + i - 1 {
            i -= 1;
        }
        if i > 0 {
            s[i - 1] += 1;
            for j in i..k {
                s[j] = s[j - 1] + 1;
            }
            self.subset = Some(s);
        }
        Some(item)
    }
}

pub fn enumerate_shuffles(k: usize, m: usize) -> Result<Shuffles> {
    if k > m {
        return Err(Error::OutOfRange {
            what: "shuffle block size k",
            value: k,
            range: format!("0..={m}"),
        });
    }
    Ok(Shuffles {
        k,
        m,
        subset: Some((0..k).collect()),
    })
}
