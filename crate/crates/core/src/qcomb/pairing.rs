use crate::error::{Error, Result};

/// Largest ground set `2r` for which [`enumerate_pair_partitions`] will stream.
pub const DEFAULT_PAIRING_CAP: usize = 16;

/// A perfect matching of `{1..2r}` as a list of ascending pairs.
///
/// The pair list keeps the order it was built with; crossing counts do not
/// depend on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairPartition {
    pairs: Vec<(usize, usize)>,
}

impl PairPartition {
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        let size = 2 * pairs.len();
        let mut seen = vec![false; size + 1];
        for &(a, b) in &pairs {
            if a >= b {
                return Err(Error::InvalidPairPartition(format!(
                    "pair ({a},{b}) is not ascending"
                )));
            }
            for v in [a, b] {
                if v == 0 || v > size || seen[v] {
                    return Err(Error::InvalidPairPartition(format!(
                        "{pairs:?} does not cover 1..={size} exactly once"
                    )));
                }
                seen[v] = true;
            }
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Size `2r` of the ground set.
    pub fn size(&self) -> usize {
        2 * self.pairs.len()
    }

    /// Index pairs `(a, b)` into [`Self::pairs`] whose blocks cross,
    /// with block `a` opening first.
    pub fn crossing_blocks(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (x, &(a, b)) in self.pairs.iter().enumerate() {
            for (y, &(c, d)) in self.pairs.iter().enumerate() {
                if a < c && c < b && b < d {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Number of quadruples `i<j<k<l` with `(i,k), (j,l)` both blocks.
    pub fn crossings(&self) -> usize {
        self.crossing_blocks().len()
    }
}

/// Lexicographic stream over the `(2r-1)!!` pair partitions of `{1..2r}`.
///
/// Step `j` pairs the smallest unmatched point with the `c_j`-th unmatched
/// point after it; the choice vector `c` is a mixed-radix counter.
#[derive(Debug, Clone)]
pub struct PairPartitions {
    size: usize,
    choices: Option<Vec<usize>>,
}

impl PairPartitions {
    fn decode(&self, choices: &[usize]) -> PairPartition {
        let mut free: Vec<usize> = (1..=self.size).collect();
        let mut pairs = Vec::with_capacity(self.size / 2);
        for &c in choices {
            let a = free.remove(0);
            let b = free.remove(c);
            pairs.push((a, b));
        }
        PairPartition { pairs }
    }
}

impl Iterator for PairPartitions {
    type Item = PairPartition;

    fn next(&mut self) -> Option<PairPartition> {
        let choices = self.choices.take()?;
        let item = self.decode(&choices);
        let mut c = choices;
        let r = c.len();
        let mut j = r;
        while j > 0 {
            // radix at step j-1 is 2r - 2(j-1) - 1
            let radix = self.size - 2 * (j - 1) - 1;
            if c[j - 1] + 1 < radix {
                c[j - 1] += 1;
                c[j..].iter_mut().for_each(|x| *x = 0);
                self.choices = Some(c);
                break;
            }
            j -= 1;
        }
        Some(item)
    }
}

pub fn enumerate_pair_partitions(two_r: usize) -> Result<PairPartitions> {
    enumerate_pair_partitions_capped(two_r, DEFAULT_PAIRING_CAP)
}

pub fn enumerate_pair_partitions_capped(two_r: usize, cap: usize) -> Result<PairPartitions> {
    if two_r % 2 == 1 {
        return Err(Error::OddPairCount(two_r));
    }
    if two_r > cap {
        return Err(Error::EnumerationCap {
            what: "pair partition enumeration",
            size: two_r,
            cap,
        });
    }
    Ok(PairPartitions {
        size: two_r,
        choices: Some(vec![0; two_r / 2]),
    })
}
