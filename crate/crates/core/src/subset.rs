//! Subsets of the ground set `{1..n}` encoded as bitmasks.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{invalid, Error, Result};

/// Default ceiling on the ground-set size for dense lattice storage.
pub const DEFAULT_MAX_GROUND: usize = 24;

/// Environment variable that overrides [`DEFAULT_MAX_GROUND`].
pub const MAX_GROUND_ENV: &str = "LASSERRE_ADF_MAX_N";

/// Current ceiling on `n`, honouring `LASSERRE_ADF_MAX_N` (capped at 31 so
/// that bitmasks fit a `u32`).
pub fn max_ground_size() -> usize {
    std::env::var(MAX_GROUND_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map(|v| v.min(31))
        .unwrap_or(DEFAULT_MAX_GROUND)
}

pub(crate) fn check_ground(n: usize) -> Result<()> {
    let cap = max_ground_size();
    if n > cap {
        return Err(invalid(format!("ground size {n} exceeds cap {cap}")));
    }
    Ok(())
}

/// A subset `I ⊆ {1..n}`; bit `i-1` is set iff `i ∈ I`.
///
/// Ordering is graded: first by cardinality, then by bitmask value. Every
/// matrix in this crate is indexed in that order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SubsetIndex {
    bits: u32,
    ground: u8,
}

impl SubsetIndex {
    pub fn new(bits: u32, ground_size: usize) -> Result<Self> {
        if ground_size > 31 {
            return Err(invalid(format!("ground size {ground_size} does not fit a bitmask")));
        }
        if (bits as u64) >> ground_size != 0 {
            return Err(invalid(format!("bitmask {bits:#b} out of range for ground size {ground_size}")));
        }
        Ok(Self { bits, ground: ground_size as u8 })
    }

    pub fn empty(ground_size: usize) -> Self {
        Self { bits: 0, ground: ground_size as u8 }
    }

    pub fn full(ground_size: usize) -> Self {
        Self { bits: full_mask(ground_size), ground: ground_size as u8 }
    }

    /// Builds a subset from 1-based element labels.
    pub fn from_elements(elements: &[usize], ground_size: usize) -> Result<Self> {
        let mut bits = 0u32;
        for &e in elements {
            if e == 0 || e > ground_size {
                return Err(invalid(format!("element {e} outside 1..={ground_size}")));
            }
            bits |= 1 << (e - 1);
        }
        Self::new(bits, ground_size)
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn ground_size(self) -> usize {
        self.ground as usize
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn contains(self, element: usize) -> bool {
        element >= 1 && element <= self.ground as usize && self.bits >> (element - 1) & 1 == 1
    }

    pub fn is_subset_of(self, other: SubsetIndex) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn union(self, other: SubsetIndex) -> SubsetIndex {
        SubsetIndex { bits: self.bits | other.bits, ground: self.ground.max(other.ground) }
    }

    pub fn intersects(self, other: SubsetIndex) -> bool {
        self.bits & other.bits != 0
    }

    pub fn complement(self) -> SubsetIndex {
        SubsetIndex { bits: full_mask(self.ground as usize) & !self.bits, ground: self.ground }
    }

    /// 1-based element labels in increasing order.
    pub fn elements(self) -> Vec<usize> {
        (1..=self.ground as usize).filter(|&e| self.contains(e)).collect()
    }

    /// Re-labels the subset over a (possibly larger) ground set.
    pub fn with_ground(self, ground_size: usize) -> Result<SubsetIndex> {
        SubsetIndex::new(self.bits, ground_size)
    }

    /// Parses the `{1,3}` text form; `{}` is the empty set.
    pub fn parse(text: &str, ground_size: usize) -> Result<Self> {
        let t = text.trim();
        let inner = t
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("subset {t:?} must be wrapped in braces")))?;
        let mut elements = Vec::new();
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let e: usize = part.parse().map_err(|_| Error::Parse(format!("bad element {part:?} in {t:?}")))?;
            elements.push(e);
        }
        Self::from_elements(&elements, ground_size).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl Ord for SubsetIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.len(), self.bits).cmp(&(other.len(), other.bits))
    }
}

impl PartialOrd for SubsetIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SubsetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.elements().iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", labels.join(","))
    }
}

pub(crate) fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        ((1u64 << n) - 1) as u32
    }
}

/// All subsets of `{1..n}` with at most `t` elements, in graded order.
pub fn enumerate_subsets(n: usize, t: usize) -> Result<Vec<SubsetIndex>> {
    if t > n {
        return Err(invalid(format!("level {t} exceeds ground size {n}")));
    }
    check_ground(n)?;
    let mut out = Vec::new();
    for k in 0..=t {
        push_k_subsets(n, k, &mut out);
    }
    Ok(out)
}

// Gosper's hack walks k-subsets in increasing bitmask order.
fn push_k_subsets(n: usize, k: usize, out: &mut Vec<SubsetIndex>) {
    if k == 0 {
        out.push(SubsetIndex::empty(n));
        return;
    }
    let limit = 1u64 << n;
    let mut v: u64 = (1u64 << k) - 1;
    while v < limit {
        out.push(SubsetIndex { bits: v as u32, ground: n as u8 });
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
}

/// Iterates every subset of `mask` (including `mask` and `0`).
pub(crate) fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}
