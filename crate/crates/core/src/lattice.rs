//! Vectors indexed by the Boolean lattice and the signed Möbius / zeta
//! transforms between moments `w` and pseudo-probabilities `w^N`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{invalid, Result};
use crate::rational::Rational;
use crate::subset::{check_ground, submasks, SubsetIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorKind {
    Moments,
    PseudoProbabilities,
}

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    Sparse(BTreeMap<u32, Rational>),
    Dense(Vec<Rational>),
}

/// An exact-rational vector over `P(N)`. Entries not stored are zero.
///
/// Storage switches to a dense array once more than half of the lattice is
/// populated.
#[derive(Clone, Debug)]
pub struct LatticeVector {
    n: usize,
    kind: VectorKind,
    storage: Storage,
}

impl PartialEq for LatticeVector {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.kind == other.kind
            && (0..1u64 << self.n).all(|b| self.get_bits(b as u32) == other.get_bits(b as u32))
    }
}

impl LatticeVector {
    pub fn zeros(n: usize, kind: VectorKind) -> Result<Self> {
        check_ground(n)?;
        Ok(Self { n, kind, storage: Storage::Sparse(BTreeMap::new()) })
    }

    /// Builds from a dense array indexed by bitmask.
    pub fn from_dense(n: usize, kind: VectorKind, values: Vec<Rational>) -> Result<Self> {
        check_ground(n)?;
        if values.len() != 1usize << n {
            return Err(invalid(format!("dense vector has {} entries, expected 2^{n}", values.len())));
        }
        let mut v = Self { n, kind, storage: Storage::Dense(values) };
        v.compact();
        Ok(v)
    }

    pub fn from_entries<I>(n: usize, kind: VectorKind, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SubsetIndex, Rational)>,
    {
        let mut v = Self::zeros(n, kind)?;
        for (s, r) in entries {
            if s.ground_size() != n {
                return Err(invalid(format!("subset {s} is over ground size {}, not {n}", s.ground_size())));
            }
            v.set(s, r);
        }
        v.compact();
        Ok(v)
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> VectorKind {
        self.kind
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    pub fn get(&self, s: SubsetIndex) -> Rational {
        self.get_bits(s.bits())
    }

    pub fn get_bits(&self, bits: u32) -> Rational {
        match &self.storage {
            Storage::Sparse(m) => m.get(&bits).cloned().unwrap_or_else(Rational::zero),
            Storage::Dense(v) => v.get(bits as usize).cloned().unwrap_or_else(Rational::zero),
        }
    }

    pub fn set(&mut self, s: SubsetIndex, value: Rational) {
        self.set_bits(s.bits(), value)
    }

    pub(crate) fn set_bits(&mut self, bits: u32, value: Rational) {
        match &mut self.storage {
            Storage::Sparse(m) => {
                if value.is_zero() {
                    m.remove(&bits);
                } else {
                    m.insert(bits, value);
                }
            }
            Storage::Dense(v) => v[bits as usize] = value,
        }
    }

    /// Number of nonzero entries.
    pub fn support_len(&self) -> usize {
        match &self.storage {
            Storage::Sparse(m) => m.len(),
            Storage::Dense(v) => v.iter().filter(|r| !r.is_zero()).count(),
        }
    }

    /// Nonzero entries in graded order.
    pub fn nonzero_entries(&self) -> Vec<(SubsetIndex, Rational)> {
        let mut out: Vec<(SubsetIndex, Rational)> = match &self.storage {
            Storage::Sparse(m) => {
                m.iter().map(|(&b, r)| (SubsetIndex::new(b, self.n).expect("valid key"), r.clone())).collect()
            }
            Storage::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, r)| !r.is_zero())
                .map(|(b, r)| (SubsetIndex::new(b as u32, self.n).expect("valid key"), r.clone()))
                .collect(),
        };
        out.sort_by_key(|e| e.0);
        out
    }

    pub fn to_dense(&self) -> Vec<Rational> {
        match &self.storage {
            Storage::Dense(v) => v.clone(),
            Storage::Sparse(m) => {
                let mut v = vec![Rational::zero(); 1usize << self.n];
                for (&b, r) in m {
                    v[b as usize] = r.clone();
                }
                v
            }
        }
    }

    /// Sum of all entries.
    pub fn total(&self) -> Rational {
        match &self.storage {
            Storage::Sparse(m) => m.values().fold(Rational::zero(), |acc, r| acc + r),
            Storage::Dense(v) => v.iter().fold(Rational::zero(), |acc, r| acc + r),
        }
    }

    pub fn scaled(&self, c: &Rational) -> LatticeVector {
        let entries = self.nonzero_entries().into_iter().map(|(s, r)| (s, r * c));
        LatticeVector::from_entries(self.n, self.kind, entries).expect("same ground size")
    }

    fn compact(&mut self) {
        let half = 1usize << self.n.saturating_sub(1);
        let nnz = self.support_len();
        let want_dense = nnz > half;
        match (&self.storage, want_dense) {
            (Storage::Sparse(_), true) => self.storage = Storage::Dense(self.to_dense()),
            (Storage::Dense(v), false) => {
                let m =
                    v.iter().enumerate().filter(|(_, r)| !r.is_zero()).map(|(b, r)| (b as u32, r.clone())).collect();
                self.storage = Storage::Sparse(m);
            }
            _ => {}
        }
    }
}

/// A multilinear polynomial `g(x) = Σ_I g_I ∏_{i∈I} x_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintPolynomial {
    n: usize,
    coefficients: BTreeMap<u32, Rational>,
}

impl ConstraintPolynomial {
    pub fn new(n: usize) -> Result<Self> {
        check_ground(n)?;
        Ok(Self { n, coefficients: BTreeMap::new() })
    }

    /// `Σ_i linear[i]·x_{i+1} + constant`.
    pub fn linear(n: usize, linear: &[Rational], constant: Rational) -> Result<Self> {
        if linear.len() != n {
            return Err(invalid(format!("expected {n} linear coefficients, got {}", linear.len())));
        }
        let mut g = Self::new(n)?;
        g.set(SubsetIndex::empty(n), constant);
        for (i, c) in linear.iter().enumerate() {
            g.set(SubsetIndex::new(1 << i, n)?, c.clone());
        }
        Ok(g)
    }

    pub fn constant(n: usize, c: Rational) -> Result<Self> {
        let mut g = Self::new(n)?;
        g.set(SubsetIndex::empty(n), c);
        Ok(g)
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, term: SubsetIndex, coefficient: Rational) {
        if coefficient.is_zero() {
            self.coefficients.remove(&term.bits());
        } else {
            self.coefficients.insert(term.bits(), coefficient);
        }
    }

    pub fn coefficient(&self, term: SubsetIndex) -> Rational {
        self.coefficients.get(&term.bits()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.coefficients.iter().map(|(&b, r)| (b, r))
    }

    /// `g(I)`: the polynomial evaluated at the 0/1 point whose ones are `I`.
    pub fn value_at(&self, s: SubsetIndex) -> Rational {
        self.value_at_bits(s.bits())
    }

    pub(crate) fn value_at_bits(&self, bits: u32) -> Rational {
        self.coefficients.iter().filter(|(&k, _)| k & !bits == 0).fold(Rational::zero(), |acc, (_, c)| acc + c)
    }

    pub fn scaled(&self, c: &Rational) -> ConstraintPolynomial {
        let mut out = self.clone();
        for v in out.coefficients.values_mut() {
            *v = &*v * c;
        }
        out.coefficients.retain(|_, v| !v.is_zero());
        out
    }
}

fn same_ground(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(invalid(format!("ground sizes differ: {a} vs {b}")));
    }
    Ok(())
}

/// `w_{I,J} = Σ_{H⊆J} (-1)^{|H|} w_{H∪I}`.
pub fn pair_value(w: &LatticeVector, i: SubsetIndex, j: SubsetIndex) -> Result<Rational> {
    same_ground(w.ground_size(), i.ground_size())?;
    same_ground(w.ground_size(), j.ground_size())?;
    let mut acc = Rational::zero();
    for h in submasks(j.bits()) {
        let v = w.get_bits(h | i.bits());
        if h.count_ones() % 2 == 0 {
            acc += v;
        } else {
            acc -= v;
        }
    }
    Ok(acc)
}

/// Moments to pseudo-probabilities: `w^N_I = w_{I, N∖I}`, computed with an
/// in-place superset Möbius transform in `O(n·2^n)`.
pub fn to_pseudo_probabilities(w: &LatticeVector) -> LatticeVector {
    let n = w.ground_size();
    let mut a = w.to_dense();
    for bit in 0..n {
        let m = 1usize << bit;
        for mask in 0..a.len() {
            if mask & m == 0 {
                let hi = a[mask | m].clone();
                a[mask] -= hi;
            }
        }
    }
    LatticeVector::from_dense(n, VectorKind::PseudoProbabilities, a).expect("size already checked")
}

/// Pseudo-probabilities to moments: `w_J = Σ_{S⊇J} p_S`.
pub fn from_pseudo_probabilities(p: &LatticeVector) -> LatticeVector {
    let n = p.ground_size();
    let mut a = p.to_dense();
    for bit in 0..n {
        let m = 1usize << bit;
        for mask in 0..a.len() {
            if mask & m == 0 {
                let hi = a[mask | m].clone();
                a[mask] += hi;
            }
        }
    }
    LatticeVector::from_dense(n, VectorKind::Moments, a).expect("size already checked")
}

/// Moments of the point mass on the 0/1 vector with ones exactly on `s`.
pub fn point_mass_moments(s: SubsetIndex) -> LatticeVector {
    let n = s.ground_size();
    let entries = submasks(s.bits()).map(|b| (SubsetIndex::new(b, n).expect("submask"), Rational::one()));
    LatticeVector::from_entries(n, VectorKind::Moments, entries).expect("valid ground")
}

/// Moments with every entry equal to one (point mass on the all-ones vector).
pub fn all_ones_moments(n: usize) -> Result<LatticeVector> {
    Ok(point_mass_moments(SubsetIndex::full(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn v2(vals: [Rational; 4], kind: VectorKind) -> LatticeVector {
        LatticeVector::from_dense(2, kind, vals.to_vec()).unwrap()
    }

    fn s(e: &[usize], n: usize) -> SubsetIndex {
        SubsetIndex::from_elements(e, n).unwrap()
    }

    #[test]
    fn pair_value_examples() {
        let w = v2([int(1), frac(1, 2), frac(1, 2), frac(1, 4)], VectorKind::Moments);
        assert_eq!(pair_value(&w, s(&[1], 2), s(&[1], 2)).unwrap(), int(0));
        assert_eq!(pair_value(&w, s(&[], 2), s(&[], 2)).unwrap(), int(1));
        assert_eq!(pair_value(&w, s(&[], 2), s(&[1, 2], 2)).unwrap(), frac(1, 4));
        assert!(pair_value(&w, s(&[], 3), s(&[], 2)).is_err());
    }

    #[test]
    fn uniform_distribution_on_two_bits() {
        let w = v2([int(1), frac(1, 2), frac(1, 2), frac(1, 4)], VectorKind::Moments);
        let p = to_pseudo_probabilities(&w);
        for b in 0..4 {
            assert_eq!(p.get_bits(b), frac(1, 4));
        }
        assert_eq!(from_pseudo_probabilities(&p), w);
    }

    #[test]
    fn symbolic_layout_two_bits() {
        // y = (y0, y1, y2, y12) with distinct primes so each entry is identifiable.
        let (y0, y1, y2, y12) = (int(2), int(3), int(5), int(7));
        let w = v2([y0.clone(), y1.clone(), y2.clone(), y12.clone()], VectorKind::Moments);
        let p = to_pseudo_probabilities(&w);
        assert_eq!(p.get_bits(0), &y0 - &y1 - &y2 + &y12);
        assert_eq!(p.get_bits(1), &y1 - &y12);
        assert_eq!(p.get_bits(2), &y2 - &y12);
        assert_eq!(p.get_bits(3), y12);
    }

    #[test]
    fn zero_solution_and_full_point_mass() {
        let w = LatticeVector::from_entries(3, VectorKind::Moments, [(SubsetIndex::empty(3), int(1))]).unwrap();
        let p = to_pseudo_probabilities(&w);
        assert_eq!(p.nonzero_entries(), vec![(SubsetIndex::empty(3), int(1))]);

        let q =
            LatticeVector::from_entries(3, VectorKind::PseudoProbabilities, [(SubsetIndex::full(3), int(1))]).unwrap();
        let m = from_pseudo_probabilities(&q);
        assert!((0..8).all(|b| m.get_bits(b) == int(1)));
        assert_eq!(m, all_ones_moments(3).unwrap());
    }

    #[test]
    fn storage_switches_with_density() {
        let sparse = LatticeVector::from_entries(4, VectorKind::Moments, [(SubsetIndex::empty(4), int(1))]).unwrap();
        assert!(!sparse.is_dense());
        let dense = LatticeVector::from_dense(4, VectorKind::Moments, vec![int(1); 16]).unwrap();
        assert!(dense.is_dense());
    }

    #[test]
    fn constraint_values() {
        // g = 3x1 + x2 - x3 - 3 at I = {1,3}
        let g = ConstraintPolynomial::linear(3, &[int(3), int(1), int(-1)], int(-3)).unwrap();
        assert_eq!(g.value_at(s(&[1, 3], 3)), int(-1));
        assert_eq!(g.value_at(SubsetIndex::empty(3)), int(-3));
    }
}
