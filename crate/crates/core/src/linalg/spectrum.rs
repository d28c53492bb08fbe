use std::cmp::Ordering;

use serde::Serialize;

use crate::scalar::Real;

/// Eigenvalues sorted by decreasing absolute value.
///
/// Ties in absolute value put the positive value first, then the smaller original index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum<T> {
    values: Vec<T>,
    /// original index -> sorted position
    positions: Vec<usize>,
    /// sorted position -> original index
    sources: Vec<usize>,
}

pub(crate) fn abs_order<T: Real>(a: (usize, T), b: (usize, T)) -> Ordering {
    b.1.abs()
        .partial_cmp(&a.1.abs())
        .unwrap_or(Ordering::Equal)
        .then_with(|| {
            // positive before negative
            let pa = a.1 >= T::zero();
            let pb = b.1 >= T::zero();
            pb.cmp(&pa)
        })
        .then_with(|| a.0.cmp(&b.0))
}

impl<T: Real> Spectrum<T> {
    pub fn from_values(raw: Vec<T>) -> Self {
        let mut idx: Vec<(usize, T)> = raw.into_iter().enumerate().collect();
        idx.sort_by(|a, b| abs_order(*a, *b));
        let mut positions = vec![0; idx.len()];
        let mut sources = Vec::with_capacity(idx.len());
        let mut values = Vec::with_capacity(idx.len());
        for (pos, (orig, v)) in idx.into_iter().enumerate() {
            positions[orig] = pos;
            sources.push(orig);
            values.push(v);
        }
        Self {
            values,
            positions,
            sources,
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `i`-th eigenvalue (0-based) in decreasing-|λ| order; zero beyond the stored length.
    pub fn get(&self, i: usize) -> T {
        self.values.get(i).copied().unwrap_or_else(T::zero)
    }

    pub fn position_of(&self, original: usize) -> usize {
        self.positions[original]
    }

    pub fn source_index(&self, position: usize) -> usize {
        self.sources[position]
    }

    /// Values sorted by signed value, descending.
    pub fn value_sorted(&self) -> Vec<T> {
        value_sorted_desc(&self.values)
    }

    pub fn max_abs(&self) -> T {
        self.values.first().map(|v| v.abs()).unwrap_or_else(T::zero)
    }
}

pub(crate) fn value_sorted_desc<T: Real>(v: &[T]) -> Vec<T> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    s
}

/// Permutation-minimal ℓ₂ distance between two finite sequences viewed as zero-padded
/// infinite sequences.
///
/// Padding both to `a.len() + b.len()` leaves room to match every entry with a zero, which is
/// all the infinite padding can offer. Sorting both by signed value and pairing position-wise
/// is then optimal by the rearrangement inequality.
pub fn delta2<T: Real>(a: &[T], b: &[T]) -> T {
    let len = a.len() + b.len();
    let mut pa = a.to_vec();
    pa.resize(len, T::zero());
    let mut pb = b.to_vec();
    pb.resize(len, T::zero());
    let sa = value_sorted_desc(&pa);
    let sb = value_sorted_desc(&pb);
    sa.iter()
        .zip(&sb)
        .fold(T::zero(), |acc, (x, y)| acc + (*x - *y) * (*x - *y))
        .sqrt()
}

/// [`delta2`] over two spectra.
pub fn delta2_spectra<T: Real>(a: &Spectrum<T>, b: &Spectrum<T>) -> T {
    delta2(a.values(), b.values())
}
