use alloc::vec::Vec;
use core::fmt;

use crate::{Error, FeatureVector, Result};

/// A binary class label in {-1, +1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn from_i64(v: i64) -> Result<Self> {
        match v {
            -1 => Ok(Label::Negative),
            1 => Ok(Label::Positive),
            other => Err(Error::InvalidLabel(other)),
        }
    }

    #[inline]
    pub fn value(self) -> i8 {
        match self {
            Label::Negative => -1,
            Label::Positive => 1,
        }
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        f64::from(self.value())
    }

    #[inline]
    pub fn flipped(self) -> Self {
        match self {
            Label::Negative => Label::Positive,
            Label::Positive => Label::Negative,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Negative => f.write_str("-1"),
            Label::Positive => f.write_str("+1"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub x: FeatureVector,
    pub y: Label,
}

impl LabeledExample {
    pub fn new(x: FeatureVector, y: Label) -> Self {
        LabeledExample { x, y }
    }
}

/// Ordered labeled examples sharing one dimension.
///
/// An empty set still carries the dimension it was created with, so that
/// later pushes can be checked against it.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    dim: usize,
    items: Vec<LabeledExample>,
}

impl SampleSet {
    pub fn new(dim: usize) -> Self {
        SampleSet {
            dim,
            items: Vec::new(),
        }
    }

    pub fn from_examples(dim: usize, items: Vec<LabeledExample>) -> Result<Self> {
        for ex in &items {
            ex.x.check_dim(dim)?;
        }
        Ok(SampleSet { dim, items })
    }

    pub(crate) fn from_examples_unchecked(dim: usize, items: Vec<LabeledExample>) -> Self {
        debug_assert!(items.iter().all(|e| e.x.dim() == dim));
        SampleSet { dim, items }
    }

    pub fn push(&mut self, ex: LabeledExample) -> Result<()> {
        ex.x.check_dim(self.dim)?;
        self.items.push(ex);
        Ok(())
    }

    pub fn extend_from(&mut self, other: SampleSet) -> Result<()> {
        if !other.is_empty() && other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        self.items.extend(other.items);
        Ok(())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.items.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, LabeledExample> {
        self.items.iter()
    }

    pub fn as_slice(&self) -> &[LabeledExample] {
        &self.items
    }

    pub fn into_examples(self) -> Vec<LabeledExample> {
        self.items
    }

    /// Feature vectors only, in order.
    pub fn features(&self) -> UnlabeledSet {
        UnlabeledSet::from_vectors_unchecked(self.dim, self.items.iter().map(|e| e.x.clone()).collect())
    }

    /// Largest ‖x‖₂ over the set, 0 when empty.
    pub fn radius(&self) -> f64 {
        self.items.iter().map(|e| e.x.norm()).fold(0.0, f64::max)
    }

    /// Every row scaled to unit L2 norm (zero rows stay zero).
    pub fn l2_normalized(&self) -> SampleSet {
        SampleSet {
            dim: self.dim,
            items: self
                .items
                .iter()
                .map(|e| LabeledExample::new(e.x.normalized(), e.y))
                .collect(),
        }
    }
}

impl<'a> IntoIterator for &'a SampleSet {
    type Item = &'a LabeledExample;
    type IntoIter = core::slice::Iter<'a, LabeledExample>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// Ordered unlabeled feature vectors sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct UnlabeledSet {
    dim: usize,
    items: Vec<FeatureVector>,
}

impl UnlabeledSet {
    pub fn new(dim: usize) -> Self {
        UnlabeledSet {
            dim,
            items: Vec::new(),
        }
    }

    pub fn from_vectors(dim: usize, items: Vec<FeatureVector>) -> Result<Self> {
        for x in &items {
            x.check_dim(dim)?;
        }
        Ok(UnlabeledSet { dim, items })
    }

    pub(crate) fn from_vectors_unchecked(dim: usize, items: Vec<FeatureVector>) -> Self {
        debug_assert!(items.iter().all(|x| x.dim() == dim));
        UnlabeledSet { dim, items }
    }

    pub fn push(&mut self, x: FeatureVector) -> Result<()> {
        x.check_dim(self.dim)?;
        self.items.push(x);
        Ok(())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.items.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, FeatureVector> {
        self.items.iter()
    }

    pub fn as_slice(&self) -> &[FeatureVector] {
        &self.items
    }

    pub fn into_vectors(self) -> Vec<FeatureVector> {
        self.items
    }
}

impl<'a> IntoIterator for &'a UnlabeledSet {
    type Item = &'a FeatureVector;
    type IntoIter = core::slice::Iter<'a, FeatureVector>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}
