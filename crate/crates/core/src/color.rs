//! Quantization of real values and the color dictionary shared by every
//! refinement procedure.
//!
//! Colors are small integers handed out by a [`ColorTable`] from the full,
//! unhashed key they stand for, so two nodes share a color exactly when
//! their keys are equal. New keys of a round are inserted in sorted order,
//! which makes the ids independent of node order.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_QUANTIZER_SCALE: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantizer {
    scale: f64,
}

impl Default for Quantizer {
    fn default() -> Self {
        Quantizer { scale: DEFAULT_QUANTIZER_SCALE }
    }
}

impl Quantizer {
    pub fn new(scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::domain("quantizer scale must be a positive finite number"));
        }
        Ok(Quantizer { scale })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    #[inline]
    pub fn quantize(&self, x: f64) -> i64 {
        (x * self.scale).round() as i64
    }

    pub fn quantize_all(&self, xs: &[f64]) -> Vec<i64> {
        xs.iter().map(|&x| self.quantize(x)).collect()
    }

    /// Quantized elementwise product `a ⊙ b`.
    pub fn product(&self, a: &[f64], b: &[f64]) -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| self.quantize(x * y)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Color(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct GlobalColor(pub u32);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum ColorKey {
    /// Quantized eigenvalues and the node's squared eigenvector row.
    SpectralInit { lambdas: Vec<i64>, squares: Vec<i64> },
    /// Own color plus the sorted multiset of (other color, quantized product).
    SpectralRefine { round: usize, own: Color, purview: Vec<(Color, Vec<i64>)> },
    PlainInit,
    PlainRefine { round: usize, own: Color, neighbors: Vec<Color> },
    Readout { colors: Vec<Color> },
}

#[derive(Debug, Default)]
pub(crate) struct ColorTable {
    ids: HashMap<ColorKey, u32>,
}

impl ColorTable {
    pub(crate) fn new() -> Self {
        ColorTable::default()
    }

    /// Maps every key of every input to its id, inserting unseen keys in
    /// sorted order.
    pub(crate) fn assign(&mut self, keys: &[Vec<ColorKey>]) -> Vec<Vec<u32>> {
        let mut fresh: Vec<&ColorKey> = keys
            .iter()
            .flatten()
            .filter(|k| !self.ids.contains_key(*k))
            .collect();
        fresh.sort_unstable();
        fresh.dedup();
        let fresh: Vec<ColorKey> = fresh.into_iter().cloned().collect();
        for key in fresh {
            let id = u32::try_from(self.ids.len()).expect("color table overflow");
            self.ids.insert(key, id);
        }
        keys.iter()
            .map(|ks| ks.iter().map(|k| self.ids[k]).collect())
            .collect()
    }

    pub(crate) fn colors(&mut self, keys: &[Vec<ColorKey>]) -> Vec<Vec<Color>> {
        self.assign(keys)
            .into_iter()
            .map(|v| v.into_iter().map(Color).collect())
            .collect()
    }

    pub(crate) fn readout(&mut self, colors: &[Color]) -> GlobalColor {
        let mut sorted = colors.to_vec();
        sorted.sort_unstable();
        GlobalColor(self.assign(&[vec![ColorKey::Readout { colors: sorted }]])[0][0])
    }
}

/// Per-round color vectors of one input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorState {
    history: Vec<Vec<Color>>,
}

impl ColorState {
    pub(crate) fn initial(colors: Vec<Color>) -> Self {
        ColorState { history: vec![colors] }
    }

    pub(crate) fn advanced(&self, colors: Vec<Color>) -> Self {
        let mut history = self.history.clone();
        history.push(colors);
        ColorState { history }
    }

    /// Number of refinement rounds applied so far.
    pub fn round(&self) -> usize {
        self.history.len() - 1
    }

    pub fn colors(&self) -> &[Color] {
        self.history.last().expect("non-empty history")
    }

    pub fn history(&self) -> &[Vec<Color>] {
        &self.history
    }

    pub fn class_count(&self) -> usize {
        class_count(self.colors())
    }

    /// Canonical partition: node indices grouped by color, groups ordered by
    /// their smallest member.
    pub fn partition(&self) -> Vec<Vec<usize>> {
        partition_of(self.colors())
    }
}

pub(crate) fn class_count(colors: &[Color]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

pub(crate) fn partition_of(colors: &[Color]) -> Vec<Vec<usize>> {
    let mut first_seen: HashMap<Color, usize> = HashMap::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (i, c) in colors.iter().enumerate() {
        let b = *first_seen.entry(*c).or_insert_with(|| {
            blocks.push(Vec::new());
            blocks.len() - 1
        });
        blocks[b].push(i);
    }
    blocks
}

pub(crate) fn sorted_multiset(colors: &[Color]) -> Vec<Color> {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c
}
