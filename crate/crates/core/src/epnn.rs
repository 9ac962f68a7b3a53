//! EPNN as an exact color-refinement test over a [`SpectralPair`].
//!
//! Node `i` starts with the quantized pair `(λ, V_i ⊙ V_i)` and is refined
//! by the multiset `{(color_j, V_i ⊙ V_j) : j = 0..n}` over *all* nodes.
//! Injective dictionary coloring stands in for the most discriminating
//! choice of update and readout functions.

use serde::Serialize;

use crate::color::{
    class_count, sorted_multiset, Color, ColorKey, ColorState, ColorTable, GlobalColor, Quantizer,
};
use crate::eigen::SpectralPair;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const DEFAULT_ZERO_TOL: f64 = 1e-6;

/// Holds the quantizer and the color dictionary. Colors and readouts are
/// comparable across inputs processed by the same refiner.
#[derive(Debug)]
pub struct ColorRefiner {
    quantizer: Quantizer,
    table: ColorTable,
}

impl ColorRefiner {
    pub fn new(quantizer: Quantizer) -> Self {
        ColorRefiner { quantizer, table: ColorTable::new() }
    }

    pub fn quantizer(&self) -> &Quantizer {
        &self.quantizer
    }

    pub fn epnn_init(&mut self, sp: &SpectralPair) -> ColorState {
        self.epnn_init_many(&[sp]).pop().expect("one state")
    }

    pub fn epnn_step(&mut self, state: &ColorState, sp: &SpectralPair) -> Result<ColorState> {
        Ok(self.epnn_step_many(&[(state, sp)])?.pop().expect("one state"))
    }

    pub fn readout(&mut self, state: &ColorState) -> GlobalColor {
        self.table.readout(state.colors())
    }

    /// Initial colors of several inputs with a common color dictionary.
    pub fn epnn_init_many(&mut self, sps: &[&SpectralPair]) -> Vec<ColorState> {
        let keys: Vec<Vec<ColorKey>> = sps.iter().map(|sp| self.init_keys(sp)).collect();
        self.table.colors(&keys).into_iter().map(ColorState::initial).collect()
    }

    pub fn epnn_step_many(&mut self, inputs: &[(&ColorState, &SpectralPair)]) -> Result<Vec<ColorState>> {
        let mut keys = Vec::with_capacity(inputs.len());
        for (state, sp) in inputs {
            check_dims(state.colors().len(), sp.n())?;
            keys.push(self.refine_keys(state.round() + 1, state.colors(), sp.vectors()));
        }
        Ok(self
            .table
            .colors(&keys)
            .into_iter()
            .zip(inputs)
            .map(|(colors, (state, _))| state.advanced(colors))
            .collect())
    }

    pub(crate) fn init_keys(&self, sp: &SpectralPair) -> Vec<ColorKey> {
        let lambdas = self.quantizer.quantize_all(sp.lambdas());
        (0..sp.n())
            .map(|i| ColorKey::SpectralInit {
                lambdas: lambdas.clone(),
                squares: self.quantizer.product(sp.row(i), sp.row(i)),
            })
            .collect()
    }

    /// Keys for one refinement round with eigenvector-like rows `vecs`.
    pub(crate) fn refine_keys(&self, round: usize, colors: &[Color], vecs: &Matrix) -> Vec<ColorKey> {
        let n = vecs.rows();
        (0..n)
            .map(|i| {
                let mut purview: Vec<(Color, Vec<i64>)> = (0..n)
                    .map(|j| (colors[j], self.quantizer.product(vecs.row(i), vecs.row(j))))
                    .collect();
                purview.sort_unstable();
                ColorKey::SpectralRefine { round, own: colors[i], purview }
            })
            .collect()
    }

    pub(crate) fn table(&mut self) -> &mut ColorTable {
        &mut self.table
    }
}

pub(crate) fn check_dims(colors: usize, n: usize) -> Result<()> {
    if colors != n {
        return Err(Error::domain(format!(
            "color state has {colors} nodes but the spectral pair has {n}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Separated,
    Indistinguishable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationVerdict {
    pub outcome: Outcome,
    /// First round whose readouts differ; `None` when indistinguishable.
    pub round: Option<usize>,
    pub rounds_run: usize,
    /// Number of distinct colors over both inputs, per round.
    pub color_class_counts: Vec<usize>,
}

impl SeparationVerdict {
    pub fn is_separated(&self) -> bool {
        self.outcome == Outcome::Separated
    }

    pub(crate) fn separated_at(round: usize, counts: Vec<usize>) -> Self {
        SeparationVerdict {
            outcome: Outcome::Separated,
            round: Some(round),
            rounds_run: round,
            color_class_counts: counts,
        }
    }

    pub(crate) fn indistinguishable(rounds_run: usize, counts: Vec<usize>) -> Self {
        SeparationVerdict {
            outcome: Outcome::Indistinguishable,
            round: None,
            rounds_run,
            color_class_counts: counts,
        }
    }
}

/// Checks shared by both distinguish drivers. Returns `Some(verdict)` when
/// the inputs differ before any refinement.
pub(crate) fn precheck(
    a: &SpectralPair,
    b: &SpectralPair,
    max_rounds: usize,
    q: &Quantizer,
) -> Result<Option<SeparationVerdict>> {
    if max_rounds == 0 {
        return Err(Error::domain("max_rounds must be positive"));
    }
    if a.k() != b.k() {
        return Err(Error::KMismatch { a: a.k(), b: b.k() });
    }
    if a.n() != b.n() || q.quantize_all(a.lambdas()) != q.quantize_all(b.lambdas()) {
        return Ok(Some(SeparationVerdict::separated_at(0, Vec::new())));
    }
    Ok(None)
}

pub(crate) fn joint_count(a: &[Color], b: &[Color]) -> usize {
    let mut all: Vec<Color> = a.iter().chain(b).copied().collect();
    all.sort_unstable();
    all.dedup();
    all.len()
}

/// Synchronized refinement of both inputs. Separated at the first round whose
/// color multisets differ; indistinguishable once the joint partition stops
/// refining (at most `n` rounds) or after `max_rounds`.
pub fn epnn_distinguish(
    a: &SpectralPair,
    b: &SpectralPair,
    max_rounds: usize,
    q: &Quantizer,
) -> Result<SeparationVerdict> {
    if let Some(v) = precheck(a, b, max_rounds, q)? {
        return Ok(v);
    }
    let mut refiner = ColorRefiner::new(*q);
    let mut states = refiner.epnn_init_many(&[a, b]);
    let mut counts = vec![joint_count(states[0].colors(), states[1].colors())];
    if sorted_multiset(states[0].colors()) != sorted_multiset(states[1].colors()) {
        return Ok(SeparationVerdict::separated_at(0, counts));
    }
    for round in 1..=max_rounds {
        states = refiner.epnn_step_many(&[(&states[0], a), (&states[1], b)])?;
        let count = joint_count(states[0].colors(), states[1].colors());
        let stable = count == *counts.last().expect("non-empty");
        counts.push(count);
        if sorted_multiset(states[0].colors()) != sorted_multiset(states[1].colors()) {
            return Ok(SeparationVerdict::separated_at(round, counts));
        }
        if stable {
            return Ok(SeparationVerdict::indistinguishable(round, counts));
        }
    }
    Ok(SeparationVerdict::indistinguishable(max_rounds, counts))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reconstruction {
    pub anchor_row: usize,
    pub recovered: Matrix,
}

/// Recovers `V` up to column signs from the purview of a node whose row has no
/// zero entry: dividing `V_a ⊙ V_j` by `|V_a|` yields `sign(V_a) ⊙ V_j`, which
/// is `V` with every column flipped so that the anchor row is positive.
pub fn reconstruct_from_purview(sp: &SpectralPair, zero_tol: f64) -> Result<Reconstruction> {
    let anchor = (0..sp.n())
        .find(|&i| sp.row(i).iter().all(|x| x.abs() > zero_tol))
        .ok_or_else(|| {
            Error::FailedPrecondition("every row of V contains a zero entry".into())
        })?;
    let a = sp.row(anchor);
    let mut recovered = Matrix::zeros(sp.n(), sp.k());
    for j in 0..sp.n() {
        for (q, (x, y)) in a.iter().zip(sp.row(j)).enumerate() {
            recovered[(j, q)] = x * y / x.abs();
        }
    }
    Ok(Reconstruction { anchor_row: anchor, recovered })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniqueIds {
    pub unique: bool,
    pub ids: Vec<Color>,
}

/// Colors after exactly one refinement round.
pub fn unique_node_ids(sp: &SpectralPair, q: &Quantizer) -> UniqueIds {
    let mut refiner = ColorRefiner::new(*q);
    let init = refiner.epnn_init(sp);
    let state = refiner.epnn_step(&init, sp).expect("state built from sp");
    let ids = state.colors().to_vec();
    UniqueIds { unique: class_count(&ids) == ids.len(), ids }
}
