//! Equivariant EPNN: an invariant color refined alongside a sign-equivariant
//! vector per node,
//!
//! ```text
//! v_i ← v_i + Σ_j v_j ⊙ UPDATE(h_i, h_j, v_i ⊙ v_j)
//! ```
//!
//! with the update evaluated on quantized invariant arguments only.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::color::{sorted_multiset, Color, ColorState, Quantizer};
use crate::eigen::SpectralPair;
use crate::epnn::{check_dims, joint_count, precheck, ColorRefiner, SeparationVerdict};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UpdateRule {
    /// Constant zero vector; reduces the procedure to plain EPNN.
    Zero,
    /// Fires on the triple `(v₅⊙v₅, v₁⊙v₁, v₅⊙v₁)` of the 12-node block
    /// counterexample in the first round and outputs `(1,1,0,0,0,0)`.
    ProofRule,
    /// Seeded pseudo-random map from quantized triples to `[-1, 1]^K`.
    RandomTable { seed: u64 },
}

impl UpdateRule {
    pub fn default_set(seeds: &[u64]) -> Vec<UpdateRule> {
        std::iter::once(UpdateRule::ProofRule)
            .chain(seeds.iter().map(|&seed| UpdateRule::RandomTable { seed }))
            .collect()
    }
}

impl fmt::Display for UpdateRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpdateRule::Zero => write!(f, "zero"),
            UpdateRule::ProofRule => write!(f, "proof_rule"),
            UpdateRule::RandomTable { seed } => write!(f, "random_table({seed})"),
        }
    }
}

impl std::str::FromStr for UpdateRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(UpdateRule::Zero),
            "proof_rule" => Ok(UpdateRule::ProofRule),
            _ => s
                .strip_prefix("random_table(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|seed| seed.parse().ok())
                .map(|seed| UpdateRule::RandomTable { seed })
                .ok_or_else(|| Error::domain(format!("unknown update rule {s:?}"))),
        }
    }
}

/// Quantized invariant arguments of one `(i, j)` update.
struct RuleArgs<'a> {
    step: usize,
    color_i: Color,
    color_j: Color,
    square_i: &'a [i64],
    square_j: &'a [i64],
    product: &'a [i64],
}

struct ProofTrigger {
    square_i: Vec<i64>,
    square_j: Vec<i64>,
    product: Vec<i64>,
}

impl ProofTrigger {
    fn new(q: &Quantizer) -> Self {
        // Nodes 5 and 1 (1-based) of U: (0₂; z₀; z₀) and (z₀; z₀; 0₂).
        let v5 = [0.0, 0.0, 1.0, 1.0, 1.0, 1.0];
        let v1 = [1.0, 1.0, 1.0, 1.0, 0.0, 0.0];
        ProofTrigger {
            square_i: q.product(&v5, &v5),
            square_j: q.product(&v1, &v1),
            product: q.product(&v5, &v1),
        }
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn table_key(seed: u64, args: &RuleArgs<'_>) -> u64 {
    let mut h = splitmix(seed);
    let mut absorb = |v: u64| h = splitmix(h ^ v);
    absorb(u64::from(args.color_i.0));
    absorb(u64::from(args.color_j.0));
    for &p in args.product {
        absorb(p as u64);
    }
    h
}

impl UpdateRule {
    fn evaluate(&self, args: &RuleArgs<'_>, k: usize, trigger: &ProofTrigger) -> Option<Vec<f64>> {
        match self {
            UpdateRule::Zero => None,
            UpdateRule::ProofRule => {
                let fires = k == 6
                    && args.step == 1
                    && args.square_i == trigger.square_i
                    && args.square_j == trigger.square_j
                    && args.product == trigger.product;
                fires.then(|| vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0])
            }
            UpdateRule::RandomTable { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(table_key(*seed, args));
                Some((0..k).map(|_| rng.gen_range(-1.0..=1.0)).collect())
            }
        }
    }
}

/// Sum whose result is unchanged by reordering the terms and exactly negated
/// when every term is negated.
pub(crate) fn symmetric_sum(terms: &mut [f64]) -> f64 {
    terms.sort_unstable_by(|a, b| a.abs().total_cmp(&b.abs()));
    let pos: f64 = terms.iter().filter(|&&x| x > 0.0).sum();
    let neg: f64 = terms.iter().filter(|&&x| x < 0.0).map(|x| -x).sum();
    pos - neg
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquiState {
    colors: ColorState,
    vecs: Matrix,
}

impl EquiState {
    pub fn round(&self) -> usize {
        self.colors.round()
    }

    pub fn colors(&self) -> &[Color] {
        self.colors.colors()
    }

    pub fn color_state(&self) -> &ColorState {
        &self.colors
    }

    /// Current equivariant features, one row per node.
    pub fn vecs(&self) -> &Matrix {
        &self.vecs
    }
}

impl ColorRefiner {
    pub fn equi_init(&mut self, sp: &SpectralPair) -> EquiState {
        EquiState { colors: self.epnn_init(sp), vecs: sp.vectors().clone() }
    }

    pub fn equi_init_many(&mut self, sps: &[&SpectralPair]) -> Vec<EquiState> {
        self.epnn_init_many(sps)
            .into_iter()
            .zip(sps)
            .map(|(colors, sp)| EquiState { colors, vecs: sp.vectors().clone() })
            .collect()
    }

    pub fn equi_step(&mut self, state: &EquiState, sp: &SpectralPair, rule: UpdateRule) -> Result<EquiState> {
        Ok(self.equi_step_many(&[(state, sp)], rule)?.pop().expect("one state"))
    }

    pub fn equi_step_many(
        &mut self,
        inputs: &[(&EquiState, &SpectralPair)],
        rule: UpdateRule,
    ) -> Result<Vec<EquiState>> {
        let mut keys = Vec::with_capacity(inputs.len());
        let mut new_vecs = Vec::with_capacity(inputs.len());
        for (state, sp) in inputs {
            check_dims(state.colors().len(), sp.n())?;
            if state.vecs.rows() != sp.n() || state.vecs.cols() != sp.k() {
                return Err(Error::domain("equivariant features do not match the spectral pair"));
            }
            let step = state.round() + 1;
            keys.push(self.refine_keys(step, state.colors(), &state.vecs));
            new_vecs.push(self.update_vecs(step, state, rule));
        }
        let colors = self.table().colors(&keys);
        Ok(inputs
            .iter()
            .zip(colors)
            .zip(new_vecs)
            .map(|(((state, _), colors), vecs)| EquiState {
                colors: state.colors.advanced(colors),
                vecs,
            })
            .collect())
    }

    fn update_vecs(&self, step: usize, state: &EquiState, rule: UpdateRule) -> Matrix {
        if rule == UpdateRule::Zero {
            return state.vecs.clone();
        }
        let q = *self.quantizer();
        let trigger = ProofTrigger::new(&q);
        let v = &state.vecs;
        let (n, k) = (v.rows(), v.cols());
        let squares: Vec<Vec<i64>> = (0..n).map(|i| q.product(v.row(i), v.row(i))).collect();
        let colors = state.colors();
        let mut out = v.clone();
        let mut terms: Vec<Vec<f64>> = vec![Vec::with_capacity(n); k];
        for i in 0..n {
            terms.iter_mut().for_each(Vec::clear);
            for j in 0..n {
                let product = q.product(v.row(i), v.row(j));
                let args = RuleArgs {
                    step,
                    color_i: colors[i],
                    color_j: colors[j],
                    square_i: &squares[i],
                    square_j: &squares[j],
                    product: &product,
                };
                if let Some(w) = rule.evaluate(&args, k, &trigger) {
                    for c in 0..k {
                        terms[c].push(v[(j, c)] * w[c]);
                    }
                }
            }
            for c in 0..k {
                if !terms[c].is_empty() {
                    out[(i, c)] = v[(i, c)] + symmetric_sum(&mut terms[c]);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquiVerdict {
    #[serde(flatten)]
    pub verdict: SeparationVerdict,
    /// Rule that separated the inputs.
    pub rule: Option<String>,
}

fn run_rule(
    a: &SpectralPair,
    b: &SpectralPair,
    rule: UpdateRule,
    max_rounds: usize,
    q: &Quantizer,
) -> Result<SeparationVerdict> {
    let mut refiner = ColorRefiner::new(*q);
    let mut states = refiner.equi_init_many(&[a, b]);
    let mut counts = vec![joint_count(states[0].colors(), states[1].colors())];
    if sorted_multiset(states[0].colors()) != sorted_multiset(states[1].colors()) {
        return Ok(SeparationVerdict::separated_at(0, counts));
    }
    for round in 1..=max_rounds {
        states = refiner.equi_step_many(&[(&states[0], a), (&states[1], b)], rule)?;
        let count = joint_count(states[0].colors(), states[1].colors());
        let stable = count == *counts.last().expect("non-empty");
        counts.push(count);
        if sorted_multiset(states[0].colors()) != sorted_multiset(states[1].colors()) {
            return Ok(SeparationVerdict::separated_at(round, counts));
        }
        // Only the zero rule leaves the features fixed, so only then does a
        // stable partition end the run.
        if stable && rule == UpdateRule::Zero {
            return Ok(SeparationVerdict::indistinguishable(round, counts));
        }
    }
    Ok(SeparationVerdict::indistinguishable(max_rounds, counts))
}

/// Separated if any rule separates within `max_rounds`; the first such rule
/// in list order is reported.
pub fn equi_distinguish(
    a: &SpectralPair,
    b: &SpectralPair,
    rules: &[UpdateRule],
    max_rounds: usize,
    q: &Quantizer,
) -> Result<EquiVerdict> {
    if rules.is_empty() {
        return Err(Error::domain("at least one update rule is required"));
    }
    if let Some(verdict) = precheck(a, b, max_rounds, q)? {
        return Ok(EquiVerdict { verdict, rule: None });
    }
    let mut first = None;
    for &rule in rules {
        let verdict = run_rule(a, b, rule, max_rounds, q)?;
        if verdict.is_separated() {
            return Ok(EquiVerdict { verdict, rule: Some(rule.to_string()) });
        }
        first.get_or_insert(verdict);
    }
    Ok(EquiVerdict { verdict: first.expect("non-empty rules"), rule: None })
}
