//! Classical 1-WL color refinement on the adjacency structure.

use crate::color::{sorted_multiset, ColorKey, ColorState, ColorTable};
use crate::epnn::{joint_count, SeparationVerdict};
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Default)]
pub struct WlRefiner {
    table: ColorTable,
}

impl WlRefiner {
    pub fn new() -> Self {
        WlRefiner::default()
    }

    pub fn init_many(&mut self, graphs: &[&Graph]) -> Vec<ColorState> {
        let keys: Vec<Vec<ColorKey>> = graphs.iter().map(|g| vec![ColorKey::PlainInit; g.n()]).collect();
        self.table.colors(&keys).into_iter().map(ColorState::initial).collect()
    }

    pub fn step_many(&mut self, inputs: &[(&ColorState, &Graph)]) -> Vec<ColorState> {
        let keys: Vec<Vec<ColorKey>> = inputs
            .iter()
            .map(|(state, g)| {
                let colors = state.colors();
                g.neighbors()
                    .into_iter()
                    .enumerate()
                    .map(|(i, nbrs)| {
                        let mut neighbors: Vec<_> = nbrs.into_iter().map(|j| colors[j]).collect();
                        neighbors.sort_unstable();
                        ColorKey::PlainRefine { round: state.round() + 1, own: colors[i], neighbors }
                    })
                    .collect()
            })
            .collect();
        let colors = self.table.colors(&keys);
        inputs.iter().zip(colors).map(|((state, _), c)| state.advanced(c)).collect()
    }
}

pub fn wl1_distinguish(a: &Graph, b: &Graph, max_rounds: usize) -> Result<SeparationVerdict> {
    if max_rounds == 0 {
        return Err(Error::domain("max_rounds must be positive"));
    }
    if a.n() != b.n() {
        return Ok(SeparationVerdict::separated_at(0, Vec::new()));
    }
    let mut refiner = WlRefiner::new();
    let mut states = refiner.init_many(&[a, b]);
    let mut counts = vec![joint_count(states[0].colors(), states[1].colors())];
    for round in 1..=max_rounds {
        states = refiner.step_many(&[(&states[0], a), (&states[1], b)]);
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_graphs_fool_wl() {
        // C6 and two disjoint triangles are both 2-regular.
        let two_triangles = Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let v = wl1_distinguish(&Graph::cycle(6), &two_triangles, 10).unwrap();
        assert!(!v.is_separated());
        assert_eq!(v.rounds_run, 1);
    }

    #[test]
    fn path_and_star() {
        let v = wl1_distinguish(&Graph::path(4), &Graph::star(3), 10).unwrap();
        assert!(v.is_separated());
        assert_eq!(v.round, Some(1));
        let same = wl1_distinguish(&Graph::path(5), &Graph::path(5), 10).unwrap();
        assert!(!same.is_separated());
    }
}
