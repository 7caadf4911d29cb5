use rand::seq::{index, IndexedRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::{OpId, RoutingChart};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionStrategy {
    /// At least one per up transition, remainder round-robin.
    #[default]
    Spread,
    Random,
    /// First operators in catalog order.
    Prefix,
}

/// Chooses `count` up operators to tune, returned in catalog order.
pub fn select_varied_operators(
    chart: &RoutingChart,
    count: usize,
    strategy: SelectionStrategy,
    seed: u64,
) -> Result<Vec<OpId>> {
    let catalog: Vec<OpId> = chart.up_ops().map(|o| o.id).collect();
    if count > catalog.len() {
        return Err(Error::InvalidParams(format!(
            "{count} varied operators requested, chart has {} up operators",
            catalog.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<OpId> = match strategy {
        SelectionStrategy::Prefix => catalog[..count].to_vec(),
        SelectionStrategy::Random => index::sample(&mut rng, catalog.len(), count)
            .into_iter()
            .map(|k| catalog[k])
            .collect(),
        SelectionStrategy::Spread => {
            let mut pools: Vec<Vec<OpId>> = chart
                .up_transitions()
                .map(|t| t.ops.iter().map(|o| o.id).collect())
                .collect();
            if count < pools.len() {
                return Err(Error::InsufficientCount {
                    count,
                    required: pools.len(),
                });
            }
            let mut out = Vec::with_capacity(count);
            let slots = pools.len();
            let mut t = 0;
            while out.len() < count {
                let pool = &mut pools[t % slots];
                if let Some(&id) = pool.choose(&mut rng) {
                    pool.retain(|o| *o != id);
                    out.push(id);
                }
                t += 1;
            }
            out
        }
    };
    chosen.sort();
    Ok(chosen)
}
