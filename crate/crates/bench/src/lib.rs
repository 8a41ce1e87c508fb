//! Shared fixtures for the criterion benches: a synthetic world with a
//! trained router attached.

use synroute::eval::{train_router, ParseMap};
use synroute::synth::{SynthConfig, Workload, World};
use synroute::{build_engine, Config, Engine, MockJudge, Result};

pub struct Fixture {
    pub engine: Engine,
    pub workload: Workload,
    pub parses: ParseMap,
}

/// A `passages`-sized world, a router trained on a separate 200-query
/// workload from the default world, and `n_queries` test queries with the
/// given multi-hop share.
pub fn fixture(passages: usize, n_queries: usize, multi_hop: f64) -> Result<Fixture> {
    let cfg = Config::default();
    let small = World::generate(&SynthConfig::default())?;
    let trainer = build_engine(small.corpus.clone(), &cfg)?;
    let train = small.workload(200, 0.5, 11)?;
    let tr = train_router(&trainer, &train.queries, &train.parse_map()?, &MockJudge, &cfg)?;

    let world = World::generate(&SynthConfig::with_passages(passages, 5))?;
    let mut engine = build_engine(world.corpus.clone(), &cfg)?;
    engine.schema = Some(tr.schema);
    engine.adapter = Some(tr.adapter);
    let workload = world.workload(n_queries, multi_hop, 7)?;
    let parses = workload.parse_map()?;
    Ok(Fixture { engine, workload, parses })
}
