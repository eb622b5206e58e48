//! Shared inputs for the benchmarks.

use tiltlab_core::choice::TriggerState;
use tiltlab_core::rum::{Observation, RumParams};
use tiltlab_core::synthetic::{generate_gambles, simulate_agent, AgentProfile, GambleGenConfig};

/// `n` synthetic observations drawn at `truth`, reproducible for a given seed.
pub fn observations(n: usize, truth: RumParams, seed: u64) -> Vec<Observation> {
    let gambles = generate_gambles(&GambleGenConfig {
        count: n,
        seed,
        ..Default::default()
    })
    .expect("default generator settings are feasible");
    let states = vec![TriggerState::Neutral; n];
    let choices = simulate_agent(&gambles, &AgentProfile::uniform(truth), &states, seed).expect("valid profile");
    gambles
        .into_iter()
        .zip(choices)
        .map(|(g, c)| Observation::new(g, c))
        .collect()
}
