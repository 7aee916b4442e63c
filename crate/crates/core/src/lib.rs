// SPDX-License-Identifier: Apache-2.0

//! Logic-synthesis flow exploration with an advantage actor-critic agent.
//!
//! The crate bundles an AIG toolkit ([`aig`]), seven size- and depth-oriented
//! optimizations ([`transforms`]), the reinforcement-learning environment
//! ([`env`]), a small neural-network substrate ([`nn`]), the agent
//! ([`agent`]) and comparison baselines ([`baselines`]).

pub mod agent;
pub mod aig;
pub mod baselines;
pub mod bench;
pub mod env;
pub mod nn;
pub mod transforms;
