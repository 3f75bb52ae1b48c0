//! Decentralized swarm simulator in which each robot samples its next
//! velocity from a local Gibbs distribution via Metropolis-Hastings.
//!
//! The simulation core is generic over the scalar type ([`Real`], implemented
//! for `f32` and `f64`). The aliases at the crate root fix it to `f64`, which
//! is what the experiment harness and the command-line tool use.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod geometry;
pub mod potential;
pub mod sampler;
pub mod scalar;
pub mod sensing;
pub mod trace;
pub mod world;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Vec2 = geometry::Vec2<f64>;
pub type Polygon = geometry::Polygon<f64>;
pub type CBParams = potential::CBParams<f64>;
pub type EnergyParams = potential::EnergyParams<f64>;
pub type Perception = sensing::Perception<f64>;
pub type SensorParams = sensing::SensorParams<f64>;
pub type SamplerParams = sampler::SamplerParams<f64>;
pub type PhysicsParams = world::PhysicsParams<f64>;
pub type RobotState = world::RobotState<f64>;
pub type TransportObject = world::TransportObject<f64>;
pub type WorldState = world::WorldState<f64>;
pub type Event = world::Event<f64>;
pub type Trigger = world::Trigger<f64>;
pub type ScheduledEvent = world::ScheduledEvent<f64>;

pub use potential::Mode;
pub use sampler::{ProposalKind, RngStream};
pub use world::{Behavior, Termination};
