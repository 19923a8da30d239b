// SPDX-License-Identifier: Apache-2.0

//! Switch-level simulation and verification of dynamic CMOS priority
//! encoders.

pub mod behavior;
pub mod designs;
pub mod netlist;
pub mod sim;
pub mod verify;

pub use behavior::PeVector;
pub use designs::DesignId;
pub use netlist::{MosKind, Netlist, NodeId, NodeKind};
pub use sim::{Logic, NodeState, SimConfig, SimError, Simulator, Stimulus, Waveform};
