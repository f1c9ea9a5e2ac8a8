use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::medium::{Position, Station};
use crate::forwarder::{ForwarderConfig, ForwarderNode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PoolError {
    #[error("node pool exhausted (capacity {0})")]
    PoolExhausted(usize),
    #[error("vehicle {0:?} is not active")]
    UnknownVehicle(String),
    #[error("vehicle {0:?} is already active")]
    AlreadyActive(String),
}

#[derive(Debug, Clone)]
pub struct PoolNode {
    pub fwd: ForwarderNode,
    pub active: bool,
    pub position: Position,
    /// Bumped on every activation and deactivation so events addressed to a
    /// previous life of the node can be recognised and dropped.
    pub epoch: u64,
    pub vehicle: Option<String>,
    pub is_static: bool,
}

/// Pre-allocated forwarder nodes. Ids `0..capacity` are pooled vehicle
/// slots; static nodes (RSUs, parked vehicles) are appended after them and
/// never return to the free list.
#[derive(Debug, Clone)]
pub struct NodePool {
    nodes: Vec<PoolNode>,
    capacity: usize,
    free: BTreeSet<u32>,
    by_vehicle: BTreeMap<String, u32>,
}

impl NodePool {
    pub fn new(capacity: usize, config: ForwarderConfig) -> Self {
        let nodes = (0..capacity as u32)
            .map(|id| PoolNode {
                fwd: ForwarderNode::new(id, config),
                active: false,
                position: Position::PARKED,
                epoch: 0,
                vehicle: None,
                is_static: false,
            })
            .collect();
        Self {
            nodes,
            capacity,
            free: (0..capacity as u32).collect(),
            by_vehicle: BTreeMap::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn active_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.active).count()
    }

    pub fn node(&self, id: u32) -> &PoolNode {
        &self.nodes[id as usize]
    }

    pub fn node_mut(&mut self, id: u32) -> &mut PoolNode {
        &mut self.nodes[id as usize]
    }

    pub fn nodes(&self) -> &[PoolNode] {
        &self.nodes
    }

    pub fn node_of(&self, vehicle: &str) -> Option<u32> {
        self.by_vehicle.get(vehicle).copied()
    }

    /// Adds an always-active node outside the pool.
    pub fn add_static(&mut self, label: &str, position: Position, config: ForwarderConfig) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(PoolNode {
            fwd: ForwarderNode::new(id, config),
            active: true,
            position,
            epoch: 1,
            vehicle: Some(label.to_string()),
            is_static: true,
        });
        id
    }

    /// Binds `vehicle` to the lowest free node, clearing its tables.
    pub fn activate(&mut self, vehicle: &str, position: Position) -> Result<u32, PoolError> {
        if self.by_vehicle.contains_key(vehicle) {
            return Err(PoolError::AlreadyActive(vehicle.to_string()));
        }
        let id = self.free.pop_first().ok_or(PoolError::PoolExhausted(self.capacity))?;
        let n = &mut self.nodes[id as usize];
        n.fwd.reset();
        n.active = true;
        n.position = position;
        n.epoch += 1;
        n.vehicle = Some(vehicle.to_string());
        self.by_vehicle.insert(vehicle.to_string(), id);
        Ok(id)
    }

    /// Disables the node bound to `vehicle` and returns it to the free list.
    pub fn deactivate(&mut self, vehicle: &str) -> Result<u32, PoolError> {
        let id = self
            .by_vehicle
            .remove(vehicle)
            .ok_or_else(|| PoolError::UnknownVehicle(vehicle.to_string()))?;
        let n = &mut self.nodes[id as usize];
        n.active = false;
        n.position = Position::PARKED;
        n.epoch += 1;
        n.vehicle = None;
        n.fwd.reset();
        self.free.insert(id);
        Ok(id)
    }

    pub fn set_position(&mut self, id: u32, position: Position) {
        self.nodes[id as usize].position = position;
    }

    pub fn stations(&self) -> Vec<Station> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| Station {
                id: i as u32,
                position: n.position,
                active: n.active,
            })
            .collect()
    }

    /// Alive check for an event stamped with `epoch`.
    pub fn is_current(&self, id: u32, epoch: u64) -> bool {
        let n = &self.nodes[id as usize];
        n.active && n.epoch == epoch
    }
}
