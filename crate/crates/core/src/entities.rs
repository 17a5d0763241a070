//! Owner entities and the entity-level net.
//!
//! All addresses spent together in one transaction belong to one owner, and
//! ownership is closed transitively: two places share an entity iff they are
//! connected through a sequence of transactions whose input sets overlap.
//! Places that never appear as an input are their own singleton entity.
//!
//! The entity net has one place per entity and the same transitions as the
//! address net. Its `pre`/`post` row for an entity is the element-wise sum of
//! its members' rows, so entries can exceed 1.

use crate::net::{NetError, PlaceId, PlaceTransitionNet, Side, SparseIncidence, TransitionId};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EntityError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("partition does not match net: {0}")]
    Mismatch(String),
}

/// A partition of a net's places into disjoint owner entities.
///
/// Entities are ordered by their smallest member; members are ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityPartition {
    entities: Vec<Vec<PlaceId>>,
    place_to_entity: Vec<u32>,
}

impl EntityPartition {
    /// Canonicalizes a labelling `place -> arbitrary group key`.
    fn from_labels(labels: &[usize]) -> Self {
        let mut remap = vec![u32::MAX; labels.len()];
        let mut entities: Vec<Vec<PlaceId>> = Vec::new();
        let mut place_to_entity = Vec::with_capacity(labels.len());
        for (place, &label) in labels.iter().enumerate() {
            if remap[label] == u32::MAX {
                remap[label] = entities.len() as u32;
                entities.push(Vec::new());
            }
            let e = remap[label];
            entities[e as usize].push(PlaceId::new(place));
            place_to_entity.push(e);
        }
        Self {
            entities,
            place_to_entity,
        }
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn num_places(&self) -> usize {
        self.place_to_entity.len()
    }

    pub fn entities(&self) -> &[Vec<PlaceId>] {
        &self.entities
    }

    pub fn members(&self, entity: usize) -> &[PlaceId] {
        &self.entities[entity]
    }

    pub fn entity_of(&self, place: PlaceId) -> usize {
        self.place_to_entity[place.index()] as usize
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.entities.iter().map(|e| e.len() as u64).collect()
    }
}

struct DisjointSet {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
    }
}

/// Clusters places by co-input connectivity with a union-find pass over the
/// `pre` columns.
pub fn compute_entities(net: &PlaceTransitionNet) -> Result<EntityPartition, EntityError> {
    let pre = net.incidence(Side::Pre)?;
    let mut sets = DisjointSet::new(net.num_places());
    for t in 0..pre.num_cols() {
        if let Some((&first, rest)) = pre.col_rows(t).split_first() {
            for &p in rest {
                sets.union(first, p);
            }
        }
    }
    let labels: Vec<usize> = (0..net.num_places() as u32)
        .map(|p| sets.find(p) as usize)
        .collect();
    Ok(EntityPartition::from_labels(&labels))
}

/// The transition-driven closure: take an unexplored transition, seed an
/// entity with its inputs, then keep pulling in the inputs of every other
/// transition that spends from a place already in the entity. Places the
/// closure never reaches become singletons.
///
/// Produces the same partition as [`compute_entities`].
pub fn compute_entities_closure(net: &PlaceTransitionNet) -> Result<EntityPartition, EntityError> {
    let pre = net.incidence(Side::Pre)?;
    let n = net.num_places();
    let mut label = vec![usize::MAX; n];
    let mut explored = vec![false; pre.num_cols()];
    let mut frontier: Vec<u32> = Vec::new();

    for t in 0..pre.num_cols() {
        if explored[t] {
            continue;
        }
        explored[t] = true;
        let seed = pre.col_rows(t);
        let Some(&anchor) = seed.first() else { continue };
        // an entity takes the label of the first place that entered it
        let entity = anchor as usize;
        for &p in seed {
            if label[p as usize] == usize::MAX {
                label[p as usize] = entity;
                frontier.push(p);
            }
        }
        while let Some(p) = frontier.pop() {
            for &next_t in pre.row_cols(p as usize) {
                if explored[next_t as usize] {
                    continue;
                }
                explored[next_t as usize] = true;
                for &q in pre.col_rows(next_t as usize) {
                    if label[q as usize] == usize::MAX {
                        label[q as usize] = entity;
                        frontier.push(q);
                    }
                }
            }
        }
    }
    for (p, l) in label.iter_mut().enumerate() {
        if *l == usize::MAX {
            *l = p;
        }
    }
    Ok(EntityPartition::from_labels(&label))
}

/// A net whose places are entities. Transition ids match the source net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityNet {
    pub net: PlaceTransitionNet,
    /// Address-level members of each entity place.
    pub members: Vec<Vec<PlaceId>>,
}

impl EntityNet {
    /// Transitions where some entity is both an input and an output, i.e.
    /// the owner moved coins between its own addresses.
    pub fn cyclic_transitions(&self) -> Vec<TransitionId> {
        let pre = self.net.side(Side::Pre);
        let post = self.net.side(Side::Post);
        self.net
            .transitions()
            .filter(|t| {
                let (a, b) = (pre.col_rows(t.index()), post.col_rows(t.index()));
                a.iter().any(|p| b.binary_search(p).is_ok())
            })
            .collect()
    }
}

fn summed_columns(
    source: &SparseIncidence,
    partition: &EntityPartition,
) -> Result<SparseIncidence, EntityError> {
    let mut columns = Vec::with_capacity(source.num_cols());
    let mut scratch: Vec<(usize, u32)> = Vec::new();
    for t in 0..source.num_cols() {
        scratch.clear();
        scratch.extend(source.col(t).map(|(p, v)| (partition.place_to_entity[p] as usize, v)));
        scratch.sort_unstable_by_key(|&(e, _)| e);
        let mut merged: Vec<(usize, u32)> = Vec::with_capacity(scratch.len());
        for &(e, v) in &scratch {
            match merged.last_mut() {
                Some((last, sum)) if *last == e => *sum += v,
                _ => merged.push((e, v)),
            }
        }
        columns.push(merged);
    }
    SparseIncidence::from_columns(partition.len(), columns).map_err(|e| EntityError::Mismatch(e.to_string()))
}

/// Builds the entity net by summing member rows of `pre` and `post`.
pub fn build_entity_net(net: &PlaceTransitionNet, partition: &EntityPartition) -> Result<EntityNet, EntityError> {
    net.require_sealed()?;
    if partition.num_places() != net.num_places() {
        return Err(EntityError::Mismatch(format!(
            "partition covers {} places, net has {}",
            partition.num_places(),
            net.num_places()
        )));
    }
    let pre = summed_columns(net.side(Side::Pre), partition)?;
    let post = summed_columns(net.side(Side::Post), partition)?;
    let labels = (0..partition.len()).map(|e| format!("entity-{e}")).collect();
    let entity_net = PlaceTransitionNet::from_parts(labels, net.transaction_ids().to_vec(), pre, post)
        .map_err(EntityError::Mismatch)?;
    Ok(EntityNet {
        net: entity_net,
        members: partition.entities.clone(),
    })
}

/// One row of the entity export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityReportRow {
    pub entity: usize,
    pub size: usize,
    pub addresses: Vec<String>,
}

/// Entities by descending size, ties by entity index.
pub fn entity_report(net: &PlaceTransitionNet, partition: &EntityPartition) -> Vec<EntityReportRow> {
    let mut rows: Vec<EntityReportRow> = partition
        .entities
        .iter()
        .enumerate()
        .map(|(entity, members)| EntityReportRow {
            entity,
            size: members.len(),
            addresses: members
                .iter()
                .map(|&p| net.addresses()[p.index()].clone())
                .collect(),
        })
        .collect();
    rows.sort_by(|a, b| b.size.cmp(&a.size).then(a.entity.cmp(&b.entity)));
    rows
}
