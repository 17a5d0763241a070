//! The place/transition-net data model.
//!
//! Addresses become places and transactions become transitions. Each
//! transaction contributes one column to the `pre` incidence (its inputs) and
//! one column to the `post` incidence (its outputs). On an address-level net
//! every stored entry is 1: an address listed twice on the same side of a
//! transaction still yields a single arc.
//!
//! A net goes through two phases. While under construction it accepts
//! [`PlaceTransitionNet::intern_address`] and
//! [`PlaceTransitionNet::record_transaction`]; [`PlaceTransitionNet::seal`]
//! builds the row-major index and freezes it. All analytics take sealed nets.

mod snapshot;
mod sparse;

pub use snapshot::{SnapshotError, SNAPSHOT_VERSION};
pub use sparse::{SparseError, SparseIncidence};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Dense place index, assigned in first-seen order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlaceId(u32);

impl PlaceId {
    pub fn new(index: usize) -> Self {
        Self(u32::try_from(index).expect("place index exceeds u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PlaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

/// Dense transition index, assigned in ingestion order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TransitionId(u32);

impl TransitionId {
    pub fn new(index: usize) -> Self {
        Self(u32::try_from(index).expect("transition index exceeds u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TransitionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

/// Which incidence function a query reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Place -> transition arcs (transaction inputs).
    Pre,
    /// Transition -> place arcs (transaction outputs).
    Post,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("net is sealed; construction is no longer allowed")]
    Sealed,
    #[error("net is not sealed; seal it before running analyses")]
    NotSealed,
    #[error("address must be a non-empty string")]
    EmptyAddress,
    #[error("malformed transaction {tx_id:?}: {reason}")]
    MalformedTransaction { tx_id: String, reason: String },
    #[error("duplicate transaction {tx_id:?}")]
    DuplicateTransaction { tx_id: String },
    #[error("place index {index} out of range (net has {len} places)")]
    PlaceOutOfRange { index: usize, len: usize },
    #[error("transition index {index} out of range (net has {len} transitions)")]
    TransitionOutOfRange { index: usize, len: usize },
}

#[derive(Debug, Clone, Default)]
struct Registry {
    names: Vec<String>,
    ids: FxHashMap<String, u32>,
}

impl Registry {
    fn get(&self, name: &str) -> Option<u32> {
        self.ids.get(name).copied()
    }

    fn insert_new(&mut self, name: &str) -> u32 {
        let id = u32::try_from(self.names.len()).expect("registry exceeds u32");
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), id);
        id
    }

    fn from_names(names: Vec<String>) -> Result<Self, String> {
        let mut ids = FxHashMap::default();
        ids.reserve(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(format!("entry {i} is an empty string"));
            }
            if ids.insert(name.clone(), i as u32).is_some() {
                return Err(format!("entry {i} ({name:?}) is a duplicate"));
            }
        }
        Ok(Self { names, ids })
    }
}

impl PartialEq for Registry {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl Eq for Registry {}

/// A place/transition net with binary-or-counted pre/post incidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceTransitionNet {
    places: Registry,
    transitions: Registry,
    pre: SparseIncidence,
    post: SparseIncidence,
    sealed: bool,
}

impl Default for PlaceTransitionNet {
    fn default() -> Self {
        Self::new()
    }
}

impl PlaceTransitionNet {
    pub fn new() -> Self {
        Self {
            places: Registry::default(),
            transitions: Registry::default(),
            pre: SparseIncidence::empty(0),
            post: SparseIncidence::empty(0),
            sealed: false,
        }
    }

    /// Assembles a sealed net from finished parts. Used for entity nets and
    /// snapshot loading.
    pub(crate) fn from_parts(
        place_names: Vec<String>,
        transition_names: Vec<String>,
        pre: SparseIncidence,
        post: SparseIncidence,
    ) -> Result<Self, String> {
        let places = Registry::from_names(place_names).map_err(|e| format!("places: {e}"))?;
        let transitions =
            Registry::from_names(transition_names).map_err(|e| format!("transitions: {e}"))?;
        let (rows, cols) = (places.names.len(), transitions.names.len());
        for (name, m) in [("pre", &pre), ("post", &post)] {
            if m.num_rows() != rows || m.num_cols() != cols {
                return Err(format!(
                    "{name}: dimensions {}x{} do not match {rows}x{cols}",
                    m.num_rows(),
                    m.num_cols()
                ));
            }
        }
        let mut net = Self {
            places,
            transitions,
            pre,
            post,
            sealed: false,
        };
        net.seal();
        Ok(net)
    }

    pub fn num_places(&self) -> usize {
        self.places.names.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.names.len()
    }

    pub fn is_sealed(&self) -> bool {
        self.sealed
    }

    /// Returns the place of `addr`, registering it if unseen.
    pub fn intern_address(&mut self, addr: &str) -> Result<PlaceId, NetError> {
        if self.sealed {
            return Err(NetError::Sealed);
        }
        if addr.is_empty() {
            return Err(NetError::EmptyAddress);
        }
        Ok(PlaceId(self.intern_unchecked(addr)))
    }

    fn intern_unchecked(&mut self, addr: &str) -> u32 {
        if let Some(id) = self.places.get(addr) {
            return id;
        }
        let id = self.places.insert_new(addr);
        let rows = self.places.names.len();
        self.pre.grow_rows(rows);
        self.post.grow_rows(rows);
        id
    }

    /// Appends one transition. Inputs may be empty (coinbase); outputs may not.
    /// Repeated addresses on one side collapse to a single arc of weight 1.
    pub fn record_transaction<I, O>(
        &mut self,
        tx_id: &str,
        inputs: I,
        outputs: O,
    ) -> Result<TransitionId, NetError>
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
        O: IntoIterator,
        O::Item: AsRef<str>,
    {
        if self.sealed {
            return Err(NetError::Sealed);
        }
        let malformed = |reason: &str| NetError::MalformedTransaction {
            tx_id: tx_id.to_owned(),
            reason: reason.to_owned(),
        };
        if tx_id.is_empty() {
            return Err(malformed("empty transaction id"));
        }
        if self.transitions.get(tx_id).is_some() {
            return Err(NetError::DuplicateTransaction {
                tx_id: tx_id.to_owned(),
            });
        }
        let inputs: Vec<I::Item> = inputs.into_iter().collect();
        let outputs: Vec<O::Item> = outputs.into_iter().collect();
        if outputs.is_empty() {
            return Err(malformed("output list is empty"));
        }
        if inputs.iter().any(|a| a.as_ref().is_empty()) || outputs.iter().any(|a| a.as_ref().is_empty()) {
            return Err(malformed("empty address"));
        }

        let mut pre_col: Vec<(u32, u32)> = inputs
            .iter()
            .map(|a| (self.intern_unchecked(a.as_ref()), 1))
            .collect();
        let mut post_col: Vec<(u32, u32)> = outputs
            .iter()
            .map(|a| (self.intern_unchecked(a.as_ref()), 1))
            .collect();
        for col in [&mut pre_col, &mut post_col] {
            col.sort_unstable();
            col.dedup();
        }
        self.pre.push_sorted_column(&pre_col);
        self.post.push_sorted_column(&post_col);
        Ok(TransitionId(self.transitions.insert_new(tx_id)))
    }

    /// Freezes the net and builds the row-major index. Idempotent.
    pub fn seal(&mut self) {
        if !self.pre.has_row_index() {
            self.pre.build_row_index();
        }
        if !self.post.has_row_index() {
            self.post.build_row_index();
        }
        self.sealed = true;
    }

    /// Consuming form of [`Self::seal`].
    pub fn sealed(mut self) -> Self {
        self.seal();
        self
    }

    pub(crate) fn require_sealed(&self) -> Result<(), NetError> {
        if self.sealed {
            Ok(())
        } else {
            Err(NetError::NotSealed)
        }
    }

    pub fn lookup_address(&self, addr: &str) -> Option<PlaceId> {
        self.places.get(addr).map(PlaceId)
    }

    pub fn lookup_transaction(&self, tx_id: &str) -> Option<TransitionId> {
        self.transitions.get(tx_id).map(TransitionId)
    }

    pub fn address(&self, p: PlaceId) -> Result<&str, NetError> {
        self.check_place(p)?;
        Ok(&self.places.names[p.index()])
    }

    pub fn transaction_id(&self, t: TransitionId) -> Result<&str, NetError> {
        self.check_transition(t)?;
        Ok(&self.transitions.names[t.index()])
    }

    /// Place labels in id order.
    pub fn addresses(&self) -> &[String] {
        &self.places.names
    }

    /// Transition labels in id order.
    pub fn transaction_ids(&self) -> &[String] {
        &self.transitions.names
    }

    pub fn places(&self) -> impl ExactSizeIterator<Item = PlaceId> {
        (0..self.num_places() as u32).map(PlaceId)
    }

    pub fn transitions(&self) -> impl ExactSizeIterator<Item = TransitionId> {
        (0..self.num_transitions() as u32).map(TransitionId)
    }

    /// The incidence matrix for `side`. Only available on sealed nets.
    pub fn incidence(&self, side: Side) -> Result<&SparseIncidence, NetError> {
        self.require_sealed()?;
        Ok(self.side(side))
    }

    pub(crate) fn side(&self, side: Side) -> &SparseIncidence {
        match side {
            Side::Pre => &self.pre,
            Side::Post => &self.post,
        }
    }

    fn check_place(&self, p: PlaceId) -> Result<(), NetError> {
        if p.index() < self.num_places() {
            Ok(())
        } else {
            Err(NetError::PlaceOutOfRange {
                index: p.index(),
                len: self.num_places(),
            })
        }
    }

    fn check_transition(&self, t: TransitionId) -> Result<(), NetError> {
        if t.index() < self.num_transitions() {
            Ok(())
        } else {
            Err(NetError::TransitionOutOfRange {
                index: t.index(),
                len: self.num_transitions(),
            })
        }
    }

    /// Number of distinct transitions connected to `p` on `side`.
    pub fn row_nnz(&self, side: Side, p: PlaceId) -> Result<usize, NetError> {
        self.check_place(p)?;
        Ok(self.side(side).row_nnz(p.index()))
    }

    /// Places with a nonzero entry in column `t`, ascending.
    pub fn column_places(&self, side: Side, t: TransitionId) -> Result<Vec<PlaceId>, NetError> {
        self.check_transition(t)?;
        Ok(self
            .side(side)
            .col_rows(t.index())
            .iter()
            .map(|&r| PlaceId(r))
            .collect())
    }

    /// Transitions with a nonzero entry in row `p`, ascending. Sealed nets only.
    pub fn row_transitions(&self, side: Side, p: PlaceId) -> Result<Vec<TransitionId>, NetError> {
        self.require_sealed()?;
        self.check_place(p)?;
        Ok(self
            .side(side)
            .row_cols(p.index())
            .iter()
            .map(|&c| TransitionId(c))
            .collect())
    }

    /// Receives minus spends for `p` under the binary model.
    pub fn utxo_count(&self, p: PlaceId) -> Result<i64, NetError> {
        self.check_place(p)?;
        Ok(self.post.row_nnz(p.index()) as i64 - self.pre.row_nnz(p.index()) as i64)
    }

    /// Total stored entries on `side`.
    pub fn arc_count(&self, side: Side) -> usize {
        self.side(side).nnz()
    }
}
