//! Block commit: MVCC application plus event derivation, the combination
//! every peer runs on delivery.

use super::events::{derive_events, Event};
use crate::ledger::state::StateError;
use crate::ledger::{Block, ChainError, Ledger, WorldState};

/// Applies `block` to `state`, records the per-transaction validity flags
/// on the block, and returns the events its valid transactions emit.
pub fn commit_block(state: &mut WorldState, block: &mut Block) -> Result<Vec<Event>, StateError> {
    let mut events = Vec::new();
    let height = block.height;
    let report = state.apply_block_observed(&*block, |tx, index, valid, post| {
        if valid {
            events.extend(derive_events(tx, height, index, post));
        }
    })?;
    block.validity_flags = report.validity;
    Ok(events)
}

/// A fully replayed ledger: final state, flag-annotated blocks, and the
/// complete committed event stream.
#[derive(Debug, Clone)]
pub struct Replayed {
    pub state: WorldState,
    pub ledger: Ledger,
    pub events: Vec<Event>,
}

/// Verifies and replays a ledger from genesis, recomputing validity flags
/// and the event stream. Deterministic: byte-identical ledgers give
/// byte-identical states.
pub fn replay_committed(ledger: &Ledger) -> Result<Replayed, ChainError> {
    let report = ledger.verify_chain();
    if let Some(h) = report.first_bad_height {
        return Err(ChainError::Corrupt(h));
    }
    let mut state = WorldState::new();
    let mut events = Vec::new();
    let mut blocks = ledger.blocks().to_vec();
    for block in &mut blocks {
        events.extend(commit_block(&mut state, block)?);
    }
    Ok(Replayed { state, ledger: Ledger::from_blocks(blocks), events })
}
