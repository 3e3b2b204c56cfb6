//! Process-wide counters of combinator executions.
//!
//! These are diagnostics only: they never influence control flow. Tests use
//! them to confirm that a workflow is driven entirely through the kernel's
//! combinators.

use std::sync::atomic::{AtomicUsize, Ordering};

static SYNC_THEN: AtomicUsize = AtomicUsize::new(0);
static ASYNC_THEN: AtomicUsize = AtomicUsize::new(0);
static GATHER: AtomicUsize = AtomicUsize::new(0);

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CombinatorCounts {
    pub sync_then: usize,
    pub async_then: usize,
    pub gather: usize,
}

impl CombinatorCounts {
    /// Component-wise difference `self - earlier`.
    pub fn since(self, earlier: CombinatorCounts) -> CombinatorCounts {
        CombinatorCounts {
            sync_then: self.sync_then - earlier.sync_then,
            async_then: self.async_then - earlier.async_then,
            gather: self.gather - earlier.gather,
        }
    }
}

pub fn snapshot() -> CombinatorCounts {
    CombinatorCounts {
        sync_then: SYNC_THEN.load(Ordering::SeqCst),
        async_then: ASYNC_THEN.load(Ordering::SeqCst),
        gather: GATHER.load(Ordering::SeqCst),
    }
}

pub(crate) fn record_sync_then() {
    SYNC_THEN.fetch_add(1, Ordering::Relaxed);
}

pub(crate) fn record_async_then() {
    ASYNC_THEN.fetch_add(1, Ordering::Relaxed);
}

pub(crate) fn record_gather() {
    GATHER.fetch_add(1, Ordering::Relaxed);
}
