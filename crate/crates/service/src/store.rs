use std::sync::Arc;

use arc_swap::ArcSwap;
use chrono::NaiveDate;
use coronavis_core::analysis::AnalyticsSnapshot;
use tokio::sync::watch;

/// Holder of the current snapshot. Readers take a reference-counted handle
/// and keep a consistent view for as long as they hold it; the single writer
/// replaces the whole snapshot in one atomic pointer swap.
pub struct SnapshotStore {
    current: ArcSwap<AnalyticsSnapshot>,
    published: watch::Sender<u64>,
}

impl SnapshotStore {
    pub fn new(initial: AnalyticsSnapshot) -> Self {
        let (published, _) = watch::channel(0);
        SnapshotStore {
            current: ArcSwap::from_pointee(initial),
            published,
        }
    }

    pub fn load(&self) -> Arc<AnalyticsSnapshot> {
        self.current.load_full()
    }

    /// Installs `snapshot` and returns the new publication count.
    pub fn publish(&self, snapshot: AnalyticsSnapshot) -> u64 {
        self.current.store(Arc::new(snapshot));
        let mut n = 0;
        self.published.send_modify(|c| {
            *c += 1;
            n = *c;
        });
        n
    }

    /// Number of snapshots published since construction.
    pub fn publications(&self) -> u64 {
        *self.published.borrow()
    }

    /// Receiver that observes each publication count.
    pub fn subscribe(&self) -> watch::Receiver<u64> {
        self.published.subscribe()
    }
}

/// Source of the reference date used for "today" and "yesterday".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Clock {
    /// The answering snapshot's newest day, which in replay is the replay day.
    #[default]
    Snapshot,
    Fixed(NaiveDate),
}

impl Clock {
    pub fn today(&self, snapshot: &AnalyticsSnapshot) -> NaiveDate {
        match self {
            Clock::Snapshot => snapshot.clock(),
            Clock::Fixed(d) => *d,
        }
    }
}
