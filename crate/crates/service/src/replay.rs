use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use chrono::NaiveDate;
use coronavis_core::corpus::{read_daily_file, read_data_dir, CorpusError, ParseMode};
use coronavis_core::DateRange;
use serde::Serialize;

use crate::store::SnapshotStore;

pub const SECONDS_PER_DAY: f64 = 86_400.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayConfig {
    pub data_dir: PathBuf,
    /// Corpus days per wall-clock day; one corpus day takes `86400 / speedup`
    /// seconds.
    pub speedup: f64,
    pub start: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("speedup must be a positive finite number, got {0}")]
    BadSpeedup(f64),
    #[error("no daily files in {0}")]
    NoFiles(String),
    #[error("start {start} is after end {end}")]
    BadRange { start: NaiveDate, end: NaiveDate },
    #[error("requested {requested} lies outside the available files {available_from} to {available_to}")]
    OutOfRange {
        requested: NaiveDate,
        available_from: NaiveDate,
        available_to: NaiveDate,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ReplaySummary {
    pub published: usize,
    /// Days in range without a daily file.
    pub gaps: Vec<NaiveDate>,
    /// Days whose file could not be read, with the reason.
    pub unreadable: Vec<(NaiveDate, String)>,
    pub rows: usize,
    pub skipped_rows: usize,
}

impl ReplayConfig {
    pub fn day_duration(&self) -> Duration {
        Duration::from_secs_f64(SECONDS_PER_DAY / self.speedup)
    }

    /// Checks the speedup and resolves the date range against the files
    /// present, defaulting to the full span.
    pub fn resolve(&self, available: &[NaiveDate]) -> Result<DateRange, ReplayError> {
        if !(self.speedup.is_finite() && self.speedup > 0.0) {
            return Err(ReplayError::BadSpeedup(self.speedup));
        }
        let (Some(&first), Some(&last)) = (available.first(), available.last()) else {
            return Err(ReplayError::NoFiles(self.data_dir.display().to_string()));
        };
        let start = self.start.unwrap_or(first);
        let end = self.end.unwrap_or(last);
        for requested in [start, end] {
            if requested < first || requested > last {
                return Err(ReplayError::OutOfRange {
                    requested,
                    available_from: first,
                    available_to: last,
                });
            }
        }
        DateRange::new(start, end).ok_or(ReplayError::BadRange { start, end })
    }
}

/// Ingests each day of the range in date order, publishing a new snapshot
/// after every day that has a readable file. Days are paced `day_duration`
/// apart; missing or unreadable files are logged and skipped without a
/// publication.
pub async fn replay(config: &ReplayConfig, store: Arc<SnapshotStore>) -> Result<ReplaySummary, ReplayError> {
    let files: BTreeMap<NaiveDate, PathBuf> = read_data_dir(&config.data_dir)?.into_iter().collect();
    let available: Vec<NaiveDate> = files.keys().copied().collect();
    let range = config.resolve(&available)?;
    let tick = config.day_duration();
    let mut summary = ReplaySummary::default();

    for (i, day) in range.days().enumerate() {
        if i > 0 {
            tokio::time::sleep(tick).await;
        }
        let Some(path) = files.get(&day).cloned() else {
            tracing::warn!(%day, "no daily file; gap in replay");
            summary.gaps.push(day);
            continue;
        };
        let base = store.load();
        let next = tokio::task::spawn_blocking(move || {
            read_daily_file(&path, ParseMode::Lenient).map(|(file, report)| (base.extend(file.records, Some(day)), report))
        })
        .await
        .expect("replay worker panicked");
        match next {
            Ok((snapshot, report)) => {
                summary.rows += report.rows;
                summary.skipped_rows += report.skipped.len();
                let tweets = snapshot.tweet_count();
                let n = store.publish(snapshot);
                summary.published += 1;
                tracing::info!(%day, publication = n, tweets, "published snapshot");
            }
            Err(e) => {
                tracing::error!(%day, error = %e, "unreadable daily file; skipped");
                summary.unreadable.push((day, e.to_string()));
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 6, day).unwrap()
    }

    fn config(speedup: f64, start: Option<NaiveDate>, end: Option<NaiveDate>) -> ReplayConfig {
        ReplayConfig {
            data_dir: PathBuf::from("unused"),
            speedup,
            start,
            end,
        }
    }

    #[test]
    fn resolves_ranges() {
        let avail = [d(1), d(2), d(4)];
        assert_eq!(config(1.0, None, None).resolve(&avail).unwrap(), DateRange::new(d(1), d(4)).unwrap());
        assert!(matches!(config(0.0, None, None).resolve(&avail), Err(ReplayError::BadSpeedup(_))));
        assert!(matches!(config(f64::NAN, None, None).resolve(&avail), Err(ReplayError::BadSpeedup(_))));
        assert!(matches!(config(1.0, Some(d(5)), None).resolve(&avail), Err(ReplayError::OutOfRange { .. })));
        assert!(matches!(config(1.0, Some(d(4)), Some(d(2))).resolve(&avail), Err(ReplayError::BadRange { .. })));
        assert!(matches!(config(1.0, None, None).resolve(&[]), Err(ReplayError::NoFiles(_))));
    }

    #[test]
    fn pacing() {
        assert_eq!(config(86_400.0, None, None).day_duration(), Duration::from_secs(1));
        assert_eq!(config(1.0, None, None).day_duration(), Duration::from_secs(86_400));
    }
}
