//! Cross-state movement inference from user tweet trajectories, weekly
//! destination counts, infection-count ingestion and the lagged
//! mobility-vs-infection join.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;

use chrono::{DateTime, Days, Duration, NaiveDate, Utc};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{StateCode, TweetRecord};

/// Default movement window.
pub const DEFAULT_WINDOW_DAYS: i64 = 14;

/// Thursday 2020-03-05, the first collection day. Weeks anchored here fall on
/// Jun 11, Jun 18, Jun 25, ...
pub fn default_epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 3, 5).expect("valid date")
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MobilityError {
    #[error("need at least two rows with non-zero variance on both sides")]
    InsufficientData,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CaseCountError {
    #[error("missing column `{0}`")]
    MissingColumn(&'static str),
    #[error("row {0}: malformed record")]
    Malformed(usize),
    #[error("row {0}: unknown state")]
    UnknownState(usize),
    #[error("row {0}: week_start is not a YYYY-MM-DD date")]
    BadDate(usize),
    #[error("row {0}: week_start is not on a week boundary")]
    Misaligned(usize),
    #[error("row {0}: cases must be a non-negative integer")]
    BadCases(usize),
    #[error("row {0}: duplicate state/week")]
    Duplicate(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct TrajectoryPoint {
    pub created_at: DateTime<Utc>,
    pub state: StateCode,
    pub tweet_id: String,
}

/// One user's geo-tagged posts in time order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct UserTrajectory {
    pub user_id: String,
    pub points: Vec<TrajectoryPoint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct MobilityEvent {
    pub user_id: String,
    pub from_state: StateCode,
    pub to_state: StateCode,
    pub t_from: DateTime<Utc>,
    pub t_to: DateTime<Utc>,
}

/// Orders decimal tweet ids numerically.
fn id_order(a: &str, b: &str) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Groups records by user, sorting each trajectory by time and then tweet id.
/// Trajectories are returned in user id order.
pub fn build_trajectories<R: AsRef<TweetRecord>>(records: &[R]) -> Vec<UserTrajectory> {
    let mut by_user: BTreeMap<&str, Vec<TrajectoryPoint>> = BTreeMap::new();
    for r in records.iter().map(AsRef::as_ref) {
        by_user.entry(&r.user_id).or_default().push(TrajectoryPoint {
            created_at: r.created_at,
            state: r.loc,
            tweet_id: r.tweet_id.clone(),
        });
    }
    by_user
        .into_iter()
        .map(|(user_id, mut points)| {
            points.sort_by(|a, b| {
                a.created_at
                    .cmp(&b.created_at)
                    .then_with(|| id_order(&a.tweet_id, &b.tweet_id))
            });
            UserTrajectory {
                user_id: user_id.to_string(),
                points,
            }
        })
        .collect()
}

/// One event per consecutive pair of points in different states whose gap is
/// positive and at most `window` (inclusive).
pub fn detect_movements(trajectories: &[UserTrajectory], window: Duration) -> Vec<MobilityEvent> {
    let mut events = Vec::new();
    for t in trajectories {
        for pair in t.points.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let gap = b.created_at - a.created_at;
            if a.state != b.state && gap > Duration::zero() && gap <= window {
                events.push(MobilityEvent {
                    user_id: t.user_id.clone(),
                    from_state: a.state,
                    to_state: b.state,
                    t_from: a.created_at,
                    t_to: b.created_at,
                });
            }
        }
    }
    events
}

/// Contiguous 7-day bins `[epoch + 7i, epoch + 7(i+1))`, `i in 0..weeks`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeekBins {
    pub epoch: NaiveDate,
    pub weeks: usize,
}

impl WeekBins {
    pub fn new(epoch: NaiveDate, weeks: usize) -> Self {
        WeekBins { epoch, weeks }
    }

    /// Smallest run of bins from `epoch` that reaches `last_day`.
    pub fn through(epoch: NaiveDate, last_day: NaiveDate) -> Self {
        let days = (last_day - epoch).num_days();
        let weeks = if days < 0 { 0 } else { days as usize / 7 + 1 };
        WeekBins { epoch, weeks }
    }

    pub fn week_start(&self, i: usize) -> NaiveDate {
        self.epoch + Days::new(7 * i as u64)
    }

    /// Whether `day` is a bin boundary (any week, including before epoch).
    pub fn is_aligned(&self, day: NaiveDate) -> bool {
        (day - self.epoch).num_days().rem_euclid(7) == 0
    }

    pub fn bin_of(&self, day: NaiveDate) -> Option<usize> {
        let days = (day - self.epoch).num_days();
        if days < 0 {
            return None;
        }
        let i = days as usize / 7;
        (i < self.weeks).then_some(i)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct WeeklyMobility {
    pub week_start: NaiveDate,
    /// Exclusive: the next week's start.
    pub week_end: NaiveDate,
    /// Destination state to distinct users who moved there this week. States
    /// with no movers are omitted and read as zero.
    pub counts: BTreeMap<StateCode, u64>,
}

impl WeeklyMobility {
    pub fn count(&self, state: StateCode) -> u64 {
        self.counts.get(&state).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct WeeklyMobilityReport {
    pub weeks: Vec<WeeklyMobility>,
    /// Events whose arrival fell outside every bin.
    pub overflow: u64,
}

/// Assigns each event to the bin containing its arrival time and counts
/// distinct users per destination state and week.
pub fn weekly_mobility(events: &[MobilityEvent], bins: WeekBins) -> WeeklyMobilityReport {
    let mut seen: BTreeSet<(usize, StateCode, &str)> = BTreeSet::new();
    let mut overflow = 0;
    for e in events {
        match bins.bin_of(e.t_to.date_naive()) {
            Some(i) => {
                seen.insert((i, e.to_state, e.user_id.as_str()));
            }
            None => overflow += 1,
        }
    }
    let mut weeks: Vec<WeeklyMobility> = (0..bins.weeks)
        .map(|i| WeeklyMobility {
            week_start: bins.week_start(i),
            week_end: bins.week_start(i + 1),
            counts: BTreeMap::new(),
        })
        .collect();
    for (i, state, _) in seen {
        *weeks[i].counts.entry(state).or_default() += 1;
    }
    WeeklyMobilityReport { weeks, overflow }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct InfectionCount {
    pub state: StateCode,
    pub week_start: NaiveDate,
    pub cases: u64,
}

/// Weekly new cases per state, on the same bins as the mobility counts.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize, JsonSchema)]
pub struct InfectionSeries {
    pub entries: Vec<InfectionCount>,
}

impl InfectionSeries {
    pub fn get(&self, state: StateCode, week_start: NaiveDate) -> Option<u64> {
        self.entries
            .iter()
            .find(|e| e.state == state && e.week_start == week_start)
            .map(|e| e.cases)
    }
}

/// Reads `state,week_start,cases` rows (header required, any column order).
/// Row numbers are 1-based data rows.
pub fn ingest_case_counts<R: Read>(reader: R, bins: WeekBins) -> Result<InfectionSeries, CaseCountError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header = rdr.headers().map_err(|_| CaseCountError::Malformed(0))?.clone();
    let col = |name: &'static str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or(CaseCountError::MissingColumn(name))
    };
    let (ci_state, ci_week, ci_cases) = (col("state")?, col("week_start")?, col("cases")?);

    let mut seen = BTreeSet::new();
    let mut entries = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 1;
        let row = row.map_err(|_| CaseCountError::Malformed(line))?;
        let field = |c: usize| row.get(c).unwrap_or("").trim();
        let state = StateCode::parse(field(ci_state)).map_err(|_| CaseCountError::UnknownState(line))?;
        let week_start = NaiveDate::parse_from_str(field(ci_week), "%Y-%m-%d")
            .map_err(|_| CaseCountError::BadDate(line))?;
        if !bins.is_aligned(week_start) {
            return Err(CaseCountError::Misaligned(line));
        }
        let cases: u64 = field(ci_cases).parse().map_err(|_| CaseCountError::BadCases(line))?;
        if !seen.insert((state, week_start)) {
            return Err(CaseCountError::Duplicate(line));
        }
        entries.push(InfectionCount {
            state,
            week_start,
            cases,
        });
    }
    Ok(InfectionSeries { entries })
}

/// Week-`w` cases paired with week-`(w - lag)` mobility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct JoinedRow {
    pub state: StateCode,
    /// Start of the infection week.
    pub week_start: NaiveDate,
    pub mobility: u64,
    pub cases: u64,
}

/// Inner join of infections with mobility shifted forward by `lag_weeks`.
/// A mobility week that exists covers every state (absent states count 0);
/// infection rows whose lagged week has no mobility bin are dropped. Rows are
/// ordered by week, then state.
pub fn lagged_join(mobility: &[WeeklyMobility], infections: &InfectionSeries, lag_weeks: u32) -> Vec<JoinedRow> {
    let by_week: HashMap<NaiveDate, &WeeklyMobility> = mobility.iter().map(|m| (m.week_start, m)).collect();
    let mut rows: Vec<JoinedRow> = infections
        .entries
        .iter()
        .filter_map(|inf| {
            let source = inf.week_start.checked_sub_days(Days::new(7 * lag_weeks as u64))?;
            let m = by_week.get(&source)?;
            Some(JoinedRow {
                state: inf.state,
                week_start: inf.week_start,
                mobility: m.count(inf.state),
                cases: inf.cases,
            })
        })
        .collect();
    rows.sort_by_key(|r| (r.week_start, r.state));
    rows
}

/// Pearson correlation of paired samples, mean-centered two-pass form,
/// clamped to [-1, 1].
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, MobilityError> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return Err(MobilityError::InsufficientData);
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs[..n].iter().zip(&ys[..n]) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(MobilityError::InsufficientData);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct WeekCorrelation {
    pub week_start: NaiveDate,
    pub rows: usize,
    /// `None` when the week has fewer than two rows or no variance.
    pub r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct CorrelationReport {
    pub pooled: f64,
    pub per_week: Vec<WeekCorrelation>,
}

/// Pooled and per-week mobility/cases correlation over joined rows.
pub fn mobility_correlation(rows: &[JoinedRow]) -> Result<CorrelationReport, MobilityError> {
    let xs: Vec<f64> = rows.iter().map(|r| r.mobility as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.cases as f64).collect();
    let pooled = pearson(&xs, &ys)?;
    let mut weeks: BTreeMap<NaiveDate, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in rows {
        let (x, y) = weeks.entry(r.week_start).or_default();
        x.push(r.mobility as f64);
        y.push(r.cases as f64);
    }
    let per_week = weeks
        .into_iter()
        .map(|(week_start, (x, y))| WeekCorrelation {
            week_start,
            rows: x.len(),
            r: pearson(&x, &y).ok(),
        })
        .collect();
    Ok(CorrelationReport { pooled, per_week })
}
