//! Analytics engine for geo-tagged pandemic tweets: corpus ingestion and the
//! daily CSV format, lexicon sentiment, word and topic trends, cross-state
//! mobility joined with infection counts, and LDA topic models.

pub mod analysis;
pub mod corpus;
pub mod counting;
pub mod mobility;
pub mod scope;
pub mod sentiment;
pub mod textproc;
pub mod topicmodel;
pub mod trends;

pub use corpus::{StateCode, TweetRecord};
pub use scope::{DateRange, Scope, Timeframe};
