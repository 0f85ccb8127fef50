use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use crate::scope::DateRange;

use super::{
    date_from_file_name, format_timestamp, is_decimal_id, normalize_text, parse_timestamp,
    CorpusError, DailyFile, StateCode, TweetRecord,
};

pub const CSV_HEADER: [&str; 6] = ["tweet_id", "created_at", "loc", "text", "user_id", "verified"];

/// Strict aborts on the first bad row; lenient skips and counts it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    Strict,
    #[default]
    Lenient,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub rows: usize,
    pub skipped: Vec<CorpusError>,
}

struct ColumnIndex([usize; 6]);

impl ColumnIndex {
    fn from_header(header: &csv::StringRecord) -> Result<Self, CorpusError> {
        let mut idx = [0usize; 6];
        for (slot, name) in idx.iter_mut().zip(CSV_HEADER) {
            *slot = header
                .iter()
                .position(|h| h.trim().trim_start_matches('\u{feff}') == name)
                .ok_or_else(|| CorpusError::MissingColumn(name.to_string()))?;
        }
        Ok(ColumnIndex(idx))
    }
}

fn parse_row(
    row: &csv::StringRecord,
    cols: &ColumnIndex,
    line: usize,
    date: NaiveDate,
) -> Result<TweetRecord, CorpusError> {
    let field = |i: usize| row.get(cols.0[i]).unwrap_or("");
    let tweet_id = field(0).trim().to_string();
    if !is_decimal_id(&tweet_id) {
        return Err(CorpusError::BadTweetId(line));
    }
    let created_at = parse_timestamp(field(1)).ok_or(CorpusError::BadTimestamp(line))?;
    if created_at.date_naive() != date {
        return Err(CorpusError::WrongDay {
            row: line,
            expected: date,
            found: created_at.date_naive(),
        });
    }
    let loc = StateCode::parse(field(2)).map_err(|_| CorpusError::BadState(line))?;
    let verified = match field(5).trim().to_ascii_lowercase().as_str() {
        "1" | "true" => true,
        "0" | "false" => false,
        _ => return Err(CorpusError::BadVerified(line)),
    };
    Ok(TweetRecord {
        tweet_id,
        created_at,
        loc,
        text: normalize_text(field(3)),
        user_id: field(4).trim().to_string(),
        verified,
    })
}

/// Reads one day's CSV. Row numbers in errors are 1-based data rows (the
/// header is not counted). Text is re-normalized on load, which is a no-op
/// for files this crate wrote.
pub fn parse_daily_csv<R: Read>(
    reader: R,
    date: NaiveDate,
    mode: ParseMode,
) -> Result<(DailyFile, ParseReport), CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| CorpusError::Malformed(0, e.to_string()))?
        .clone();
    let cols = ColumnIndex::from_header(&header)?;

    let mut file = DailyFile::new(date);
    let mut report = ParseReport::default();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 1;
        report.rows += 1;
        let parsed = row
            .map_err(|e| CorpusError::Malformed(line, e.to_string()))
            .and_then(|row| parse_row(&row, &cols, line, date));
        match (parsed, mode) {
            (Ok(rec), _) => file.records.push(rec),
            (Err(e), ParseMode::Strict) => return Err(e),
            (Err(e), ParseMode::Lenient) => report.skipped.push(e),
        }
    }
    Ok((file, report))
}

/// Canonical serialization: header row, records in order, ISO-8601 UTC
/// timestamps, `verified` as 1/0, fields quoted only when needed.
pub fn write_daily_csv<W: Write>(file: &DailyFile, writer: W) -> Result<(), CorpusError> {
    write_records_csv(&file.records, writer)
}

pub fn write_records_csv<W: Write>(records: &[TweetRecord], writer: W) -> Result<(), CorpusError> {
    let mut wtr = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(writer);
    let io = |e: csv::Error| CorpusError::Io(e.to_string());
    wtr.write_record(CSV_HEADER).map_err(io)?;
    for r in records {
        let ts = format_timestamp(&r.created_at);
        wtr.write_record([
            r.tweet_id.as_str(),
            ts.as_str(),
            r.loc.as_str(),
            r.text.as_str(),
            r.user_id.as_str(),
            if r.verified { "1" } else { "0" },
        ])
        .map_err(io)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads `<dir>/YYYY-MM-DD.csv`, taking the date from the file name.
pub fn read_daily_file(path: &Path, mode: ParseMode) -> Result<(DailyFile, ParseReport), CorpusError> {
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| CorpusError::BadFileName(path.display().to_string()))?;
    let date = date_from_file_name(name)?;
    let f = fs::File::open(path)?;
    parse_daily_csv(std::io::BufReader::new(f), date, mode)
}

pub fn write_daily_file(dir: &Path, file: &DailyFile) -> Result<PathBuf, CorpusError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(file.file_name());
    let f = fs::File::create(&path)?;
    write_daily_csv(file, std::io::BufWriter::new(f))?;
    Ok(path)
}

/// Lists the daily files in a data directory, sorted by date. Other files are
/// ignored.
pub fn read_data_dir(dir: &Path) -> Result<Vec<(NaiveDate, PathBuf)>, CorpusError> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        if let Ok(date) = date_from_file_name(name) {
            files.push((date, path));
        }
    }
    files.sort();
    Ok(files)
}

/// Records of every daily file in `dir` whose date lies in `range` (all files
/// when `None`), in file order, with the dates of the files read.
pub fn read_corpus(
    dir: &Path,
    mode: ParseMode,
    range: Option<DateRange>,
) -> Result<(Vec<TweetRecord>, Vec<NaiveDate>, ParseReport), CorpusError> {
    let mut records = Vec::new();
    let mut dates = Vec::new();
    let mut total = ParseReport::default();
    for (date, path) in read_data_dir(dir)? {
        if range.is_some_and(|r| !r.contains(date)) {
            continue;
        }
        let (file, report) = read_daily_file(&path, mode)?;
        records.extend(file.records);
        dates.push(date);
        total.rows += report.rows;
        total.skipped.extend(report.skipped);
    }
    Ok((records, dates, total))
}
