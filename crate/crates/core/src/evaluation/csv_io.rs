//! Result CSV: `FileName,InferTime,FilteredReading,ExpectedReading,IsCorrect`.
//!
//! InferTime is milliseconds with three decimals, IsCorrect is `true` or
//! `false`, rows end in LF. The parser also accepts headers with spaces
//! after the commas.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use super::EvalRecord;

pub const CSV_HEADER: &str = "FileName,InferTime,FilteredReading,ExpectedReading,IsCorrect";
const COLUMNS: [&str; 5] = ["FileName", "InferTime", "FilteredReading", "ExpectedReading", "IsCorrect"];

fn to_io(e: csv::Error) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, e)
}

pub fn write_csv_to<W: Write>(records: &[EvalRecord], out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(out);
    w.write_record(COLUMNS).map_err(to_io)?;
    for r in records {
        w.write_record([
            r.file_name.as_str(),
            &format!("{:.3}", r.infer_time_ms),
            &r.filtered_reading,
            &r.expected_reading,
            if r.is_correct { "true" } else { "false" },
        ])
        .map_err(to_io)?;
    }
    w.flush()
}

pub fn write_csv(records: &[EvalRecord], path: &Path) -> io::Result<()> {
    let file = File::create(path)?;
    let mut buf = io::BufWriter::new(file);
    write_csv_to(records, &mut buf)?;
    buf.flush()
}

pub fn parse_csv<R: Read>(input: R) -> io::Result<Vec<EvalRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::Headers).from_reader(input);
    let headers = rdr.headers().map_err(to_io)?.clone();
    if headers.iter().ne(COLUMNS) {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unexpected CSV header {:?}", headers.iter().collect::<Vec<_>>()),
        ));
    }
    let bad = |row: usize, what: String| io::Error::new(io::ErrorKind::InvalidData, format!("CSV row {row}: {what}"));
    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(to_io)?;
        let field = |j: usize| row.get(j).unwrap_or_default();
        let infer_time_ms: f64 =
            field(1).trim().parse().map_err(|_| bad(i + 2, format!("bad InferTime {:?}", field(1))))?;
        if infer_time_ms.is_nan() || infer_time_ms < 0.0 {
            return Err(bad(i + 2, format!("negative InferTime {infer_time_ms}")));
        }
        let is_correct = match field(4).trim() {
            t if t.eq_ignore_ascii_case("true") => true,
            f if f.eq_ignore_ascii_case("false") => false,
            other => return Err(bad(i + 2, format!("bad IsCorrect {other:?}"))),
        };
        records.push(EvalRecord {
            file_name: field(0).to_string(),
            infer_time_ms,
            filtered_reading: field(2).to_string(),
            expected_reading: field(3).to_string(),
            is_correct,
        });
    }
    Ok(records)
}

pub fn read_csv(path: &Path) -> io::Result<Vec<EvalRecord>> {
    parse_csv(File::open(path)?)
}
