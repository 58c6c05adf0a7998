//! Per-dataset accuracy and timing summaries.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use super::{accuracy, mean_inference_time, Accuracy, EvalRecord};
use crate::imaging::DatasetTag;

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSummary {
    pub dataset_tag: DatasetTag,
    pub accuracy: Accuracy,
    pub mean_infer_ms: f64,
}

impl DatasetSummary {
    pub fn total(&self) -> u64 {
        self.accuracy.total()
    }

    pub fn correct(&self) -> u64 {
        self.accuracy.correct()
    }
}

/// One summary per tag, in tag grammar order.
pub fn summarize(records: &[(DatasetTag, EvalRecord)]) -> Vec<DatasetSummary> {
    let mut groups: BTreeMap<DatasetTag, Vec<EvalRecord>> = BTreeMap::new();
    for (tag, r) in records {
        groups.entry(*tag).or_default().push(r.clone());
    }
    groups
        .into_iter()
        .map(|(dataset_tag, recs)| DatasetSummary {
            dataset_tag,
            accuracy: accuracy(&recs).expect("groups are non-empty"),
            mean_infer_ms: mean_inference_time(&recs).expect("groups are non-empty"),
        })
        .collect()
}

/// A summary attributed to a detector, one row of the report tables.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub detector: String,
    pub summary: DatasetSummary,
}

/// `<detector>_<TAG>.csv`
pub fn result_file_name(detector: &str, tag: DatasetTag) -> String {
    format!("{detector}_{tag}.csv")
}

/// Inverse of [`result_file_name`]; `None` for other files.
pub fn parse_result_file_name(name: &str) -> Option<(String, DatasetTag)> {
    let stem = name.strip_suffix(".csv")?;
    let (detector, tag) = stem.rsplit_once('_')?;
    if detector.is_empty() {
        return None;
    }
    Some((detector.to_string(), tag.parse().ok()?))
}

const SUMMARY_COLUMNS: [&str; 6] = ["Detector", "Dataset", "Total", "Correct", "Accuracy", "MeanInferTime"];

fn row_fields(row: &SummaryRow) -> [String; 6] {
    let s = &row.summary;
    [
        row.detector.clone(),
        s.dataset_tag.to_string(),
        s.total().to_string(),
        s.correct().to_string(),
        s.accuracy.display(),
        format!("{:.3}", s.mean_infer_ms),
    ]
}

pub fn write_summary_csv(rows: &[SummaryRow], path: &Path) -> io::Result<()> {
    let mut out = io::BufWriter::new(File::create(path)?);
    writeln!(out, "{}", SUMMARY_COLUMNS.join(","))?;
    for row in rows {
        writeln!(out, "{}", row_fields(row).join(","))?;
    }
    out.flush()
}

pub fn read_summary_csv(path: &Path) -> io::Result<Vec<SummaryRow>> {
    let invalid = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut rdr = csv::Reader::from_path(path).map_err(|e| invalid(e.to_string()))?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| invalid(e.to_string()))?;
        let f = |i: usize| rec.get(i).unwrap_or_default();
        let num = |i: usize| f(i).parse::<u64>().map_err(|_| invalid(format!("bad count {:?}", f(i))));
        let tag = f(1).parse::<DatasetTag>().map_err(|e| invalid(e.to_string()))?;
        let accuracy = Accuracy::new(num(3)?, num(2)?).map_err(|e| invalid(e.to_string()))?;
        let mean_infer_ms = f(5).parse().map_err(|_| invalid(format!("bad mean {:?}", f(5))))?;
        rows.push(SummaryRow {
            detector: f(0).to_string(),
            summary: DatasetSummary { dataset_tag: tag, accuracy, mean_infer_ms },
        });
    }
    Ok(rows)
}

/// Aligned plain-text table with accuracy in percent and mean time in ms.
pub fn format_summary_table(rows: &[SummaryRow]) -> String {
    let header = ["Detector", "Dataset", "Total", "Correct", "Accuracy (%)", "Mean infer (ms)"];
    let body: Vec<[String; 6]> = rows.iter().map(row_fields).collect();
    let mut widths = header.map(str::len);
    for r in &body {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[&str]| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| if i < 2 { format!("{c:<w$}", w = widths[i]) } else { format!("{c:>w$}", w = widths[i]) })
            .collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(&header);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    line(&rule.iter().map(String::as_str).collect::<Vec<_>>());
    for r in &body {
        line(&r.iter().map(String::as_str).collect::<Vec<_>>());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(i: usize, correct: bool, ms: f64) -> EvalRecord {
        EvalRecord {
            file_name: format!("m{i}.ppm"),
            infer_time_ms: ms,
            filtered_reading: "1".into(),
            expected_reading: "1".into(),
            is_correct: correct,
        }
    }

    #[test]
    fn half_correct_is_fifty() {
        let records: Vec<_> = (0..30).map(|i| (DatasetTag::Blur(50), rec(i, i % 2 == 0, 10.0))).collect();
        let s = summarize(&records);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].accuracy.display(), "50.00");
        assert_eq!((s[0].correct(), s[0].total()), (15, 30));
    }

    #[test]
    fn grammar_order() {
        let records = vec![
            (DatasetTag::SaltPepper(12), rec(0, true, 1.0)),
            (DatasetTag::Original, rec(1, true, 1.0)),
            (DatasetTag::Blur(10), rec(2, false, 1.0)),
        ];
        let tags: Vec<_> = summarize(&records).iter().map(|s| s.dataset_tag).collect();
        assert_eq!(tags, vec![DatasetTag::Original, DatasetTag::Blur(10), DatasetTag::SaltPepper(12)]);
    }

    #[test]
    fn file_names() {
        assert_eq!(result_file_name("template", DatasetTag::Blur(20)), "template_20BLUR.csv");
        assert_eq!(parse_result_file_name("my_det_0.25GAMMA.csv"), Some(("my_det".to_string(), DatasetTag::Gamma(25))));
        assert_eq!(parse_result_file_name("template_summary.csv"), None);
        assert_eq!(parse_result_file_name("_ORIGINAL.csv"), None);
        assert_eq!(parse_result_file_name("template_ORIGINAL.txt"), None);
    }

    #[test]
    fn summary_csv_round_trip_and_table() {
        let rows: Vec<SummaryRow> = summarize(&[
            (DatasetTag::Original, rec(0, true, 1.5)),
            (DatasetTag::Original, rec(1, false, 2.0)),
            (DatasetTag::Blur(90), rec(2, false, 3.25)),
        ])
        .into_iter()
        .map(|summary| SummaryRow { detector: "template".into(), summary })
        .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_summary_csv(&rows, &path).unwrap();
        assert_eq!(read_summary_csv(&path).unwrap(), rows);

        let table = format_summary_table(&rows);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[2].contains("ORIGINAL") && lines[2].contains("50.00") && lines[2].contains("1.750"));
        assert!(format_summary_table(&[]).lines().count() == 2);
    }
}
