//! Corpus readers (AVA text, CSV, JSONL) and result writers (JSONL, CSV).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use aesu_core::distributions::NUM_BINS;

use crate::error::{IngestError, LineError, Result};
use crate::record::{ImageRecord, ResultRow, RESULT_COLUMNS};

const AVA_FIELDS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    /// Whitespace-separated AVA.txt lines.
    Ava,
    /// `image_id,c1,...,c10` with a header row.
    Csv,
    /// One result/record object per line.
    Jsonl,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ava" => Ok(InputFormat::Ava),
            "csv" => Ok(InputFormat::Csv),
            "jsonl" => Ok(InputFormat::Jsonl),
            other => Err(format!("unknown input format {other:?} (expected ava, csv or jsonl)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Jsonl,
    Csv,
}

impl OutputFormat {
    /// CSV for `.csv` paths, JSONL otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => OutputFormat::Csv,
            _ => OutputFormat::Jsonl,
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            other => Err(format!("unknown output format {other:?} (expected jsonl or csv)")),
        }
    }
}

fn parse_count(index: usize, value: &str) -> Result<u64, LineError> {
    value.parse().map_err(|_| LineError::NotInteger { index, value: value.to_owned() })
}

/// Parses one AVA.txt line: row index, image id, ten vote counts for scores
/// 1..=10, two semantic tag ids and a challenge id.
pub fn parse_ava_line(line: &str) -> Result<ImageRecord, LineError> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != AVA_FIELDS {
        return Err(LineError::FieldCount { expected: AVA_FIELDS, found: fields.len() });
    }
    let ints = fields
        .iter()
        .enumerate()
        .map(|(i, f)| parse_count(i, f))
        .collect::<Result<Vec<u64>, _>>()?;
    let counts: [u64; NUM_BINS] = ints[2..2 + NUM_BINS].try_into().expect("ten count fields");
    let mut rec = ImageRecord::from_counts(fields[1], counts)?;
    rec.meta.tags = Some([ints[12], ints[13]]);
    rec.meta.challenge = Some(ints[14]);
    Ok(rec)
}

/// Records read from a corpus plus the lines skipped under `skip_bad`.
#[derive(Debug, Default)]
pub struct Corpus {
    pub records: Vec<ImageRecord>,
    pub skipped: Vec<(usize, LineError)>,
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| IngestError::io(path, e))
}

/// Reads a corpus file in order. A malformed line aborts the read unless
/// `skip_bad` is set, in which case it is recorded in [`Corpus::skipped`].
pub fn read_corpus(path: &Path, format: InputFormat, skip_bad: bool) -> Result<Corpus> {
    let mut corpus = Corpus::default();
    let mut accept = |line: usize, parsed: Result<ImageRecord, LineError>| -> Result<()> {
        match parsed {
            Ok(rec) => corpus.records.push(rec),
            Err(source) if skip_bad => corpus.skipped.push((line, source)),
            Err(source) => return Err(IngestError::MalformedLine { path: path.to_owned(), line, source }),
        }
        Ok(())
    };
    match format {
        InputFormat::Ava | InputFormat::Jsonl => {
            let reader = BufReader::new(open(path)?);
            for (idx, line) in reader.lines().enumerate() {
                let line = line.map_err(|e| IngestError::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let parsed = if format == InputFormat::Ava {
                    parse_ava_line(&line)
                } else {
                    parse_jsonl_line(&line)
                };
                accept(idx + 1, parsed)?;
            }
        }
        InputFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(open(path)?);
            let layout = CsvLayout::from_header(reader.headers()?)
                .map_err(|source| IngestError::MalformedLine { path: path.to_owned(), line: 1, source })?;
            for (idx, row) in reader.records().enumerate() {
                let parsed = match row {
                    Ok(row) => layout.parse(&row),
                    Err(e) => Err(LineError::Invalid(e.to_string())),
                };
                accept(idx + 2, parsed)?;
            }
        }
    }
    Ok(corpus)
}

pub fn parse_jsonl_line(line: &str) -> Result<ImageRecord, LineError> {
    let row: ResultRow = serde_json::from_str(line).map_err(|e| LineError::Invalid(e.to_string()))?;
    ImageRecord::try_from(row)
}

/// Input CSV files carry `image_id,c1..c10`; result CSV files carry a
/// space-separated `counts` column.
enum CsvLayout {
    Columns { id: usize, counts: [usize; NUM_BINS] },
    Joined(Vec<String>),
}

impl CsvLayout {
    fn from_header(header: &csv::StringRecord) -> Result<Self, LineError> {
        let find = |name: &str| header.iter().position(|h| h.trim() == name);
        let id = find("image_id").ok_or_else(|| LineError::Invalid("missing image_id column".into()))?;
        if find("counts").is_some() {
            return Ok(CsvLayout::Joined(header.iter().map(|h| h.trim().to_owned()).collect()));
        }
        let mut counts = [0; NUM_BINS];
        for (k, slot) in counts.iter_mut().enumerate() {
            *slot = find(&format!("c{}", k + 1))
                .ok_or_else(|| LineError::Invalid(format!("missing c{} column", k + 1)))?;
        }
        Ok(CsvLayout::Columns { id, counts })
    }

    fn parse(&self, row: &csv::StringRecord) -> Result<ImageRecord, LineError> {
        let cell = |i: usize| row.get(i).map(str::trim).unwrap_or("");
        let (id, counts) = match self {
            CsvLayout::Columns { id, counts } => {
                if row.len() != NUM_BINS + 1 {
                    return Err(LineError::FieldCount { expected: NUM_BINS + 1, found: row.len() });
                }
                let mut out = [0u64; NUM_BINS];
                for (k, &col) in counts.iter().enumerate() {
                    out[k] = parse_count(col, cell(col))?;
                }
                (*id, out)
            }
            CsvLayout::Joined(names) => {
                if row.len() != names.len() {
                    return Err(LineError::FieldCount { expected: names.len(), found: row.len() });
                }
                let named = |name: &str| names.iter().position(|n| n == name).map_or("", cell);
                return ImageRecord::try_from(ResultRow::from_csv_cells(named)?);
            }
        };
        Ok(ImageRecord::from_counts(cell(id), counts)?)
    }
}

/// Writes one row per record. CSV output always starts with the header,
/// JSONL has no header.
pub fn write_results(records: &[ImageRecord], path: &Path, format: OutputFormat) -> Result<()> {
    let file = File::create(path).map_err(|e| IngestError::io(path, e))?;
    write_results_to(records, BufWriter::new(file), format).map_err(|e| match e {
        IngestError::Io { source, .. } => IngestError::io(path, source),
        other => other,
    })
}

pub fn write_results_to<W: Write>(records: &[ImageRecord], mut out: W, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Jsonl => {
            for rec in records {
                serde_json::to_writer(&mut out, &ResultRow::from(rec))?;
                out.write_all(b"\n").map_err(|e| IngestError::io("<output>", e))?;
            }
            out.flush().map_err(|e| IngestError::io("<output>", e))?;
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(RESULT_COLUMNS)?;
            for rec in records {
                w.write_record(ResultRow::from(rec).csv_cells())?;
            }
            w.flush().map_err(|e| IngestError::io("<output>", e))?;
        }
    }
    Ok(())
}
