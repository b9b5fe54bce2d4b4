//! Lexicon files: UTF-8 TSV with columns
//! `orthography<TAB>singular<TAB>plural`, phonemes separated by spaces.
//! Lines starting with `#` and blank lines are skipped.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use plural_core::{FeatureTable, LexiconEntry, PhonemeString};

use crate::{Error, Result};

pub fn ingest(path: &Path, table: &FeatureTable) -> Result<Vec<LexiconEntry>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_lexicon(&text, table, path)
}

pub fn parse_lexicon(text: &str, table: &FeatureTable, path: &Path) -> Result<Vec<LexiconEntry>> {
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(err(format!("expected 3 tab-separated columns, found {}", fields.len())));
        }
        let word = |column: &str, text: &str| -> Result<PhonemeString> {
            let w = PhonemeString::parse(text).map_err(|e| err(format!("{column}: {e}")))?;
            table.check(&w).map_err(|e| err(format!("{column}: {e}")))?;
            Ok(w)
        };
        let singular = word("singular", fields[1])?;
        let plural = word("plural", fields[2])?;
        entries.push(LexiconEntry::new(fields[0].trim().to_string(), singular, plural));
    }
    Ok(entries)
}

/// One orthography per line; `#` comments allowed.
pub fn load_exclusions(path: &Path) -> Result<BTreeSet<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect())
}

pub fn write_lexicon(path: &Path, entries: &[LexiconEntry]) -> Result<()> {
    let mut out = Vec::new();
    for e in entries {
        writeln!(out, "{}\t{}\t{}", e.orthography, e.singular, e.plural).expect("write to vec");
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
