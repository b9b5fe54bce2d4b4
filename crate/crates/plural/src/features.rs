//! Feature-table files: UTF-8, tab-separated, a header row
//! `symbol<TAB>name1<TAB>…`, then one row per phoneme. Lines starting with
//! `#` and blank lines are ignored.

use std::path::Path;

use plural_core::FeatureTable;

use crate::{Error, Result};

/// The bundled 15-feature articulatory table.
pub const DEFAULT_FEATURE_TABLE: &str = include_str!("../data/features.tsv");

pub fn default_feature_table() -> FeatureTable {
    parse_feature_table(DEFAULT_FEATURE_TABLE, Path::new("<bundled>")).expect("bundled table is valid")
}

pub fn load_feature_table(path: &Path) -> Result<FeatureTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_feature_table(&text, path)
}

/// `path` is only used in error messages.
pub fn parse_feature_table(text: &str, path: &Path) -> Result<FeatureTable> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or_else(|| parse_err(1, "missing header row".into()))?;
    let mut columns = header.split('\t');
    if columns.next() != Some("symbol") {
        return Err(parse_err(header_line, "header must start with `symbol`".into()));
    }
    let names: Vec<String> = columns.map(str::to_string).collect();

    let mut rows = Vec::new();
    for (line, text) in lines {
        let mut fields = text.split('\t');
        let symbol = fields.next().unwrap_or_default().trim();
        if symbol.is_empty() {
            return Err(parse_err(line, "empty phoneme symbol".into()));
        }
        let values = fields
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| parse_err(line, format!("bad feature value: {e}")))?;
        rows.push((line, symbol.to_string(), values));
    }
    let mut table_rows = Vec::with_capacity(rows.len());
    for (line, symbol, values) in rows {
        if values.len() != names.len() {
            return Err(parse_err(
                line,
                format!(
                    "wrong feature count for {symbol:?}: expected {}, found {}",
                    names.len(),
                    values.len()
                ),
            ));
        }
        table_rows.push((symbol, values));
    }
    FeatureTable::new(names, table_rows).map_err(|e| match e {
        plural_core::Error::DuplicateSymbol(s) => parse_err(
            text.lines().position(|l| l.split('\t').next() == Some(s.as_str())).map_or(0, |i| i + 1),
            format!("duplicate symbol {s:?}"),
        ),
        other => Error::Core(other),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> String {
        let names: Vec<String> = (1..=15).map(|i| format!("f{i}")).collect();
        format!("symbol\t{}\n", names.join("\t"))
    }

    fn row(symbol: &str, n: usize) -> String {
        let vals = vec!["0"; n].join("\t");
        format!("{symbol}\t{vals}\n")
    }

    #[test]
    fn bundled_table_has_fifteen_features() {
        let t = default_feature_table();
        assert_eq!(t.feature_count(), 15);
        assert!(t.len() >= 40);
        assert!(t.symbols().all(|s| t.features(s).unwrap().iter().any(|&v| v > 0.0)));
    }

    #[test]
    fn bundled_bundles_are_distinct() {
        let t = default_feature_table();
        let rows: Vec<&[f64]> = t.symbols().map(|s| t.features(s).unwrap()).collect();
        for (i, a) in rows.iter().enumerate() {
            assert!(rows[i + 1..].iter().all(|b| a != b));
        }
    }

    #[test]
    fn short_row_is_rejected() {
        let text = header() + "# comment\n" + &row("a", 14);
        let err = parse_feature_table(&text, Path::new("t.tsv")).unwrap_err();
        assert!(err.to_string().contains("wrong feature count"), "{err}");
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn duplicate_symbol_is_rejected() {
        let text = header() + &row("a", 15) + &row("a", 15);
        let err = parse_feature_table(&text, Path::new("t.tsv")).unwrap_err();
        assert!(err.to_string().contains("duplicate symbol"), "{err}");
    }

    #[test]
    fn malformed_value_is_rejected() {
        let text = header() + "a\tx" + &"\t0".repeat(14) + "\n";
        assert!(matches!(
            parse_feature_table(&text, Path::new("t.tsv")).unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
    }
}
