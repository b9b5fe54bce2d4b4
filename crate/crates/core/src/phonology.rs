//! Phoneme feature encoding and singular→plural transformation classes.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Number of phonetic slots in an encoded word.
pub const DEFAULT_SLOTS: usize = 16;

/// Number of features per phoneme in the bundled table.
pub const DEFAULT_FEATURE_COUNT: usize = 15;

/// Maps phoneme symbols to fixed-length feature bundles.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    feature_names: Vec<String>,
    entries: BTreeMap<String, Vec<f64>>,
}

impl FeatureTable {
    /// Builds a table, rejecting duplicate symbols, rows of the wrong width
    /// and values outside `[0, 1]`.
    pub fn new<I>(feature_names: Vec<String>, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Vec<f64>)>,
    {
        if feature_names.is_empty() {
            return Err(Error::NoFeatures);
        }
        let expected = feature_names.len();
        let mut entries = BTreeMap::new();
        for (symbol, values) in rows {
            if values.len() != expected {
                return Err(Error::WrongFeatureCount {
                    symbol,
                    expected,
                    found: values.len(),
                });
            }
            if let Some(&value) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::FeatureOutOfRange { symbol, value });
            }
            if entries.contains_key(&symbol) {
                return Err(Error::DuplicateSymbol(symbol));
            }
            entries.insert(symbol, values);
        }
        Ok(Self {
            feature_names,
            entries,
        })
    }

    pub fn feature_count(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn features(&self, symbol: &str) -> Option<&[f64]> {
        self.entries.get(symbol).map(Vec::as_slice)
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.entries.contains_key(symbol)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Checks that every symbol of `word` is in the table.
    pub fn check(&self, word: &PhonemeString) -> Result<()> {
        match word
            .symbols()
            .iter()
            .position(|s| !self.entries.contains_key(s))
        {
            Some(position) => Err(Error::UnknownPhoneme {
                symbol: word.symbols()[position].clone(),
                position,
            }),
            None => Ok(()),
        }
    }
}

/// An ordered sequence of phoneme symbols.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct PhonemeString(Vec<String>);

impl PhonemeString {
    pub fn new(symbols: Vec<String>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Self(symbols))
    }

    /// Splits on whitespace; each token is one phoneme.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(text.split_whitespace().map(ToString::to_string).collect())
    }

    pub fn symbols(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when `other` is a suffix of `self` that leaves at least one
    /// phoneme in front of it.
    pub fn has_proper_suffix(&self, other: &PhonemeString) -> bool {
        other.len() < self.len() && self.0.ends_with(&other.0)
    }
}

impl fmt::Display for PhonemeString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(s)?;
        }
        Ok(())
    }
}

/// Encodes `word` as `slots × feature_count` values, right-justified.
///
/// Words shorter than `slots` are zero-padded on the left; longer words keep
/// their rightmost `slots` phonemes.
pub fn encode_word(word: &PhonemeString, table: &FeatureTable, slots: usize) -> Result<Vec<f64>> {
    if slots == 0 {
        return Err(Error::ZeroSlots);
    }
    table.check(word)?;
    let width = table.feature_count();
    let mut out = vec![0.0; slots * width];
    let kept = word.len().min(slots);
    let skipped = word.len() - kept;
    let first_slot = slots - kept;
    for (i, symbol) in word.symbols()[skipped..].iter().enumerate() {
        let features = table.features(symbol).expect("checked above");
        let start = (first_slot + i) * width;
        out[start..start + width].copy_from_slice(features);
    }
    Ok(out)
}

/// The stem-vowel alternations counted as umlaut.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UmlautPairs(Vec<(String, String)>);

impl UmlautPairs {
    pub fn new(pairs: Vec<(String, String)>) -> Self {
        Self(pairs)
    }

    pub fn is_umlaut(&self, plain: &str, fronted: &str) -> bool {
        self.0.iter().any(|(a, b)| a == plain && b == fronted)
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.0
    }
}

impl Default for UmlautPairs {
    /// a→ä, o→ö, u→ü (short and long) and au→äu, in the bundled table's symbols.
    fn default() -> Self {
        let pairs = [
            ("a", "ɛ"),
            ("aː", "ɛː"),
            ("ɔ", "œ"),
            ("oː", "øː"),
            ("ʊ", "ʏ"),
            ("uː", "yː"),
            ("aʊ", "ɔʏ"),
        ];
        Self(
            pairs
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        )
    }
}

/// The non-umlaut part of a singular→plural transformation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Change {
    None,
    Suffix(Vec<String>),
    Rewrite { from: Vec<String>, to: Vec<String> },
}

/// A plural transformation class, e.g. `+ən`, `Umlaut+ə` or `ʊm→ən`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PluralClass {
    pub umlaut: bool,
    pub change: Change,
}

impl PluralClass {
    pub const IDENTITY: PluralClass = PluralClass {
        umlaut: false,
        change: Change::None,
    };

    pub fn suffix(symbols: &[&str]) -> Self {
        Self {
            umlaut: false,
            change: Change::Suffix(symbols.iter().map(|s| s.to_string()).collect()),
        }
    }

    pub fn rewrite(from: &[&str], to: &[&str]) -> Self {
        Self {
            umlaut: false,
            change: Change::Rewrite {
                from: from.iter().map(|s| s.to_string()).collect(),
                to: to.iter().map(|s| s.to_string()).collect(),
            },
        }
    }

    pub fn with_umlaut(mut self) -> Self {
        self.umlaut = true;
        self
    }

    /// `Identity`, `Umlaut`, `+ən`, `Umlaut+ər`, `ʊm→ən`, ...
    pub fn canonical_name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for PluralClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, symbols: &[String]| -> fmt::Result {
            symbols.iter().try_for_each(|s| f.write_str(s))
        };
        match (&self.change, self.umlaut) {
            (Change::None, false) => f.write_str("Identity"),
            (Change::None, true) => f.write_str("Umlaut"),
            (change, umlaut) => {
                if umlaut {
                    f.write_str("Umlaut")?;
                }
                match change {
                    Change::Suffix(suffix) => {
                        f.write_str("+")?;
                        join(f, suffix)
                    }
                    Change::Rewrite { from, to } => {
                        if umlaut {
                            f.write_str("+")?;
                        }
                        join(f, from)?;
                        f.write_str("→")?;
                        join(f, to)
                    }
                    Change::None => unreachable!(),
                }
            }
        }
    }
}

/// Classifies the transformation from `singular` to `plural` with the
/// default umlaut pairs.
pub fn derive_plural_class(singular: &PhonemeString, plural: &PhonemeString) -> PluralClass {
    derive_plural_class_with(singular, plural, &UmlautPairs::default())
}

/// Classifies the transformation from `singular` to `plural`.
///
/// The first position where the two forms differ is checked for an umlaut
/// pair; if found, the singular's vowel is fronted and the flag set. The
/// (possibly fronted) singular is then compared with the plural: equal forms
/// are identity, a plural extending the singular is suffixation, and anything
/// else is a rewrite of everything after the longest common prefix.
pub fn derive_plural_class_with(
    singular: &PhonemeString,
    plural: &PhonemeString,
    umlauts: &UmlautPairs,
) -> PluralClass {
    let sg = singular.symbols();
    let pl = plural.symbols();

    let mut stem: Vec<&str> = sg.iter().map(String::as_str).collect();
    let mut umlaut = false;
    let first_diff = common_prefix(&stem, pl);
    if first_diff < stem.len() && first_diff < pl.len() && umlauts.is_umlaut(stem[first_diff], &pl[first_diff]) {
        stem[first_diff] = &pl[first_diff];
        umlaut = true;
    }

    let shared = common_prefix(&stem, pl);
    let change = if shared == stem.len() && shared == pl.len() {
        Change::None
    } else if shared == stem.len() {
        Change::Suffix(pl[shared..].to_vec())
    } else {
        Change::Rewrite {
            from: stem[shared..].iter().map(|s| s.to_string()).collect(),
            to: pl[shared..].to_vec(),
        }
    };
    PluralClass { umlaut, change }
}

fn common_prefix(a: &[&str], b: &[String]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| **x == y.as_str()).count()
}

/// A word's encoding together with its class label.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EncodedNoun {
    pub vector: Vec<f64>,
    /// Canonical plural-class name.
    pub label: String,
    pub source_id: String,
}
