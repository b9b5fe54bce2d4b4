//! Lexicon filtering, compound removal and train/test splitting.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::phonology::{derive_plural_class, PhonemeString, PluralClass};
use crate::{Error, Result};

/// Type-frequency cutoff below which plural classes are discarded.
pub const DEFAULT_MIN_FRACTION: f64 = 0.001;

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    pub orthography: String,
    pub singular: PhonemeString,
    pub plural: PhonemeString,
    pub class: PluralClass,
}

impl LexiconEntry {
    pub fn new(orthography: String, singular: PhonemeString, plural: PhonemeString) -> Self {
        let class = derive_plural_class(&singular, &plural);
        Self {
            orthography,
            singular,
            plural,
            class,
        }
    }

    pub fn class_name(&self) -> String {
        self.class.canonical_name()
    }
}

/// Keeps entries whose class makes up at least `min_fraction` of all entries.
///
/// Returns `(kept, discarded)`, both in input order.
pub fn filter_by_type_frequency(
    entries: Vec<LexiconEntry>,
    min_fraction: f64,
) -> (Vec<LexiconEntry>, Vec<LexiconEntry>) {
    let total = entries.len() as f64;
    let mut counts: BTreeMap<&PluralClass, usize> = BTreeMap::new();
    for e in &entries {
        *counts.entry(&e.class).or_default() += 1;
    }
    let retained: BTreeSet<PluralClass> = counts
        .into_iter()
        .filter(|(_, n)| *n as f64 / total >= min_fraction)
        .map(|(c, _)| c.clone())
        .collect();
    entries.into_iter().partition(|e| retained.contains(&e.class))
}

/// How one noun is recognised as the rightmost lexeme of another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CompoundMatch {
    /// Singular phoneme strings.
    #[default]
    Phonemes,
    /// Lower-cased orthography.
    Orthography,
}

/// Drops every entry that ends in another entry of the lexicon, leaving at
/// least one phoneme (or letter) in front.
pub fn remove_compounds(entries: Vec<LexiconEntry>, by: CompoundMatch) -> Vec<LexiconEntry> {
    match by {
        CompoundMatch::Phonemes => {
            let words: BTreeSet<&[String]> =
                entries.iter().map(|e| e.singular.symbols()).collect();
            let compound: Vec<bool> = entries
                .iter()
                .map(|e| {
                    let s = e.singular.symbols();
                    (1..s.len()).any(|start| words.contains(&s[start..]))
                })
                .collect();
            retain_flags(entries, &compound)
        }
        CompoundMatch::Orthography => {
            let lowered: Vec<String> = entries.iter().map(|e| e.orthography.to_lowercase()).collect();
            let words: BTreeSet<&str> = lowered.iter().map(String::as_str).collect();
            let compound: Vec<bool> = lowered
                .iter()
                .map(|w| {
                    w.char_indices()
                        .skip(1)
                        .any(|(start, _)| words.contains(&w[start..]))
                })
                .collect();
            retain_flags(entries, &compound)
        }
    }
}

fn retain_flags<T>(items: Vec<T>, drop: &[bool]) -> Vec<T> {
    items
        .into_iter()
        .zip(drop)
        .filter_map(|(item, &d)| (!d).then_some(item))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitOptions {
    /// Share of items assigned to the training set.
    pub fraction: f64,
    pub seed: u64,
    /// Cut every class separately at `fraction`.
    pub stratify: bool,
}

impl Default for SplitOptions {
    fn default() -> Self {
        Self {
            fraction: 0.5,
            seed: 0,
            stratify: false,
        }
    }
}

/// Training and testing sets, plus the training set with every
/// default-class item removed.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSplit<T> {
    pub train: Vec<T>,
    pub test: Vec<T>,
    pub train_no_default: Vec<T>,
}

impl<T> DataSplit<T> {
    pub fn map<U>(self, mut f: impl FnMut(T) -> U) -> DataSplit<U> {
        DataSplit {
            train: self.train.into_iter().map(&mut f).collect(),
            test: self.test.into_iter().map(&mut f).collect(),
            train_no_default: self.train_no_default.into_iter().map(&mut f).collect(),
        }
    }
}

/// Seeded partition of `0..labels.len()` into sorted `(train, test)` index
/// lists. The training side gets `round(fraction · n)` items, per class
/// when stratified.
pub fn split_indices(labels: &[&str], options: &SplitOptions) -> Result<(Vec<usize>, Vec<usize>)> {
    if labels.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(0.0..=1.0).contains(&options.fraction) {
        return Err(Error::InvalidFraction(options.fraction));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let groups: Vec<Vec<usize>> = if options.stratify {
        let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            by_class.entry(l).or_default().push(i);
        }
        by_class.into_values().collect()
    } else {
        alloc::vec![(0..labels.len()).collect()]
    };
    let mut train = Vec::new();
    let mut test = Vec::new();
    for mut group in groups {
        group.shuffle(&mut rng);
        let cut = libm::round(options.fraction * group.len() as f64) as usize;
        train.extend_from_slice(&group[..cut]);
        test.extend_from_slice(&group[cut..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Splits lexicon entries and derives the training set without the
/// `default_class` items.
pub fn split(
    entries: &[LexiconEntry],
    options: &SplitOptions,
    default_class: &str,
) -> Result<DataSplit<LexiconEntry>> {
    let names: Vec<String> = entries.iter().map(LexiconEntry::class_name).collect();
    let labels: Vec<&str> = names.iter().map(String::as_str).collect();
    let (train_idx, test_idx) = split_indices(&labels, options)?;
    let train: Vec<LexiconEntry> = train_idx.iter().map(|&i| entries[i].clone()).collect();
    let train_no_default = train_idx
        .iter()
        .filter(|&&i| labels[i] != default_class)
        .map(|&i| entries[i].clone())
        .collect();
    Ok(DataSplit {
        train,
        test: test_idx.iter().map(|&i| entries[i].clone()).collect(),
        train_no_default,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn entry(orth: &str, sg: &str, pl: &str) -> LexiconEntry {
        LexiconEntry::new(
            orth.to_string(),
            PhonemeString::parse(sg).unwrap(),
            PhonemeString::parse(pl).unwrap(),
        )
    }

    fn numbered(n: usize, suffix: &str) -> Vec<LexiconEntry> {
        (0..n)
            .map(|i| {
                let sg = format!("x{i}");
                entry(&sg, &sg, &format!("{sg} {suffix}"))
            })
            .collect()
    }

    #[test]
    fn single_class_keeps_everything() {
        let (kept, dropped) = filter_by_type_frequency(numbered(50, "n"), DEFAULT_MIN_FRACTION);
        assert_eq!((kept.len(), dropped.len()), (50, 0));
    }

    #[test]
    fn singleton_at_the_cutoff_is_kept() {
        let mut entries = numbered(999, "n");
        entries.push(entry("odd", "o d", "o d s"));
        let (kept, dropped) = filter_by_type_frequency(entries, 0.001);
        assert_eq!((kept.len(), dropped.len()), (1000, 0));

        let mut entries = numbered(1999, "n");
        entries.push(entry("odd", "o d", "o d s"));
        let (kept, dropped) = filter_by_type_frequency(entries, 0.001);
        assert_eq!((kept.len(), dropped.len()), (1999, 1));
        assert_eq!(dropped[0].orthography, "odd");
    }

    #[test]
    fn compound_with_known_head_is_removed() {
        let entries = vec![
            entry("Haus", "h aʊ s", "h ɔʏ z ə r"),
            entry("Baumhaus", "b aʊ m h aʊ s", "b aʊ m h ɔʏ z ə r"),
        ];
        let kept = remove_compounds(entries.clone(), CompoundMatch::Phonemes);
        assert_eq!(kept, vec![entries[0].clone()]);
        let kept = remove_compounds(entries.clone(), CompoundMatch::Orthography);
        assert_eq!(kept, vec![entries[0].clone()]);
    }

    #[test]
    fn single_entry_and_duplicates_survive() {
        let one = vec![entry("Haus", "h aʊ s", "h ɔʏ z ə r")];
        assert_eq!(remove_compounds(one.clone(), CompoundMatch::Phonemes), one);
        let twice = vec![one[0].clone(), one[0].clone()];
        assert_eq!(remove_compounds(twice.clone(), CompoundMatch::Phonemes), twice);
    }

    #[test]
    fn split_sizes_and_default_removal() {
        let mut entries = numbered(150, "n");
        entries.extend(numbered(50, "s"));
        let s = split(&entries, &SplitOptions::default(), "+s").unwrap();
        assert_eq!((s.train.len(), s.test.len()), (100, 100));
        let defaults = s.train.iter().filter(|e| e.class_name() == "+s").count();
        assert_eq!(s.train_no_default.len(), s.train.len() - defaults);
        assert!(s.train_no_default.iter().all(|e| e.class_name() != "+s"));
    }

    #[test]
    fn split_is_seeded() {
        let entries = numbered(101, "n");
        let opts = SplitOptions { seed: 7, ..Default::default() };
        assert_eq!(split(&entries, &opts, "+s"), split(&entries, &opts, "+s"));
        let other = SplitOptions { seed: 8, ..Default::default() };
        assert_ne!(split(&entries, &opts, "+s"), split(&entries, &other, "+s"));
    }

    #[test]
    fn stratified_split_cuts_each_class() {
        let mut entries = numbered(40, "n");
        entries.extend(numbered(20, "s"));
        let opts = SplitOptions { stratify: true, ..Default::default() };
        let s = split(&entries, &opts, "+s").unwrap();
        assert_eq!(s.train.iter().filter(|e| e.class_name() == "+s").count(), 10);
        assert_eq!(s.train.iter().filter(|e| e.class_name() == "+n").count(), 20);
    }

    #[test]
    fn split_rejects_empty_and_bad_fraction() {
        assert_eq!(split(&[], &SplitOptions::default(), "+s").unwrap_err(), Error::EmptyInput);
        let opts = SplitOptions { fraction: 1.5, ..Default::default() };
        assert!(matches!(
            split(&numbered(3, "n"), &opts, "+s").unwrap_err(),
            Error::InvalidFraction(_)
        ));
    }

    fn arb_entries() -> impl Strategy<Value = Vec<LexiconEntry>> {
        prop::collection::vec(
            (prop::collection::vec("[abc]", 1..5), "[nsə]"),
            1..40,
        )
        .prop_map(|rows| {
            rows.into_iter()
                .enumerate()
                .map(|(i, (sg, suffix))| {
                    let sg = sg.join(" ");
                    entry(&format!("w{i}"), &sg, &format!("{sg} {suffix}"))
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn remove_compounds_is_idempotent(entries in arb_entries()) {
            let once = remove_compounds(entries, CompoundMatch::Phonemes);
            let twice = remove_compounds(once.clone(), CompoundMatch::Phonemes);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn kept_classes_meet_the_cutoff(entries in arb_entries(), cutoff in 0.0f64..0.5) {
            let total = entries.len() as f64;
            let (kept, dropped) = filter_by_type_frequency(entries, cutoff);
            prop_assert_eq!(kept.len() + dropped.len(), total as usize);
            for e in &kept {
                let n = kept.iter().filter(|k| k.class == e.class).count();
                prop_assert!(n as f64 / total >= cutoff);
            }
        }

        #[test]
        fn split_partitions(n in 1usize..200, seed in any::<u64>(), fraction in 0.0f64..=1.0) {
            let labels: Vec<&str> = (0..n).map(|i| if i % 3 == 0 { "a" } else { "b" }).collect();
            let opts = SplitOptions { fraction, seed, stratify: false };
            let (train, test) = split_indices(&labels, &opts).unwrap();
            let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            prop_assert!((train.len() as f64 - fraction * n as f64).abs() <= 1.0);
        }
    }
}
