use std::collections::BTreeMap;
use std::path::Path;

use plural::experiment::prepare;
use plural::{default_feature_table, ingest, ExperimentConfig};
use plural_core::{filter_by_type_frequency, remove_compounds, CompoundMatch};

fn data_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data"))
}

#[test]
fn derived_classes_match_hand_annotation() {
    let table = default_feature_table();
    let entries = ingest(&data_dir().join("toy_lexicon.tsv"), &table).unwrap();
    let fixture = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/toy_expected_classes.tsv")).unwrap();
    let expected: BTreeMap<&str, &str> = fixture
        .lines()
        .filter(|l| !l.is_empty())
        .map(|l| l.split_once('\t').unwrap())
        .collect();
    assert_eq!(entries.len(), expected.len());
    for e in &entries {
        assert_eq!(e.class_name(), expected[e.orthography.as_str()], "{}", e.orthography);
    }
}

#[test]
fn every_toy_word_encodes_to_240_dimensions() {
    let table = default_feature_table();
    for e in ingest(&data_dir().join("toy_lexicon.tsv"), &table).unwrap() {
        let v = plural_core::encode_word(&e.singular, &table, 16).unwrap();
        assert_eq!(v.len(), 240);
        assert!(v.iter().any(|&x| x != 0.0));
    }
}

#[test]
fn frequency_and_compound_filters() {
    let table = default_feature_table();
    let entries = ingest(&data_dir().join("toy_lexicon.tsv"), &table).unwrap();
    let n = entries.len();
    let (kept, discarded) = filter_by_type_frequency(entries, 0.01);
    assert_eq!(kept.len() + discarded.len(), n);
    // Haus is the only Umlaut+s→zər noun; the two ʊm→a nouns also fall under 1%.
    let mut gone: Vec<&str> = discarded.iter().map(|e| e.orthography.as_str()).collect();
    gone.sort_unstable();
    assert_eq!(gone, ["Haus", "Praktikum", "Visum"]);

    let non_compound = remove_compounds(kept.clone(), CompoundMatch::Phonemes);
    let names: Vec<&str> = non_compound.iter().map(|e| e.orthography.as_str()).collect();
    // /kuːr/ ends in /uːr/, so Kur counts as a compound of Uhr.
    assert!(!names.contains(&"Kur"));
    assert!(names.contains(&"Uhr"));
    assert_eq!(non_compound.len(), kept.len() - 8);
}

#[test]
fn bundled_config_prepares() {
    let config = ExperimentConfig::load(&data_dir().join("toy_experiment.toml")).unwrap();
    config.validate().unwrap();
    let data = prepare(&config).unwrap();
    assert_eq!(data.ingested, 254);
    assert_eq!(data.filtered.len() + data.discarded.len(), 254);
    assert!(data.nouns.len() <= data.filtered.len());
}
