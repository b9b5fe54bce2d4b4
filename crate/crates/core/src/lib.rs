//! Plural-class prediction from phonological form.
//!
//! The crate holds the algorithmic side of the toolkit: phoneme feature
//! encoding and transformation-class derivation, lexicon filtering and
//! splitting, three associative classifiers (nearest neighbour, the
//! Generalized Context Model and a three-layer backprop network), the
//! default-rule hybrids built on top of them, and the two-dimensional
//! pseudolanguage generator.
//!
//! Everything here is `no_std` + `alloc`; file formats, configuration and
//! the command line live in the companion `plural` crate.
#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` style checks are there to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod classifiers;
pub mod dataset;
mod error;
pub mod hybrid;
mod math;
pub mod phonology;
pub mod synthetic;

pub use classifiers::{
    evaluate, gcm_classify, gcm_optimize_scale, mlp_classify, mlp_train, nn_classify,
    nn_leave_one_out, ClassId, ClassSet, ClassifierResponse, Evaluation, ExemplarMemory,
    GcmParams, Kernel, MlpConfig, MlpModel,
};
pub use dataset::{
    filter_by_type_frequency, remove_compounds, split, CompoundMatch, DataSplit, LexiconEntry,
    SplitOptions,
};
pub use error::{Error, Result};
pub use hybrid::{
    grid_search_s_t, hybrid_gcm_classify, hybrid_mlp_classify, hybrid_nn_classify,
    threshold_sweep, HybridBase, SweepCurve,
};
pub use phonology::{
    derive_plural_class, encode_word, EncodedNoun, FeatureTable, PhonemeString, PluralClass,
};
pub use synthetic::{
    compare_simple_vs_hybrid, generate_language, regular_taxonomy, LanguageSpec, SyntheticSample,
    Verdict,
};

/// Canonical name of the default ("add -s") plural class.
pub const DEFAULT_CLASS_NAME: &str = "+s";
