//! WordPiece subword model: vocabulary, greedy encoder and trainer.

mod train;
mod trie;
mod vocab;

pub use train::{train, train_from_counts, train_nested, TrainerConfig, WordCounts};
pub use vocab::{
    decode_with_marker, encode_pretoken, Vocabulary, CLS, DEFAULT_CONTINUATION_MARKER,
    DEFAULT_MAX_WORD_LENGTH, MASK, PAD, SEP, SPECIAL_TOKENS, UNK, UNK_ID,
};
