//! The Original/Direct two-word update rule, written out case by case.

use crate::network::{Opinion, Word};

/// Words a speaker may utter, with probabilities `num / den`.
pub fn utterances(speaker: Opinion) -> &'static [(Word, i64, i64)] {
    match speaker {
        Opinion::A | Opinion::Committed => &[(Word::A, 1, 1)],
        Opinion::B => &[(Word::B, 1, 1)],
        Opinion::AB => &[(Word::A, 1, 2), (Word::B, 1, 2)],
    }
}

/// Opinions of `(speaker, listener)` after the speaker utters `word`.
pub fn interact(speaker: Opinion, listener: Opinion, word: Word) -> (Opinion, Opinion) {
    use Opinion::*;
    let listener_has_word = match (listener, word) {
        (A | AB | Committed, Word::A) => true,
        (B | AB, Word::B) => true,
        _ => false,
    };
    let collapsed = match word {
        Word::A => A,
        Word::B => B,
    };
    if listener_has_word {
        // Agreement: both keep only the uttered word; committed nodes are fixed.
        let s = if speaker == Committed { Committed } else { collapsed };
        let l = if listener == Committed { Committed } else { collapsed };
        (s, l)
    } else {
        // Failure: the listener learns the word unless it is committed.
        let l = match listener {
            Committed => Committed,
            _ => AB,
        };
        (speaker, l)
    }
}
