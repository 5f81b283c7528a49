//! Transcribed coefficient tables of the pair-approximation ODEs.
//!
//! Direct-change matrices are stored in quarters, the correspondence
//! matrices as small integers. Row/column order follows the link orders
//! [`LINK6_LABELS`](super::LINK6_LABELS) and
//! [`LINK9_LABELS`](super::LINK9_LABELS); the columns of `Q_A`/`Q_B` follow
//! the neighbor opinion order of the effective fields.

/// Which correspondence matrix a related-change term uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Correspondence {
    /// A node leaving or entering `A` (`Q_A`).
    A,
    /// A node leaving or entering `B` (`Q_B`).
    B,
}

/// Which effective field a related-change term multiplies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    A,
    B,
    AB,
}

/// One additive piece of a column of `R`: `quarters/4 * Q * P(.|field)`.
#[derive(Clone, Copy, Debug)]
pub struct RelatedTerm {
    pub column: usize,
    pub q: Correspondence,
    pub field: Field,
    pub quarters: i8,
}

const fn term(column: usize, q: Correspondence, field: Field, quarters: i8) -> RelatedTerm {
    RelatedTerm {
        column,
        q,
        field,
        quarters,
    }
}

pub const D6_QUARTERS: [[i8; 6]; 6] = [
    [0, 0, 3, 0, 0, 2],
    [0, -4, 0, 0, 0, 0],
    [0, 2, -4, 0, 0, 0],
    [0, 0, 0, 0, 3, 2],
    [0, 2, 0, 0, -4, 0],
    [0, 0, 1, 0, 1, -4],
];

pub const QA6: [[i8; 3]; 6] = [
    [-1, 0, 0],
    [0, -1, 0],
    [1, 0, -1],
    [0, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
];

pub const QB6: [[i8; 3]; 6] = [
    [0, 0, 0],
    [-1, 0, 0],
    [1, 0, 0],
    [0, -1, 0],
    [0, 1, -1],
    [0, 0, 1],
];

use Correspondence as Q;

pub const R6_TERMS: [RelatedTerm; 8] = [
    term(1, Q::A, Field::A, 2),
    term(1, Q::B, Field::B, 2),
    term(2, Q::A, Field::A, 1),
    term(2, Q::A, Field::AB, -3),
    term(4, Q::B, Field::B, 1),
    term(4, Q::B, Field::AB, -3),
    term(5, Q::A, Field::AB, -4),
    term(5, Q::B, Field::AB, -4),
];

pub const D9_QUARTERS: [[i8; 9]; 9] = [
    [0, 0, 3, 0, 0, 0, 0, 0, 0],
    [0, -2, 0, 0, 0, 0, 0, 0, 0],
    [0, 2, -3, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 3, 0, 0, 2],
    [0, 0, 0, 0, -4, 0, 0, 0, 0],
    [0, 0, 0, 0, 2, -4, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 3, 2],
    [0, 0, 0, 0, 2, 0, 0, -4, 0],
    [0, 0, 0, 0, 0, 1, 0, 1, -4],
];

pub const QA9: [[i8; 4]; 9] = [
    [-1, 0, 0, 0],
    [0, 0, 0, 0],
    [1, 0, 0, 0],
    [0, -1, 0, 0],
    [0, 0, -1, 0],
    [0, 1, 0, -1],
    [0, 0, 0, 0],
    [0, 0, 1, 0],
    [0, 0, 0, 1],
];

pub const QB9: [[i8; 4]; 9] = [
    [0, 0, 0, 0],
    [-1, 0, 0, 0],
    [1, 0, 0, 0],
    [0, 0, 0, 0],
    [0, -1, 0, 0],
    [0, 1, 0, 0],
    [0, 0, -1, 0],
    [0, 0, 1, -1],
    [0, 0, 0, 1],
];

pub const R9_TERMS: [RelatedTerm; 10] = [
    term(1, Q::B, Field::B, 2),
    term(2, Q::A, Field::AB, -3),
    term(4, Q::A, Field::A, 2),
    term(4, Q::B, Field::B, 2),
    term(5, Q::A, Field::A, 1),
    term(5, Q::A, Field::AB, -3),
    term(7, Q::B, Field::B, 1),
    term(7, Q::B, Field::AB, -3),
    term(8, Q::A, Field::AB, -4),
    term(8, Q::B, Field::AB, -4),
];
