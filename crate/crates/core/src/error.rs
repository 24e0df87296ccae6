use thiserror::Error;

use crate::lattice::Elem;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cover relation contains a cycle through {0:?}")]
    Cycle(Vec<String>),
    #[error("not a lattice: {x} and {y} have no unique {which}")]
    NotALattice {
        x: String,
        y: String,
        which: &'static str,
    },
    #[error("declared cover {0} -> {1} is implied by other covers")]
    NonCover(String, String),
    #[error("element {z} is not below the target of {arrow}")]
    NotBelowTarget { arrow: String, z: String },
    #[error("element {z} is not above the source of {arrow}")]
    NotAboveSource { arrow: String, z: String },
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("{0} -> {1} is not a comparable pair")]
    NotComparable(String, String),
    #[error("lattice has {0} non-identity arrows; at most {max} are supported", max = crate::bits::MAX_ARROWS)]
    TooManyArrows(usize),
    #[error("arrow sets belong to different lattices")]
    MixedLattices,
    #[error("arrow set is not a transfer system")]
    NotTransferSystem,
    #[error("arrow set is not a cotransfer system")]
    NotCotransferSystem,
    #[error("arrow set is neither a transfer nor a cotransfer system")]
    NotTransferOrCotransfer,
    #[error("arrow set is not a decomposable subcategory (witness {0})")]
    NotDecomposable(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("not a model structure: {0}")]
    NotAModelStructure(String),
    #[error("not a weak equivalence set")]
    NotWeakEquivalenceSet,
    #[error("transfer system is not the acyclic fibrations of a model structure with these weak equivalences")]
    NotInAfw,
    #[error("brute force over {0} arrows is too large (limit 20)")]
    TooLarge(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn not_comparable(lattice: &crate::Lattice, x: Elem, y: Elem) -> Self {
        let name = |e: Elem| {
            if e < lattice.len() {
                lattice.label(e).to_string()
            } else {
                e.to_string()
            }
        };
        Error::NotComparable(name(x), name(y))
    }
}
