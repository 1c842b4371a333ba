//! Cohomology of unordered configuration spaces of the plane and the sphere.
//!
//! The library computes `H^*(C_n(C), -)` and `H^*(C_n(S^2), -)` with integral
//! and mod-p coefficients from the cellular cochain complexes whose cells are
//! labelled by integer compositions. Three independent routes are provided and
//! cross-checked against each other:
//!
//! - the *matrix* route: Smith normal form / mod-p rank of the boundary
//!   operators ([`complexes`], [`exactla`]),
//! - the *closed-form* route: monomial counting functions and generating
//!   series ([`combinat`]),
//! - the *reconstruction* route: universal coefficients plus the known
//!   torsion shape ([`engine`]).
//!
//! [`chainalg`] holds the formal operators on chains of compositions (the
//! differential, the sphere operator `D`, the near-null-homotopy `S`, the
//! insertion and permutation operators and the Bockstein), and [`engine`]
//! orchestrates the strategies and the verification suites.

pub mod chainalg;
pub mod combinat;
pub mod complexes;
pub mod engine;
pub mod exactla;
pub mod golden;

pub use chainalg::Chain;
pub use combinat::{Composition, Monomial};
pub use exactla::{AbelianGroup, Coeff, SparseIntMatrix};

/// Which configuration space a complex or table refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    Plane,
    Sphere,
}

impl std::fmt::Display for Space {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Space::Plane => write!(f, "plane"),
            Space::Sphere => write!(f, "sphere"),
        }
    }
}

/// Errors shared across the library.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum Error {
    #[error("composite of consecutive differentials is nonzero at degree {degree}")]
    CompositeNonzero { degree: usize },
    #[error("dimension formula produced a negative value for p={p}, n={n}, r={r}")]
    NegativeDimension { p: u64, n: u64, r: u64 },
    #[error("monomial of size {size} does not fit into total size {n}")]
    SizeExceedsTarget { size: u64, n: u64 },
    #[error("insertion position {position} out of range 1..={len}")]
    InsertionOutOfRange { position: usize, len: usize },
    #[error("strategy {strategy} does not support {coeff} coefficients")]
    UnsupportedStrategy { strategy: String, coeff: String },
    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),
    #[error("torsion reconstruction has no nonnegative solution at degree {degree} for p={p}")]
    NoTorsionSolution { degree: usize, p: u64 },
    #[error("even-part complex requires even size, got {0}")]
    OddSize(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
