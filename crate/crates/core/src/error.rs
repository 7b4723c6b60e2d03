use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("word is empty")]
    EmptyWord,
    #[error("`{0}` is not a permutation of 1..n")]
    NotAPermutation(String),
    #[error("malformed permutation text `{0}`")]
    MalformedPermutation(String),
    #[error("malformed partition spec: {0}")]
    MalformedPartition(String),
    #[error("pattern `{pattern}` has size {found}, expected {expected}")]
    PatternSize {
        pattern: String,
        expected: usize,
        found: usize,
    },
    #[error("pattern size {0} is outside the supported range 1..=9")]
    UnsupportedPatternSize(usize),
    #[error("pattern `{0}` appears more than once")]
    DuplicatePattern(String),
    #[error("window of length {len} at offset {start} is not a hit")]
    NotAHit { start: usize, len: usize },
    #[error("window at offset {start} forms `{pattern}`, which the partition does not contain")]
    NotAPartitionHit { start: usize, pattern: String },
    #[error("invalid straightening set: {0}")]
    InvalidStraighteningSet(String),
    #[error("straightening did not terminate within {0} steps")]
    StepBudgetExceeded(u64),
    #[error("n = {n} is beyond the enumeration limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("pattern size {c} exceeds permutation size {n}")]
    PatternLongerThanHost { c: usize, n: usize },
    #[error("partitions have different pattern sizes ({0} and {1})")]
    MismatchedPatternSize(usize, usize),
    #[error("supports overlap on pattern `{0}`")]
    OverlappingSupports(String),
    #[error("invalid pairing: {0}")]
    InvalidPairing(String),
    #[error("pattern `{0}` is not omni leaning")]
    NotOmniLeaning(String),
    #[error("pattern `{0}` is already in the partition")]
    AlreadyPresent(String),
    #[error("part index {0} does not exist")]
    NoSuchPart(usize),
    #[error("{k} disjoint pairs requested but at most {max} exist for c = {c}")]
    TooManyPairs { c: usize, k: usize, max: usize },
    #[error("method not available: {0}")]
    MethodMismatch(String),
    #[error("class members reach different normal forms: `{first}` vs `{other}`")]
    RootMismatch { first: String, other: String },
    #[error("identity class by closure ({closure} members) differs from the c-toothed filter ({teeth} members)")]
    IdClassMismatch { closure: usize, teeth: usize },
}
