use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cannot coarsen a level-{from} step function to level {to}")]
    CannotCoarsen { from: u32, to: u32 },

    #[error("grid level {level} exceeds the level cap {cap}")]
    LevelCap { level: u32, cap: u32 },

    #[error("expected 2^{level} cell values, got {got}")]
    CellCount { level: u32, got: usize },

    #[error("linear combination needs at least one term")]
    EmptyCombination,

    #[error("level-{level} cells are too coarse to resolve r_{k}")]
    RademacherTooCoarse { k: u32, level: u32 },

    #[error("W_{index} is not constant on level-{level} cells")]
    IndexTooLarge { index: u64, level: u32 },

    #[error("cell {cell} out of range for level {level}")]
    CellOutOfRange { cell: u64, level: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("coefficient comparison {0} cannot be certified symbolically; evaluate exactly")]
    NeedsExactEvaluation(String),

    #[error("expansion indices must be strictly ascending (index {0} repeats or goes backwards)")]
    UnorderedExpansion(u64),

    #[error("invalid block sequence: {0}")]
    InvalidBlocks(String),

    #[error(
        "level cap {cap} allows at most {max_blocks} block(s); block {blocks} needs level {level}"
    )]
    TooManyBlocks {
        blocks: usize,
        level: u32,
        cap: u32,
        max_blocks: usize,
    },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn at(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Resource-limit errors (as opposed to bad input).
    pub fn is_resource(&self) -> bool {
        match self {
            Error::LevelCap { .. } | Error::TooManyBlocks { .. } => true,
            Error::Stage { source, .. } => source.is_resource(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
