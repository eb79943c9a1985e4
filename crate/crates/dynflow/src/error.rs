use thiserror::Error;

/// Errors surfaced by graph construction, batch application and file parsing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop on vertex {0} is not allowed")]
    SelfLoop(u32),

    #[error("vertex id {id} out of range for {vertex_count} vertices")]
    VertexOutOfRange { id: u64, vertex_count: usize },

    #[error("source and sink must be distinct")]
    SourceEqualsSink,

    #[error("update targets missing edge ({u}, {v}); only existing slots can change capacity")]
    MissingEdge { u: u32, v: u32 },

    #[error("duplicate update entry for edge ({u}, {v}) within one batch")]
    DuplicateUpdate { u: u32, v: u32 },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("requested {requested} edges but a simple digraph on {vertices} vertices holds at most {max}")]
    TooManyEdges {
        requested: u64,
        vertices: usize,
        max: u64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
