use crate::uv::BodyPartId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("undefined comparison: {0}")]
    UndefinedComparison(String),

    #[error("corrupt corpus: {0}")]
    CorruptCorpus(String),

    #[error("unparseable command: {0:?}")]
    UnparseableCommand(String),

    #[error("stroke lies off the body")]
    OffBody,

    #[error("invalid stroke: {0}")]
    InvalidStroke(String),

    #[error("no corpus entry matches part {0}")]
    NoMatch(BodyPartId),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("not found: {0}")]
    NotFound(String),

    #[error("nothing to undo")]
    NothingToUndo,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code, used on the wire by the HTTP service.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::UndefinedComparison(_) => "undefined-comparison",
            Error::CorruptCorpus(_) => "corrupt-corpus",
            Error::UnparseableCommand(_) => "unparseable-command",
            Error::OffBody => "off-body",
            Error::InvalidStroke(_) => "invalid-stroke",
            Error::NoMatch(_) => "no-match",
            Error::EmptyCorpus => "empty-corpus",
            Error::NotFound(_) => "not-found",
            Error::NothingToUndo => "nothing-to-undo",
            Error::Io(_) => "io",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
