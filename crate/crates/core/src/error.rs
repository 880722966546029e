use thiserror::Error;

/// Pipeline stage, used to attribute capacity and internal errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Translation,
    Determinization,
    Tracking,
    Abstraction,
    Game,
    Extraction,
    Verification,
    Oracle,
    Generator,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Stage::Translation => "translation",
            Stage::Determinization => "determinization",
            Stage::Tracking => "tracking",
            Stage::Abstraction => "abstraction",
            Stage::Game => "game",
            Stage::Extraction => "extraction",
            Stage::Verification => "verification",
            Stage::Oracle => "oracle",
            Stage::Generator => "generator",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid alphabet: {0}")]
    Alphabet(String),

    #[error("formula contains the prompt-eventually operator; an LTL formula is required")]
    NotLtl,

    #[error("letter {letter:#x} is outside the automaton alphabet ({aps} propositions)")]
    LetterOutOfRange { letter: u32, aps: usize },

    #[error("malformed automaton at {location}: {msg}")]
    Format { location: String, msg: String },

    #[error("{stage}: capacity exceeded ({what} > {limit})")]
    Capacity {
        stage: Stage,
        what: &'static str,
        limit: usize,
    },

    #[error("{stage}: internal error: {msg}")]
    Internal { stage: Stage, msg: String },

    #[error("invalid argument: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn internal(stage: Stage, msg: impl Into<String>) -> Self {
        Error::Internal {
            stage,
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
