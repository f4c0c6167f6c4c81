use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid drift: {0}")]
    InvalidDrift(String),

    #[error("point {t0} outside the hull domain ({lo}, {hi}]")]
    OutOfDomain { t0: f64, lo: f64, hi: f64 },

    #[error("sample of size {n} too small for {needed} batches")]
    SampleTooSmall { n: usize, needed: usize },

    #[error("degenerate subsample distribution (zero interquartile range)")]
    DegenerateSubsampling,

    #[error("window guard exhausted {max_doublings} doublings on draw {draw}")]
    WindowError { draw: usize, max_doublings: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
