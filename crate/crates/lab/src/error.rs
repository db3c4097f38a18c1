#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("input error: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] normderiv_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
