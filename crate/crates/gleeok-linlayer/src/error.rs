use gleeok_cipher::CipherError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinLayerError {
    #[error("influence is tracked for at most {max} half-rounds, got {got}")]
    HalfRounds { got: usize, max: usize },
    #[error("the native trail search covers 1..={max} rounds, got {got}")]
    TrailRounds { got: usize, max: usize },
    #[error("theta offsets {0:?} do not define an invertible map")]
    Singular([usize; 3]),
    #[error(transparent)]
    Cipher(#[from] CipherError),
}
