pub mod benchmark;
pub mod eval;
pub mod fit;
pub mod jitter;
pub mod simulate;
pub mod verify;
