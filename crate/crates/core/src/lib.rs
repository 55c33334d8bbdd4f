pub mod error;
pub mod format;
pub mod grassmann;
pub mod hilbert;
pub mod isometry;
pub mod measure;
pub mod projective;
pub mod reconstruct;
pub mod report;
pub mod sampling;
pub mod tolerance;
