pub mod baseline;
pub mod dataset;
pub mod eval;
pub mod normalize;
pub mod rank;
pub mod search;
pub mod wiki;
