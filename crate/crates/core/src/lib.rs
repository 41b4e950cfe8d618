pub mod cli;
pub mod eval;
pub mod features;
pub mod imaging;
pub mod learn;
pub mod rht;
pub mod segmentation;
