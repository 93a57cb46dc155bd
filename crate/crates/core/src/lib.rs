pub mod corpus;
pub mod decide;
pub mod error;
pub mod exlab;
pub mod groups;
pub mod instance;
pub mod oracle;
pub mod typelat;

pub use error::{Error, Result};
