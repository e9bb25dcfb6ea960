mod exact;
mod frontend;
mod koszul;
mod quiver;
mod witness;

pub use exact::*;
pub use frontend::*;
pub use koszul::*;
pub use quiver::*;
pub use witness::*;
