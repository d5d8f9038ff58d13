pub mod channels;
pub mod covmap;
pub mod fields;
pub mod numkit;
pub mod rwa;
