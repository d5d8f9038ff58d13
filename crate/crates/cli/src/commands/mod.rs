mod bessel;
mod covmap;
mod fields;
mod kraus;
mod rwa;

pub use bessel::bessel_identities;
pub use covmap::covmap;
pub use fields::{free_sign, im_indeterminate};
pub use kraus::kraus;
pub use rwa::rwa;
