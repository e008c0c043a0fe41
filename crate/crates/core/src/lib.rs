pub mod padic;
pub mod linalg;
pub mod sandbox;
pub mod phin;
pub mod pi_sen;
pub mod verify;
pub mod document;
