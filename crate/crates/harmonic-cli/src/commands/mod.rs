pub mod additivity;
pub mod ldf;
pub mod mgf;
pub mod ness;
pub mod pressure;
pub mod simulate;
pub mod verify;
