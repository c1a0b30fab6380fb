pub mod model;
pub mod numeric;
pub mod oracle;
pub mod linalg;
pub mod circuit;
pub mod simulator;
pub mod compile_unitary;
pub mod compile_general;
pub mod mbqc;
pub mod iqp;
pub mod verify;
