pub mod eigenfunction;
pub mod error;
pub mod oracle;
pub mod quadrature;
pub mod rational;
pub mod reference;
pub mod series;
pub mod shape;
pub mod superpotential;
pub mod trig;
pub mod verify;

pub use error::{Error, Result};
pub use rational::Rational;
