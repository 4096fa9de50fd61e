pub mod order;
pub mod preference;
pub mod game;
pub mod solver;
pub mod existence;
pub mod random;
pub mod driving;
