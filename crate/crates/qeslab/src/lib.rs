pub mod cli;
pub mod koleykar;
pub mod numerics;
pub mod potential;
pub mod qes_core;
pub mod scattering;
pub mod semiclassics;
pub mod states;
