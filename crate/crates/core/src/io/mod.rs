pub mod config;
pub mod tables;
pub mod vtk;
