pub mod error;
pub mod fem;
pub mod linalg;
pub mod mesh;
pub mod friction;
pub mod vi_step;
pub mod problem;
pub mod timestepper;
pub mod analysis;
pub mod scenario;
pub mod vtk;
