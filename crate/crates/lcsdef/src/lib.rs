//! Exact symbolic engine for coisotropic deformation theory on torus models
//! of locally conformal symplectic manifolds.

#![allow(clippy::needless_range_loop)]

pub mod ring;
pub mod forms;
pub mod syntax;
pub mod gen;
pub mod lcps;
pub mod linalg;
pub mod thickening;
pub mod models;
pub mod linfty;
pub mod master;
pub mod mc;
pub mod bulk;
