pub mod arithmetic;
pub mod catalog;
pub mod control;
pub mod diffraction;
pub mod geometry;
pub mod spectral;
pub mod substitution;
pub mod report;
