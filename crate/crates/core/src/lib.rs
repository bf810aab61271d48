//! Look-compute-move simulation of opaque, collision-intolerant robot swarms.

pub mod geom;
pub mod model;
pub mod sched;
pub mod trace;
pub mod engine;
pub mod problems;
pub mod algos;
pub mod experiment;
pub mod relmap;
pub mod demos;
