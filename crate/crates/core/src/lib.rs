pub mod bench;
pub mod cli;
pub mod field;
pub mod complex;
pub mod matroid;
pub mod morse;
pub mod pareto;
pub mod persist;
pub mod spmat;
