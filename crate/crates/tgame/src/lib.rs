//! Workbench for asymmetric timed games with one-clock timed-automaton
//! winning conditions.

pub mod automata;
pub mod bounded_reduction;
pub mod buchi_reduction;
pub mod exact_time;
pub mod game;
pub mod io;
pub mod lcm;
pub mod universality;
pub mod witness;
mod graph;
