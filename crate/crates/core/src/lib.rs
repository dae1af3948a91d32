//! Thickness, Gap Lemmas and sums of almost Mathieu spectra.

pub mod amo;
pub mod bounds;
pub mod cli;
pub mod dioph;
pub mod gaplemma;
pub mod ids;
pub mod pipeline;
pub mod setalg;
