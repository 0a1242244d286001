//! Exact arithmetic: rationals, cardinals over ℕ ∪ {ω}, and classification of
//! infinite sums.

mod cardinal;
mod rational;
mod sum;

pub use cardinal::{cardinal_add, Cardinal, Finite, Omega};
pub use rational::{q, Rational};
pub use sum::{sum_classify, Mass, SumClass, SumTerm};
