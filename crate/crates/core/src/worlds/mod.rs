//! Finitely described worlds over a countably infinite population.

mod align;
mod delta;
mod rearrange;
mod tail;
mod transfer;
mod world;

pub use align::{align, Correspondence, RefinedCell};
pub use delta::{delta_profile, pareto_compare, DeltaBlock, DeltaProfile};
pub use rearrange::{FlowEntry, Rearrangement};
pub use tail::{GeometricTerm, SignSummary, Tail, TailDescriptor};
pub use transfer::{apply_restricted_transfers, RestrictedTransfer};
pub use world::{canonical_pair, Cell, CellValue, Population, World};

use crate::error::WorldError;
use crate::exactnum::Rational;

/// Pointwise affine combination `Σ αᵢ wᵢ` with weights that are non-negative and sum to 1.
pub fn convex_combine(pairs: &[(Rational, World)]) -> Result<World, WorldError> {
    let Some((_, first)) = pairs.first() else {
        return Err(WorldError::Weight("no worlds to combine".into()));
    };
    if let Some((a, _)) = pairs.iter().find(|(a, _)| a.is_negative()) {
        return Err(WorldError::Weight(format!("negative weight {a}")));
    }
    let total: Rational = pairs.iter().map(|(a, _)| a).sum();
    if total != Rational::one() {
        return Err(WorldError::Weight(format!("weights sum to {total}, not 1")));
    }
    let mut acc = World::constant(first.population().clone(), Rational::zero());
    for (a, w) in pairs {
        acc = acc.add(&w.scale(a))?;
    }
    Ok(acc)
}
