//! Intertwining residuals for covariant operators.

use crate::error::Result;
use crate::operators::CovariantOperator;
use crate::space::{act, slash_with, value_at, JacobiGroupElement, Map, SiegelJacobiPoint, TranslationLaw, WeightIndex, C64};

/// Scale-free relative difference: with `b` rescaled to unit modulus,
/// `|a - b| / (1 + |b|)`. `None` when `|b|` is below `floor`.
pub fn relative_residual(a: C64, b: C64, floor: f64) -> Option<f64> {
    let nb = b.norm();
    if !nb.is_finite() || !a.norm().is_finite() || nb < floor {
        return None;
    }
    Some((a - b).norm() / nb / 2.0)
}

/// Both sides of `Op(f|g)(x) = ((Op f)|g)(x)` with the output slashed at `out`.
pub fn intertwining_pair(
    op: &CovariantOperator,
    fs: &[Map],
    wis: &[WeightIndex],
    out: &WeightIndex,
    g: &JacobiGroupElement,
    x: &SiegelJacobiPoint,
) -> Result<(C64, C64)> {
    let law = TranslationLaw::Composite;
    let slashed: Vec<Map> = fs.iter().zip(wis).map(|(f, wi)| slash_with(f.clone(), g, wi, law)).collect();
    act(g, x)?;
    let lhs = value_at(op.apply(&slashed, wis)?.as_ref(), x)?;
    let rhs = value_at(slash_with(op.apply(fs, wis)?, g, out, law).as_ref(), x)?;
    Ok((lhs, rhs))
}
