use crate::error::{Error, Result};
use crate::math::ModelVector;

/// One sampled UE's contribution to a global round.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalUpdate {
    pub ue: usize,
    /// Unnormalised weight, usually `D_n / D`.
    pub weight: f64,
    pub w: ModelVector,
    /// `∇F_n(w_n)`.
    pub grad: ModelVector,
}

/// Weighted averages of the local models and local gradients.
///
/// Weights are renormalised over the given updates and summation runs in
/// ascending UE order, so the result does not depend on input order.
pub fn aggregate(updates: &[LocalUpdate]) -> Result<(ModelVector, ModelVector)> {
    let first = updates
        .first()
        .ok_or_else(|| Error::invalid("cannot aggregate an empty sample set"))?;
    let dim = first.w.len();
    let mut order: Vec<&LocalUpdate> = updates.iter().collect();
    order.sort_by_key(|u| u.ue);
    if order.windows(2).any(|p| p[0].ue == p[1].ue) {
        return Err(Error::invalid("duplicate UE in aggregation set"));
    }
    let mut total = 0.0;
    for u in &order {
        u.w.check_dim(dim)?;
        u.grad.check_dim(dim)?;
        if !(u.weight >= 0.0 && u.weight.is_finite()) {
            return Err(Error::invalid(format!(
                "UE {} has invalid weight {}",
                u.ue, u.weight
            )));
        }
        total += u.weight;
    }
    if !(total > 0.0) {
        return Err(Error::invalid("aggregation weights sum to zero"));
    }
    let mut w = ModelVector::zeros(dim);
    let mut g = ModelVector::zeros(dim);
    for u in order {
        let p = u.weight / total;
        w.axpy(p, &u.w);
        g.axpy(p, &u.grad);
    }
    Ok((w, g))
}
