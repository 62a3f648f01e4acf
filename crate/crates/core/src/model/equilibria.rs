use serde::{Deserialize, Serialize};

use super::{ModelError, ModelParams, State};

/// Equilibria of the noiseless model.
///
/// `e1` is the uninfected-only point, `e2` the infected-only point and `e3`
/// the interior saddle, present only when `0 < U* < S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibria {
    pub origin: State,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e1: Option<State>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e2: Option<State>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e3: Option<State>,
}

impl Equilibria {
    pub fn points(&self) -> impl Iterator<Item = (&'static str, State)> + '_ {
        std::iter::once(("origin", self.origin))
            .chain(self.e1.map(|s| ("E1", s)))
            .chain(self.e2.map(|s| ("E2", s)))
            .chain(self.e3.map(|s| ("E3", s)))
    }
}

/// Equilibria of the drift. The noise intensities are ignored.
///
/// A boundary point with a negative coordinate (decay exceeding birth) is
/// omitted.
pub fn equilibria(params: &ModelParams) -> Result<Equilibria, ModelError> {
    params.validate_positive_density()?;
    if params.b_u <= 0.0 {
        return Err(ModelError::InvalidParams {
            field: "b_U",
            reason: "must be > 0 to locate the interior equilibrium".into(),
        });
    }
    let carrying_u = (params.b_u - params.delta_u) / params.d_u;
    let carrying_i = (params.b_i - params.delta_i) / params.d_i;

    let e1 = (carrying_u >= 0.0).then(|| State::new(0.0, carrying_u));
    let e2 = (carrying_i >= 0.0).then(|| State::new(carrying_i, 0.0));

    // On the interior, I + U = S from the I equation and the U equation
    // reduces to b_U U / S = δ_U + d_U S.
    let total = carrying_i;
    let u_star = total * (params.delta_u + params.d_u * total) / params.b_u;
    let e3 = (u_star > 0.0 && u_star < total).then(|| State::new(total - u_star, u_star));

    Ok(Equilibria {
        origin: State::ORIGIN,
        e1,
        e2,
        e3,
    })
}
