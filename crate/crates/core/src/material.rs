//! Physical parameters of the three-fluid system.
//!
//! [`MaterialParams`] is the raw user input. [`MaterialParams::validate`]
//! checks positivity, derives the spreading coefficients and returns an
//! immutable [`Material`] that the rest of the crate consumes.

use crate::error::{Error, Result};
use crate::wetting::WallSides;

/// Spreading coefficients from pairwise surface tensions.
///
/// `sigma_1 = g12 + g13 - g23` and cyclic. Fails with
/// [`Error::TotalSpreading`] when any coefficient is not strictly positive.
pub fn spreading_coefficients(gamma12: f64, gamma13: f64, gamma23: f64) -> Result<[f64; 3]> {
    let sigma = [
        gamma12 + gamma13 - gamma23,
        gamma12 + gamma23 - gamma13,
        gamma13 + gamma23 - gamma12,
    ];
    for (i, &s) in sigma.iter().enumerate() {
        if !(s > 0.0) {
            return Err(Error::TotalSpreading {
                index: i + 1,
                value: s,
            });
        }
    }
    Ok(sigma)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialParams {
    pub gamma12: f64,
    pub gamma13: f64,
    pub gamma23: f64,
    /// Diffuse interface width.
    pub epsilon: f64,
    pub mobility: f64,
    pub rho: f64,
    pub eta: f64,
    pub walls: WallSides,
}

impl Default for MaterialParams {
    fn default() -> Self {
        MaterialParams {
            gamma12: 1.0,
            gamma13: 1.0,
            gamma23: 1.0,
            epsilon: 0.04,
            mobility: 1e-4,
            rho: 1.0,
            eta: 0.1,
            walls: WallSides::default(),
        }
    }
}

impl MaterialParams {
    pub fn validate(&self) -> Result<Material> {
        let positive = [
            ("gamma12", self.gamma12),
            ("gamma13", self.gamma13),
            ("gamma23", self.gamma23),
            ("epsilon", self.epsilon),
            ("mobility", self.mobility),
            ("rho", self.rho),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::invalid(name, format!("must be positive and finite, got {value}")));
            }
        }
        // eta = 0 is the inviscid limit used by the conservative-limit audit.
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(Error::invalid("eta", format!("must be non-negative, got {}", self.eta)));
        }
        for g in self.walls.iter().flat_map(|w| w.gamma_s) {
            if !g.is_finite() {
                return Err(Error::invalid("gamma_s", "wall energies must be finite"));
            }
        }
        let sigma = spreading_coefficients(self.gamma12, self.gamma13, self.gamma23)?;
        Ok(Material {
            params: self.clone(),
            sigma,
        })
    }
}

/// Validated parameters. Immutable; cheap to clone and share.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    params: MaterialParams,
    sigma: [f64; 3],
}

impl Material {
    pub fn params(&self) -> &MaterialParams {
        &self.params
    }
    pub fn sigma(&self) -> [f64; 3] {
        self.sigma
    }
    pub fn epsilon(&self) -> f64 {
        self.params.epsilon
    }
    pub fn mobility(&self) -> f64 {
        self.params.mobility
    }
    pub fn rho(&self) -> f64 {
        self.params.rho
    }
    pub fn eta(&self) -> f64 {
        self.params.eta
    }
    pub fn walls(&self) -> &WallSides {
        &self.params.walls
    }

    /// Surface tension of the pair (i, j), zero-based.
    pub fn gamma(&self, i: usize, j: usize) -> f64 {
        let p = &self.params;
        match (i.min(j), i.max(j)) {
            (0, 1) => p.gamma12,
            (0, 2) => p.gamma13,
            (1, 2) => p.gamma23,
            _ => 0.0,
        }
    }

    pub fn max_gamma(&self) -> f64 {
        self.params.gamma12.max(self.params.gamma13).max(self.params.gamma23)
    }

    /// `sum_i 1/sigma_i`, the normalisation of the Lagrange multiplier.
    pub fn inverse_sigma_sum(&self) -> f64 {
        self.sigma.iter().map(|s| 1.0 / s).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spreading_examples() {
        assert_eq!(spreading_coefficients(1.0, 1.0, 1.0).unwrap(), [1.0, 1.0, 1.0]);
        assert_eq!(spreading_coefficients(2.0, 3.0, 4.0).unwrap(), [1.0, 3.0, 5.0]);
        match spreading_coefficients(1.0, 1.0, 3.0) {
            Err(Error::TotalSpreading { index: 1, value }) => assert_eq!(value, -1.0),
            other => panic!("expected total spreading, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_bad_fields() {
        let p = MaterialParams {
            epsilon: 0.0,
            ..Default::default()
        };
        match p.validate() {
            Err(Error::InvalidParameter { name, .. }) => assert_eq!(name, "epsilon"),
            other => panic!("{other:?}"),
        }
        let p = MaterialParams {
            mobility: -1.0,
            ..Default::default()
        };
        match p.validate() {
            Err(Error::InvalidParameter { name, .. }) => assert_eq!(name, "mobility"),
            other => panic!("{other:?}"),
        }
        let m = MaterialParams::default().validate().unwrap();
        assert_eq!(m.sigma(), [1.0, 1.0, 1.0]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn pair_sums_are_exact(g12 in 0.5f64..2.0, g13 in 0.5f64..2.0, g23 in 0.5f64..2.0) {
                prop_assume!(g12 + g13 > g23 && g12 + g23 > g13 && g13 + g23 > g12);
                let s = spreading_coefficients(g12, g13, g23).unwrap();
                prop_assert!((s[0] + s[1] - 2.0 * g12).abs() <= 4.0 * f64::EPSILON * g12.max(g13).max(g23));
                prop_assert!((s[0] + s[2] - 2.0 * g13).abs() <= 4.0 * f64::EPSILON * g12.max(g13).max(g23));
                prop_assert!((s[1] + s[2] - 2.0 * g23).abs() <= 4.0 * f64::EPSILON * g12.max(g13).max(g23));
            }

            #[test]
            fn swapping_fluids_one_and_two(g12 in 0.5f64..2.0, g13 in 0.5f64..2.0, g23 in 0.5f64..2.0) {
                prop_assume!(g12 + g13 > g23 && g12 + g23 > g13 && g13 + g23 > g12);
                let a = spreading_coefficients(g12, g13, g23).unwrap();
                let b = spreading_coefficients(g12, g23, g13).unwrap();
                prop_assert_eq!(a[0], b[1]);
                prop_assert_eq!(a[1], b[0]);
                prop_assert_eq!(a[2], b[2]);
            }
        }
    }
}
