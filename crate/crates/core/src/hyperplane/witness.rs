//! Randomized search for a primitive element of S_C*.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::avoid::AvoidedSet;
use super::Arrangement;
use crate::error::{Error, Result};
use crate::gf::FieldElement;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct HyperplaneCheck {
    /// L_i(y).
    pub value: u32,
    pub constant: u32,
    pub avoids: bool,
}

/// Exponent check y^((|F|-1)/r) ≠ 1 for one prime r.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ExponentCheck {
    pub prime: String,
    pub passes: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Witness {
    #[serde(skip)]
    pub element: FieldElement,
    /// Power-basis coordinates.
    pub coords: Vec<u32>,
    /// Digits in the arrangement basis.
    pub digits: Vec<u32>,
    pub draws: u64,
    pub hyperplanes: Vec<HyperplaneCheck>,
    pub exponent_checks: Vec<ExponentCheck>,
}

impl Witness {
    /// Re-derives every check from scratch.
    pub fn verify(&self, arr: &Arrangement) -> bool {
        let ctx = arr.ctx();
        arr.avoids(&self.element)
            && ctx.is_primitive(&self.element)
            && self.hyperplanes.iter().all(|h| h.avoids)
            && self.exponent_checks.iter().all(|c| c.passes)
    }
}

fn transcript(arr: &Arrangement, y: FieldElement, draws: u64) -> Witness {
    let ctx = arr.ctx();
    let hyperplanes = arr
        .evaluate(&y)
        .into_iter()
        .zip(arr.hyperplanes())
        .map(|(value, h)| HyperplaneCheck {
            value,
            constant: h.constant,
            avoids: value != h.constant,
        })
        .collect();
    let exponent_checks = ctx
        .primitivity_transcript(&y)
        .into_iter()
        .map(|(r, passes)| ExponentCheck {
            prime: r.to_string(),
            passes,
        })
        .collect();
    Witness {
        coords: y.coords().to_vec(),
        digits: arr.basis().digits(&y),
        element: y,
        draws,
        hyperplanes,
        exponent_checks,
    }
}

/// Draws uniform elements of S_C* until one is primitive. In general position
/// each L-value is drawn from F_q ∖ {c_i} and mapped back; otherwise uniform
/// elements of the field are filtered.
pub fn find_primitive_avoiding(arr: &Arrangement, seed: u64, max_draws: u64) -> Result<Witness> {
    let ctx = arr.ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = AvoidedSet::sampler(arr).ok();
    let n = ctx.n();
    let mut v = vec![0u32; n];
    for draw in 1..=max_draws {
        let y = match &sampler {
            Some(s) => {
                for (slot, allowed) in v.iter_mut().zip(s.allowed()) {
                    if allowed.is_empty() {
                        return Err(Error::NotFound { draws: draw - 1 });
                    }
                    *slot = allowed[rng.random_range(0..allowed.len())];
                }
                s.element_of(&v)
            }
            None => {
                let y = ctx.random_element(&mut rng);
                if !arr.avoids(&y) {
                    continue;
                }
                y
            }
        };
        if ctx.is_primitive(&y) {
            return Ok(transcript(arr, y, draw));
        }
    }
    Err(Error::NotFound { draws: max_draws })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{build_field, Basis, BuildOptions, FieldParams};
    use crate::hyperplane::digit_arrangement;
    use std::sync::Arc;

    fn basis(p: u32, n: u32) -> Basis {
        let ctx = build_field(FieldParams::new(p, 1, n).unwrap(), &BuildOptions::default()).unwrap();
        Basis::power(Arc::new(ctx))
    }

    #[test]
    fn q2_ones_has_no_witness() {
        let arr = digit_arrangement(basis(2, 2), &[1, 1]).unwrap();
        assert!(matches!(
            find_primitive_avoiding(&arr, 0, 50),
            Err(Error::NotFound { draws: 50 })
        ));
    }

    #[test]
    fn f343_witness_verifies() {
        let arr = digit_arrangement(basis(7, 3), &[1, 1, 1]).unwrap();
        let w = find_primitive_avoiding(&arr, 3, 1000).unwrap();
        assert!(w.verify(&arr));
        assert!(w.digits.iter().all(|&d| d != 1));
        let again = find_primitive_avoiding(&arr, 3, 1000).unwrap();
        assert_eq!(w, again);
    }
}
