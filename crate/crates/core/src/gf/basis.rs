use std::sync::Arc;

use rand::Rng;

use super::matrix::Matrix;
use super::{FieldCtx, FieldElement};
use crate::error::{Error, Result};

/// An F_q-basis b_1..b_n of F_{q^n}.
#[derive(Clone, Debug)]
pub struct Basis {
    ctx: Arc<FieldCtx>,
    elements: Vec<FieldElement>,
    /// Column j holds the power-basis coordinates of b_j.
    to_power: Matrix,
    from_power: Matrix,
}

impl Basis {
    /// 1, x, ..., x^{n-1}.
    pub fn power(ctx: Arc<FieldCtx>) -> Self {
        let n = ctx.n();
        let elements = (0..n)
            .map(|i| {
                let mut c = vec![0; n];
                c[i] = 1;
                ctx.element(c).expect("unit vector")
            })
            .collect();
        Basis {
            ctx,
            elements,
            to_power: Matrix::identity(n),
            from_power: Matrix::identity(n),
        }
    }

    pub fn new(ctx: Arc<FieldCtx>, elements: Vec<FieldElement>) -> Result<Self> {
        if elements.len() != ctx.n() {
            return Err(Error::InvalidParameters(format!(
                "a basis needs {} elements, got {}",
                ctx.n(),
                elements.len()
            )));
        }
        let cols: Vec<Vec<u32>> = elements.iter().map(|e| e.coords().to_vec()).collect();
        let to_power = Matrix::from_columns(&cols);
        let from_power = to_power
            .inverse(ctx.subfield())
            .ok_or_else(|| Error::InvalidParameters("elements are linearly dependent".into()))?;
        Ok(Basis {
            ctx,
            elements,
            to_power,
            from_power,
        })
    }

    /// A uniformly random basis.
    pub fn random<R: Rng + ?Sized>(ctx: Arc<FieldCtx>, rng: &mut R) -> Self {
        loop {
            let elements = (0..ctx.n()).map(|_| ctx.random_element(rng)).collect();
            if let Ok(b) = Basis::new(ctx.clone(), elements) {
                return b;
            }
        }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn elements(&self) -> &[FieldElement] {
        &self.elements
    }

    pub fn is_power_basis(&self) -> bool {
        self.to_power == Matrix::identity(self.ctx.n())
    }

    /// The a_i with y = Σ a_i b_i.
    pub fn digits(&self, y: &FieldElement) -> Vec<u32> {
        self.from_power.mul_vec(self.ctx.subfield(), y.coords())
    }

    /// Σ a_i b_i.
    pub fn combine(&self, digits: &[u32]) -> FieldElement {
        let coords = self.to_power.mul_vec(self.ctx.subfield(), digits);
        self.ctx.element(coords).expect("digits in range")
    }

    /// Matrix mapping power coordinates to digits.
    pub fn from_power(&self) -> &Matrix {
        &self.from_power
    }

    pub fn to_power(&self) -> &Matrix {
        &self.to_power
    }
}
