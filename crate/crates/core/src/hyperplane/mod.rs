//! F_q-affine hyperplanes of F_{q^n} and arrangements of n of them.
//!
//! A hyperplane is {y : L(y) = c} where L is a row vector acting on the
//! digits of y in the arrangement's basis.

mod avoid;
mod witness;

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::matrix::{dot, solve_affine, Matrix};
use crate::gf::{Basis, Coeffs, FieldCtx, FieldElement};

pub use avoid::{AvoidedCursor, AvoidedSet};
pub use witness::{find_primitive_avoiding, HyperplaneCheck, Witness};

/// Fields up to this size get the enumeration cross-check of general position.
pub const DEFINITIONAL_CHECK_LIMIT: u64 = 729;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LinearFunctional(Vec<u32>);

impl LinearFunctional {
    pub fn new(coeffs: Vec<u32>) -> Result<Self> {
        if coeffs.iter().all(|&c| c == 0) {
            return Err(Error::InvalidParameters("zero functional".into()));
        }
        Ok(LinearFunctional(coeffs))
    }

    /// The i-th coordinate functional.
    pub fn coordinate(i: usize, n: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        LinearFunctional(v)
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.0
    }

    pub fn apply<F: Coeffs>(&self, f: &F, digits: &[u32]) -> u32 {
        dot(f, &self.0, digits)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AffineHyperplane {
    pub functional: LinearFunctional,
    pub constant: u32,
}

/// n affine hyperplanes over one basis.
#[derive(Clone, Debug)]
pub struct Arrangement {
    basis: Basis,
    hyperplanes: Vec<AffineHyperplane>,
}

/// offset + span(directions).
#[derive(Clone, Debug)]
pub struct AffineSubspace {
    pub offset: FieldElement,
    pub directions: Vec<FieldElement>,
}

impl AffineSubspace {
    pub fn dimension(&self) -> usize {
        self.directions.len()
    }

    /// All q^t points, offset first, in lexicographic order of the
    /// direction coefficients.
    pub fn points<'a>(&'a self, ctx: &'a FieldCtx) -> impl Iterator<Item = FieldElement> + 'a {
        let q = ctx.q();
        let t = self.directions.len() as u32;
        let total = q.checked_pow(t).expect("subspace too large to enumerate");
        (0..total).map(move |mut k| {
            let mut y = self.offset.clone();
            for d in self.directions.iter().rev() {
                let c = (k % q) as u32;
                k /= q;
                if c != 0 {
                    y = ctx.add(&y, &ctx.scale(c, d));
                }
            }
            y
        })
    }
}

impl Arrangement {
    pub fn new(basis: Basis, hyperplanes: Vec<AffineHyperplane>) -> Result<Self> {
        let n = basis.ctx().n();
        let q = basis.ctx().q();
        if hyperplanes.len() != n {
            return Err(Error::InvalidParameters(format!(
                "an arrangement has exactly {n} hyperplanes, got {}",
                hyperplanes.len()
            )));
        }
        for h in &hyperplanes {
            if h.functional.coeffs().len() != n {
                return Err(Error::InvalidParameters(format!(
                    "functional {:?} has the wrong length",
                    h.functional.coeffs()
                )));
            }
            if h.functional.coeffs().iter().any(|&c| c as u64 >= q) || h.constant as u64 >= q {
                return Err(Error::InvalidParameters(format!(
                    "hyperplane entries must be codes below {q}"
                )));
            }
        }
        Ok(Arrangement { basis, hyperplanes })
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        self.basis.ctx()
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn hyperplanes(&self) -> &[AffineHyperplane] {
        &self.hyperplanes
    }

    pub fn constants(&self) -> Vec<u32> {
        self.hyperplanes.iter().map(|h| h.constant).collect()
    }

    /// The n x n matrix whose rows are the functionals.
    pub fn functional_matrix(&self) -> Matrix {
        let rows: Vec<Vec<u32>> = self
            .hyperplanes
            .iter()
            .map(|h| h.functional.coeffs().to_vec())
            .collect();
        Matrix::from_rows(&rows)
    }

    /// Whether every hyperplane is a coordinate hyperplane a_i = c_i.
    pub fn is_digit_arrangement(&self) -> bool {
        let n = self.hyperplanes.len();
        self.hyperplanes
            .iter()
            .enumerate()
            .all(|(i, h)| h.functional == LinearFunctional::coordinate(i, n))
    }

    /// Values L_i(y).
    pub fn evaluate(&self, y: &FieldElement) -> Vec<u32> {
        let digits = self.basis.digits(y);
        let f = self.ctx().subfield();
        self.hyperplanes
            .iter()
            .map(|h| h.functional.apply(f, &digits))
            .collect()
    }

    /// Whether y avoids every hyperplane.
    pub fn avoids(&self, y: &FieldElement) -> bool {
        self.evaluate(y)
            .iter()
            .zip(&self.hyperplanes)
            .all(|(v, h)| *v != h.constant)
    }

    pub fn descriptor(&self) -> String {
        self.hyperplanes
            .iter()
            .map(|h| {
                let c: Vec<String> = h.functional.coeffs().iter().map(u32::to_string).collect();
                format!("[{}] = {}", c.join(","), h.constant)
            })
            .collect::<Vec<_>>()
            .join("; ")
    }

    /// Parses rows `[c_1,...,c_n] = c` separated by `;` or newlines.
    pub fn parse(basis: Basis, text: &str) -> Result<Self> {
        let mut hyperplanes = Vec::new();
        for row in text.split([';', '\n']).map(str::trim).filter(|r| !r.is_empty()) {
            let bad = || Error::InvalidParameters(format!("cannot parse hyperplane row {row:?}"));
            let (lhs, rhs) = row.split_once('=').ok_or_else(bad)?;
            let lhs = lhs.trim();
            let inner = lhs
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(bad)?;
            let coeffs = inner
                .split(',')
                .map(|x| x.trim().parse::<u32>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            let constant = rhs.trim().parse::<u32>().map_err(|_| bad())?;
            hyperplanes.push(AffineHyperplane {
                functional: LinearFunctional::new(coeffs)?,
                constant,
            });
        }
        Arrangement::new(basis, hyperplanes)
    }
}

impl fmt::Display for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

/// A_i = {y : digit i of y equals c_i}.
pub fn digit_arrangement(basis: Basis, constants: &[u32]) -> Result<Arrangement> {
    let n = basis.ctx().n();
    if constants.len() != n {
        return Err(Error::InvalidParameters(format!(
            "expected {n} constants, got {}",
            constants.len()
        )));
    }
    let hyperplanes = constants
        .iter()
        .enumerate()
        .map(|(i, &c)| AffineHyperplane {
            functional: LinearFunctional::coordinate(i, n),
            constant: c,
        })
        .collect();
    Arrangement::new(basis, hyperplanes)
}

/// Random invertible functionals and random constants.
pub fn random_general_position<R: Rng + ?Sized>(basis: Basis, rng: &mut R) -> Arrangement {
    let ctx = basis.ctx().clone();
    let n = ctx.n();
    let q = ctx.q() as u32;
    loop {
        let rows: Vec<Vec<u32>> = (0..n)
            .map(|_| (0..n).map(|_| rng.random_range(0..q)).collect())
            .collect();
        if Matrix::from_rows(&rows).rank(ctx.subfield()) < n {
            continue;
        }
        let hyperplanes = rows
            .into_iter()
            .map(|r| AffineHyperplane {
                functional: LinearFunctional(r),
                constant: rng.random_range(0..q),
            })
            .collect();
        return Arrangement::new(basis, hyperplanes).expect("valid by construction");
    }
}

/// True iff the functional matrix is invertible. Small fields are also
/// checked against the definition: |A_J| = q^(n - |J|) for every nonempty J.
pub fn is_general_position(arr: &Arrangement) -> bool {
    let ctx = arr.ctx();
    let n = ctx.n();
    let by_rank = arr.functional_matrix().rank(ctx.subfield()) == n;
    if ctx.order_u64().is_some_and(|o| o <= DEFINITIONAL_CHECK_LIMIT) {
        let by_definition = general_position_by_enumeration(arr);
        assert_eq!(
            by_rank, by_definition,
            "rank test and intersection counts disagree for {arr}"
        );
    }
    by_rank
}

/// Counts each intersection A_J by enumerating the whole field.
pub fn general_position_by_enumeration(arr: &Arrangement) -> bool {
    let ctx = arr.ctx();
    let n = ctx.n();
    let q = ctx.q();
    // hits[mask] counts y lying on exactly the hyperplanes in mask; the size
    // of A_J is then the sum over supersets of J.
    let mut hits = vec![0u64; 1 << n];
    for y in ctx.elements() {
        let vals = arr.evaluate(&y);
        let mask = vals
            .iter()
            .zip(arr.hyperplanes())
            .enumerate()
            .filter(|(_, (v, h))| **v == h.constant)
            .fold(0usize, |m, (i, _)| m | 1 << i);
        hits[mask] += 1;
    }
    // superset sums
    for i in 0..n {
        for mask in 0..(1usize << n) {
            if mask & (1 << i) == 0 {
                hits[mask] += hits[mask | 1 << i];
            }
        }
    }
    (1..(1usize << n)).all(|mask| hits[mask] == q.pow(n as u32 - mask.count_ones()))
}

/// Intersection of the hyperplanes indexed by `j` (0-based), or `None` when
/// empty.
pub fn intersection(arr: &Arrangement, j: &[usize]) -> Result<Option<AffineSubspace>> {
    let ctx = arr.ctx();
    let n = ctx.n();
    if j.is_empty() || j.iter().any(|&i| i >= n) {
        return Err(Error::InvalidParameters(format!("bad index set {j:?}")));
    }
    let mut idx = j.to_vec();
    idx.sort_unstable();
    idx.dedup();
    let rows: Vec<Vec<u32>> = idx
        .iter()
        .map(|&i| arr.hyperplanes[i].functional.coeffs().to_vec())
        .collect();
    let rhs: Vec<u32> = idx.iter().map(|&i| arr.hyperplanes[i].constant).collect();
    let Some((particular, kernel)) = solve_affine(ctx.subfield(), &Matrix::from_rows(&rows), &rhs)
    else {
        return Ok(None);
    };
    Ok(Some(AffineSubspace {
        offset: arr.basis.combine(&particular),
        directions: kernel.iter().map(|k| arr.basis.combine(k)).collect(),
    }))
}

/// L(y) = c.
pub fn membership(arr: &Arrangement, y: &FieldElement, i: usize) -> bool {
    let h = &arr.hyperplanes[i];
    h.functional.apply(arr.ctx().subfield(), &arr.basis.digits(y)) == h.constant
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{build_field, BuildOptions, FieldParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn power(p: u32, m: u32, n: u32) -> Basis {
        let ctx = build_field(FieldParams::new(p, m, n).unwrap(), &BuildOptions::default()).unwrap();
        Basis::power(Arc::new(ctx))
    }

    #[test]
    fn digit_hyperplanes_f9() {
        let b = power(3, 1, 2);
        let arr = digit_arrangement(b.clone(), &[1, 2]).unwrap();
        let ctx = arr.ctx().clone();
        for i in 0..2 {
            let count = ctx.elements().filter(|y| membership(&arr, y, i)).count();
            assert_eq!(count, 3);
        }
        assert!(is_general_position(&arr));
        assert!(arr.is_digit_arrangement());
    }

    #[test]
    fn repeated_functional_is_not_general_position() {
        let b = power(3, 1, 2);
        let h = |c| AffineHyperplane {
            functional: LinearFunctional::new(vec![1, 1]).unwrap(),
            constant: c,
        };
        let arr = Arrangement::new(b, vec![h(0), h(1)]).unwrap();
        assert!(!is_general_position(&arr));
        assert!(intersection(&arr, &[0, 1]).unwrap().is_none());
    }

    #[test]
    fn random_arrangements_pass_definitional_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b = power(3, 1, 3);
        for _ in 0..10 {
            let arr = random_general_position(b.clone(), &mut rng);
            assert!(general_position_by_enumeration(&arr));
        }
    }

    #[test]
    fn intersections_have_expected_dimension() {
        let b = power(3, 1, 3);
        let arr = digit_arrangement(b, &[0, 1, 2]).unwrap();
        let ctx = arr.ctx().clone();
        let line = intersection(&arr, &[0, 1]).unwrap().unwrap();
        assert_eq!(line.dimension(), 1);
        let pts: Vec<_> = line.points(&ctx).collect();
        let brute: Vec<_> = ctx
            .elements()
            .filter(|y| membership(&arr, y, 0) && membership(&arr, y, 1))
            .collect();
        assert_eq!(pts.len(), 3);
        for p in &pts {
            assert!(brute.contains(p));
        }
        let point = intersection(&arr, &[0, 1, 2]).unwrap().unwrap();
        assert_eq!(point.dimension(), 0);
        assert_eq!(point.offset.coords(), &[0, 1, 2]);
        assert_eq!(intersection(&arr, &[2]).unwrap().unwrap().dimension(), 2);
    }

    #[test]
    fn membership_matches_digits_f25() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ctx = Arc::new(build_field(FieldParams::new(5, 1, 2).unwrap(), &BuildOptions::default()).unwrap());
        let b = Basis::random(ctx.clone(), &mut rng);
        let arr = digit_arrangement(b.clone(), &[3, 0]).unwrap();
        for _ in 0..200 {
            let y = ctx.random_element(&mut rng);
            let d = b.digits(&y);
            assert_eq!(membership(&arr, &y, 0), d[0] == 3);
            assert_eq!(membership(&arr, &y, 1), d[1] == 0);
        }
        let off = intersection(&arr, &[1]).unwrap().unwrap().offset;
        assert!(membership(&arr, &off, 1));
    }

    #[test]
    fn descriptor_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = power(2, 2, 3);
        let arr = random_general_position(b.clone(), &mut rng);
        let text = arr.descriptor();
        let back = Arrangement::parse(b, &text).unwrap();
        assert_eq!(back.hyperplanes(), arr.hyperplanes());
        assert!(Arrangement::parse(arr.basis().clone(), "[1,0,0] = 0").is_err());
    }
}
