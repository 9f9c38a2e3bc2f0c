//! Hodge numbers of the central fiber and of the deformed structure.

use std::collections::HashMap;

use crate::cohomology::{CohomologyBasis, Kind};
use crate::error::{Error, Result};
use crate::form::{masks_of_bidegree, Form, Mask};
use crate::frame::{coframe_matrix_of, substitute, DeformedFrame, JetMatrix};
use crate::jet::{Jet, Point};
use crate::linalg::{generic_rank_symbolic, random_point, rng_from_seed, GenericRank, Matrix, SparseVec};
use crate::model::ComplexModel;
use crate::scalar::GaussianRational;
use crate::vform::VForm;

pub const DEFAULT_SEED: u64 = 0xDEF0_C0DE;
pub const MAX_DENOMINATOR: i64 = 97;
const MAX_ATTEMPTS: usize = 16;
const SYMBOLIC_TERM_LIMIT: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HodgeMode {
    Central,
    Sampled,
    Symbolic,
}

impl HodgeMode {
    pub const ALL: [HodgeMode; 3] = [HodgeMode::Central, HodgeMode::Sampled, HodgeMode::Symbolic];

    pub fn name(self) -> &'static str {
        match self {
            HodgeMode::Central => "central",
            HodgeMode::Sampled => "sampled",
            HodgeMode::Symbolic => "symbolic",
        }
    }
}

impl std::str::FromStr for HodgeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        HodgeMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Schema(format!("unknown hodge mode `{s}`")))
    }
}

/// A Hodge number of the deformed structure, or the reason it is unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deformed {
    Value(usize),
    Inconclusive,
}

impl Deformed {
    pub fn value(self) -> Option<usize> {
        match self {
            Deformed::Value(h) => Some(h),
            Deformed::Inconclusive => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HodgeEntry {
    pub p: usize,
    pub q: usize,
    pub central: usize,
    pub sampled: Option<Deformed>,
    pub symbolic: Option<Deformed>,
    /// Some deformed value differs from the central one.
    pub jump: bool,
}

#[derive(Debug, Clone)]
pub struct HodgeTable {
    pub entries: Vec<HodgeEntry>,
    /// Points used by the sampled mode, in order of use.
    pub samples: Vec<Point>,
}

impl HodgeTable {
    pub fn get(&self, p: usize, q: usize) -> Option<&HodgeEntry> {
        self.entries.iter().find(|e| e.p == p && e.q == q)
    }

    pub fn jumps(&self) -> Vec<(usize, usize)> {
        self.entries.iter().filter(|e| e.jump).map(|e| (e.p, e.q)).collect()
    }
}

/// All bidegrees `(p, q)` with `0 <= p, q <= dim`.
pub fn all_bidegrees(dim: usize) -> Vec<(usize, usize)> {
    (0..=dim).flat_map(|p| (0..=dim).map(move |q| (p, q))).collect()
}

fn dim_of(dim: usize, p: usize, q: usize) -> usize {
    masks_of_bidegree(dim, p, q).len()
}

/// Ranks of `(p,q) -> (p,q+1)` keyed by `(p, q)`; `column` yields the
/// image of a source mask as target coordinates.
fn ranks<F>(dim: usize, needed: &[(usize, usize)], mut rank: F) -> Result<HashMap<(usize, usize), Option<usize>>>
where
    F: FnMut(usize, usize) -> Result<Option<usize>>,
{
    let mut out = HashMap::new();
    for &(p, q) in needed {
        for key in [(p, q), (p, q.wrapping_sub(1))] {
            if key.1 > dim || out.contains_key(&key) {
                continue;
            }
            out.insert(key, rank(key.0, key.1)?);
        }
    }
    Ok(out)
}

fn hodge_from_ranks(dim: usize, p: usize, q: usize, r: &HashMap<(usize, usize), Option<usize>>) -> Deformed {
    let out = r.get(&(p, q)).copied().flatten();
    let inc = if q == 0 { Some(0) } else { r.get(&(p, q - 1)).copied().flatten() };
    match (out, inc) {
        (Some(a), Some(b)) => Deformed::Value(dim_of(dim, p, q) - a - b),
        _ => Deformed::Inconclusive,
    }
}

/// Rank of the deformed `delbar` from `(p,q)_t` at a numeric frame.
fn numeric_rank(frame: &DeformedFrame, p: usize, q: usize) -> usize {
    let dim = frame.dim();
    let target: HashMap<Mask, usize> = masks_of_bidegree(dim, p, q + 1).into_iter().enumerate().map(|(i, m)| (m, i)).collect();
    let cols: Vec<SparseVec> = masks_of_bidegree(dim, p, q)
        .into_iter()
        .map(|m| {
            let img = frame.delbar_t_any(&Form::basis(dim, frame.ring(), m));
            img.terms()
                .iter()
                .filter_map(|(m2, c)| target.get(m2).map(|&i| (i, c.constant_term())))
                .filter(|(_, c)| !c.is_zero())
                .collect()
        })
        .collect();
    Matrix::from_columns(target.len(), cols).rank()
}

/// Evaluates `phi` at a point, as a vector form with constant coefficients.
pub fn evaluate_beltrami(phi: &VForm, point: &Point) -> Result<VForm> {
    let ring0 = phi.ring().with_order(0);
    phi.try_map_ring(&ring0, |c| Ok(Jet::constant(&ring0, c.eval(point, false)?)))
}

fn sampled_ranks(
    model: &ComplexModel,
    phi: &VForm,
    needed: &[(usize, usize)],
    rng: &mut rand_chacha::ChaCha8Rng,
    samples: &mut Vec<Point>,
) -> Result<HashMap<(usize, usize), Option<usize>>> {
    for _ in 0..MAX_ATTEMPTS {
        let point = random_point(phi.ring(), rng, MAX_DENOMINATOR);
        let numeric = evaluate_beltrami(phi, &point)?;
        let frame = match DeformedFrame::build_unchecked(model, &numeric) {
            Ok(f) => f,
            Err(Error::SingularFrame) => continue,
            Err(e) => return Err(e),
        };
        if !frame.is_integrable() {
            return Err(Error::NonIntegrableFrame(format!("deformed structure is not integrable at {}", point.display())));
        }
        samples.push(point);
        return ranks(model.dim(), needed, |p, q| Ok(Some(numeric_rank(&frame, p, q))));
    }
    Err(Error::SingularFrame)
}

/// Determinant by expansion along rows with memoization on used columns.
fn determinant(m: &[Vec<Jet>], ring: &std::sync::Arc<crate::jet::JetRing>) -> Jet {
    fn go(m: &[Vec<Jet>], used: u32, memo: &mut HashMap<u32, Jet>, ring: &std::sync::Arc<crate::jet::JetRing>) -> Jet {
        let i = used.count_ones() as usize;
        if i == m.len() {
            return Jet::one(ring);
        }
        if let Some(x) = memo.get(&used) {
            return x.clone();
        }
        let mut acc = Jet::zero(ring);
        let mut sign_positive = true;
        for j in 0..m.len() {
            if used & (1 << j) != 0 {
                continue;
            }
            if !m[i][j].is_zero() {
                let t = m[i][j].mul_unchecked(&go(m, used | (1 << j), memo, ring));
                if sign_positive {
                    acc.add_assign_unchecked(&t);
                } else {
                    acc.sub_assign_unchecked(&t);
                }
            }
            sign_positive = !sign_positive;
        }
        memo.insert(used, acc.clone());
        acc
    }
    go(m, 0, &mut HashMap::new(), ring)
}

/// Adjugate of a square polynomial matrix.
fn adjugate(m: &JetMatrix) -> JetMatrix {
    let n = m.len();
    let ring = m[0][0].ring().clone();
    let minor = |r: usize, c: usize| -> Vec<Vec<Jet>> {
        (0..n)
            .filter(|&i| i != r)
            .map(|i| (0..n).filter(|&j| j != c).map(|j| m[i][j].clone()).collect())
            .collect()
    };
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let d = determinant(&minor(j, i), &ring);
                    if (i + j) % 2 == 0 {
                        d
                    } else {
                        d.neg()
                    }
                })
                .collect()
        })
        .collect()
}

/// Generic ranks over the field of rational functions in all parameters
/// and conjugates. The deformed coordinates of `d(eta^I)` are scaled by a
/// power of `det P`, which keeps them polynomial without changing ranks.
fn symbolic_ranks(
    model: &ComplexModel,
    phi: &VForm,
    needed: &[(usize, usize)],
) -> Result<HashMap<(usize, usize), Option<usize>>> {
    let dim = model.dim();
    let poly = phi.ring().polynomial();
    let phi = phi.try_map_ring(&poly, |c| c.to_ring(&poly))?;
    let p = coframe_matrix_of(dim, &phi);
    let adj = adjugate(&p);
    ranks(dim, needed, |pp, q| {
        let target = masks_of_bidegree(dim, pp, q + 1);
        let source = masks_of_bidegree(dim, pp, q);
        let mut rows: Vec<Vec<Jet>> = vec![vec![Jet::zero(&poly); source.len()]; target.len()];
        for (j, m) in source.iter().enumerate() {
            let d = model.d(&substitute(&p, &Form::basis(dim, &poly, *m)))?;
            let img = substitute(&adj, &d);
            for (i, t) in target.iter().enumerate() {
                rows[i][j] = img.coeff(*t);
            }
        }
        Ok(match generic_rank_symbolic(&rows, SYMBOLIC_TERM_LIMIT) {
            GenericRank::Rank(r) => Some(r),
            GenericRank::Inconclusive => None,
        })
    })
}

/// Central and deformed Hodge numbers with a jump report.
///
/// Sampled values use two conjugation-consistent random points drawn from
/// `seed`; they are reported only when both agree. A deformed value above the
/// central one violates upper semicontinuity and is an internal error.
pub fn hodge_numbers(
    model: &ComplexModel,
    phi: &VForm,
    bidegrees: &[(usize, usize)],
    modes: &[HodgeMode],
    seed: u64,
) -> Result<HodgeTable> {
    let dim = model.dim();
    model.check_beltrami(phi)?;
    for &(p, q) in bidegrees {
        if p > dim || q > dim {
            return Err(Error::SelectorOutOfRange(p.max(q)));
        }
    }
    let deformed = modes.iter().any(|m| *m != HodgeMode::Central);
    if deformed && !phi.is_zero() {
        let frame = DeformedFrame::build(model, phi)?;
        if let Some(k) = frame.integrability_defect().iter().position(|f| !f.is_zero()) {
            return Err(Error::NonIntegrableFrame(format!("(0,2) part of d eta^{} is nonzero", k + 1)));
        }
    }
    let mut samples = Vec::new();
    let sampled = if modes.contains(&HodgeMode::Sampled) {
        let mut rng = rng_from_seed(seed);
        let a = sampled_ranks(model, phi, bidegrees, &mut rng, &mut samples)?;
        let b = sampled_ranks(model, phi, bidegrees, &mut rng, &mut samples)?;
        Some((a, b))
    } else {
        None
    };
    let symbolic = if modes.contains(&HodgeMode::Symbolic) { Some(symbolic_ranks(model, phi, bidegrees)?) } else { None };
    let mut entries = Vec::new();
    for &(p, q) in bidegrees {
        let central = CohomologyBasis::new(model, Kind::Form { p, q })?.h();
        let sampled = sampled.as_ref().map(|(a, b)| {
            let (x, y) = (hodge_from_ranks(dim, p, q, a), hodge_from_ranks(dim, p, q, b));
            if x == y {
                x
            } else {
                Deformed::Inconclusive
            }
        });
        let symbolic = symbolic.as_ref().map(|r| hodge_from_ranks(dim, p, q, r));
        for (mode, v) in [("sampled", sampled), ("symbolic", symbolic)] {
            if let Some(Deformed::Value(h)) = v {
                if h > central {
                    return Err(Error::Internal(format!(
                        "semicontinuity violated: {mode} h^{{{p},{q}}} = {h} exceeds central value {central}"
                    )));
                }
            }
        }
        let jump = [sampled, symbolic].iter().flatten().any(|v| matches!(v, Deformed::Value(h) if *h != central));
        entries.push(HodgeEntry { p, q, central, sampled, symbolic, jump });
    }
    Ok(HodgeTable { entries, samples })
}

/// Rank of a dense scalar matrix; an oracle independent of the bigraded
/// bookkeeping used elsewhere.
pub fn dense_rank(rows: &[Vec<GaussianRational>]) -> usize {
    Matrix::from_rows(rows).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iwasawa() -> ComplexModel {
        ComplexModel::from_json(
            r#"{"name":"iwasawa","dim":3,"params":["t11","t12","t21","t22","t31","t32"],"order":3,
                "structure":{"3":[{"coeff":"-1","holo":[1,2],"anti":[]}]}}"#,
        )
        .unwrap()
    }

    fn phi(m: &ComplexModel, var: &str, k: usize) -> VForm {
        let r = m.ring();
        VForm::from_indices(3, &r, &[1], k).unwrap().mul_jet(&Jet::var_named(&r, var).unwrap()).unwrap()
    }

    #[test]
    fn central_iwasawa() {
        let m = iwasawa();
        let t = hodge_numbers(&m, &VForm::zero(3, &m.ring()), &[(1, 0), (0, 1), (0, 2)], &[HodgeMode::Central], 1).unwrap();
        let hs: Vec<usize> = t.entries.iter().map(|e| e.central).collect();
        assert_eq!(hs, vec![3, 2, 2]);
    }

    #[test]
    fn t11_jumps_t31_does_not() {
        let m = iwasawa();
        let t = hodge_numbers(&m, &phi(&m, "t11", 1), &[(1, 0)], &HodgeMode::ALL, DEFAULT_SEED).unwrap();
        let e = t.get(1, 0).unwrap();
        assert_eq!((e.sampled, e.symbolic, e.jump), (Some(Deformed::Value(2)), Some(Deformed::Value(2)), true));
        let t = hodge_numbers(&m, &phi(&m, "t31", 3), &[(1, 0)], &HodgeMode::ALL, DEFAULT_SEED).unwrap();
        let e = t.get(1, 0).unwrap();
        assert_eq!((e.sampled, e.symbolic, e.jump), (Some(Deformed::Value(3)), Some(Deformed::Value(3)), false));
        assert_eq!(t.samples.len(), 2);
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = iwasawa();
        let p = phi(&m, "t11", 1);
        let a = hodge_numbers(&m, &p, &all_bidegrees(3), &[HodgeMode::Sampled], 7).unwrap();
        let b = hodge_numbers(&m, &p, &all_bidegrees(3), &[HodgeMode::Sampled], 7).unwrap();
        assert_eq!(a.entries, b.entries);
        assert_eq!(a.samples, b.samples);
    }

    #[test]
    fn determinant_and_adjugate() {
        let r = crate::jet::JetRing::new(["a", "b"], 3).unwrap().polynomial();
        let a = Jet::var_named(&r, "a").unwrap();
        let b = Jet::var_named(&r, "b").unwrap();
        let one = Jet::one(&r);
        let m = vec![vec![one.clone(), a.clone()], vec![b.clone(), one.clone()]];
        let det = determinant(&m, &r);
        assert_eq!(det, one.try_add(&a.try_mul(&b).unwrap().neg()).unwrap());
        let adj = adjugate(&m);
        assert_eq!(adj, vec![vec![one.clone(), a.neg()], vec![b.neg(), one]]);
    }
}
