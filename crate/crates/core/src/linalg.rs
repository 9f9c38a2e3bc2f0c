//! Exact sparse linear algebra over the Gaussian rationals.
//!
//! Matrices are stored by column because every matrix in the engine is the
//! image of a basis under a linear operator. Elimination is done once per
//! matrix ([`Echelon`]) and reused for kernels, images and membership tests.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::jet::{Jet, JetRing, Point};
use crate::scalar::GaussianRational;

pub type SparseVec = BTreeMap<usize, GaussianRational>;

/// Adds `c * src` into `dst`, removing cancelled entries.
pub fn axpy(dst: &mut SparseVec, c: &GaussianRational, src: &SparseVec) {
    if c.is_zero() {
        return;
    }
    for (k, v) in src {
        let prod = c * v;
        match dst.entry(*k) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(prod);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &prod;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }
}

pub fn scale_vec(v: &SparseVec, c: &GaussianRational) -> SparseVec {
    if c.is_zero() {
        return SparseVec::new();
    }
    v.iter().map(|(k, x)| (*k, x * c)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    nrows: usize,
    ncols: usize,
    cols: Vec<SparseVec>,
}

impl Matrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Matrix { nrows, ncols, cols: vec![SparseVec::new(); ncols] }
    }

    pub fn from_columns(nrows: usize, cols: Vec<SparseVec>) -> Self {
        let cols: Vec<SparseVec> = cols
            .into_iter()
            .map(|c| {
                debug_assert!(c.keys().all(|&r| r < nrows));
                c.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        Matrix { nrows, ncols: cols.len(), cols }
    }

    pub fn from_rows(rows: &[Vec<GaussianRational>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    m.cols[j].insert(i, v.clone());
                }
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.cols[j]
    }

    pub fn get(&self, i: usize, j: usize) -> GaussianRational {
        self.cols[j].get(&i).cloned().unwrap_or_default()
    }

    pub fn mul_vec(&self, x: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, c) in x {
            axpy(&mut out, c, &self.cols[*j]);
        }
        out
    }

    /// Appends the columns of `other` (same row count).
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.nrows, other.nrows);
        let mut cols = self.cols.clone();
        cols.extend(other.cols.iter().cloned());
        Matrix { nrows: self.nrows, ncols: cols.len(), cols }
    }

    fn rows(&self) -> Vec<SparseVec> {
        let mut rows = vec![SparseVec::new(); self.nrows];
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                rows[*i].insert(j, v.clone());
            }
        }
        rows
    }

    pub fn echelon(&self) -> Echelon {
        Echelon::new(self)
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }
}

/// Reduced row echelon form of a matrix together with the row operations
/// that produced it.
///
/// Columns are scanned left to right; the pivot of a column is the first
/// not-yet-used row (in original row order after earlier swaps) with a
/// nonzero entry there. The reduced form is unique, so kernel and image
/// bases do not depend on this choice; the cokernel basis does, and is
/// reproducible because the rule is fixed.
#[derive(Debug, Clone)]
pub struct Echelon {
    ncols: usize,
    nrows: usize,
    /// Reduced rows; the first `rank` have pivots.
    reduced: Vec<SparseVec>,
    /// Row transform `T` with `T * M = reduced`, one sparse row per row.
    transform: Vec<SparseVec>,
    pivots: Vec<usize>,
}

impl Echelon {
    fn new(m: &Matrix) -> Self {
        let mut rows = m.rows();
        let mut transform: Vec<SparseVec> =
            (0..m.nrows).map(|i| SparseVec::from([(i, GaussianRational::one())])).collect();
        let mut pivots = Vec::new();
        let mut next = 0usize;
        for col in 0..m.ncols {
            if next == rows.len() {
                break;
            }
            let Some(p) = (next..rows.len()).find(|&r| rows[r].contains_key(&col)) else {
                continue;
            };
            rows.swap(next, p);
            transform.swap(next, p);
            let inv = rows[next][&col].inv().expect("pivot is nonzero");
            rows[next] = scale_vec(&rows[next], &inv);
            transform[next] = scale_vec(&transform[next], &inv);
            let (prow, ptr) = (rows[next].clone(), transform[next].clone());
            for r in 0..rows.len() {
                if r == next {
                    continue;
                }
                if let Some(f) = rows[r].get(&col).cloned() {
                    let f = -f;
                    axpy(&mut rows[r], &f, &prow);
                    axpy(&mut transform[r], &f, &ptr);
                }
            }
            pivots.push(col);
            next += 1;
        }
        Echelon { ncols: m.ncols, nrows: m.nrows, reduced: rows, transform, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut it = self.pivots.iter().peekable();
        (0..self.ncols)
            .filter(|c| {
                if it.peek() == Some(&c) {
                    it.next();
                    false
                } else {
                    true
                }
            })
            .collect()
    }

    /// One kernel vector per free column, in ascending column order.
    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = SparseVec::from([(f, GaussianRational::one())]);
                for (i, &p) in self.pivots.iter().enumerate() {
                    if let Some(c) = self.reduced[i].get(&f) {
                        v.insert(p, -c);
                    }
                }
                v
            })
            .collect()
    }

    /// Left-null vectors spanning the cokernel, one per zero row of the
    /// reduced form.
    pub fn cokernel_basis(&self) -> &[SparseVec] {
        &self.transform[self.rank()..]
    }

    /// Solves `M x = v`, returning the pivot-canonical solution (free
    /// variables zero) or the residue of `v` against the cokernel basis.
    pub fn solve(&self, v: &SparseVec) -> Membership {
        let mut tv = Vec::with_capacity(self.nrows);
        for row in &self.transform {
            let mut acc = GaussianRational::zero();
            for (k, c) in row {
                if let Some(x) = v.get(k) {
                    acc += &(c * x);
                }
            }
            tv.push(acc);
        }
        let residue: Vec<GaussianRational> = tv[self.rank()..].to_vec();
        if residue.iter().any(|c| !c.is_zero()) {
            return Membership::Residue(residue);
        }
        let x = self
            .pivots
            .iter()
            .zip(tv)
            .filter(|(_, c)| !c.is_zero())
            .map(|(&p, c)| (p, c))
            .collect();
        Membership::Solution(x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Solution(SparseVec),
    /// Coordinates of the residue on the cokernel basis; not all zero.
    Residue(Vec<GaussianRational>),
}

impl Membership {
    pub fn solution(self) -> Option<SparseVec> {
        match self {
            Membership::Solution(x) => Some(x),
            Membership::Residue(_) => None,
        }
    }

    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Solution(_))
    }
}

/// Kernel basis, image basis (pivot columns of `m`) and rank.
pub fn kernel_image_basis(m: &Matrix) -> (Vec<SparseVec>, Vec<SparseVec>, usize) {
    let e = m.echelon();
    let image = e.pivots().iter().map(|&p| m.column(p).clone()).collect();
    (e.kernel_basis(), image, e.rank())
}

pub fn membership_solve(m: &Matrix, v: &SparseVec) -> Membership {
    m.echelon().solve(v)
}

/// Outcome of a generic-rank computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenericRank {
    Rank(usize),
    /// Two samples disagreed, or symbolic elimination exceeded its budget.
    Inconclusive,
}

/// Generic rank of a jet matrix treating every variable (parameters and
/// conjugates alike) as an independent indeterminate. Fraction-free
/// elimination in the polynomial ring; gives up when an entry grows beyond
/// `max_terms` terms.
pub fn generic_rank_symbolic(rows: &[Vec<Jet>], max_terms: usize) -> GenericRank {
    let Some(first) = rows.iter().flatten().next() else {
        return GenericRank::Rank(0);
    };
    let ring = first.ring().polynomial();
    let mut a: Vec<Vec<Jet>> = match rows
        .iter()
        .map(|r| r.iter().map(|x| x.to_ring(&ring)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(a) => a,
        Err(_) => return GenericRank::Inconclusive,
    };
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut prev = Jet::one(&ring);
    let mut rank = 0;
    for k in 0..nrows.min(ncols) {
        // pivot: first nonzero entry scanning columns, then rows
        let found = (k..ncols).find_map(|j| (k..nrows).find(|&i| !a[i][j].is_zero()).map(|i| (i, j)));
        let Some((pi, pj)) = found else { break };
        a.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        rank += 1;
        for i in k + 1..nrows {
            for j in k + 1..ncols {
                let mut num = a[k][k].mul_unchecked(&a[i][j]);
                num.sub_assign_unchecked(&a[i][k].mul_unchecked(&a[k][j]));
                let Ok(q) = num.exact_div(&prev) else {
                    return GenericRank::Inconclusive;
                };
                if q.len() > max_terms {
                    return GenericRank::Inconclusive;
                }
                a[i][j] = q;
            }
            a[i][k] = Jet::zero(&ring);
        }
        prev = a[k][k].clone();
    }
    GenericRank::Rank(rank)
}

/// Draws a conjugation-consistent rational point: each parameter gets
/// `a/b + (c/d) i` with `|a|,|c| <= 9` and `1 <= b,d <= max_den`.
pub fn random_point(ring: &JetRing, rng: &mut ChaCha8Rng, max_den: i64) -> Point {
    let values: Vec<GaussianRational> = (0..ring.num_params())
        .map(|_| {
            let re = (rng.gen_range(-9..=9), rng.gen_range(1..=max_den));
            let im = (rng.gen_range(-9..=9), rng.gen_range(1..=max_den));
            GaussianRational::from_parts(re, im)
        })
        .collect();
    Point::from_params(ring, &values)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exact rank of the jet matrix evaluated at a point.
pub fn rank_at(rows: &[Vec<Jet>], values: &[GaussianRational]) -> usize {
    let dense: Vec<Vec<GaussianRational>> =
        rows.iter().map(|r| r.iter().map(|x| x.eval_resolved(values)).collect()).collect();
    Matrix::from_rows(&dense).rank()
}

/// Two-sample generic rank at conjugation-consistent random points.
pub fn generic_rank_sampled(rows: &[Vec<Jet>], seed: u64, max_den: i64) -> GenericRank {
    let Some(first) = rows.iter().flatten().next() else {
        return GenericRank::Rank(0);
    };
    let ring = first.ring().clone();
    let mut rng = rng_from_seed(seed);
    let mut ranks = [0usize; 2];
    for r in ranks.iter_mut() {
        let values = random_point(&ring, &mut rng, max_den)
            .resolve(&ring, false)
            .expect("generated point is consistent");
        *r = rank_at(rows, &values);
    }
    if ranks[0] == ranks[1] {
        GenericRank::Rank(ranks[0])
    } else {
        GenericRank::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn mat(rows: &[&[&str]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.iter().map(|s| g(s)).collect()).collect::<Vec<_>>())
    }

    fn vecs(entries: &[&str]) -> SparseVec {
        entries.iter().enumerate().filter(|(_, s)| **s != "0").map(|(k, s)| (k, g(s))).collect()
    }

    #[test]
    fn kernel_image_examples() {
        let (k, im, r) = kernel_image_basis(&mat(&[&["1", "1"], &["0", "0"]]));
        assert_eq!(r, 1);
        assert_eq!(k, vec![vecs(&["-1", "1"])]);
        assert_eq!(im, vec![vecs(&["1", "0"])]);

        let (k, _, r) = kernel_image_basis(&mat(&[&["1", "0", "0"], &["0", "1", "0"], &["0", "0", "1"]]));
        assert_eq!((k.len(), r), (0, 3));

        let (k, im, r) = kernel_image_basis(&Matrix::zeros(2, 3));
        assert_eq!((k.len(), im.len(), r), (3, 0, 0));
    }

    #[test]
    fn membership_examples() {
        let m = mat(&[&["1"], &["0"]]);
        assert_eq!(membership_solve(&m, &vecs(&["2", "0"])), Membership::Solution(vecs(&["2"])));
        assert_eq!(membership_solve(&m, &vecs(&["0", "1"])), Membership::Residue(vec![g("1")]));
        let z = Matrix::zeros(2, 2);
        assert_eq!(membership_solve(&z, &SparseVec::new()), Membership::Solution(SparseVec::new()));
    }

    #[test]
    fn symbolic_rank_examples() {
        let r = JetRing::new(["t1"], 2).unwrap();
        let t = Jet::var(&r, 0);
        let tb = Jet::var(&r, 1);
        let (zero, one) = (Jet::zero(&r), Jet::one(&r));
        let a = vec![vec![t.clone(), zero.clone()], vec![zero.clone(), zero.clone()]];
        assert_eq!(generic_rank_symbolic(&a, 1000), GenericRank::Rank(1));
        let b = vec![vec![one.clone(), t.clone()], vec![tb.clone(), one.clone()]];
        assert_eq!(generic_rank_symbolic(&b, 1000), GenericRank::Rank(2));
        assert_eq!(generic_rank_sampled(&b, 0xDEF0C0DE, 97), GenericRank::Rank(2));
        let z = vec![vec![zero.clone(); 3]; 2];
        assert_eq!(generic_rank_symbolic(&z, 1000), GenericRank::Rank(0));
        assert_eq!(generic_rank_sampled(&z, 1, 97), GenericRank::Rank(0));
    }

    #[test]
    fn symbolic_rank_detects_polynomial_dependence() {
        let r = JetRing::new(["t1", "t2"], 4).unwrap();
        let (t1, t2) = (Jet::var(&r, 0), Jet::var(&r, 1));
        let row = vec![t1.clone(), t2.clone()];
        let row2 = vec![t1.mul_unchecked(&t2), t2.mul_unchecked(&t2)];
        assert_eq!(generic_rank_symbolic(&[row, row2], 1000), GenericRank::Rank(1));
    }

    fn arb_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..5, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec((-2i64..3, -1i64..2), c), r).prop_map(|rows| {
                Matrix::from_rows(
                    &rows
                        .into_iter()
                        .map(|row| row.into_iter().map(|(a, b)| GaussianRational::from_parts((a, 1), (b, 1))).collect())
                        .collect::<Vec<_>>(),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in arb_matrix()) {
            let (kernel, image, rank) = kernel_image_basis(&m);
            prop_assert_eq!(rank + kernel.len(), m.ncols());
            for k in &kernel {
                prop_assert!(m.mul_vec(k).is_empty());
            }
            prop_assert_eq!(Matrix::from_columns(m.nrows(), image).rank(), rank);
        }

        #[test]
        fn membership_is_certified(m in arb_matrix(), seed in 0u64..1000) {
            let mut rng = rng_from_seed(seed);
            let v: SparseVec = (0..m.nrows())
                .map(|i| (i, GaussianRational::from_integer(rng.gen_range(-2..3))))
                .filter(|(_, c)| !c.is_zero())
                .collect();
            let augmented = m.hstack(&Matrix::from_columns(m.nrows(), vec![v.clone()]));
            match membership_solve(&m, &v) {
                Membership::Solution(x) => prop_assert_eq!(m.mul_vec(&x), v),
                Membership::Residue(_) => prop_assert_eq!(augmented.rank(), m.rank() + 1),
            }
        }

        #[test]
        fn generic_rank_dominates_rank_at_zero(entries in proptest::collection::vec((0usize..3, -2i64..3), 9)) {
            let r = JetRing::new(["t1"], 3).unwrap();
            let basis = [Jet::one(&r), Jet::var(&r, 0), Jet::var(&r, 1)];
            let rows: Vec<Vec<Jet>> = entries
                .chunks(3)
                .map(|ch| ch.iter().map(|(b, c)| basis[*b].scale(&GaussianRational::from_integer(*c))).collect())
                .collect();
            let zero = vec![GaussianRational::zero(); 2];
            let GenericRank::Rank(gr) = generic_rank_symbolic(&rows, 1000) else { panic!() };
            prop_assert!(gr >= rank_at(&rows, &zero));
        }
    }
}
