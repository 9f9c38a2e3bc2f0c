//! Invariant models of compact complex manifolds.
//!
//! A model is given by the structure equations `d omega^k` of a left-invariant
//! coframe; `d bar omega^k` is the conjugate equation. The exterior derivative
//! of every basis monomial is precomputed once, and the frame brackets are
//! recovered from the structure equations by `d eta(Y, Z) = -eta([Y, Z])`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::{bidegree, mask_from_indices, mask_indices, wedge_masks, Form, Mask};
use crate::jet::JetRing;
use crate::linalg::{axpy, SparseVec};
use crate::scalar::GaussianRational;

/// Largest supported complex dimension (masks are `u32`, basis is `4^m`).
pub const MAX_DIM: usize = 6;

/// One term `coeff * omega^holo ^ bar omega^anti` of a structure equation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureTerm {
    pub coeff: GaussianRational,
    pub holo: Vec<usize>,
    pub anti: Vec<usize>,
}

/// The model file format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub name: String,
    pub dim: usize,
    pub params: Vec<String>,
    pub order: u32,
    #[serde(default)]
    pub structure: BTreeMap<String, Vec<StructureTerm>>,
}

type Expansion = Vec<(Mask, GaussianRational)>;

#[derive(Debug, Clone)]
pub struct ComplexModel {
    name: String,
    dim: usize,
    params: Vec<String>,
    order: u32,
    document: ModelDocument,
    /// `d` of each of the `2m` generators.
    gen_d: Vec<Expansion>,
    /// `d` of every basis monomial, indexed by mask.
    basis_d: Vec<Expansion>,
    /// `[E_a, E_b]` over all `2m` frame vectors, keyed by `a < b`.
    brackets: BTreeMap<(usize, usize), SparseVec>,
}

impl ComplexModel {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        Self::load(doc)
    }

    /// Validates a model document: schema, integrability, `d^2 = 0` and the
    /// Jacobi identity of the recovered brackets.
    pub fn load(doc: ModelDocument) -> Result<Self> {
        let dim = doc.dim;
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Schema(format!("dim must be in 1..={MAX_DIM}, got {dim}")));
        }
        JetRing::new(doc.params.iter().cloned(), doc.order)?;
        let mut holo_d = vec![BTreeMap::<Mask, GaussianRational>::new(); dim];
        for (key, terms) in &doc.structure {
            let k: usize = key
                .parse()
                .ok()
                .filter(|k| (1..=dim).contains(k))
                .ok_or_else(|| Error::Schema(format!("structure key {key:?} is not in 1..={dim}")))?;
            for t in terms {
                if t.holo.len() + t.anti.len() != 2 {
                    return Err(Error::Schema(format!("d(omega^{k}) must be a 2-form")));
                }
                let Some((mask, positive)) = mask_from_indices(dim, &t.holo, &t.anti)? else {
                    return Err(Error::Schema(format!("repeated index in d(omega^{k})")));
                };
                let c = t.coeff.clone().signed(positive);
                let e = holo_d[k - 1].entry(mask).or_default();
                *e += &c;
            }
        }
        let mut gen_d: Vec<Expansion> = Vec::with_capacity(2 * dim);
        for e in &holo_d {
            gen_d.push(e.iter().filter(|(_, c)| !c.is_zero()).map(|(m, c)| (*m, c.clone())).collect());
        }
        for k in 0..dim {
            let mut f = Form::zero(dim, &JetRing::new(["t"], 0)?);
            for (m, c) in &gen_d[k] {
                f.add_term(*m, &crate::jet::Jet::constant(f.ring(), c.clone()));
            }
            let conj = f.conj();
            gen_d.push(conj.terms().iter().map(|(m, c)| (*m, c.constant_term())).collect());
        }
        for (k, e) in gen_d.iter().take(dim).enumerate() {
            if e.iter().any(|(m, _)| bidegree(dim, *m) == (0, 2)) {
                return Err(Error::NotIntegrable(k + 1));
            }
        }
        let basis_d = (0..(1u32 << (2 * dim))).map(|m| expand_d(&gen_d, m)).collect::<Vec<_>>();
        for (g, e) in gen_d.iter().enumerate() {
            let mut dd = BTreeMap::<Mask, GaussianRational>::new();
            for (m, c) in e {
                for (m2, c2) in &basis_d[*m as usize] {
                    *dd.entry(*m2).or_default() += &(c * c2);
                }
            }
            dd.retain(|_, c| !c.is_zero());
            if !dd.is_empty() {
                let detail = dd
                    .iter()
                    .map(|(m, c)| format!("{c}*{}", crate::form::mask_display(dim, *m)))
                    .collect::<Vec<_>>()
                    .join(" + ");
                return Err(Error::DSquaredNonzero { generator: generator_name(dim, g), detail });
            }
        }
        let mut brackets = BTreeMap::new();
        for (g, e) in gen_d.iter().enumerate() {
            for (m, c) in e {
                let a = m.trailing_zeros() as usize;
                let b = 31 - m.leading_zeros() as usize;
                let entry: &mut SparseVec = brackets.entry((a, b)).or_default();
                axpy(entry, &-c, &SparseVec::from([(g, GaussianRational::one())]));
            }
        }
        brackets.retain(|_, v: &mut SparseVec| !v.is_empty());
        let model = ComplexModel {
            name: doc.name.clone(),
            dim,
            params: doc.params.clone(),
            order: doc.order,
            document: doc,
            gen_d,
            basis_d,
            brackets,
        };
        model.check_jacobi()?;
        Ok(model)
    }

    fn check_jacobi(&self) -> Result<()> {
        let n = 2 * self.dim;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let mut sum = SparseVec::new();
                    for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                        let inner = self.bracket(x, y);
                        for (g, coef) in &inner {
                            axpy(&mut sum, coef, &self.bracket(*g, z));
                        }
                    }
                    if !sum.is_empty() {
                        return Err(Error::JacobiFailure(format!(
                            "({}, {}, {})",
                            vector_name(self.dim, a),
                            vector_name(self.dim, b),
                            vector_name(self.dim, c)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn document(&self) -> &ModelDocument {
        &self.document
    }

    /// The jet ring declared by the model document.
    pub fn ring(&self) -> Arc<JetRing> {
        JetRing::new(self.params.iter().cloned(), self.order).expect("validated at load")
    }

    pub fn ring_with_order(&self, order: u32) -> Arc<JetRing> {
        JetRing::new(self.params.iter().cloned(), order).expect("validated at load")
    }

    /// Number of basis monomials, `4^m`.
    pub fn basis_size(&self) -> usize {
        1 << (2 * self.dim)
    }

    /// `d` of the generator with bit index `g` (`g < m` holomorphic).
    pub fn generator_d(&self, g: usize) -> &[(Mask, GaussianRational)] {
        &self.gen_d[g]
    }

    pub fn basis_d(&self, mask: Mask) -> &[(Mask, GaussianRational)] {
        &self.basis_d[mask as usize]
    }

    /// `[E_a, E_b]` over the complex frame `E_g`: `g < m` is `X_{g+1}`,
    /// `g >= m` is `bar X_{g-m+1}`.
    pub fn bracket(&self, a: usize, b: usize) -> SparseVec {
        use std::cmp::Ordering::*;
        match a.cmp(&b) {
            Equal => SparseVec::new(),
            Less => self.brackets.get(&(a, b)).cloned().unwrap_or_default(),
            Greater => self.brackets.get(&(b, a)).map(|v| v.iter().map(|(g, c)| (*g, -c)).collect()).unwrap_or_default(),
        }
    }

    /// `pr^{1,0}[E_a, E_b]` as `(k, coeff)` pairs with `k` 0-based.
    pub fn bracket_10(&self, a: usize, b: usize) -> Vec<(usize, GaussianRational)> {
        self.bracket(a, b).into_iter().filter(|(g, _)| *g < self.dim).collect()
    }

    /// True if every `pr^{1,0}[bar X_a, X_k]` vanishes, i.e. delbar kills
    /// the invariant holomorphic frame.
    pub fn is_parallelizable(&self) -> bool {
        (0..self.dim).all(|a| (0..self.dim).all(|k| self.bracket_10(self.dim + a, k).is_empty()))
    }

    pub fn check_form(&self, f: &Form) -> Result<()> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, f.dim()));
        }
        Ok(())
    }

    /// Exterior derivative; parameters are constants.
    pub fn d(&self, f: &Form) -> Result<Form> {
        self.check_form(f)?;
        Ok(self.d_filtered(f, |_, _| true))
    }

    fn d_filtered(&self, f: &Form, keep: impl Fn((usize, usize), (usize, usize)) -> bool) -> Form {
        let mut out = Form::zero(self.dim, f.ring());
        for (m, c) in f.terms() {
            let from = bidegree(self.dim, *m);
            for (m2, s) in self.basis_d(*m) {
                if keep(from, bidegree(self.dim, *m2)) {
                    out.add_scaled_term(*m2, c, s);
                }
            }
        }
        out
    }

    /// `del` applied to each bidegree component.
    pub fn del_any(&self, f: &Form) -> Form {
        self.d_filtered(f, |(p, q), to| to == (p + 1, q))
    }

    /// `delbar` applied to each bidegree component.
    pub fn delbar_any(&self, f: &Form) -> Form {
        self.d_filtered(f, |(p, q), to| to == (p, q + 1))
    }

    /// `del` of a form of a single bidegree.
    pub fn del(&self, f: &Form) -> Result<Form> {
        self.check_form(f)?;
        require_homogeneous(f)?;
        Ok(self.del_any(f))
    }

    /// `delbar` of a form of a single bidegree.
    pub fn delbar(&self, f: &Form) -> Result<Form> {
        self.check_form(f)?;
        require_homogeneous(f)?;
        Ok(self.delbar_any(f))
    }
}

fn require_homogeneous(f: &Form) -> Result<()> {
    if !f.is_zero() && f.bidegree().is_none() {
        return Err(Error::NotHomogeneous);
    }
    Ok(())
}

/// `d` of a basis monomial from the generator differentials, by the odd
/// Leibniz rule.
fn expand_d(gen_d: &[Expansion], mask: Mask) -> Expansion {
    let mut acc = BTreeMap::<Mask, GaussianRational>::new();
    let mut prefix: Mask = 0;
    let mut rest = mask;
    let mut position = 0u32;
    while rest != 0 {
        let g = rest.trailing_zeros();
        rest &= rest - 1;
        let suffix = rest;
        for (dm, c) in &gen_d[g as usize] {
            let Some((left, s1)) = wedge_masks(prefix, *dm) else { continue };
            let Some((full, s2)) = wedge_masks(left, suffix) else { continue };
            let positive = s1 == s2;
            let positive = if position % 2 == 0 { positive } else { !positive };
            *acc.entry(full).or_default() += &c.clone().signed(positive);
        }
        prefix |= 1 << g;
        position += 1;
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

fn generator_name(dim: usize, g: usize) -> String {
    let (h, a) = mask_indices(dim, 1 << g);
    match (h.first(), a.first()) {
        (Some(i), _) => format!("omega^{i}"),
        (_, Some(j)) => format!("bar omega^{j}"),
        _ => unreachable!(),
    }
}

fn vector_name(dim: usize, g: usize) -> String {
    if g < dim {
        format!("X{}", g + 1)
    } else {
        format!("bar X{}", g - dim + 1)
    }
}
