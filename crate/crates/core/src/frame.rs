//! The deformed complex structure as an explicit coframe.
//!
//! For a Beltrami differential `phi = sum phi^k_j bar omega^j (x) X_k` the
//! deformed coframe is `eta^k = omega^k + phi ⌞ omega^k` together with its
//! conjugate. In matrix form `eta = P e` over the `2m` generators `e`, with
//! inverse `e = Q eta`. A form whose masks are read as `eta`-monomials is
//! said to be in deformed coordinates; [`DeformedFrame::to_omega`] and
//! [`DeformedFrame::to_deformed`] convert between the two readings.
//!
//! The dual frame is `F_h = sum_l Q[l][h] E_l`, so `F_k = X_k(t)` spans the
//! deformed `(1,0)` directions.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::form::{bidegree, wedge_masks, Form, Mask};
use crate::jet::{Jet, JetRing};
use crate::model::ComplexModel;
use crate::vform::VForm;

pub type JetMatrix = Vec<Vec<Jet>>;

/// Inverts a square jet matrix by Gauss-Jordan elimination with unit
/// pivots (first row, in order, whose entry has nonzero constant term).
pub fn invert(m: &JetMatrix) -> Result<JetMatrix> {
    let n = m.len();
    let Some(ring) = m.first().and_then(|r| r.first()).map(|x| x.ring().clone()) else {
        return Ok(Vec::new());
    };
    let mut a = m.clone();
    let mut inv: JetMatrix =
        (0..n).map(|i| (0..n).map(|j| if i == j { Jet::one(&ring) } else { Jet::zero(&ring) }).collect()).collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].constant_term().is_zero()).ok_or(Error::SingularFrame)?;
        a.swap(col, p);
        inv.swap(col, p);
        let piv = a[col][col].inverse()?;
        for j in 0..n {
            a[col][j] = a[col][j].mul_unchecked(&piv);
            inv[col][j] = inv[col][j].mul_unchecked(&piv);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let x = a[col][j].mul_unchecked(&f);
                a[r][j].sub_assign_unchecked(&x);
                let y = inv[col][j].mul_unchecked(&f);
                inv[r][j].sub_assign_unchecked(&y);
            }
        }
    }
    Ok(inv)
}

pub fn mat_mul(a: &JetMatrix, b: &JetMatrix) -> JetMatrix {
    let n = a.len();
    let k = b.len();
    let cols = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    let mut acc = Jet::zero(a[i][0].ring());
                    for l in 0..k {
                        if !a[i][l].is_zero() && !b[l][j].is_zero() {
                            acc.add_assign_unchecked(&a[i][l].mul_unchecked(&b[l][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Rows express `eta^k` and `bar eta^k` against `(omega, bar omega)`; the
/// entries are the coefficients of `phi` and their conjugates.
pub(crate) fn coframe_matrix_of(dim: usize, phi: &VForm) -> JetMatrix {
    let ring = phi.ring();
    let n = 2 * dim;
    let mut p: JetMatrix =
        (0..n).map(|i| (0..n).map(|j| if i == j { Jet::one(ring) } else { Jet::zero(ring) }).collect()).collect();
    for ((mask, k), c) in phi.terms() {
        let j = mask.trailing_zeros() as usize - dim;
        p[*k][dim + j] = c.clone();
        p[dim + *k][j] = c.conj();
    }
    p
}

/// The algebra morphism `e^g -> sum_h r[g][h] e^h`, applied to a form.
pub fn substitute(r: &JetMatrix, f: &Form) -> Form {
    let dim = f.dim();
    let mut out = Form::zero(dim, f.ring());
    for (mask, c) in f.terms() {
        let mut acc = Form::monomial(dim, 0, c.clone());
        let mut rest = *mask;
        while rest != 0 {
            let g = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let mut next = Form::zero(dim, f.ring());
            for (am, ac) in acc.terms() {
                for (h, rj) in r[g].iter().enumerate() {
                    if rj.is_zero() {
                        continue;
                    }
                    if let Some((nm, positive)) = wedge_masks(*am, 1 << h) {
                        let x = ac.mul_unchecked(rj);
                        next.add_term(nm, &if positive { x } else { x.neg() });
                    }
                }
            }
            acc = next;
        }
        for (m, c) in acc.terms() {
            out.add_term(*m, c);
        }
    }
    out
}

/// Normalizations of the map `rho` compared in the conjugation identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RhoConvention {
    /// `omega^k -> eta^k`, `bar omega^k -> bar eta^k`.
    GeneratorSubstitution,
    /// `omega^k -> (omega^k)^{1,0}_t`, `bar omega^k -> (bar omega^k)^{0,1}_t`:
    /// each generator is sent to its deformed-type projection.
    DualFrameNormalized,
}

impl RhoConvention {
    pub const ALL: [RhoConvention; 2] = [RhoConvention::GeneratorSubstitution, RhoConvention::DualFrameNormalized];

    pub fn name(self) -> &'static str {
        match self {
            RhoConvention::GeneratorSubstitution => "generator-substitution",
            RhoConvention::DualFrameNormalized => "dual-frame-normalized",
        }
    }
}

pub struct DeformedFrame<'a> {
    model: &'a ComplexModel,
    phi: VForm,
    p: JetMatrix,
    q: JetMatrix,
    d_table: OnceLock<Vec<Form>>,
    frame_brackets: OnceLock<Vec<Vec<Vec<(usize, Jet)>>>>,
}

impl<'a> DeformedFrame<'a> {
    pub fn build(model: &'a ComplexModel, phi: &VForm) -> Result<Self> {
        model.check_beltrami(phi)?;
        Self::build_unchecked(model, phi)
    }

    /// Builds a frame without requiring `phi(0) = 0`; used for numeric
    /// samples where the coefficients are already evaluated.
    pub fn build_unchecked(model: &'a ComplexModel, phi: &VForm) -> Result<Self> {
        if phi.dim() != model.dim() {
            return Err(Error::DimensionMismatch(model.dim(), phi.dim()));
        }
        for (m, _) in phi.terms().keys() {
            if m.count_ones() != 1 {
                return Err(Error::DegreeMismatch { expected: 1, found: m.count_ones() as usize });
            }
        }
        let p = coframe_matrix_of(model.dim(), phi);
        let q = invert(&p)?;
        Ok(DeformedFrame { model, phi: phi.clone(), p, q, d_table: OnceLock::new(), frame_brackets: OnceLock::new() })
    }

    pub fn model(&self) -> &ComplexModel {
        self.model
    }

    pub fn phi(&self) -> &VForm {
        &self.phi
    }

    pub fn ring(&self) -> &Arc<JetRing> {
        self.phi.ring()
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// Coframe matrix `P` (`eta = P e`).
    pub fn coframe_matrix(&self) -> &JetMatrix {
        &self.p
    }

    /// Inverse coframe matrix `Q` (`e = Q eta`); column `h` gives the
    /// deformed frame vector `F_h` in the original frame.
    pub fn dual_matrix(&self) -> &JetMatrix {
        &self.q
    }

    /// The deformed coframe element `eta^g` in original coordinates.
    pub fn coframe(&self, g: usize) -> Form {
        substitute(&self.p, &Form::basis(self.dim(), self.ring(), 1 << g))
    }

    /// Reads deformed coordinates as a form in the original basis.
    pub fn to_omega(&self, f: &Form) -> Form {
        substitute(&self.p, f)
    }

    /// Rewrites a form in the deformed basis.
    pub fn to_deformed(&self, f: &Form) -> Form {
        substitute(&self.q, f)
    }

    /// Generator substitution `rho`, in original coordinates.
    pub fn rho_apply(&self, f: &Form) -> Form {
        self.to_omega(f)
    }

    pub fn rho_inverse(&self, f: &Form) -> Form {
        self.to_deformed(f)
    }

    /// `rho` on vector forms, as a vector form over the deformed frame:
    /// coordinates of `rho(beta) (x) X_k(t)` against `bar eta^J (x) X_k(t)`.
    pub fn rho_apply_vform(&self, v: &VForm) -> VForm {
        v.clone()
    }

    fn table(&self) -> &[Form] {
        self.d_table.get_or_init(|| {
            (0..self.model.basis_size() as Mask)
                .map(|m| {
                    let f = Form::basis(self.dim(), self.ring(), m);
                    let d = self.model.d(&self.to_omega(&f)).expect("dimension checked");
                    self.to_deformed(&d)
                })
                .collect()
        })
    }

    /// Exterior derivative in deformed coordinates.
    pub fn d_deformed(&self, f: &Form) -> Form {
        let table = self.table();
        let mut out = Form::zero(self.dim(), self.ring());
        for (m, c) in f.terms() {
            for (m2, c2) in table[*m as usize].terms() {
                out.add_term(*m2, &c.mul_unchecked(c2));
            }
        }
        out
    }

    fn d_shifted(&self, f: &Form, shift: (usize, usize)) -> Form {
        let table = self.table();
        let dim = self.dim();
        let mut out = Form::zero(dim, self.ring());
        for (m, c) in f.terms() {
            let (p, q) = bidegree(dim, *m);
            for (m2, c2) in table[*m as usize].terms() {
                if bidegree(dim, *m2) == (p + shift.0, q + shift.1) {
                    out.add_term(*m2, &c.mul_unchecked(c2));
                }
            }
        }
        out
    }

    /// Deformed `del` on each deformed-bidegree component.
    pub fn del_t_any(&self, f: &Form) -> Form {
        self.d_shifted(f, (1, 0))
    }

    /// Deformed `delbar` on each deformed-bidegree component.
    pub fn delbar_t_any(&self, f: &Form) -> Form {
        self.d_shifted(f, (0, 1))
    }

    /// The `(0,2)_t`-component of `d eta^k` for each `k`, in deformed
    /// coordinates. All zero iff the deformed structure is integrable.
    pub fn integrability_defect(&self) -> Vec<Form> {
        (0..self.dim())
            .map(|k| {
                let d = self.to_deformed(&self.model.d(&self.coframe(k)).expect("dimension checked"));
                d.project(0, 2)
            })
            .collect()
    }

    pub fn is_integrable(&self) -> bool {
        self.integrability_defect().iter().all(Form::is_zero)
    }

    fn require_integrable(&self) -> Result<()> {
        let defect = self.integrability_defect();
        match defect.iter().position(|f| !f.is_zero()) {
            None => Ok(()),
            Some(k) => Err(Error::NonIntegrableFrame(format!("(0,2) part of d eta^{}: {}", k + 1, defect[k].display()))),
        }
    }

    /// `(del_t a, delbar_t a)` for `a` in deformed coordinates of a single
    /// deformed bidegree.
    pub fn deformed_ops(&self, a: &Form) -> Result<(Form, Form)> {
        self.model.check_form(a)?;
        if !a.is_zero() && a.bidegree().is_none() {
            return Err(Error::NotHomogeneous);
        }
        self.require_integrable()?;
        Ok((self.del_t_any(a), self.delbar_t_any(a)))
    }

    /// `pr^{1,0}_t [F_{m+a}, F_k]` in the deformed frame, indexed `[a][k]`.
    fn brackets(&self) -> &[Vec<Vec<(usize, Jet)>>] {
        self.frame_brackets.get_or_init(|| {
            let dim = self.dim();
            let n = 2 * dim;
            let ring = self.ring();
            (0..dim)
                .map(|a| {
                    (0..dim)
                        .map(|k| {
                            let mut v: Vec<Jet> = vec![Jet::zero(ring); n];
                            for c in 0..n {
                                let qa = &self.q[c][dim + a];
                                if qa.is_zero() {
                                    continue;
                                }
                                for d in 0..n {
                                    let qk = &self.q[d][k];
                                    if qk.is_zero() {
                                        continue;
                                    }
                                    let w = qa.mul_unchecked(qk);
                                    for (e, s) in self.model.bracket(c, d) {
                                        v[e].add_assign_unchecked(&w.scale(&s));
                                    }
                                }
                            }
                            (0..dim)
                                .filter_map(|f| {
                                    let mut acc = Jet::zero(ring);
                                    for (e, ve) in v.iter().enumerate() {
                                        if !ve.is_zero() {
                                            acc.add_assign_unchecked(&self.p[f][e].mul_unchecked(ve));
                                        }
                                    }
                                    (!acc.is_zero()).then_some((f, acc))
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
    }

    /// Deformed `delbar` on a vector form given in deformed coordinates
    /// (`bar eta^J (x) X_k(t)`).
    pub fn vf_delbar_t(&self, v: &VForm) -> VForm {
        let dim = self.dim();
        let brackets = self.brackets();
        let mut out = VForm::zero(dim, self.ring());
        for ((mask, k), c) in v.terms() {
            let q = mask.count_ones() as usize;
            for (m2, c2) in self.table()[*mask as usize].terms() {
                if bidegree(dim, *m2) == (0, q + 1) {
                    out.add_term(*m2, *k, &c.mul_unchecked(c2));
                }
            }
            for (a, row) in brackets.iter().enumerate() {
                let Some((m2, positive)) = wedge_masks(*mask, 1 << (dim + a)) else { continue };
                let positive = positive == (q % 2 == 0);
                for (f, w) in &row[*k] {
                    let x = c.mul_unchecked(w);
                    out.add_term(m2, *f, &if positive { x } else { x.neg() });
                }
            }
        }
        out
    }

    /// Change of deformed coordinates realizing `rho` for a convention,
    /// and its inverse.
    fn normalization(&self, c: RhoConvention) -> Result<(JetMatrix, JetMatrix)> {
        let n = 2 * self.dim();
        let ring = self.ring();
        let id: JetMatrix =
            (0..n).map(|i| (0..n).map(|j| if i == j { Jet::one(ring) } else { Jet::zero(ring) }).collect()).collect();
        match c {
            RhoConvention::GeneratorSubstitution => Ok((id.clone(), id)),
            RhoConvention::DualFrameNormalized => {
                let dim = self.dim();
                let mut nm = id;
                for i in 0..n {
                    for j in 0..n {
                        let same_block = (i < dim) == (j < dim);
                        nm[i][j] = if same_block { self.q[i][j].clone() } else { Jet::zero(ring) };
                    }
                }
                let inv = invert(&nm)?;
                Ok((nm, inv))
            }
        }
    }

    /// `rho^{-1} delbar_t rho` on a form in original coordinates.
    pub fn conjugated_delbar_form(&self, x: &Form, c: RhoConvention) -> Result<Form> {
        let (nm, inv) = self.normalization(c)?;
        Ok(substitute(&inv, &self.delbar_t_any(&substitute(&nm, x))))
    }

    /// `rho^{-1} del_t rho` on a form in original coordinates.
    pub fn conjugated_del_form(&self, x: &Form, c: RhoConvention) -> Result<Form> {
        let (nm, inv) = self.normalization(c)?;
        Ok(substitute(&inv, &self.del_t_any(&substitute(&nm, x))))
    }

    /// `rho^{-1} delbar_t rho` on a vector form in original coordinates.
    pub fn conjugated_delbar_vform(&self, v: &VForm, c: RhoConvention) -> Result<VForm> {
        let (nm, inv) = self.normalization(c)?;
        let apply = |m: &JetMatrix, v: &VForm| -> VForm {
            let mut out = VForm::zero(self.dim(), self.ring());
            for ((mask, k), coeff) in v.terms() {
                let f = substitute(m, &Form::monomial(self.dim(), *mask, coeff.clone()));
                for (m2, c2) in f.terms() {
                    out.add_term(*m2, *k, c2);
                }
            }
            out
        };
        Ok(apply(&inv, &self.vf_delbar_t(&apply(&nm, v))))
    }
}
