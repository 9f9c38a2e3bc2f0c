//! Exhaustive identity checks over the basis of a model, reported as
//! counts rather than panics.

use crate::cohomology::Cochain;
use crate::error::Result;
use crate::form::{Form, Mask};
use crate::jet::Direction;
use crate::model::ComplexModel;
use crate::scalar::GaussianRational;
use crate::vform::{vform_basis, VForm};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check { name, cases: 0, failures: 0, first_failure: None }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.failures == 0
    }
}

fn sign(odd: bool) -> GaussianRational {
    if odd {
        -GaussianRational::one()
    } else {
        GaussianRational::one()
    }
}

fn basis_forms(m: &ComplexModel) -> Vec<Form> {
    let ring = m.ring();
    (0..m.basis_size() as Mask).map(|mask| Form::basis(m.dim(), &ring, mask)).collect()
}

fn basis_vforms(m: &ComplexModel) -> Vec<(usize, VForm)> {
    let ring = m.ring();
    (0..=m.dim())
        .flat_map(|q| vform_basis(m.dim(), q).into_iter().map(move |(mask, k)| (q, mask, k)))
        .map(|(q, mask, k)| (q, VForm::basis(m.dim(), &ring, mask, k)))
        .collect()
}

/// `d^2 = 0`, `del^2 = delbar^2 = 0`, anticommutation, `d = del + delbar`,
/// conjugation intertwining, Leibniz and the contraction derivation rule.
pub fn algebra_checks(m: &ComplexModel) -> Result<Vec<Check>> {
    let forms = basis_forms(m);
    let mut d2 = Check::new("d-squared");
    let mut del2 = Check::new("del-squared");
    let mut delbar2 = Check::new("delbar-squared");
    let mut anti = Check::new("del-delbar-anticommute");
    let mut split = Check::new("d-splits");
    let mut conj = Check::new("conjugation-intertwines");
    let mut leibniz = Check::new("leibniz");
    let mut contraction = Check::new("contraction-derivation");
    for f in &forms {
        let df = m.d(f)?;
        let del = m.del_any(f);
        let delbar = m.delbar_any(f);
        d2.record(m.d(&df)?.is_zero(), || f.display());
        del2.record(m.del_any(&del).is_zero(), || f.display());
        delbar2.record(m.delbar_any(&delbar).is_zero(), || f.display());
        anti.record(m.del_any(&delbar).add(&m.delbar_any(&del))?.is_zero(), || f.display());
        split.record(del.add(&delbar)? == df, || f.display());
        conj.record(del.conj() == m.delbar_any(&f.conj()), || f.display());
    }
    for a in &forms {
        let s = sign(a.degree().unwrap_or(0) % 2 == 1);
        let da = m.d(a)?;
        for b in &forms {
            let ab = a.wedge(b)?;
            let rhs = da.wedge(b)?.add(&a.wedge(&m.d(b)?)?.scale(&s))?;
            leibniz.record(m.d(&ab)? == rhs, || format!("{} , {}", a.display(), b.display()));
            for k in 1..=m.dim() {
                let rhs = a.contract(k).wedge(b)?.add(&a.wedge(&b.contract(k))?.scale(&s))?;
                contraction.record(ab.contract(k) == rhs, || format!("X{k} on {} , {}", a.display(), b.display()));
            }
        }
    }
    Ok(vec![d2, del2, delbar2, anti, split, conj, leibniz, contraction])
}

/// Graded antisymmetry, graded Jacobi, the `delbar`-derivation rule and
/// `delbar^2 = 0` on basis vector forms.
pub fn dgla_checks(m: &ComplexModel) -> Result<Vec<Check>> {
    let vs = basis_vforms(m);
    let mut antisym = Check::new("bracket-antisymmetry");
    let mut jacobi = Check::new("bracket-jacobi");
    let mut derivation = Check::new("delbar-derivation");
    let mut square = Check::new("vf-delbar-squared");
    for (q, a) in &vs {
        let da = m.vf_delbar(a)?;
        square.record(m.vf_delbar(&da)?.is_zero(), || a.display());
        for (r, b) in &vs {
            let ab = m.vf_bracket(a, b)?;
            let ba = m.vf_bracket(b, a)?;
            antisym.record(ab == ba.scale(&sign(q * r % 2 == 0)), || format!("{} , {}", a.display(), b.display()));
            let rhs = m.vf_bracket(&da, b)?.add(&m.vf_bracket(a, &m.vf_delbar(b)?)?.scale(&sign(q % 2 == 1)))?;
            derivation.record(m.vf_delbar(&ab)? == rhs, || format!("{} , {}", a.display(), b.display()));
            for (s, c) in &vs {
                if q + r + s > m.dim() {
                    continue;
                }
                let t1 = m.vf_bracket(a, &m.vf_bracket(b, c)?)?.scale(&sign(q * s % 2 == 1));
                let t2 = m.vf_bracket(b, &m.vf_bracket(c, a)?)?.scale(&sign(r * q % 2 == 1));
                let t3 = m.vf_bracket(c, &ab)?.scale(&sign(s * r % 2 == 1));
                jacobi.record(t1.add(&t2)?.add(&t3)?.is_zero(), || {
                    format!("{} , {} , {}", a.display(), b.display(), c.display())
                });
            }
        }
    }
    Ok(vec![antisym, jacobi, derivation, square])
}

/// Checks that hold for a Maurer-Cartan series: `d_u phi` twisted-closed
/// for every coordinate direction (parameters and conjugates), and the
/// twisted differentials squaring to zero on every basis element. Returns
/// only the Maurer-Cartan check when it fails.
pub fn deformation_checks(m: &ComplexModel, phi: &VForm) -> Result<Vec<Check>> {
    let mut mc = Check::new("maurer-cartan");
    let defect = m.mc_defect(phi)?;
    mc.record(defect.is_zero(), || defect.display());
    if !mc.ok() {
        return Ok(vec![mc]);
    }
    let ring = phi.ring();
    let mut closed = Check::new("derivative-twisted-closed");
    for v in 0..ring.num_vars() {
        let u = Direction::coordinate(ring, v)?;
        let r = m.twisted_delbar_vform(phi, &phi.derive(&u)?)?;
        closed.record(r.is_zero(), || format!("d/d{}: {}", ring.var_name(v), r.display()));
    }
    let mut flat_forms = Check::new("twisted-flatness-forms");
    for mask in 0..m.basis_size() as Mask {
        let f = Form::basis(m.dim(), ring, mask);
        let x = Cochain::Form(f.clone());
        let y = m.twisted_delbar(phi, &m.twisted_delbar(phi, &x)?)?;
        flat_forms.record(y.is_zero(), || f.display());
    }
    let mut flat_vforms = Check::new("twisted-flatness-vforms");
    for q in 0..=m.dim() {
        for (mask, k) in vform_basis(m.dim(), q) {
            let v = VForm::basis(m.dim(), ring, mask, k);
            let y = m.twisted_delbar_vform(phi, &m.twisted_delbar_vform(phi, &v)?)?;
            flat_vforms.record(y.is_zero(), || v.display());
        }
    }
    Ok(vec![mc, closed, flat_forms, flat_vforms])
}
