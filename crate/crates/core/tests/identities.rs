mod common;

use defcohom::form::{bidegree, Mask};
use defcohom::vform::vform_basis;
use defcohom::{ComplexModel, Form, GaussianRational, VForm};

fn basis_forms(m: &ComplexModel) -> Vec<(Mask, Form)> {
    let ring = m.ring();
    (0..m.basis_size() as Mask).map(|mask| (mask, Form::basis(m.dim(), &ring, mask))).collect()
}

fn sign(odd: bool) -> GaussianRational {
    if odd {
        -GaussianRational::one()
    } else {
        GaussianRational::one()
    }
}

#[test]
fn d_squared_and_del_identities_on_every_basis_form() {
    for m in common::corpus() {
        for (_, f) in basis_forms(&m) {
            assert!(m.d(&m.d(&f).unwrap()).unwrap().is_zero(), "{} d^2 on {f:?}", m.name());
            let del = m.del(&f).unwrap();
            let delbar = m.delbar(&f).unwrap();
            assert!(m.del_any(&del).is_zero());
            assert!(m.delbar_any(&delbar).is_zero());
            assert!(m.del_any(&delbar).add(&m.delbar_any(&del)).unwrap().is_zero());
            assert_eq!(del.add(&delbar).unwrap(), m.d(&f).unwrap(), "d = del + delbar on {f:?}");
            assert_eq!(m.del_any(&f).conj(), m.delbar_any(&f.conj()));
        }
    }
}

#[test]
fn leibniz_and_contraction_on_basis_pairs() {
    for m in common::corpus() {
        let forms = basis_forms(&m);
        for (ma, a) in &forms {
            for (_, b) in &forms {
                let s = sign(ma.count_ones() % 2 == 1);
                let lhs = m.d(&a.wedge(b).unwrap()).unwrap();
                let rhs = m.d(a).unwrap().wedge(b).unwrap().add(&a.wedge(&m.d(b).unwrap()).unwrap().scale(&s)).unwrap();
                assert_eq!(lhs, rhs);
                for k in 1..=m.dim() {
                    let lhs = a.wedge(b).unwrap().contract(k);
                    let rhs = a.contract(k).wedge(b).unwrap().add(&a.wedge(&b.contract(k)).unwrap().scale(&s)).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

#[test]
fn torus_differentials_vanish() {
    let m = common::torus3();
    for (_, f) in basis_forms(&m) {
        assert!(m.d(&f).unwrap().is_zero());
    }
    for q in 0..=3 {
        for (mask, k) in vform_basis(3, q) {
            assert!(m.vf_delbar(&VForm::basis(3, &m.ring(), mask, k)).unwrap().is_zero());
        }
    }
}

fn all_vforms(m: &ComplexModel) -> Vec<(usize, VForm)> {
    let ring = m.ring();
    (0..=m.dim())
        .flat_map(|q| vform_basis(m.dim(), q).into_iter().map(move |(mask, k)| (q, mask, k)))
        .map(|(q, mask, k)| (q, VForm::basis(m.dim(), &ring, mask, k)))
        .collect()
}

#[test]
fn dgla_identities_on_basis() {
    for m in common::corpus() {
        let vs = all_vforms(&m);
        for (q, a) in &vs {
            assert!(m.vf_delbar(&m.vf_delbar(a).unwrap()).unwrap().is_zero(), "delbar^2 on {a:?}");
            for (r, b) in &vs {
                let ab = m.vf_bracket(a, b).unwrap();
                let ba = m.vf_bracket(b, a).unwrap();
                assert_eq!(ab, ba.scale(&sign(q * r % 2 == 0)), "antisymmetry {a:?} {b:?}");
                let lhs = m.vf_delbar(&ab).unwrap();
                let rhs = m
                    .vf_bracket(&m.vf_delbar(a).unwrap(), b)
                    .unwrap()
                    .add(&m.vf_bracket(a, &m.vf_delbar(b).unwrap()).unwrap().scale(&sign(q % 2 == 1)))
                    .unwrap();
                assert_eq!(lhs, rhs, "delbar derivation {a:?} {b:?}");
                for (s, c) in &vs {
                    if q + r + s > m.dim() {
                        continue;
                    }
                    let t1 = m.vf_bracket(a, &m.vf_bracket(b, c).unwrap()).unwrap().scale(&sign(q * s % 2 == 1));
                    let t2 = m.vf_bracket(b, &m.vf_bracket(c, a).unwrap()).unwrap().scale(&sign(r * q % 2 == 1));
                    let t3 = m.vf_bracket(c, &m.vf_bracket(a, b).unwrap()).unwrap().scale(&sign(s * r % 2 == 1));
                    assert!(t1.add(&t2).unwrap().add(&t3).unwrap().is_zero(), "jacobi {a:?} {b:?} {c:?}");
                }
            }
        }
    }
}

#[test]
fn bidegree_shift_of_differentials() {
    for m in common::corpus() {
        for (mask, f) in basis_forms(&m) {
            let (p, q) = bidegree(m.dim(), mask);
            for (m2, _) in m.d(&f).unwrap().terms() {
                let b = bidegree(m.dim(), *m2);
                assert!(b == (p + 1, q) || b == (p, q + 1));
            }
        }
    }
}
