mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::oracle::Oracle;
use common::random::random_series;
use defcohom::cohomology::{CohomologyBasis, Kind};
use defcohom::deform::{kodaira_spencer, mc_solve, verify_conjugation_identity};
use defcohom::frame::{DeformedFrame, RhoConvention};
use defcohom::hodge::{all_bidegrees, hodge_numbers, Deformed, HodgeMode, DEFAULT_SEED};
use defcohom::identities::deformation_checks;
use defcohom::json::{DeformationDocument, FirstOrderDocument};
use defcohom::{ComplexModel, Direction, GaussianRational, Jet, VForm};

fn fixture(name: &str) -> &'static str {
    match name {
        "iwasawa-t11" => include_str!("../../cli/corpus/deformations/iwasawa-t11.json"),
        "iwasawa-t31" => include_str!("../../cli/corpus/deformations/iwasawa-t31.json"),
        "nakamura" => include_str!("../../cli/corpus/deformations/nakamura.json"),
        "nakamura-phi1" => include_str!("../../cli/corpus/deformations/nakamura-phi1.json"),
        "kodaira-thurston-t21" => include_str!("../../cli/corpus/deformations/kodaira-thurston-t21.json"),
        "torus3-mixed" => include_str!("../../cli/corpus/deformations/torus3-mixed.json"),
        _ => panic!("no fixture {name}"),
    }
}

fn series(model: &ComplexModel, name: &str) -> VForm {
    DeformationDocument::from_json(fixture(name)).unwrap().beltrami(model, None).unwrap()
}

fn mc_fixtures() -> Vec<(ComplexModel, VForm)> {
    let iw = common::iwasawa();
    let mut out: Vec<(ComplexModel, VForm)> =
        ["iwasawa-t11", "iwasawa-t31", "nakamura"].iter().map(|n| (iw.clone(), series(&iw, n))).collect();
    let kt = common::kodaira_thurston();
    out.push((kt.clone(), series(&kt, "kodaira-thurston-t21")));
    let t = common::torus3();
    out.push((t.clone(), series(&t, "torus3-mixed")));
    out
}

#[test]
fn dense_oracle_reproduces_dolbeault_numbers() {
    for m in common::corpus() {
        let oracle = Oracle::new(m.document());
        assert!(oracle.d_squared_vanishes(), "{}", m.name());
        let table = hodge_numbers(&m, &VForm::zero(m.dim(), &m.ring()), &all_bidegrees(m.dim()), &[HodgeMode::Central], 0)
            .unwrap();
        for (p, q) in all_bidegrees(m.dim()) {
            let h = CohomologyBasis::new(&m, Kind::Form { p, q }).unwrap().h();
            assert_eq!(oracle.h(p, q), h, "{} h^{{{p},{q}}}", m.name());
            assert_eq!(table.get(p, q).unwrap().central, h);
        }
    }
    let o = Oracle::new(common::iwasawa().document());
    assert_eq!((o.h(1, 0), o.h(0, 1), o.h(0, 2)), (3, 2, 2));
}

#[test]
fn maurer_cartan_iff_integrable() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let (mut yes, mut no) = (0, 0);
    for m in common::corpus() {
        for k in 0..25 {
            let phi = random_series(&m, &mut rng, k);
            let mc = m.mc_defect(&phi).unwrap().is_zero();
            let frame = DeformedFrame::build(&m, &phi).unwrap();
            assert_eq!(mc, frame.is_integrable(), "{}: {}", m.name(), phi.display());
            if mc {
                yes += 1
            } else {
                no += 1
            }
        }
    }
    assert!(yes >= 38 && no > 0, "{yes} integrable, {no} not");
}

#[test]
fn derivative_closed_and_twisted_flat_on_fixtures() {
    for (m, phi) in mc_fixtures() {
        let checks = deformation_checks(&m, &phi).unwrap();
        assert_eq!(checks.len(), 4);
        for c in checks {
            assert!(c.ok() && c.cases > 0, "{}: {c:?}", m.name());
        }
    }
}

#[test]
fn conjugation_report() {
    let iw = common::iwasawa();
    let phi = series(&iw, "iwasawa-t11");
    let r = verify_conjugation_identity(&iw, &phi, 1, RhoConvention::GeneratorSubstitution).unwrap();
    assert_eq!(r.forms_agreement, 1);
    assert!(r.mismatches.is_empty());
    let t = common::torus3();
    let phi = series(&t, "torus3-mixed");
    for c in RhoConvention::ALL {
        let r = verify_conjugation_identity(&t, &phi, 3, c).unwrap();
        assert_eq!(r.agreement(), 3, "{c:?}");
    }
    let bad = VForm::from_indices(3, &iw.ring(), &[3], 1)
        .unwrap()
        .mul_jet(&Jet::var_named(&iw.ring(), "t11").unwrap())
        .unwrap();
    assert!(verify_conjugation_identity(&iw, &bad, 1, RhoConvention::GeneratorSubstitution).is_err());
}

#[test]
fn nakamura_solution_and_kodaira_spencer() {
    let iw = common::iwasawa();
    let phi1 = FirstOrderDocument::from_json(fixture("nakamura-phi1")).unwrap().phi1(&iw, None).unwrap();
    let (s, report) = mc_solve(&iw, &phi1, 4).unwrap();
    assert!(report.complete());
    assert_eq!(report.last_nonzero_order, 2);
    assert!(iw.mc_defect(&s.phi).unwrap().is_zero());
    let ring = s.phi.ring();
    let t = |n: &str| Jet::var_named(ring, n).unwrap();
    let minor = t("t11").try_mul(&t("t22")).unwrap().try_add(&t("t12").try_mul(&t("t21")).unwrap().neg()).unwrap();
    let x33 = VForm::from_indices(3, ring, &[3], 3).unwrap();
    assert_eq!(s.phi.jet_homogeneous(2), x33.mul_jet(&minor.neg()).unwrap());

    let u = Direction::named(ring, "t11").unwrap();
    let k2 = kodaira_spencer(&iw, &s.phi, &u, 2).unwrap();
    let expected = VForm::from_indices(3, ring, &[1], 1).unwrap().sub(&x33.mul_jet(&t("t22")).unwrap()).unwrap();
    let r1 = k2.representative.ring().clone();
    assert_eq!(r1.order(), 1);
    assert_eq!(k2.representative, expected.try_map_ring(&r1, |c| c.to_ring(&r1)).unwrap());
    let k1 = kodaira_spencer(&iw, &s.phi, &u, 1).unwrap();
    let r0 = k1.representative.ring().clone();
    assert_eq!(k1.representative, k2.representative.try_map_ring(&r0, |c| c.to_ring(&r0)).unwrap());

    let v = Direction::named(ring, "t21").unwrap();
    let w = u.combine(&GaussianRational::from_integer(2), &v, &GaussianRational::i()).unwrap();
    let kw = kodaira_spencer(&iw, &s.phi, &w, 3).unwrap();
    let ku = kodaira_spencer(&iw, &s.phi, &u, 3).unwrap();
    let kv = kodaira_spencer(&iw, &s.phi, &v, 3).unwrap();
    let lin = ku.representative.scale(&GaussianRational::from_integer(2)).add(&kv.representative.scale(&GaussianRational::i())).unwrap();
    assert_eq!(kw.representative, lin);
}

#[test]
fn torus_hodge_numbers_are_binomial() {
    let t = common::torus3();
    let phi = series(&t, "torus3-mixed");
    let table = hodge_numbers(&t, &phi, &all_bidegrees(3), &[HodgeMode::Central, HodgeMode::Sampled], DEFAULT_SEED).unwrap();
    let binom = [1, 3, 3, 1];
    for e in &table.entries {
        assert_eq!(e.central, binom[e.p] * binom[e.q]);
        assert_eq!(e.sampled, Some(Deformed::Value(e.central)));
    }
    assert!(table.jumps().is_empty());
}

#[test]
fn nakamura_hodge_numbers_are_semicontinuous() {
    let iw = common::iwasawa();
    let phi = series(&iw, "nakamura");
    let bidegrees = [(1, 0), (0, 1), (0, 2)];
    let table = hodge_numbers(&iw, &phi, &bidegrees, &[HodgeMode::Central, HodgeMode::Sampled], DEFAULT_SEED).unwrap();
    for e in &table.entries {
        if let Some(Deformed::Value(h)) = e.sampled {
            assert!(h <= e.central);
        }
    }
    assert_eq!(table.get(1, 0).unwrap().sampled, Some(Deformed::Value(2)));
}

