use std::path::Path;

use serde_json::{json, Value};

use defcohom::cohomology::{Cochain, CohomologyBasis, Kind};
use defcohom::deform::{kodaira_spencer, mc_solve, verify_conjugation_identity};
use defcohom::frame::RhoConvention;
use defcohom::hodge::{all_bidegrees, hodge_numbers, Deformed, HodgeMode, DEFAULT_SEED};
use defcohom::identities::{algebra_checks, deformation_checks, dgla_checks, Check};
use defcohom::json::{
    cochain_to_json, form_from_terms, vform_from_terms, vform_to_terms, DeformationDocument, FirstOrderDocument, FormTerm,
    VFormTerm,
};
use defcohom::obstruction::{extend_class, ExtensionResult, MonomialClass, ObstructionEngine, RelativeDel};
use defcohom::{ComplexModel, Direction, GaussianRational, JetRing, VForm};

use crate::{corpus, read_file, ClassArg, CliError, CliResult, Command, Common, KindArg, ModeArg, RelativeDelArg};

pub const SEED_ENV: &str = "DEFCOHOM_SEED";

/// A command result: the report, diagnostics for standard error, and an
/// invariant failure that should turn the exit code to 3 after emission.
pub struct Output {
    pub value: Value,
    pub notes: Vec<String>,
    pub failure: Option<String>,
}

impl Output {
    fn new(value: Value) -> Self {
        Output { value, notes: Vec::new(), failure: None }
    }
}

fn load_model(spec: &str) -> CliResult<ComplexModel> {
    let path = Path::new(spec);
    if path.exists() {
        return Ok(ComplexModel::from_json(&read_file(path)?)?);
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(spec);
    match corpus::load_bundled(stem) {
        Some(m) => Ok(m?),
        None => Err(CliError::Io {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or bundled model"),
        }),
    }
}

fn load_series(model: &ComplexModel, path: &Path, holomorphic: bool, order: Option<u32>) -> CliResult<VForm> {
    let mut doc = DeformationDocument::from_json(&read_file(path)?)?;
    doc.holomorphic |= holomorphic;
    Ok(doc.beltrami(model, order)?)
}

fn parse_pair(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Usage(format!("bidegree must be `p,q`, got `{s}`"));
    let (p, q) = s.split_once(',').ok_or_else(bad)?;
    Ok((p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?))
}

fn parse_kind(model: &ComplexModel, k: &KindArg) -> CliResult<Option<Kind>> {
    let kind = match (&k.bidegree, k.tangent) {
        (Some(b), _) => {
            let (p, q) = parse_pair(b)?;
            Kind::Form { p, q }
        }
        (None, Some(q)) => Kind::Tangent { q },
        (None, None) => return Ok(None),
    };
    let (p, q) = match kind {
        Kind::Form { p, q } => (p, q),
        Kind::Tangent { q } => (0, q),
    };
    if p > model.dim() || q > model.dim() {
        return Err(defcohom::Error::SelectorOutOfRange(p.max(q)).into());
    }
    Ok(Some(kind))
}

fn require_kind(model: &ComplexModel, k: &KindArg) -> CliResult<Kind> {
    parse_kind(model, k)?.ok_or_else(|| CliError::Usage("one of --bidegree or --tangent is required".into()))
}

fn kind_json(kind: Kind) -> Value {
    match kind {
        Kind::Form { p, q } => json!({"type": "form", "p": p, "q": q}),
        Kind::Tangent { q } => json!({"type": "tangent", "q": q}),
    }
}

fn scalars(v: &[GaussianRational]) -> Value {
    json!(v.iter().map(|c| c.to_string()).collect::<Vec<_>>())
}

fn monomial_classes(ring: &JetRing, classes: &[MonomialClass]) -> Value {
    json!(classes
        .iter()
        .map(|c| json!({"monomial": c.monomial.named(ring), "coords": scalars(&c.coords)}))
        .collect::<Vec<_>>())
}

fn parse_seed(s: &str) -> CliResult<u64> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|_| CliError::Usage(format!("seed must be a decimal or 0x-hex integer, got `{s}`")))
}

fn resolve_seed(flag: Option<&str>) -> CliResult<u64> {
    if let Some(s) = flag {
        return parse_seed(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(s) => parse_seed(&s),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Selected classes as `(index, representative)`; `index` is `None` for a
/// representative given by file.
fn select_classes(
    model: &ComplexModel,
    kind: Kind,
    class: &ClassArg,
    ring: &std::sync::Arc<JetRing>,
) -> CliResult<Vec<(Option<usize>, Cochain)>> {
    if let Some(path) = &class.class_rep {
        let text = read_file(path)?;
        let schema = |e: serde_json::Error| defcohom::Error::Schema(e.to_string());
        let rep = match kind {
            Kind::Form { .. } => {
                let terms: Vec<FormTerm> = serde_json::from_str(&text).map_err(schema)?;
                Cochain::Form(form_from_terms(model.dim(), ring, &terms)?)
            }
            Kind::Tangent { .. } => {
                let terms: Vec<VFormTerm> = serde_json::from_str(&text).map_err(schema)?;
                Cochain::VForm(vform_from_terms(model.dim(), ring, &terms)?)
            }
        };
        return Ok(vec![(None, rep)]);
    }
    let basis = CohomologyBasis::new(model, kind)?;
    match class.class {
        Some(i) if i >= basis.h() => Err(defcohom::Error::SelectorOutOfRange(i).into()),
        Some(i) => Ok(vec![(Some(i), basis.representative(i, ring)?)]),
        None => Ok(basis.representatives(ring).into_iter().enumerate().map(|(i, r)| (Some(i), r)).collect()),
    }
}

fn directions(ring: &JetRing, spec: Option<&str>, phi: &VForm) -> CliResult<Vec<Direction>> {
    if let Some(s) = spec {
        return Ok(vec![Direction::parse(ring, s)?]);
    }
    let mut vars: Vec<usize> = (0..ring.num_params()).collect();
    if !phi.terms().values().all(defcohom::Jet::is_holomorphic) {
        vars.extend(ring.num_params()..ring.num_vars());
    }
    Ok(vars.into_iter().map(|v| Direction::coordinate(ring, v)).collect::<defcohom::Result<_>>()?)
}

fn class_label(idx: Option<usize>) -> Value {
    match idx {
        Some(i) => json!(i),
        None => json!("file"),
    }
}

fn checks_json(checks: &[Check]) -> Value {
    json!(checks
        .iter()
        .map(|c| {
            let mut v = json!({"name": c.name, "cases": c.cases, "failures": c.failures, "ok": c.ok()});
            if let Some(f) = &c.first_failure {
                v["first_failure"] = json!(f);
            }
            v
        })
        .collect::<Vec<_>>())
}

fn order_for(common: &Common, doc_order: u32) -> u32 {
    common.order.unwrap_or(doc_order)
}

pub fn execute(command: &Command) -> CliResult<Output> {
    let common = command.common();
    let model = load_model(&common.model)?;
    match command {
        Command::Validate { .. } => Ok(Output::new(json!({
            "model": model.name(),
            "valid": true,
            "dim": model.dim(),
            "params": model.params(),
            "order": model.order(),
            "parallelizable": model.is_parallelizable(),
        }))),
        Command::Cohomology { kind, .. } => cohomology(&model, kind),
        Command::McCheck { deformation, .. } => {
            let phi = load_series(&model, &deformation.deformation, deformation.holomorphic, common.order)?;
            let defect = model.mc_defect(&phi)?;
            Ok(Output::new(json!({
                "mc": defect.is_zero(),
                "order": phi.ring().order(),
                "defect": vform_to_terms(&defect),
            })))
        }
        Command::McSolve { deformation, .. } => {
            let doc = FirstOrderDocument::from_json(&read_file(&deformation.deformation)?)?;
            let phi1 = doc.phi1(&model, None)?;
            if deformation.holomorphic && !phi1.terms().values().all(defcohom::Jet::is_holomorphic) {
                return Err(defcohom::Error::Schema("holomorphic series contains conjugate parameters".into()).into());
            }
            let target = common.order.or(doc.order).unwrap_or(model.order());
            let (series, report) = mc_solve(&model, &phi1, target)?;
            let solved = if report.complete() {
                series.phi.clone()
            } else {
                let ring = series.phi.ring().with_order(report.solved_order);
                series.phi.try_map_ring(&ring, |c| c.truncate(report.solved_order))?
            };
            let mut out = Output::new(serde_json::to_value(DeformationDocument::from_beltrami(&solved, series.holomorphic)).expect("document serializes"));
            out.notes.push(format!(
                "solved to order {} of {}; last nonzero correction at order {}",
                report.solved_order, report.target_order, report.last_nonzero_order
            ));
            for o in &report.obstructions {
                out.notes.push(format!(
                    "obstructed at order {} monomial {}: H^2(T) coordinates [{}]",
                    o.order,
                    o.monomial.display(phi1.ring()),
                    o.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
                ));
            }
            Ok(out)
        }
        Command::Ks { deformation, direction, .. } => {
            let phi = load_series(&model, &deformation.deformation, deformation.holomorphic, common.order)?;
            let ring = phi.ring().clone();
            let n = ring.order();
            let mut classes = Vec::new();
            for u in directions(&ring, direction.as_deref(), &phi)? {
                for m in 1..=n {
                    let ks = kodaira_spencer(&model, &phi, &u, m)?;
                    classes.push(json!({
                        "direction": u.display(&ring),
                        "order": m,
                        "representative": vform_to_terms(&ks.representative),
                        "twisted_coords": scalars(&ks.twisted_coords),
                        "central_coords": scalars(&ks.central_coords),
                        "zero": ks.is_zero(),
                    }));
                }
            }
            Ok(Output::new(json!({"order": n, "classes": classes})))
        }
        Command::Extend { deformation, kind, class, .. } => {
            let phi = load_series(&model, &deformation.deformation, deformation.holomorphic, common.order)?;
            let kind = require_kind(&model, kind)?;
            let n = phi.ring().order();
            let mut results = Vec::new();
            for (idx, rep) in select_classes(&model, kind, class, phi.ring())? {
                let ext = extend_class(&model, &phi, &rep, n)?;
                results.push(extension_json(idx, &ext, phi.ring()));
            }
            Ok(Output::new(json!({"kind": kind_json(kind), "target_order": n, "classes": results})))
        }
        Command::Obstruct { deformation, kind, class, direction, relative_del, .. } => {
            let phi = load_series(&model, &deformation.deformation, deformation.holomorphic, common.order)?;
            let kind = require_kind(&model, kind)?;
            let del = match relative_del {
                RelativeDelArg::GeneratorSubstitution => RelativeDel::Conjugated(RhoConvention::GeneratorSubstitution),
                RelativeDelArg::DualFrameNormalized => RelativeDel::Conjugated(RhoConvention::DualFrameNormalized),
                RelativeDelArg::Central => RelativeDel::Central,
            };
            obstruct(&model, &phi, kind, class, direction.as_deref(), del)
        }
        Command::Hodge { deformation, holomorphic, bidegree, mode, seed, .. } => {
            let phi = match deformation {
                Some(path) => load_series(&model, path, *holomorphic, common.order)?,
                None => VForm::zero(model.dim(), &model.ring_with_order(order_for(common, model.order()))),
            };
            let bidegrees = if bidegree.is_empty() {
                all_bidegrees(model.dim())
            } else {
                bidegree.iter().map(|s| parse_pair(s)).collect::<CliResult<Vec<_>>>()?
            };
            let mut modes: Vec<HodgeMode> = Vec::new();
            let requested: Vec<ModeArg> = if mode.is_empty() {
                if deformation.is_some() {
                    vec![ModeArg::Central, ModeArg::Sampled]
                } else {
                    vec![ModeArg::Central]
                }
            } else {
                mode.clone()
            };
            for m in requested {
                let add: &[HodgeMode] = match m {
                    ModeArg::Central => &[HodgeMode::Central],
                    ModeArg::Sampled => &[HodgeMode::Sampled],
                    ModeArg::Symbolic => &[HodgeMode::Symbolic],
                    ModeArg::All => &HodgeMode::ALL,
                };
                for a in add {
                    if !modes.contains(a) {
                        modes.push(*a);
                    }
                }
            }
            modes.sort();
            let seed = resolve_seed(seed.as_deref())?;
            let table = hodge_numbers(&model, &phi, &bidegrees, &modes, seed)?;
            let value = |d: Option<Deformed>| match d {
                None => Value::Null,
                Some(Deformed::Value(h)) => json!(h),
                Some(Deformed::Inconclusive) => json!("inconclusive"),
            };
            let entries: Vec<Value> = table
                .entries
                .iter()
                .map(|e| {
                    json!({"p": e.p, "q": e.q, "central": e.central, "sampled": value(e.sampled),
                           "symbolic": value(e.symbolic), "jump": e.jump})
                })
                .collect();
            let samples: Vec<Value> = table.samples.iter().map(|p| json!(p.values)).collect();
            Ok(Output::new(json!({
                "model": model.name(),
                "modes": modes.iter().map(|m| m.name()).collect::<Vec<_>>(),
                "seed": seed,
                "entries": entries,
                "jumps": table.jumps(),
                "samples": samples,
            })))
        }
        Command::VerifyIdentities { deformation, holomorphic, .. } => {
            let mut checks = algebra_checks(&model)?;
            checks.extend(dgla_checks(&model)?);
            let mut value = json!({"model": model.name(), "checks": checks_json(&checks)});
            let mut failed: Vec<&str> = checks.iter().filter(|c| !c.ok()).map(|c| c.name).collect();
            let mut def_checks = Vec::new();
            if let Some(path) = deformation {
                let phi = load_series(&model, path, *holomorphic, common.order)?;
                def_checks = deformation_checks(&model, &phi)?;
                let mc = def_checks.first().is_some_and(Check::ok);
                let mut d = json!({"mc": mc, "order": phi.ring().order(), "checks": checks_json(&def_checks)});
                if mc {
                    let mut reports = Vec::new();
                    for c in RhoConvention::ALL {
                        let r = verify_conjugation_identity(&model, &phi, phi.ring().order(), c)?;
                        reports.push(json!({
                            "convention": c.name(),
                            "order": r.order,
                            "forms_agreement": r.forms_agreement,
                            "vforms_agreement": r.vforms_agreement,
                            "mismatches": r.mismatches.iter().map(|(e, k)| json!({"element": e, "degree": k})).collect::<Vec<_>>(),
                        }));
                    }
                    d["conjugation"] = json!(reports);
                }
                value["deformation"] = d;
            }
            failed.extend(def_checks.iter().skip(1).filter(|c| !c.ok()).map(|c| c.name));
            let mut out = Output::new(value);
            if !failed.is_empty() {
                out.failure = Some(format!("identity checks failed: {}", failed.join(", ")));
            }
            Ok(out)
        }
    }
}

fn cohomology(model: &ComplexModel, kind: &KindArg) -> CliResult<Output> {
    let ring = model.ring();
    match parse_kind(model, kind)? {
        Some(kind) => {
            let b = CohomologyBasis::new(model, kind)?;
            let basis: Vec<Value> = b.representatives(&ring).iter().map(cochain_to_json).collect();
            Ok(Output::new(json!({"kind": kind_json(kind), "h": b.h(), "basis": basis})))
        }
        None => {
            let mut forms = Vec::new();
            for (p, q) in all_bidegrees(model.dim()) {
                forms.push(json!({"p": p, "q": q, "h": CohomologyBasis::new(model, Kind::Form { p, q })?.h()}));
            }
            let mut tangent = Vec::new();
            for q in 0..=model.dim() {
                tangent.push(json!({"q": q, "h": CohomologyBasis::new(model, Kind::Tangent { q })?.h()}));
            }
            Ok(Output::new(json!({"model": model.name(), "forms": forms, "tangent": tangent})))
        }
    }
}

fn extension_json(idx: Option<usize>, ext: &ExtensionResult, ring: &JetRing) -> Value {
    json!({
        "class": class_label(idx),
        "achieved_order": ext.achieved_order,
        "complete": ext.complete(),
        "representative": cochain_to_json(&ext.representative),
        "obstructed_order": ext.obstructed_order(),
        "obstructed": monomial_classes(ring, &ext.obstructed),
    })
}

fn obstruct(
    model: &ComplexModel,
    phi: &VForm,
    kind: Kind,
    class: &ClassArg,
    direction: Option<&str>,
    del: RelativeDel,
) -> CliResult<Output> {
    let ring = phi.ring().clone();
    let n = ring.order();
    let dirs = directions(&ring, direction, phi)?;
    let mut engine = ObstructionEngine::new(model, phi, del)?;
    let mut classes = Vec::new();
    let mut entries = Vec::new();
    let mut failure = None;
    for (idx, rep) in select_classes(model, kind, class, &ring)? {
        let ext = extend_class(model, phi, &rep, n)?;
        classes.push(extension_json(idx, &ext, &ring));
        let top = (ext.achieved_order + 1).min(n);
        for k in 1..=top {
            for u in &dirs {
                let e = engine.entry(&ext, u, k)?;
                let r = ring.with_order(k - 1);
                if !e.agreement {
                    failure = Some(format!("formula and direct obstruction disagree (class {:?}, order {k}, direction {})", idx, u.display(&ring)));
                }
                entries.push(json!({
                    "class": class_label(idx),
                    "order": k,
                    "direction": u.display(&ring),
                    "obstruction": {
                        "coords": scalars(&e.twisted_coords),
                        "vanishes": e.vanishes,
                        "twisted_vanishes": e.twisted_vanishes,
                        "agreement": e.agreement,
                        "formula_closed": e.formula_closed,
                        "central": monomial_classes(&r, &e.central),
                        "formula": cochain_to_json(&e.formula),
                        "direct": cochain_to_json(&e.direct),
                    },
                }));
            }
        }
    }
    let mut out = Output::new(json!({
        "kind": kind_json(kind),
        "order": n,
        "relative_del": del.name(),
        "classes": classes,
        "entries": entries,
    }));
    out.failure = failure;
    Ok(out)
}
