use jetg_core::algebroid::{
    ad, bracket_group_jet, bracket_jet, bracket_semidirect, bracket_trivial, lie_derivative,
    GroupJetSection, JetSection, SemidirectSection, TrivialSection,
};
use jetg_core::finite_groupoid::{GroupoidTable, TrivialityReport};
use jetg_core::flows::{
    bch_defect, exp_jet, exp_trivial, flow_vector_field, group_law_defect, loglog_slope,
    BchCorrection, FlowConfig, FlowSection, GroupPath,
};
use jetg_core::groups::FiniteGroup;
use jetg_core::json::{subgroupoid_members, FromJson, ToJson};
use jetg_core::linear_groupoid::{
    apply, commutator, operator_flow, operator_from_section, section_from_operator, LinearOperator,
    VectorSection,
};
use jetg_core::multijet::{jet_compose, jet_invert, jet_of_polynomial, TruncatedJet};
use jetg_core::poly::PolyVectorField;
use jetg_core::verify;
use serde_json::{json, Value};

use crate::io::{emit, exact_point, float_point, kind_of, load, load_value, pretty, real, CliError, CliResult};
use crate::{AlgebroidCmd, Cli, FlowCmd, GlobalOpts, GroupoidCmd, JetCmd, LinopCmd, Verb};

pub fn run(cli: &Cli) -> CliResult<()> {
    let o = &cli.opts;
    match &cli.verb {
        Verb::Jet(c) => jet(c, o),
        Verb::Groupoid(c) => groupoid(c, o),
        Verb::Algebroid(c) => algebroid(c, o),
        Verb::Flow(c) => flow(c, o),
        Verb::Linop(c) => linop(c, o),
        Verb::Verify { suite } => run_verify(suite, o),
    }
}

fn config(o: &GlobalOpts) -> CliResult<FlowConfig> {
    let mut cfg = FlowConfig::default();
    if let Some(s) = o.step {
        cfg.step = s;
    }
    if let Some(t) = o.tol {
        cfg.tol = t;
    }
    cfg.validate().map_err(|e| CliError::Malformed(e.to_string()))?;
    Ok(cfg)
}

fn out_json(o: &GlobalOpts, v: &Value) -> CliResult<()> {
    emit(o.out.as_deref(), &pretty(v))
}

fn need_k(o: &GlobalOpts) -> CliResult<u32> {
    o.k.ok_or_else(|| CliError::Malformed("--k is required".into()))
}

fn jet(c: &JetCmd, o: &GlobalOpts) -> CliResult<()> {
    let v = match c {
        JetCmd::Taylor { map, at } => {
            let field: PolyVectorField = load(map)?;
            let x = exact_point(at)?;
            jet_of_polynomial(field.components(), &x, need_k(o)?)?.to_json()
        }
        JetCmd::Compose { outer, inner } => {
            let a: TruncatedJet = load(outer)?;
            let b: TruncatedJet = load(inner)?;
            jet_compose(&a, &b)?.to_json()
        }
        JetCmd::Invert { jet } => jet_invert(&load::<TruncatedJet>(jet)?)?.to_json(),
        JetCmd::Project { jet } => load::<TruncatedJet>(jet)?.project(need_k(o)?)?.to_json(),
    };
    out_json(o, &v)
}

fn subgroupoid(t: &GroupoidTable, arg: &str) -> CliResult<jetg_core::finite_groupoid::Subgroupoid> {
    let members = subgroupoid_members(&load_value(arg)?)?;
    Ok(t.subgroupoid(&members)?)
}

fn triviality_json(r: &TrivialityReport) -> Value {
    let comps: Vec<Value> = r
        .components
        .iter()
        .map(|c| {
            json!({
                "units": c.units,
                "transitive": c.transitive,
                "isotropy_orders": c.isotropy_orders,
                "isotropy_isomorphic": c.isotropy_isomorphic,
                "simply_transitive": c.simply_transitive,
            })
        })
        .collect();
    json!({ "locally_trivial": r.locally_trivial(), "components": comps })
}

fn need_dim(o: &GlobalOpts) -> CliResult<usize> {
    o.dim.ok_or_else(|| CliError::Malformed("--dim is required".into()))
}

fn groupoid(c: &GroupoidCmd, o: &GlobalOpts) -> CliResult<()> {
    let v = match c {
        GroupoidCmd::Check { table } => {
            let t: GroupoidTable = load(table)?;
            let report = t.check_axioms();
            let lines: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
            out_json(o, &json!({ "ok": report.is_ok(), "violations": lines }))?;
            if !report.is_ok() {
                return Err(CliError::Domain(format!(
                    "groupoid axioms violated: {} violation(s)",
                    lines.len()
                )));
            }
            return Ok(());
        }
        GroupoidCmd::Cosets { table, sigma } => {
            let t: GroupoidTable = load(table)?;
            let s = subgroupoid(&t, sigma)?;
            json!({ "blocks": t.cosets(&s).blocks })
        }
        GroupoidCmd::Normal { table, sigma } => {
            let t: GroupoidTable = load(table)?;
            let s = subgroupoid(&t, sigma)?;
            let n = t.is_normal(&s);
            let witness = n.witness.map(|(g, x)| json!({ "gamma": g, "x": x }));
            json!({ "normal": n.normal, "witness": witness })
        }
        GroupoidCmd::Quotient { table, sigma } => {
            let t: GroupoidTable = load(table)?;
            let s = subgroupoid(&t, sigma)?;
            t.quotient(&s)?.to_json()
        }
        GroupoidCmd::Components { table } => {
            triviality_json(&load::<GroupoidTable>(table)?.local_triviality_checks())
        }
        GroupoidCmd::Trivial { group } => {
            let h = match group.as_str() {
                "z4" => FiniteGroup::cyclic(4),
                "klein" => FiniteGroup::klein(),
                "s3" => FiniteGroup::symmetric3(),
                _ => FiniteGroup::dihedral4(),
            };
            GroupoidTable::trivial(need_dim(o)?, &h).to_json()
        }
        GroupoidCmd::Pair => GroupoidTable::pair(need_dim(o)?).to_json(),
    };
    out_json(o, &v)
}

fn pair<T: FromJson>(a: &Value, b: &Value) -> CliResult<(T, T)> {
    Ok((T::from_json(a)?, T::from_json(b)?))
}

fn algebroid(c: &AlgebroidCmd, o: &GlobalOpts) -> CliResult<()> {
    let v = match c {
        AlgebroidCmd::Bracket { a, b } => {
            let (va, vb) = (load_value(a)?, load_value(b)?);
            let kind = kind_of(&va)?;
            if kind_of(&vb)? != kind {
                return Err(CliError::Malformed("operands have different kinds".into()));
            }
            match kind {
                "trivial_section" => {
                    let (x, y) = pair::<TrivialSection>(&va, &vb)?;
                    bracket_trivial(&x, &y)?.to_json()
                }
                "jet_section" => {
                    let (x, y) = pair::<JetSection>(&va, &vb)?;
                    bracket_jet(&x, &y)?.to_json()
                }
                "group_jet_section" => {
                    let (x, y) = pair::<GroupJetSection>(&va, &vb)?;
                    bracket_group_jet(&x, &y)?.to_json()
                }
                "semidirect_section" => {
                    let (x, y) = pair::<SemidirectSection>(&va, &vb)?;
                    bracket_semidirect(&x, &y)?.to_json()
                }
                "linear_operator" => {
                    let (x, y) = pair::<LinearOperator>(&va, &vb)?;
                    commutator(&x, &y)?.to_json()
                }
                other => return Err(CliError::Malformed(format!("no bracket for kind {other:?}"))),
            }
        }
        AlgebroidCmd::Anchor { a } => {
            let va = load_value(a)?;
            match kind_of(&va)? {
                "trivial_section" => TrivialSection::from_json(&va)?.anchor().to_json(),
                "jet_section" => JetSection::from_json(&va)?.anchor().to_json(),
                "semidirect_section" => SemidirectSection::from_json(&va)?.xi.anchor().to_json(),
                "group_jet_section" => {
                    let s = GroupJetSection::from_json(&va)?;
                    PolyVectorField::zero(s.dim()).to_json()
                }
                other => return Err(CliError::Malformed(format!("no anchor for kind {other:?}"))),
            }
        }
        AlgebroidCmd::Ad { xi, sigma } => {
            let x: TrivialSection = load(xi)?;
            let s: TrivialSection = load(sigma)?;
            ad(&x, &s)?.to_json()
        }
        AlgebroidCmd::LieDerivative { xi, lambda } => {
            let x: JetSection = load(xi)?;
            let l: GroupJetSection = load(lambda)?;
            lie_derivative(&x, &l)?.to_json()
        }
    };
    out_json(o, &v)
}

fn group_law<S: FlowSection>(xi: &S, x: &[f64], t: f64, u: f64, cfg: &FlowConfig) -> CliResult<Value> {
    let d = group_law_defect(xi, x, t, u, cfg)?;
    Ok(json!({ "defect": d, "tol": cfg.tol, "pass": d <= cfg.tol }))
}

fn bch_report<S: FlowSection>(a: &S, b: &S, x: &[f64], cfg: &FlowConfig) -> CliResult<Value> {
    let mut rows = serde_json::Map::new();
    for (name, c) in [("bracket", BchCorrection::Bracket), ("dropped", BchCorrection::Dropped)] {
        let d = verify::BCH_TIMES
            .iter()
            .map(|&t| bch_defect(a, b, x, t, c, cfg))
            .collect::<Result<Vec<_>, _>>()?;
        let slope = loglog_slope(&verify::BCH_TIMES, &d);
        rows.insert(name.into(), json!({ "defects": d, "slope": slope }));
    }
    Ok(json!({ "times": verify::BCH_TIMES, "corrections": rows }))
}

fn flow(c: &FlowCmd, o: &GlobalOpts) -> CliResult<()> {
    let cfg = config(o)?;
    match c {
        FlowCmd::Field { theta, at, t } => {
            let field: PolyVectorField = load(theta)?;
            let p = flow_vector_field(&field, &float_point(at)?, real(t)?, &cfg)?;
            out_json(o, &json!({ "point": p.point, "error_estimate": p.error_estimate }))
        }
        FlowCmd::Exp { xi, at, t } => {
            let v = load_value(xi)?;
            let (x, t) = (float_point(at)?, real(t)?);
            let r = match kind_of(&v)? {
                "trivial_section" => exp_trivial(&TrivialSection::from_json(&v)?, &x, t, &cfg)?.to_json(),
                "jet_section" => exp_jet(&JetSection::from_json(&v)?, &x, t, &cfg)?.to_json(),
                other => return Err(CliError::Malformed(format!("no exponential for kind {other:?}"))),
            };
            out_json(o, &r)
        }
        FlowCmd::Path { xi, at, t, samples, csv } => {
            let s: TrivialSection = load(xi)?;
            let t = real(t)?;
            let n = (*samples).max(2);
            let times: Vec<f64> = (0..n).map(|i| t * i as f64 / (n - 1) as f64).collect();
            let path = GroupPath::sample(&s, &float_point(at)?, &times, &cfg)?;
            if *csv {
                emit(o.out.as_deref(), &path.to_csv())
            } else {
                out_json(o, &path.to_json())
            }
        }
        FlowCmd::GroupLaw { xi, at, t, u } => {
            let v = load_value(xi)?;
            let (x, t, u) = (float_point(at)?, real(t)?, real(u)?);
            let r = match kind_of(&v)? {
                "trivial_section" => group_law(&TrivialSection::from_json(&v)?, &x, t, u, &cfg)?,
                "jet_section" => group_law(&JetSection::from_json(&v)?, &x, t, u, &cfg)?,
                other => return Err(CliError::Malformed(format!("no exponential for kind {other:?}"))),
            };
            out_json(o, &r)
        }
        FlowCmd::Bch { a, b, at } => {
            let (va, vb) = (load_value(a)?, load_value(b)?);
            let x = float_point(at)?;
            let kind = kind_of(&va)?;
            if kind_of(&vb)? != kind {
                return Err(CliError::Malformed("operands have different kinds".into()));
            }
            let r = match kind {
                "trivial_section" => {
                    let (p, q) = pair::<TrivialSection>(&va, &vb)?;
                    bch_report(&p, &q, &x, &cfg)?
                }
                "jet_section" => {
                    let (p, q) = pair::<JetSection>(&va, &vb)?;
                    bch_report(&p, &q, &x, &cfg)?
                }
                other => return Err(CliError::Malformed(format!("no exponential for kind {other:?}"))),
            };
            out_json(o, &r)
        }
    }
}

fn linop(c: &LinopCmd, o: &GlobalOpts) -> CliResult<()> {
    let v = match c {
        LinopCmd::Apply { op, section } => {
            let d: LinearOperator = load(op)?;
            let s: VectorSection = load(section)?;
            apply(&d, &s)?.to_json()
        }
        LinopCmd::Commutator { a, b } => {
            let x: LinearOperator = load(a)?;
            let y: LinearOperator = load(b)?;
            commutator(&x, &y)?.to_json()
        }
        LinopCmd::Flow { op, section, at, t } => {
            let cfg = config(o)?;
            let d: LinearOperator = load(op)?;
            let s: VectorSection = load(section)?;
            let value = operator_flow(&d, &s, &float_point(at)?, real(t)?, &cfg)?;
            json!({ "value": value })
        }
        LinopCmd::Section { op } => section_from_operator(&load(op)?).to_json(),
        LinopCmd::Operator { section } => operator_from_section(&load(section)?).to_json(),
    };
    out_json(o, &v)
}

fn run_verify(suite: &str, o: &GlobalOpts) -> CliResult<()> {
    let cfg = config(o)?;
    let rows = verify::run_suite(suite, o.seed, &cfg).ok_or_else(|| {
        CliError::Malformed(format!(
            "unknown suite {suite:?}; expected one of {} or all",
            verify::SUITES.join(", ")
        ))
    })?;
    emit(o.out.as_deref(), &verify::format_table(&rows))?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(CliError::Domain(format!("{failed} invariant(s) failed")));
    }
    Ok(())
}
