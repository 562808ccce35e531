//! Verification suites over a subject, sampled reproducibly from a seed.

use oddconn::catalog::library_changes;
use oddconn::sample::Sampler;
use oddconn::{parse_expr, Chart, CoordinateChange, GradedPoly, OddQuasiConnection, Parity, VectorField};
use rayon::prelude::*;

use crate::report::{CheckResult, Counterexample, Input, Report, Status};
use crate::subject::Subject;

pub const SUITES: &[&str] = &["axioms", "involution", "tensoriality", "bianchi", "covariance", "divergence", "metric"];

#[derive(Debug, Clone)]
pub enum Value {
    Vector(VectorField),
    Function(GradedPoly),
    Change(String),
}

/// Named arguments of one trial.
#[derive(Debug, Clone, Default)]
pub struct Sample(pub Vec<(String, Value)>);

impl Sample {
    fn v(&self, name: &str) -> &VectorField {
        match self.0.iter().find(|(n, _)| n == name) {
            Some((_, Value::Vector(v))) => v,
            _ => panic!("sample has no vector `{name}`"),
        }
    }

    fn f(&self, name: &str) -> &GradedPoly {
        match self.0.iter().find(|(n, _)| n == name) {
            Some((_, Value::Function(f))) => f,
            _ => panic!("sample has no function `{name}`"),
        }
    }

    fn inputs(&self) -> Vec<Input> {
        self.0
            .iter()
            .map(|(name, v)| {
                let (kind, parity, components) = match v {
                    Value::Vector(x) => ("vector", parity_name(x.parity()), x.comps().iter().map(|c| c.to_string()).collect()),
                    Value::Function(f) => ("function", parity_name(f.parity()), vec![f.to_string()]),
                    Value::Change(c) => ("change", "even", vec![c.clone()]),
                };
                Input { name: name.clone(), kind: kind.into(), parity: parity.into(), components }
            })
            .collect()
    }

    /// Inverse of the `inputs` rendering.
    pub fn from_inputs(chart: &Chart, inputs: &[Input]) -> Result<Sample, String> {
        let mut out = Vec::new();
        for i in inputs {
            let parse = |s: &String| parse_expr(chart, s).map_err(|e| format!("{}: {e}", i.name));
            let value = match i.kind.as_str() {
                "vector" => {
                    let comps = i.components.iter().map(parse).collect::<Result<Vec<_>, _>>()?;
                    let v = match i.parity.as_str() {
                        "even" => VectorField::with_parity(chart, comps, Parity::Even),
                        "odd" => VectorField::with_parity(chart, comps, Parity::Odd),
                        _ => VectorField::new(chart, comps),
                    };
                    Value::Vector(v.map_err(|e| e.to_string())?)
                }
                "function" => Value::Function(parse(&i.components[0])?),
                "change" => Value::Change(i.components[0].clone()),
                other => return Err(format!("unknown input kind `{other}`")),
            };
            out.push((i.name.clone(), value));
        }
        Ok(Sample(out))
    }
}

fn parity_name(p: Option<Parity>) -> &'static str {
    match p {
        Some(Parity::Even) => "even",
        Some(Parity::Odd) => "odd",
        None => "mixed",
    }
}

/// Shared data for the checks: the subject and its transformed connections.
pub struct Ctx<'a> {
    pub subject: &'a Subject,
    pub involutive: bool,
    pub changes: Vec<(String, CoordinateChange, OddQuasiConnection)>,
}

impl<'a> Ctx<'a> {
    pub fn new(subject: &'a Subject, with_changes: bool) -> Result<Self, String> {
        let conn = &subject.model.connection;
        let mut named: Vec<(String, CoordinateChange)> = Vec::new();
        if with_changes {
            named.extend(library_changes(conn.chart()).map_err(|e| e.to_string())?.into_iter().map(|(n, c)| (n.to_string(), c)));
            named.extend(subject.model.changes.iter().map(|(n, c)| (format!("model:{n}"), c.clone())));
        }
        let changes = named
            .into_par_iter()
            .map(|(n, c)| {
                let moved = conn.transform(&c).map_err(|e| format!("{n}: {e}"))?;
                Ok((n, c, moved))
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(Ctx { subject, involutive: conn.rho().is_involution(), changes })
    }

    fn conn(&self) -> &OddQuasiConnection {
        &self.subject.model.connection
    }

    fn chart(&self) -> &Chart {
        self.conn().chart()
    }

    fn change(&self, s: &Sample) -> &(String, CoordinateChange, OddQuasiConnection) {
        let name = match s.0.iter().find(|(n, _)| n == "change") {
            Some((_, Value::Change(c))) => c,
            _ => panic!("sample has no change"),
        };
        self.changes.iter().find(|(n, _, _)| n == name).expect("known change")
    }
}

/// `Ok(None)` passes, `Ok(Some(residual))` fails.
type Outcome = Result<Option<String>, String>;
type Eval = Box<dyn Fn(&Ctx<'_>, &Sample) -> Outcome + Send + Sync>;
type Gen = Box<dyn Fn(&mut Sampler, &Ctx<'_>) -> Sample + Send + Sync>;

enum Source {
    Random(Gen),
    Fixed(Vec<Sample>),
    Skip(String),
}

pub struct Check {
    pub suite: &'static str,
    pub name: String,
    source: Source,
    eval: Eval,
}

fn residual_vec(v: VectorField) -> Option<String> {
    if v.is_zero() {
        None
    } else {
        Some(format!("[{}]", v.comps().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")))
    }
}

fn residual_fn(f: GradedPoly) -> Option<String> {
    if f.is_zero() {
        None
    } else {
        Some(f.to_string())
    }
}

fn vectors(names: &'static [&'static str], with_f: bool) -> Gen {
    Box::new(move |s, ctx| {
        let mut out: Vec<(String, Value)> =
            names.iter().map(|n| (n.to_string(), Value::Vector(s.any_vector(ctx.chart())))).collect();
        if with_f {
            out.push(("f".into(), Value::Function(s.function(ctx.chart()).0)));
        }
        Sample(out)
    })
}

fn with_change(name: String, inner: Gen) -> Gen {
    Box::new(move |s, ctx| {
        let mut sample = inner(s, ctx);
        sample.0.insert(0, ("change".into(), Value::Change(name.clone())));
        sample
    })
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn check(suite: &'static str, name: impl Into<String>, source: Source, eval: Eval) -> Check {
    Check { suite, name: name.into(), source, eval }
}

fn basis_triples(fields: &[VectorField]) -> Vec<Sample> {
    let mut out = Vec::new();
    for x in fields {
        for y in fields {
            for z in fields {
                out.push(Sample(vec![
                    ("X".into(), Value::Vector(x.clone())),
                    ("Y".into(), Value::Vector(y.clone())),
                    ("Z".into(), Value::Vector(z.clone())),
                ]));
            }
        }
    }
    out
}

/// Checks of one suite, in report order.
pub fn checks(suite: &str, ctx: &Ctx<'_>) -> Vec<Check> {
    let chart = ctx.chart().clone();
    match suite {
        "axioms" => vec![check(
            "axioms",
            "local-form-axioms",
            Source::Random(vectors(&["X", "Y"], true)),
            Box::new(|ctx, s| {
                let v = ctx.conn().axioms_check(s.v("X"), s.v("Y"), s.f("f")).map_err(e)?;
                Ok((!v.is_empty()).then(|| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")))
            }),
        )],
        "involution" => {
            let basis = (0..chart.len())
                .map(|a| Sample(vec![("X".into(), Value::Vector(VectorField::basis(&chart, a)))]))
                .collect();
            vec![check(
                "involution",
                "rho-squared-identity",
                Source::Fixed(basis),
                Box::new(|ctx, s| {
                    let rho = ctx.conn().rho();
                    let x = s.v("X");
                    Ok(residual_vec(&rho.apply(&rho.apply(x).map_err(e)?).map_err(e)? - x))
                }),
            )]
        }
        "tensoriality" => {
            let anomalies = |ctx: &Ctx<'_>, s: &Sample| {
                ctx.conn().tensoriality_anomalies(s.v("X"), s.v("Y"), s.v("Z"), s.f("f")).map_err(e)
            };
            vec![
                check(
                    "tensoriality",
                    "torsion-tensorial",
                    Source::Random(vectors(&["X", "Y", "Z"], true)),
                    Box::new(move |ctx, s| Ok(residual_vec(anomalies(ctx, s)?.torsion))),
                ),
                check(
                    "tensoriality",
                    "curvature-tensorial",
                    Source::Random(vectors(&["X", "Y", "Z"], true)),
                    Box::new(move |ctx, s| Ok(residual_vec(anomalies(ctx, s)?.curvature))),
                ),
                check(
                    "tensoriality",
                    "anomaly-formulas",
                    Source::Random(vectors(&["X", "Y", "Z"], true)),
                    Box::new(move |ctx, s| {
                        let a = anomalies(ctx, s)?;
                        Ok(residual_vec(&(&a.torsion - &a.torsion_expected) + &(&a.curvature - &a.curvature_expected)))
                    }),
                ),
            ]
        }
        "bianchi" => {
            let eval = || -> Eval {
                Box::new(|ctx, s| {
                    let b = ctx.conn().bianchi(s.v("X"), s.v("Y"), s.v("Z")).map_err(e)?;
                    Ok(residual_vec(&b.lhs - &b.rhs))
                })
            };
            let mut out = vec![check("bianchi", "first-bianchi", Source::Random(vectors(&["X", "Y", "Z"], false)), eval())];
            if let Some(par) = &ctx.subject.frame {
                out.push(check("bianchi", "first-bianchi-frame", Source::Fixed(basis_triples(par.frame())), eval()));
            }
            out
        }
        "covariance" => {
            let mut out = Vec::new();
            for (name, _, _) in &ctx.changes {
                out.push(check(
                    "covariance",
                    format!("nabla[{name}]"),
                    Source::Random(with_change(name.clone(), vectors(&["X", "Y"], false))),
                    Box::new(|ctx, s| {
                        let (_, c, moved) = ctx.change(s);
                        let tv = |v: &VectorField| c.transform_vector(v).map_err(e);
                        let here = tv(&ctx.conn().nabla(s.v("X"), s.v("Y")).map_err(e)?)?;
                        let there = moved.nabla(&tv(s.v("X"))?, &tv(s.v("Y"))?).map_err(e)?;
                        Ok(residual_vec(&here - &there))
                    }),
                ));
                out.push(check(
                    "covariance",
                    format!("rho[{name}]"),
                    Source::Random(with_change(name.clone(), vectors(&["X"], false))),
                    Box::new(|ctx, s| {
                        let (_, c, moved) = ctx.change(s);
                        let here = c.transform_vector(&ctx.conn().rho().apply(s.v("X")).map_err(e)?).map_err(e)?;
                        let there = moved.rho().apply(&c.transform_vector(s.v("X")).map_err(e)?).map_err(e)?;
                        Ok(residual_vec(&here - &there))
                    }),
                ));
                let skip = (!ctx.involutive).then(|| "rho is not an involution".to_string());
                let src = |names: &'static [&'static str]| match &skip {
                    Some(why) => Source::Skip(why.clone()),
                    None => Source::Random(with_change(name.clone(), vectors(names, false))),
                };
                out.push(check(
                    "covariance",
                    format!("torsion[{name}]"),
                    src(&["X", "Y"]),
                    Box::new(|ctx, s| {
                        let (_, c, moved) = ctx.change(s);
                        let tv = |v: &VectorField| c.transform_vector(v).map_err(e);
                        let here = tv(&ctx.conn().torsion(s.v("X"), s.v("Y")).map_err(e)?)?;
                        let there = moved.torsion(&tv(s.v("X"))?, &tv(s.v("Y"))?).map_err(e)?;
                        Ok(residual_vec(&here - &there))
                    }),
                ));
                out.push(check(
                    "covariance",
                    format!("curvature[{name}]"),
                    src(&["X", "Y", "Z"]),
                    Box::new(|ctx, s| {
                        let (_, c, moved) = ctx.change(s);
                        let tv = |v: &VectorField| c.transform_vector(v).map_err(e);
                        let here = tv(&ctx.conn().curvature(s.v("X"), s.v("Y"), s.v("Z")).map_err(e)?)?;
                        let there = moved.curvature(&tv(s.v("X"))?, &tv(s.v("Y"))?, &tv(s.v("Z"))?).map_err(e)?;
                        Ok(residual_vec(&here - &there))
                    }),
                ));
            }
            out
        }
        "divergence" => {
            let mut out = vec![check(
                "divergence",
                "leibniz",
                Source::Random(vectors(&["X"], true)),
                Box::new(|ctx, s| {
                    let (x, f) = (s.v("X"), s.f("f"));
                    let (px, pf) = (x.homogeneous_parity().map_err(e)?, f.parity().unwrap_or_default());
                    let conn = ctx.conn();
                    let lhs = conn.odd_divergence(&x.scale_left(f)).map_err(e)?;
                    let rhs = &(f * &conn.odd_divergence(x).map_err(e)?).signed(pf)
                        + &conn.rho().apply(x).map_err(e)?.apply(f).signed(px * pf);
                    Ok(residual_fn(&lhs - &rhs))
                }),
            )];
            for (name, _, _) in &ctx.changes {
                out.push(check(
                    "divergence",
                    format!("invariance[{name}]"),
                    Source::Random(with_change(name.clone(), vectors(&["X"], false))),
                    Box::new(|ctx, s| {
                        let (_, c, moved) = ctx.change(s);
                        let here = c.to_target(&ctx.conn().odd_divergence(s.v("X")).map_err(e)?).map_err(e)?;
                        let there = moved.odd_divergence(&c.transform_vector(s.v("X")).map_err(e)?).map_err(e)?;
                        Ok(residual_fn(&here - &there))
                    }),
                ));
            }
            if ctx.subject.frame.is_some() {
                out.push(check(
                    "divergence",
                    "frame-formula",
                    Source::Random(vectors(&["X"], false)),
                    Box::new(|ctx, s| {
                        let par = ctx.subject.frame.as_ref().expect("frame");
                        let general = ctx.conn().odd_divergence(s.v("X")).map_err(e)?;
                        Ok(residual_fn(&par.frame_divergence(s.v("X")).map_err(e)? - &general))
                    }),
                ));
            }
            out
        }
        "metric" => {
            let source = if ctx.subject.model.metric.is_some() {
                Source::Random(vectors(&["X", "Y", "Z"], false))
            } else {
                Source::Skip("no metric".into())
            };
            vec![check(
                "metric",
                "compatibility",
                source,
                Box::new(|ctx, s| {
                    let g = ctx.subject.model.metric.as_ref().expect("metric");
                    Ok(residual_fn(ctx.conn().metric_residual(g, s.v("X"), s.v("Y"), s.v("Z")).map_err(e)?))
                }),
            )]
        }
        _ => Vec::new(),
    }
}

/// Per-trial seed, depending on the check's name rather than its position in the run.
fn trial_seed(seed: u64, check: &str, trial: usize) -> u64 {
    let h = check.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3));
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ h ^ (trial as u64)
}

fn run_check(ctx: &Ctx<'_>, c: &Check, seed: u64, trials: usize) -> CheckResult {
    let samples: Vec<(usize, Sample)> = match &c.source {
        Source::Skip(why) => {
            return CheckResult {
                suite: c.suite.into(),
                name: c.name.clone(),
                status: Status::Skip,
                samples: 0,
                detail: why.clone(),
                counterexample: None,
            }
        }
        Source::Fixed(list) => list.iter().cloned().enumerate().collect(),
        Source::Random(gen) => (0..trials)
            .map(|t| {
                let mut s = Sampler::new(trial_seed(seed, &format!("{}/{}", c.suite, c.name), t));
                (t, gen(&mut s, ctx))
            })
            .collect(),
    };
    let outcomes: Vec<Outcome> = samples.par_iter().map(|(_, s)| (c.eval)(ctx, s)).collect();
    let first = outcomes.iter().position(|o| !matches!(o, Ok(None)));
    let failures = outcomes.iter().filter(|o| !matches!(o, Ok(None))).count();
    let (status, detail, counterexample) = match first {
        None => (Status::Pass, String::new(), None),
        Some(k) => {
            let (trial, sample) = &samples[k];
            let residual = match &outcomes[k] {
                Ok(Some(r)) => r.clone(),
                Err(msg) => format!("error: {msg}"),
                Ok(None) => unreachable!(),
            };
            let cx = Counterexample { trial: *trial, inputs: sample.inputs(), residual };
            (Status::Fail, format!("{failures} of {} samples fail", samples.len()), Some(cx))
        }
    };
    CheckResult { suite: c.suite.into(), name: c.name.clone(), status, samples: samples.len(), detail, counterexample }
}

fn suite_list(suite: &str) -> Result<Vec<&'static str>, String> {
    if suite == "all" {
        return Ok(SUITES.to_vec());
    }
    SUITES
        .iter()
        .find(|s| **s == suite)
        .map(|s| vec![*s])
        .ok_or_else(|| format!("unknown suite `{suite}` (expected one of {}, all)", SUITES.join(", ")))
}

pub fn verify(subject: &Subject, suite: &str, seed: u64, trials: usize) -> Result<Report, String> {
    let suites = suite_list(suite)?;
    let needs_changes = suites.iter().any(|s| *s == "covariance" || *s == "divergence");
    let ctx = Ctx::new(subject, needs_changes)?;
    let all: Vec<Check> = suites.iter().flat_map(|s| checks(s, &ctx)).collect();
    let results = all.iter().map(|c| run_check(&ctx, c, seed, trials)).collect();
    Ok(Report { subject: subject.name.clone(), suite: suite.into(), seed, trials, checks: results, timing_ms: None })
}

/// Re-evaluate a recorded counterexample; `Ok(Some(residual))` reproduces a failure.
pub fn replay(subject: &Subject, suite: &str, check_name: &str, cx: &Counterexample) -> Result<Option<String>, String> {
    let needs_changes = suite == "covariance" || suite == "divergence";
    let ctx = Ctx::new(subject, needs_changes)?;
    let c = checks(suite, &ctx).into_iter().find(|c| c.name == check_name).ok_or_else(|| format!("no check `{check_name}`"))?;
    let sample = Sample::from_inputs(ctx.chart(), &cx.inputs)?;
    (c.eval)(&ctx, &sample)
}
