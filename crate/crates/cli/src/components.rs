use oddconn::catalog::{vierbein_christoffel, VierbeinSigns};
use oddconn::{GradedPoly, VectorField};
use serde::Serialize;

use crate::subject::{coordinate_labels, Subject};

pub const OBJECTS: &[&str] = &["nabla", "torsion", "curvature", "divergence", "christoffel"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Auto,
    Coordinate,
    Frame,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    pub label: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub key: String,
    pub components: Vec<Component>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table {
    pub subject: String,
    pub object: String,
    pub basis: String,
    pub labels: Vec<String>,
    pub rows: Vec<Row>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn to_text(&self) -> String {
        let mut out = format!("subject: {}\nobject: {}  basis: {} ({})\n", self.subject, self.object, self.basis, self.labels.join(" "));
        for r in &self.rows {
            let body = if r.components.is_empty() {
                "0".to_string()
            } else if r.components.len() == 1 && r.components[0].label == "value" {
                r.components[0].value.clone()
            } else {
                r.components.iter().map(|c| format!("{}: {}", c.label, c.value)).collect::<Vec<_>>().join(", ")
            };
            out.push_str(&format!("{} = {}\n", r.key, body));
        }
        for n in &self.notes {
            out.push_str(&format!("# {n}\n"));
        }
        out
    }

    pub fn to_machine(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }
}

struct Frame<'a> {
    fields: Vec<VectorField>,
    labels: Vec<String>,
    subject: &'a Subject,
    use_frame: bool,
}

impl Frame<'_> {
    fn expand(&self, v: &VectorField) -> Result<Vec<Component>, String> {
        let comps: Vec<GradedPoly> = if self.use_frame {
            self.subject.frame.as_ref().expect("frame").components(v).map_err(|e| e.to_string())?
        } else {
            v.comps().to_vec()
        };
        Ok(comps
            .iter()
            .zip(&self.labels)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, l)| Component { label: l.clone(), value: c.to_string() })
            .collect())
    }
}

fn scalar(v: &GradedPoly) -> Vec<Component> {
    if v.is_zero() {
        Vec::new()
    } else {
        vec![Component { label: "value".into(), value: v.to_string() }]
    }
}

/// Components of `object`, over basis fields or the named fields `x`, `y`.
pub fn components(subject: &Subject, object: &str, basis: Basis, x: Option<&str>, y: Option<&str>) -> Result<Table, String> {
    let conn = &subject.model.connection;
    let chart = conn.chart();
    let use_frame = match basis {
        Basis::Coordinate => false,
        Basis::Frame if subject.frame.is_none() => return Err(format!("`{}` has no frame", subject.name)),
        Basis::Frame => true,
        Basis::Auto => subject.frame.is_some(),
    };
    let (fields, labels) = if use_frame {
        (subject.frame.as_ref().expect("frame").frame().to_vec(), subject.frame_labels())
    } else {
        ((0..chart.len()).map(|a| VectorField::basis(chart, a)).collect(), coordinate_labels(subject))
    };
    let fr = Frame { fields, labels, subject, use_frame };
    let named = |n: &str| {
        subject.model.fields.get(n).cloned().ok_or_else(|| format!("model has no field `{n}`"))
    };
    let arg = |n: Option<&str>| -> Result<Vec<(String, VectorField)>, String> {
        match n {
            Some(n) => Ok(vec![(n.to_string(), named(n)?)]),
            None => Ok(fr.labels.iter().cloned().zip(fr.fields.iter().cloned()).collect()),
        }
    };
    let e = |x: oddconn::Error| x.to_string();
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    match object {
        "nabla" => {
            for (ln, xv) in arg(x)? {
                for (lm, yv) in arg(y)? {
                    rows.push(Row { key: format!("nabla_{ln} {lm}"), components: fr.expand(&conn.nabla(&xv, &yv).map_err(e)?)? });
                }
            }
        }
        "torsion" => {
            let xs = arg(x)?;
            let ys = arg(y)?;
            for (i, (ln, xv)) in xs.iter().enumerate() {
                // graded symmetry: only i <= j over the basis
                let start = if x.is_none() && y.is_none() { i } else { 0 };
                for (lm, yv) in &ys[start..] {
                    rows.push(Row { key: format!("T({ln}, {lm})"), components: fr.expand(&conn.torsion(xv, yv).map_err(e)?)? });
                }
            }
        }
        "curvature" => {
            let xs = arg(x)?;
            let ys = arg(y)?;
            let zs = arg(None)?;
            let mut zero = 0;
            for (ln, xv) in &xs {
                for (lm, yv) in &ys {
                    for (lk, zv) in &zs {
                        let r = conn.curvature(xv, yv, zv).map_err(e)?;
                        if r.is_zero() {
                            zero += 1;
                        } else {
                            rows.push(Row { key: format!("R({ln}, {lm}){lk}"), components: fr.expand(&r)? });
                        }
                    }
                }
            }
            notes.push(format!("{zero} of {} components vanish", xs.len() * ys.len() * zs.len()));
        }
        "divergence" => {
            for (ln, xv) in arg(x)? {
                rows.push(Row { key: format!("Div {ln}"), components: scalar(&conn.odd_divergence(&xv).map_err(e)?) });
            }
        }
        "christoffel" => {
            let n = chart.len();
            let name = |i: usize| chart.name(i).to_string();
            for b in 0..n {
                for a in 0..n {
                    for c in 0..n {
                        let v = conn.gamma(b, a, c);
                        if !v.is_zero() {
                            rows.push(Row { key: format!("gamma {} {} {}", name(b), name(a), name(c)), components: scalar(v) });
                        }
                    }
                }
            }
            if let Some(par) = &subject.frame {
                let rho = par.involution().map_err(e)?;
                for (signs, tag) in [(VierbeinSigns::Corrected, "corrected"), (VierbeinSigns::Literal, "literal")] {
                    let vb = vierbein_christoffel(par, &rho, signs).map_err(e)?;
                    let off = vb.iter().zip(conn.gammas()).filter(|(u, v)| u != v).count();
                    notes.push(format!("vierbein formula with {tag} signs: {off} of {} entries differ", vb.len()));
                }
            }
        }
        other => return Err(format!("unknown object `{other}` (expected one of {})", OBJECTS.join(", "))),
    }
    Ok(Table {
        subject: subject.name.clone(),
        object: object.into(),
        basis: if use_frame { "frame".into() } else { "coordinate".into() },
        labels: fr.labels.clone(),
        rows,
        notes,
    })
}
