//! Line-oriented model files.
//!
//! ```text
//! chart even t
//! chart odd theta
//! rho t theta = 1
//! rho theta t = 1
//! gamma theta t t = t
//! field X odd theta = 1
//! metric t theta = 1
//! change shear s = t + theta*t
//! inverse shear t = ...
//! ```
//!
//! Omitted entries are zero. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use oddconn::connection::{OddEndomorphism, OddQuasiConnection, Rank2Covariant};
use oddconn::{parse_expr, Chart, ChartSignature, CoordinateChange, GradedPoly, Parity, VectorField};

/// Parse failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ModelError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

fn err<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T, ModelError> {
    Err(ModelError { line, col, msg: msg.into() })
}

#[derive(Debug, Clone)]
pub struct Model {
    pub connection: OddQuasiConnection,
    pub fields: BTreeMap<String, VectorField>,
    pub metric: Option<Rank2Covariant>,
    pub changes: BTreeMap<String, CoordinateChange>,
}

impl Model {
    pub fn new(connection: OddQuasiConnection) -> Self {
        Model { connection, fields: BTreeMap::new(), metric: None, changes: BTreeMap::new() }
    }

    pub fn chart(&self) -> &Chart {
        self.connection.chart()
    }
}

impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        let same_change = |a: &CoordinateChange, b: &CoordinateChange| {
            a.source() == b.source()
                && a.target() == b.target()
                && a.forward() == b.forward()
                && a.inverse_images() == b.inverse_images()
        };
        self.connection == other.connection
            && self.fields == other.fields
            && self.metric == other.metric
            && self.changes.len() == other.changes.len()
            && self.changes.iter().zip(&other.changes).all(|((n, a), (m, b))| n == m && same_change(a, b))
    }
}

/// A token with its 1-based column.
#[derive(Debug, Clone)]
struct Word<'a> {
    text: &'a str,
    col: usize,
}

fn words(line: &str) -> Vec<Word<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Word { text: &line[s..i], col: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Word { text: &line[s..], col: s + 1 });
    }
    out
}

/// Entry keys on the left of `=`, the expression and its column.
struct Entry<'a> {
    line: usize,
    keys: Vec<Word<'a>>,
    expr: &'a str,
    expr_col: usize,
}

fn split_entry<'a>(line_no: usize, line: &'a str, kw_col: usize) -> Result<Entry<'a>, ModelError> {
    let Some(eq) = line.find('=') else {
        return err(line_no, kw_col, "expected `= <expression>`");
    };
    let keys = words(&line[..eq]).into_iter().skip(1).collect();
    let rest = &line[eq + 1..];
    let lead = rest.len() - rest.trim_start().len();
    Ok(Entry { line: line_no, keys, expr: rest.trim(), expr_col: eq + 2 + lead })
}

fn parity_word(w: &Word<'_>, line: usize) -> Result<Parity, ModelError> {
    match w.text {
        "even" => Ok(Parity::Even),
        "odd" => Ok(Parity::Odd),
        other => err(line, w.col, format!("expected `even` or `odd`, found `{other}`")),
    }
}

fn coord(chart: &Chart, w: &Word<'_>, line: usize) -> Result<usize, ModelError> {
    chart.index(w.text).ok_or_else(|| ModelError { line, col: w.col, msg: format!("unknown coordinate `{}`", w.text) })
}

fn expr(chart: &Chart, e: &Entry<'_>) -> Result<GradedPoly, ModelError> {
    parse_expr(chart, e.expr).map_err(|p| ModelError { line: e.line, col: e.expr_col + p.pos, msg: p.msg })
}

fn expect_keys(e: &Entry<'_>, n: usize, what: &str, kw_col: usize) -> Result<(), ModelError> {
    if e.keys.len() != n {
        let col = e.keys.get(n).map_or(kw_col, |w| w.col);
        return err(e.line, col, format!("`{what}` takes {n} names before `=`, found {}", e.keys.len()));
    }
    Ok(())
}

fn require_parity(e: &Entry<'_>, f: &GradedPoly, want: Parity, what: &str) -> Result<(), ModelError> {
    if f.is_zero() {
        return Ok(());
    }
    match f.parity() {
        Some(p) if p == want => Ok(()),
        Some(p) => err(e.line, e.expr_col, format!("{what} must be {want:?}, found {p:?} expression `{}`", e.expr)),
        None => err(e.line, e.expr_col, format!("{what} must be homogeneous of parity {want:?}")),
    }
}

fn duplicate(seen: &mut BTreeMap<String, usize>, key: String, line: usize, col: usize) -> Result<(), ModelError> {
    if let Some(first) = seen.insert(key.clone(), line) {
        return err(line, col, format!("duplicate entry `{key}` (first given on line {first})"));
    }
    Ok(())
}

pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let mut even: Option<(usize, Vec<String>)> = None;
    let mut odd: Option<(usize, Vec<String>)> = None;
    let mut body: Vec<(usize, &str, Word<'_>)> = Vec::new();
    let mut last_line = 1;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("");
        let ws = words(line);
        let Some(kw) = ws.first().cloned() else { continue };
        match kw.text {
            "chart" => {
                let Some(kind) = ws.get(1) else {
                    return err(line_no, kw.col, "expected `chart even ...` or `chart odd ...`");
                };
                let names: Vec<String> = ws[2..].iter().map(|w| w.text.to_string()).collect();
                let slot = match kind.text {
                    "even" => &mut even,
                    "odd" => &mut odd,
                    other => return err(line_no, kind.col, format!("expected `even` or `odd`, found `{other}`")),
                };
                if slot.is_some() {
                    return err(line_no, kw.col, format!("duplicate `chart {}` line", kind.text));
                }
                *slot = Some((line_no, names));
            }
            "rho" | "gamma" | "field" | "metric" | "change" | "inverse" => body.push((line_no, line, kw)),
            other => return err(line_no, kw.col, format!("unknown key `{other}`")),
        }
    }
    let (Some((el, even)), Some((_, odd))) = (even, odd) else {
        return err(last_line, 1, "model needs both `chart even` and `chart odd` lines");
    };
    let chart = ChartSignature::new(even, odd).map_err(|e| ModelError { line: el, col: 1, msg: e.to_string() })?;
    let n = chart.len();
    let p = |i: usize| chart.parity(i);

    let mut seen = BTreeMap::new();
    let mut rho = vec![vec![GradedPoly::zero(&chart); n]; n];
    let mut gamma = vec![GradedPoly::zero(&chart); n * n * n];
    let mut fields: BTreeMap<String, (Parity, Vec<GradedPoly>)> = BTreeMap::new();
    let mut metric: Option<(Vec<Vec<GradedPoly>>, Option<Parity>)> = None;
    let mut forward: BTreeMap<String, Vec<(Entry<'_>, String)>> = BTreeMap::new();
    let mut inverse: BTreeMap<String, Vec<Entry<'_>>> = BTreeMap::new();

    for (line_no, line, kw) in body {
        let e = split_entry(line_no, line, kw.col)?;
        match kw.text {
            "rho" => {
                expect_keys(&e, 2, "rho", kw.col)?;
                let (a, b) = (coord(&chart, &e.keys[0], line_no)?, coord(&chart, &e.keys[1], line_no)?);
                duplicate(&mut seen, format!("rho {} {}", e.keys[0].text, e.keys[1].text), line_no, kw.col)?;
                let v = expr(&chart, &e)?;
                require_parity(&e, &v, p(a) + p(b) + Parity::Odd, "rho entry")?;
                rho[a][b] = v;
            }
            "gamma" => {
                expect_keys(&e, 3, "gamma", kw.col)?;
                let b = coord(&chart, &e.keys[0], line_no)?;
                let a = coord(&chart, &e.keys[1], line_no)?;
                let c = coord(&chart, &e.keys[2], line_no)?;
                let key = format!("gamma {} {} {}", e.keys[0].text, e.keys[1].text, e.keys[2].text);
                duplicate(&mut seen, key, line_no, kw.col)?;
                let v = expr(&chart, &e)?;
                require_parity(&e, &v, p(a) + p(b) + p(c) + Parity::Odd, "gamma entry")?;
                gamma[(b * n + a) * n + c] = v;
            }
            "field" => {
                expect_keys(&e, 3, "field", kw.col)?;
                let name = e.keys[0].text.to_string();
                let par = parity_word(&e.keys[1], line_no)?;
                let a = coord(&chart, &e.keys[2], line_no)?;
                duplicate(&mut seen, format!("field {name} {}", e.keys[2].text), line_no, kw.col)?;
                let slot = fields.entry(name.clone()).or_insert_with(|| (par, vec![GradedPoly::zero(&chart); n]));
                if slot.0 != par {
                    return err(line_no, e.keys[1].col, format!("field `{name}` was declared {:?} before", slot.0));
                }
                let v = expr(&chart, &e)?;
                require_parity(&e, &v, par + p(a), "field component")?;
                slot.1[a] = v;
            }
            "metric" => {
                expect_keys(&e, 2, "metric", kw.col)?;
                let (a, b) = (coord(&chart, &e.keys[0], line_no)?, coord(&chart, &e.keys[1], line_no)?);
                duplicate(&mut seen, format!("metric {} {}", e.keys[0].text, e.keys[1].text), line_no, kw.col)?;
                let v = expr(&chart, &e)?;
                let (comps, par) = metric.get_or_insert_with(|| (vec![vec![GradedPoly::zero(&chart); n]; n], None));
                if !v.is_zero() {
                    let Some(vp) = v.parity() else {
                        return err(line_no, e.expr_col, "metric entry must be homogeneous");
                    };
                    let g = vp + p(a) + p(b);
                    match par {
                        Some(q) if *q != g => {
                            return err(line_no, e.expr_col, format!("metric entry makes G {g:?}, earlier entries make it {q:?}"))
                        }
                        _ => *par = Some(g),
                    }
                }
                comps[a][b] = v;
            }
            "change" => {
                expect_keys(&e, 2, "change", kw.col)?;
                let name = e.keys[0].text.to_string();
                let target = e.keys[1].text.to_string();
                if chart.index(&target).is_some() {
                    return err(line_no, e.keys[1].col, format!("target coordinate `{target}` clashes with the chart"));
                }
                duplicate(&mut seen, format!("change {name} {target}"), line_no, kw.col)?;
                forward.entry(name).or_default().push((e, target));
            }
            _ => {
                expect_keys(&e, 2, "inverse", kw.col)?;
                let name = e.keys[0].text.to_string();
                coord(&chart, &e.keys[1], line_no)?;
                duplicate(&mut seen, format!("inverse {name} {}", e.keys[1].text), line_no, kw.col)?;
                inverse.entry(name).or_default().push(e);
            }
        }
    }

    let rho = OddEndomorphism::new(&chart, rho).map_err(|e| ModelError { line: 1, col: 1, msg: e.to_string() })?;
    let connection = OddQuasiConnection::new(rho, gamma).map_err(|e| ModelError { line: 1, col: 1, msg: e.to_string() })?;
    let mut model = Model::new(connection);
    for (name, (par, comps)) in fields {
        let f = VectorField::with_parity(&chart, comps, par).map_err(|e| ModelError { line: 1, col: 1, msg: e.to_string() })?;
        model.fields.insert(name, f);
    }
    if let Some((comps, par)) = metric {
        let g = Rank2Covariant::new(&chart, comps, par.unwrap_or(Parity::Odd))
            .map_err(|e| ModelError { line: 1, col: 1, msg: e.to_string() })?;
        model.metric = Some(g);
    }
    if let Some((name, lines)) = inverse.iter().find(|(k, _)| !forward.contains_key(*k)) {
        return err(lines[0].line, lines[0].keys[0].col, format!("`inverse {name}` without matching `change {name}` lines"));
    }
    for (name, lines) in forward {
        let change = build_change(&chart, &name, &lines, inverse.get(&name).map(Vec::as_slice).unwrap_or(&[]))?;
        model.changes.insert(name, change);
    }
    Ok(model)
}

fn build_change(
    chart: &Chart,
    name: &str,
    fwd: &[(Entry<'_>, String)],
    inv: &[Entry<'_>],
) -> Result<CoordinateChange, ModelError> {
    let first = &fwd[0].0;
    let mut even = Vec::new();
    let mut odd = Vec::new();
    let mut images = Vec::new();
    for (e, target) in fwd {
        let v = expr(chart, e)?;
        match v.parity() {
            Some(Parity::Even) => even.push(target.clone()),
            Some(Parity::Odd) => odd.push(target.clone()),
            None => return err(e.line, e.expr_col, format!("image of `{target}` must be nonzero and homogeneous")),
        }
        images.push((target.clone(), v));
    }
    let target = ChartSignature::new(even, odd).map_err(|x| ModelError { line: first.line, col: 1, msg: x.to_string() })?;
    let mut forward = vec![GradedPoly::zero(chart); target.len()];
    for (t, v) in images {
        forward[target.index(&t).expect("target name")] = v;
    }
    let mut inverse: Vec<Option<GradedPoly>> = vec![None; chart.len()];
    for e in inv {
        let a = chart.index(e.keys[1].text).expect("checked coordinate");
        inverse[a] = Some(expr(&target, e)?);
    }
    if let Some(a) = inverse.iter().position(Option::is_none) {
        return err(first.line, first.keys[0].col, format!("change `{name}` has no `inverse` line for `{}`", chart.name(a)));
    }
    let inverse = inverse.into_iter().map(Option::unwrap).collect();
    CoordinateChange::new(chart, &target, forward, inverse)
        .map_err(|x| ModelError { line: first.line, col: first.keys[0].col, msg: x.to_string() })
}

/// Canonical text: chart, nonzero ρ and Γ in index order, fields, metric, changes.
pub fn serialize_model(model: &Model) -> String {
    let mut out = String::new();
    let chart = model.chart();
    let _ = writeln!(out, "chart even{}", prefixed(chart.even_names()));
    let _ = writeln!(out, "chart odd{}", prefixed(chart.odd_names()));
    let n = chart.len();
    let name = |i: usize| chart.name(i).to_string();
    let conn = &model.connection;
    for a in 0..n {
        for b in 0..n {
            let v = conn.rho().entry(a, b);
            if !v.is_zero() {
                let _ = writeln!(out, "rho {} {} = {v}", name(a), name(b));
            }
        }
    }
    for b in 0..n {
        for a in 0..n {
            for c in 0..n {
                let v = conn.gamma(b, a, c);
                if !v.is_zero() {
                    let _ = writeln!(out, "gamma {} {} {} = {v}", name(b), name(a), name(c));
                }
            }
        }
    }
    for (fname, f) in &model.fields {
        let par = match f.parity() {
            Some(Parity::Odd) => "odd",
            _ => "even",
        };
        for (a, v) in f.comps().iter().enumerate() {
            if !v.is_zero() || (a == 0 && f.is_zero()) {
                let _ = writeln!(out, "field {fname} {par} {} = {v}", name(a));
            }
        }
    }
    if let Some(g) = &model.metric {
        let mut any = false;
        for a in 0..n {
            for b in 0..n {
                let v = g.comp(a, b);
                if !v.is_zero() {
                    any = true;
                    let _ = writeln!(out, "metric {} {} = {v}", name(a), name(b));
                }
            }
        }
        if !any {
            let _ = writeln!(out, "metric {} {} = 0", name(0), name(0));
        }
    }
    for (cname, c) in &model.changes {
        for (b, v) in c.forward().iter().enumerate() {
            let _ = writeln!(out, "change {cname} {} = {v}", c.target().name(b));
        }
        for (a, v) in c.inverse_images().iter().enumerate() {
            let _ = writeln!(out, "inverse {cname} {} = {v}", name(a));
        }
    }
    out
}

fn prefixed(names: &[String]) -> String {
    names.iter().fold(String::new(), |mut s, n| {
        s.push(' ');
        s.push_str(n);
        s
    })
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_model(self))
    }
}
