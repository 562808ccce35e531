use crate::error::{Error, Result};
use crate::expr::parse_expr;
use crate::geometry::CoordinateChange;
use crate::grassmann::{Chart, ChartSignature};

struct Template {
    name: &'static str,
    min_even: usize,
    min_odd: usize,
    /// Returns `(forward, inverse)` edits as `(index, expression)` over source and target names.
    edits: fn(&Names, &Names) -> (Vec<(usize, String)>, Vec<(usize, String)>),
}

struct Names {
    even: Vec<String>,
    odd: Vec<String>,
}

impl Names {
    fn of(chart: &Chart) -> Self {
        Names { even: chart.even_names().to_vec(), odd: chart.odd_names().to_vec() }
    }
}

const TEMPLATES: &[Template] = &[
    Template {
        name: "affine-scale",
        min_even: 0,
        min_odd: 0,
        edits: |s, t| {
            let e = s.even.len();
            let mut fwd = Vec::new();
            let mut inv = Vec::new();
            for i in 0..e {
                fwd.push((i, format!("{}*{} + 1", i + 2, s.even[i])));
                inv.push((i, format!("1/{k}*{} - 1/{k}", t.even[i], k = i + 2)));
            }
            for j in 0..s.odd.len() {
                fwd.push((e + j, format!("{}*{}", j + 3, s.odd[j])));
                inv.push((e + j, format!("1/{}*{}", j + 3, t.odd[j])));
            }
            (fwd, inv)
        },
    },
    Template {
        name: "even-mix",
        min_even: 2,
        min_odd: 0,
        edits: |s, t| {
            (vec![(0, format!("{} + 2*{}", s.even[0], s.even[1]))], vec![(0, format!("{} - 2*{}", t.even[0], t.even[1]))])
        },
    },
    Template {
        name: "odd-mix",
        min_even: 0,
        min_odd: 2,
        edits: |s, t| {
            let e = s.even.len();
            (
                vec![(e, format!("{} - {}", s.odd[0], s.odd[1])), (e + 1, format!("3*{}", s.odd[1]))],
                vec![(e, format!("{} + 1/3*{}", t.odd[0], t.odd[1])), (e + 1, format!("1/3*{}", t.odd[1]))],
            )
        },
    },
    Template {
        name: "even-square",
        min_even: 2,
        min_odd: 0,
        edits: |s, t| {
            (
                vec![(0, format!("{} + {}^2", s.even[0], s.even[1])), (1, format!("{} + 1", s.even[1]))],
                vec![
                    (0, format!("{} - {y}^2 + 2*{y} - 1", t.even[0], y = t.even[1])),
                    (1, format!("{} - 1", t.even[1])),
                ],
            )
        },
    },
    Template {
        name: "nil-shear",
        min_even: 1,
        min_odd: 2,
        edits: |s, t| {
            (
                vec![(0, format!("{} + {}*{}", s.even[0], s.odd[0], s.odd[1]))],
                vec![(0, format!("{} - {}*{}", t.even[0], t.odd[0], t.odd[1]))],
            )
        },
    },
    Template {
        name: "odd-shear",
        min_even: 2,
        min_odd: 2,
        edits: |s, t| {
            let e = s.even.len();
            (
                vec![
                    (0, format!("{} + {}*{}", s.even[0], s.odd[0], s.odd[1])),
                    (e, format!("{} + {}*{}", s.odd[0], s.even[1], s.odd[1])),
                ],
                vec![
                    (0, format!("{} - {}*{}", t.even[0], t.odd[0], t.odd[1])),
                    (e, format!("{} - {}*{}", t.odd[0], t.even[1], t.odd[1])),
                ],
            )
        },
    },
    Template {
        name: "odd-twist",
        min_even: 1,
        min_odd: 2,
        edits: |s, t| {
            let e = s.even.len();
            (
                vec![(e, format!("{} + {}*{}", s.odd[0], s.even[0], s.odd[1]))],
                vec![(e, format!("{} - {}*{}", t.odd[0], t.even[0], t.odd[1]))],
            )
        },
    },
];

/// Chart with every coordinate name suffixed by `_p`.
pub fn primed_chart(chart: &Chart) -> Result<Chart> {
    let prime = |v: &[String]| v.iter().map(|n| format!("{n}_p")).collect::<Vec<_>>();
    ChartSignature::new(prime(chart.even_names()), prime(chart.odd_names()))
}

fn instantiate(template: &Template, chart: &Chart) -> Result<CoordinateChange> {
    let target = primed_chart(chart)?;
    let (fwd_edits, inv_edits) = (template.edits)(&Names::of(chart), &Names::of(&target));
    let n = chart.len();
    let mut fwd: Vec<String> = chart.names().map(str::to_string).collect();
    let mut inv: Vec<String> = target.names().map(str::to_string).collect();
    for (i, e) in fwd_edits {
        fwd[i] = e;
    }
    for (i, e) in inv_edits {
        inv[i] = e;
    }
    let fwd = (0..n).map(|i| parse_expr(chart, &fwd[i])).collect::<std::result::Result<Vec<_>, _>>()?;
    let inv = (0..n).map(|i| parse_expr(&target, &inv[i])).collect::<std::result::Result<Vec<_>, _>>()?;
    CoordinateChange::new(chart, &target, fwd, inv)
}

/// Names of all library changes.
pub fn change_names() -> Vec<&'static str> {
    TEMPLATES.iter().map(|t| t.name).collect()
}

/// Every library change whose dimension requirements the chart meets.
pub fn library_changes(chart: &Chart) -> Result<Vec<(&'static str, CoordinateChange)>> {
    TEMPLATES
        .iter()
        .filter(|t| chart.even_dim() >= t.min_even && chart.odd_dim() >= t.min_odd)
        .map(|t| Ok((t.name, instantiate(t, chart)?)))
        .collect()
}

pub fn library_change(chart: &Chart, name: &str) -> Result<CoordinateChange> {
    let t = TEMPLATES.iter().find(|t| t.name == name).ok_or_else(|| Error::UnknownEntry(name.to_string()))?;
    if chart.even_dim() < t.min_even || chart.odd_dim() < t.min_odd {
        return Err(Error::InvalidChange(format!(
            "`{name}` needs at least {}|{} coordinates",
            t.min_even, t.min_odd
        )));
    }
    instantiate(t, chart)
}
