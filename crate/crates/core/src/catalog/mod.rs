//! Built-in connections, frames, gamma matrices and coordinate changes.

mod changes;
mod frame;
mod gamma;

use std::sync::OnceLock;

use crate::connection::{OddInvolution, OddQuasiConnection, Rank2Covariant};
use crate::error::{Error, Result};
use crate::geometry::VectorField;
use crate::grassmann::{qq, Chart, ChartSignature, GradedPoly};

pub use changes::{change_names, library_change, library_changes, primed_chart};
pub use frame::{
    block_diagonal, induced_odd_metric, vierbein_christoffel, weitzenbock, Parallelisation, VierbeinSigns,
};
pub use gamma::{build_gamma, kron, mat_add, mat_inverse, mat_mul, transpose, GammaData, Matrix};

/// `ℝ^{n|n}` with coordinates `t | theta` for `n = 1` and `x1..xn | xi1..xin` otherwise.
pub fn rnn_chart(n: usize) -> Result<Chart> {
    if n == 1 {
        return ChartSignature::new(["t"], ["theta"]);
    }
    ChartSignature::new((1..=n).map(|i| format!("x{i}")), (1..=n).map(|i| format!("xi{i}")))
}

/// Coordinate swap `∂_{x^a} ↔ ∂_{ξ^a}` with all Christoffel symbols zero.
pub fn canonical_rnn(n: usize) -> Result<(OddQuasiConnection, OddInvolution)> {
    if n == 0 {
        return Err(Error::InvalidChart("canonical connection needs n >= 1".into()));
    }
    let chart = rnn_chart(n)?;
    let rho = OddInvolution::swap(&chart)?;
    Ok((OddQuasiConnection::flat(rho.endomorphism().clone()), rho))
}

/// `P = ∂_t`, `D = ∂_θ - θ∂_t`.
pub fn susy_r11_frame() -> Parallelisation {
    let chart = rnn_chart(1).expect("chart");
    let theta = GradedPoly::coord(&chart, 1);
    let p = VectorField::basis(&chart, 0);
    let d = VectorField::new(&chart, vec![-&theta, GradedPoly::one(&chart)]).expect("D");
    Parallelisation::new(&chart, vec![p, d]).expect("SUSY frame")
}

/// Weitzenböck connection of `{P, D}` with `ρ(P) = D`, `ρ(D) = P`.
pub fn susy_r11() -> (OddQuasiConnection, Parallelisation) {
    let par = susy_r11_frame();
    let rho = par.involution().expect("frame involution");
    (weitzenbock(&par, &rho).expect("SUSY connection"), par)
}

/// `x0..x3 | th1..th4`.
pub fn smink_chart() -> Chart {
    ChartSignature::new(["x0", "x1", "x2", "x3"], ["th1", "th2", "th3", "th4"]).expect("chart")
}

/// `P_μ = ∂_μ`, `D^α = ∂/∂θ_α - ¼ θ_β (Cγ^μ)^{βα} ∂_μ`.
pub fn smink_frame(g: &GammaData) -> Parallelisation {
    let chart = smink_chart();
    let mut frame: Vec<VectorField> = (0..4).map(|mu| VectorField::basis(&chart, mu)).collect();
    let cg: Vec<Matrix> = (0..4).map(|mu| g.c_gamma(mu)).collect();
    for al in 0..4 {
        let mut comps = vec![GradedPoly::zero(&chart); 8];
        comps[4 + al] = GradedPoly::one(&chart);
        for (mu, m) in cg.iter().enumerate() {
            for be in 0..4 {
                let c = &m[be][al] * qq(-1, 4);
                if c != qq(0, 1) {
                    comps[mu] += &GradedPoly::coord(&chart, 4 + be).scale(&c);
                }
            }
        }
        frame.push(VectorField::new(&chart, comps).expect("D"));
    }
    Parallelisation::new(&chart, frame).expect("SUSY frame")
}

/// `[D^α, D^β] - (-½(Cγ^μ)^{αβ} P_μ)`, `[P_μ, D^α]` and `[P_μ, P_ν]` for every pair that is nonzero.
pub fn smink_algebra_defects(par: &Parallelisation, g: &GammaData) -> Vec<(usize, usize, VectorField)> {
    let z = par.frame();
    let mut out = Vec::new();
    for i in 0..8 {
        for j in i..8 {
            let br = z[i].bracket(&z[j]).expect("bracket");
            let want = if i >= 4 {
                let mut w = VectorField::zero(par.chart());
                for mu in 0..4 {
                    let c = &g.c_gamma(mu)[i - 4][j - 4] * qq(-1, 2);
                    w = &w + &z[mu].scale(&c);
                }
                w
            } else {
                VectorField::zero(par.chart())
            };
            let d = &br - &want;
            if !d.is_zero() {
                out.push((i, j, d));
            }
        }
    }
    out
}

struct Smink {
    connection: OddQuasiConnection,
    frame: Parallelisation,
    gamma: GammaData,
}

fn smink_cached() -> &'static Smink {
    static CELL: OnceLock<Smink> = OnceLock::new();
    CELL.get_or_init(|| {
        let gamma = build_gamma();
        let frame = smink_frame(&gamma);
        let defects = smink_algebra_defects(&frame, &gamma);
        assert!(defects.is_empty(), "super-translation algebra fails: {defects:?}");
        let rho = frame.involution().expect("frame involution");
        let connection = weitzenbock(&frame, &rho).expect("SUSY connection");
        Smink { connection, frame, gamma }
    })
}

/// The SUSY odd connection, its frame `{P_μ, D^α}` and the gamma matrices used.
pub fn smink44() -> (OddQuasiConnection, Parallelisation, GammaData) {
    let s = smink_cached();
    (s.connection.clone(), s.frame.clone(), s.gamma.clone())
}

/// `Div X = D^{μ+1}(X^μ) - (-1)^{X̃} P_{α-1}(X_α)` with `X` split into frame components.
pub fn smink_divergence(x: &VectorField) -> Result<GradedPoly> {
    smink_cached().frame.frame_divergence(x)
}

/// Parallelisations addressable as `weitzenbock:<id>`.
pub const FRAME_IDS: &[&str] = &["coordinate-r11", "susy-r11", "coordinate-r22", "twisted-r22", "smink44"];

pub fn named_frame(id: &str) -> Result<Parallelisation> {
    match id {
        "coordinate-r11" => Ok(Parallelisation::coordinate(&rnn_chart(1)?)),
        "susy-r11" => Ok(susy_r11_frame()),
        "coordinate-r22" => Ok(Parallelisation::coordinate(&rnn_chart(2)?)),
        "twisted-r22" => {
            let chart = rnn_chart(2)?;
            let e = |s: &str| crate::expr::parse_expr(&chart, s);
            let rows = [["1", "0", "0", "0"], ["x1^2 + xi1*xi2", "1", "0", "0"], ["xi1", "0", "1", "0"], ["0", "xi1", "x2", "1"]];
            let frame = rows
                .iter()
                .map(|r| VectorField::new(&chart, r.iter().map(|s| e(s)).collect::<std::result::Result<_, _>>()?))
                .collect::<Result<Vec<_>>>()?;
            Parallelisation::new(&chart, frame)
        }
        "smink44" => Ok(smink_cached().frame.clone()),
        _ => Err(Error::UnknownEntry(format!("weitzenbock:{id}"))),
    }
}

/// A catalog connection with the frame and odd metric it comes with, if any.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub connection: OddQuasiConnection,
    pub frame: Option<Parallelisation>,
    pub metric: Option<Rank2Covariant>,
}

fn framed(name: &str, description: String, connection: OddQuasiConnection, par: Parallelisation) -> Result<CatalogEntry> {
    let metric = induced_odd_metric(&par)?;
    Ok(CatalogEntry { name: name.to_string(), description, connection, frame: Some(par), metric: Some(metric) })
}

/// Entry names, with `canonical-rnn:<n>` standing for any `n ≥ 1`.
pub fn entry_names() -> Vec<String> {
    let mut out = vec!["canonical-r11".to_string(), "canonical-rnn:<n>".to_string(), "susy-r11".into(), "smink44".into()];
    out.extend(FRAME_IDS.iter().map(|id| format!("weitzenbock:{id}")));
    out
}

pub fn lookup(name: &str) -> Result<CatalogEntry> {
    if name == "canonical-r11" || name.starts_with("canonical-rnn:") {
        let n = if name == "canonical-r11" {
            1
        } else {
            name["canonical-rnn:".len()..].parse::<usize>().map_err(|_| Error::UnknownEntry(name.to_string()))?
        };
        let (connection, _) = canonical_rnn(n)?;
        let par = Parallelisation::coordinate(connection.chart());
        return framed(name, format!("canonical odd connection on R^{n}|{n}"), connection, par);
    }
    match name {
        "susy-r11" => {
            let (c, par) = susy_r11();
            framed(name, "SUSY odd connection on R^1|1 from the frame {P, D}".into(), c, par)
        }
        "smink44" => {
            let s = smink_cached();
            framed(name, "SUSY odd connection on super-Minkowski R^4|4".into(), s.connection.clone(), s.frame.clone())
        }
        _ => match name.strip_prefix("weitzenbock:") {
            Some(id) => {
                let par = named_frame(id)?;
                let rho = par.involution()?;
                let c = weitzenbock(&par, &rho)?;
                framed(name, format!("odd Weitzenbock connection of the `{id}` frame"), c, par)
            }
            None => Err(Error::UnknownEntry(name.to_string())),
        },
    }
}
