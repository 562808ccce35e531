use oddconn::catalog::{canonical_rnn, library_changes, rnn_chart};
use oddconn::connection::{AffineConnection, BanalTensor, OddEndomorphism, OddInvolution, OddQuasiConnection};
use oddconn::sample::Sampler;
use oddconn::{q, qq, Chart, ChartSignature, GradedPoly, MixedTensor, OneForm, Parity, VectorField};

fn charts() -> Vec<Chart> {
    vec![rnn_chart(1).unwrap(), rnn_chart(2).unwrap()]
}

fn r12() -> Chart {
    ChartSignature::new(["t"], ["th1", "th2"]).unwrap()
}

#[test]
fn axioms_hold_for_random_data() {
    let mut s = Sampler::new(1);
    for chart in charts().into_iter().chain([r12()]) {
        for _ in 0..12 {
            let conn = if chart.is_square() && s.rng_bool() { s.odd_connection(&chart) } else { s.quasi_connection(&chart) };
            let (x, y) = (s.any_vector(&chart), s.any_vector(&chart));
            let (f, _) = s.function(&chart);
            assert!(conn.axioms_check(&x, &y, &f).unwrap().is_empty());
        }
    }
}

#[test]
fn torsion_and_curvature_symmetries() {
    let mut s = Sampler::new(2);
    for chart in charts() {
        for _ in 0..10 {
            let conn = s.odd_connection(&chart);
            let (x, y, z) = (s.any_vector(&chart), s.any_vector(&chart), s.any_vector(&chart));
            let (px, py, pz) = (x.parity().unwrap(), y.parity().unwrap(), z.parity().unwrap());
            let t = conn.torsion(&x, &y).unwrap();
            assert_eq!(t, conn.torsion(&y, &x).unwrap().signed(px * py));
            if !t.is_zero() {
                assert_eq!(VectorField::new(&chart, t.comps().to_vec()).unwrap().parity(), Some(px + py + Parity::Odd));
            }
            let r = conn.curvature(&x, &y, &z).unwrap();
            let flip = (px + Parity::Odd) * (py + Parity::Odd) + Parity::Odd;
            assert_eq!(r, conn.curvature(&y, &x, &z).unwrap().signed(flip));
            if !r.is_zero() {
                assert_eq!(VectorField::new(&chart, r.comps().to_vec()).unwrap().parity(), Some(px + py + pz));
            }
            let (f, pf) = s.function(&chart);
            let lhs = conn.curvature(&x, &y, &z.scale_left(&f)).unwrap();
            assert_eq!(lhs, r.scale_left(&f).signed((px + py) * pf));
        }
    }
}

#[test]
fn tensoriality_dichotomy() {
    let mut s = Sampler::new(3);
    for chart in charts() {
        for _ in 0..6 {
            let conn = s.odd_connection(&chart);
            let zero = OddQuasiConnection::new(OddEndomorphism::zero(&chart), s.gamma(&chart, Parity::Odd)).unwrap();
            for c in [&conn, &zero] {
                let (x, y, z) = (s.any_vector(&chart), s.any_vector(&chart), s.any_vector(&chart));
                let (f, _) = s.function(&chart);
                let an = c.tensoriality_anomalies(&x, &y, &z, &f).unwrap();
                assert!(an.vanish());
            }
        }
        for _ in 0..4 {
            let conn = s.quasi_connection(&chart);
            let mut witnessed = false;
            for _ in 0..16 {
                let (x, y, z) = (s.any_vector(&chart), s.any_vector(&chart), s.any_vector(&chart));
                let (f, _) = s.function(&chart);
                let an = conn.tensoriality_anomalies(&x, &y, &z, &f).unwrap();
                assert!(an.match_expected());
                witnessed |= !an.vanish();
            }
            assert!(witnessed);
        }
    }
}

#[test]
fn bianchi_identity_and_torsion_free_corollary() {
    let mut s = Sampler::new(4);
    for chart in charts() {
        for _ in 0..6 {
            let conn = s.odd_connection(&chart);
            let (x, y, z) = (s.any_vector(&chart), s.any_vector(&chart), s.any_vector(&chart));
            assert!(conn.bianchi(&x, &y, &z).unwrap().holds());
        }
        // torsion-free: constant ρ and Γ_{ba} = -(-1)^{ãb̃} Γ_{ab}
        let n = chart.len();
        let raw = s.gamma(&chart, Parity::Odd);
        let rho = OddInvolution::swap(&chart).unwrap().into_inner();
        let probe = OddQuasiConnection::new(rho.clone(), raw.clone()).unwrap();
        let conn = OddQuasiConnection::from_fn(rho, |b, a, c| {
            let sw = chart.parity(a) * chart.parity(b);
            (&raw[probe.gamma_index(b, a, c)] - &raw[probe.gamma_index(a, b, c)].signed(sw)).scale(&qq(1, 2))
        })
        .unwrap();
        for a in 0..n {
            for b in 0..n {
                assert!(conn.torsion(&VectorField::basis(&chart, a), &VectorField::basis(&chart, b)).unwrap().is_zero());
            }
        }
        for _ in 0..4 {
            let (x, y, z) = (s.any_vector(&chart), s.any_vector(&chart), s.any_vector(&chart));
            let sides = conn.bianchi(&x, &y, &z).unwrap();
            assert!(sides.holds());
            assert!(sides.lhs.is_zero());
        }
    }
}

#[test]
fn induce_extract_round_trips() {
    let mut s = Sampler::new(5);
    for chart in charts() {
        for _ in 0..8 {
            let affine = s.affine(&chart);
            let rho = s.involution(&chart);
            let odd = affine.induce(&rho).unwrap();
            assert!(odd.is_odd_connection());
            assert_eq!(AffineConnection::extract(&odd).unwrap(), affine);
            let conn = OddQuasiConnection::new(rho.endomorphism().clone(), s.gamma(&chart, Parity::Odd)).unwrap();
            assert_eq!(AffineConnection::extract(&conn).unwrap().induce(&rho).unwrap(), conn);
            // ∇_X Y = ∇̄_{ρ(X)} Y
            let (x, y) = (s.mixed_vector(&chart), s.mixed_vector(&chart));
            assert_eq!(odd.nabla(&x, &y).unwrap(), affine.nabla(&rho.apply(&x).unwrap(), &y).unwrap());
            let (f, _) = s.function(&chart);
            let (xh, yh) = (s.any_vector(&chart), s.any_vector(&chart));
            assert!(affine.axioms_check(&xh, &yh, &f).unwrap().is_empty());
        }
        let conn = s.quasi_connection(&chart);
        assert!(AffineConnection::extract(&conn).is_err());
    }
}

#[test]
fn banal_differences_and_combinations() {
    let mut s = Sampler::new(6);
    for chart in charts() {
        let rho = s.involution(&chart).into_inner();
        let c1 = OddQuasiConnection::new(rho.clone(), s.gamma(&chart, Parity::Odd)).unwrap();
        let c2 = OddQuasiConnection::new(rho, s.gamma(&chart, Parity::Odd)).unwrap();
        let b = BanalTensor::difference(&c1, &c2).unwrap();
        for _ in 0..6 {
            let (x, y) = (s.any_vector(&chart), s.any_vector(&chart));
            let (f, _) = s.function(&chart);
            assert!(b.bilinearity_check(&x, &y, &f).unwrap().is_empty());
            assert_eq!(b.apply(&x, &y).unwrap(), &c1.nabla(&x, &y).unwrap() - &c2.nabla(&x, &y).unwrap());
        }
        let other = s.odd_connection(&chart);
        assert!(BanalTensor::difference(&c1, &other).is_err() || c1.rho() == other.rho());
        let t = qq(1, 3);
        let mix = c1.affine_combination(&other, &t).unwrap();
        let cd = c1.rho().clifford_dirac(other.rho()).unwrap();
        if cd {
            assert!(mix.is_odd_connection());
        }
        let (x, y) = (s.any_vector(&chart), s.any_vector(&chart));
        let (f, _) = s.function(&chart);
        assert!(mix.axioms_check(&x, &y, &f).unwrap().is_empty());
    }
    // swap and its negative anticommute to -2, so the midpoint is not an involution
    let (c, _) = canonical_rnn(1).unwrap();
    let neg = OddQuasiConnection::flat(c.rho().scale(&q(-1)));
    assert!(!c.affine_combination(&neg, &qq(1, 2)).unwrap().is_odd_connection());
}

fn as_vector_tensor(y: &VectorField) -> MixedTensor {
    MixedTensor::new(y.chart(), 0, 1, y.comps().to_vec()).unwrap()
}

fn as_form_tensor(a: &OneForm) -> MixedTensor {
    MixedTensor::new(a.chart(), 1, 0, a.comps().to_vec()).unwrap()
}

#[test]
fn oneform_derivative_respects_duality() {
    let mut s = Sampler::new(7);
    for chart in charts() {
        for _ in 0..8 {
            let conn = s.odd_connection(&chart);
            let x = s.any_vector(&chart);
            let y = s.any_vector(&chart);
            let p = s.parity();
            let a = s.oneform(&chart, p);
            let (px, py) = (x.parity().unwrap(), y.parity().unwrap());
            let lhs = conn.nabla_function(&x, &y.pairing(&a).unwrap()).unwrap();
            let rhs = &conn.nabla(&x, &y).unwrap().pairing(&a).unwrap()
                + &y.pairing(&conn.nabla_oneform(&x, &a).unwrap()).unwrap().signed((px + Parity::Odd) * py);
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn tensor_derivative_oracles() {
    let mut s = Sampler::new(8);
    for chart in charts() {
        for _ in 0..4 {
            let conn = s.odd_connection(&chart);
            let x = s.any_vector(&chart);
            // vector fields and one-forms seen as tensors
            let y = s.any_vector(&chart);
            assert_eq!(conn.nabla_tensor(&x, &as_vector_tensor(&y)).unwrap(), as_vector_tensor(&conn.nabla(&x, &y).unwrap()));
            let p = s.parity();
            let a = s.oneform(&chart, p);
            assert_eq!(conn.nabla_tensor(&x, &as_form_tensor(&a)).unwrap(), as_form_tensor(&conn.nabla_oneform(&x, &a).unwrap()));
            // the identity (1,1) tensor is parallel
            assert!(conn.nabla_tensor(&x, &MixedTensor::identity(&chart)).unwrap().is_zero());

            // definition evaluated on random arguments
            for (p, qv) in [(1usize, 1usize), (2, 0), (0, 2), (2, 1)] {
                let pt = s.parity();
                let t = s.tensor(&chart, p, qv, pt);
                let nt = conn.nabla_tensor(&x, &t).unwrap();
                let ys: Vec<VectorField> = (0..p).map(|_| s.any_vector(&chart)).collect();
                let alphas: Vec<OneForm> = (0..qv)
                    .map(|_| {
                        let pa = s.parity();
                        s.oneform(&chart, pa)
                    })
                    .collect();
                let px = x.parity().unwrap();
                let tw = px + Parity::Odd;
                let ysum = |from: usize| ys[from..].iter().fold(Parity::Even, |acc, y| acc + y.parity().unwrap());
                let mut want = conn.nabla_function(&x, &t.evaluate(&ys, &alphas).unwrap()).unwrap().signed(tw * ysum(0));
                for i in 0..p {
                    let mut args = ys.clone();
                    args[i] = conn.nabla(&x, &ys[i]).unwrap();
                    want -= &t.evaluate(&args, &alphas).unwrap().signed(tw * ysum(i));
                }
                let mut before = pt;
                for j in 0..qv {
                    let mut args = alphas.clone();
                    args[j] = conn.nabla_oneform(&x, &alphas[j]).unwrap();
                    want -= &t.evaluate(&ys, &args).unwrap().signed(tw * before);
                    before = before + alphas[j].parity().unwrap();
                }
                assert_eq!(nt.evaluate(&ys, &alphas).unwrap(), want, "valence ({p},{qv})");
            }
        }
    }
}

#[test]
fn tensor_evaluation_commutes_with_coordinate_change() {
    let mut s = Sampler::new(9);
    for chart in charts() {
        for (name, change) in library_changes(&chart).unwrap() {
            for (p, qv) in [(1usize, 1usize), (2, 0), (0, 2), (2, 1), (1, 2)] {
                let pt = s.parity();
                let t = s.tensor(&chart, p, qv, pt);
                let ys: Vec<VectorField> = (0..p).map(|_| s.any_vector(&chart)).collect();
                let alphas: Vec<OneForm> = (0..qv)
                    .map(|_| {
                        let pa = s.parity();
                        s.oneform(&chart, pa)
                    })
                    .collect();
                let here = change.to_target(&t.evaluate(&ys, &alphas).unwrap()).unwrap();
                let ys2: Vec<VectorField> = ys.iter().map(|y| change.transform_vector(y).unwrap()).collect();
                let as2: Vec<OneForm> = alphas.iter().map(|a| change.transform_oneform(a).unwrap()).collect();
                let there = t.transform(&change).unwrap().evaluate(&ys2, &as2).unwrap();
                assert_eq!(here, there, "{name} ({p},{qv})");
            }
        }
    }
}

fn rank_one_one_closed_form(conn: &OddQuasiConnection, x: &VectorField, t: &MixedTensor, literal_sign: bool) -> Vec<GradedPoly> {
    let chart = conn.chart();
    let n = chart.len();
    let px = x.parity().unwrap();
    let pt = t.parity().unwrap();
    let p = |i: usize| chart.parity(i);
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let mut acc = GradedPoly::zero(chart);
            for c in 0..n {
                let tc = if literal_sign { Parity::Even } else { pt };
                for d in 0..n {
                    let mut inner = (conn.rho().entry(c, d) * &t.get(&[a, b]).partial(d)).signed(p(a) + p(c));
                    inner -= &(conn.gamma(a, c, d) * t.get(&[d, b])).signed(p(a) + p(c));
                    let sign = pt + p(c) * (tc + p(a) + p(d) + Parity::Odd) + p(d);
                    inner += &(t.get(&[a, d]) * conn.gamma(d, c, b)).signed(sign);
                    acc += &(x.comp(c) * &inner);
                }
            }
            out.push(acc.signed(px * (p(a) + Parity::Odd)));
        }
    }
    out
}

#[test]
fn closed_form_for_mixed_rank_one_tensor() {
    let mut s = Sampler::new(10);
    let mut literal_misses = 0;
    for chart in charts() {
        for i in 0..12 {
            let conn = s.odd_connection(&chart);
            let x = s.any_vector(&chart);
            let pt = if i % 2 == 0 { Parity::Even } else { Parity::Odd };
            let t = s.tensor(&chart, 1, 1, pt);
            let nt = conn.nabla_tensor(&x, &t).unwrap();
            assert_eq!(nt.comps(), &rank_one_one_closed_form(&conn, &x, &t, false)[..]);
            let literal = rank_one_one_closed_form(&conn, &x, &t, true);
            if pt == Parity::Even {
                assert_eq!(nt.comps(), &literal[..]);
            } else if nt.comps() != &literal[..] {
                literal_misses += 1;
            }
        }
    }
    // the written sign c̃(ã+d̃+1) drops the factor from moving X^c past an odd T
    assert!(literal_misses > 0);
}

#[test]
fn divergence_leibniz_and_invariance() {
    let mut s = Sampler::new(11);
    for chart in charts() {
        for _ in 0..8 {
            let conn = s.odd_connection(&chart);
            let x = s.any_vector(&chart);
            let (f, pf) = s.function(&chart);
            let px = x.parity().unwrap();
            let lhs = conn.odd_divergence(&x.scale_left(&f)).unwrap();
            let rhs = &(&f * &conn.odd_divergence(&x).unwrap()).signed(pf)
                + &conn.rho().apply(&x).unwrap().apply(&f).signed(px * pf);
            assert_eq!(lhs, rhs);
            for (name, change) in library_changes(&chart).unwrap() {
                let (a, b) = conn.divergence_in_both_charts(&change, &x).unwrap();
                assert_eq!(a, b, "{name}");
            }
        }
    }
}

#[test]
fn torsion_and_curvature_transform_as_tensors() {
    let mut s = Sampler::new(12);
    for chart in charts() {
        for (name, change) in library_changes(&chart).unwrap() {
            let conn = s.odd_connection(&chart);
            let moved = conn.transform(&change).unwrap();
            let (x, y, z) = (s.any_vector(&chart), s.any_vector(&chart), s.any_vector(&chart));
            let tv = |v: &VectorField| change.transform_vector(v).unwrap();
            assert_eq!(tv(&conn.torsion(&x, &y).unwrap()), moved.torsion(&tv(&x), &tv(&y)).unwrap(), "{name}");
            assert_eq!(
                tv(&conn.curvature(&x, &y, &z).unwrap()),
                moved.curvature(&tv(&x), &tv(&y), &tv(&z)).unwrap(),
                "{name}"
            );
            // ρ transforms as a vector-valued map
            assert_eq!(tv(&conn.rho().apply(&x).unwrap()), moved.rho().apply(&tv(&x)).unwrap(), "{name}");
        }
    }
}

#[test]
fn errors_on_mismatched_charts() {
    let (c1, _) = canonical_rnn(1).unwrap();
    let (c2, _) = canonical_rnn(2).unwrap();
    let x = VectorField::basis(c2.chart(), 0);
    assert!(c1.nabla(&x, &x).is_err());
    assert!(c1.torsion(&x, &x).is_err());
    assert!(c1.odd_divergence(&x).is_err());
    assert!(OddInvolution::swap(&r12()).is_err());
    let non = OddQuasiConnection::flat(OddEndomorphism::swap(c1.chart()).unwrap().scale(&q(2)));
    let y = VectorField::basis(c1.chart(), 0);
    assert!(non.bianchi(&y, &y, &y).is_err());
}

#[test]
fn metric_compatibility_examples() {
    use oddconn::catalog::{induced_odd_metric, named_frame, weitzenbock};
    use oddconn::connection::Rank2Covariant;
    let mut s = Sampler::new(13);
    let (conn, _) = canonical_rnn(1).unwrap();
    let chart = conn.chart().clone();
    let t = GradedPoly::coord(&chart, 0);
    let z = GradedPoly::zero(&chart);
    let g = Rank2Covariant::new(&chart, vec![vec![z.clone(), t.clone()], vec![t, z]], Parity::Odd).unwrap();
    let samples: Vec<_> = (0..8).map(|_| (s.any_vector(&chart), s.any_vector(&chart), s.any_vector(&chart))).collect();
    assert!(conn.metric_compatibility_check(&Rank2Covariant::zero(&chart, Parity::Odd), &samples).unwrap().is_empty());
    assert!(!conn.metric_compatibility_check(&g, &samples).unwrap().is_empty());
    for id in ["susy-r11", "twisted-r22"] {
        let par = named_frame(id).unwrap();
        let w = weitzenbock(&par, &par.involution().unwrap()).unwrap();
        let metric = induced_odd_metric(&par).unwrap();
        let ch = par.chart().clone();
        let samples: Vec<_> = (0..8).map(|_| (s.any_vector(&ch), s.any_vector(&ch), s.any_vector(&ch))).collect();
        assert!(w.metric_compatibility_check(&metric, &samples).unwrap().is_empty(), "{id}");
    }
}
