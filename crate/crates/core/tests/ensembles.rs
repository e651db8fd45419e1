mod common;

use common::gl_integrate;
use ordeig::ensembles::{kernel_form, normalization_check, EnsembleModel};
use ordeig::{EigenDistribution, Error};

fn models() -> Vec<EnsembleModel> {
    [
        "uncorrelated-wishart M=3 n=5",
        "gue M=4",
        "beta M=3 m=2 n=1",
        "spiked-wishart M=3 n=4 sigma1=2.5 sigma2=0.7",
        "correlated-wishart p=3 n=5 phi=3,1.5,0.5 mult=1,2,2",
        "correlated-wishart p=4 n=2 phi=2,1 mult=1,1",
        "noncentral-wishart M=3 n=4 mu=3,1",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect()
}

struct Lcg(u64);
impl Lcg {
    fn next(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn random_segment(rng: &mut Lcg, support: (f64, f64)) -> (f64, f64) {
    let (a, b) = match support {
        (lo, hi) if lo.is_infinite() && hi.is_infinite() => {
            (-4.0 + 8.0 * rng.next(), -4.0 + 8.0 * rng.next())
        }
        (_, hi) if hi.is_infinite() => (12.0 * rng.next(), 12.0 * rng.next()),
        _ => (rng.next(), rng.next()),
    };
    let (a, b) = (a.min(b), a.max(b));
    // every fifth segment runs to a support end
    match (rng.next() * 5.0) as usize {
        0 => (support.0, b),
        1 => (a, support.1),
        _ => (a, b),
    }
}

#[test]
fn segment_closed_forms_agree_with_quadrature() {
    let mut rng = Lcg(17);
    for model in models() {
        let kf = kernel_form(&model).unwrap();
        let n = kf.n();
        for _ in 0..30 {
            let (a, b) = random_segment(&mut rng, kf.support());
            let i = (rng.next() * n as f64) as usize;
            let j = (rng.next() * n as f64) as usize;
            // direct product of the row functions
            let f = |x: f64| {
                let row = if i < kf.m() {
                    kf.phi_row(i, x)
                } else {
                    ordeig::SignedLog::ONE
                };
                (row * kf.xi(x) * kf.psi_row(j, x).unwrap()).to_f64()
            };
            let oracle = if a.is_infinite() {
                gl_integrate(|t| f(-t), -b, f64::INFINITY, 200)
            } else {
                gl_integrate(f, a, b, 200)
            };
            let scale = if a.is_infinite() {
                gl_integrate(|t| f(-t).abs(), -b, f64::INFINITY, 200)
            } else {
                gl_integrate(|x| f(x).abs(), a, b, 200)
            };
            let v = kf.table().segment(i, j, a, b).unwrap().to_f64();
            assert!(
                (v - oracle).abs() <= 1e-9 * scale.max(1e-300),
                "{model} ({i},{j}) over ({a},{b}): {v} vs {oracle}"
            );
        }
    }
}

#[test]
fn normalization_for_every_variant() {
    let mut all: Vec<EnsembleModel> = Vec::new();
    for m in 1..=4usize {
        all.push(EnsembleModel::UncorrelatedWishart { dim: m, n: m + 1 });
        all.push(EnsembleModel::Gue { dim: m });
        all.push(EnsembleModel::Beta { dim: m, m: 1, n: 2 });
        all.push(EnsembleModel::SpikedWishart {
            dim: m,
            n: m + 2,
            sigma1: 3.0,
            sigma2: 1.0,
        });
        all.push(EnsembleModel::NoncentralWishart {
            dim: m,
            n: m + 1,
            mu: [2.0, 0.5][..m.min(2)].to_vec(),
        });
        all.push(EnsembleModel::CorrelatedWishart {
            p: m,
            n: m + 2,
            phi: vec![2.0, 1.0],
            mult: vec![1, m + 1],
        });
    }
    for model in all {
        let v = normalization_check(&model).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{model}: {v}");
    }
}

#[test]
fn documented_constants() {
    let kf = kernel_form(&EnsembleModel::UncorrelatedWishart { dim: 4, n: 5 }).unwrap();
    assert!((1.0 / kf.norm().to_f64() - 3456.0).abs() < 1e-9);
    let kf = kernel_form(&EnsembleModel::UncorrelatedWishart { dim: 1, n: 1 }).unwrap();
    assert_eq!((kf.m(), kf.n()), (1, 1));
    assert!((kf.xi(0.7).to_f64() - (-0.7f64).exp()).abs() < 1e-16);
    let kf = kernel_form(&EnsembleModel::SpikedWishart {
        dim: 2,
        n: 2,
        sigma1: 2.0,
        sigma2: 1.0,
    })
    .unwrap();
    assert!((1.0 / kf.norm().to_f64().abs() - 2.0).abs() < 1e-12);
    let kf = kernel_form(&EnsembleModel::Gue { dim: 2 }).unwrap();
    assert!((kf.norm().to_f64() - 2.0 / std::f64::consts::PI).abs() < 1e-15);
    assert!(
        (kf.table()
            .segment(1, 0, f64::NEG_INFINITY, 0.0)
            .unwrap()
            .to_f64()
            + 0.5)
            .abs()
            < 1e-15
    );
}

#[test]
fn near_identity_correlation_approaches_uncorrelated() {
    let eps = 1e-3;
    let corr = EigenDistribution::new(&EnsembleModel::CorrelatedWishart {
        p: 2,
        n: 3,
        phi: vec![1.0 + 2.0 * eps, 1.0 + eps, 1.0],
        mult: vec![1, 1, 1],
    })
    .unwrap();
    let unc = EigenDistribution::new(&EnsembleModel::UncorrelatedWishart { dim: 2, n: 3 }).unwrap();
    for i in 1..=20 {
        let x = 0.5 * i as f64;
        let d = (corr.prob_all_in(0.0, x).unwrap() - unc.prob_all_in(0.0, x).unwrap()).abs();
        assert!(d < 1e-2, "x={x}: {d}");
    }
}

#[test]
fn spiked_near_degenerate_warns() {
    let kf = kernel_form(&EnsembleModel::SpikedWishart {
        dim: 3,
        n: 4,
        sigma1: 1.0 + 1e-7,
        sigma2: 1.0,
    })
    .unwrap();
    assert!(!kf.warnings().is_empty());
    let kf = kernel_form(&EnsembleModel::SpikedWishart {
        dim: 3,
        n: 4,
        sigma1: 1.1,
        sigma2: 1.0,
    })
    .unwrap();
    assert!(kf.warnings().is_empty());
}

#[test]
fn invalid_models_name_the_constraint() {
    let cases = [
        (EnsembleModel::UncorrelatedWishart { dim: 3, n: 2 }, "n ≥ M"),
        (
            EnsembleModel::SpikedWishart {
                dim: 2,
                n: 3,
                sigma1: 1.0,
                sigma2: 2.0,
            },
            "σ1 > σ2",
        ),
        (
            EnsembleModel::CorrelatedWishart {
                p: 2,
                n: 3,
                phi: vec![1.0, 2.0],
                mult: vec![1, 2],
            },
            "strictly decreasing",
        ),
        (
            EnsembleModel::NoncentralWishart {
                dim: 1,
                n: 2,
                mu: vec![2.0, 1.0],
            },
            "ν ≤ M",
        ),
        (
            EnsembleModel::NoncentralWishart {
                dim: 2,
                n: 2,
                mu: vec![1.0, 1.0],
            },
            "distinct",
        ),
        (EnsembleModel::Gue { dim: 0 }, "M ≥ 1"),
    ];
    for (model, needle) in cases {
        match kernel_form(&model) {
            Err(Error::InvalidModel(msg)) => assert!(msg.contains(needle), "{msg}"),
            other => panic!("{model:?}: {other:?}"),
        }
    }
}
