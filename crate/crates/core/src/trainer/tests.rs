use super::*;
use crate::dataio::EntityKind;
use crate::losses::LossKind;

fn affinity(kind: EntityKind, n: usize, seed: usize) -> AffinityMatrix {
    let v = Mat::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            (((i + j + seed) * 7919) % 100) as f64 / 100.0
        }
    });
    AffinityMatrix::new(kind, v).unwrap()
}

fn toy() -> (AffinityMatrix, AffinityMatrix, Split) {
    let a_dd = affinity(EntityKind::Drug, 4, 1);
    let a_tt = affinity(EntityKind::Target, 3, 2);
    let lp = |d, t, positive| LabeledPair::new((d, t), positive);
    let split = Split {
        train: vec![lp(0, 0, true), lp(1, 1, true), lp(2, 2, true), lp(3, 0, false), lp(0, 2, false)],
        test: vec![lp(3, 1, true), lp(2, 0, false)],
        holdout: None,
    };
    (a_dd, a_tt, split)
}

fn small_config(variant: Variant) -> TrainConfig {
    TrainConfig {
        epochs: 30,
        learning_rate: 1e-2,
        gcn_hidden: 6,
        embed_dim: 5,
        edgl_hidden: 4,
        filter: FilterConfig {
            k: 6,
            ..FilterConfig::default()
        },
        variant,
        ..TrainConfig::default()
    }
}

#[test]
fn variant_names_round_trip() {
    for v in Variant::ALL {
        assert_eq!(v.name().parse::<Variant>().unwrap(), v);
    }
    assert!("full".parse::<Variant>().is_err());
    assert_eq!(Variant::AdglOnly.effective_omega(0.3), 1.0);
    assert_eq!(Variant::NoFusion.effective_omega(0.3), 0.0);
    assert_eq!(Variant::Odd.filter_parity(), Some(Parity::Odd));
    assert_eq!(Variant::Attention.filter_parity(), None);
}

#[test]
fn masked_graph_hides_test_positives() {
    let (a_dd, a_tt, split) = toy();
    let g = masked_graph(&a_dd, &a_tt, &split.train, 0.8).unwrap();
    assert_eq!(g.g[(3, 4 + 1)], 0.0);
    assert_eq!(g.h[(3, 4 + 1)], 0.0);
    assert_eq!(g.g[(0, 4)], 1.0);
}

#[test]
fn fit_rejects_unmasked_graph() {
    let (a_dd, a_tt, split) = toy();
    let mut all = split.train.clone();
    all.extend(split.test.iter().copied());
    let leaky = masked_graph(&a_dd, &a_tt, &all, 0.8).unwrap();
    let err = fit(&leaky, &split, &small_config(Variant::Even)).unwrap_err();
    assert!(err.to_string().contains("visible"));
}

#[test]
fn zero_epochs_returns_initial_params() {
    let (a_dd, a_tt, split) = toy();
    let g = masked_graph(&a_dd, &a_tt, &split.train, 0.8).unwrap();
    let cfg = TrainConfig {
        epochs: 0,
        ..small_config(Variant::Even)
    };
    let (params, log) = fit(&g, &split, &cfg).unwrap();
    assert_eq!(params, init_params(&cfg.dims(g.n_nodes()), cfg.seed).unwrap());
    assert!(log.losses.is_empty());
}

#[test]
fn fit_is_deterministic_and_decreases_loss() {
    let (a_dd, a_tt, split) = toy();
    let g = masked_graph(&a_dd, &a_tt, &split.train, 0.8).unwrap();
    for v in Variant::ALL {
        let cfg = small_config(v);
        let (p1, l1) = fit(&g, &split, &cfg).unwrap();
        let (p2, l2) = fit(&g, &split, &cfg).unwrap();
        assert_eq!(l1, l2);
        assert_eq!(p1, p2);
        assert!(l1.losses.last().unwrap() < l1.losses.first().unwrap(), "{v}");
        let h = forward(&g, &p1, &cfg).unwrap();
        assert_eq!((h.nrows(), h.ncols()), (4, 3));
        assert!(h.iter().all(|&x| x > 0.0 && x < 1.0));
    }
}

#[test]
fn rlf_grows_with_varpi() {
    let (a_dd, a_tt, split) = toy();
    let g = masked_graph(&a_dd, &a_tt, &split.train, 0.8).unwrap();
    let mut cfg = small_config(Variant::Even);
    let params = init_params(&cfg.dims(g.n_nodes()), 5).unwrap();
    let pos_only: Vec<LabeledPair> = split.train.iter().filter(|p| p.positive).copied().collect();
    cfg.loss.kind = LossKind::Slf;
    let (l_slf, g_slf) = gradients(&g, &params, &pos_only, &cfg).unwrap();
    cfg.loss.kind = LossKind::Rlf;
    cfg.loss.varpi = 0.5;
    let mut balanced = pos_only.clone();
    balanced.extend(split.train.iter().filter(|p| !p.positive).copied());
    balanced.push(LabeledPair::new((1, 0), false));
    let (l_rlf_half, _) = gradients(&g, &params, &balanced, &cfg).unwrap();
    cfg.loss.varpi = 1.0;
    let (l_rlf_one, _) = gradients(&g, &params, &balanced, &cfg).unwrap();
    assert!(l_rlf_half < l_rlf_one);
    assert!(l_slf > 0.0 && g_slf.is_finite());
}

#[test]
fn checkpoint_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for v in Variant::ALL {
        let cfg = small_config(v);
        let dims = cfg.dims(7);
        let p = init_params(&dims, 11).unwrap();
        let sub = dir.path().join(v.name());
        write_params(&sub, &p).unwrap();
        assert_eq!(read_params(&sub, &dims).unwrap(), p);
    }
    let wrong = ModelDims {
        embed_dim: 3,
        ..small_config(Variant::Even).dims(7)
    };
    assert!(read_params(&dir.path().join("even"), &wrong).is_err());
}
