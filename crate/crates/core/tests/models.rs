mod support;

use nate_core::models::{
    eval_forest, gradient_logistic, gradient_mlp, load, loss_logistic, loss_mlp, save,
    train_forest, train_logistic, train_logistic_traced, train_mlp_traced, train_tree, Dataset,
    LogisticModel, MlpModel, Model, ModelError, ModelHeader, ModelKind, TrainConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use support::{blobs, numeric_gradient, random_batch, relative_error};

const H: f64 = 1e-5;

#[test]
fn logistic_gradient_matches_finite_differences() {
    for seed in 0..10 {
        let (x, y) = random_batch(16, 7, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let mut m = LogisticModel::zeros(7, 0.01);
        let p: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        m.set_params(&p);
        let analytic = gradient_logistic(&m, &x, &y);
        let numeric = numeric_gradient(&p, H, |q| {
            let mut m = m.clone();
            m.set_params(q);
            loss_logistic(&m, &x, &y)
        });
        let err = relative_error(&analytic, &numeric);
        assert!(err < 1e-4, "seed {seed}: {err}");
    }
}

#[test]
fn mlp_gradient_matches_finite_differences() {
    for seed in 0..10 {
        let (x, y) = random_batch(16, 6, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(200 + seed);
        let m = MlpModel::random(6, 5, 0.01, &mut rng);
        let p = m.params();
        let analytic = gradient_mlp(&m, &x, &y);
        let numeric = numeric_gradient(&p, H, |q| {
            let mut m = m.clone();
            m.set_params(q);
            loss_mlp(&m, &x, &y)
        });
        let err = relative_error(&analytic, &numeric);
        assert!(err < 1e-3, "seed {seed}: {err}");
    }
}

#[test]
fn full_batch_training_loss_does_not_increase() {
    let (x, y) = blobs(200, 3, 1);
    let data = Dataset::new(x, y).unwrap();
    let cfg = TrainConfig {
        batch_size: 200,
        epochs: 40,
        learning_rate: 0.01,
        ..TrainConfig::default()
    };
    let (_, losses) = train_logistic_traced(&data, &cfg).unwrap();
    for w in losses.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "{losses:?}");
    }
    let (_, losses) = train_mlp_traced(&data, &cfg).unwrap();
    assert!(losses.last().unwrap() < &losses[0], "{losses:?}");
}

#[test]
fn logistic_separates_blobs() {
    let (x, y) = blobs(400, 4, 2);
    let data = Dataset::new(x.clone(), y.clone()).unwrap();
    let cfg = TrainConfig {
        learning_rate: 0.05,
        epochs: 30,
        batch_size: 32,
        ..TrainConfig::default()
    };
    let m = Model::Logistic(train_logistic(&data, &cfg).unwrap());
    let correct = x
        .iter()
        .zip(&y)
        .filter(|(v, &b)| (m.eval(v).unwrap() > 0.5) == b)
        .count();
    assert!(correct as f64 / x.len() as f64 >= 0.99, "{correct}");
}

#[test]
fn cart_fits_xor() {
    let x = vec![
        vec![0.0, 0.0],
        vec![0.0, 1.0],
        vec![1.0, 0.0],
        vec![1.0, 1.0],
    ];
    let y = vec![false, true, true, false];
    let t = train_tree(
        &Dataset::new(x.clone(), y.clone()).unwrap(),
        &TrainConfig::default(),
    )
    .unwrap();
    for (v, b) in x.iter().zip(&y) {
        assert_eq!(t.vote(v), *b);
    }
}

#[test]
fn forest_confidence_is_the_vote_fraction() {
    let (x, y) = blobs(120, 5, 3);
    let (x, y): (Vec<_>, Vec<_>) = x
        .into_iter()
        .zip(y)
        .enumerate()
        .map(|(i, (v, b))| (v, if i % 7 == 0 { !b } else { b }))
        .unzip();
    let cfg = TrainConfig {
        n_estimators: 13,
        ..TrainConfig::default()
    };
    let f = train_forest(&Dataset::new(x, y).unwrap(), &cfg).unwrap();
    let (probe, _) = random_batch(50, 5, 9);
    for v in probe {
        let votes = f.trees.iter().filter(|t| t.vote(&v)).count();
        assert_eq!(eval_forest(&f, &v).unwrap(), votes as f64 / 13.0);
    }
}

#[test]
fn wrong_width_is_reported() {
    let m = Model::Logistic(LogisticModel::zeros(3, 0.0));
    assert!(matches!(
        m.eval(&[1.0]),
        Err(ModelError::DimensionMismatch {
            expected: 3,
            got: 1
        })
    ));
}

fn header() -> ModelHeader {
    ModelHeader {
        schema: "lml-boat-v1".into(),
        features: "all".into(),
    }
}

fn small_models() -> Vec<Model> {
    let (x, y) = blobs(80, 6, 4);
    let data = Dataset::new(x, y).unwrap();
    let cfg = TrainConfig {
        epochs: 3,
        n_estimators: 4,
        hidden_units: 3,
        ..TrainConfig::default()
    };
    [
        ModelKind::Linear,
        ModelKind::Tree,
        ModelKind::Forest,
        ModelKind::Mlp10,
    ]
    .into_iter()
    .map(|k| Model::train(k, &data, &cfg).unwrap())
    .collect()
}

#[test]
fn persistence_round_trips_bit_for_bit() {
    let (probe, _) = random_batch(100, 6, 77);
    for m in small_models() {
        let bytes = save(&m, &header());
        let (back, h) = load(&bytes).unwrap();
        assert_eq!(h, header());
        assert_eq!(save(&back, &h), bytes);
        for v in &probe {
            assert_eq!(
                m.eval(v).unwrap().to_bits(),
                back.eval(v).unwrap().to_bits()
            );
        }
    }
}

#[test]
fn damaged_files_are_rejected() {
    let bytes = save(&small_models()[0], &header());
    let mut wrong = bytes.clone();
    wrong[4] = b'9';
    assert!(matches!(load(&wrong), Err(ModelError::VersionMismatch(_))));
    assert!(matches!(
        load(&bytes[..bytes.len() - 3]),
        Err(ModelError::CorruptModel(_))
    ));
    let mut longer = bytes.clone();
    longer.push(0);
    assert!(matches!(load(&longer), Err(ModelError::CorruptModel(_))));
    assert!(load(b"HELLO").is_err());
}

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/models.bin");

fn fixture_models() -> Vec<Model> {
    small_models()
}

/// Writes the golden file; run with `--ignored` after a deliberate format change.
#[test]
#[ignore]
fn regenerate_golden_fixture() {
    let mut out = Vec::new();
    for m in fixture_models() {
        let bytes = save(&m, &header());
        out.extend((bytes.len() as u32).to_le_bytes());
        out.extend(bytes);
    }
    std::fs::create_dir_all(std::path::Path::new(FIXTURE).parent().unwrap()).unwrap();
    std::fs::write(FIXTURE, out).unwrap();
}

#[test]
fn golden_fixture_still_loads() {
    let raw = std::fs::read(FIXTURE).expect("fixture present");
    let mut files = Vec::new();
    let mut at = 0;
    while at < raw.len() {
        let n = u32::from_le_bytes(raw[at..at + 4].try_into().unwrap()) as usize;
        files.push(&raw[at + 4..at + 4 + n]);
        at += 4 + n;
    }
    let (probe, _) = random_batch(20, 6, 5);
    let fresh = fixture_models();
    assert_eq!(files.len(), fresh.len());
    for (bytes, m) in files.into_iter().zip(fresh) {
        let (loaded, h) = load(bytes).unwrap();
        assert_eq!(h, header());
        assert_eq!(save(&m, &header()), bytes, "training or layout changed");
        for v in &probe {
            assert_eq!(
                loaded.eval(v).unwrap().to_bits(),
                m.eval(v).unwrap().to_bits()
            );
        }
    }
}
