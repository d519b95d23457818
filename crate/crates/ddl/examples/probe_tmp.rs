use ddl::knn::{evaluate, LabeledSet};
use ddl::mat::{truncated_svd, Mat};
use ddl::rng::Rng;
use ddl::train::{train_greedy, train_mm, TrainConfig};

fn digit_blobs(n_per_class: usize, noise: f64, proto_seed: u64, sample_seed: u64) -> LabeledSet {
    let side = 28;
    let dim = side * side;
    let mut proto_rng = Rng::new(proto_seed);
    let mut protos: Vec<Vec<f64>> = Vec::with_capacity(10);
    for _ in 0..10 {
        let mut img = vec![0.0f64; dim];
        for _ in 0..4 {
            let cx = 4.0 + 20.0 * proto_rng.uniform01();
            let cy = 4.0 + 20.0 * proto_rng.uniform01();
            let s = 2.0 + 3.0 * proto_rng.uniform01();
            let amp = 0.5 + 0.5 * proto_rng.uniform01();
            for y in 0..side {
                for x in 0..side {
                    let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                    img[y * side + x] += amp * (-d2 / (2.0 * s * s)).exp();
                }
            }
        }
        protos.push(img);
    }
    let mut rng = Rng::new(sample_seed);
    let n = n_per_class * 10;
    let mut cols = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for c in 0..10 {
        for _ in 0..n_per_class {
            cols.push(protos[c].iter().map(|&p| (p + noise * rng.gaussian()).clamp(0.0, 1.0)).collect::<Vec<f64>>());
            labels.push(c);
        }
    }
    let m = Mat::from_fn(dim, n, |i, j| cols[j][i]);
    LabeledSet::new(m, labels).unwrap()
}

fn mean_col_norm(m: &Mat) -> f64 {
    (0..m.cols()).map(|j| m.col_norm(j)).sum::<f64>() / m.cols() as f64
}

fn cond(d: &Mat) -> (f64, f64) {
    let s = truncated_svd(d, d.rows().min(d.cols())).unwrap().s;
    (s[0], *s.last().unwrap())
}

fn main() {
    let noise = 0.35;
    let mut train = digit_blobs(100, noise, 7, 1001);
    let mut test = digit_blobs(100, noise, 7, 2002);
    let scale = 1.0 / mean_col_norm(&train.features);
    train.features = train.features.scale(scale);
    test.features = test.features.scale(scale);

    let base = TrainConfig::new(vec![200, 100, 50]);
    let (g_model, _, _) = train_greedy(&train.features, &base).unwrap();
    for (i, d) in g_model.dicts().iter().enumerate() {
        let (s0, smin) = cond(d);
        println!("greedy D{}: smax={:.3} smin={:.3e}", i + 1, s0, smin);
    }

    for outer in [5usize, 15, 30, 100] {
        let mut cfg = base.clone();
        cfg.outer_iters = outer;
        cfg.stop_rel_tol = 0.0;
        let (m_model, _, tr) = train_mm(&train.features, &cfg).unwrap();
        let acc = evaluate(&m_model, &train, &test, 1).unwrap().accuracy;
        let conds: Vec<String> = m_model.dicts().iter().map(|d| {
            let (s0, smin) = cond(d);
            format!("{:.2}/{:.1e}", s0, smin)
        }).collect();
        println!("mm outer={:>3}: acc={:.4} J_last={:.4} conds(smax/smin)={:?}",
            outer, acc, tr.objective_per_outer.last().unwrap(), conds);
    }
}
