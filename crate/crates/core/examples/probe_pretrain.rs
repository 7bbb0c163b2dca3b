use editkit::model::EditModel;
use editkit::train::{derive_rng, pretrain};
use editkit::world::{Dataset, WorldSpec};

fn main() {
    let ds = Dataset::generate(&WorldSpec::default()).unwrap();
    // Observation scale
    let mut maxabs = 0.0f64;
    let mut sumsq = 0.0;
    let mut n = 0;
    for f in ds.train_frames() {
        for &v in f {
            maxabs = maxabs.max(v.abs());
            sumsq += v * v;
            n += 1;
        }
    }
    println!("obs max |v| = {maxabs:.3}, rms = {:.3}", (sumsq / n as f64).sqrt());

    for (lr, steps, hidden) in [(0.05, 1500, 48), (0.02, 1500, 48), (0.1, 1500, 48), (0.05, 6000, 48), (0.02, 6000, 64), (0.1, 6000, 64)] {
        let mut model = EditModel::build(32, 32, hidden, 5, 8, &mut derive_rng(7, "init")).unwrap();
        let log = pretrain(&mut model, &ds, steps, lr, 0.9, &mut derive_rng(7, "pretrain")).unwrap();
        let tail: f64 = log.iter().rev().take(100).map(|x| x.1).sum::<f64>() / 100.0;
        println!("lr {lr:<5} steps {steps:<5} hidden {hidden}: final-100 mean recon {tail:.4}");
    }
}
