use editkit::model::EditModel;
use editkit::train::{derive_rng, pretrain};
use editkit::world::{Dataset, WorldSpec};

fn main() {
    let ds = Dataset::generate(&WorldSpec { attr_offset_scale: 0.2, ..WorldSpec::default() }).unwrap();
    for (lr, steps) in [(0.003, 6000), (0.003, 12000), (0.001, 12000)] {
        let mut model = EditModel::build(32, 32, 64, 5, 8, &mut derive_rng(7, "init")).unwrap();
        let log = pretrain(&mut model, &ds, steps, lr, &mut derive_rng(7, "pretrain")).unwrap();
        let tail_r: f64 = log.iter().rev().take(200).map(|x| x.recon_mse).sum::<f64>() / 200.0;
        let tail_a: f64 = log.iter().rev().take(200).map(|x| x.align_mse).sum::<f64>() / 200.0;
        println!("adam lr {lr} steps {steps}: recon {tail_r:.2e} align {tail_a:.2e}");
    }
}
