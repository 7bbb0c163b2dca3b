use editkit::model::EditModel;
use editkit::train::{derive_rng, pretrain};
use editkit::world::{Dataset, WorldSpec};

fn main() {
    let ds = Dataset::generate(&WorldSpec { attr_offset_scale: 0.2, ..WorldSpec::default() }).unwrap();
    let mut model = EditModel::build(32, 32, 64, 5, 8, &mut derive_rng(7, "init")).unwrap();
    pretrain(&mut model, &ds, 12000, 0.003, &mut derive_rng(7, "pretrain")).unwrap();
    for (name, videos) in [("train", &ds.videos.train), ("val", &ds.videos.val)] {
        let (mut rsum, mut rmax, mut asum, mut amax, mut n) = (0.0, 0.0f64, 0.0, 0.0f64, 0);
        for v in videos.iter() {
            for (f, z) in v.frames.iter().zip(v.true_latents.iter()) {
                let x = model.encode(f).unwrap();
                let rec = model.decode(&x).unwrap();
                let r: f64 = f.iter().zip(rec.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / 32.0;
                let a: f64 = x.iter().zip(z.iter()).map(|(p, q)| (p - q) * (p - q)).sum::<f64>() / 32.0;
                rsum += r; rmax = rmax.max(r); asum += a; amax = amax.max(a); n += 1;
            }
        }
        println!("{name}: recon mean {:.2e} max {:.2e} | align mean {:.2e} max {:.2e}", rsum / n as f64, rmax, asum / n as f64, amax);
    }
}
