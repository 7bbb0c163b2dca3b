use editkit::model::EditModel;
use editkit::train::{derive_rng, pretrain};
use editkit::world::{Dataset, WorldSpec};

fn main() {
    let ds = Dataset::generate(&WorldSpec {
        num_identities: 96, train_videos: 72, val_videos: 24,
        attr_offset_scale: 0.2, ..WorldSpec::default()
    }).unwrap();
    for (hidden, steps, lr) in [(64usize, 12000usize, 0.003), (64, 25000, 0.003), (96, 25000, 0.003), (64, 25000, 0.005)] {
        let mut model = EditModel::build(32, 32, hidden, 5, 8, &mut derive_rng(7, "init")).unwrap();
        let t = std::time::Instant::now();
        pretrain(&mut model, &ds, steps, lr, &mut derive_rng(7, "pretrain")).unwrap();
        let secs = t.elapsed().as_secs_f64();
        let mut out = format!("hidden {hidden} steps {steps} lr {lr}:");
        for (name, videos) in [("train", &ds.videos.train), ("val", &ds.videos.val)] {
            let (mut rsum, mut n) = (0.0, 0);
            for v in videos.iter() {
                for f in &v.frames {
                    let x = model.encode(f).unwrap();
                    let rec = model.decode(&x).unwrap();
                    rsum += f.iter().zip(rec.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / 32.0;
                    n += 1;
                }
            }
            out.push_str(&format!(" {name} {:.2e}", rsum / n as f64));
        }
        println!("{out}  [{secs:.1}s]");
    }
}
