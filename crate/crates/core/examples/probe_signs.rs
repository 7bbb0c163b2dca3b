use editkit::model::EditRequest;
use editkit::train::{train, RunConfig, Toggles};
use editkit::world::{attribute_codebook, Dataset};

fn main() {
    let cfg = RunConfig { toggles: Toggles::ST_SDA, seed: 11, learning_rate: 0.005, ..RunConfig::default() };
    let a = train(&cfg).unwrap();
    let ds = Dataset::generate(&a.config.world).unwrap();
    let gt = &ds.ground_truth;
    let cb = attribute_codebook(gt, a.config.codebook_noise, a.config.seed ^ 0xC0DE_B00C);
    println!("attr | mean signed target-change | mean max |non-target| (train videos then val videos)");
    for attr in 0..gt.num_attributes() {
        let mut stats = Vec::new();
        for videos in [&ds.videos.train[..2], &ds.videos.val[..2]] {
            let mut tchange = 0.0;
            let mut ntmax = 0.0;
            let mut n = 0.0;
            for video in videos {
                for frame in &video.frames {
                    let req = EditRequest::new(cb.embeddings[attr].clone(), 1.0, 1.0).unwrap();
                    let x = a.model.encode(frame).unwrap();
                    let fh = a.model.decode(&a.model.pseudo_edit(&x, &req).unwrap()).unwrap();
                    let lo = gt.attr_logits(frame).unwrap();
                    let le = gt.attr_logits(&fh).unwrap();
                    tchange += le[attr] - lo[attr];
                    let m = lo.iter().zip(le.iter()).enumerate().filter(|(j, _)| *j != attr)
                        .map(|(_, (x, y))| (x - y).abs()).fold(0.0f64, f64::max);
                    ntmax += m;
                    n += 1.0;
                }
            }
            stats.push((tchange / n, ntmax / n));
        }
        println!("  {attr:2}: train Δt {:+.3} ntmax {:.3} | val Δt {:+.3} ntmax {:.3}", stats[0].0, stats[0].1, stats[1].0, stats[1].1);
    }
}
