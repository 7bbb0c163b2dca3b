// Does self-training amplify the target response at all?
use editkit::model::EditRequest;
use editkit::train::{derive_rng, train_on, RunConfig, Toggles};
use editkit::world::{attribute_codebook, Dataset, WorldSpec};

fn mean_response(a: &editkit::train::RunArtifacts, ds: &Dataset, videos: &[editkit::world::SyntheticVideo]) -> (f64, f64) {
    let gt = &ds.ground_truth;
    let cb = attribute_codebook(gt, a.config.codebook_noise, a.config.seed ^ 0xC0DE_B00C);
    let (mut dt_sum, mut leak_sum, mut n) = (0.0, 0.0, 0);
    for video in videos.iter().take(6) {
        for attr in (0..20).step_by(3) {
            let req = EditRequest::new(cb.embeddings[attr].clone(), 1.0, 1.0).unwrap();
            for frame in video.frames.iter().step_by(4) {
                let x = a.model.encode(frame).unwrap();
                let fh = a.model.decode(&a.model.pseudo_edit(&x, &req).unwrap()).unwrap();
                let lo = gt.attr_logits(frame).unwrap();
                let le = gt.attr_logits(&fh).unwrap();
                dt_sum += le[attr] - lo[attr];
                leak_sum += lo.iter().zip(le.iter()).enumerate().filter(|(j, _)| *j != attr)
                    .map(|(_, (p, q))| (p - q).abs()).fold(0.0f64, f64::max);
                n += 1;
            }
        }
    }
    (dt_sum / n as f64, leak_sum / n as f64)
}

fn main() {
    let world = WorldSpec { num_identities: 96, train_videos: 72, val_videos: 24, attr_offset_scale: 0.3, seed: 12, ..WorldSpec::default() };
    for (lr, steps) in [(0.008, 5000), (0.008, 30000), (0.02, 30000), (0.05, 30000)] {
        let cfg = RunConfig { toggles: Toggles::ST_SDA, seed: 12, learning_rate: lr, steps, val_every: steps / 10, world: world.clone(), ..RunConfig::default() };
        let norm = cfg.normalized().unwrap();
        let ds = Dataset::generate(&norm.world).unwrap();
        let a = train_on(&norm, &ds).unwrap();
        let (dt_tr, leak_tr) = mean_response(&a, &ds, &ds.videos.train);
        let (dt_va, leak_va) = mean_response(&a, &ds, &ds.videos.val);
        println!("lr {lr} steps {steps}: best@{:?} | train Δt {:+.3} leak {:.3} | val Δt {:+.3} leak {:.3} | tacr {:.3} napr {:.3} idp {:.4}",
            a.best_val.map(|b| b.0), dt_tr, leak_tr, dt_va, leak_va,
            a.report.aggregate.tacr, a.report.aggregate.napr, a.report.aggregate.id_preserve);
    }
}
