// Probes: linear vs tanh encoder, bank init scale, milder world decoder.
use editkit::cluster::fit_kmeans;
use editkit::model::{EditModel, EditRequest};
use editkit::nn::{Activation, DenseNet, Grouping, ParamStore};
use editkit::train::{derive_rng, RunConfig};
use editkit::world::{attribute_codebook, Dataset, WorldSpec};
use rand::Rng;

fn build_linear_enc(d: usize, hidden: usize, k: usize, regions: usize, bank_scale: f64, rng: &mut impl Rng) -> EditModel {
    let mut store = ParamStore::new();
    let encoder = DenseNet::build(&mut store, "enc", &[d, d], &[Activation::Identity], Grouping::PerLayer, 1.0, rng).unwrap();
    let decoder = DenseNet::build(&mut store, "dec", &[d, hidden, d], &[Activation::Tanh, Activation::Identity], Grouping::PerLayer, 1.0, rng).unwrap();
    let mut bank = Vec::new();
    for i in 0..k {
        bank.push(DenseNet::build(&mut store, &format!("bank{i}"), &[d, d], &[Activation::Identity], Grouping::OutputRegions(regions), bank_scale, rng).unwrap());
    }
    store.validate_partition().unwrap();
    EditModel { store, encoder, decoder, bank, norm: None, router: None, obs_dim: d, latent_dim: d, region_count: regions }
}

fn pretrain_simple(model: &mut EditModel, ds: &Dataset, steps: usize, lr: f64, rng: &mut impl Rng) -> f64 {
    use editkit::nn::GradRecord;
    use editkit::sparse::{GroupPartition, SparseOptConfig, SparseOptimizer};
    let frames: Vec<&Vec<f64>> = ds.train_frames().collect();
    let mut trainable = vec![model.store.group_id("enc.l0").unwrap()];
    for n in ["dec.l0", "dec.l1"] { trainable.push(model.store.group_id(n).unwrap()); }
    let cfg = SparseOptConfig { learning_rate: lr, momentum: 0.9, warmup_steps: steps, sparsity_rate: 0.0, ..Default::default() };
    let mut opt = SparseOptimizer::new(&model.store, GroupPartition::new(trainable, vec![]).unwrap(), cfg).unwrap();
    let mut grads = GradRecord::zeros_like(&model.store);
    let mut last = 0.0;
    for s in 0..steps {
        let f = frames[rng.random_range(0..frames.len())];
        grads.fill_zero();
        let x = model.encode(f).unwrap();
        let recon = model.decode(&x).unwrap();
        let n = f.len() as f64;
        last = f.iter().zip(recon.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n;
        let cot: Vec<f64> = recon.iter().zip(f.iter()).map(|(r, a)| 2.0 * (r - a) / n).collect();
        let cx = model.decoder.backward_into(&model.store, &x, &cot, &mut grads).unwrap();
        model.encoder.backward_into(&model.store, f, &cx, &mut grads).unwrap();
        opt.step(&mut model.store, &grads).unwrap();
        let _ = s;
    }
    last
}

fn main() {
    let cfgbase = RunConfig::default();
    let ds = Dataset::generate(&WorldSpec { seed: 11, ..cfgbase.world }).unwrap();
    let gt = &ds.ground_truth;
    let cb = attribute_codebook(gt, 0.02, 11 ^ 0xC0DE_B00C);

    for (label, bank_scale, st_lr, st_steps) in [
        ("linear-enc baseline", 0.01, 0.0, 0usize),
        ("linear-enc st", 0.01, 0.005, 5000),
        ("linear-enc st-long", 0.01, 0.005, 15000),
    ] {
        let mut model = build_linear_enc(32, 48, 5, 8, bank_scale, &mut derive_rng(11, "init"));
        let recon = pretrain_simple(&mut model, &ds, 2500, 0.02, &mut derive_rng(11, "pretrain"));
        let frames: Vec<Vec<f64>> = ds.train_frames().cloned().collect();
        model.fit_norm_stats(frames.iter()).unwrap();
        let emb: Vec<Vec<f64>> = cb.embeddings.clone();
        model.attach_router(fit_kmeans(&emb, 5, 11 ^ 0x5EED, 100).unwrap()).unwrap();

        if st_steps > 0 {
            use editkit::loss::{pipeline_step, LossWeights};
            use editkit::nn::GradRecord;
            use editkit::sparse::{GroupPartition, SparseOptConfig, SparseOptimizer};
            let mut trainable = vec![model.store.group_id("dec.l0").unwrap(), model.store.group_id("dec.l1").unwrap()];
            let eligible = model.bank_region_groups().unwrap();
            trainable.extend(eligible.iter().copied());
            let cfg = SparseOptConfig { learning_rate: st_lr, momentum: 0.9, warmup_steps: st_steps, sparsity_rate: 0.0, ..Default::default() };
            let mut opt = SparseOptimizer::new(&model.store, GroupPartition::new(trainable, eligible).unwrap(), cfg).unwrap();
            let mut rng = derive_rng(11, "train");
            let mut grads = GradRecord::zeros_like(&model.store);
            let w = LossWeights::default();
            for _ in 0..st_steps {
                let v = &ds.videos.train[rng.random_range(0..ds.videos.train.len())];
                let f = &v.frames[rng.random_range(0..v.frames.len())];
                let attr = rng.random_range(0..20);
                let gamma: f64 = rng.random_range(0.0..1.0);
                let req = EditRequest::new(cb.embeddings[attr].clone(), gamma, 1.0).unwrap();
                grads.fill_zero();
                pipeline_step(&model, gt, f, attr, &req, &w, Some(&mut grads), false).unwrap();
                opt.step(&mut model.store, &grads).unwrap();
            }
        }

        // Eval on val: mean signed target change, ntmax, tacr, napr.
        let (mut tpos, mut tacr_hits, mut napr_hits, mut n) = (0.0, 0, 0, 0);
        for video in &ds.videos.val {
            for attr in 0..20 {
                let req = EditRequest::new(cb.embeddings[attr].clone(), 1.0, 1.0).unwrap();
                for frame in &video.frames {
                    let x = model.encode(frame).unwrap();
                    let fh = model.decode(&model.pseudo_edit(&x, &req).unwrap()).unwrap();
                    let lo = gt.attr_logits(frame).unwrap();
                    let le = gt.attr_logits(&fh).unwrap();
                    let dt = le[attr] - lo[attr];
                    tpos += dt;
                    if dt >= 0.25 { tacr_hits += 1; }
                    let ntmax = lo.iter().zip(le.iter()).enumerate().filter(|(j, _)| *j != attr)
                        .map(|(_, (a, b))| (a - b).abs()).fold(0.0f64, f64::max);
                    if ntmax <= 0.1 { napr_hits += 1; }
                    n += 1;
                }
            }
        }
        println!("{label:<22} recon {recon:.4}  val: meanΔt {:+.3} tacr {:.3} napr {:.3}", tpos / n as f64, tacr_hits as f64 / n as f64, napr_hits as f64 / n as f64);
    }
}
