// Can a linear T_k represent the clean edit at all?
// Fit T by least squares on (pseudo-edit input -> encode(ideally-edited frame))
// pairs, then measure TACR/NAPR of the resulting editor.
use editkit::cluster::fit_kmeans;
use editkit::model::{EditModel, EditRequest};
use editkit::train::{derive_rng, train, RunConfig, Toggles};
use editkit::world::{attribute_codebook, Dataset};
use rand::Rng;

fn main() {
    // Reuse the standard pipeline up to norm stats via a baseline run.
    let cfg = RunConfig { toggles: Toggles::ST_SDA, seed: 11, steps: 1, ..RunConfig::default() };
    let a = train(&cfg).unwrap();
    let ds = Dataset::generate(&a.config.world).unwrap();
    let gt = &ds.ground_truth;
    let cb = attribute_codebook(gt, a.config.codebook_noise, a.config.seed ^ 0xC0DE_B00C);
    let mut model = a.model.clone();
    model.router = None;
    model.attach_router(fit_kmeans(&cb.embeddings, 5, 99, 100).unwrap()).unwrap();
    let router = model.router_ref().unwrap().clone();

    let d = 32usize;
    let c_gain = 1.0;
    // Collect per-cluster samples.
    let mut rng = derive_rng(11, "fit");
    let mut xs: Vec<Vec<Vec<f64>>> = vec![Vec::new(); 5];
    let mut ys: Vec<Vec<Vec<f64>>> = vec![Vec::new(); 5];
    for video in &ds.videos.train {
        for frame in &video.frames {
            for _ in 0..3 {
                let attr = rng.random_range(0..20);
                let gamma: f64 = rng.random_range(0.0..1.0);
                let req = EditRequest::new(cb.embeddings[attr].clone(), gamma, 1.0).unwrap();
                let x = model.encode(frame).unwrap();
                let (k, z) = model.routed_edit(&x, &req).unwrap();
                // Ideal output: encode of the ground-truth edited frame.
                let zt = gt.invert_obs(frame).unwrap();
                let mut zt2 = zt.clone();
                for (v, a) in zt2.iter_mut().zip(gt.attr_directions[attr].iter()) {
                    *v += c_gain * gamma * a;
                }
                let f_ideal = gt.decode_latent(&zt2).unwrap();
                let x_ideal = model.encode(&f_ideal).unwrap();
                xs[k].push(z);
                ys[k].push(x_ideal);
            }
        }
    }
    // Least squares per cluster: y = W [z;1], solved per output coordinate by
    // normal equations with tiny ridge.
    for k in 0..5 {
        let n = xs[k].len();
        let p = d + 1;
        let mut ata = vec![vec![0.0; p]; p];
        let mut aty = vec![vec![0.0; d]; p];
        for (z, y) in xs[k].iter().zip(ys[k].iter()) {
            let mut row = z.clone();
            row.push(1.0);
            for i in 0..p {
                for j in 0..p {
                    ata[i][j] += row[i] * row[j];
                }
                for j in 0..d {
                    aty[i][j] += row[i] * y[j];
                }
            }
        }
        for i in 0..p { ata[i][i] += 1e-8 * n as f64; }
        // Gaussian elimination.
        let mut aug: Vec<Vec<f64>> = (0..p).map(|i| { let mut r = ata[i].clone(); r.extend(aty[i].iter()); r }).collect();
        for col in 0..p {
            let piv = (col..p).max_by(|&i, &j| aug[i][col].abs().partial_cmp(&aug[j][col].abs()).unwrap()).unwrap();
            aug.swap(col, piv);
            let pv = aug[col][col];
            for j in col..p + d { aug[col][j] /= pv; }
            for i in 0..p {
                if i != col {
                    let f = aug[i][col];
                    if f != 0.0 { for j in col..p + d { aug[i][j] -= f * aug[col][j]; } }
                }
            }
        }
        // Write into bank k: residual form T(z) = z + Nz + b -> N = W - I.
        let wid = model.bank[k].layers[0].weight;
        let bid = model.bank[k].layers[0].bias;
        for out in 0..d {
            for inp in 0..d {
                let w = aug[inp][p + out] - if inp == out { 1.0 } else { 0.0 };
                model.store.param_mut(wid).unwrap().data[out * d + inp] = w;
            }
            model.store.param_mut(bid).unwrap().data[out] = aug[d][p + out];
        }
    }
    let _ = router;

    // Evaluate on val videos.
    let (mut tacr_hits, mut napr_hits, mut sum_dt, mut n) = (0, 0, 0.0, 0);
    for video in &ds.videos.val {
        for attr in 0..20 {
            let req = EditRequest::new(cb.embeddings[attr].clone(), 1.0, 1.0).unwrap();
            for frame in &video.frames {
                let x = model.encode(frame).unwrap();
                let fh = model.decode(&model.pseudo_edit(&x, &req).unwrap()).unwrap();
                let lo = gt.attr_logits(frame).unwrap();
                let le = gt.attr_logits(&fh).unwrap();
                let dt = le[attr] - lo[attr];
                sum_dt += dt;
                if dt >= 0.25 { tacr_hits += 1; }
                let ntmax = lo.iter().zip(le.iter()).enumerate().filter(|(j, _)| *j != attr)
                    .map(|(_, (p, q))| (p - q).abs()).fold(0.0f64, f64::max);
                if ntmax <= 0.1 { napr_hits += 1; }
                n += 1;
            }
        }
    }
    println!("ideal-fitted linear T: val meanΔt {:+.3} tacr {:.3} napr {:.3}",
        sum_dt / n as f64, tacr_hits as f64 / n as f64, napr_hits as f64 / n as f64);
}
