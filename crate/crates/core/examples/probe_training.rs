use editkit::train::{train, RunConfig, Toggles};
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    for toggles in [Toggles::BASELINE, Toggles::ST, Toggles::ST_SDA, Toggles::FULL] {
        let cfg = RunConfig { toggles, seed: 11, ..RunConfig::default() };
        let t = Instant::now();
        let a = train(&cfg).unwrap();
        let m = &a.report.aggregate;
        let sat = a.sparsity.as_ref().map(|s| s.satisfied);
        let final_recon = a.pretrain_log.last().map(|x| x.recon_mse).unwrap_or(f64::NAN);
        println!(
            "{:<12} tl {:.4} tg {:.4} idp {:.4} tacr {:.3} napr {:.3}  recon {:.2e} sat {:?} best {:?}  [{:.1}s]",
            toggles.label(), m.tl_id, m.tg_id, m.id_preserve, m.tacr, m.napr, final_recon, sat, a.best_val, t.elapsed().as_secs_f64()
        );
    }
    println!("total {:.1}s", t0.elapsed().as_secs_f64());
}
