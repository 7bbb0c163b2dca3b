use editkit::train::{train, RunConfig, Toggles};

fn main() {
    for (lr, steps) in [(0.005, 5000), (0.005, 20000), (0.01, 20000)] {
        let cfg = RunConfig { toggles: Toggles::ST_SDA, seed: 11, learning_rate: lr, steps, ..RunConfig::default() };
        let a = train(&cfg).unwrap();
        let m = &a.report.aggregate;
        // Mean loss terms over the last 200 train steps.
        let tail = &a.train_log[a.train_log.len().saturating_sub(200)..];
        let n = tail.len() as f64;
        let (mut id, mut faith, mut gen) = (0.0, 0.0, 0.0);
        for r in tail { id += r.l_id; faith += r.l_faith; gen += r.l_gen; }
        let head = &a.train_log[..200.min(a.train_log.len())];
        let hn = head.len() as f64;
        let (mut id0, mut faith0, mut gen0) = (0.0, 0.0, 0.0);
        for r in head { id0 += r.l_id; faith0 += r.l_faith; gen0 += r.l_gen; }
        println!("lr {lr} steps {steps}:");
        println!("  first200: l_id {:.3} l_faith {:.3} l_gen {:.4}", id0/hn, faith0/hn, gen0/hn);
        println!("  last200 : l_id {:.3} l_faith {:.3} l_gen {:.4}", id/n, faith/n, gen/n);
        println!("  metrics : tl {:.4} tg {:.4} idp {:.4} tacr {:.3} napr {:.3}", m.tl_id, m.tg_id, m.id_preserve, m.tacr, m.napr);
    }
}
