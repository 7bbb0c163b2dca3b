use editkit::train::{train, RunConfig, Toggles};

fn main() {
    for (lr, steps) in [(0.002, 20000), (0.002, 60000), (0.001, 60000), (0.0005, 100000)] {
        let cfg = RunConfig { toggles: Toggles::ST_SDA, seed: 11, learning_rate: lr, steps, val_every: steps / 20, ..RunConfig::default() };
        let t = std::time::Instant::now();
        let a = train(&cfg).unwrap();
        let m = &a.report.aggregate;
        let tail = &a.train_log[a.train_log.len() - 500..];
        let n = tail.len() as f64;
        let (mut id, mut faith) = (0.0, 0.0);
        for r in tail { id += r.l_id; faith += r.l_faith; }
        println!(
            "lr {lr:<7} steps {steps:<7} l_id {:.3} l_faith {:+.3} | tl {:.4} tg {:.4} idp {:.4} tacr {:.3} napr {:.3} [{:.0}s]",
            id / n, faith / n, m.tl_id, m.tg_id, m.id_preserve, m.tacr, m.napr, t.elapsed().as_secs_f64()
        );
    }
}
