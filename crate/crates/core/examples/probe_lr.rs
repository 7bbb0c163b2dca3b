use editkit::train::{train, RunConfig, Toggles};

fn main() {
    for lr in [0.02, 0.01, 0.005, 0.002, 0.001] {
        let cfg = RunConfig { toggles: Toggles::FULL, seed: 11, learning_rate: lr, ..RunConfig::default() };
        let a = train(&cfg).unwrap();
        let m = &a.report.aggregate;
        let vals: Vec<f64> = a.val_log.iter().map(|v| v.l_overall).collect();
        let vmin = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        println!(
            "lr {lr:<6} val first {:.3} min {:.3} last {:.3} | tl {:.4} tg {:.4} idp {:.4} tacr {:.3} napr {:.3} best@{:?}",
            vals.first().unwrap(), vmin, vals.last().unwrap(), m.tl_id, m.tg_id, m.id_preserve, m.tacr, m.napr,
            a.best_val.map(|b| b.0)
        );
    }
}
