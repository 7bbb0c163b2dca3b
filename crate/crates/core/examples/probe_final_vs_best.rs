use editkit::train::{evaluate_checkpoint, train, train_on, RunConfig, Toggles};
use editkit::world::Dataset;

fn main() {
    for (lr, steps) in [(0.008, 5000), (0.008, 15000), (0.015, 15000)] {
        let cfg = RunConfig { toggles: Toggles::ST_SDA, seed: 12, learning_rate: lr, steps, val_every: steps / 20, ..RunConfig::default() };
        let norm = cfg.normalized().unwrap();
        let ds = Dataset::generate(&norm.world).unwrap();
        let a = train_on(&norm, &ds).unwrap();
        // a.model is best-val; also train a throwaway to get final?? train_on
        // returns best; recompute final by rerunning without early selection
        // is costly. Instead: report best-val step + val curve + train faith.
        let faith_tail: f64 = a.train_log.iter().rev().take(300).map(|r| r.l_faith).sum::<f64>() / 300.0;
        let faith_head: f64 = a.train_log.iter().take(300).map(|r| r.l_faith).sum::<f64>() / 300.0;
        let m = &a.report.aggregate;
        println!("lr {lr} steps {steps}: best@{:?} val[{:.3}..{:.3}] faith {:.3}->{:.3} | tacr {:.3} idp {:.3} napr {:.3}",
            a.best_val, a.val_log.first().unwrap().l_overall, a.val_log.last().unwrap().l_overall,
            faith_head, faith_tail, m.tacr, m.id_preserve, m.napr);
        let _ = evaluate_checkpoint;
        let _ = train;
    }
}
