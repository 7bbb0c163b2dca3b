use editkit::train::{train, RunConfig, Toggles};

fn median(mut v: Vec<f64>) -> f64 { v.sort_by(|a, b| a.partial_cmp(b).unwrap()); v[v.len() / 2] }

fn main() {
    for (st_lr, steps) in [(0.004, 20000), (0.002, 20000), (0.002, 50000)] {
        println!("== st_lr {st_lr} steps {steps}");
        for toggles in [Toggles::BASELINE, Toggles::ST_SDA, Toggles::FULL] {
            let (mut tacrs, mut idps, mut naprs) = (vec![], vec![], vec![]);
            for seed in [11u64, 12, 13] {
                let cfg = RunConfig {
                    toggles, seed, learning_rate: st_lr, steps, hidden: 64,
                    pretrain_steps: 10000, pretrain_lr: 0.025, val_every: steps / 20,
                    ..RunConfig::default()
                };
                let a = train(&cfg).unwrap();
                tacrs.push(a.report.aggregate.tacr);
                idps.push(a.report.aggregate.id_preserve);
                naprs.push(a.report.aggregate.napr);
            }
            println!("  {:<12} tacr med {:.3} | idp med {:.3} | napr med {:.3}",
                toggles.label(), median(tacrs), median(idps), median(naprs));
        }
    }
}
