use editkit::train::{train, RunConfig, Toggles};
use editkit::world::WorldSpec;
const OFFSET: f64 = 0.45;

fn median(mut v: Vec<f64>) -> f64 { v.sort_by(|a, b| a.partial_cmp(b).unwrap()); v[v.len() / 2] }

fn main() {
    for (st_lr, steps) in [(0.005, 20000)] {
        println!("== lr {st_lr} steps {steps} offsets {OFFSET} pretrain 3000");
        for seeds in [[11u64, 12, 13], [21, 22, 23]] {
            for toggles in [Toggles::BASELINE, Toggles::ST, Toggles::ST_SDA, Toggles::FULL] {
                let (mut t, mut nn, mut i) = (vec![], vec![], vec![]);
                for &seed in &seeds {
                    let cfg = RunConfig {
                        toggles, seed, learning_rate: st_lr, steps, pretrain_steps: 3000,
                        val_every: 1000,
                        world: WorldSpec { seed, attr_offset_scale: OFFSET, ..WorldSpec::default() },
                        ..RunConfig::default()
                    };
                    let a = train(&cfg).unwrap();
                    t.push(a.report.aggregate.tacr);
                    nn.push(a.report.aggregate.napr);
                    i.push(a.report.aggregate.id_preserve);
                }
                println!("  seeds {:?} {:<12} med tacr {:.3} napr {:.3} idp {:.4}",
                    seeds, toggles.label(), median(t), median(nn), median(i));
            }
        }
    }
}
