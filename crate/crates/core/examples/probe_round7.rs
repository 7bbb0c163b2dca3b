use editkit::train::{train, RunConfig, SeenUnseenSplit, Toggles};
use editkit::world::WorldSpec;

fn median(mut v: Vec<f64>) -> f64 { v.sort_by(|a, b| a.partial_cmp(b).unwrap()); v[v.len() / 2] }
const OFF: f64 = 0.55;
const PRE: usize = 6000;

fn main() {
    for seeds in [[11u64, 12, 13], [21, 22, 23], [31, 32, 33]] {
        println!("== seeds {seeds:?} (hidden 64, pretrain {PRE}, offsets {OFF})");
        for toggles in [Toggles::BASELINE, Toggles::ST, Toggles::ST_SDA, Toggles::FULL] {
            let (mut t, mut nn, mut i) = (vec![], vec![], vec![]);
            for &seed in &seeds {
                let cfg = RunConfig {
                    toggles, seed, hidden: 64, pretrain_steps: PRE,
                    world: WorldSpec { seed, attr_offset_scale: OFF, ..WorldSpec::default() },
                    ..RunConfig::default()
                };
                let a = train(&cfg).unwrap();
                t.push(a.report.aggregate.tacr);
                nn.push(a.report.aggregate.napr);
                i.push(a.report.aggregate.id_preserve);
            }
            println!("  {:<12} med tacr {:.3} napr {:.3} idp {:.4}", toggles.label(), median(t), median(nn), median(i));
        }
        for toggles in [Toggles::BASELINE, Toggles::FULL] {
            let mut ut = vec![];
            for &seed in &seeds {
                let cfg = RunConfig {
                    toggles, seed, hidden: 64, pretrain_steps: PRE,
                    split: Some(SeenUnseenSplit::three_to_one(20)),
                    world: WorldSpec { seed, attr_offset_scale: OFF, ..WorldSpec::default() },
                    ..RunConfig::default()
                };
                let a = train(&cfg).unwrap();
                ut.push(a.report.unseen.unwrap().tacr);
            }
            println!("  unseen {} tacr med {:.3}", toggles.label(), median(ut));
        }
        for q in [0.0, 0.1, 0.3, 0.5] {
            let mut idps = vec![];
            for &seed in &seeds {
                let cfg = RunConfig {
                    toggles: if q > 0.0 { Toggles::FULL } else { Toggles::ST_SDA },
                    sparsity_rate: q, seed, hidden: 64, pretrain_steps: PRE,
                    world: WorldSpec { seed, attr_offset_scale: OFF, ..WorldSpec::default() },
                    ..RunConfig::default()
                };
                let a = train(&cfg).unwrap();
                idps.push(a.report.aggregate.id_preserve);
            }
            println!("  q {q}: idp med {:.4}", median(idps));
        }
    }
}
