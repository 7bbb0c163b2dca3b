use editkit::train::{train, RunConfig, SeenUnseenSplit, Toggles};
use editkit::world::WorldSpec;

fn median(mut v: Vec<f64>) -> f64 { v.sort_by(|a, b| a.partial_cmp(b).unwrap()); v[v.len() / 2] }

fn main() {
    for seeds in [[11u64, 12, 13], [21, 22, 23]] {
        println!("== seeds {seeds:?} (hidden 64, offsets 0.5, pretrain 3000)");
        for toggles in [Toggles::BASELINE, Toggles::ST, Toggles::ST_SDA, Toggles::FULL] {
            let (mut t, mut nn, mut i) = (vec![], vec![], vec![]);
            for &seed in &seeds {
                let cfg = RunConfig {
                    toggles, seed, hidden: 64, pretrain_steps: 3000,
                    world: WorldSpec { seed, attr_offset_scale: 0.5, ..WorldSpec::default() },
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
                    toggles, seed, hidden: 64, pretrain_steps: 3000,
                    split: Some(SeenUnseenSplit::three_to_one(20)),
                    world: WorldSpec { seed, attr_offset_scale: 0.5, ..WorldSpec::default() },
                    ..RunConfig::default()
                };
                let a = train(&cfg).unwrap();
                ut.push(a.report.unseen.unwrap().tacr);
            }
            println!("  unseen {} tacr med {:.3} {:?}", toggles.label(),
                median(ut.clone()), ut.iter().map(|x| (x * 1000.0).round() / 1000.0).collect::<Vec<_>>());
        }
    }
}
