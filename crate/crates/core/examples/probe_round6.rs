use editkit::train::{train, RunConfig, SeenUnseenSplit, Toggles};
use editkit::world::WorldSpec;

fn median(mut v: Vec<f64>) -> f64 { v.sort_by(|a, b| a.partial_cmp(b).unwrap()); v[v.len() / 2] }

fn main() {
    for (pre, offsets) in [(4500usize, 0.5), (6000, 0.5), (6000, 0.55), (9000, 0.55)] {
        println!("== pretrain {pre} offsets {offsets} (hidden 64, steps 20000, seeds 21-23)");
        for toggles in [Toggles::BASELINE, Toggles::ST, Toggles::FULL] {
            let (mut t, mut nn, mut i) = (vec![], vec![], vec![]);
            for seed in [21u64, 22, 23] {
                let cfg = RunConfig {
                    toggles, seed, hidden: 64, pretrain_steps: pre,
                    world: WorldSpec { seed, attr_offset_scale: offsets, ..WorldSpec::default() },
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
            for seed in [21u64, 22, 23] {
                let cfg = RunConfig {
                    toggles, seed, hidden: 64, pretrain_steps: pre,
                    split: Some(SeenUnseenSplit::three_to_one(20)),
                    world: WorldSpec { seed, attr_offset_scale: offsets, ..WorldSpec::default() },
                    ..RunConfig::default()
                };
                let a = train(&cfg).unwrap();
                ut.push(a.report.unseen.unwrap().tacr);
            }
            println!("  unseen {} tacr med {:.3}", toggles.label(), median(ut));
        }
    }
}
