use editkit::train::{train, RunConfig, SeenUnseenSplit, Toggles};
use editkit::world::WorldSpec;

fn median(mut v: Vec<f64>) -> f64 { v.sort_by(|a, b| a.partial_cmp(b).unwrap()); v[v.len() / 2] }

fn main() {
    for (offsets, pre) in [(0.5, 3000usize), (0.5, 1500), (0.55, 1500)] {
        println!("== offsets {offsets} pretrain {pre}");
        // Criterion 8 shape.
        for toggles in [Toggles::BASELINE, Toggles::ST, Toggles::ST_SDA, Toggles::FULL] {
            let (mut t, mut nn, mut i) = (vec![], vec![], vec![]);
            for seed in [11u64, 12, 13] {
                let cfg = RunConfig {
                    toggles, seed, pretrain_steps: pre,
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
        // Criterion 9 margin.
        for q in [0.1, 0.5] {
            let mut idps = vec![];
            for seed in [11u64, 12, 13] {
                let cfg = RunConfig {
                    toggles: Toggles::FULL, sparsity_rate: q, seed, pretrain_steps: pre,
                    world: WorldSpec { seed, attr_offset_scale: offsets, ..WorldSpec::default() },
                    ..RunConfig::default()
                };
                let a = train(&cfg).unwrap();
                idps.push(a.report.aggregate.id_preserve);
            }
            println!("  q {q}: idp med {:.4}", median(idps));
        }
        // Criterion 10.
        for toggles in [Toggles::BASELINE, Toggles::FULL] {
            let mut ut = vec![];
            for seed in [11u64, 12, 13] {
                let cfg = RunConfig {
                    toggles, seed, pretrain_steps: pre,
                    split: Some(SeenUnseenSplit::three_to_one(20)),
                    world: WorldSpec { seed, attr_offset_scale: offsets, ..WorldSpec::default() },
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
