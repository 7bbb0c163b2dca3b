use editkit::train::{train, RunConfig, Toggles};
use editkit::world::WorldSpec;

fn median(mut v: Vec<f64>) -> f64 { v.sort_by(|a, b| a.partial_cmp(b).unwrap()); v[v.len() / 2] }

fn main() {
    for hidden in [48usize, 64] {
        println!("== hidden {hidden} offsets 0.5 pretrain 3000");
        for q in [0.1, 0.3, 0.5] {
            let (mut idps, mut tacrs, mut naprs) = (vec![], vec![], vec![]);
            for seed in [11u64, 12, 13] {
                let cfg = RunConfig {
                    toggles: Toggles::FULL, sparsity_rate: q, seed, hidden,
                    pretrain_steps: 3000,
                    world: WorldSpec { seed, attr_offset_scale: 0.5, ..WorldSpec::default() },
                    ..RunConfig::default()
                };
                let a = train(&cfg).unwrap();
                idps.push(a.report.aggregate.id_preserve);
                tacrs.push(a.report.aggregate.tacr);
                naprs.push(a.report.aggregate.napr);
            }
            println!("  q {q}: idp med {:.4} tacr {:.3} napr {:.3}", median(idps), median(tacrs), median(naprs));
        }
        // Also check the trained bank's per-region norms and group sensitivity.
        let cfg = RunConfig {
            toggles: Toggles::ST_SDA, seed: 12, hidden, pretrain_steps: 3000,
            world: WorldSpec { seed: 12, attr_offset_scale: 0.5, ..WorldSpec::default() },
            ..RunConfig::default()
        };
        let a = train(&cfg).unwrap();
        let mut by_region = vec![0.0f64; 8];
        for k in 0..a.model.bank.len() {
            for r in 0..8 {
                let g = a.model.store.group_id(&format!("bank{k}.r{r}")).unwrap();
                by_region[r] += a.model.store.group_norm(g).unwrap();
            }
        }
        println!("  bank norms by region (0=motion 1-2=identity 3-7=attr): {:?}",
            by_region.iter().map(|x| (x * 100.0).round() / 100.0).collect::<Vec<_>>());
    }
}
