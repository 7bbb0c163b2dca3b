use editkit::train::{train, RunConfig, Toggles};
use editkit::world::WorldSpec;

fn main() {
    for (scale, st_lr) in [(0.35, 0.004), (0.4, 0.004), (0.4, 0.008)] {
        println!("== offsets {scale} st_lr {st_lr} (pretrain 3000, steps 20000)");
        for toggles in [Toggles::BASELINE, Toggles::ST, Toggles::ST_SDA, Toggles::FULL] {
            let mut line = format!("  {:<12}", toggles.label());
            for seed in [11u64, 12, 13] {
                let cfg = RunConfig {
                    toggles, seed, learning_rate: st_lr, steps: 20000, pretrain_steps: 3000,
                    val_every: 1000,
                    world: WorldSpec { seed, attr_offset_scale: scale, ..WorldSpec::default() },
                    ..RunConfig::default()
                };
                let a = train(&cfg).unwrap();
                let m = &a.report.aggregate;
                line.push_str(&format!(" | tacr {:.3} napr {:.3} idp {:.4}", m.tacr, m.napr, m.id_preserve));
            }
            println!("{line}");
        }
    }
}
