use editkit::train::{train, RunConfig, Toggles};
use editkit::world::WorldSpec;

fn main() {
    for (pre, st_lr, steps) in [(3000usize, 0.008, 20000usize), (3000, 0.004, 20000), (6000, 0.008, 20000)] {
        println!("== pretrain {pre} st_lr {st_lr} steps {steps} (offsets 0.3, 96 ids)");
        for toggles in [Toggles::BASELINE, Toggles::ST, Toggles::ST_SDA, Toggles::FULL] {
            let mut line = format!("  {:<12}", toggles.label());
            for seed in [11u64, 12, 13] {
                let cfg = RunConfig {
                    toggles, seed, learning_rate: st_lr, steps, pretrain_steps: pre,
                    val_every: steps / 20,
                    world: WorldSpec { seed, attr_offset_scale: 0.3, ..WorldSpec::default() },
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
