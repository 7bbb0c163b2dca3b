use editkit::train::{train, RunConfig, Toggles};
use editkit::world::WorldSpec;

fn main() {
    for scale in [0.3, 0.2, 0.15] {
        println!("== attr_offset_scale {scale} (lr 0.004, steps 5000)");
        for toggles in [Toggles::BASELINE, Toggles::ST, Toggles::ST_SDA, Toggles::FULL] {
            let mut line = format!("  {:<12}", toggles.label());
            for seed in [11u64, 12, 13] {
                let cfg = RunConfig {
                    toggles, seed, learning_rate: 0.004, hidden: 64,
                    pretrain_steps: 10000, pretrain_lr: 0.025,
                    world: WorldSpec { seed, attr_offset_scale: scale, ..WorldSpec::default() },
                    ..RunConfig::default()
                };
                let a = train(&cfg).unwrap();
                let m = &a.report.aggregate;
                line.push_str(&format!(" | s{seed}: tacr {:.3} idp {:.3} napr {:.3}", m.tacr, m.id_preserve, m.napr));
            }
            println!("{line}");
        }
    }
}
