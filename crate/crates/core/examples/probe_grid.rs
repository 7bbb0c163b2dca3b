use editkit::train::{train, RunConfig, Toggles};

fn main() {
    for st_lr in [0.002, 0.004, 0.008] {
        println!("== st_lr {st_lr} (new defaults)");
        for toggles in [Toggles::BASELINE, Toggles::ST, Toggles::ST_SDA, Toggles::FULL] {
            let mut line = format!("  {:<12}", toggles.label());
            for seed in [11u64, 12, 13] {
                let cfg = RunConfig { toggles, seed, learning_rate: st_lr, ..RunConfig::default() };
                let a = train(&cfg).unwrap();
                let m = &a.report.aggregate;
                line.push_str(&format!(" | tacr {:.3} idp {:.3} napr {:.3}", m.tacr, m.id_preserve, m.napr));
            }
            println!("{line}");
        }
    }
}
