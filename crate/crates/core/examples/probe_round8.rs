use editkit::train::{train, RunConfig, SeenUnseenSplit, Toggles};
use editkit::world::WorldSpec;

fn median(mut v: Vec<f64>) -> f64 { v.sort_by(|a, b| a.partial_cmp(b).unwrap()); v[v.len() / 2] }

fn world(seed: u64, ids: usize) -> WorldSpec {
    WorldSpec {
        seed, num_identities: ids, train_videos: ids * 3 / 4, val_videos: ids / 4,
        attr_offset_scale: 0.55, ..WorldSpec::default()
    }
}

fn main() {
    for ids in [48usize, 64] {
        println!("== {ids} identities (hidden 64, pretrain 6000, offsets 0.55)");
        for seeds in [[11u64, 12, 13], [21, 22, 23], [31, 32, 33]] {
            let mut idp_b = vec![]; let mut idp_f = vec![];
            let mut tacr_b = vec![]; let mut tacr_f = vec![];
            let mut napr_b = vec![]; let mut napr_f = vec![];
            let mut un_b = vec![]; let mut un_f = vec![];
            for &seed in &seeds {
                for (toggles, idp, tacr, napr) in [
                    (Toggles::BASELINE, &mut idp_b, &mut tacr_b, &mut napr_b),
                    (Toggles::FULL, &mut idp_f, &mut tacr_f, &mut napr_f),
                ] {
                    let cfg = RunConfig {
                        toggles, seed, hidden: 64, pretrain_steps: 6000,
                        world: world(seed, ids), ..RunConfig::default()
                    };
                    let a = train(&cfg).unwrap();
                    idp.push(a.report.aggregate.id_preserve);
                    tacr.push(a.report.aggregate.tacr);
                    napr.push(a.report.aggregate.napr);
                }
                for (toggles, un) in [(Toggles::BASELINE, &mut un_b), (Toggles::FULL, &mut un_f)] {
                    let cfg = RunConfig {
                        toggles, seed, hidden: 64, pretrain_steps: 6000,
                        split: Some(SeenUnseenSplit::three_to_one(20)),
                        world: world(seed, ids), ..RunConfig::default()
                    };
                    let a = train(&cfg).unwrap();
                    un.push(a.report.unseen.unwrap().tacr);
                }
            }
            println!("  seeds {seeds:?}: idp {:.4} vs {:.4} {} | tacr {:.3} vs {:.3} {} | napr {:.3} vs {:.3} {} | unseen {:.3} vs {:.3} {}",
                median(idp_f.clone()), median(idp_b.clone()), if median(idp_f) >= median(idp_b) { "OK" } else { "FAIL" },
                median(tacr_f.clone()), median(tacr_b.clone()), if median(tacr_f) >= median(tacr_b) { "OK" } else { "FAIL" },
                median(napr_f.clone()), median(napr_b.clone()), if median(napr_f) >= median(napr_b) { "OK" } else { "FAIL" },
                median(un_f.clone()), median(un_b.clone()), if median(un_f) >= median(un_b) { "OK" } else { "FAIL" });
        }
    }
}
