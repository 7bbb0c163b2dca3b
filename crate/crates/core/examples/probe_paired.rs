use editkit::train::{train, RunConfig, SeenUnseenSplit, Toggles};
use editkit::world::WorldSpec;

fn median(mut v: Vec<f64>) -> f64 { v.sort_by(|a, b| a.partial_cmp(b).unwrap()); v[v.len() / 2] }

fn main() {
    for offsets in [0.52f64, 0.55] {
        println!("== offsets {offsets} (96 ids, hidden 64, pretrain 6000) paired diffs full-baseline per seed");
        let seeds: Vec<u64> = vec![11, 12, 13, 21, 22, 23, 31, 32, 33];
        let (mut dt, mut dn, mut di, mut du, mut dst) = (vec![], vec![], vec![], vec![], vec![]);
        for &seed in &seeds {
            let world = WorldSpec { seed, attr_offset_scale: offsets, ..WorldSpec::default() };
            let mk = |toggles, split: bool| RunConfig {
                toggles, seed, hidden: 64, pretrain_steps: 6000,
                split: if split { Some(SeenUnseenSplit::three_to_one(20)) } else { None },
                world: world.clone(), ..RunConfig::default()
            };
            let b = train(&mk(Toggles::BASELINE, false)).unwrap();
            let st = train(&mk(Toggles::ST, false)).unwrap();
            let f = train(&mk(Toggles::FULL, false)).unwrap();
            let bu = train(&mk(Toggles::BASELINE, true)).unwrap();
            let fu = train(&mk(Toggles::FULL, true)).unwrap();
            dt.push(f.report.aggregate.tacr - b.report.aggregate.tacr);
            dn.push(f.report.aggregate.napr - b.report.aggregate.napr);
            di.push(f.report.aggregate.id_preserve - b.report.aggregate.id_preserve);
            dst.push(st.report.aggregate.tacr - b.report.aggregate.tacr);
            du.push(fu.report.unseen.unwrap().tacr - bu.report.unseen.unwrap().tacr);
        }
        let fmt = |v: &Vec<f64>| v.iter().map(|x| (x * 10000.0).round() / 10000.0).collect::<Vec<_>>();
        println!("  d_tacr  {:?} med {:+.4}", fmt(&dt), median(dt.clone()));
        println!("  d_st    {:?} med {:+.4}", fmt(&dst), median(dst.clone()));
        println!("  d_napr  {:?} med {:+.4}", fmt(&dn), median(dn.clone()));
        println!("  d_idp   {:?} med {:+.4}", fmt(&di), median(di.clone()));
        println!("  d_unsn  {:?} med {:+.4}", fmt(&du), median(du.clone()));
    }
}
