use editkit::train::{train, RunConfig, SeenUnseenSplit, Toggles};
use editkit::world::WorldSpec;

fn median(mut v: Vec<f64>) -> f64 { v.sort_by(|a, b| a.partial_cmp(b).unwrap()); v[v.len() / 2] }

fn main() {
    for (hidden, pre) in [(40usize, 3000usize), (40, 4500), (48, 3000)] {
        println!("== hidden {hidden} pretrain {pre} (96 ids, offsets 0.55)");
        let seeds: Vec<u64> = vec![11, 12, 13, 21, 22, 23];
        let (mut dt, mut dst, mut dn, mut di, mut du, mut dq) = (vec![], vec![], vec![], vec![], vec![], vec![]);
        for &seed in &seeds {
            let world = WorldSpec { seed, attr_offset_scale: 0.55, ..WorldSpec::default() };
            let mk = |toggles, split: bool, q: f64| RunConfig {
                toggles, seed, hidden, pretrain_steps: pre, sparsity_rate: q,
                split: if split { Some(SeenUnseenSplit::three_to_one(20)) } else { None },
                world: world.clone(), ..RunConfig::default()
            };
            let b = train(&mk(Toggles::BASELINE, false, 0.1)).unwrap();
            let st = train(&mk(Toggles::ST, false, 0.1)).unwrap();
            let f = train(&mk(Toggles::FULL, false, 0.1)).unwrap();
            let f5 = train(&mk(Toggles::FULL, false, 0.5)).unwrap();
            let bu = train(&mk(Toggles::BASELINE, true, 0.1)).unwrap();
            let fu = train(&mk(Toggles::FULL, true, 0.1)).unwrap();
            dt.push(f.report.aggregate.tacr - b.report.aggregate.tacr);
            dst.push(st.report.aggregate.tacr - b.report.aggregate.tacr);
            dn.push(f.report.aggregate.napr - b.report.aggregate.napr);
            di.push(f.report.aggregate.id_preserve - b.report.aggregate.id_preserve);
            du.push(fu.report.unseen.unwrap().tacr - bu.report.unseen.unwrap().tacr);
            dq.push(f5.report.aggregate.id_preserve - f.report.aggregate.id_preserve);
        }
        let fmt = |v: &Vec<f64>| v.iter().map(|x| (x * 10000.0).round() / 10000.0).collect::<Vec<_>>();
        println!("  d_tacr {:?} med {:+.4}", fmt(&dt), median(dt.clone()));
        println!("  d_st   {:?} med {:+.4}", fmt(&dst), median(dst.clone()));
        println!("  d_napr {:?} med {:+.4}", fmt(&dn), median(dn.clone()));
        println!("  d_idp  {:?} med {:+.4}", fmt(&di), median(di.clone()));
        println!("  d_unsn {:?} med {:+.4}", fmt(&du), median(du.clone()));
        println!("  d_q5   {:?} med {:+.4} (want <= 0)", fmt(&dq), median(dq.clone()));
    }
}
