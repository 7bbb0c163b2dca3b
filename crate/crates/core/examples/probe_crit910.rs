use editkit::train::{train, RunConfig, SeenUnseenSplit, Toggles};
use editkit::world::WorldSpec;

fn median(mut v: Vec<f64>) -> f64 { v.sort_by(|a, b| a.partial_cmp(b).unwrap()); v[v.len() / 2] }

fn main() {
    // Criterion 9: sparsity sweep, idp(q=0.5) <= idp(q=0.1), median of 3 seeds.
    for q in [0.0, 0.1, 0.3, 0.5] {
        let mut idps = vec![];
        let mut tacrs = vec![];
        for seed in [11u64, 12, 13] {
            let cfg = RunConfig {
                toggles: if q > 0.0 { Toggles::FULL } else { Toggles::ST_SDA },
                sparsity_rate: q, seed,
                world: WorldSpec { seed, ..WorldSpec::default() },
                ..RunConfig::default()
            };
            let a = train(&cfg).unwrap();
            idps.push(a.report.aggregate.id_preserve);
            tacrs.push(a.report.aggregate.tacr);
            if let Some(sp) = &a.sparsity {
                assert!(sp.satisfied, "q {q} seed {seed} cardinality unmet");
            }
        }
        println!("q {q}: idp med {:.4} tacr med {:.3}", median(idps), median(tacrs));
    }
    // Criterion 10: unseen TACR trained vs baseline, median of 3 seeds.
    for toggles in [Toggles::BASELINE, Toggles::FULL] {
        let mut unseen_tacrs = vec![];
        for seed in [11u64, 12, 13] {
            let cfg = RunConfig {
                toggles, seed,
                split: Some(SeenUnseenSplit::three_to_one(20)),
                world: WorldSpec { seed, ..WorldSpec::default() },
                ..RunConfig::default()
            };
            let a = train(&cfg).unwrap();
            unseen_tacrs.push(a.report.unseen.unwrap().tacr);
        }
        println!("unseen {} tacr med {:.3} {:?}", toggles.label(), median(unseen_tacrs.clone()), unseen_tacrs);
    }
}
