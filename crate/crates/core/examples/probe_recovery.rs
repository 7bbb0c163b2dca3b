use editkit::cluster::{fit_kmeans, same_partition};
use editkit::world::{attribute_codebook, generate_world, WorldSpec};

fn main() {
    for coherence in [0.06, 0.09, 0.2] {
        for noise in [0.02, 0.05] {
            let mut ok = 0;
            let n = 40;
            for seed in 0..n {
                let spec = WorldSpec { seed: 1000 + seed, bundle_coherence: coherence, ..WorldSpec::default() };
                let (gt, _) = generate_world(&spec).unwrap();
                let cb = attribute_codebook(&gt, noise, 2000 + seed);
                let router = fit_kmeans(&cb.embeddings, 5, 3000 + seed, 100).unwrap();
                if same_partition(&router.assignment, &gt.bundle_of) { ok += 1; }
            }
            println!("coherence {coherence:.2} noise {noise:.2}: {ok}/{n} recovered");
        }
    }
}
