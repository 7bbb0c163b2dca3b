use editkit::model::EditModel;
use editkit::nn::{Activation, DenseNet, Grouping, ParamStore};
use editkit::train::{derive_rng, pretrain};
use editkit::world::{Dataset, WorldSpec};

fn build_deep(d: usize, widths: &[usize], k: usize, regions: usize, rng: &mut impl rand::Rng) -> EditModel {
    let mut store = ParamStore::new();
    let encoder = DenseNet::build(&mut store, "enc", &[d, d], &[Activation::Identity], Grouping::PerLayer, 1.0, rng).unwrap();
    let mut dec_widths = vec![d];
    dec_widths.extend_from_slice(widths);
    dec_widths.push(d);
    let mut acts = vec![Activation::Tanh; widths.len()];
    acts.push(Activation::Identity);
    let decoder = DenseNet::build(&mut store, "dec", &dec_widths, &acts, Grouping::PerLayer, 1.0, rng).unwrap();
    let mut bank = Vec::new();
    for i in 0..k {
        bank.push(DenseNet::build(&mut store, &format!("bank{i}"), &[d, d], &[Activation::Identity], Grouping::OutputRegions(regions), 0.01, rng).unwrap());
    }
    store.validate_partition().unwrap();
    EditModel { store, encoder, decoder, bank, norm: None, router: None, obs_dim: d, latent_dim: d, region_count: regions }
}

fn main() {
    let ds = Dataset::generate(&WorldSpec { attr_offset_scale: 0.2, ..WorldSpec::default() }).unwrap();
    for widths in [vec![64usize], vec![64, 64], vec![96, 96], vec![48, 48, 48]] {
        let mut model = build_deep(32, &widths, 5, 8, &mut derive_rng(7, "init"));
        let log = pretrain(&mut model, &ds, 12000, 0.003, &mut derive_rng(7, "pretrain")).unwrap();
        let tail_r: f64 = log.iter().rev().take(200).map(|x| x.recon_mse).sum::<f64>() / 200.0;
        let tail_a: f64 = log.iter().rev().take(200).map(|x| x.align_mse).sum::<f64>() / 200.0;
        println!("decoder {widths:?}: recon {tail_r:.2e} align {tail_a:.2e}");
    }
}
