use editkit::model::EditModel;
use editkit::nn::{Activation, DenseNet, Grouping, ParamStore};
use editkit::train::{derive_rng, pretrain};
use editkit::world::{Dataset, WorldSpec};

fn build(d: usize, enc_w: &[usize], dec_w: &[usize], k: usize, regions: usize, rng: &mut impl rand::Rng) -> EditModel {
    let mut store = ParamStore::new();
    let widths = |ws: &[usize]| { let mut v = vec![d]; v.extend_from_slice(ws); v.push(d); v };
    let acts = |ws: &[usize]| { let mut a = vec![Activation::Tanh; ws.len()]; a.push(Activation::Identity); a };
    let encoder = DenseNet::build(&mut store, "enc", &widths(enc_w), &acts(enc_w), Grouping::PerLayer, 1.0, rng).unwrap();
    let decoder = DenseNet::build(&mut store, "dec", &widths(dec_w), &acts(dec_w), Grouping::PerLayer, 1.0, rng).unwrap();
    let mut bank = Vec::new();
    for i in 0..k {
        bank.push(DenseNet::build(&mut store, &format!("bank{i}"), &[d, d], &[Activation::Identity], Grouping::OutputRegions(regions), 0.01, rng).unwrap());
    }
    store.validate_partition().unwrap();
    EditModel { store, encoder, decoder, bank, norm: None, router: None, obs_dim: d, latent_dim: d, region_count: regions }
}

fn main() {
    let ds = Dataset::generate(&WorldSpec { attr_offset_scale: 0.2, ..WorldSpec::default() }).unwrap();
    for (enc_w, dec_w) in [(vec![64usize], vec![64usize]), (vec![64], vec![64, 64]), (vec![96], vec![96])] {
        let mut model = build(32, &enc_w, &dec_w, 5, 8, &mut derive_rng(7, "init"));
        let log = pretrain(&mut model, &ds, 12000, 0.003, &mut derive_rng(7, "pretrain")).unwrap();
        let tail_r: f64 = log.iter().rev().take(200).map(|x| x.recon_mse).sum::<f64>() / 200.0;
        let tail_a: f64 = log.iter().rev().take(200).map(|x| x.align_mse).sum::<f64>() / 200.0;
        println!("enc {enc_w:?} dec {dec_w:?}: recon {tail_r:.2e} align {tail_a:.2e}");
    }
}
