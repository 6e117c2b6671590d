//! Writes form files consumed by the command-line interface: the flat
//! derived form of the product immersion (for check-flat), its α with J
//! (for diagonalize), and the horosphere α whose derived span degenerates.
//!
//! Usage: cargo run --example export_form [output-dir]

use std::path::PathBuf;

use flatform::commands::{export_example1_forms, export_horosphere_form, export_inner_product_form};

fn main() {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).expect("output directory");

    let radii = [2.0, 1.0, 2.0f64.sqrt()];
    let (beta, alpha) = export_example1_forms(&radii, 0).expect("product immersion");
    let beta_path = dir.join("example1_beta.json");
    let alpha_path = dir.join("example1_alpha.json");
    beta.save(&beta_path).expect("write beta");
    alpha.save(&alpha_path).expect("write alpha");
    println!("wrote {}", beta_path.display());
    println!("wrote {}", alpha_path.display());

    let horo = export_horosphere_form(4, 0).expect("horosphere composition");
    let horo_path = dir.join("horosphere_alpha.json");
    horo.save(&horo_path).expect("write horosphere alpha");
    println!("wrote {}", horo_path.display());

    let inner_path = dir.join("inner_product.json");
    export_inner_product_form(3).save(&inner_path).expect("write inner product form");
    println!("wrote {} (not flat; check-flat exits 1 on it)", inner_path.display());
}
