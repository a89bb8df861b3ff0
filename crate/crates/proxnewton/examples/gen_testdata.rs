//! Regenerates the checked-in test image. Run from the workspace root:
//! `cargo run -p proxnewton --example gen_testdata`

use proxnewton::{synthetic_image, write_pgm};
use std::path::Path;

fn main() {
    let out = Path::new("assets/synthetic64.pgm");
    std::fs::create_dir_all(out.parent().unwrap()).expect("mkdir assets");
    write_pgm(out, &synthetic_image(64), 255).expect("write image");
    println!("wrote {}", out.display());
}
