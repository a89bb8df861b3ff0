//! The checked-in test image must stay in sync with its generator. Regenerate
//! with `cargo run -p proxnewton --example gen_testdata` after changing
//! `synthetic_image`.

use proxnewton::{read_pgm, synthetic_image};
use std::path::Path;

#[test]
fn shipped_image_matches_generator_within_quantization() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets/synthetic64.pgm");
    let img = read_pgm(&path).unwrap();
    let generated = synthetic_image(64);
    assert_eq!((img.width, img.height), (64, 64));
    // 8-bit quantization moves a pixel by at most half a gray step
    let half_step = 0.5 / 255.0;
    for (i, (a, b)) in img.pixels.iter().zip(&generated.pixels).enumerate() {
        assert!(
            (a - b).abs() <= half_step + 1e-12,
            "pixel {i}: file has {a}, generator gives {b}"
        );
    }
}
