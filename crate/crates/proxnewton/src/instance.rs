//! Reproducible experiment instances.
//!
//! Three families, all pure functions of (spec, seed):
//!
//! * `l0l2`: least squares with ridge term and ℓ0 penalty, A iid standard
//!   normal m×n with n = 5m, b iid uniform [0,1], x0 = 0.
//! * `studentt`: heavy-tail regression, n = 8m, a k = ⌊n/40⌋-sparse ground
//!   truth with entries ±10^u (u uniform), observations corrupted by
//!   Student-t noise with 4 degrees of freedom scaled by 0.1, x0 = Aᵀb.
//! * `deblur`: Gaussian blur of a grayscale image plus pixelwise Gaussian
//!   noise, restored with ℓ0-ℓ2 least squares, x0 = b.
//!
//! The RNG is ChaCha20 seeded with the spec's 64-bit seed; normals come from
//! rand_distr's Ziggurat StandardNormal, and the t₄ variate is
//! z/sqrt(χ²₄/4) with χ²₄ a sum of four squared normals. Draw order is part
//! of the format and is documented on each generator.
//!
//! Specs serialize as flat `key = value` text (keys: family, n, m, mu0, mu2,
//! nu, seed, kernel_size, kernel_std, noise_std, and width/height for the
//! deblur family). Generated instances serialize into a little-endian binary
//! container with a versioned header; see `write_instance`.

use crate::blur::BlurOperator;
use crate::linop::{DenseMatrix, LinearOperator};
use crate::pgm::GrayImage;
use crate::problem::CompositeProblem;
use crate::reg::L0Norm;
use crate::smooth::{BlurModel, LeastSquaresRidge, StudentT};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use std::fmt;
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    L0L2,
    StudentT,
    Deblur,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::L0L2 => "l0l2",
            Family::StudentT => "studentt",
            Family::Deblur => "deblur",
        }
    }

    fn tag(&self) -> u32 {
        match self {
            Family::L0L2 => 1,
            Family::StudentT => 2,
            Family::Deblur => 3,
        }
    }

    fn from_tag(tag: u32) -> Option<Family> {
        match tag {
            1 => Some(Family::L0L2),
            2 => Some(Family::StudentT),
            3 => Some(Family::Deblur),
            _ => None,
        }
    }
}

impl std::str::FromStr for Family {
    type Err = InstanceError;
    fn from_str(s: &str) -> Result<Self, InstanceError> {
        match s {
            "l0l2" => Ok(Family::L0L2),
            "studentt" => Ok(Family::StudentT),
            "deblur" => Ok(Family::Deblur),
            other => Err(InstanceError::BadSpec(format!(
                "unknown family {other:?} (expected l0l2, studentt or deblur)"
            ))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub mu0: f64,
    pub mu2: f64,
    pub nu: f64,
    pub seed: u64,
    /// Deblur only.
    pub width: usize,
    pub height: usize,
    pub kernel_size: usize,
    pub kernel_std: f64,
    pub noise_std: f64,
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad instance spec: {0}")]
    BadSpec(String),
    #[error("degenerate studentt instance: n = {n} gives an empty support (need n >= 40)")]
    DegenerateStudentT { n: usize },
    #[error("bad instance container at byte {offset}: {msg}")]
    BadContainer { offset: usize, msg: String },
}

fn bad_spec<T>(msg: impl Into<String>) -> Result<T, InstanceError> {
    Err(InstanceError::BadSpec(msg.into()))
}

impl InstanceSpec {
    /// Parses the flat `key = value` format. Unknown keys are rejected, `#`
    /// starts a comment. Dimensions may be given as n, m or both; the family
    /// aspect-ratio constraint (n = 5m for l0l2, n = 8m for studentt,
    /// n = m = width·height for deblur) fills in whichever is missing.
    pub fn parse(text: &str) -> Result<InstanceSpec, InstanceError> {
        let mut family: Option<Family> = None;
        let mut n: Option<usize> = None;
        let mut m: Option<usize> = None;
        let mut mu0: Option<f64> = None;
        let mut mu2: Option<f64> = None;
        let mut nu: Option<f64> = None;
        let mut seed: Option<u64> = None;
        let mut width: Option<usize> = None;
        let mut height: Option<usize> = None;
        let mut kernel_size: Option<usize> = None;
        let mut kernel_std: Option<f64> = None;
        let mut noise_std: Option<f64> = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = match line.split_once('=') {
                Some((k, v)) => (k.trim(), v.trim()),
                None => {
                    return bad_spec(format!("line {}: expected key = value, found {line:?}", lineno + 1))
                }
            };
            let parse_usize = || -> Result<usize, InstanceError> {
                value.parse().map_err(|_| {
                    InstanceError::BadSpec(format!("line {}: {key} needs an integer, found {value:?}", lineno + 1))
                })
            };
            let parse_f64 = || -> Result<f64, InstanceError> {
                value.parse().map_err(|_| {
                    InstanceError::BadSpec(format!("line {}: {key} needs a number, found {value:?}", lineno + 1))
                })
            };
            match key {
                "family" => family = Some(value.parse()?),
                "n" => n = Some(parse_usize()?),
                "m" => m = Some(parse_usize()?),
                "mu0" => mu0 = Some(parse_f64()?),
                "mu2" => mu2 = Some(parse_f64()?),
                "nu" => nu = Some(parse_f64()?),
                "seed" => {
                    seed = Some(value.parse().map_err(|_| {
                        InstanceError::BadSpec(format!(
                            "line {}: seed needs a 64-bit unsigned integer, found {value:?}",
                            lineno + 1
                        ))
                    })?)
                }
                "width" => width = Some(parse_usize()?),
                "height" => height = Some(parse_usize()?),
                "kernel_size" => kernel_size = Some(parse_usize()?),
                "kernel_std" => kernel_std = Some(parse_f64()?),
                "noise_std" => noise_std = Some(parse_f64()?),
                other => return bad_spec(format!("line {}: unknown key {other:?}", lineno + 1)),
            }
        }

        let family = match family {
            Some(f) => f,
            None => return bad_spec("missing required key family"),
        };

        let (n, m, width, height) = match family {
            Family::L0L2 => resolve_ratio(n, m, 5, "l0l2")?,
            Family::StudentT => resolve_ratio(n, m, 8, "studentt")?,
            Family::Deblur => {
                let width = width.unwrap_or(64);
                let height = height.unwrap_or(64);
                if width == 0 || height == 0 {
                    return bad_spec("deblur width and height must be positive");
                }
                let pixels = width * height;
                if let Some(n) = n {
                    if n != pixels {
                        return bad_spec(format!("deblur needs n = width*height, got n={n} vs {pixels}"));
                    }
                }
                if let Some(m) = m {
                    if m != pixels {
                        return bad_spec(format!("deblur needs m = width*height, got m={m} vs {pixels}"));
                    }
                }
                (pixels, pixels, width, height)
            }
        };

        let spec = InstanceSpec {
            family,
            n,
            m,
            mu0: mu0.unwrap_or(1e-2),
            mu2: mu2.unwrap_or(0.0),
            nu: nu.unwrap_or(1.0),
            seed: seed.unwrap_or(0),
            width,
            height,
            kernel_size: kernel_size.unwrap_or(9),
            kernel_std: kernel_std.unwrap_or(4.0),
            noise_std: noise_std.unwrap_or(1e-3),
        };
        if spec.mu0 <= 0.0 {
            return bad_spec("mu0 must be positive");
        }
        if spec.mu2 < 0.0 || spec.noise_std < 0.0 {
            return bad_spec("mu2 and noise_std must be nonnegative");
        }
        if spec.nu <= 0.0 {
            return bad_spec("nu must be positive");
        }
        if spec.kernel_size == 0 || spec.kernel_size % 2 == 0 {
            return bad_spec("kernel_size must be odd and positive");
        }
        Ok(spec)
    }

    pub fn parse_file(path: &Path) -> Result<InstanceSpec, InstanceError> {
        InstanceSpec::parse(&fs::read_to_string(path)?)
    }

    /// Canonical serialization; `parse` of the output reproduces the spec.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("family = {}\n", self.family));
        s.push_str(&format!("n = {}\n", self.n));
        s.push_str(&format!("m = {}\n", self.m));
        s.push_str(&format!("mu0 = {:e}\n", self.mu0));
        s.push_str(&format!("mu2 = {:e}\n", self.mu2));
        s.push_str(&format!("nu = {:e}\n", self.nu));
        s.push_str(&format!("seed = {}\n", self.seed));
        if self.family == Family::Deblur {
            s.push_str(&format!("width = {}\n", self.width));
            s.push_str(&format!("height = {}\n", self.height));
            s.push_str(&format!("kernel_size = {}\n", self.kernel_size));
            s.push_str(&format!("kernel_std = {:e}\n", self.kernel_std));
            s.push_str(&format!("noise_std = {:e}\n", self.noise_std));
        }
        s
    }
}

fn resolve_ratio(
    n: Option<usize>,
    m: Option<usize>,
    ratio: usize,
    family: &str,
) -> Result<(usize, usize, usize, usize), InstanceError> {
    let (n, m) = match (n, m) {
        (Some(n), Some(m)) => {
            if n != ratio * m {
                return bad_spec(format!("{family} requires n = {ratio}m, got n={n}, m={m}"));
            }
            (n, m)
        }
        (None, Some(m)) => (ratio * m, m),
        (Some(n), None) => {
            if n % ratio != 0 {
                return bad_spec(format!("{family} requires n divisible by {ratio}, got n={n}"));
            }
            (n, n / ratio)
        }
        (None, None) => return bad_spec(format!("{family} needs n or m")),
    };
    if m == 0 {
        return bad_spec("dimensions must be positive");
    }
    Ok((n, m, 0, 0))
}

/// A generated instance: raw data plus the spec that produced it. The
/// composite problem is rebuilt on demand so instances stay plain data and
/// serialize cleanly.
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub spec: InstanceSpec,
    /// Row-major m×n design matrix; absent for deblur (operator is rebuilt
    /// from the kernel parameters).
    pub a: Option<Vec<f64>>,
    pub b: Vec<f64>,
    pub x0: Vec<f64>,
    pub x_true: Option<Vec<f64>>,
}

impl GeneratedInstance {
    pub fn build_problem(&self) -> CompositeProblem {
        let s = &self.spec;
        match s.family {
            Family::L0L2 => {
                let a = DenseMatrix::from_row_major(s.m, s.n, self.a.clone().expect("l0l2 stores A"));
                let f = LeastSquaresRidge::new(Box::new(a), self.b.clone(), s.mu2);
                CompositeProblem::new(Box::new(f), Box::new(L0Norm::new(s.mu0)))
            }
            Family::StudentT => {
                let a = DenseMatrix::from_row_major(s.m, s.n, self.a.clone().expect("studentt stores A"));
                let f = StudentT::new(Box::new(a), self.b.clone(), s.nu);
                CompositeProblem::new(Box::new(f), Box::new(L0Norm::new(s.mu0)))
            }
            Family::Deblur => {
                let f = BlurModel::new(
                    s.width,
                    s.height,
                    s.kernel_size,
                    s.kernel_std,
                    self.b.clone(),
                    s.mu2,
                );
                CompositeProblem::new(Box::new(f), Box::new(L0Norm::new(s.mu0)))
            }
        }
    }
}

/// Draw order: all m·n entries of A row by row (standard normal), then the
/// m entries of b (uniform [0,1]).
pub fn gen_l0l2(spec: &InstanceSpec) -> Result<GeneratedInstance, InstanceError> {
    if spec.family != Family::L0L2 {
        return bad_spec(format!("gen_l0l2 called with family {}", spec.family));
    }
    let (m, n) = (spec.m, spec.n);
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let a: Vec<f64> = (0..m * n).map(|_| rng.sample(StandardNormal)).collect();
    let b: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
    Ok(GeneratedInstance {
        spec: spec.clone(),
        a: Some(a),
        b,
        x0: vec![0.0; n],
        x_true: None,
    })
}

/// Draw order: all m·n entries of A row by row (standard normal), then the
/// k = ⌊n/40⌋ support indices (index sampling without replacement), then per
/// selected index a sign bit and a uniform exponent for ±10^u, then per row
/// of b one standard normal and four more for the χ²₄ in the t₄ noise.
pub fn gen_studentt(spec: &InstanceSpec) -> Result<GeneratedInstance, InstanceError> {
    if spec.family != Family::StudentT {
        return bad_spec(format!("gen_studentt called with family {}", spec.family));
    }
    let (m, n) = (spec.m, spec.n);
    let k = n / 40;
    if k == 0 {
        return Err(InstanceError::DegenerateStudentT { n });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let a: Vec<f64> = (0..m * n).map(|_| rng.sample(StandardNormal)).collect();

    let mut x_true = vec![0.0; n];
    let idx = rand::seq::index::sample(&mut rng, n, k);
    for i in idx.iter() {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let exponent: f64 = rng.random();
        x_true[i] = sign * 10f64.powf(exponent);
    }

    let op = DenseMatrix::from_row_major(m, n, a.clone());
    let ax = op.apply(&x_true);
    let b: Vec<f64> = ax
        .iter()
        .map(|&v| {
            let z: f64 = rng.sample(StandardNormal);
            let chi2: f64 = (0..4)
                .map(|_| {
                    let g: f64 = rng.sample(StandardNormal);
                    g * g
                })
                .sum();
            // raw (unstandardized) t4 variate scaled by 0.1
            v + 0.1 * z / (chi2 / 4.0).sqrt()
        })
        .collect();
    let x0 = op.apply_adjoint(&b);
    Ok(GeneratedInstance {
        spec: spec.clone(),
        a: Some(a),
        b,
        x0,
        x_true: Some(x_true),
    })
}

/// Draw order: one standard normal per pixel, row-major, scaled by
/// noise_std and added to the blurred image. The observation is stored
/// unclamped; x0 = b.
pub fn gen_deblur(image: &GrayImage, spec: &InstanceSpec) -> Result<GeneratedInstance, InstanceError> {
    if spec.family != Family::Deblur {
        return bad_spec(format!("gen_deblur called with family {}", spec.family));
    }
    if image.width != spec.width || image.height != spec.height {
        return bad_spec(format!(
            "image is {}x{} but spec says {}x{}",
            image.width, image.height, spec.width, spec.height
        ));
    }
    let blur = BlurOperator::new(
        crate::blur::gaussian_kernel(spec.kernel_size, spec.kernel_std),
        spec.kernel_size,
        spec.width,
        spec.height,
    );
    let clean = blur.apply(&image.pixels);
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let b: Vec<f64> = clean
        .iter()
        .map(|&v| {
            let z: f64 = rng.sample(StandardNormal);
            v + spec.noise_std * z
        })
        .collect();
    Ok(GeneratedInstance {
        spec: spec.clone(),
        a: None,
        b: b.clone(),
        x0: b,
        x_true: Some(image.pixels.clone()),
    })
}

/// Two-variable heavy-tail regression log(1 + (x₁+x₂−1)²) + |x|₀/10 whose
/// M-stationary points away from the axes form the line x₁+x₂ = 1, with
/// global minimizers (1,0) and (0,1). Small enough to study by hand, rich
/// enough to distinguish the solvers.
pub fn studentt_2d_example() -> CompositeProblem {
    let f = StudentT::new(
        Box::new(DenseMatrix::from_row_major(1, 2, vec![1.0, 1.0])),
        vec![1.0],
        1.0,
    );
    CompositeProblem::new(Box::new(f), Box::new(L0Norm::new(0.1)))
}

/// Deterministic mostly-black test image: a rectangle, a disk and a bar at
/// distinct gray levels. Sharp edges and a sparse support make it a good
/// subject for ℓ0-regularized deblurring. Shape coordinates scale with the
/// side length; `side` = 64 is the size shipped in assets.
pub fn synthetic_image(side: usize) -> GrayImage {
    assert!(side >= 16, "image too small for the shapes");
    let s = side as f64;
    let mut pixels = vec![0.0; side * side];
    let mut set = |r: usize, c: usize, v: f64| pixels[r * side + c] = v;

    let (r0, r1) = ((0.125 * s) as usize, (0.375 * s) as usize);
    let (c0, c1) = ((0.15 * s) as usize, (0.47 * s) as usize);
    for r in r0..r1 {
        for c in c0..c1 {
            set(r, c, 0.9);
        }
    }

    let (cy, cx, rad) = (0.69 * s, 0.31 * s, 0.14 * s);
    for r in 0..side {
        for c in 0..side {
            let (dy, dx) = (r as f64 - cy, c as f64 - cx);
            if dy * dy + dx * dx <= rad * rad {
                set(r, c, 0.6);
            }
        }
    }

    let (bc0, bc1) = ((0.75 * s) as usize, (0.81 * s) as usize);
    let (br0, br1) = ((0.09 * s) as usize, (0.91 * s) as usize);
    for r in br0..br1 {
        for c in bc0..bc1 {
            set(r, c, 1.0);
        }
    }

    GrayImage::new(side, side, pixels)
}

const MAGIC: &[u8; 8] = b"PXNEWTON";
const VERSION: u32 = 1;

/// Container layout (all integers little-endian):
///
/// ```text
/// 8 bytes  magic "PXNEWTON"
/// u32      version (1)
/// u32      family tag (1 l0l2, 2 studentt, 3 deblur)
/// u64, u64 m, n
/// u64      spec text length, then that many bytes of key=value text
/// u32      array count
/// per array: u64 element count, then elements as f64 little-endian
/// ```
///
/// Array order: l0l2 stores [A, b, x0]; studentt [A, b, x0, x_true];
/// deblur [b, x0, x_true].
pub fn write_instance(path: &Path, inst: &GeneratedInstance) -> Result<(), InstanceError> {
    let mut out: Vec<u8> = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&inst.spec.family.tag().to_le_bytes());
    out.extend_from_slice(&(inst.spec.m as u64).to_le_bytes());
    out.extend_from_slice(&(inst.spec.n as u64).to_le_bytes());
    let spec_text = inst.spec.to_text();
    out.extend_from_slice(&(spec_text.len() as u64).to_le_bytes());
    out.extend_from_slice(spec_text.as_bytes());

    let mut arrays: Vec<&[f64]> = Vec::new();
    if let Some(a) = &inst.a {
        arrays.push(a);
    }
    arrays.push(&inst.b);
    arrays.push(&inst.x0);
    if let Some(t) = &inst.x_true {
        arrays.push(t);
    }
    out.extend_from_slice(&(arrays.len() as u32).to_le_bytes());
    for arr in arrays {
        out.extend_from_slice(&(arr.len() as u64).to_le_bytes());
        for &v in arr {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    fs::write(path, out)?;
    Ok(())
}

struct BinCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> BinCursor<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8], InstanceError> {
        if self.data.len() - self.pos < len {
            return Err(InstanceError::BadContainer {
                offset: self.pos,
                msg: format!("truncated while reading {what}"),
            });
        }
        let s = &self.data[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32, InstanceError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64, InstanceError> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64_array(&mut self, what: &str) -> Result<Vec<f64>, InstanceError> {
        let count = self.u64(what)? as usize;
        let bytes = self.take(count * 8, what)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

pub fn read_instance(path: &Path) -> Result<GeneratedInstance, InstanceError> {
    let data = fs::read(path)?;
    let mut cur = BinCursor { data: &data, pos: 0 };

    let magic = cur.take(8, "magic")?;
    if magic != MAGIC {
        return Err(InstanceError::BadContainer { offset: 0, msg: "bad magic".into() });
    }
    let version = cur.u32("version")?;
    if version != VERSION {
        return Err(InstanceError::BadContainer {
            offset: 8,
            msg: format!("unsupported version {version}"),
        });
    }
    let tag = cur.u32("family tag")?;
    let family = Family::from_tag(tag).ok_or(InstanceError::BadContainer {
        offset: 12,
        msg: format!("unknown family tag {tag}"),
    })?;
    let m = cur.u64("m")? as usize;
    let n = cur.u64("n")? as usize;
    let spec_len = cur.u64("spec length")? as usize;
    let spec_off = cur.pos;
    let spec_bytes = cur.take(spec_len, "spec text")?;
    let spec_text = std::str::from_utf8(spec_bytes).map_err(|_| InstanceError::BadContainer {
        offset: spec_off,
        msg: "spec text is not utf-8".into(),
    })?;
    let spec = InstanceSpec::parse(spec_text)?;
    if spec.family != family || spec.m != m || spec.n != n {
        return Err(InstanceError::BadContainer {
            offset: spec_off,
            msg: "embedded spec disagrees with header".into(),
        });
    }

    let count = cur.u32("array count")? as usize;
    let expected = match family {
        Family::L0L2 => 3,
        Family::StudentT => 4,
        Family::Deblur => 3,
    };
    if count != expected {
        return Err(InstanceError::BadContainer {
            offset: cur.pos - 4,
            msg: format!("expected {expected} arrays for {family}, found {count}"),
        });
    }

    let check_len = |arr: &Vec<f64>, want: usize, what: &str, at: usize| {
        if arr.len() == want {
            Ok(())
        } else {
            Err(InstanceError::BadContainer {
                offset: at,
                msg: format!("{what} has {} elements, expected {want}", arr.len()),
            })
        }
    };

    let (a, b, x0, x_true) = match family {
        Family::L0L2 => {
            let at = cur.pos;
            let a = cur.f64_array("A")?;
            check_len(&a, m * n, "A", at)?;
            let at = cur.pos;
            let b = cur.f64_array("b")?;
            check_len(&b, m, "b", at)?;
            let at = cur.pos;
            let x0 = cur.f64_array("x0")?;
            check_len(&x0, n, "x0", at)?;
            (Some(a), b, x0, None)
        }
        Family::StudentT => {
            let at = cur.pos;
            let a = cur.f64_array("A")?;
            check_len(&a, m * n, "A", at)?;
            let at = cur.pos;
            let b = cur.f64_array("b")?;
            check_len(&b, m, "b", at)?;
            let at = cur.pos;
            let x0 = cur.f64_array("x0")?;
            check_len(&x0, n, "x0", at)?;
            let at = cur.pos;
            let t = cur.f64_array("x_true")?;
            check_len(&t, n, "x_true", at)?;
            (Some(a), b, x0, Some(t))
        }
        Family::Deblur => {
            let at = cur.pos;
            let b = cur.f64_array("b")?;
            check_len(&b, n, "b", at)?;
            let at = cur.pos;
            let x0 = cur.f64_array("x0")?;
            check_len(&x0, n, "x0", at)?;
            let at = cur.pos;
            let t = cur.f64_array("x_true")?;
            check_len(&t, n, "x_true", at)?;
            (None, b, x0, Some(t))
        }
    };

    if cur.pos != data.len() {
        return Err(InstanceError::BadContainer {
            offset: cur.pos,
            msg: format!("{} trailing bytes", data.len() - cur.pos),
        });
    }

    Ok(GeneratedInstance { spec, a, b, x0, x_true })
}
