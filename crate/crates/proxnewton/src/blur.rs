//! Gaussian blur as a linear operator on vectorized grayscale images.
//!
//! The blur is a 'same'-size 2-D correlation with zero padding at the image
//! border. Zero padding keeps the operator linear with an adjoint that is
//! just correlation with the flipped kernel; replication padding would only
//! change boundary constants, not anything the solvers rely on.

use crate::linop::LinearOperator;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Centered, normalized Gaussian kernel of odd `size` and standard deviation
/// `std`. Entries are proportional to exp(−(i²+j²)/(2·std²)) over offsets
/// from the center and sum to 1.
/// Builds the 'same'-size correlation operator for an arbitrary k×k kernel.
/// Zero padding is the only boundary mode; the adjoint is correlation with
/// the flipped kernel.
pub fn blur_operator(kernel: Vec<f64>, ksize: usize, width: usize, height: usize) -> BlurOperator {
    BlurOperator::new(kernel, ksize, width, height)
}

pub fn gaussian_kernel(size: usize, std: f64) -> Vec<f64> {
    assert!(size % 2 == 1, "kernel size must be odd");
    assert!(std > 0.0, "kernel std must be positive");
    let h = (size / 2) as isize;
    let mut k = Vec::with_capacity(size * size);
    for i in -h..=h {
        for j in -h..=h {
            k.push((-((i * i + j * j) as f64) / (2.0 * std * std)).exp());
        }
    }
    let total: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= total);
    k
}

/// 'Same'-size correlation with a k×k kernel on a width×height image,
/// vectorized row-major. Out-of-image reads are zero.
pub struct BlurOperator {
    kernel: Vec<f64>,
    flipped: Vec<f64>,
    ksize: usize,
    width: usize,
    height: usize,
}

impl BlurOperator {
    pub fn new(kernel: Vec<f64>, ksize: usize, width: usize, height: usize) -> Self {
        assert_eq!(kernel.len(), ksize * ksize, "kernel length mismatch");
        assert!(ksize % 2 == 1, "kernel size must be odd");
        let flipped = {
            let mut f = kernel.clone();
            f.reverse();
            f
        };
        BlurOperator { kernel, flipped, ksize, width, height }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    fn pixel(&self, img: &[f64], kernel: &[f64], r: usize, c: usize) -> f64 {
        let h = (self.ksize / 2) as isize;
        let mut acc = 0.0;
        for dr in -h..=h {
            let rr = r as isize + dr;
            if rr < 0 || rr >= self.height as isize {
                continue;
            }
            let krow = ((dr + h) as usize) * self.ksize;
            let irow = (rr as usize) * self.width;
            for dc in -h..=h {
                let cc = c as isize + dc;
                if cc < 0 || cc >= self.width as isize {
                    continue;
                }
                acc += kernel[krow + (dc + h) as usize] * img[irow + cc as usize];
            }
        }
        acc
    }

    fn correlate(&self, img: &[f64], kernel: &[f64]) -> Vec<f64> {
        assert_eq!(img.len(), self.width * self.height);
        let n = img.len();

        #[cfg(feature = "parallel")]
        if n * self.ksize * self.ksize >= crate::linop::PAR_WORK_MIN {
            return (0..n)
                .into_par_iter()
                .map(|p| self.pixel(img, kernel, p / self.width, p % self.width))
                .collect();
        }

        (0..n)
            .map(|p| self.pixel(img, kernel, p / self.width, p % self.width))
            .collect()
    }

    /// Sequential correlation with the forward kernel, regardless of the
    /// parallel feature. Reference path for the benchmarks.
    pub fn apply_seq(&self, img: &[f64]) -> Vec<f64> {
        assert_eq!(img.len(), self.width * self.height);
        (0..img.len())
            .map(|p| self.pixel(img, &self.kernel, p / self.width, p % self.width))
            .collect()
    }

    /// Pixel-parallel correlation with the forward kernel. Same per-pixel
    /// arithmetic as [`Self::apply_seq`], so outputs agree bitwise.
    #[cfg(feature = "parallel")]
    pub fn apply_par(&self, img: &[f64]) -> Vec<f64> {
        assert_eq!(img.len(), self.width * self.height);
        (0..img.len())
            .into_par_iter()
            .map(|p| self.pixel(img, &self.kernel, p / self.width, p % self.width))
            .collect()
    }
}

impl LinearOperator for BlurOperator {
    fn rows(&self) -> usize {
        self.width * self.height
    }

    fn cols(&self) -> usize {
        self.width * self.height
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.correlate(x, &self.kernel)
    }

    // Adjoint of zero-padded correlation is correlation with the flipped
    // kernel (equal to the forward kernel when, as with a Gaussian, the
    // kernel is centrally symmetric).
    fn apply_adjoint(&self, y: &[f64]) -> Vec<f64> {
        self.correlate(y, &self.flipped)
    }

    // The kernel is nonnegative, so absolute row/column sums are plain sums
    // and one apply to the all-ones image computes them all.
    fn norminf(&self) -> f64 {
        let ones = vec![1.0; self.rows()];
        self.apply(&ones).into_iter().fold(0.0, f64::max)
    }

    fn norm1(&self) -> f64 {
        let ones = vec![1.0; self.rows()];
        self.apply_adjoint(&ones).into_iter().fold(0.0, f64::max)
    }
}
