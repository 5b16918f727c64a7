//! Breathing k-means clustering.
//!
//! The crate provides the building blocks of k-means (nearest and
//! second-nearest assignment, Lloyd's algorithm, random and k-means++
//! seeding) and the breathing k-means refinement, which repeatedly inserts
//! centroids where the quantization error is large and removes centroids of
//! low utility, keeping the best codebook found.
//!
//! Every algorithm is generic over the coordinate type ([`Scalar`], implemented
//! for `f32` and `f64`); the `*64`/`*32` aliases name the common
//! instantiations.
//!
//! ```
//! use breathing_kmeans::{bkm_fit, generate, BreathingConfig, GenSpec};
//!
//! let data = generate::<f64>(&GenSpec::UniformSquare { n: 300 }, 7).unwrap().data;
//! let fit = bkm_fit(&data, 10, &BreathingConfig::default()).unwrap();
//! assert!(fit.sse <= fit.seeding_sse);
//! ```

pub mod breathing;
pub mod datagen;
pub mod error;
pub mod geometry;
pub mod lloyd;
pub mod matrix;
pub mod metrics;
pub mod rng;
pub mod scalar;
pub mod seeding;

pub use breathing::{
    bkm_fit, breathe_from, breathe_in, breathe_out, breathe_out_detailed, BreatheOut,
    BreathingConfig, FitResult,
};
pub use datagen::{generate, GenSpec, Generated, MixtureSpec, Norm25Params};
pub use error::{Error, Result};
pub use geometry::{
    assign, centroid_stats, mean_nn_distance, mean_quantization_distance, sse, Assignment,
    CentroidStats,
};
pub use lloyd::{lloyd_fit, LloydConfig, LloydResult};
pub use matrix::{Codebook, DataMatrix};
pub use metrics::{aggregate, delta_cpu, delta_good, delta_sse, ExperimentReport, PairedRun};
pub use scalar::Scalar;
pub use seeding::{kmeanspp_seed, random_seed, seed_and_fit, Init, SeedConfig};

pub type DataMatrix64 = DataMatrix<f64>;
pub type DataMatrix32 = DataMatrix<f32>;
pub type Codebook64 = Codebook<f64>;
pub type Codebook32 = Codebook<f32>;
pub type FitResult64 = FitResult<f64>;
pub type FitResult32 = FitResult<f32>;
pub type BreathingConfig64 = BreathingConfig<f64>;
pub type BreathingConfig32 = BreathingConfig<f32>;
