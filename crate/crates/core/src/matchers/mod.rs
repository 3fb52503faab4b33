//! Scoring primitives: attribute agreement, masked SSIM and Hu-moment
//! shape distance.

mod app;
mod sem;
mod shape;

pub use app::{app_match, gaussian_kernel, SSIM_C1, SSIM_C2, SSIM_SIGMA, SSIM_WINDOW};
pub use sem::{query_slice, sem_match};
pub use shape::{hu_moments, shape_match, HU_EPSILON};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Polarity {
    HigherBetter,
    LowerBetter,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MatchScore {
    pub value: f64,
    pub polarity: Polarity,
}

impl MatchScore {
    pub fn higher(value: f64) -> Self {
        Self {
            value,
            polarity: Polarity::HigherBetter,
        }
    }

    pub fn lower(value: f64) -> Self {
        Self {
            value,
            polarity: Polarity::LowerBetter,
        }
    }

    /// Strictly better under this score's polarity.
    pub fn beats(&self, other: &MatchScore) -> bool {
        match self.polarity {
            Polarity::HigherBetter => self.value > other.value,
            Polarity::LowerBetter => self.value < other.value,
        }
    }
}
