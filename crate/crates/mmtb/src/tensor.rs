use ndarray::{Array3, Axis};
use serde::{Deserialize, Serialize};

/// Analysis mode: fit the full tensor jointly or slice it first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Joint multi-subject multivariate temporal biclustering.
    Mmtb,
    /// One independent fit per subject.
    Smtc,
    /// One independent fit per time step.
    Mmb,
    /// Single fit to the time-averaged tensor.
    MeanMmb,
    /// Single fit to the time-medianed tensor.
    MedianMmb,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "mmtb" => Ok(Mode::Mmtb),
            "smtc" => Ok(Mode::Smtc),
            "mmb" => Ok(Mode::Mmb),
            "mean_mmb" => Ok(Mode::MeanMmb),
            "median_mmb" => Ok(Mode::MedianMmb),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// Which slice of the original tensor a fit refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum SliceContext {
    Full,
    Subject(usize),
    TimeStep(usize),
    TimeCollapsed,
}

/// Dense observations indexed by (subject, measurement, time). No missing cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataTensor {
    values: Array3<f64>,
}

impl DataTensor {
    /// Wraps an N x R x T array. Panics on empty axes or non-finite cells;
    /// file readers validate before calling this.
    pub fn new(values: Array3<f64>) -> Self {
        let (n, r, t) = values.dim();
        assert!(n >= 1 && r >= 1 && t >= 1, "empty tensor axis");
        assert!(
            values.iter().all(|v| v.is_finite()),
            "non-finite observation"
        );
        DataTensor { values }
    }

    pub fn n_subjects(&self) -> usize {
        self.values.dim().0
    }

    pub fn n_measurements(&self) -> usize {
        self.values.dim().1
    }

    pub fn n_timesteps(&self) -> usize {
        self.values.dim().2
    }

    /// 0-based access.
    #[inline]
    pub fn value(&self, subject: usize, measurement: usize, time: usize) -> f64 {
        self.values[[subject, measurement, time]]
    }

    pub fn values(&self) -> &Array3<f64> {
        &self.values
    }
}

/// Expands a tensor into the per-mode collection of fits.
pub fn apply_mode(data: &DataTensor, mode: Mode) -> Vec<(DataTensor, SliceContext)> {
    match mode {
        Mode::Mmtb => vec![(data.clone(), SliceContext::Full)],
        Mode::Smtc => (0..data.n_subjects())
            .map(|i| {
                let slice = data
                    .values
                    .index_axis(Axis(0), i)
                    .insert_axis(Axis(0))
                    .to_owned();
                (DataTensor::new(slice), SliceContext::Subject(i))
            })
            .collect(),
        Mode::Mmb => (0..data.n_timesteps())
            .map(|t| {
                let slice = data
                    .values
                    .index_axis(Axis(2), t)
                    .insert_axis(Axis(2))
                    .to_owned();
                (DataTensor::new(slice), SliceContext::TimeStep(t))
            })
            .collect(),
        Mode::MeanMmb => {
            let t = data.n_timesteps() as f64;
            let collapsed = data
                .values
                .sum_axis(Axis(2))
                .mapv(|v| v / t)
                .insert_axis(Axis(2));
            vec![(DataTensor::new(collapsed), SliceContext::TimeCollapsed)]
        }
        Mode::MedianMmb => {
            let (n, r, _) = data.values.dim();
            let mut collapsed = Array3::zeros((n, r, 1));
            for i in 0..n {
                for m in 0..r {
                    let mut series: Vec<f64> =
                        data.values.slice(ndarray::s![i, m, ..]).to_vec();
                    collapsed[[i, m, 0]] = median(&mut series);
                }
            }
            vec![(DataTensor::new(collapsed), SliceContext::TimeCollapsed)]
        }
    }
}

/// Median with the lower-midpoint average for even counts.
fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
