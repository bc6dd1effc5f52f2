//! Score data model: the balanced three-way score tensor and its ingestion.
//!
//! Scores are held in a dense `n x m x K` array indexed by (scenario,
//! generation, judge). Every estimator in this crate assumes the balanced
//! crossed design: each of the `K` judges scores every one of the `m`
//! generations of every one of the `n` scenarios, exactly once. Ingestion
//! validates that shape up front so downstream code never has to.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array3, Axis};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One scored cell in long/tidy form: a single judge's score for a single
/// generation of a single scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub scenario_id: String,
    pub generation_id: String,
    pub judge_id: String,
    pub score: f64,
}

/// Ingestion and I/O failures.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("no records to ingest")]
    Empty,
    #[error("record {record} (line {line}): score {score} is not finite")]
    NonFiniteScore { record: usize, line: u64, score: f64 },
    #[error("record {record} (line {line}): score {score} outside scale [{min}, {max}]")]
    OutOfScale {
        record: usize,
        line: u64,
        score: f64,
        min: f64,
        max: f64,
    },
    #[error("duplicate cell: scenario {scenario}, generation {generation}, judge {judge}")]
    DuplicateCell {
        scenario: String,
        generation: String,
        judge: String,
    },
    #[error("missing cell: scenario {scenario}, generation index {generation}, judge {judge}")]
    MissingCell {
        scenario: String,
        generation: usize,
        judge: String,
    },
    #[error("unbalanced design: scenario {scenario} has {found} generations, expected {expected}")]
    UnbalancedDesign {
        scenario: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid scale: scale_min {min} must not exceed scale_max {max}")]
    InvalidScale { min: f64, max: f64 },
    #[error("line {line}: missing column {column}")]
    MissingColumn { line: u64, column: &'static str },
    #[error("line {line}: cannot parse score {value:?}")]
    BadScore { line: u64, value: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Invalid evaluation configurations.
#[derive(Debug, Error)]
pub enum DesignError {
    #[error("invalid design: {0}")]
    InvalidDesign(String),
}

/// An evaluation operating point: `n` scenarios, `m` generations per
/// scenario, `k` judges per cell drawn from a pool of `k_tot`, and a
/// per-scenario judge-call budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Design {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub k_tot: usize,
    /// Judge calls per scenario. Defaults to `m * k`, the cost of the
    /// crossed design itself.
    pub budget: usize,
}

impl Design {
    pub fn new(n: usize, m: usize, k: usize, k_tot: usize) -> Result<Self, DesignError> {
        if n == 0 || m == 0 {
            return Err(DesignError::InvalidDesign(format!(
                "n and m must be at least 1 (got n={n}, m={m})"
            )));
        }
        if k == 0 || k > k_tot {
            return Err(DesignError::InvalidDesign(format!(
                "judges per cell must satisfy 1 <= k <= k_tot (got k={k}, k_tot={k_tot})"
            )));
        }
        Ok(Design {
            n,
            m,
            k,
            k_tot,
            budget: m * k,
        })
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }
}

/// Balanced three-way score array with axis labels and scale bounds.
///
/// Immutable after construction; share freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTensor {
    scores: Array3<f64>,
    scenario_ids: Vec<String>,
    judge_ids: Vec<String>,
    scale_min: f64,
    scale_max: f64,
}

impl ScoreTensor {
    /// Builds a tensor from long-form records, validating the balanced
    /// crossed design.
    ///
    /// Axis orderings are deterministic: scenarios and judges in global
    /// first-appearance order, generations in first-appearance order within
    /// their scenario. Estimation additionally needs `n >= 2` and `K >= 2`;
    /// a single-scenario tensor is still valid here because the simulator's
    /// pool statistics are defined per scenario.
    pub fn from_records(
        records: &[ScoreRecord],
        scale_min: f64,
        scale_max: f64,
    ) -> Result<Self, IngestError> {
        Self::from_records_at_lines(records, None, scale_min, scale_max)
    }

    fn from_records_at_lines(
        records: &[ScoreRecord],
        lines: Option<&[u64]>,
        scale_min: f64,
        scale_max: f64,
    ) -> Result<Self, IngestError> {
        if records.is_empty() {
            return Err(IngestError::Empty);
        }
        if scale_min.is_nan() || scale_max.is_nan() || scale_min > scale_max {
            return Err(IngestError::InvalidScale {
                min: scale_min,
                max: scale_max,
            });
        }
        let line_of = |idx: usize| lines.map_or((idx + 2) as u64, |ls| ls[idx]);

        let mut scenario_ids: Vec<String> = Vec::new();
        let mut scenario_index: HashMap<String, usize> = HashMap::new();
        let mut judge_ids: Vec<String> = Vec::new();
        let mut judge_index: HashMap<String, usize> = HashMap::new();
        // Per-scenario first-appearance order of generation labels.
        let mut gen_index: Vec<HashMap<String, usize>> = Vec::new();
        let mut gen_count: Vec<usize> = Vec::new();

        let mut cells: HashMap<(usize, usize, usize), f64> = HashMap::new();

        for (idx, rec) in records.iter().enumerate() {
            if !rec.score.is_finite() {
                return Err(IngestError::NonFiniteScore {
                    record: idx,
                    line: line_of(idx),
                    score: rec.score,
                });
            }
            if rec.score < scale_min || rec.score > scale_max {
                return Err(IngestError::OutOfScale {
                    record: idx,
                    line: line_of(idx),
                    score: rec.score,
                    min: scale_min,
                    max: scale_max,
                });
            }
            let i = match scenario_index.get(rec.scenario_id.as_str()) {
                Some(&i) => i,
                None => {
                    let i = scenario_ids.len();
                    scenario_index.insert(rec.scenario_id.clone(), i);
                    scenario_ids.push(rec.scenario_id.clone());
                    gen_index.push(HashMap::new());
                    gen_count.push(0);
                    i
                }
            };
            let l = match judge_index.get(rec.judge_id.as_str()) {
                Some(&l) => l,
                None => {
                    let l = judge_ids.len();
                    judge_index.insert(rec.judge_id.clone(), l);
                    judge_ids.push(rec.judge_id.clone());
                    l
                }
            };
            let gens = &mut gen_index[i];
            let j = match gens.get(rec.generation_id.as_str()) {
                Some(&j) => j,
                None => {
                    let j = gen_count[i];
                    gens.insert(rec.generation_id.clone(), j);
                    gen_count[i] = j + 1;
                    j
                }
            };
            if cells.insert((i, j, l), rec.score).is_some() {
                return Err(IngestError::DuplicateCell {
                    scenario: rec.scenario_id.clone(),
                    generation: rec.generation_id.clone(),
                    judge: rec.judge_id.clone(),
                });
            }
        }

        let n = scenario_ids.len();
        let k = judge_ids.len();
        let m = gen_count[0];
        for (i, &count) in gen_count.iter().enumerate() {
            if count != m {
                return Err(IngestError::UnbalancedDesign {
                    scenario: scenario_ids[i].clone(),
                    expected: m,
                    found: count,
                });
            }
        }

        let mut scores = Array3::<f64>::zeros((n, m, k));
        for i in 0..n {
            for j in 0..m {
                for l in 0..k {
                    match cells.get(&(i, j, l)) {
                        Some(&s) => scores[[i, j, l]] = s,
                        None => {
                            return Err(IngestError::MissingCell {
                                scenario: scenario_ids[i].clone(),
                                generation: j,
                                judge: judge_ids[l].clone(),
                            })
                        }
                    }
                }
            }
        }

        Ok(ScoreTensor {
            scores,
            scenario_ids,
            judge_ids,
            scale_min,
            scale_max,
        })
    }

    /// Builds a tensor directly from a dense array and labels. Used by the
    /// simulator; validates shape, label uniqueness, and scale.
    pub fn from_array(
        scores: Array3<f64>,
        scenario_ids: Vec<String>,
        judge_ids: Vec<String>,
        scale_min: f64,
        scale_max: f64,
    ) -> Result<Self, IngestError> {
        let (n, m, k) = scores.dim();
        if n == 0 || m == 0 || k == 0 {
            return Err(IngestError::Empty);
        }
        if scale_min.is_nan() || scale_max.is_nan() || scale_min > scale_max {
            return Err(IngestError::InvalidScale {
                min: scale_min,
                max: scale_max,
            });
        }
        assert_eq!(scenario_ids.len(), n, "scenario label count mismatch");
        assert_eq!(judge_ids.len(), k, "judge label count mismatch");
        for (idx, &s) in scores.iter().enumerate() {
            if !s.is_finite() {
                return Err(IngestError::NonFiniteScore {
                    record: idx,
                    line: 0,
                    score: s,
                });
            }
            if s < scale_min || s > scale_max {
                return Err(IngestError::OutOfScale {
                    record: idx,
                    line: 0,
                    score: s,
                    min: scale_min,
                    max: scale_max,
                });
            }
        }
        Ok(ScoreTensor {
            scores,
            scenario_ids,
            judge_ids,
            scale_min,
            scale_max,
        })
    }

    /// Number of scenarios `n`.
    pub fn n(&self) -> usize {
        self.scores.dim().0
    }

    /// Generations per scenario `m` (identical across scenarios).
    pub fn m(&self) -> usize {
        self.scores.dim().1
    }

    /// Number of judges `K` present in the tensor.
    pub fn k(&self) -> usize {
        self.scores.dim().2
    }

    pub fn scenario_ids(&self) -> &[String] {
        &self.scenario_ids
    }

    pub fn judge_ids(&self) -> &[String] {
        &self.judge_ids
    }

    pub fn scale_min(&self) -> f64 {
        self.scale_min
    }

    pub fn scale_max(&self) -> f64 {
        self.scale_max
    }

    pub fn score(&self, scenario: usize, generation: usize, judge: usize) -> f64 {
        self.scores[[scenario, generation, judge]]
    }

    pub fn scores(&self) -> &Array3<f64> {
        &self.scores
    }

    /// Arithmetic mean of all `n * m * K` cells.
    pub fn grand_mean(&self) -> f64 {
        self.scores.mean().expect("tensor is non-empty")
    }

    /// Per-cell panel means `mean over judges of (i, j, .)`, an `n x m` array.
    pub fn cell_means(&self) -> ndarray::Array2<f64> {
        self.scores.mean_axis(Axis(2)).expect("K >= 1")
    }

    /// Per-scenario means `mean over (j, l) of (i, ., .)`.
    pub fn scenario_means(&self) -> Vec<f64> {
        self.cell_means()
            .mean_axis(Axis(1))
            .expect("m >= 1")
            .to_vec()
    }

    /// Per-judge means `mean over (i, j) of (., ., l)`.
    pub fn judge_means(&self) -> Vec<f64> {
        self.scores
            .mean_axis(Axis(0))
            .expect("n >= 1")
            .mean_axis(Axis(0))
            .expect("m >= 1")
            .to_vec()
    }

    /// A new tensor restricted to the given judge columns (in the given
    /// order). Balance is preserved; labels follow along.
    pub fn select_judges(&self, judges: &[usize]) -> ScoreTensor {
        assert!(!judges.is_empty(), "judge selection must be non-empty");
        let scores = self.scores.select(Axis(2), judges);
        let judge_ids = judges.iter().map(|&l| self.judge_ids[l].clone()).collect();
        ScoreTensor {
            scores,
            scenario_ids: self.scenario_ids.clone(),
            judge_ids,
            scale_min: self.scale_min,
            scale_max: self.scale_max,
        }
    }

    /// Flattens back to long-form records in canonical (scenario, generation,
    /// judge) order. Generation labels are synthesized as `0..m-1`; original
    /// generation labels are not retained by the tensor.
    pub fn to_records(&self) -> Vec<ScoreRecord> {
        let (n, m, k) = self.scores.dim();
        let mut out = Vec::with_capacity(n * m * k);
        for i in 0..n {
            for j in 0..m {
                for l in 0..k {
                    out.push(ScoreRecord {
                        scenario_id: self.scenario_ids[i].clone(),
                        generation_id: j.to_string(),
                        judge_id: self.judge_ids[l].clone(),
                        score: self.scores[[i, j, l]],
                    });
                }
            }
        }
        out
    }

    /// Writes `scenario_id,generation_id,judge_id,score` CSV. Floats use the
    /// shortest round-trip representation, so export / re-ingest is exact.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), IngestError> {
        let mut w = csv::Writer::from_writer(writer);
        for rec in self.to_records() {
            w.serialize(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_path<P: AsRef<Path>>(&self, path: P) -> Result<(), IngestError> {
        let file = std::fs::File::create(path)?;
        self.write_csv(file)
    }

    /// Reads the CSV format produced by [`ScoreTensor::write_csv`].
    pub fn read_csv<R: Read>(
        reader: R,
        scale_min: f64,
        scale_max: f64,
    ) -> Result<Self, IngestError> {
        let (records, lines) = read_records_csv(reader)?;
        Self::from_records_at_lines(&records, Some(&lines), scale_min, scale_max)
    }

    pub fn read_csv_path<P: AsRef<Path>>(
        path: P,
        scale_min: f64,
        scale_max: f64,
    ) -> Result<Self, IngestError> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(file, scale_min, scale_max)
    }

    /// Reads a JSON array of record objects.
    pub fn read_json<R: Read>(
        reader: R,
        scale_min: f64,
        scale_max: f64,
    ) -> Result<Self, IngestError> {
        let records: Vec<ScoreRecord> = serde_json::from_reader(reader)?;
        Self::from_records(&records, scale_min, scale_max)
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<(), IngestError> {
        serde_json::to_writer_pretty(writer, &self.to_records())?;
        Ok(())
    }
}

/// Parses long-form records from CSV with per-record line numbers for
/// diagnostics. Column order is free; the four header names are required.
pub fn read_records_csv<R: Read>(reader: R) -> Result<(Vec<ScoreRecord>, Vec<u64>), IngestError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &'static str| -> Result<usize, IngestError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or(IngestError::MissingColumn { line: 1, column: name })
    };
    let c_scenario = col("scenario_id")?;
    let c_generation = col("generation_id")?;
    let c_judge = col("judge_id")?;
    let c_score = col("score")?;

    let mut records = Vec::new();
    let mut lines = Vec::new();
    for result in rdr.records() {
        let record = result?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |c: usize, name: &'static str| -> Result<&str, IngestError> {
            record.get(c).ok_or(IngestError::MissingColumn { line, column: name })
        };
        let score_raw = field(c_score, "score")?;
        let score: f64 = score_raw
            .trim()
            .parse()
            .map_err(|_| IngestError::BadScore {
                line,
                value: score_raw.to_string(),
            })?;
        records.push(ScoreRecord {
            scenario_id: field(c_scenario, "scenario_id")?.to_string(),
            generation_id: field(c_generation, "generation_id")?.to_string(),
            judge_id: field(c_judge, "judge_id")?.to_string(),
            score,
        });
        lines.push(line);
    }
    Ok((records, lines))
}

/// Convenience constructor mirroring the long-form ingestion contract.
pub fn ingest_records(
    records: &[ScoreRecord],
    scale_min: f64,
    scale_max: f64,
) -> Result<ScoreTensor, IngestError> {
    ScoreTensor::from_records(records, scale_min, scale_max)
}
