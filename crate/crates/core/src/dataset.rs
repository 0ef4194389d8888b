//! Random sampling of the design space and bulk homogenization into CSV
//! datasets.
//!
//! File layout: a `#meta: {json}` line, then the header
//! `shape,d_rel,D_rel,nu,c11_over_E,c12_over_E,c33_over_E` and one row per
//! sample. Constants are stored at unit Young's modulus.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::elasticity::{BaseMaterial, Regime};
use crate::error::{Error, Result};
use crate::fft::{homogenize_with, HomogenizeOptions, Method, Spectral};
use crate::geometry::{UnitCellSpec, VoidShape};
use crate::par;

pub const GENERATOR_VERSION: &str = concat!("auxetikit-", env!("CARGO_PKG_VERSION"));

pub const NU_RANGE: (f64, f64) = (0.2, 0.4);

/// Fraction of failed samples above which generation aborts.
pub const MAX_FAILURE_RATE: f64 = 0.01;

pub const CSV_HEADER: [&str; 7] = [
    "shape",
    "d_rel",
    "D_rel",
    "nu",
    "c11_over_E",
    "c12_over_E",
    "c33_over_E",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleParams {
    pub d_rel: f64,
    #[serde(rename = "D_rel")]
    pub big_d_rel: f64,
    pub nu: f64,
}

/// Draw sample `index` of the stream seeded by `seed`. Each index has its
/// own ChaCha stream, so any subset can be regenerated independently.
pub fn sample_at(seed: u64, index: usize) -> SampleParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let nu = rng.gen_range(NU_RANGE.0..NU_RANGE.1);
    loop {
        let d: f64 = rng.gen();
        let big_d: f64 = rng.gen();
        if d + big_d < 1.0 {
            return SampleParams {
                d_rel: d,
                big_d_rel: big_d,
                nu,
            };
        }
    }
}

/// `nu ~ U[0.2, 0.4]`, `(d, D)` uniform on the triangle `d + D < 1` by
/// rejection.
pub fn sample_params(count: usize, seed: u64) -> Vec<SampleParams> {
    (0..count).map(|i| sample_at(seed, i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub shape: VoidShape,
    pub d_rel: f64,
    #[serde(rename = "D_rel")]
    pub big_d_rel: f64,
    pub nu: f64,
    pub c11_over_e: f64,
    pub c12_over_e: f64,
    pub c33_over_e: f64,
}

impl SampleRow {
    pub fn features(&self) -> [f64; 3] {
        [self.d_rel, self.big_d_rel, self.nu]
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        let values = [
            self.d_rel,
            self.big_d_rel,
            self.nu,
            self.c11_over_e,
            self.c12_over_e,
            self.c33_over_e,
        ];
        if values.iter().any(|v| !v.is_finite()) {
            return Err("non-finite value".into());
        }
        if !(0.0..=1.0).contains(&self.d_rel) || !(0.0..=1.0).contains(&self.big_d_rel) {
            return Err(format!("diameters out of [0, 1]: d_rel = {}, D_rel = {}", self.d_rel, self.big_d_rel));
        }
        if self.d_rel + self.big_d_rel >= 1.0 {
            return Err(format!("d_rel + D_rel = {} is not < 1", self.d_rel + self.big_d_rel));
        }
        if !(NU_RANGE.0..=NU_RANGE.1).contains(&self.nu) {
            return Err(format!("nu = {} outside [0.2, 0.4]", self.nu));
        }
        if self.c11_over_e <= 0.0 {
            return Err(format!("c11_over_E = {} is not positive", self.c11_over_e));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub shape: VoidShape,
    pub n_samples: usize,
    pub grid_n: usize,
    pub tolerance: f64,
    pub regime: Regime,
    pub rng_seed: u64,
    pub generator_version: String,
    /// Sampling law of the inputs.
    #[serde(default = "default_sampling")]
    pub sampling: String,
    /// Samples dropped because the solver failed on them.
    #[serde(default)]
    pub failed: usize,
}

fn default_sampling() -> String {
    "uniform".into()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub meta: DatasetMeta,
    pub rows: Vec<SampleRow>,
}

/// Shortest exact decimal with 17 significant digits.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The first `count` rows, as if the dataset had been generated with
    /// that count (rows depend only on the seed and their index).
    pub fn prefix(&self, count: usize) -> Dataset {
        let rows: Vec<SampleRow> = self.rows[..count.min(self.rows.len())].to_vec();
        Dataset {
            meta: DatasetMeta {
                n_samples: rows.len(),
                ..self.meta.clone()
            },
            rows,
        }
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<()> {
        let mut out = BufWriter::new(out);
        writeln!(out, "#meta: {}", serde_json::to_string(&self.meta)?)?;
        writeln!(out, "{}", CSV_HEADER.join(","))?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.shape.name(),
                fmt_f64(r.d_rel),
                fmt_f64(r.big_d_rel),
                fmt_f64(r.nu),
                fmt_f64(r.c11_over_e),
                fmt_f64(r.c12_over_e),
                fmt_f64(r.c33_over_e)
            )?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        self.write_to(File::create(path)?)
    }

    /// Parse a dataset; `origin` names the source in error messages.
    pub fn read_from<R: Read>(input: R, origin: &Path) -> Result<Dataset> {
        let mut reader = BufReader::new(input);
        let row_err = |row: usize, message: String| Error::Row {
            path: origin.to_path_buf(),
            row,
            message,
        };

        let mut first = String::new();
        reader.read_line(&mut first)?;
        let meta_json = first
            .trim_end()
            .strip_prefix("#meta:")
            .ok_or_else(|| row_err(1, "missing `#meta:` line".into()))?;
        let meta: DatasetMeta =
            serde_json::from_str(meta_json.trim()).map_err(|e| row_err(1, format!("bad meta: {e}")))?;

        let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header = csv.headers()?.clone();
        if header.iter().ne(CSV_HEADER.iter().copied()) {
            return Err(row_err(
                2,
                format!("header is `{}`, expected `{}`", header.iter().collect::<Vec<_>>().join(","), CSV_HEADER.join(",")),
            ));
        }

        let mut rows = Vec::new();
        for (k, record) in csv.records().enumerate() {
            // file line: meta, header, then rows
            let line = k + 3;
            let record = record.map_err(|e| row_err(line, e.to_string()))?;
            if record.len() != CSV_HEADER.len() {
                return Err(row_err(line, format!("{} fields, expected {}", record.len(), CSV_HEADER.len())));
            }
            let shape: VoidShape = record[0].parse().map_err(|e: Error| row_err(line, e.to_string()))?;
            let mut v = [0.0; 6];
            for (c, slot) in v.iter_mut().enumerate() {
                let field = &record[c + 1];
                *slot = field
                    .trim()
                    .parse()
                    .map_err(|_| row_err(line, format!("{}: cannot parse {field:?}", CSV_HEADER[c + 1])))?;
            }
            let row = SampleRow {
                shape,
                d_rel: v[0],
                big_d_rel: v[1],
                nu: v[2],
                c11_over_e: v[3],
                c12_over_e: v[4],
                c33_over_e: v[5],
            };
            row.validate().map_err(|m| row_err(line, m))?;
            if row.shape != meta.shape {
                return Err(row_err(line, format!("shape {} in a {} dataset", row.shape, meta.shape)));
            }
            rows.push(row);
        }
        if rows.len() != meta.n_samples {
            return Err(Error::Format(format!(
                "{}: meta announces {} rows, file has {}",
                origin.display(),
                meta.n_samples,
                rows.len()
            )));
        }
        Ok(Dataset { meta, rows })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Dataset> {
        let path = path.as_ref();
        Self::read_from(File::open(path).map_err(|e| Error::io_at(path, e))?, path)
    }

    /// Read and check that the file holds the expected shape.
    pub fn read_expecting(path: impl AsRef<Path>, shape: VoidShape) -> Result<Dataset> {
        let path = path.as_ref();
        let ds = Self::read(path)?;
        if ds.meta.shape != shape {
            return Err(Error::Format(format!(
                "{}: dataset is for {} cells, expected {shape}",
                path.display(),
                ds.meta.shape
            )));
        }
        Ok(ds)
    }

    /// Stable digest of the rows, used to tie models to their data.
    pub fn fingerprint(&self) -> String {
        // FNV-1a over the bit patterns
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        eat(self.meta.shape as u64);
        for r in &self.rows {
            for v in [r.d_rel, r.big_d_rel, r.nu, r.c11_over_e, r.c12_over_e, r.c33_over_e] {
                eat(v.to_bits());
            }
        }
        format!("{h:016x}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateOptions {
    pub shape: VoidShape,
    pub count: usize,
    pub grid_n: usize,
    pub tol: f64,
    pub seed: u64,
    /// Thread count; 0 uses every available core.
    pub workers: usize,
    pub regime: Regime,
}

impl GenerateOptions {
    pub fn new(shape: VoidShape, count: usize, grid_n: usize, seed: u64) -> Self {
        GenerateOptions {
            shape,
            count,
            grid_n,
            tol: crate::fft::DEFAULT_TOLERANCE,
            seed,
            workers: 0,
            regime: Regime::PlaneStrain,
        }
    }

    fn homogenize_options(&self) -> HomogenizeOptions {
        HomogenizeOptions {
            n: self.grid_n,
            tol: self.tol,
            method: Method::Sensitivity,
            regime: self.regime,
            ..HomogenizeOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleFailure {
    pub index: usize,
    pub params: SampleParams,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct GenerateReport {
    pub dataset: Dataset,
    pub failures: Vec<SampleFailure>,
    pub total_iterations: usize,
}

/// Homogenize one sampled triple at unit modulus.
pub fn evaluate_sample(
    spectral: &Spectral,
    shape: VoidShape,
    params: &SampleParams,
    opts: &HomogenizeOptions,
) -> Result<(SampleRow, usize)> {
    let material = BaseMaterial::new(1.0, params.nu)?;
    let spec = UnitCellSpec::new(shape, params.d_rel, params.big_d_rel, material)?;
    let (c, report) = homogenize_with(spectral, &spec, opts)?;
    let row = SampleRow {
        shape,
        d_rel: params.d_rel,
        big_d_rel: params.big_d_rel,
        nu: params.nu,
        c11_over_e: c.c11,
        c12_over_e: c.c12,
        c33_over_e: c.c33,
    };
    row.validate().map_err(Error::Degenerate)?;
    Ok((row, report.iterations))
}

/// Sample, homogenize and collect rows in sample order. Failed samples are
/// dropped and reported; more than 1% failures is an error.
pub fn generate(opts: &GenerateOptions) -> Result<GenerateReport> {
    generate_with_progress(opts, |_| {})
}

/// [`generate`] calling `progress(done)` as samples complete (from worker
/// threads, in no particular order).
pub fn generate_with_progress<P>(opts: &GenerateOptions, progress: P) -> Result<GenerateReport>
where
    P: Fn(usize) + Sync + Send,
{
    if opts.count == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let hopts = opts.homogenize_options();
    let spectral = hopts.spectral()?;
    let done = std::sync::atomic::AtomicUsize::new(0);

    let results = par::with_workers(opts.workers, || {
        par::map_indexed(opts.count, |i| {
            let params = sample_at(opts.seed, i);
            let out = evaluate_sample(&spectral, opts.shape, &params, &hopts);
            progress(done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1);
            (params, out)
        })
    });

    let mut rows = Vec::with_capacity(opts.count);
    let mut failures = Vec::new();
    let mut total_iterations = 0;
    for (index, (params, out)) in results.into_iter().enumerate() {
        match out {
            Ok((row, its)) => {
                rows.push(row);
                total_iterations += its;
            }
            Err(e) => {
                log::warn!("sample {index} ({params:?}) failed: {e}");
                failures.push(SampleFailure {
                    index,
                    params,
                    message: e.to_string(),
                });
            }
        }
    }
    if failures.len() as f64 > MAX_FAILURE_RATE * opts.count as f64 {
        return Err(Error::TooManyFailures {
            failed: failures.len(),
            total: opts.count,
        });
    }

    let meta = DatasetMeta {
        shape: opts.shape,
        n_samples: rows.len(),
        grid_n: opts.grid_n,
        tolerance: opts.tol,
        regime: opts.regime,
        rng_seed: opts.seed,
        generator_version: GENERATOR_VERSION.into(),
        sampling: default_sampling(),
        failed: failures.len(),
    };
    Ok(GenerateReport {
        dataset: Dataset { meta, rows },
        failures,
        total_iterations,
    })
}

/// Conventional file name of a dataset inside a data directory.
pub fn dataset_path(dir: impl AsRef<Path>, shape: VoidShape) -> PathBuf {
    dir.as_ref().join(format!("{}.csv", shape.name()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta(shape: VoidShape, n: usize) -> DatasetMeta {
        DatasetMeta {
            shape,
            n_samples: n,
            grid_n: 32,
            tolerance: 1e-6,
            regime: Regime::PlaneStrain,
            rng_seed: 1,
            generator_version: GENERATOR_VERSION.into(),
            sampling: "uniform".into(),
            failed: 0,
        }
    }

    fn synthetic(n: usize) -> Dataset {
        let rows = sample_params(n, 11)
            .into_iter()
            .map(|p| SampleRow {
                shape: VoidShape::Oval,
                d_rel: p.d_rel,
                big_d_rel: p.big_d_rel,
                nu: p.nu,
                c11_over_e: 1.0 - 0.5 * p.d_rel,
                c12_over_e: p.nu / 3.0 - p.big_d_rel,
                c33_over_e: 0.1 + p.d_rel * p.big_d_rel,
            })
            .collect();
        Dataset {
            meta: meta(VoidShape::Oval, n),
            rows,
        }
    }

    #[test]
    fn samples_lie_in_the_triangle() {
        let s = sample_params(1000, 5);
        assert!(s.iter().all(|p| p.d_rel + p.big_d_rel < 1.0 && p.d_rel >= 0.0 && p.big_d_rel >= 0.0));
        assert!(s.iter().all(|p| (0.2..0.4).contains(&p.nu)));
        assert_eq!(s, sample_params(1000, 5));
        assert_ne!(s, sample_params(1000, 6));
    }

    #[test]
    fn nu_mean_converges() {
        let s = sample_params(100_000, 2);
        let mean = s.iter().map(|p| p.nu).sum::<f64>() / s.len() as f64;
        assert!((mean - 0.3).abs() < 0.002, "{mean}");
    }

    #[test]
    fn prefix_property() {
        let a = sample_params(50, 9);
        let b = sample_params(20, 9);
        assert_eq!(&a[..20], &b[..]);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let ds = synthetic(100);
        let mut buf = Vec::new();
        ds.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("#meta: {"));
        assert_eq!(text.lines().nth(1).unwrap(), "shape,d_rel,D_rel,nu,c11_over_E,c12_over_E,c33_over_E");
        let back = Dataset::read_from(&buf[..], Path::new("mem.csv")).unwrap();
        assert_eq!(back, ds);
        assert_eq!(back.fingerprint(), ds.fingerprint());
    }

    #[test]
    fn rejects_infeasible_row_with_its_line() {
        let mut ds = synthetic(5);
        ds.rows[3].big_d_rel = 1.0 - ds.rows[3].d_rel + 0.01;
        let mut buf = Vec::new();
        ds.write_to(&mut buf).unwrap();
        match Dataset::read_from(&buf[..], Path::new("x.csv")) {
            Err(Error::Row { row, message, .. }) => {
                assert_eq!(row, 6);
                assert!(message.contains("d_rel + D_rel"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_non_finite_and_bad_header() {
        let ds = synthetic(3);
        let mut buf = Vec::new();
        ds.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let nan = text.replacen(&fmt_f64(ds.rows[1].c33_over_e), "NaN", 1);
        assert!(matches!(Dataset::read_from(nan.as_bytes(), Path::new("a")), Err(Error::Row { row: 4, .. })));
        let hdr = text.replacen("c33_over_E", "c66_over_E", 1);
        assert!(matches!(Dataset::read_from(hdr.as_bytes(), Path::new("a")), Err(Error::Row { row: 2, .. })));
        let no_meta = text.lines().skip(1).collect::<Vec<_>>().join("\n");
        assert!(Dataset::read_from(no_meta.as_bytes(), Path::new("a")).is_err());
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dataset_path(dir.path(), VoidShape::Oval);
        synthetic(4).write(&path).unwrap();
        assert!(Dataset::read_expecting(&path, VoidShape::Oval).is_ok());
        let err = Dataset::read_expecting(&path, VoidShape::Diamond).unwrap_err();
        assert!(err.to_string().contains("expected diamond"), "{err}");
    }

    #[test]
    fn small_generation_smoke() {
        let opts = GenerateOptions::new(VoidShape::Rectangular, 10, 32, 4);
        let rep = generate(&opts).unwrap();
        assert_eq!(rep.dataset.len() + rep.failures.len(), 10);
        assert!(rep.failures.is_empty(), "{:?}", rep.failures);
        assert_eq!(rep.dataset.meta.n_samples, 10);
        assert_eq!(rep.dataset.meta.grid_n, 32);
        let again = generate(&GenerateOptions { workers: 1, ..opts }).unwrap();
        assert_eq!(again.dataset, rep.dataset);
    }

    #[test]
    fn zero_count_is_rejected() {
        assert!(generate(&GenerateOptions::new(VoidShape::Oval, 0, 32, 1)).is_err());
    }
}
