//! Field files: a JSON header `<name>.json` plus a raw little-endian
//! payload `<name>.bin`. Real fields are `f64`, spectra are `c128` stored as
//! interleaved `(re, im)` pairs. Both are row-major.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField, SpectrumField};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dtype {
    F64,
    C128,
}

impl Dtype {
    fn bytes_per_sample(self) -> usize {
        match self {
            Dtype::F64 => 8,
            Dtype::C128 => 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Spatial,
    Frequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub dx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub version: u32,
    pub dtype: Dtype,
    pub order: String,
    pub shape: Vec<usize>,
    pub domain: Domain,
    pub grid: GridHeader,
}

impl FieldHeader {
    fn new(grid: &GridSpec, dtype: Dtype, domain: Domain) -> Self {
        Self {
            version: FORMAT_VERSION,
            dtype,
            order: "C".to_string(),
            shape: grid.shape(),
            domain,
            grid: GridHeader {
                dim: grid.dim(),
                n: grid.size(),
                dx: grid.spacing(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Scalar(ScalarField),
    Spectrum(SpectrumField),
}

impl Field {
    pub fn grid(&self) -> &GridSpec {
        match self {
            Field::Scalar(f) => f.grid(),
            Field::Spectrum(s) => s.grid(),
        }
    }
}

impl From<ScalarField> for Field {
    fn from(f: ScalarField) -> Self {
        Field::Scalar(f)
    }
}

impl From<SpectrumField> for Field {
    fn from(s: SpectrumField) -> Self {
        Field::Spectrum(s)
    }
}

/// `(header, payload)` paths for a field name. A trailing `.json` or `.bin`
/// on `path` is ignored.
pub fn sidecar_paths(path: &Path) -> (PathBuf, PathBuf) {
    let base = match path.extension().and_then(|e| e.to_str()) {
        Some("json") | Some("bin") => path.with_extension(""),
        _ => path.to_path_buf(),
    };
    let mut header = base.clone().into_os_string();
    header.push(".json");
    let mut payload = base.into_os_string();
    payload.push(".bin");
    (header.into(), payload.into())
}

pub fn write_field(field: &Field, path: impl AsRef<Path>) -> Result<()> {
    let (header_path, payload_path) = sidecar_paths(path.as_ref());
    let (header, bytes) = match field {
        Field::Scalar(f) => {
            let mut bytes = Vec::with_capacity(f.values().len() * 8);
            for v in f.values() {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
            (
                FieldHeader::new(f.grid(), Dtype::F64, Domain::Spatial),
                bytes,
            )
        }
        Field::Spectrum(s) => {
            let mut bytes = Vec::with_capacity(s.values().len() * 16);
            for v in s.values() {
                bytes.extend_from_slice(&v.re.to_le_bytes());
                bytes.extend_from_slice(&v.im.to_le_bytes());
            }
            (
                FieldHeader::new(s.grid(), Dtype::C128, Domain::Frequency),
                bytes,
            )
        }
    };
    let json = serde_json::to_string_pretty(&header).expect("header serializes");
    fs::write(&header_path, json + "\n").map_err(|e| Error::io(&header_path, e))?;
    fs::write(&payload_path, bytes).map_err(|e| Error::io(&payload_path, e))?;
    Ok(())
}

pub fn write_scalar(field: &ScalarField, path: impl AsRef<Path>) -> Result<()> {
    write_field(&Field::Scalar(field.clone()), path)
}

pub fn write_spectrum(spec: &SpectrumField, path: impl AsRef<Path>) -> Result<()> {
    write_field(&Field::Spectrum(spec.clone()), path)
}

pub fn read_header(path: impl AsRef<Path>) -> Result<FieldHeader> {
    let (header_path, _) = sidecar_paths(path.as_ref());
    let text = fs::read_to_string(&header_path).map_err(|e| Error::io(&header_path, e))?;
    let malformed = |reason: String| Error::MalformedHeader {
        path: header_path.clone(),
        reason,
    };
    let header: FieldHeader = serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))?;
    if header.version != FORMAT_VERSION {
        return Err(malformed(format!("unsupported version {}", header.version)));
    }
    if header.order != "C" {
        return Err(malformed(format!("unsupported order {:?}", header.order)));
    }
    let grid = GridSpec::new(header.grid.dim, header.grid.n, header.grid.dx)
        .map_err(|e| malformed(e.to_string()))?;
    if header.shape != grid.shape() {
        return Err(malformed(format!(
            "shape {:?} disagrees with grid {:?}",
            header.shape,
            grid.shape()
        )));
    }
    Ok(header)
}

pub fn read_field(path: impl AsRef<Path>) -> Result<Field> {
    let path = path.as_ref();
    let header = read_header(path)?;
    let (header_path, payload_path) = sidecar_paths(path);
    let grid = GridSpec::new(header.grid.dim, header.grid.n, header.grid.dx)
        .expect("validated by read_header");
    match (header.dtype, header.domain) {
        (Dtype::F64, Domain::Spatial) | (Dtype::C128, Domain::Frequency) => {}
        (dtype, domain) => {
            return Err(Error::DtypeMismatch {
                path: header_path,
                reason: format!("dtype {dtype:?} is not stored in the {domain:?} domain"),
            })
        }
    }
    let bytes = fs::read(&payload_path).map_err(|e| Error::io(&payload_path, e))?;
    let expected = grid.len() * header.dtype.bytes_per_sample();
    if bytes.len() < expected {
        return Err(Error::Truncated {
            path: payload_path,
            expected,
            found: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(Error::PayloadSize {
            path: payload_path,
            expected,
            found: bytes.len(),
        });
    }
    let reals = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")));
    match header.dtype {
        Dtype::F64 => {
            let values: Vec<f64> = reals.collect();
            ScalarField::new(grid, values)
                .map(Field::Scalar)
                .map_err(|e| Error::DtypeMismatch {
                    path: payload_path,
                    reason: e.to_string(),
                })
        }
        Dtype::C128 => {
            let reals: Vec<f64> = reals.collect();
            let values = reals
                .chunks_exact(2)
                .map(|p| Complex64::new(p[0], p[1]))
                .collect();
            Ok(Field::Spectrum(SpectrumField::new(grid, values)?))
        }
    }
}

pub fn read_scalar(path: impl AsRef<Path>) -> Result<ScalarField> {
    match read_field(path.as_ref())? {
        Field::Scalar(f) => Ok(f),
        Field::Spectrum(_) => Err(Error::DtypeMismatch {
            path: sidecar_paths(path.as_ref()).0,
            reason: "expected a real spatial field, found a spectrum".into(),
        }),
    }
}

pub fn read_spectrum(path: impl AsRef<Path>) -> Result<SpectrumField> {
    match read_field(path.as_ref())? {
        Field::Spectrum(s) => Ok(s),
        Field::Scalar(_) => Err(Error::DtypeMismatch {
            path: sidecar_paths(path.as_ref()).0,
            reason: "expected a spectrum, found a real spatial field".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_scalar(n: usize) -> ScalarField {
        let g = GridSpec::unit(2, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        ScalarField::new(g, (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    #[test]
    fn scalar_round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let f = random_scalar(64);
        let path = dir.path().join("f");
        write_scalar(&f, &path).unwrap();
        let back = read_scalar(&path).unwrap();
        assert_eq!(back.grid(), f.grid());
        assert!(back
            .values()
            .iter()
            .zip(f.values())
            .all(|(a, b)| a.to_bits() == b.to_bits()));
        // reading through either sidecar name works
        assert_eq!(read_scalar(dir.path().join("f.json")).unwrap(), f);
        assert_eq!(read_scalar(dir.path().join("f.bin")).unwrap(), f);
    }

    #[test]
    fn spectrum_round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::new(1, 32, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = SpectrumField::new(
            g,
            (0..32)
                .map(|_| Complex64::new(rng.gen(), rng.gen::<f64>() * 1e-300))
                .collect(),
        )
        .unwrap();
        let path = dir.path().join("s");
        write_spectrum(&s, &path).unwrap();
        let back = read_spectrum(&path).unwrap();
        assert!(back.values().iter().zip(s.values()).all(|(a, b)| {
            a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()
        }));
        let header = read_header(&path).unwrap();
        assert_eq!(header.dtype, Dtype::C128);
        assert_eq!(header.domain, Domain::Frequency);
        assert_eq!(header.grid.dx, 0.5);
    }

    #[test]
    fn header_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h");
        write_scalar(&random_scalar(16), &path).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("h.json")).unwrap()).unwrap();
        assert_eq!(v["version"], 1);
        assert_eq!(v["dtype"], "f64");
        assert_eq!(v["order"], "C");
        assert_eq!(v["shape"], serde_json::json!([16, 16]));
        assert_eq!(v["domain"], "spatial");
        assert_eq!(v["grid"], serde_json::json!({"dim": 2, "N": 16, "dx": 1.0}));
    }

    #[test]
    fn truncated_payload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t");
        write_scalar(&random_scalar(64), &path).unwrap();
        let bin = dir.path().join("t.bin");
        let bytes = fs::read(&bin).unwrap();
        fs::write(&bin, &bytes[..63 * 64 * 8]).unwrap();
        match read_field(&path) {
            Err(Error::Truncated {
                expected, found, ..
            }) => {
                assert_eq!(expected, 64 * 64 * 8);
                assert_eq!(found, 63 * 64 * 8);
            }
            other => panic!("expected truncation, got {other:?}"),
        }
        fs::write(&bin, [bytes.as_slice(), &[0u8; 8]].concat()).unwrap();
        assert!(matches!(read_field(&path), Err(Error::PayloadSize { .. })));
    }

    #[test]
    fn malformed_headers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m");
        write_scalar(&random_scalar(16), &path).unwrap();
        let json = dir.path().join("m.json");
        let cases = [
            "not json",
            r#"{"version":2,"dtype":"f64","order":"C","shape":[16,16],"domain":"spatial","grid":{"dim":2,"N":16,"dx":1.0}}"#,
            r#"{"version":1,"dtype":"f32","order":"C","shape":[16,16],"domain":"spatial","grid":{"dim":2,"N":16,"dx":1.0}}"#,
            r#"{"version":1,"dtype":"f64","order":"F","shape":[16,16],"domain":"spatial","grid":{"dim":2,"N":16,"dx":1.0}}"#,
            r#"{"version":1,"dtype":"f64","order":"C","shape":[16,8],"domain":"spatial","grid":{"dim":2,"N":16,"dx":1.0}}"#,
            r#"{"version":1,"dtype":"f64","order":"C","shape":[12,12],"domain":"spatial","grid":{"dim":2,"N":12,"dx":1.0}}"#,
        ];
        for case in cases {
            fs::write(&json, case).unwrap();
            assert!(
                matches!(read_field(&path), Err(Error::MalformedHeader { .. })),
                "{case}"
            );
        }
    }

    #[test]
    fn dtype_mismatches() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d");
        write_scalar(&random_scalar(16), &path).unwrap();
        assert!(matches!(
            read_spectrum(&path),
            Err(Error::DtypeMismatch { .. })
        ));
        fs::write(
            dir.path().join("d.json"),
            r#"{"version":1,"dtype":"f64","order":"C","shape":[16,16],"domain":"frequency","grid":{"dim":2,"N":16,"dx":1.0}}"#,
        )
        .unwrap();
        assert!(matches!(
            read_field(&path),
            Err(Error::DtypeMismatch { .. })
        ));
    }

    #[test]
    fn missing_files_are_io_errors() {
        let dir = tempfile::tempdir().unwrap();
        let err = read_field(dir.path().join("nope")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.is_io());
    }
}
