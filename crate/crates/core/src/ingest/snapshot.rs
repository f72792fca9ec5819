//! Pinned, hash-verified copies of every input a report reads.
//!
//! A snapshot directory holds `manifest.json` and a `payloads/` directory with
//! one raw payload per series: the original CSV file, the BEA table export, or
//! the FRED JSON body, byte for byte. Loading re-parses the payloads, so a
//! snapshot replays exactly what was fetched.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Component, Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::series::{Frequency, TimeSeries, Window};

use super::bea::{series_from_table_text, split_source_id};
use super::csv::parse_csv;
use super::fred::{payload_to_series, FredClient, FredPayload, Transport};
use super::{SeriesMap, SeriesSpec, Source};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const PAYLOAD_DIR: &str = "payloads";
pub const FORMAT_VERSION: u32 = 1;
/// Upper bound on simultaneous FRED requests.
pub const MAX_CONCURRENT_FETCHES: usize = 4;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub spec: SeriesSpec,
    /// Payload path relative to the snapshot root.
    pub file: String,
    pub sha256: String,
    pub fetched_at: String,
    /// Observations in the loaded series after dropping missing values.
    pub observations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub vintage: String,
    pub created_at: String,
    pub entries: Vec<ManifestEntry>,
}

/// Anything that can return a FRED observations payload.
pub trait FredFetch: Sync {
    fn fetch_payload(&self, series_id: &str, window: Option<&Window>, freq: Option<Frequency>) -> Result<FredPayload>;
}

impl<T: Transport> FredFetch for FredClient<T> {
    fn fetch_payload(&self, series_id: &str, window: Option<&Window>, freq: Option<Frequency>) -> Result<FredPayload> {
        self.fetch(series_id, window, freq)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CreateOptions {
    pub vintage: String,
    /// Recorded as `created_at` and `fetched_at`; the current UTC time when unset.
    pub timestamp: Option<String>,
    /// Directory that relative CSV and BEA paths resolve against.
    pub base_dir: PathBuf,
    /// Observation window requested from FRED.
    pub window: Option<Window>,
}

struct Fetched {
    bytes: Vec<u8>,
    ext: &'static str,
    fetched_at: String,
}

fn parse_payload(spec: &SeriesSpec, bytes: &[u8], file: &Path) -> Result<TimeSeries> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::Parse { line: 0, message: format!("{}: not UTF-8: {e}", file.display()) })?;
    match spec.source {
        Source::Csv => spec.finish(parse_csv(text, &spec.id, spec.freq, spec.unit)?.series),
        Source::BeaCsv => series_from_table_text(text, spec),
        Source::Fred => Ok(payload_to_series(text, spec)?.series),
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Fetches or copies every spec's payload into `dest` and writes the manifest.
///
/// `dest` must be missing or empty. FRED specs need `fred`; they are fetched
/// at most [`MAX_CONCURRENT_FETCHES`] at a time.
pub fn snapshot_create(
    specs: &[SeriesSpec],
    dest: &Path,
    opts: &CreateOptions,
    fred: Option<&dyn FredFetch>,
) -> Result<Manifest> {
    let mut seen = BTreeSet::new();
    for spec in specs {
        spec.validate()?;
        if !seen.insert(spec.id.as_str()) {
            return Err(Error::Config(format!("duplicate series id '{}'", spec.id)));
        }
    }
    if specs.iter().any(|s| s.source == Source::Fred) && fred.is_none() {
        return Err(Error::Config("FRED series requested but no FRED client configured".into()));
    }
    if dest.exists() {
        let mut entries = std::fs::read_dir(dest).map_err(|e| Error::io(dest, e))?;
        if entries.next().is_some() {
            return Err(Error::SnapshotExists(dest.to_path_buf()));
        }
    }

    let mut fetched: Vec<Option<Result<Fetched>>> = specs.iter().map(|_| None).collect();
    for (k, spec) in specs.iter().enumerate() {
        let local = match spec.source {
            Source::Fred => continue,
            Source::Csv => opts.base_dir.join(&spec.source_id),
            Source::BeaCsv => opts.base_dir.join(split_source_id(&spec.source_id)?.0),
        };
        fetched[k] = Some(read(&local).map(|bytes| Fetched {
            bytes,
            ext: "csv",
            fetched_at: opts.timestamp.clone().unwrap_or_else(now),
        }));
    }
    if let Some(client) = fred {
        let remote: Vec<usize> = (0..specs.len()).filter(|&k| specs[k].source == Source::Fred).collect();
        for chunk in remote.chunks(MAX_CONCURRENT_FETCHES) {
            let results: Vec<(usize, Result<Fetched>)> = std::thread::scope(|scope| {
                let handles: Vec<_> = chunk
                    .iter()
                    .map(|&k| {
                        let spec = &specs[k];
                        scope.spawn(move || {
                            let payload = client.fetch_payload(&spec.source_id, opts.window.as_ref(), Some(spec.freq))?;
                            Ok(Fetched {
                                bytes: payload.body.into_bytes(),
                                ext: "json",
                                fetched_at: opts.timestamp.clone().unwrap_or_else(now),
                            })
                        })
                    })
                    .collect();
                chunk
                    .iter()
                    .zip(handles)
                    .map(|(&k, h)| (k, h.join().expect("fetch thread panicked")))
                    .collect()
            });
            for (k, r) in results {
                fetched[k] = Some(r);
            }
        }
    }

    let payload_dir = dest.join(PAYLOAD_DIR);
    std::fs::create_dir_all(&payload_dir).map_err(|e| Error::io(&payload_dir, e))?;
    let mut entries = Vec::with_capacity(specs.len());
    for (spec, f) in specs.iter().zip(fetched) {
        let f = f.expect("every spec was fetched")?;
        let file = format!("{PAYLOAD_DIR}/{}.{}", spec.id, f.ext);
        let path = dest.join(&file);
        let series = parse_payload(spec, &f.bytes, &path)?;
        write(&path, &f.bytes)?;
        entries.push(ManifestEntry {
            spec: spec.clone(),
            file,
            sha256: sha256_hex(&f.bytes),
            fetched_at: f.fetched_at,
            observations: series.len(),
        });
    }
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        vintage: opts.vintage.clone(),
        created_at: opts.timestamp.clone().unwrap_or_else(now),
        entries,
    };
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    write(&dest.join(MANIFEST_FILE), json.as_bytes())?;
    Ok(manifest)
}

/// A loaded, verified snapshot.
#[derive(Debug, Clone)]
pub struct Snapshot {
    root: PathBuf,
    manifest: Manifest,
    manifest_sha256: String,
    series: SeriesMap,
}

fn relative_payload_path(root: &Path, file: &str) -> Result<PathBuf> {
    let rel = Path::new(file);
    if rel.components().any(|c| !matches!(c, Component::Normal(_))) {
        return Err(Error::Config(format!("manifest payload path '{file}' escapes the snapshot")));
    }
    Ok(root.join(rel))
}

/// Reads a snapshot, checking every payload against its recorded hash.
pub fn snapshot_load(path: &Path) -> Result<Snapshot> {
    if !path.is_dir() {
        return Err(Error::NoSnapshot(path.to_path_buf()));
    }
    let manifest_path = path.join(MANIFEST_FILE);
    if !manifest_path.is_file() {
        return Err(Error::NoManifest(manifest_path));
    }
    let raw = read(&manifest_path)?;
    let manifest: Manifest = serde_json::from_slice(&raw)?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::Config(format!(
            "snapshot format {} is not supported (expected {FORMAT_VERSION})",
            manifest.format_version
        )));
    }
    let mut series = BTreeMap::new();
    for entry in &manifest.entries {
        let file = relative_payload_path(path, &entry.file)?;
        let bytes = read(&file)?;
        if sha256_hex(&bytes) != entry.sha256 {
            return Err(Error::HashMismatch(file));
        }
        let s = parse_payload(&entry.spec, &bytes, &file)?;
        if series.insert(entry.spec.id.clone(), s).is_some() {
            return Err(Error::Config(format!("duplicate series id '{}' in manifest", entry.spec.id)));
        }
    }
    Ok(Snapshot { root: path.to_path_buf(), manifest, manifest_sha256: sha256_hex(&raw), series })
}

impl Snapshot {
    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn vintage(&self) -> &str {
        &self.manifest.vintage
    }

    /// Hash of the manifest bytes, which in turn pin every payload.
    pub fn manifest_sha256(&self) -> &str {
        &self.manifest_sha256
    }

    pub fn series(&self, id: &str) -> Result<&TimeSeries> {
        self.series.get(id).ok_or_else(|| Error::UnknownSeries(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.series.keys().map(String::as_str)
    }

    pub fn all(&self) -> &SeriesMap {
        &self.series
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::fred::{HttpResponse, TransportError};
    use crate::series::Unit;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn opts(base: &Path) -> CreateOptions {
        CreateOptions {
            vintage: "test".into(),
            timestamp: Some("2024-01-01T00:00:00Z".into()),
            base_dir: base.to_path_buf(),
            window: None,
        }
    }

    fn csv_spec(id: &str) -> SeriesSpec {
        SeriesSpec::new(id, Source::Csv, &format!("{id}.csv"), Unit::PercentPoints, Frequency::Quarterly)
    }

    fn setup() -> (tempfile::TempDir, Vec<SeriesSpec>) {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.csv"), "date,value\n1980-01-01,1.5\n1980-04-01,.\n1980-07-01,2.5\n").unwrap();
        std::fs::write(dir.path().join("b.csv"), "date,value\n1990-01-01,7\n").unwrap();
        (dir, vec![csv_spec("a"), csv_spec("b")])
    }

    #[test]
    fn round_trip() {
        let (dir, specs) = setup();
        let dest = dir.path().join("snap");
        let m = snapshot_create(&specs, &dest, &opts(dir.path()), None).unwrap();
        assert_eq!(m.entries[0].observations, 2);
        let snap = snapshot_load(&dest).unwrap();
        assert_eq!(snap.ids().collect::<Vec<_>>(), vec!["a", "b"]);
        assert_eq!(snap.series("a").unwrap().values().collect::<Vec<_>>(), vec![1.5, 2.5]);
        assert!(matches!(snap.series("zzz"), Err(Error::UnknownSeries(_))));
        assert_eq!(snap.vintage(), "test");

        // byte-identical manifests for identical inputs and timestamp
        let dest2 = dir.path().join("snap2");
        snapshot_create(&specs, &dest2, &opts(dir.path()), None).unwrap();
        assert_eq!(snapshot_load(&dest2).unwrap().manifest_sha256(), snap.manifest_sha256());
    }

    #[test]
    fn refuses_non_empty_destination() {
        let (dir, specs) = setup();
        let dest = dir.path().join("snap");
        snapshot_create(&specs, &dest, &opts(dir.path()), None).unwrap();
        assert!(matches!(
            snapshot_create(&specs, &dest, &opts(dir.path()), None),
            Err(Error::SnapshotExists(_))
        ));
    }

    #[test]
    fn tampered_payload_is_detected() {
        let (dir, specs) = setup();
        let dest = dir.path().join("snap");
        snapshot_create(&specs, &dest, &opts(dir.path()), None).unwrap();
        let payload = dest.join("payloads/b.csv");
        std::fs::write(&payload, "date,value\n1990-01-01,8\n").unwrap();
        match snapshot_load(&dest) {
            Err(Error::HashMismatch(p)) => assert_eq!(p, payload),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_pieces() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(snapshot_load(&dir.path().join("nope")), Err(Error::NoSnapshot(_))));
        assert!(matches!(snapshot_load(dir.path()), Err(Error::NoManifest(_))));
    }

    struct Counting {
        calls: AtomicUsize,
    }

    impl Transport for &Counting {
        fn get(&self, url: &str) -> std::result::Result<HttpResponse, TransportError> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            let id = url.split("series_id=").nth(1).unwrap().split('&').next().unwrap();
            let v = id.len();
            Ok(HttpResponse {
                status: 200,
                body: format!(r#"{{"observations":[{{"date":"2000-01-01","value":"{v}"}}]}}"#),
            })
        }
    }

    #[test]
    fn fred_specs_fetch_through_client() {
        let dir = tempfile::tempdir().unwrap();
        let t = Counting { calls: AtomicUsize::new(0) };
        let client = FredClient::new("http://mock/fred", "k", &t).unwrap();
        let specs: Vec<SeriesSpec> = ["A", "BB", "CCC", "DDDD", "EEEEE", "FFFFFF"]
            .iter()
            .map(|id| SeriesSpec::new(id, Source::Fred, id, Unit::PercentPoints, Frequency::Quarterly))
            .collect();
        let dest = dir.path().join("snap");
        snapshot_create(&specs, &dest, &opts(dir.path()), Some(&client)).unwrap();
        assert_eq!(t.calls.load(Ordering::SeqCst), 6);
        let snap = snapshot_load(&dest).unwrap();
        assert_eq!(snap.series("EEEEE").unwrap().points()[0].value, 5.0);
        assert!(dest.join("payloads/A.json").is_file());
    }

    #[test]
    fn fred_spec_without_client_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let spec = SeriesSpec::new("x", Source::Fred, "x", Unit::PercentPoints, Frequency::Quarterly);
        assert!(matches!(
            snapshot_create(&[spec], &dir.path().join("s"), &opts(dir.path()), None),
            Err(Error::Config(_))
        ));
    }
}
