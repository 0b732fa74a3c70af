//! The six subcommands. Each returns a [`ReportDoc`]; the caller decides how
//! to print it and which exit code it maps to.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use coopstore::eavesdropper::{
    all_sizes, bandwidth_comparison, capacity_sweep, leakage_report, EveModel, LeakageReport,
};
use coopstore::entropy::{brute_force_entropy, entropy_symbols, ObservationSet};
use coopstore::error::Error;
use coopstore::field::{Field, FieldSpec, FiniteField};
use coopstore::legacy::{CodeA, CodeB};
use coopstore::lemmas::{lemma_suite, SuiteOptions};
use coopstore::matrix::Mat;
use coopstore::params::{CodeParams, NodeId, RepairContext};
use coopstore::scheme::{stability_certificate, LinearRepairScheme, StabilityVerdict};
use coopstore::secure::SecureScheme;
use coopstore::stable::{RepairOutcome, ShardVector, StableCode};

use crate::config::{ExperimentConfig, Variant};
use crate::report::ReportDoc;
use crate::shard_file::{bytes_to_symbols, shard_name, symbols_to_bytes, ShardFile, ShardHeader};
use crate::CliError;

pub const MANIFEST: &str = "manifest.json";
pub const MANIFEST_SCHEMA: &str = "coopstore.manifest/v1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub node: NodeId,
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub variant: Variant,
    pub field: FieldSpec,
    pub params: CodeParams,
    pub generations: u64,
    pub input_bytes: u64,
    pub input_sha256: String,
    pub shards: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn read(dir: &Path) -> Result<Option<Self>, CliError> {
        let path = dir.join(MANIFEST);
        if !path.exists() {
            return Ok(None);
        }
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        serde_json::from_str(&text).map(Some).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))
    }

    fn digest_of(&self, node: NodeId) -> Option<&str> {
        self.shards.iter().find(|s| s.node == node).map(|s| s.sha256.as_str())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// The codes that store files: both keep `M G` on the same Vandermonde
/// generator and differ only in how they repair.
struct FileCodec {
    stable: StableCode,
    code_b: Option<CodeB>,
}

impl FileCodec {
    fn new(variant: Variant, params: &CodeParams, field: Field) -> Result<Self, CliError> {
        let stable = StableCode::new(params.n, params.k, params.t, field)?;
        let code_b = match variant {
            Variant::Stable => None,
            Variant::CodeB => {
                let b = CodeB::new(params.n, params.k, params.t, field)?;
                debug_assert_eq!(b.generator(), stable.generator());
                Some(b)
            }
            Variant::CodeA => {
                return Err(CliError::Config(
                    "code-a is modelled at the repair-functional level only; use it with `attack`".into(),
                ))
            }
        };
        Ok(FileCodec { stable, code_b })
    }

    fn encode(&self, message: &[u64]) -> Result<Vec<ShardVector>, CliError> {
        Ok(match &self.code_b {
            Some(b) => b.encode(&self.stable.message_matrix(message)?)?,
            None => self.stable.encode_message(message)?,
        })
    }

    fn reconstruct(&self, shards: &[ShardVector]) -> Result<Vec<u64>, CliError> {
        Ok(self.stable.reconstruct(shards)?.row_vecs().concat())
    }

    fn repair(&self, ctx: &RepairContext, surviving: &[ShardVector]) -> Result<RepairOutcome, CliError> {
        Ok(match &self.code_b {
            Some(b) => b.cooperative_repair(ctx, surviving)?,
            None => self.stable.cooperative_repair(ctx, surviving)?,
        })
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn encode(cfg: &ExperimentConfig, input: &Path, out_dir: &Path) -> Result<ReportDoc, CliError> {
    let mut report = ReportDoc::new("encode", cfg);
    let started = Instant::now();
    let data = std::fs::read(input).map_err(|e| CliError::io(input, e))?;
    if data.is_empty() {
        return Err(CliError::Config(format!("{} is empty", input.display())));
    }
    let field = cfg.field()?;
    let codec = FileCodec::new(cfg.variant, &cfg.params, field)?;
    let b = cfg.params.file_size;
    let symbols = bytes_to_symbols(&data, &field, b);
    let generations = symbols.len() / b;
    let mut per_node: Vec<Vec<Vec<u64>>> = vec![Vec::with_capacity(generations); cfg.params.n];
    for g in symbols.chunks(b) {
        for s in codec.encode(g)? {
            per_node[s.node_id - 1].push(s.symbols);
        }
    }
    report.time("encode", started);

    let started = Instant::now();
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut entries = Vec::new();
    let mut files = Vec::new();
    for (i, symbols) in per_node.into_iter().enumerate() {
        let header = ShardHeader {
            variant: cfg.variant,
            field: cfg.field,
            params: cfg.params,
            node_id: i + 1,
            generations: generations as u64,
        };
        let file = ShardFile { header, symbols };
        let bytes = file.to_bytes()?;
        let name = shard_name(i + 1);
        write_file(&out_dir.join(&name), &bytes)?;
        entries.push(ManifestEntry { node: i + 1, file: name, bytes: bytes.len() as u64, sha256: sha256_hex(&bytes) });
        files.push(file);
    }
    let manifest = Manifest {
        schema: MANIFEST_SCHEMA.into(),
        variant: cfg.variant,
        field: cfg.field,
        params: cfg.params,
        generations: generations as u64,
        input_bytes: data.len() as u64,
        input_sha256: sha256_hex(&data),
        shards: entries,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Format(e.to_string()))?;
    write_file(&out_dir.join(MANIFEST), text.as_bytes())?;
    report.time("write", started);

    report.note(
        "striping",
        format!(
            "{} bytes -> {} symbols of {} bits -> {generations} generations, {} symbols per shard",
            data.len(),
            symbols.len(),
            field.bits_per_symbol(),
            generations * cfg.params.alpha
        ),
    );
    // read back through the first k shards to prove the files decode
    let subset = &files[..cfg.params.k];
    let decoded = decode_files(&codec, subset, &field)?;
    report.check("round trip", decoded == data, format!("decoded from nodes 1..={} matches the input", cfg.params.k));
    report.section("manifest", &manifest)?;
    Ok(report)
}

fn decode_files(codec: &FileCodec, files: &[ShardFile], field: &Field) -> Result<Vec<u8>, CliError> {
    let generations = files[0].header.generations as usize;
    let mut symbols = Vec::with_capacity(generations * codec.stable.params().file_size);
    for g in 0..generations {
        let shards: Vec<ShardVector> = files.iter().map(|f| f.generation(g)).collect();
        symbols.extend(codec.reconstruct(&shards)?);
    }
    symbols_to_bytes(&symbols, field)
}

/// Every readable shard file in `dir`, keyed by node; unreadable files are
/// reported rather than fatal.
fn load_shards(dir: &Path, report: &mut ReportDoc) -> Result<BTreeMap<NodeId, ShardFile>, CliError> {
    let mut out = BTreeMap::new();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "shard"))
        .collect();
    paths.sort();
    for path in paths {
        match ShardFile::read(&path) {
            Ok(f) => {
                if let Some(prev) = out.values().next() {
                    let prev: &ShardFile = prev;
                    if !prev.header.same_stripe(&f.header) {
                        return Err(CliError::Format(format!("{} belongs to a different encoding", path.display())));
                    }
                }
                if out.insert(f.header.node_id, f).is_some() {
                    return Err(CliError::Format(format!("two files claim the node of {}", path.display())));
                }
            }
            Err(e) => report.check(format!("read {}", path.file_name().unwrap().to_string_lossy()), false, e.to_string()),
        }
    }
    Ok(out)
}

/// Loads shards from a directory and rebuilds the stored file.
pub fn decode(cfg: &ExperimentConfig, dir: &Path, output: &Path) -> Result<ReportDoc, CliError> {
    let mut report = ReportDoc::new("decode", cfg);
    let started = Instant::now();
    let shards = load_shards(dir, &mut report)?;
    let Some(first) = shards.values().next() else {
        return Err(CliError::Config(format!("no shard files in {}", dir.display())));
    };
    let h = first.header.clone();
    report.config.variant = h.variant;
    report.config.params = h.params;
    report.config.field = h.field;
    let field = Field::new(h.field)?;
    let codec = FileCodec::new(h.variant, &h.params, field)?;
    if shards.len() < h.params.k {
        return Err(Error::TooFewShards { needed: h.params.k, got: shards.len() }.into());
    }
    let chosen: Vec<ShardFile> = shards.values().take(h.params.k).cloned().collect();
    let nodes: Vec<NodeId> = chosen.iter().map(|f| f.header.node_id).collect();
    let data = decode_files(&codec, &chosen, &field)?;
    report.time("decode", started);
    write_file(output, &data)?;
    report.note("decode", format!("{} bytes from nodes {nodes:?} of {} present", data.len(), shards.len()));
    if let Some(m) = Manifest::read(dir)? {
        let digest = sha256_hex(&data);
        report.check("sha256", digest == m.input_sha256, format!("{digest} vs manifest {}", m.input_sha256));
    }
    Ok(report)
}

/// Regenerates the shards of `group` from the surviving files in `dir`.
pub fn repair(
    cfg: &ExperimentConfig,
    dir: &Path,
    group: &[NodeId],
    helpers: Option<&[NodeId]>,
    out_dir: Option<&Path>,
) -> Result<ReportDoc, CliError> {
    let mut report = ReportDoc::new("repair", cfg);
    let started = Instant::now();
    let mut shards = load_shards(dir, &mut report)?;
    for &node in group {
        if shards.remove(&node).is_some() {
            report.note(format!("node {node}"), "existing shard ignored, treated as failed");
        }
    }
    let Some(first) = shards.values().next() else {
        return Err(CliError::Config(format!("no surviving shard files in {}", dir.display())));
    };
    let h = first.header.clone();
    let p = h.params;
    report.config.variant = h.variant;
    report.config.params = p;
    report.config.field = h.field;
    let ctx = match helpers {
        Some(hs) => RepairContext::new(&p, group, hs)?,
        None => RepairContext::with_default_helpers(&p, group)?,
    };
    let codec = FileCodec::new(h.variant, &p, Field::new(h.field)?)?;
    let mut regenerated: Vec<Vec<Vec<u64>>> = vec![Vec::new(); p.t];
    let (mut downloaded, mut exchanged) = (0usize, 0usize);
    let mut counts_ok = true;
    for g in 0..h.generations as usize {
        let surviving: Vec<ShardVector> = ctx
            .helpers()
            .iter()
            .map(|n| shards.get(n).map(|f| f.generation(g)).ok_or(Error::MissingShard(*n)))
            .collect::<Result<_, _>>()?;
        let out = codec.repair(&ctx, &surviving)?;
        counts_ok &= out.downloaded == p.t * p.d * p.beta && out.exchanged == p.t * (p.t - 1) * p.beta_prime;
        downloaded += out.downloaded;
        exchanged += out.exchanged;
        for (slot, s) in regenerated.iter_mut().zip(out.shards) {
            slot.push(s.symbols);
        }
    }
    report.time("repair", started);
    report.check(
        "transfer counts",
        counts_ok,
        format!(
            "{downloaded} downloaded + {exchanged} exchanged over {} generations; per generation t*d*beta = {}, t(t-1)*beta' = {}",
            h.generations,
            p.t * p.d * p.beta,
            p.t * (p.t - 1) * p.beta_prime
        ),
    );
    let target = out_dir.unwrap_or(dir);
    std::fs::create_dir_all(target).map_err(|e| CliError::io(target, e))?;
    let manifest = Manifest::read(dir)?;
    for (&node, symbols) in ctx.group().iter().zip(regenerated) {
        let file = ShardFile { header: ShardHeader { node_id: node, ..h.clone() }, symbols };
        let bytes = file.to_bytes()?;
        write_file(&target.join(shard_name(node)), &bytes)?;
        let digest = sha256_hex(&bytes);
        match manifest.as_ref().and_then(|m| m.digest_of(node)) {
            Some(want) => report.check(format!("node {node} sha256"), digest == want, format!("{digest} vs manifest {want}")),
            None => report.note(format!("node {node} sha256"), format!("{digest} (no manifest entry)")),
        }
    }
    report.section(
        "repair",
        json!({
            "group": ctx.group(),
            "helpers": ctx.helpers(),
            "generations": h.generations,
            "downloaded": downloaded,
            "exchanged": exchanged,
        }),
    )?;
    Ok(report)
}

fn random_vec(rng: &mut ChaCha8Rng, len: usize, q: u64) -> Vec<u64> {
    (0..len).map(|_| rng.gen_range(0..q)).collect()
}

fn rows_json(obs: &ObservationSet) -> Vec<serde_json::Value> {
    obs.labels().iter().zip(obs.rows().row_vecs()).map(|(l, r)| json!({ "label": l, "coefficients": r })).collect()
}

fn exact(ok: bool) -> &'static str {
    if ok {
        "EXACT"
    } else {
        "MISMATCH"
    }
}

/// Runs the attack on an unstable code against a seeded random message.
pub fn attack(cfg: &ExperimentConfig) -> Result<ReportDoc, CliError> {
    let mut report = ReportDoc::new("attack", cfg);
    let field = cfg.field()?;
    let q = field.order();
    let p = cfg.params;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let started = Instant::now();
    match cfg.variant {
        Variant::Stable => return Err(CliError::Config("attack needs --variant code-a or code-b".into())),
        Variant::CodeA => {
            let omega = cfg.omega.unwrap_or_else(|| field.primitive_element());
            let code = CodeA::new(p.d, field, omega)?;
            let parity = cfg.parity.unwrap_or(1);
            let a = random_vec(&mut rng, p.d, q);
            let b = random_vec(&mut rng, p.d, q);
            let shards = code.encode(&a, &b)?;
            let out = code.attack(&shards, parity)?;
            report.time("attack", started);
            let ok = out.a == a && out.b == b;
            report.check("recovered", ok, format!("{}, leaked {}/{} symbols", exact(ok), out.leaked_entropy, p.file_size));
            report.check(
                "leakage matrix",
                out.leakage_matrix.is_invertible(),
                format!("omega = {omega}, parity node {} (index {parity})", parity + 2),
            );
            report.note("granted", "node 1's stored content a is given to the eavesdropper");
            report.section(
                "attack",
                json!({
                    "scheme": "code-a",
                    "omega": omega,
                    "parity": parity,
                    "original": { "a": a, "b": b },
                    "recovered": { "a": out.a, "b": out.b },
                    "leakage_matrix": out.leakage_matrix.row_vecs(),
                    "leaked_entropy": out.leaked_entropy,
                    "content_granted": out.content_granted,
                    "observations": rows_json(&out.observations),
                }),
            )?;
        }
        Variant::CodeB => {
            let code = CodeB::new(p.n, p.k, p.t, field)?;
            let m = Mat::from_rows(&field, p.k, (0..p.t).map(|_| random_vec(&mut rng, p.k, q)).collect())?;
            let shards = code.encode(&m)?;
            let out = code.attack(&shards)?;
            report.time("attack", started);
            let ok = out.recovered == m;
            report.check("recovered", ok, format!("{}, leaked {}/{} symbols", exact(ok), out.leaked_entropy, p.file_size));
            let groups: Vec<String> = out.groups.iter().map(|c| c.to_string()).collect();
            report.note("groups", groups.join("; "));
            report.section(
                "attack",
                json!({
                    "scheme": "code-b",
                    "groups": out.groups,
                    "original": m.row_vecs(),
                    "recovered": out.recovered.row_vecs(),
                    "leaked_entropy": out.leaked_entropy,
                    "observations": rows_json(&out.observations),
                }),
            )?;
        }
    }
    Ok(report)
}

fn placement_reports<S: LinearRepairScheme>(
    code: &S,
    cfg: &ExperimentConfig,
    predict: bool,
) -> Result<Vec<LeakageReport>, CliError> {
    cfg.eve
        .iter()
        .map(|e| {
            let eve = EveModel::new(&cfg.params, &e.observed, &e.downloads)?;
            Ok(leakage_report(code, &eve, predict)?)
        })
        .collect()
}

/// Measured against predicted secrecy capacity over every placement.
pub fn sweep(cfg: &ExperimentConfig) -> Result<ReportDoc, CliError> {
    let mut report = ReportDoc::new("sweep", cfg);
    let field = cfg.field()?;
    let p = cfg.params;
    let sizes = cfg.sweep.clone().unwrap_or_else(|| all_sizes(&p));
    let started = Instant::now();
    match cfg.variant {
        Variant::Stable => {
            let code = StableCode::new(p.n, p.k, p.t, field)?;
            report.capacity_table = capacity_sweep(&code, &sizes, true)?;
            report.leakage = placement_reports(&code, cfg, true)?;
        }
        Variant::CodeB => {
            let code = CodeB::new(p.n, p.k, p.t, field)?;
            report.capacity_table = capacity_sweep(&code, &sizes, false)?;
            report.leakage = placement_reports(&code, cfg, false)?;
            report.note("mode", "measured only: the closed form covers stable codes");
        }
        Variant::CodeA => return Err(CliError::Config("sweep covers stable and code-b; code-a models one repair group".into())),
    }
    report.time("sweep", started);
    let rows: Vec<(String, bool, String)> = report
        .capacity_table
        .iter()
        .map(|r| {
            (
                format!("capacity ({}, {})", r.l1, r.l2),
                r.passes(),
                format!(
                    "{} placements, measured {}..{}, predicted {}, {} mismatches",
                    r.placements, r.measured_min, r.measured_max, r.predicted, r.mismatches
                ),
            )
        })
        .collect();
    for (name, ok, detail) in rows {
        report.check(name, ok, detail);
    }
    let leak_rows: Vec<(String, Option<bool>)> = report
        .leakage
        .iter()
        .map(|l| (format!("leakage E={:?} F={:?}", l.eve.observed(), l.eve.downloads()), l.matches_prediction()))
        .collect();
    for (name, matches) in leak_rows {
        if let Some(ok) = matches {
            report.check(name, ok, "measured capacity vs prediction");
        }
    }
    Ok(report)
}

/// Brute-force entropy against rank on seeded random observation sets.
fn entropy_cross_check(seed: u64, sets: usize) -> Result<(usize, usize), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agree = 0;
    for i in 0..sets {
        let q = if i % 2 == 0 { 2 } else { 3 };
        let f = Field::prime(q)?;
        let b = rng.gen_range(1..=if q == 2 { 12 } else { 7 });
        let rows = rng.gen_range(0..=b + 2);
        let m = Mat::from_fn(&f, rows, b, |_, _| rng.gen_range(0..q));
        let obs = ObservationSet::from_mat(m, "x");
        if brute_force_entropy(&obs)?.equals_symbols(entropy_symbols(&obs), q) {
            agree += 1;
        }
    }
    Ok((agree, sets))
}

/// Lemma identities, stability, entropy cross-checks and bandwidth.
pub fn verify(cfg: &ExperimentConfig) -> Result<ReportDoc, CliError> {
    let mut report = ReportDoc::new("verify", cfg);
    let field = cfg.field()?;
    let p = cfg.params;
    match cfg.variant {
        Variant::Stable => {
            let code = StableCode::new(p.n, p.k, p.t, field)?;
            verify_scheme(&code, &mut report)?;
            if field.is_binary() {
                verify_secure(&code, &mut report)?;
            }
        }
        Variant::CodeB => verify_scheme(&CodeB::new(p.n, p.k, p.t, field)?, &mut report)?,
        Variant::CodeA => {
            let omega = cfg.omega.unwrap_or_else(|| field.primitive_element());
            let code = CodeA::new(p.d, field, omega)?;
            let started = Instant::now();
            stability_rows(&code, &mut report)?;
            report.time("stability", started);
        }
    }
    let started = Instant::now();
    let (agree, total) = entropy_cross_check(cfg.seed, 100)?;
    report.time("entropy oracle", started);
    report.check("entropy oracle", agree == total, format!("{agree}/{total} random sets: brute force = rank * log2 q"));
    let bw = bandwidth_comparison(p.n, p.k, p.d, p.t, p.file_size)?;
    let rel = match bw.mscr.cmp(&bw.msr) {
        std::cmp::Ordering::Less => "<",
        std::cmp::Ordering::Equal => "=",
        std::cmp::Ordering::Greater => ">",
    };
    report.check("bandwidth", bw.mscr <= bw.msr, format!("MSCR {} {rel} MSR {}", bw.mscr, bw.msr));
    report.section("bandwidth", bw)?;
    Ok(report)
}

fn stability_rows<S: LinearRepairScheme>(code: &S, report: &mut ReportDoc) -> Result<(), CliError> {
    match stability_certificate(code)? {
        StabilityVerdict::Stable { contexts, transfers } => {
            report.check("stability", true, format!("{transfers} transfers agree across {contexts} contexts"));
        }
        StabilityVerdict::Unstable(w) => {
            report.check(
                "stability",
                false,
                format!(
                    "helper {} sends node {} {:?} in {} but {:?} in {}",
                    w.helper,
                    w.failed,
                    w.first.row_vecs(),
                    w.first_context,
                    w.second.row_vecs(),
                    w.second_context
                ),
            );
            report.section(
                "stability_witness",
                json!({
                    "helper": w.helper,
                    "failed": w.failed,
                    "first_context": w.first_context,
                    "first": w.first.row_vecs(),
                    "second_context": w.second_context,
                    "second": w.second.row_vecs(),
                }),
            )?;
        }
    }
    Ok(())
}

fn verify_scheme<S: LinearRepairScheme>(code: &S, report: &mut ReportDoc) -> Result<(), CliError> {
    let started = Instant::now();
    stability_rows(code, report)?;
    report.time("stability", started);
    let started = Instant::now();
    let lemmas = lemma_suite(code, SuiteOptions { seed: report.config.seed, ..SuiteOptions::default() })?;
    report.time("lemmas", started);
    for c in &lemmas.checks {
        let name = serde_json::to_value(c.identity).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        match (&c.skipped, c.violations.first()) {
            (Some(why), _) => report.note(name, format!("not applicable: {why}")),
            (None, None) => report.check(name, true, format!("{} cases", c.cases)),
            (None, Some(v)) => report.check(
                name,
                false,
                format!("{}/{} cases fail, e.g. {} at {}: expected {}, got {}", c.violations.len(), c.cases, v.statement, v.witness, v.expected, v.got),
            ),
        }
    }
    report.section("lemmas", &lemmas)?;
    Ok(())
}

/// Secrecy of the precoded scheme for every covered size with a nonzero secret.
fn verify_secure(code: &StableCode, report: &mut ReportDoc) -> Result<(), CliError> {
    let started = Instant::now();
    let p = code.params();
    for (l1, l2) in all_sizes(p) {
        let scheme = match SecureScheme::new(code, l1, l2) {
            Ok(s) => s,
            Err(Error::VacuousScheme) | Err(Error::NotCoveredRegime(..)) => continue,
            Err(e) => return Err(e.into()),
        };
        let verdicts = scheme.verify_all(l1, l2)?;
        let blind = verdicts.iter().filter(|v| v.passed()).count();
        report.check(
            format!("secure ({l1}, {l2})"),
            blind == verdicts.len(),
            format!("secret {} + randomness {} symbols, I(s;e) = 0 on {blind}/{} placements", scheme.secret_len(), scheme.random_len(), verdicts.len()),
        );
    }
    report.time("secure", started);
    Ok(())
}
