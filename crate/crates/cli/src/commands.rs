use std::fs;
use std::io::Write;
use std::path::Path;

use pgapolar::construction::{read_frozen_indices, swapped_count_of_frozen_sets};
use pgapolar::simulation::{write_csv_header, write_csv_row, RESULTS_SCHEMA_VERSION};
use pgapolar::{
    construct, encode, frozen_mask, run_campaign_with, sc_decode, BisectionSpec, CampaignSpec,
    CodeContext, CodeSpec, FerStats, FrozenMask, Phi, PhiKind, QuadratureSpec,
};
use serde::Serialize;

use crate::args::{
    CodeArgs, CodecArgs, Command, CompareArgs, ConstructArgs, DecodeArgs, Metric, PhiArgs,
    SimulateArgs, DEFAULT_DESIGN_EBN0_DB,
};
use crate::bitio::{format_bits, parse_bits, parse_llrs};
use crate::error::{io_context, CliError, CliResult};
use crate::output::{read_input, with_suffix, writer, FileSet};

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Construct(a) => cmd_construct(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::Encode(a) => cmd_encode(&a),
        Command::Decode(a) => cmd_decode(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Phi(a) => cmd_phi(&a),
    }
}

fn code_spec(
    n: usize,
    k: usize,
    design_snr_db: Option<f64>,
    design_ebn0_db: Option<f64>,
    method: PhiKind,
) -> CliResult<CodeSpec> {
    Ok(match (design_snr_db, design_ebn0_db) {
        (Some(_), Some(_)) => {
            return Err(CliError::validation(
                "give at most one of --design-snr-db and --design-ebn0-db",
            ))
        }
        (Some(snr), None) => CodeSpec::new(n, k, snr, method)?,
        (None, ebn0) => {
            CodeSpec::with_design_ebn0(n, k, ebn0.unwrap_or(DEFAULT_DESIGN_EBN0_DB), method)?
        }
    })
}

fn read_frozen_file(path: &Path) -> CliResult<Vec<usize>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    Ok(read_frozen_indices(text.as_bytes())?)
}

fn resolve_code(args: &CodeArgs) -> CliResult<CodeContext> {
    match &args.frozen {
        Some(path) => {
            let mask = FrozenMask::from_frozen(args.n, read_frozen_file(path)?)?;
            if let Some(k) = args.k {
                if k != mask.k() {
                    return Err(CliError::validation(format!(
                        "--k {k} disagrees with the frozen set (K = {})",
                        mask.k()
                    )));
                }
            }
            let spec = code_spec(
                args.n,
                mask.k(),
                args.design_snr_db,
                args.design_ebn0_db,
                args.method,
            )?;
            Ok(CodeContext::from_mask(spec, mask)?)
        }
        None => {
            let k = args
                .k
                .ok_or_else(|| CliError::validation("--k is required unless --frozen is given"))?;
            let spec = code_spec(
                args.n,
                k,
                args.design_snr_db,
                args.design_ebn0_db,
                args.method,
            )?;
            Ok(CodeContext::build(&spec)?)
        }
    }
}

#[derive(Serialize)]
struct Metadata<'a, C: Serialize, X: Serialize> {
    schema_version: u32,
    toolkit: &'static str,
    toolkit_version: &'static str,
    config: &'a C,
    #[serde(flatten)]
    extra: X,
}

fn metadata_json<C: Serialize, X: Serialize>(config: &C, extra: X) -> CliResult<String> {
    let doc = Metadata {
        schema_version: RESULTS_SCHEMA_VERSION,
        toolkit: "pgapolar",
        toolkit_version: env!("CARGO_PKG_VERSION"),
        config,
        extra,
    };
    serde_json::to_string_pretty(&doc).map_err(|e| CliError::Runtime(e.to_string()))
}

fn cmd_construct(args: &ConstructArgs) -> CliResult<()> {
    if args.code.frozen.is_some() {
        return Err(CliError::validation("construct does not take --frozen"));
    }
    let k = args
        .code
        .k
        .ok_or_else(|| CliError::validation("construct requires --k"))?;
    let c = &args.code;
    let spec = code_spec(c.n, k, c.design_snr_db, c.design_ebn0_db, c.method)?;
    let profile = construct(&spec)?;
    let mask = frozen_mask(&profile, k)?;

    let mut csv = Vec::new();
    profile.write_csv(&mut csv)?;
    let Some(stem) = &args.out else {
        std::io::stdout().lock().write_all(&csv)?;
        return Ok(());
    };
    let mut frozen = Vec::new();
    mask.write_frozen(&mut frozen)?;
    #[derive(Serialize)]
    struct Extra<'a> {
        code: &'a CodeSpec,
        frozen_count: usize,
    }
    let json = metadata_json(
        args,
        Extra {
            code: &spec,
            frozen_count: mask.frozen().len(),
        },
    )?;
    let mut files = FileSet::new();
    files.stage(&with_suffix(stem, "csv"), &csv)?;
    files.stage(&with_suffix(stem, "frozen"), &frozen)?;
    files.stage(&with_suffix(stem, "json"), json.as_bytes())?;
    files.commit()
}

const TABLE_RATES: [(&str, usize, usize); 3] = [("1/2", 1, 2), ("1/3", 1, 3), ("2/3", 2, 3)];
const TABLE_LENGTHS: [usize; 5] = [128, 256, 512, 1024, 2048];

fn scale(count: usize, metric: Metric) -> usize {
    match metric {
        Metric::Swapped => count,
        Metric::Symmetric => 2 * count,
    }
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn cmd_compare(args: &CompareArgs) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    if args.table1 {
        let header: Vec<String> = TABLE_LENGTHS.iter().map(usize::to_string).collect();
        writeln!(out, "rate,{}", header.join(","))?;
        for (label, num, den) in TABLE_RATES {
            let mut cells = Vec::new();
            for n in TABLE_LENGTHS {
                let k = n * num / den;
                let a = code_spec(n, k, args.design_snr_db, args.design_ebn0_db, args.method_a)?;
                let b = CodeSpec {
                    method: args.method_b,
                    ..a
                };
                let count = pgapolar::build_mask(&a)?.swapped_count(&pgapolar::build_mask(&b)?)?;
                cells.push(scale(count, args.metric).to_string());
            }
            writeln!(out, "{label},{}", cells.join(","))?;
        }
        return Ok(());
    }

    let (count, only_a, only_b) = match (&args.a, &args.b) {
        (Some(pa), Some(pb)) => {
            let fa = read_frozen_file(pa)?;
            let fb = read_frozen_file(pb)?;
            match args.n {
                Some(n) => {
                    let ma = FrozenMask::from_frozen(n, fa)?;
                    let mb = FrozenMask::from_frozen(n, fb)?;
                    let (oa, ob) = ma.info_difference(&mb)?;
                    (ma.swapped_count(&mb)?, oa, ob)
                }
                None => {
                    let count = swapped_count_of_frozen_sets(&fa, &fb)?;
                    // Information only in a = frozen only in b, and vice versa.
                    let oa = fb
                        .iter()
                        .copied()
                        .filter(|i| fa.binary_search(i).is_err())
                        .collect();
                    let ob = fa
                        .iter()
                        .copied()
                        .filter(|i| fb.binary_search(i).is_err())
                        .collect();
                    (count, oa, ob)
                }
            }
        }
        _ => {
            let n = args.n.ok_or_else(|| {
                CliError::validation("compare needs --a/--b files or --n and --k")
            })?;
            let k = args
                .k
                .ok_or_else(|| CliError::validation("compare needs --k with --n"))?;
            let a = code_spec(n, k, args.design_snr_db, args.design_ebn0_db, args.method_a)?;
            let b = CodeSpec {
                method: args.method_b,
                ..a
            };
            let ma = pgapolar::build_mask(&a)?;
            let mb = pgapolar::build_mask(&b)?;
            let (oa, ob) = ma.info_difference(&mb)?;
            (ma.swapped_count(&mb)?, oa, ob)
        }
    };
    writeln!(out, "{}", scale(count, args.metric))?;
    if args.verbose {
        writeln!(out, "only_a: {}", join(&only_a))?;
        writeln!(out, "only_b: {}", join(&only_b))?;
    }
    Ok(())
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn at_line<T>(line: usize, r: CliResult<T>) -> CliResult<T> {
    r.map_err(|e| match e {
        CliError::Validation(m) => CliError::Validation(format!("line {line}: {m}")),
        other => other,
    })
}

fn cmd_encode(args: &CodecArgs) -> CliResult<()> {
    let ctx = resolve_code(&args.code)?;
    let text = read_input(&args.input)?;
    let mut lines = Vec::new();
    for (no, line) in data_lines(&text) {
        let msg = at_line(no, parse_bits(line, ctx.mask.k(), args.format))?;
        let x = encode(&msg, &ctx.mask)?;
        lines.push(format_bits(&x, args.format));
    }
    write_lines(&args.output, &lines)
}

fn cmd_decode(args: &DecodeArgs) -> CliResult<()> {
    let c = &args.codec;
    let ctx = resolve_code(&c.code)?;
    let n = ctx.mask.n();
    let text = read_input(&c.input)?;
    let mut lines = Vec::new();
    for (no, line) in data_lines(&text) {
        let llrs = if args.llr {
            at_line(no, parse_llrs(line, n))?
        } else {
            // Noiseless hard bits through BPSK with unit noise variance.
            let bits = at_line(no, parse_bits(line, n, c.format))?;
            bits.iter()
                .map(|&b| if b == 0 { 2.0 } else { -2.0 })
                .collect()
        };
        let (msg, _) = sc_decode(&llrs, &ctx.mask)?;
        lines.push(format_bits(&msg, c.format));
    }
    write_lines(&c.output, &lines)
}

fn write_lines(path: &Path, lines: &[String]) -> CliResult<()> {
    let mut w = writer(path)?;
    for l in lines {
        writeln!(w, "{l}").map_err(io_context(path))?;
    }
    w.flush().map_err(io_context(path))?;
    Ok(())
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn point_summary(s: &FerStats) -> String {
    format!(
        "Eb/N0 {:.2} dB: {} frames, {} frame errors, FER {:.3e}, BER {:.3e}{} ({:.1} s)",
        s.ebn0_db,
        s.frames,
        s.frame_errors,
        s.fer(),
        s.ber(),
        if s.is_upper_bound {
            " [frame cap reached]"
        } else {
            ""
        },
        s.wall_clock_s
    )
}

fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    let ctx = resolve_code(&args.code)?;
    let workers = args.workers.unwrap_or_else(default_workers);
    if workers == 0 {
        return Err(CliError::validation("--workers must be at least 1"));
    }
    let spec = CampaignSpec {
        code: ctx.spec,
        ebn0_grid_db: args.ebn0_db.clone(),
        target_frame_errors: args.target_frame_errors,
        max_frames: args.max_frames,
        master_seed: args.seed,
    };
    spec.validate()?;

    let json_path = match &args.out {
        Some(p) if p.extension().is_some_and(|e| e == "json") => {
            return Err(CliError::validation(
                "--out names the CSV file; the JSON is written next to it",
            ))
        }
        Some(p) => Some(p.with_extension("json")),
        None => None,
    };
    // Open everything before simulating so a bad path fails fast.
    let (mut csv, json_file) = match (&args.out, &json_path) {
        (Some(csv_path), Some(json_path)) => {
            let csv = writer(csv_path)?;
            let json = fs::File::create(json_path).map_err(io_context(json_path))?;
            (csv, Some(json))
        }
        _ => (writer(Path::new("-"))?, None),
    };

    write_csv_header(&mut csv)?;
    csv.flush()?;
    let result = run_campaign_with(&spec, &ctx, workers, |stats| {
        write_csv_row(&mut csv, stats)?;
        csv.flush()?;
        eprintln!("{}", point_summary(stats));
        Ok(())
    })
    .map_err(|f| CliError::from(f.error))?;

    if let (Some(mut file), Some(path)) = (json_file, json_path) {
        let mut effective = args.clone();
        effective.workers = Some(workers);
        let json = result.to_json(&effective)?;
        file.write_all(json.as_bytes()).map_err(io_context(&path))?;
        file.write_all(b"\n").map_err(io_context(&path))?;
    }
    Ok(())
}

fn cmd_phi(args: &PhiArgs) -> CliResult<()> {
    let quad = if args.nodes == QuadratureSpec::DEFAULT_NODES {
        QuadratureSpec::default()
    } else {
        QuadratureSpec::new(args.nodes)?
    };
    let phi = Phi::new(args.kind).with_quadrature(quad);
    let bisection = BisectionSpec {
        iteration_times: args.iterations,
        ..BisectionSpec::default()
    };
    bisection.validate()?;
    let mut rows = Vec::new();
    for &x in &args.x {
        rows.push((x, phi.eval(x)?));
    }
    for &y in &args.y {
        rows.push((y, phi.inverse(y, &bisection)?));
    }
    let mut out = std::io::stdout().lock();
    writeln!(out, "input,output,kind")?;
    for (input, output) in rows {
        writeln!(out, "{input},{output},{}", args.kind)?;
    }
    Ok(())
}
