use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};

use panelstat::battery::{run_battery, summarize_lags, BatteryConfig, Method};
use panelstat::burden::{
    age_standardize, compute_daly, compute_yld, compute_yll, parse_band_csv, parse_weights_csv,
    BandValues, DisabilityWeights, LifeTable,
};
use panelstat::panel::{
    fixture_dataset, parse_gbd_long, parse_wdi_wide, parse_wdi_wide_with_region, synthetic_outcome,
    AgeGroup, PanelDataset, DEFAULT_REGION,
};
use panelstat::report::{
    export_csv, export_json, format_sig6, render_heatmap_svg, ExportBundle, Palette,
};
use panelstat::Error;

#[derive(Parser)]
#[command(
    name = "panelstat",
    version,
    about = "Dependency analysis for region x indicator x year panels"
)]
struct Cli {
    /// Seed for the synthetic outcome generator.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Suppress progress messages on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse WDI-style wide and/or GBD-style long CSV into a panel file.
    #[command(group(ArgGroup::new("source").required(true).multiple(true).args(["wdi", "gbd"])))]
    Ingest {
        #[arg(long)]
        wdi: Option<PathBuf>,
        #[arg(long)]
        gbd: Option<PathBuf>,
        /// Region id for a WDI file without a region column; for GBD input,
        /// keep only this location.
        #[arg(long)]
        region: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the battery and write one CSV and SVG per matrix plus bundle.json.
    Analyze {
        #[arg(long)]
        panel: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute YLL, YLD and DALY from per-band inputs.
    Burden {
        #[arg(long)]
        deaths: PathBuf,
        #[arg(long)]
        prevalence: PathBuf,
        #[arg(long = "life-table")]
        life_table: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        /// Standard-population weights; adds the age-standardized DALY rate.
        #[arg(long = "std-pop")]
        std_pop: Option<PathBuf>,
        /// Condition to read from the weights file (needed when it holds
        /// more than one).
        #[arg(long)]
        condition: Option<String>,
    },
    /// Print the embedded annual indicator table as a panel file.
    Fixture {
        /// Append one seeded synthetic outcome series per listed age group
        /// (`all`, `20-39`, `40+`); the bare flag adds an all-ages series.
        #[arg(long = "synthetic-outcomes", num_args = 0.., value_delimiter = ',', default_missing_value = "all")]
        synthetic_outcomes: Option<Vec<String>>,
    },
}

/// Failure classes, one per exit code.
#[derive(Debug)]
enum Failure {
    Input(String),
    Config(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Config(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let m = e.to_string();
        match e {
            Error::Parse { .. }
            | Error::DuplicateKey(_)
            | Error::UnknownAgeGroup(_)
            | Error::NotFound { .. }
            | Error::MissingBand(_)
            | Error::MissingWeight { .. }
            | Error::Normalization(_) => Failure::Input(m),
            Error::Config(_) | Error::WrongMethod { .. } => Failure::Config(m),
            _ => Failure::Numerical(m),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Ingest {
            wdi,
            gbd,
            region,
            out,
        } => ingest(cli, wdi.as_deref(), gbd.as_deref(), region.as_deref(), out),
        Command::Analyze { panel, config, out } => analyze(cli, panel, config, out),
        Command::Burden {
            deaths,
            prevalence,
            life_table,
            weights,
            std_pop,
            condition,
        } => burden(
            deaths,
            prevalence,
            life_table,
            weights,
            std_pop.as_deref(),
            condition.as_deref(),
        ),
        Command::Fixture { synthetic_outcomes } => {
            let mut ds = fixture_dataset();
            for (i, tag) in synthetic_outcomes.iter().flatten().enumerate() {
                let age = AgeGroup::parse(tag)?;
                let code = format!("synthetic:{}:DALYs", age.tag());
                ds =
                    synthetic_outcome(&ds, DEFAULT_REGION, &code, cli.seed.wrapping_add(i as u64))?;
            }
            print!("{}", ds.to_wdi_wide());
            Ok(())
        }
    }
}

fn ingest(
    cli: &Cli,
    wdi: Option<&Path>,
    gbd: Option<&Path>,
    region: Option<&str>,
    out: &Path,
) -> Result<(), Failure> {
    let mut parts = Vec::new();
    if let Some(path) = wdi {
        let text = read(path)?;
        let ds = parse_wdi_wide_with_region(&text, region.unwrap_or(DEFAULT_REGION))
            .map_err(with_path(path))?;
        parts.push(ds);
    }
    if let Some(path) = gbd {
        let mut ds = parse_gbd_long(&read(path)?).map_err(with_path(path))?;
        if let Some(r) = region {
            ds = keep_region(&ds, r).ok_or_else(|| {
                Failure::Input(format!("{}: no rows for location {r:?}", path.display()))
            })?;
        }
        parts.push(ds);
    }
    let mut panel = parts.remove(0);
    for p in &parts {
        panel = panel.merge(p)?;
    }
    write(out, &panel.to_wdi_wide())?;
    if !cli.quiet {
        eprintln!(
            "wrote {} regions x {} series ({} cells) to {}",
            panel.regions().len(),
            panel.indicators().len(),
            panel.cell_count(),
            out.display()
        );
    }
    Ok(())
}

fn keep_region(ds: &PanelDataset, region: &str) -> Option<PanelDataset> {
    if !ds.regions().iter().any(|r| r == region) {
        return None;
    }
    let cells = ds.indicators().iter().filter_map(|ind| {
        ds.series(region, &ind.code)
            .map(|s| (region.to_string(), ind.clone(), s.clone()))
    });
    PanelDataset::from_cells(cells.collect::<Vec<_>>()).ok()
}

fn analyze(cli: &Cli, panel: &Path, config: &Path, out: &Path) -> Result<(), Failure> {
    let dataset = parse_wdi_wide(&read(panel)?).map_err(with_path(panel))?;
    let config = BatteryConfig::from_toml(&read(config)?)
        .map_err(|e| Failure::Config(format!("{}: {e}", config.display())))?;
    let matrices = run_battery(&dataset, &config)?;

    fs::create_dir_all(out).map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?;
    for m in &matrices {
        let slug = m.slug();
        write(&out.join(format!("{slug}.csv")), &export_csv(m))?;
        write(
            &out.join(format!("{slug}.svg")),
            &render_heatmap_svg(m, Palette::for_method(m.method))?,
        )?;
    }
    let granger: Vec<_> = matrices
        .iter()
        .filter(|m| m.method == Method::Granger)
        .cloned()
        .collect();
    let bundle = ExportBundle::new(&dataset, &config, matrices);
    write(&out.join("bundle.json"), &export_json(&bundle))?;

    if !cli.quiet {
        for m in &bundle.matrices {
            eprintln!(
                "{}: {} computed, {} skipped",
                m.slug(),
                m.computed_count(),
                m.skipped_count()
            );
        }
        for row in summarize_lags(&granger)? {
            let counts: Vec<String> = row
                .counts
                .iter()
                .map(|(lag, c)| format!("{lag}:{c}"))
                .collect();
            eprintln!(
                "best lags {} / {}: {}",
                row.outcome,
                row.category,
                counts.join(" ")
            );
        }
    }
    Ok(())
}

fn burden(
    deaths: &Path,
    prevalence: &Path,
    life_table: &Path,
    weights: &Path,
    std_pop: Option<&Path>,
    condition: Option<&str>,
) -> Result<(), Failure> {
    let deaths_v = parse_band_csv(&read(deaths)?).map_err(input(deaths))?;
    let prev_v = parse_band_csv(&read(prevalence)?).map_err(input(prevalence))?;
    let table = LifeTable::new(parse_band_csv(&read(life_table)?).map_err(input(life_table))?)
        .map_err(input(life_table))?;
    let dw = parse_weights_csv(&read(weights)?).map_err(input(weights))?;
    let condition = pick_condition(&dw, condition)?;

    let yll = compute_yll(&deaths_v, &table).map_err(input(deaths))?;
    let yld = compute_yld(&prev_v, &dw, &condition).map_err(input(prevalence))?;
    let summary = compute_daly(yll, yld).map_err(|e| Failure::Input(e.to_string()))?;

    let mut lines = vec![
        ("condition", condition.clone()),
        ("yll", format_sig6(summary.yll)),
        ("yld", format_sig6(summary.yld)),
        ("daly", format_sig6(summary.daly)),
    ];

    if let Some(path) = std_pop {
        let std_w = parse_band_csv(&read(path)?).map_err(input(path))?;
        // per-band DALYs, read as rates when the inputs are rates
        let mut per_band = BandValues::new();
        for band in deaths_v.keys().chain(prev_v.keys()) {
            let single = |v: &BandValues| -> BandValues {
                v.get(band)
                    .map(|&x| BandValues::from([(band.clone(), x)]))
                    .unwrap_or_default()
            };
            let yll_b = compute_yll(&single(&deaths_v), &table).map_err(input(deaths))?;
            let yld_b =
                compute_yld(&single(&prev_v), &dw, &condition).map_err(input(prevalence))?;
            per_band.insert(band.clone(), yll_b + yld_b);
        }
        let rate = age_standardize(&per_band, &std_w).map_err(input(path))?;
        lines.push(("age_standardized_daly", format_sig6(rate)));
    }
    for (k, v) in lines {
        println!("{k}\t{v}");
    }
    Ok(())
}

// every burden failure is a problem with the inputs
fn input(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", path.display()))
}

fn pick_condition(weights: &DisabilityWeights, requested: Option<&str>) -> Result<String, Failure> {
    let known = weights.conditions();
    match requested {
        Some(c) if known.contains(&c) => Ok(c.to_string()),
        Some(c) => Err(Failure::Input(format!(
            "condition {c:?} not in weights file (have: {})",
            known.join(", ")
        ))),
        None if known.len() == 1 => Ok(known[0].to_string()),
        None => Err(Failure::Input(format!(
            "weights file holds {} conditions; choose one with --condition",
            known.len()
        ))),
    }
}
