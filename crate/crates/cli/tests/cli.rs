use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn panelstat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_panelstat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn put(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes the fixture panel (with the given extra arguments) into `dir`.
fn fixture_panel(dir: &Path, extra: &[&str]) -> PathBuf {
    let mut args = vec!["--quiet", "fixture"];
    args.extend_from_slice(extra);
    let out = panelstat(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    put(dir, "panel.csv", &stdout(&out))
}

#[test]
fn fixture_alone_has_fifteen_indicators() {
    let out = panelstat(&["fixture"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("code,region,1991,"));
    assert_eq!(text.lines().count(), 16);
}

#[test]
fn fixture_outcomes_depend_on_seed_only() {
    let a = stdout(&panelstat(&[
        "--seed",
        "4",
        "fixture",
        "--synthetic-outcomes",
    ]));
    let b = stdout(&panelstat(&[
        "--seed",
        "4",
        "fixture",
        "--synthetic-outcomes",
    ]));
    let c = stdout(&panelstat(&[
        "--seed",
        "5",
        "fixture",
        "--synthetic-outcomes",
    ]));
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.contains("\nsynthetic:all:DALYs,global,"));
    let both = stdout(&panelstat(&[
        "fixture",
        "--synthetic-outcomes",
        "20-39,40+",
    ]));
    assert!(both.contains("synthetic:20-39:DALYs") && both.contains("synthetic:40+:DALYs"));
    assert_eq!(
        code(&panelstat(&["fixture", "--synthetic-outcomes", "teen"])),
        1
    );
}

#[test]
fn analyze_writes_one_csv_and_svg_per_matrix() {
    let dir = TempDir::new().unwrap();
    let panel = fixture_panel(dir.path(), &["--synthetic-outcomes", "20-39,40+"]);
    let cfg = put(
        dir.path(),
        "cfg.toml",
        "methods = [\"pearson\", \"granger\"]\n",
    );
    let out_dir = dir.path().join("out");
    let out = panelstat(&[
        "analyze",
        "--panel",
        s(&panel),
        "--config",
        s(&cfg),
        "--out",
        s(&out_dir),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("best lags"));

    let mut names: Vec<String> = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "bundle.json",
            "granger_20-39_synthetic_20-39_DALYs.csv",
            "granger_20-39_synthetic_20-39_DALYs.svg",
            "granger_40p_synthetic_40p_DALYs.csv",
            "granger_40p_synthetic_40p_DALYs.svg",
            "pearson_20-39_synthetic_20-39_DALYs.csv",
            "pearson_20-39_synthetic_20-39_DALYs.svg",
            "pearson_40p_synthetic_40p_DALYs.csv",
            "pearson_40p_synthetic_40p_DALYs.svg",
        ]
    );
    for name in names.iter().filter(|n| n.ends_with(".svg")) {
        let text = fs::read_to_string(out_dir.join(name)).unwrap();
        roxmltree::Document::parse(&text).unwrap();
    }
}

#[test]
fn quiet_silences_progress() {
    let dir = TempDir::new().unwrap();
    let panel = fixture_panel(dir.path(), &["--synthetic-outcomes"]);
    let cfg = put(dir.path(), "cfg.toml", "methods = [\"pearson\"]\n");
    let out_dir = dir.path().join("out");
    let out = panelstat(&[
        "--quiet",
        "analyze",
        "--panel",
        s(&panel),
        "--config",
        s(&cfg),
        "--out",
        s(&out_dir),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stderr.is_empty());
}

#[test]
fn bundle_matches_golden() {
    let dir = TempDir::new().unwrap();
    let panel = fixture_panel(dir.path(), &["--synthetic-outcomes"]);
    let cfg = put(dir.path(), "cfg.toml", "");
    let out_dir = dir.path().join("out");
    let out = panelstat(&[
        "--quiet",
        "analyze",
        "--panel",
        s(&panel),
        "--config",
        s(&cfg),
        "--out",
        s(&out_dir),
    ]);
    assert_eq!(code(&out), 0);
    let bundle = fs::read_to_string(out_dir.join("bundle.json")).unwrap();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/bundle.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&golden, &bundle).unwrap();
    }
    let want =
        fs::read_to_string(&golden).expect("golden file; run with UPDATE_GOLDEN=1 to create it");
    // the version field moves with releases
    let strip = |t: &str| {
        t.lines()
            .filter(|l| !l.trim_start().starts_with("\"version\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert!(
        strip(&bundle) == strip(&want),
        "bundle.json drifted from the golden copy"
    );
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let panel = fixture_panel(dir.path(), &["--synthetic-outcomes"]);
    let out_dir = dir.path().join("out");
    let analyze = |cfg: &Path, panel: &Path| {
        code(&panelstat(&[
            "--quiet",
            "analyze",
            "--panel",
            s(panel),
            "--config",
            s(cfg),
            "--out",
            s(&out_dir),
        ]))
    };

    // config problems
    for bad in [
        "methods = [\"spearman\"]\n",
        "min_overlap = 2\n",
        "max_lag = 0\n",
        "colour = \"red\"\n",
        "indicators = [\"Z9\"]\n",
        "methods = [\n",
    ] {
        let cfg = put(dir.path(), "bad.toml", bad);
        assert_eq!(analyze(&cfg, &panel), 2, "{bad}");
    }

    // input problems
    let cfg = put(dir.path(), "ok.toml", "");
    let broken = put(dir.path(), "broken.csv", "code,1991,1992\nE1,1,abc\n");
    assert_eq!(analyze(&cfg, &broken), 1);
    assert_eq!(analyze(&cfg, &dir.path().join("absent.csv")), 1);
    assert_eq!(code(&panelstat(&["analyze", "--panel", s(&panel)])), 1);
    assert_eq!(code(&panelstat(&["frobnicate"])), 1);
    assert_eq!(code(&panelstat(&["--help"])), 0);

    // no outcome series: nothing to analyse is a config problem
    let bare = put(dir.path(), "bare.csv", &stdout(&panelstat(&["fixture"])));
    assert_eq!(analyze(&cfg, &bare), 2);
}

#[test]
fn ingest_wdi_and_gbd() {
    let dir = TempDir::new().unwrap();
    let wdi = put(
        dir.path(),
        "wdi.csv",
        "code,2000,2001,2002\nE1,1,2,3\nE2,4,-,6\n",
    );
    let gbd = put(
        dir.path(),
        "gbd.csv",
        "location,age_group,cause,measure,year,value\n\
         Lagos,20-39,depressive,DALYs,2000,10\n\
         Lagos,20-39,depressive,DALYs,2001,11\n\
         Accra,20-39,depressive,DALYs,2000,7\n",
    );
    let out = dir.path().join("panel.csv");

    let run = panelstat(&[
        "--quiet",
        "ingest",
        "--wdi",
        s(&wdi),
        "--gbd",
        s(&gbd),
        "--region",
        "Lagos",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("E1,Lagos,1,2,3"), "{text}");
    assert!(
        text.contains("depressive:20-39:DALYs,Lagos,10,11"),
        "{text}"
    );
    assert!(!text.contains("Accra"));

    assert_eq!(code(&panelstat(&["ingest", "--out", s(&out)])), 1);
    let bad = put(
        dir.path(),
        "bad.csv",
        "location,age_group,cause,measure,year,value\nX,teen,a,DALYs,2000,1\n",
    );
    assert_eq!(
        code(&panelstat(&["ingest", "--gbd", s(&bad), "--out", s(&out)])),
        1
    );
    assert_eq!(
        code(&panelstat(&[
            "ingest",
            "--gbd",
            s(&gbd),
            "--region",
            "Paris",
            "--out",
            s(&out)
        ])),
        1
    );
}

#[test]
fn burden_prints_components() {
    let dir = TempDir::new().unwrap();
    let deaths = put(dir.path(), "deaths.csv", "band,value\n20-39,10\n40-59,5\n");
    let prev = put(dir.path(), "prev.csv", "band,value\n20-39,100\n40-59,50\n");
    let life = put(dir.path(), "life.csv", "band,value\n20-39,50\n40-59,30\n");
    let weights = put(
        dir.path(),
        "w.csv",
        "condition,band,value\ndep,20-39,0.2\ndep,40-59,0.4\n",
    );
    let std_pop = put(dir.path(), "std.csv", "band,value\n20-39,0.5\n40-59,0.5\n");

    let out = panelstat(&[
        "burden",
        "--deaths",
        s(&deaths),
        "--prevalence",
        s(&prev),
        "--life-table",
        s(&life),
        "--weights",
        s(&weights),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    // yll = 10*50 + 5*30, yld = 100*0.2 + 50*0.4
    assert_eq!(
        stdout(&out),
        "condition\tdep\nyll\t650.000\nyld\t40.0000\ndaly\t690.000\n"
    );

    let out = panelstat(&[
        "burden",
        "--deaths",
        s(&deaths),
        "--prevalence",
        s(&prev),
        "--life-table",
        s(&life),
        "--weights",
        s(&weights),
        "--std-pop",
        s(&std_pop),
    ]);
    assert_eq!(code(&out), 0);
    // per-band DALYs 520 and 170, equal weights
    assert!(
        stdout(&out).ends_with("age_standardized_daly\t345.000\n"),
        "{}",
        stdout(&out)
    );

    let short = put(dir.path(), "short.csv", "band,value\n20-39,50\n");
    let out = panelstat(&[
        "burden",
        "--deaths",
        s(&deaths),
        "--prevalence",
        s(&prev),
        "--life-table",
        s(&short),
        "--weights",
        s(&weights),
    ]);
    assert_eq!(code(&out), 1);
    let two = put(
        dir.path(),
        "two.csv",
        "condition,band,value\ndep,20-39,0.2\nanx,20-39,0.1\n",
    );
    let out = panelstat(&[
        "burden",
        "--deaths",
        s(&deaths),
        "--prevalence",
        s(&prev),
        "--life-table",
        s(&life),
        "--weights",
        s(&two),
    ]);
    assert_eq!(code(&out), 1);
}
